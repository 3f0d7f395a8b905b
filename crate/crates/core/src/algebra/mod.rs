//! Pauli, Dirac alpha and generalized 8×8 alpha matrices, the 4- and
//! 8-component momentum-space Hamiltonians, and the exact algebra checks.
//!
//! Component ordering of eight-component vectors is
//! `(Ψ₁, Ψ₂, Ψ₃, Ψ₄, Φ₁, Φ₂, Φ₃, Φ₄)`.

mod linalg;
mod matrix;
mod params;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

pub use linalg::{
    condition_number, determinant, eigen_decompose, eigenvalues, expm, inverse, null_space,
    singular_values, EigenDecomposition, DEFAULT_NULL_TOL, DEGENERACY_TOL,
};
pub use matrix::{ComplexMatrix, ComplexVector};
pub use params::QuantumParams;

use crate::report::{Check, VerificationReport};
use matrix::{I, ONE, ZERO};

/// Slots of the spin-up (+ħ/2) components in an eight-component vector.
pub const SPIN_UP_SLOTS: [usize; 4] = [0, 2, 4, 6];
/// Slots of the spin-down (−ħ/2) components.
pub const SPIN_DOWN_SLOTS: [usize; 4] = [1, 3, 5, 7];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("alpha index {0} out of range 0..=3")]
    IndexOutOfRange(usize),
    #[error("unknown generalized alpha tag `{0}` (expected 0-, 0+, 1, 2 or 3)")]
    InvalidTag(String),
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error(
        "matrix is defective at eigenvalue {eigenvalue}: algebraic multiplicity {algebraic}, geometric {geometric}"
    )]
    Defective {
        eigenvalue: Complex64,
        algebraic: usize,
        geometric: usize,
    },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

pub fn pauli(axis: Axis) -> ComplexMatrix {
    match axis {
        Axis::X => ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
        Axis::Y => ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]),
        Axis::Z => ComplexMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]]),
    }
}

/// Dirac alpha matrix `α_index`, `index ∈ {0, 1, 2, 3}`.
///
/// `α₀ = diag(I₂, −I₂)`; `α_j` has `σ_j` on both off-diagonal blocks.
pub fn alpha(index: usize) -> Result<ComplexMatrix, AlgebraError> {
    let i2 = ComplexMatrix::identity(2);
    let z2 = ComplexMatrix::zeros(2, 2);
    let off = |s: ComplexMatrix| ComplexMatrix::from_blocks(&z2, &s, &s, &z2);
    Ok(match index {
        0 => ComplexMatrix::from_blocks(&i2, &z2, &z2, &-&i2),
        1 => off(pauli(Axis::X)),
        2 => off(pauli(Axis::Y)),
        3 => off(pauli(Axis::Z)),
        other => return Err(AlgebraError::IndexOutOfRange(other)),
    })
}

fn alpha_unchecked(index: usize) -> ComplexMatrix {
    alpha(index).expect("index in range")
}

/// Tags of the generalized 8×8 alpha matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneralizedAlpha {
    ZeroMinus,
    ZeroPlus,
    One,
    Two,
    Three,
}

impl GeneralizedAlpha {
    pub const ALL: [GeneralizedAlpha; 5] = [
        GeneralizedAlpha::ZeroMinus,
        GeneralizedAlpha::ZeroPlus,
        GeneralizedAlpha::One,
        GeneralizedAlpha::Two,
        GeneralizedAlpha::Three,
    ];
    pub const SPATIAL: [GeneralizedAlpha; 3] = [
        GeneralizedAlpha::One,
        GeneralizedAlpha::Two,
        GeneralizedAlpha::Three,
    ];
}

impl fmt::Display for GeneralizedAlpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GeneralizedAlpha::ZeroMinus => "0-",
            GeneralizedAlpha::ZeroPlus => "0+",
            GeneralizedAlpha::One => "1",
            GeneralizedAlpha::Two => "2",
            GeneralizedAlpha::Three => "3",
        };
        f.write_str(s)
    }
}

impl FromStr for GeneralizedAlpha {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "0-" => Ok(GeneralizedAlpha::ZeroMinus),
            "0+" => Ok(GeneralizedAlpha::ZeroPlus),
            "1" => Ok(GeneralizedAlpha::One),
            "2" => Ok(GeneralizedAlpha::Two),
            "3" => Ok(GeneralizedAlpha::Three),
            other => Err(AlgebraError::InvalidTag(other.to_string())),
        }
    }
}

/// Generalized alpha matrix `A_tag` (8×8).
///
/// `A₀₋ = [[0, 0], [−α₀, α₀]]`, `A₀₊ = [[α₀, −α₀], [0, 0]]`,
/// `A_j = diag(α_j, α_j)`.
pub fn a_matrix(tag: GeneralizedAlpha) -> ComplexMatrix {
    let z4 = ComplexMatrix::zeros(4, 4);
    let a0 = alpha_unchecked(0);
    match tag {
        GeneralizedAlpha::ZeroMinus => ComplexMatrix::from_blocks(&z4, &z4, &-&a0, &a0),
        GeneralizedAlpha::ZeroPlus => ComplexMatrix::from_blocks(&a0, &-&a0, &z4, &z4),
        GeneralizedAlpha::One => diag_pair(&alpha_unchecked(1)),
        GeneralizedAlpha::Two => diag_pair(&alpha_unchecked(2)),
        GeneralizedAlpha::Three => diag_pair(&alpha_unchecked(3)),
    }
}

fn diag_pair(block: &ComplexMatrix) -> ComplexMatrix {
    let z = ComplexMatrix::zeros(block.rows(), block.cols());
    ComplexMatrix::from_blocks(block, &z, &z, block)
}

/// `AB + BA`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, AlgebraError> {
    if !a.is_square() {
        return Err(AlgebraError::NotSquare(a.rows(), a.cols()));
    }
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(AlgebraError::DimensionMismatch {
            expected: (a.rows(), a.cols()),
            found: (b.rows(), b.cols()),
        });
    }
    Ok(&(a * b) + &(b * a))
}

/// Momentum-space Dirac Hamiltonian `m_e c² α₀ + c Σ α_j p_j`.
pub fn hamiltonian_d4(p: [f64; 3], params: &QuantumParams) -> ComplexMatrix {
    let mut h = alpha_unchecked(0).scale(params.rest_energy());
    for (j, &pj) in p.iter().enumerate() {
        if pj != 0.0 {
            h = &h + &alpha_unchecked(j + 1).scale(params.c * pj);
        }
    }
    h
}

/// Momentum-space generalized Hamiltonian
/// `μ_f A₀₋ + μ_e A₀₊ + c Σ A_j p_j` on eight components.
pub fn hamiltonian_d8(p: [f64; 3], params: &QuantumParams) -> ComplexMatrix {
    let mut h = &a_matrix(GeneralizedAlpha::ZeroMinus).scale(params.mu_f())
        + &a_matrix(GeneralizedAlpha::ZeroPlus).scale(params.mu_e());
    for (tag, &pj) in GeneralizedAlpha::SPATIAL.iter().zip(&p) {
        if pj != 0.0 {
            h = &h + &a_matrix(*tag).scale(params.c * pj);
        }
    }
    h
}

/// `m_f²c⁴ A₀₋² + m_e²c⁴ A₀₊² + c²|p|² I₈`, the closed form of `H_D8²`.
pub fn hamiltonian_d8_squared_closed_form(p: [f64; 3], params: &QuantumParams) -> ComplexMatrix {
    let am = a_matrix(GeneralizedAlpha::ZeroMinus);
    let ap = a_matrix(GeneralizedAlpha::ZeroPlus);
    let mf_c2 = params.m_f() * params.c * params.c;
    let me_c2 = params.rest_energy();
    let p2: f64 = p.iter().map(|x| x * x).sum();
    let mass = &(&am * &am).scale(mf_c2 * mf_c2) + &(&ap * &ap).scale(me_c2 * me_c2);
    &mass + &ComplexMatrix::identity(8).scale(params.c * params.c * p2)
}

/// The 4×4 block of an 8×8 operator acting on one spin sector, in the order
/// `(Ψ₁, Ψ₃, Φ₁, Φ₃)` for spin up or `(Ψ₂, Ψ₄, Φ₂, Φ₄)` for spin down.
pub fn sector_block(h8: &ComplexMatrix, slots: &[usize; 4]) -> ComplexMatrix {
    h8.principal_submatrix(slots)
}

fn exact_check(name: &str, reference: &str, lhs: &ComplexMatrix, rhs: &ComplexMatrix) -> Check {
    // exact: entries are small integers and ±i, so products are exact in f64
    let diff = lhs.max_abs_diff(rhs);
    Check::within(name, reference, diff, 0.0)
}

/// Evaluates every alpha and generalized-alpha identity with exact equality,
/// plus the Hamiltonian squaring identities at a few momenta for `params`.
pub fn check_algebra(params: &QuantumParams) -> VerificationReport {
    let mut report = VerificationReport::new();
    let i4 = ComplexMatrix::identity(4);
    let z4 = ComplexMatrix::zeros(4, 4);
    let i8 = ComplexMatrix::identity(8);
    let z8 = ComplexMatrix::zeros(8, 8);
    let alphas: Vec<ComplexMatrix> = (0..4).map(alpha_unchecked).collect();

    for (j, a) in alphas.iter().enumerate() {
        report.push(exact_check(
            &format!("alpha_{j} squared"),
            "alpha_j^2 = I_4",
            &(a * a),
            &i4,
        ));
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            let ac = anticommutator(&alphas[i], &alphas[j]).expect("same size");
            report.push(exact_check(
                &format!("alpha_{i} alpha_{j} anticommute"),
                "alpha_i alpha_j + alpha_j alpha_i = 0_4",
                &ac,
                &z4,
            ));
        }
    }

    let am = a_matrix(GeneralizedAlpha::ZeroMinus);
    let ap = a_matrix(GeneralizedAlpha::ZeroPlus);
    let am2 = &am * &am;
    let ap2 = &ap * &ap;
    let lower = ComplexMatrix::from_blocks(&z4, &z4, &-&i4, &i4);
    let upper = ComplexMatrix::from_blocks(&i4, &-&i4, &z4, &z4);
    report.push(exact_check(
        "A_0- squared",
        "A_{0-}^2 = [[0_4, 0_4], [-I_4, I_4]]",
        &am2,
        &lower,
    ));
    report.push(exact_check(
        "A_0- A_0+ product",
        "A_{0-}^2 = A_{0-} A_{0+}",
        &(&am * &ap),
        &am2,
    ));
    report.push(exact_check(
        "A_0+ squared",
        "A_{0+}^2 = [[I_4, -I_4], [0_4, 0_4]]",
        &ap2,
        &upper,
    ));
    report.push(exact_check(
        "A_0+ A_0- product",
        "A_{0+}^2 = A_{0+} A_{0-}",
        &(&ap * &am),
        &ap2,
    ));
    let mixed = ComplexMatrix::from_blocks(&i4, &-&i4, &-&i4, &i4);
    report.push(exact_check(
        "A_0+ A_0- anticommutator",
        "A_{0+} A_{0-} + A_{0-} A_{0+} = [[I_4, -I_4], [-I_4, I_4]]",
        &anticommutator(&ap, &am).expect("same size"),
        &mixed,
    ));
    report.push(exact_check(
        "A_0-^2 + A_0+^2",
        "A_{0-}^2 + A_{0+}^2 = [[I_4, -I_4], [-I_4, I_4]]",
        &(&am2 + &ap2),
        &mixed,
    ));

    let spatial: Vec<ComplexMatrix> = GeneralizedAlpha::SPATIAL.iter().map(|&t| a_matrix(t)).collect();
    for (j, a) in spatial.iter().enumerate() {
        let j = j + 1;
        report.push(exact_check(
            &format!("A_{j} squared"),
            "A_j^2 = I_8",
            &(a * a),
            &i8,
        ));
        report.push(exact_check(
            &format!("A_0- A_{j} anticommute"),
            "A_{0-} A_j + A_j A_{0-} = 0_8",
            &anticommutator(&am, a).expect("same size"),
            &z8,
        ));
        report.push(exact_check(
            &format!("A_0+ A_{j} anticommute"),
            "A_{0+} A_j + A_j A_{0+} = 0_8",
            &anticommutator(&ap, a).expect("same size"),
            &z8,
        ));
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            report.push(exact_check(
                &format!("A_{} A_{} anticommute", i + 1, j + 1),
                "A_i A_j + A_j A_i = 0_8",
                &anticommutator(&spatial[i], &spatial[j]).expect("same size"),
                &z8,
            ));
        }
    }

    let e0 = params.rest_energy();
    let mut worst_d4: f64 = 0.0;
    let mut worst_d8: f64 = 0.0;
    for p in [[0.0, 0.0, 0.0], [0.3, -1.2, 0.7], [2.0, 0.5, -3.0]] {
        let p = p.map(|x| x * params.m_e * params.c);
        let p2: f64 = p.iter().map(|x| x * x).sum();
        let scale = e0 * e0 + params.c * params.c * p2;
        let h4 = hamiltonian_d4(p, params);
        let expect4 = ComplexMatrix::identity(4).scale(scale);
        worst_d4 = worst_d4.max((&h4 * &h4).max_abs_diff(&expect4) / scale);
        let h8 = hamiltonian_d8(p, params);
        let expect8 = hamiltonian_d8_squared_closed_form(p, params);
        worst_d8 = worst_d8.max((&h8 * &h8).max_abs_diff(&expect8) / scale);
    }
    report.push(Check::within(
        "H_D4 squared",
        "H_D4^2 = (m_e^2 c^4 + c^2 |p|^2) I_4",
        worst_d4,
        1e-12,
    ));
    report.push(Check::within(
        "H_D8 squared",
        "H_D8^2 = m_f^2 c^4 A_{0-}^2 + m_e^2 c^4 A_{0+}^2 + c^2 |p|^2 I_8",
        worst_d8,
        1e-12,
    ));
    report
}
