use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// Physical constants of the generalized Dirac system.
///
/// Everything else (the second rest mass, the coupling coefficients of the
/// Ψ and Φ sectors, the continuum frequencies) is derived from these four
/// numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumParams {
    pub m_e: f64,
    pub epsilon: f64,
    pub c: f64,
    pub hbar: f64,
}

impl QuantumParams {
    pub fn new(m_e: f64, epsilon: f64, c: f64, hbar: f64) -> Result<Self, AlgebraError> {
        let p = Self {
            m_e,
            epsilon,
            c,
            hbar,
        };
        p.validate()?;
        Ok(p)
    }

    /// `ħ = c = m_e = 1`.
    pub fn natural(epsilon: f64) -> Self {
        Self {
            m_e: 1.0,
            epsilon,
            c: 1.0,
            hbar: 1.0,
        }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        Self { epsilon, ..self }
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.m_e) || !positive(self.c) || !positive(self.hbar) {
            return Err(AlgebraError::InvalidParams(format!(
                "m_e, c and hbar must be positive and finite (got m_e={}, c={}, hbar={})",
                self.m_e, self.c, self.hbar
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(AlgebraError::InvalidParams(format!(
                "epsilon must be finite and non-negative (got {})",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Second rest mass `m_f = ε m_e`.
    pub fn m_f(&self) -> f64 {
        self.epsilon * self.m_e
    }

    /// `m_e c²`, the natural energy scale.
    pub fn rest_energy(&self) -> f64 {
        self.m_e * self.c * self.c
    }

    /// `m_e c²·√(1+ε²)`, the optical gap energy.
    pub fn optical_rest_energy(&self) -> f64 {
        self.rest_energy() * (1.0 + self.epsilon * self.epsilon).sqrt()
    }

    /// Coupling coefficient of the Ψ sector, `m_e c²/√(1+ε²)`.
    pub fn mu_e(&self) -> f64 {
        self.rest_energy() / (1.0 + self.epsilon * self.epsilon).sqrt()
    }

    /// Coupling coefficient of the Φ sector, `ε² m_e c²/√(1+ε²)`.
    ///
    /// Equal to `m_f c²/√(1+ε⁻²)` for ε > 0 and continuous at ε = 0.
    pub fn mu_f(&self) -> f64 {
        let e2 = self.epsilon * self.epsilon;
        e2 * self.rest_energy() / (1.0 + e2).sqrt()
    }

    /// `m_e c²/ħ`.
    pub fn omega_e(&self) -> f64 {
        self.rest_energy() / self.hbar
    }

    /// `m_f c²/ħ`.
    pub fn omega_f(&self) -> f64 {
        self.m_f() * self.c * self.c / self.hbar
    }
}

impl Default for QuantumParams {
    fn default() -> Self {
        Self::natural(0.5)
    }
}
