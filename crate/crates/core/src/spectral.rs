//! Frequency estimation for sampled signals.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

const PAD_FACTOR: usize = 4;

fn hann(n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![1.0; n];
    }
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

/// `|Σ wₙ xₙ e^{iωn·dt}|`, which peaks at `ω₀` for `xₙ ∝ e^{−iω₀ n·dt}`.
fn windowed_dtft(windowed: &[Complex64], dt: f64, omega: f64) -> f64 {
    let step = Complex64::from_polar(1.0, omega * dt);
    let mut phase = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for &x in windowed {
        acc += x * phase;
        phase *= step;
    }
    acc.norm()
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (hi - lo).abs() <= 1e-15 * (lo.abs() + hi.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

fn peak(signal: &[Complex64], dt: f64, positive_only: bool) -> f64 {
    let n = signal.len();
    if n == 0 {
        return 0.0;
    }
    let w = hann(n);
    let windowed: Vec<Complex64> = signal.iter().zip(&w).map(|(x, w)| x * w).collect();
    let padded_len = (n * PAD_FACTOR).next_power_of_two();
    let mut buf = windowed.clone();
    buf.resize(padded_len, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(padded_len).process(&mut buf);

    // bin j evaluates the transform at ω = −2πj/(N·dt)
    let spacing = 2.0 * PI / (padded_len as f64 * dt);
    let omega_of = |j: usize| {
        let signed = if j < padded_len / 2 {
            j as f64
        } else {
            j as f64 - padded_len as f64
        };
        -spacing * signed
    };
    let best = (0..padded_len)
        .filter(|&j| !positive_only || omega_of(j) >= 0.0)
        .max_by(|&a, &b| buf[a].norm().total_cmp(&buf[b].norm()))
        .unwrap_or(0);
    let centre = omega_of(best);
    let lo = if positive_only {
        (centre - spacing).max(0.0)
    } else {
        centre - spacing
    };
    golden_max(|om| windowed_dtft(&windowed, dt, om), lo, centre + spacing)
}

/// Dominant non-negative angular frequency of a uniformly sampled real
/// signal: Hann window, zero-padded FFT, then a golden-section refinement
/// of the transform magnitude around the strongest bin.
pub fn peak_frequency_real(signal: &[f64], dt: f64) -> f64 {
    let c: Vec<Complex64> = signal.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    peak(&c, dt, true)
}

/// Dominant signed angular frequency `ω` of a complex signal `∝ e^{−iωt}`.
pub fn peak_frequency_complex(signal: &[Complex64], dt: f64) -> f64 {
    peak(signal, dt, false)
}

/// Angular frequency from linearly interpolated zero crossings,
/// `ω = π(N − 1)/(t_last − t_first)` over `N` crossings.
pub fn zero_crossing_frequency(times: &[f64], signal: &[f64]) -> Option<f64> {
    let mut crossings = Vec::new();
    for i in 1..signal.len().min(times.len()) {
        let (a, b) = (signal[i - 1], signal[i]);
        if a == 0.0 && i == 1 {
            crossings.push(times[0]);
        } else if (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0) {
            if b == 0.0 {
                crossings.push(times[i]);
            } else {
                let frac = a / (a - b);
                crossings.push(times[i - 1] + frac * (times[i] - times[i - 1]));
            }
        }
    }
    crossings.dedup();
    if crossings.len() < 3 {
        return None;
    }
    let span = crossings[crossings.len() - 1] - crossings[0];
    (span > 0.0).then(|| PI * (crossings.len() - 1) as f64 / span)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(n: usize, dt: f64, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..n).map(|i| f(i as f64 * dt)).collect()
    }

    #[test]
    fn real_peak_of_pure_tone() {
        let dt = 0.05;
        let s = sampled(2000, dt, |t| (1.37 * t + 0.3).cos());
        assert!((peak_frequency_real(&s, dt) - 1.37).abs() < 1e-6);
    }

    #[test]
    fn real_peak_prefers_larger_amplitude() {
        let dt = 0.02;
        let s = sampled(5000, dt, |t| 0.3 * (0.8 * t).sin() + (2.9 * t).cos());
        assert!((peak_frequency_real(&s, dt) - 2.9).abs() < 1e-3);
        let s = sampled(5000, dt, |t| (0.8 * t).sin() + 0.3 * (2.9 * t).cos());
        assert!((peak_frequency_real(&s, dt) - 0.8).abs() < 1e-3);
    }

    #[test]
    fn complex_peak_is_signed() {
        let dt = 0.1;
        let s: Vec<Complex64> = (0..1024)
            .map(|i| Complex64::from_polar(1.0, -0.9 * i as f64 * dt))
            .collect();
        assert!((peak_frequency_complex(&s, dt) - 0.9).abs() < 1e-6);
        let s: Vec<Complex64> = s.iter().map(|z| z.conj()).collect();
        assert!((peak_frequency_complex(&s, dt) + 0.9).abs() < 1e-6);
    }

    #[test]
    fn zero_crossings_of_sine() {
        let dt = 1e-3;
        let times: Vec<f64> = (0..20000).map(|i| i as f64 * dt).collect();
        let s: Vec<f64> = times.iter().map(|t| (2.1 * t + 0.4).sin()).collect();
        let w = zero_crossing_frequency(&times, &s).unwrap();
        assert!((w - 2.1).abs() < 1e-6);
    }

    #[test]
    fn constant_signal_has_no_crossings() {
        let times = [0.0, 1.0, 2.0, 3.0];
        assert!(zero_crossing_frequency(&times, &[1.0; 4]).is_none());
    }
}
