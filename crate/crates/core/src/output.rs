//! Deterministic text formatting shared by the CSV writers.

/// Shortest representation that parses back to the same `f64`.
///
/// Plain decimal notation in `[1e-6, 1e16)`, exponent notation otherwise.
/// Negative zero prints as `0`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if a.is_finite() && (1e-6..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
