//! Deterministic number formatting for reports and CSV output.

/// Rounds to six decimals, normalising negative zero so repeated runs are
/// byte-identical.
pub fn round6(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Fixed six-decimal rendering of a value in nats, optionally rescaled to
/// bits for display.
pub fn fmt_value(x: f64, bits: bool) -> String {
    let v = if bits { x / std::f64::consts::LN_2 } else { x };
    format!("{:.6}", round6(v))
}

/// Unit suffix matching `fmt_value`.
pub fn unit(bits: bool) -> &'static str {
    if bits {
        "bits"
    } else {
        "nats"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_is_normalised() {
        assert_eq!(fmt_value(-3e-17, false), "0.000000");
        assert_eq!(fmt_value(0.0, false), "0.000000");
    }

    #[test]
    fn bits_rescale() {
        assert_eq!(fmt_value(std::f64::consts::LN_2, true), "1.000000");
        assert_eq!(fmt_value(std::f64::consts::LN_2, false), "0.693147");
    }
}
