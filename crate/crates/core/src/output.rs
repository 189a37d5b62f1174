//! Number formatting shared by the CSV writers.

/// Significant digits in CSV output.
pub const CSV_SIG_DIGITS: i32 = 12;

/// Decimal (non-exponent) notation with [`CSV_SIG_DIGITS`] significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (CSV_SIG_DIGITS - 1 - magnitude).clamp(0, 60) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(0.125), "0.125000000000");
        assert_eq!(fmt_sig(150.0), "150.000000000");
        assert_eq!(fmt_sig(-2.5), "-2.50000000000");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(1e-5), "0.0000100000000000");
        assert_eq!(fmt_sig(123456789012345.0), "123456789012345");
    }
}
