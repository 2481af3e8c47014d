//! `%g`-style float formatting with a fixed number of significant digits.

/// Format `v` with `digits` significant digits, trailing zeros dropped.
///
/// Uses positional notation when the decimal exponent is in `-5..digits`,
/// scientific (`1.5e-7`) otherwise.
pub fn sig(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    // Round first so the exponent reflects carries such as 9.99 -> 10.0.
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{}", trim(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim(&format!("{:.*}", decimals, v)).to_string()
}

/// [`sig`] with 12 significant digits, the precision used for all reports.
pub fn sig12(v: f64) -> String {
    sig(v, 12)
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positional() {
        assert_eq!(sig12(17f64.sqrt()), "4.12310562562");
        assert_eq!(sig12(66.0), "66");
        assert_eq!(sig12(-0.5), "-0.5");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig(1.144_73, 3), "1.14");
        assert_eq!(sig(9.996, 3), "10");
        assert_eq!(sig12(1e-5), "0.00001");
    }

    #[test]
    fn scientific() {
        assert_eq!(sig12(1.5e-7), "1.5e-7");
        assert_eq!(sig12(2.0e15), "2e15");
        assert_eq!(sig(123_456.0, 3), "1.23e5");
        assert_eq!(sig12(f64::INFINITY), "inf");
        assert_eq!(sig12(f64::NAN), "nan");
    }

    #[test]
    fn round_trips_to_twelve_digits() {
        for &v in &[std::f64::consts::PI, 1.0 / 3.0, 123_456.789_012_345, 6.02e23, 1.6e-19] {
            let back: f64 = sig12(v).parse().unwrap();
            assert!(((back - v) / v).abs() < 1e-11, "{v}");
        }
    }
}
