//! Decimal formatting with 17 significant digits, the exchange format for
//! every real written by the toolkit.

/// Formats `x` with 17 significant digits in scientific notation.
/// Non-finite values map to `inf`, `-inf` and `nan`.
pub fn real(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::real;

    #[test]
    fn round_trips() {
        for x in [0.0, 1.0, -2.5, std::f64::consts::PI, 1e-300, 6.02e23] {
            let s = real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(real(f64::INFINITY), "inf");
        assert_eq!(real(1.0), "1.0000000000000000e0");
    }
}
