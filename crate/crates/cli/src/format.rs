/// Formats `x` with 12 significant digits in the style of C's `%.12g`:
/// fixed notation for decimal exponents in `[-4, 12)`, scientific otherwise,
/// trailing zeros removed.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Rounding to 12 digits first fixes the exponent (9.9999999999996 -> 1e1).
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::sig12;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (1.0, "1"),
            (0.5, "0.5"),
            (std::f64::consts::SQRT_2, "1.41421356237"),
            (-std::f64::consts::PI * 100.0, "-314.159265359"),
            (1e-7, "1e-07"),
            (1.5e-5, "1.5e-05"),
            (1.5e-4, "0.00015"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (9.9999999999996, "10"),
            (6.49, "6.49"),
            (0.1 + 0.2, "0.3"),
            (-0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(sig12(x), want, "{x:e}");
        }
        assert_eq!(sig12(f64::NAN), "nan");
        assert_eq!(sig12(f64::NEG_INFINITY), "-inf");
    }
}
