//! Plain-text number formatting shared by the CSV emitters.

/// Formats `x` with six significant digits in the shortest of fixed or
/// exponent notation, `%g` style. Infinities print as `inf` / `-inf`.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 6;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, e) = exp.split_once('e').expect("exponent form");
    let e: i32 = e.parse().expect("exponent");
    if !(-5..DIGITS).contains(&e) {
        format!("{}e{}", trim_zeros(mantissa), e)
    } else {
        let decimals = (DIGITS - 1 - e).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
