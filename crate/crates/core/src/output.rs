//! Plain-text number formatting shared by the CSV writers.

/// Formats with 15 significant digits, `.` as decimal separator, no
/// grouping, trailing zeros trimmed. Scientific notation outside
/// `1e-5 <= |x| < 1e15`.
pub fn fmt_sig15(x: f64) -> String {
    fmt_sig(x, 15)
}

/// [`fmt_sig15`] with `digits` significant digits (at least 1).
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

/// Joins formatted numbers into one CSV row.
pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|v| fmt_sig15(*v)).collect::<Vec<_>>().join(",")
}
