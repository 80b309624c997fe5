//! Output formatting: fixed-notation numbers at 12 significant digits,
//! locale-independent CSV and aligned tables.

/// Number of significant digits every numeric output carries.
pub const SIG_DIGITS: usize = 12;

/// Fixed (non-scientific) rendering of `x` with [`SIG_DIGITS`] significant
/// digits and a dot decimal separator. Zero prints as "0".
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // decimal exponent from the shortest round-trip scientific rendering
    let sci = format!("{:e}", x.abs());
    let exp: i32 = sci
        .split('e')
        .nth(1)
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// One CSV document: header row plus data rows, comma-separated,
/// newline-terminated.
pub fn csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format_sig(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Two-column table with left-aligned keys.
pub fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (key, value) in rows {
        out.push_str(&format!("{key:<width$}  {value}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_rendering() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.0), "1.00000000000");
        assert_eq!(format_sig(0.5), "0.500000000000");
        assert_eq!(format_sig(0.11), "0.110000000000");
        assert_eq!(format_sig(0.018985406923772073), "0.0189854069238");
        assert_eq!(format_sig(123.456), "123.456000000");
    }

    #[test]
    fn csv_layout() {
        let doc = csv(&["a", "b"], &[vec![0.0, 0.5]]);
        assert_eq!(doc, "a,b\n0,0.500000000000\n");
    }
}
