//! Number formatting shared by every output format.
//!
//! By default a float is written in its shortest form that parses back to
//! the same bits, so nothing is lost. With a precision `p`, values are first
//! rounded to `p` significant digits.

/// Round `x` to `digits` significant digits (identity when `None`).
pub fn round_sig(x: f64, digits: Option<u32>) -> f64 {
    match digits {
        Some(d) if x.is_finite() && x != 0.0 => {
            let d = d.clamp(1, 17) as usize;
            format!("{:.*e}", d - 1, x).parse().unwrap_or(x)
        }
        _ => x,
    }
}

/// Format a float for CSV/TSV output.
pub fn format_float(x: f64, digits: Option<u32>) -> String {
    format!("{}", round_sig(x, digits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.123456789, Some(3)), 0.123);
        assert_eq!(round_sig(-98765.4, Some(2)), -99000.0);
        assert_eq!(round_sig(0.1 + 0.2, None), 0.1 + 0.2);
        assert_eq!(format_float(0.1 + 0.2, None), "0.30000000000000004");
        assert_eq!(round_sig(0.0, Some(3)), 0.0);
    }
}
