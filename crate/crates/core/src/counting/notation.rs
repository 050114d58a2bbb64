//! Compact `value(err)` uncertainty notation, e.g. `0.328(18)` for 0.328 ± 0.018.

/// Formats `value ± sigma` with the error rounded to two significant digits
/// and the value rounded to the same decimal place.
pub fn compact(value: f64, sigma: f64) -> String {
    if !value.is_finite() {
        return format!("{value}");
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return format!("{value:.6}(0)");
    }
    let mut decimals = 1 - sigma.log10().floor() as i32;
    let mut err = (sigma * 10f64.powi(decimals)).round();
    if err >= 100.0 {
        decimals -= 1;
        err = (sigma * 10f64.powi(decimals)).round();
    }
    if decimals >= 0 {
        let d = decimals as usize;
        format!("{value:.d$}({})", err as u64)
    } else {
        // Error spans digits left of the point: print both as integers.
        let scale = 10f64.powi(-decimals);
        let v = (value / scale).round() * scale;
        format!("{v:.0}({:.0})", err * scale)
    }
}

/// Parses `value(err)` back into `(value, sigma)`.
pub fn parse_compact(s: &str) -> Option<(f64, f64)> {
    let (v, rest) = s.split_once('(')?;
    let e = rest.strip_suffix(')')?;
    let value: f64 = v.parse().ok()?;
    let digits: u64 = e.parse().ok()?;
    let decimals = v.split_once('.').map_or(0, |(_, frac)| frac.len());
    if decimals == 0 {
        return Some((value, digits as f64));
    }
    Some((value, digits as f64 / 10f64.powi(decimals as i32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn table_example() {
        assert_eq!(compact(0.328, 0.018), "0.328(18)");
        assert_eq!(compact(0.32812, 0.01849), "0.328(18)");
    }

    #[test]
    fn other_scales() {
        assert_eq!(compact(-0.33412, 0.0031), "-0.3341(31)");
        assert_eq!(compact(8.3012, 0.052), "8.301(52)");
        assert_eq!(compact(8.30, 0.26), "8.30(26)");
        assert_eq!(compact(1234.0, 18.0), "1234(18)");
        assert_eq!(compact(12345.0, 180.0), "12350(180)");
        assert_eq!(compact(0.5, 0.00996), "0.500(10)");
        assert_eq!(compact(1.0, 0.0), "1.000000(0)");
    }

    #[test]
    fn parse() {
        assert_eq!(parse_compact("0.328(18)"), Some((0.328, 0.018)));
        assert_eq!(parse_compact("1234(18)"), Some((1234.0, 18.0)));
        assert_eq!(parse_compact("0.328"), None);
    }

    proptest! {
        #[test]
        fn round_trip_within_rounding(value in -10.0f64..10.0, sigma in 1e-5f64..1.0) {
            let s = compact(value, sigma);
            let (v, e) = parse_compact(&s).unwrap();
            prop_assert!((e - sigma).abs() <= 0.05 * sigma + 1e-12, "{s}");
            prop_assert!((v - value).abs() <= 0.05 * sigma + 1e-12, "{s}");
        }
    }
}
