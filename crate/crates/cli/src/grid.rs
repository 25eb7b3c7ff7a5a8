//! Parameter lists for `--conversion` and `--time`.

/// Parses `x`, `a,b,c` or `start:step:end` (inclusive of `end`).
pub fn parse_points(src: &str) -> Result<Vec<f64>, String> {
    let src = src.trim();
    if src.contains(':') {
        let parts: Vec<&str> = src.split(':').collect();
        let [a, step, b] = parts[..] else {
            return Err(format!("expected start:step:end, got `{src}`"));
        };
        let (a, step, b) = (number(a)?, number(step)?, number(b)?);
        if !(a.is_finite() && b.is_finite() && step.is_finite()) || step <= 0.0 || b < a {
            return Err(format!("invalid grid `{src}`"));
        }
        // index-based so that the points do not accumulate rounding drift
        let count = ((b - a) / step + 1e-9).floor() as usize;
        if count > 10_000_000 {
            return Err(format!("grid `{src}` has too many points"));
        }
        let mut pts: Vec<f64> = (0..=count).map(|i| a + i as f64 * step).collect();
        if let Some(last) = pts.last_mut() {
            if (*last - b).abs() <= 1e-9 * step {
                *last = b;
            }
        }
        Ok(pts)
    } else {
        src.split(',').map(number).collect()
    }
}

fn number(raw: &str) -> Result<f64, String> {
    let raw = raw.trim();
    match raw {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        _ => raw.parse().map_err(|_| format!("invalid number `{raw}`")),
    }
}
