//! List arguments: comma-separated items, each a single value, an inclusive
//! integer range `a..b`, or (reals only) an inclusive `start:step:stop`.

/// Parses e.g. `1..7`, `1,3,5` or `1..3,6`.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        if let Some((a, b)) = item.split_once("..") {
            let a: usize = a
                .trim()
                .parse()
                .map_err(|_| format!("bad range start in {item:?}"))?;
            let b: usize = b
                .trim()
                .parse()
                .map_err(|_| format!("bad range end in {item:?}"))?;
            if b < a {
                return Err(format!("empty range {item:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(
                item.parse()
                    .map_err(|_| format!("not a nonnegative integer: {item:?}"))?,
            );
        }
    }
    Ok(out)
}

// Snap to 12 decimals so that 0.1:0.1:1 yields 0.3, not 0.30000000000000004.
fn snap(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

/// Parses e.g. `0.1:0.1:1`, `1,5,10` or `1..5`.
pub fn parse_real_list(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("not a number: {t:?}"))
    };
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        let parts: Vec<&str> = item.split(':').collect();
        if parts.len() == 3 {
            let (start, step, stop) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(step > 0.0) || stop < start {
                return Err(format!(
                    "bad sweep {item:?}: need step > 0 and stop ≥ start"
                ));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            out.extend((0..=count).map(|i| snap(start + i as f64 * step)));
        } else if parts.len() == 1 {
            if let Some((a, b)) = item.split_once("..") {
                let (a, b) = (num(a)?, num(b)?);
                if b < a {
                    return Err(format!("empty range {item:?}"));
                }
                let count = (b - a + 1e-9).floor() as usize;
                out.extend((0..=count).map(|i| a + i as f64));
            } else {
                out.push(num(item)?);
            }
        } else {
            return Err(format!("cannot parse {item:?}"));
        }
    }
    Ok(out)
}
