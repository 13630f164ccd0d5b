//! Value syntax shared by the subcommands: times with a `pi` suffix,
//! `start:stop:step` ranges and comma-separated lists.

use std::f64::consts::PI;

/// A real number, optionally multiplied by π: `2`, `3pi`, `0.5pi`, `pi`, `-pi`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = if let Some(coef) = s.strip_suffix("pi") {
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|e| format!("invalid number {s:?}: {e}"))?,
        };
        c * PI
    } else {
        s.parse::<f64>().map_err(|e| format!("invalid number {s:?}: {e}"))?
    };
    if !v.is_finite() {
        return Err(format!("{s:?} is not finite"));
    }
    Ok(v)
}

/// Either a list `a,b,c` or a range `start:stop:step` (stop included when
/// it lies on the grid).
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(parse_real).collect(),
        3 => {
            let (start, stop, step) = (parse_real(parts[0])?, parse_real(parts[1])?, parse_real(parts[2])?);
            if !(start < stop) {
                return Err(format!("range {s:?} needs start < stop"));
            }
            if !(step > 0.0) {
                return Err(format!("range {s:?} needs step > 0"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            if n > 50_000_000 {
                return Err(format!("range {s:?} has too many points"));
            }
            Ok((0..=n).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(format!("expected a list a,b,c or a range start:stop:step, got {s:?}")),
    }
}

/// Comma-separated non-negative integers.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("invalid integer {p:?}: {e}")))
        .collect()
}

/// `full` or a positive integer.
pub fn parse_range(s: &str) -> Result<Option<usize>, String> {
    match s.trim() {
        "full" | "all" => Ok(None),
        v => v.parse::<usize>().map(Some).map_err(|e| format!("--z expects `full` or an integer: {e}")),
    }
}

/// Shortest round-trip text for a double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}
