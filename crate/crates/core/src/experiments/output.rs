use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

/// Column names shared by the profile and ensemble CSV files.
pub const PROFILE_COLUMNS: [&str; 10] = [
    "r", "s", "log_mu", "nu", "log_G", "log_S", "A", "B2", "log_M", "delta_h",
];

/// 17 significant digits; non-finite values become an empty field.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

pub fn eta_column(eta: f64) -> String {
    format!("flag_eta_{eta}")
}

pub fn write_text(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("summary types serialise");
    s.push('\n');
    s
}

/// Two-column plot data `x = ln(1/s)`, `y = statistic`; missing values are skipped.
pub fn plotdata(points: impl IntoIterator<Item = (f64, Option<f64>)>) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in points {
        if let Some(y) = y.filter(|v| v.is_finite()) {
            let _ = writeln!(out, "{},{}", fmt_real(x), fmt_real(y));
        }
    }
    out
}

/// Linear-interpolation quantile of sorted data (`q ∈ [0, 1]`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Option<f64> {
    match sorted.len() {
        0 => None,
        1 => Some(sorted[0]),
        n => {
            let pos = q * (n - 1) as f64;
            let i = (pos.floor() as usize).min(n - 2);
            let t = pos - i as f64;
            Some(sorted[i] + t * (sorted[i + 1] - sorted[i]))
        }
    }
}
