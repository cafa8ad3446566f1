//! CSV and JSON writers. Numbers use 12 significant digits and a period
//! decimal separator regardless of locale.

use crate::dynamics::TimeSeries;
use crate::error::Result;
use crate::scan::ScanGrid;
use crate::C64;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

/// 12 significant digits in scientific notation.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{x:.11e}")
}

pub fn series_csv(ts: &TimeSeries) -> String {
    let mut s = String::from("t,p_right,vac_term,single_term,double_term,cross_term\n");
    for r in &ts.records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt12(r.t),
            fmt12(r.p_right),
            fmt12(r.vac_term),
            fmt12(r.single_term),
            fmt12(r.double_term),
            fmt12(r.cross_term)
        );
    }
    s
}

pub fn correlation_csv(rows: &[(f64, C64)]) -> String {
    let mut s = String::from("t,re_c,im_c,abs_c\n");
    for (t, c) in rows {
        let _ = writeln!(s, "{},{},{},{}", fmt12(*t), fmt12(c.re), fmt12(c.im), fmt12(c.norm()));
    }
    s
}

pub fn scan_csv(g: &ScanGrid) -> String {
    let mut s = String::from("z,t,p_right,measure\n");
    for (i, z) in g.z.iter().enumerate() {
        for (k, t) in g.times.iter().enumerate() {
            let _ = writeln!(s, "{},{},{},{}", fmt12(*z), fmt12(*t), fmt12(g.p_right[i][k]), fmt12(g.measure[i]));
        }
    }
    s
}

/// Long `(x, y, series)` table for any plotting tool.
pub fn plot_csv(series: &[(&str, Vec<(f64, f64)>)]) -> String {
    let mut s = String::from("x,y,series\n");
    for (label, pts) in series {
        for (x, y) in pts {
            let _ = writeln!(s, "{},{},{}", fmt12(*x), fmt12(*y), label);
        }
    }
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable value") + "\n";
    write_text(path, &text)
}

/// `out.csv` → `out.json` next to it.
pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    path.with_extension("json")
}
