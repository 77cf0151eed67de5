//! Reading cases and writing/reading result files.

use std::fs;
use std::io::Write;
use std::path::Path;

use acdc_mopf::case_model::SHIPPED_CASES;
use acdc_mopf::{load_case, shipped_case, CaseData, ObjectivePoint};
use anyhow::{bail, Context};
use serde::Serialize;

pub const COST_COLUMN: &str = "f_cost_usd_per_h";
pub const DEV_COLUMN: &str = "v_dev_pu2";
pub const VIOLATION_COLUMN: &str = "violation";

/// Loads `arg` as a file path, falling back to a bundled case of that name
/// (with or without a `.json` suffix) when no such file exists.
pub fn resolve_case(arg: &str) -> anyhow::Result<CaseData> {
    let path = Path::new(arg);
    if !path.exists() {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
        let bare = path.parent().map_or(true, |p| p.as_os_str().is_empty());
        if bare && SHIPPED_CASES.contains(&stem) {
            return Ok(shipped_case(stem)?);
        }
    }
    Ok(load_case(path)?)
}

pub fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// One archive row: physical control values and objectives.
pub struct ParetoRow {
    pub controls: Vec<f64>,
    pub point: ObjectivePoint,
}

pub fn write_pareto_csv(path: &Path, names: &[&str], rows: &[ParetoRow]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    let mut header: Vec<&str> = names.to_vec();
    header.extend([COST_COLUMN, DEV_COLUMN, VIOLATION_COLUMN]);
    w.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.controls.iter().map(|v| v.to_string()).collect();
        rec.extend([r.point.f_cost, r.point.v_dev, r.point.violation].iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Objective columns of a pareto.csv file: `(f_cost, v_dev, violation)` per row.
pub fn read_pareto_csv(path: &Path) -> anyhow::Result<Vec<[f64; 3]>> {
    if !path.exists() {
        bail!("file not found: {}", path.display());
    }
    let mut r = csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let header = r.headers()?.clone();
    let col = |name: &str| {
        header.iter().position(|h| h == name).with_context(|| format!("{}: missing column '{name}'", path.display()))
    };
    let (fc, vc) = (col(COST_COLUMN)?, col(DEV_COLUMN)?);
    let viol = header.iter().position(|h| h == VIOLATION_COLUMN);
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |c: usize| -> anyhow::Result<f64> {
            let field = rec.get(c).unwrap_or("");
            field.trim().parse().with_context(|| format!("row {}: bad number '{field}'", line + 1))
        };
        rows.push([num(fc)?, num(vc)?, viol.map(num).transpose()?.unwrap_or(0.0)]);
    }
    Ok(rows)
}

/// Whitespace-separated plot data with a `#` header line.
pub fn write_dat(path: &Path, columns: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> anyhow::Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    writeln!(f, "# {}", columns.join(" "))?;
    for r in rows {
        writeln!(f, "{}", r.join(" "))?;
    }
    Ok(())
}
