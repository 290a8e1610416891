//! Field snapshots as CSV.
//!
//! ```text
//! # scenario=fig6 step=70 time_s=1.1675e-9 solver=laf-spem
//! role,x,y,field,value
//! E,5.0000000000000001e-3,5.0000000000000001e-3,ez,0.0000000000000000e0
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::cloud::ParticleCloud;
use crate::stepping::FieldsTmz;

use super::ScenarioError;

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRow {
    pub role: String,
    pub x: f64,
    pub y: f64,
    pub field: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub scenario: String,
    pub step: usize,
    pub time_s: f64,
    pub solver: String,
    pub rows: Vec<SnapshotRow>,
}

impl Snapshot {
    /// Collects Ez at every E-node and Hx, Hy at every H-node.
    pub fn capture(scenario: &str, solver: &str, cloud: &ParticleCloud, f: &FieldsTmz) -> Self {
        let mut rows = Vec::with_capacity(cloud.e.len() + 2 * cloud.h.len());
        for (p, &v) in cloud.e.positions.iter().zip(&f.ez) {
            rows.push(SnapshotRow { role: "E".into(), x: p[0], y: p[1], field: "ez".into(), value: v });
        }
        for (j, p) in cloud.h.positions.iter().enumerate() {
            for (name, v) in [("hx", f.hx[j]), ("hy", f.hy[j])] {
                rows.push(SnapshotRow { role: "H".into(), x: p[0], y: p[1], field: name.into(), value: v });
            }
        }
        Snapshot { scenario: scenario.to_string(), step: f.step, time_s: f.e_time(), solver: solver.to_string(), rows }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 2));
        let _ = writeln!(
            s,
            "# scenario={} step={} time_s={:e} solver={}",
            self.scenario, self.step, self.time_s, self.solver
        );
        s.push_str("role,x,y,field,value\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{:.16e},{:.16e},{},{:.16e}", r.role, r.x, r.y, r.field, r.value);
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), ScenarioError> {
        fs::write(path, self.to_csv()).map_err(|e| ScenarioError::io(path, e))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let header = lines.next().ok_or("empty snapshot")?;
        let header = header.strip_prefix("# ").ok_or("missing snapshot header")?;
        let mut scenario = None;
        let mut step = None;
        let mut time_s = None;
        let mut solver = None;
        for kv in header.split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(|| format!("bad header field `{kv}`"))?;
            match k {
                "scenario" => scenario = Some(v.to_string()),
                "step" => step = Some(v.parse::<usize>().map_err(|e| e.to_string())?),
                "time_s" => time_s = Some(v.parse::<f64>().map_err(|e| e.to_string())?),
                "solver" => solver = Some(v.to_string()),
                _ => return Err(format!("unknown header field `{k}`")),
            }
        }
        if lines.next() != Some("role,x,y,field,value") {
            return Err("missing column header".into());
        }
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            let c: Vec<&str> = line.split(',').collect();
            if c.len() != 5 {
                return Err(format!("row {}: expected 5 columns", k + 1));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| format!("row {}: {e}", k + 1));
            rows.push(SnapshotRow {
                role: c[0].to_string(),
                x: num(c[1])?,
                y: num(c[2])?,
                field: c[3].to_string(),
                value: num(c[4])?,
            });
        }
        Ok(Snapshot {
            scenario: scenario.ok_or("header lacks scenario")?,
            step: step.ok_or("header lacks step")?,
            time_s: time_s.ok_or("header lacks time_s")?,
            solver: solver.ok_or("header lacks solver")?,
            rows,
        })
    }

    pub fn read(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|e| ScenarioError::io(path, e))?;
        Snapshot::parse(&text).map_err(|m| ScenarioError::Runtime(format!("{}: {m}", path.display())))
    }

    /// Values of one field, in row order.
    pub fn field(&self, name: &str) -> Vec<f64> {
        self.rows.iter().filter(|r| r.field == name).map(|r| r.value).collect()
    }
}

/// `‖a − b‖ / ‖b‖`, or `‖a − b‖` when `b` vanishes.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if norm > 0.0 {
        diff / norm
    } else {
        diff
    }
}

/// Relative L2 difference of two snapshots over all rows.
pub fn l2_error(a: &Snapshot, b: &Snapshot) -> Result<f64, ScenarioError> {
    if a.rows.len() != b.rows.len() {
        return Err(ScenarioError::Runtime(format!("snapshots have {} and {} rows", a.rows.len(), b.rows.len())));
    }
    for (k, (ra, rb)) in a.rows.iter().zip(&b.rows).enumerate() {
        if ra.role != rb.role || ra.field != rb.field || ra.x != rb.x || ra.y != rb.y {
            return Err(ScenarioError::Runtime(format!("snapshots differ in node set at row {}", k + 1)));
        }
    }
    let va: Vec<f64> = a.rows.iter().map(|r| r.value).collect();
    let vb: Vec<f64> = b.rows.iter().map(|r| r.value).collect();
    Ok(relative_l2(&va, &vb))
}
