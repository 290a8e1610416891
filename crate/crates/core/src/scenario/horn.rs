//! Sectoral horn built from PEC plates on the regular lattice.

use std::fmt;

use crate::boundary::PecMask;
use crate::cloud::Lattice;

/// Horn outline in cell units, symmetric about the line `y = axis`.
///
/// A straight feed of inner width `feed_width` runs from the back wall at
/// `back_column` to `flare_start`; the plates then open linearly to an
/// inner width `aperture` at `flare_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HornGeometry {
    pub back_column: f64,
    pub flare_start: f64,
    pub flare_end: f64,
    pub feed_width: f64,
    pub aperture: f64,
    pub axis: f64,
    /// Column of E-nodes driven by the line source.
    pub source_column: usize,
    /// E-nodes whose centre lies within this distance of a plate are PEC.
    pub wall_half_thickness: f64,
}

impl Default for HornGeometry {
    fn default() -> Self {
        HornGeometry {
            back_column: 15.0,
            flare_start: 35.0,
            flare_end: 65.0,
            feed_width: 16.0,
            aperture: 48.0,
            axis: 50.0,
            source_column: 20,
            wall_half_thickness: 0.75,
        }
    }
}

impl fmt::Display for HornGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "back={} flare={}..{} feed_width={} aperture={} axis={} source_column={}",
            self.back_column,
            self.flare_start,
            self.flare_end,
            self.feed_width,
            self.aperture,
            self.axis,
            self.source_column
        )
    }
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let q = [a[0] + t * d[0], a[1] + t * d[1]];
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

impl HornGeometry {
    pub fn check(&self) -> Result<(), String> {
        if !(self.back_column < self.flare_start && self.flare_start < self.flare_end) {
            return Err("horn columns must satisfy back < flare_start < flare_end".into());
        }
        if !(self.feed_width > 2.0 && self.aperture >= self.feed_width) {
            return Err("horn needs feed_width > 2 and aperture >= feed_width".into());
        }
        let sc = self.source_column as f64 + 0.5;
        if !(sc > self.back_column + self.wall_half_thickness && sc < self.flare_start) {
            return Err("horn source column must lie inside the feed".into());
        }
        if !(self.wall_half_thickness >= 0.5) {
            return Err("horn wall half-thickness must be at least half a cell".into());
        }
        Ok(())
    }

    /// Plate segments in cell units.
    pub fn plates(&self) -> Vec<([f64; 2], [f64; 2])> {
        let (a, hf, ha) = (self.axis, 0.5 * self.feed_width, 0.5 * self.aperture);
        let mut out = vec![([self.back_column, a - hf], [self.back_column, a + hf])];
        for s in [-1.0, 1.0] {
            out.push(([self.back_column, a + s * hf], [self.flare_start, a + s * hf]));
            out.push(([self.flare_start, a + s * hf], [self.flare_end, a + s * ha]));
        }
        out
    }

    /// True if the cell `(i, j)` is covered by a plate.
    pub fn is_wall(&self, i: usize, j: usize) -> bool {
        let p = [i as f64 + 0.5, j as f64 + 0.5];
        self.plates().iter().any(|&(a, b)| segment_distance(p, a, b) <= self.wall_half_thickness)
    }

    /// PEC mask on a lattice, by cell index.
    pub fn mask(&self, lattice: &Lattice) -> PecMask {
        let n = lattice.nx * lattice.ny;
        PecMask::from_mask(
            (0..n)
                .map(|idx| {
                    let (i, j, _) = lattice.e_cell(idx);
                    self.is_wall(i, j)
                })
                .collect(),
        )
    }

    /// E-nodes of the source column strictly between the feed walls.
    pub fn feed_nodes(&self, lattice: &Lattice) -> Vec<usize> {
        let i = self.source_column;
        (0..lattice.ny)
            .filter(|&j| {
                let y = j as f64 + 0.5;
                (y - self.axis).abs() < 0.5 * self.feed_width && !self.is_wall(i, j)
            })
            .map(|j| lattice.e_index(i, j, 0))
            .collect()
    }
}
