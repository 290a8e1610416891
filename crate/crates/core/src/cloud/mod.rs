//! Staggered particle clouds.
//!
//! A cloud holds two node sets. E-nodes sit at cell centres and H-nodes at
//! the midpoints of interior cell faces, so every node is surrounded by
//! nodes of the other role. Each H-node remembers which axis its face is
//! normal to; that tag survives jitter and selects the field components the
//! node carries quadrature weight for.

mod io;
mod voronoi;

pub use io::{read_cloud_csv, write_cloud_csv};
pub use voronoi::voronoi_areas;

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::constants::{EPS0, MU0};
use crate::kernel::KernelSpec;
use crate::neighbors::{find_neighbors, NeighborTable};

pub type Point = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    E,
    H,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::E => "E",
            Role::H => "H",
        })
    }
}

/// Axis an H-node's face is normal to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Facing {
    X,
    Y,
    Z,
    /// No orientation; the node weights every component.
    Any,
}

impl Facing {
    pub fn axis(self) -> Option<usize> {
        match self {
            Facing::X => Some(0),
            Facing::Y => Some(1),
            Facing::Z => Some(2),
            Facing::Any => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub eps: f64,
    pub mu: f64,
    pub sigma: f64,
}

impl Material {
    pub const VACUUM: Material = Material { eps: EPS0, mu: MU0, sigma: 0.0 };

    pub fn relative(eps_r: f64, mu_r: f64) -> Self {
        Material { eps: eps_r * EPS0, mu: mu_r * MU0, sigma: 0.0 }
    }
}

impl Default for Material {
    fn default() -> Self {
        Material::VACUUM
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CloudError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{role}-node {index}: {reason}")]
    InvalidNode { role: Role, index: usize, reason: String },
    #[error("{role}-nodes {a} and {b} coincide")]
    Coincident { role: Role, a: usize, b: usize },
    #[error("{role}-node {index} has no node of the other role inside its support")]
    Unsurrounded { role: Role, index: usize },
    #[error("Voronoi cell of node {0} is unbounded or degenerate")]
    UnboundedCell(usize),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// One family of nodes: positions and per-node attributes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeSet {
    pub positions: Vec<Point>,
    /// Smoothing length h.
    pub smoothing: Vec<f64>,
    /// Quadrature volume ΔV.
    pub volumes: Vec<f64>,
    pub eps: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl NodeSet {
    pub fn uniform(positions: Vec<Point>, h: f64, volume: f64, material: Material) -> Self {
        let n = positions.len();
        NodeSet {
            positions,
            smoothing: vec![h; n],
            volumes: vec![volume; n],
            eps: vec![material.eps; n],
            mu: vec![material.mu; n],
            sigma: vec![material.sigma; n],
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    fn validate(&self, role: Role, dim: usize) -> Result<(), CloudError> {
        let n = self.len();
        for (name, v) in [
            ("smoothing", &self.smoothing),
            ("volumes", &self.volumes),
            ("eps", &self.eps),
            ("mu", &self.mu),
            ("sigma", &self.sigma),
        ] {
            if v.len() != n {
                return Err(CloudError::InvalidParameter(format!(
                    "{role}-node attribute '{name}' has {} entries for {n} nodes",
                    v.len()
                )));
            }
        }
        for i in 0..n {
            let bad = |reason: &str| CloudError::InvalidNode { role, index: i, reason: reason.to_string() };
            if self.positions[i][..dim].iter().any(|c| !c.is_finite()) {
                return Err(bad("non-finite position"));
            }
            if !(self.smoothing[i] > 0.0 && self.smoothing[i].is_finite()) {
                return Err(bad("smoothing length must be positive"));
            }
            if !(self.volumes[i] > 0.0 && self.volumes[i].is_finite()) {
                return Err(bad("volume must be positive"));
            }
            if !(self.eps[i] > 0.0 && self.mu[i] > 0.0) {
                return Err(bad("permittivity and permeability must be positive"));
            }
            if !(self.sigma[i] >= 0.0) {
                return Err(bad("conductivity must be non-negative"));
            }
        }
        Ok(())
    }
}

/// Lattice dimensions of a cloud derived from a regular grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Lattice {
    /// E-node index of cell `(i, j, k)`.
    pub fn e_index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nx * (j + self.ny * k)
    }

    /// Cell of an E-node index.
    pub fn e_cell(&self, idx: usize) -> (usize, usize, usize) {
        (idx % self.nx, (idx / self.nx) % self.ny, idx / (self.nx * self.ny))
    }
}

/// Regular-grid parameters for a 2-D cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub spacing: f64,
    /// Lower-left corner of the domain.
    pub origin: [f64; 2],
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, spacing: f64) -> Self {
        GridSpec { nx, ny, spacing, origin: [0.0, 0.0] }
    }

    pub fn with_origin(mut self, x: f64, y: f64) -> Self {
        self.origin = [x, y];
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleCloud {
    pub dim: usize,
    /// Nominal lattice spacing Δr.
    pub spacing: f64,
    /// Smoothing ratio α, with h = α Δr.
    pub alpha: f64,
    pub lower: Point,
    pub upper: Point,
    pub e: NodeSet,
    pub h: NodeSet,
    pub facing: Vec<Facing>,
    pub lattice: Option<Lattice>,
}

impl ParticleCloud {
    /// Regular 2-D staggered cloud with `ΔV = Δr²` and `h = α Δr` everywhere.
    ///
    /// E-node `(i, j)` has index `i + nx j`. H-nodes on x-normal faces come
    /// first, ordered by `(j, i)` with `i = 1..nx`, followed by the y-normal
    /// faces ordered by `(j, i)` with `j = 1..ny`.
    pub fn regular(grid: GridSpec, alpha: f64, material: Material) -> Result<Self, CloudError> {
        let GridSpec { nx, ny, spacing: dr, origin } = grid;
        if nx < 2 || ny < 2 {
            return Err(CloudError::InvalidParameter(format!("grid must be at least 2x2, got {nx}x{ny}")));
        }
        check_spacing(dr, alpha)?;
        let [x0, y0] = origin;
        let mut e_pos = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                e_pos.push([x0 + (i as f64 + 0.5) * dr, y0 + (j as f64 + 0.5) * dr, 0.0]);
            }
        }
        let mut h_pos = Vec::new();
        let mut facing = Vec::new();
        for j in 0..ny {
            for i in 1..nx {
                h_pos.push([x0 + i as f64 * dr, y0 + (j as f64 + 0.5) * dr, 0.0]);
                facing.push(Facing::X);
            }
        }
        for j in 1..ny {
            for i in 0..nx {
                h_pos.push([x0 + (i as f64 + 0.5) * dr, y0 + j as f64 * dr, 0.0]);
                facing.push(Facing::Y);
            }
        }
        let h = alpha * dr;
        let vol = dr * dr;
        Ok(ParticleCloud {
            dim: 2,
            spacing: dr,
            alpha,
            lower: [x0, y0, 0.0],
            upper: [x0 + nx as f64 * dr, y0 + ny as f64 * dr, 0.0],
            e: NodeSet::uniform(e_pos, h, vol, material),
            h: NodeSet::uniform(h_pos, h, vol, material),
            facing,
            lattice: Some(Lattice { nx, ny, nz: 1 }),
        })
    }

    /// Regular 3-D cloud: E-nodes at cell centres, H-nodes at interior face
    /// centres, `ΔV = Δr³`.
    pub fn regular_3d(
        nx: usize,
        ny: usize,
        nz: usize,
        spacing: f64,
        alpha: f64,
        material: Material,
    ) -> Result<Self, CloudError> {
        if nx < 2 || ny < 2 || nz < 2 {
            return Err(CloudError::InvalidParameter(format!("grid must be at least 2x2x2, got {nx}x{ny}x{nz}")));
        }
        check_spacing(spacing, alpha)?;
        let dr = spacing;
        let c = |i: usize| (i as f64 + 0.5) * dr;
        let f = |i: usize| i as f64 * dr;
        let mut e_pos = Vec::new();
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    e_pos.push([c(i), c(j), c(k)]);
                }
            }
        }
        let mut h_pos = Vec::new();
        let mut facing = Vec::new();
        for k in 0..nz {
            for j in 0..ny {
                for i in 1..nx {
                    h_pos.push([f(i), c(j), c(k)]);
                    facing.push(Facing::X);
                }
            }
        }
        for k in 0..nz {
            for j in 1..ny {
                for i in 0..nx {
                    h_pos.push([c(i), f(j), c(k)]);
                    facing.push(Facing::Y);
                }
            }
        }
        for k in 1..nz {
            for j in 0..ny {
                for i in 0..nx {
                    h_pos.push([c(i), c(j), f(k)]);
                    facing.push(Facing::Z);
                }
            }
        }
        let vol = dr * dr * dr;
        Ok(ParticleCloud {
            dim: 3,
            spacing,
            alpha,
            lower: [0.0; 3],
            upper: [nx as f64 * dr, ny as f64 * dr, nz as f64 * dr],
            e: NodeSet::uniform(e_pos, alpha * dr, vol, material),
            h: NodeSet::uniform(h_pos, alpha * dr, vol, material),
            facing,
            lattice: Some(Lattice { nx, ny, nz }),
        })
    }

    pub fn nodes(&self, role: Role) -> &NodeSet {
        match role {
            Role::E => &self.e,
            Role::H => &self.h,
        }
    }

    pub fn nodes_mut(&mut self, role: Role) -> &mut NodeSet {
        match role {
            Role::E => &mut self.e,
            Role::H => &mut self.h,
        }
    }

    /// Displaces every node by a uniform random vector of length at most
    /// `fraction · Δr`. The stream is ChaCha8 seeded with `seed`; E-nodes
    /// draw first, then H-nodes.
    pub fn jitter(&self, fraction: f64, seed: u64) -> Result<Self, CloudError> {
        self.jitter_where(fraction, seed, |_, _| true)
    }

    /// Like [`ParticleCloud::jitter`], but only nodes for which `movable`
    /// returns true are displaced. Random numbers are drawn for every node,
    /// so the displacement of a movable node does not depend on the mask.
    pub fn jitter_where(
        &self,
        fraction: f64,
        seed: u64,
        movable: impl Fn(Role, &Point) -> bool,
    ) -> Result<Self, CloudError> {
        if !(0.0..0.5).contains(&fraction) {
            return Err(CloudError::InvalidParameter(format!("jitter fraction must be in [0, 0.5), got {fraction}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.clone();
        let max = fraction * self.spacing;
        for role in [Role::E, Role::H] {
            for p in out.nodes_mut(role).positions.iter_mut() {
                let r = max * rng.gen::<f64>();
                let theta = 2.0 * PI * rng.gen::<f64>();
                let d = if self.dim == 3 {
                    let cz = 2.0 * rng.gen::<f64>() - 1.0;
                    let s = (1.0 - cz * cz).sqrt();
                    [r * s * theta.cos(), r * s * theta.sin(), r * cz]
                } else {
                    [r * theta.cos(), r * theta.sin(), 0.0]
                };
                if movable(role, p) {
                    for a in 0..self.dim {
                        p[a] += d[a];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Replaces node volumes with clipped Voronoi areas (2-D only).
    ///
    /// E-nodes form one tessellation; H-nodes are tessellated per facing
    /// family, so each family tiles the domain on its own.
    pub fn with_voronoi_volumes(&self) -> Result<Self, CloudError> {
        if self.dim != 2 {
            return Err(CloudError::InvalidParameter("Voronoi volumes are only available in 2-D".into()));
        }
        let mut out = self.clone();
        out.e.volumes = voronoi_areas(&self.e.positions, self.lower, self.upper)?;
        for fam in [Facing::X, Facing::Y, Facing::Z, Facing::Any] {
            let idx: Vec<usize> = (0..self.h.len()).filter(|&j| self.facing[j] == fam).collect();
            if idx.is_empty() {
                continue;
            }
            let pts: Vec<Point> = idx.iter().map(|&j| self.h.positions[j]).collect();
            let areas = voronoi_areas(&pts, self.lower, self.upper).map_err(|e| match e {
                CloudError::UnboundedCell(k) => CloudError::UnboundedCell(idx[k]),
                other => other,
            })?;
            for (k, &j) in idx.iter().enumerate() {
                out.h.volumes[j] = areas[k];
            }
        }
        Ok(out)
    }

    /// Quadrature weight of H-node `j` for field component `component`.
    ///
    /// A node on a face normal to axis `a` samples derivatives along `a`,
    /// so it carries the components other than `a`. Each component is
    /// carried by `dim - 1` face families, which share the weight.
    pub fn h_component_weight(&self, j: usize, component: usize) -> f64 {
        let v = self.h.volumes[j];
        match self.facing[j].axis() {
            None => v,
            Some(a) if a == component => 0.0,
            Some(_) => v / (self.dim.max(2) - 1) as f64,
        }
    }

    /// Per-node quadrature weights of H-nodes for one field component.
    pub fn h_component_weights(&self, component: usize) -> Vec<f64> {
        (0..self.h.len()).map(|j| self.h_component_weight(j, component)).collect()
    }

    /// Neighbour table of `fixed`-role nodes among `other`-role nodes,
    /// using each fixed node's own support radius.
    pub fn neighbors(&self, fixed: Role, other: Role, kernel: &KernelSpec) -> NeighborTable {
        let f = self.nodes(fixed);
        let radii: Vec<f64> = f.smoothing.iter().map(|&h| kernel.support_radius(h)).collect();
        find_neighbors(&f.positions, &radii, &self.nodes(other).positions)
    }

    /// Checks node attributes, rejects coincident nodes of the same role
    /// and requires every node to see at least one node of the other role.
    pub fn validate(&self, kernel: &KernelSpec) -> Result<(), CloudError> {
        if !(2..=3).contains(&self.dim) {
            return Err(CloudError::InvalidParameter(format!("dimension must be 2 or 3, got {}", self.dim)));
        }
        if self.facing.len() != self.h.len() {
            return Err(CloudError::InvalidParameter("facing tags do not match H-node count".into()));
        }
        self.e.validate(Role::E, self.dim)?;
        self.h.validate(Role::H, self.dim)?;
        for role in [Role::E, Role::H] {
            let set = self.nodes(role);
            let tiny: Vec<f64> = set.smoothing.iter().map(|h| h * 1e-9).collect();
            let same = find_neighbors(&set.positions, &tiny, &set.positions);
            for i in 0..set.len() {
                if let Some(&j) = same.neighbors(i).iter().find(|&&j| j != i) {
                    return Err(CloudError::Coincident { role, a: i.min(j), b: i.max(j) });
                }
            }
        }
        for (fixed, other) in [(Role::E, Role::H), (Role::H, Role::E)] {
            let table = self.neighbors(fixed, other, kernel);
            if let Some(i) = (0..table.len()).find(|&i| table.neighbors(i).is_empty()) {
                return Err(CloudError::Unsurrounded { role: fixed, index: i });
            }
        }
        Ok(())
    }

    /// Smallest distance between two E-nodes.
    pub fn min_e_spacing(&self) -> f64 {
        let radii = vec![2.0 * self.spacing; self.e.len()];
        let table = find_neighbors(&self.e.positions, &radii, &self.e.positions);
        let mut best = f64::INFINITY;
        for i in 0..self.e.len() {
            for &j in table.neighbors(i) {
                if j != i {
                    best = best.min(distance(&self.e.positions[i], &self.e.positions[j]));
                }
            }
        }
        if best.is_finite() {
            best
        } else {
            self.spacing
        }
    }

    /// Smallest smoothing length over both roles.
    pub fn min_smoothing(&self) -> f64 {
        self.e.smoothing.iter().chain(&self.h.smoothing).copied().fold(f64::INFINITY, f64::min)
    }
}

fn check_spacing(dr: f64, alpha: f64) -> Result<(), CloudError> {
    if !(dr > 0.0 && dr.is_finite()) {
        return Err(CloudError::InvalidParameter(format!("spacing must be positive, got {dr}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(CloudError::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

pub fn distance(a: &Point, b: &Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}
