//! Absorbing layers and conducting walls.

use thiserror::Error;

use crate::cloud::{ParticleCloud, Point};
use crate::constants::{C0, EPS0};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundaryError {
    #[error("PML needs at least 4 layers, got {0}")]
    TooFewLayers(usize),
    #[error("PML grading order must be in [2, 4], got {0}")]
    InvalidOrder(f64),
    #[error("PML target reflection must be in (0, 1), got {0}")]
    InvalidReflection(f64),
    #[error("PML of {layers} layers does not fit a domain of {cells} cells")]
    TooThick { layers: usize, cells: usize },
    #[error("mask has {found} entries for {expected} E-nodes")]
    MaskLength { expected: usize, found: usize },
}

/// Polynomially graded perfectly matched layer on the domain rim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmlSpec {
    pub layers: usize,
    pub order: f64,
    pub reflection: f64,
}

impl Default for PmlSpec {
    fn default() -> Self {
        PmlSpec { layers: 10, order: 3.0, reflection: 1e-6 }
    }
}

impl PmlSpec {
    pub fn new(layers: usize, order: f64, reflection: f64) -> Result<Self, BoundaryError> {
        if layers < 4 {
            return Err(BoundaryError::TooFewLayers(layers));
        }
        if !(2.0..=4.0).contains(&order) {
            return Err(BoundaryError::InvalidOrder(order));
        }
        if !(reflection > 0.0 && reflection < 1.0) {
            return Err(BoundaryError::InvalidReflection(reflection));
        }
        Ok(PmlSpec { layers, order, reflection })
    }

    /// Peak conductivity for a layer of the given thickness in vacuum,
    /// `−(m + 1) ln(R) ε₀ c / (2 d)`.
    pub fn sigma_max(&self, thickness: f64) -> f64 {
        -(self.order + 1.0) * self.reflection.ln() * EPS0 * C0 / (2.0 * thickness)
    }

    /// Conductivity at relative depth `s ∈ [0, 1]` into the layer.
    pub fn sigma_at(&self, depth_fraction: f64, thickness: f64) -> f64 {
        let s = depth_fraction.clamp(0.0, 1.0);
        self.sigma_max(thickness) * s.powf(self.order)
    }
}

/// Directional conductivities per node. Electric values live on E-nodes,
/// magnetic values (`σ* = σ μ/ε`, the matched value) on H-nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Absorption {
    pub e_x: Vec<f64>,
    pub e_y: Vec<f64>,
    pub h_x: Vec<f64>,
    pub h_y: Vec<f64>,
}

impl Absorption {
    pub fn zero(cloud: &ParticleCloud) -> Self {
        Absorption {
            e_x: vec![0.0; cloud.e.len()],
            e_y: vec![0.0; cloud.e.len()],
            h_x: vec![0.0; cloud.h.len()],
            h_y: vec![0.0; cloud.h.len()],
        }
    }

    /// Graded layer of `spec.layers · Δr` along all four sides of the box.
    pub fn pml(cloud: &ParticleCloud, spec: &PmlSpec) -> Result<Self, BoundaryError> {
        let thickness = spec.layers as f64 * cloud.spacing;
        let cells =
            ((cloud.upper[0] - cloud.lower[0]).min(cloud.upper[1] - cloud.lower[1]) / cloud.spacing).round() as usize;
        if 2 * spec.layers >= cells {
            return Err(BoundaryError::TooThick { layers: spec.layers, cells });
        }
        let depth = |p: &Point, a: usize| {
            let inner_lo = cloud.lower[a] + thickness;
            let inner_hi = cloud.upper[a] - thickness;
            ((inner_lo - p[a]).max(p[a] - inner_hi).max(0.0)) / thickness
        };
        let sig = |p: &Point, a: usize| spec.sigma_at(depth(p, a), thickness);
        let e_x = cloud.e.positions.iter().map(|p| sig(p, 0)).collect();
        let e_y = cloud.e.positions.iter().map(|p| sig(p, 1)).collect();
        let ratio: Vec<f64> = cloud.h.mu.iter().zip(&cloud.h.eps).map(|(m, e)| m / e).collect();
        let h_x = cloud.h.positions.iter().zip(&ratio).map(|(p, r)| sig(p, 0) * r).collect();
        let h_y = cloud.h.positions.iter().zip(&ratio).map(|(p, r)| sig(p, 1) * r).collect();
        Ok(Absorption { e_x, e_y, h_x, h_y })
    }

    pub fn is_zero(&self) -> bool {
        self.e_x.iter().chain(&self.e_y).chain(&self.h_x).chain(&self.h_y).all(|&s| s == 0.0)
    }

    /// True for nodes with any absorption, used to keep the layer regular
    /// when jittering.
    pub fn inside(cloud: &ParticleCloud, spec: &PmlSpec, p: &Point) -> bool {
        let thickness = spec.layers as f64 * cloud.spacing;
        (0..2).any(|a| p[a] < cloud.lower[a] + thickness || p[a] > cloud.upper[a] - thickness)
    }
}

/// E-nodes held at zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PecMask {
    mask: Vec<bool>,
}

impl PecMask {
    pub fn none(n: usize) -> Self {
        PecMask { mask: vec![false; n] }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        PecMask { mask }
    }

    /// Marks E-nodes by index and position.
    pub fn from_fn(cloud: &ParticleCloud, f: impl Fn(usize, &Point) -> bool) -> Self {
        PecMask { mask: cloud.e.positions.iter().enumerate().map(|(i, p)| f(i, p)).collect() }
    }

    /// The outermost ring of E-nodes. Lattice clouds use cell indices, so
    /// the ring survives jitter; other clouds use distance to the box.
    pub fn rim(cloud: &ParticleCloud) -> Self {
        match cloud.lattice {
            Some(l) => Self::from_fn(cloud, |i, _| {
                let (x, y, _) = l.e_cell(i);
                x == 0 || y == 0 || x + 1 == l.nx || y + 1 == l.ny
            }),
            None => Self::from_fn(cloud, |_, p| {
                (0..2).any(|a| p[a] - cloud.lower[a] < cloud.spacing || cloud.upper[a] - p[a] < cloud.spacing)
            }),
        }
    }

    pub fn union(&self, other: &PecMask) -> Result<PecMask, BoundaryError> {
        if self.mask.len() != other.mask.len() {
            return Err(BoundaryError::MaskLength { expected: self.mask.len(), found: other.mask.len() });
        }
        Ok(PecMask { mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect() })
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.mask
    }

    /// Indices of E-nodes that are not held at zero.
    pub fn free_indices(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&i| !self.mask[i]).collect()
    }

    /// Zeroes masked entries.
    pub fn apply(&self, field: &mut [f64]) {
        for (v, &m) in field.iter_mut().zip(&self.mask) {
            if m {
                *v = 0.0;
            }
        }
    }

    /// Largest magnitude on masked nodes.
    pub fn audit(&self, field: &[f64]) -> f64 {
        field.iter().zip(&self.mask).filter(|(_, &m)| m).map(|(v, _)| v.abs()).fold(0.0, f64::max)
    }
}
