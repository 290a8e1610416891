//! First-order consistent gradient weights.
//!
//! Raw kernel gradients lose accuracy wherever the support is truncated or
//! the nodes are irregular. The weights here are Shepard-normalised first,
//! which makes them annihilate constants exactly. A per-node moment matrix
//! is then inverted so that linear fields are differentiated exactly.

use thiserror::Error;

use crate::cloud::Point;
use crate::kernel::{KernelError, KernelSpec};
use crate::neighbors::NeighborTable;
use crate::sparse::CsrMatrix;

/// Moment matrices with a 1-norm condition number above this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrectionError {
    #[error("node {node} has no neighbours inside its support")]
    EmptyStencil { node: usize },
    #[error(
        "moment matrix at node {node} is singular (condition number {condition:.3e}); enlarge the smoothing length"
    )]
    Singular { node: usize, condition: f64 },
    #[error("kernel evaluation failed at node {node}: {source}")]
    Kernel { node: usize, source: KernelError },
}

/// Nodes at which a gradient is evaluated, and the nodes it is sampled from.
#[derive(Debug, Clone, Copy)]
pub struct Stencil<'a> {
    pub fixed: &'a [Point],
    /// Smoothing length per fixed node.
    pub smoothing: &'a [f64],
    pub others: &'a [Point],
    /// Quadrature volume per sampled node.
    pub volumes: &'a [f64],
}

/// Per-node Shepard sums and inverse moment matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyCorrection {
    pub dim: usize,
    /// `Σ_j W_ij ΔV_j`.
    pub shepard: Vec<f64>,
    /// Inverse moment matrix per fixed node; entries beyond `dim` are zero.
    pub inverse_moments: Vec<[[f64; 3]; 3]>,
    /// Moment matrix per fixed node.
    pub moments: Vec<[[f64; 3]; 3]>,
}

/// Gradient weights, one matrix per axis, rows on fixed nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientWeights {
    pub axes: Vec<CsrMatrix>,
}

impl GradientWeights {
    pub fn axis(&self, a: usize) -> &CsrMatrix {
        &self.axes[a]
    }
}

fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

struct NodeTerms {
    /// (neighbour, W ΔV, ∇W ΔV) for each neighbour.
    terms: Vec<(usize, f64, [f64; 3])>,
    shepard: f64,
    shepard_grad: [f64; 3],
}

fn node_terms(
    i: usize,
    stencil: &Stencil<'_>,
    table: &NeighborTable,
    kernel: &KernelSpec,
) -> Result<NodeTerms, CorrectionError> {
    let nb = table.neighbors(i);
    if nb.is_empty() {
        return Err(CorrectionError::EmptyStencil { node: i });
    }
    let h = stencil.smoothing[i];
    let mut terms = Vec::with_capacity(nb.len());
    let mut shepard = 0.0;
    let mut sg = [0.0; 3];
    for &j in nb {
        let dx = sub(&stencil.fixed[i], &stencil.others[j]);
        let w = kernel.value(dx, h).map_err(|source| CorrectionError::Kernel { node: i, source })?;
        let g = kernel.gradient(dx, h).map_err(|source| CorrectionError::Kernel { node: i, source })?;
        let v = stencil.volumes[j];
        let gv = [g[0] * v, g[1] * v, g[2] * v];
        shepard += w * v;
        for a in 0..3 {
            sg[a] += gv[a];
        }
        terms.push((j, w * v, gv));
    }
    if !(shepard > 0.0) {
        return Err(CorrectionError::EmptyStencil { node: i });
    }
    Ok(NodeTerms { terms, shepard, shepard_grad: sg })
}

/// Shepard-mixed gradient `s ∇W − s² W Σ_k ∇W_k ΔV_k` times `ΔV_j`.
fn mixed(t: &NodeTerms, wv: f64, gv: &[f64; 3]) -> [f64; 3] {
    let s = 1.0 / t.shepard;
    std::array::from_fn(|a| s * gv[a] - s * s * wv * t.shepard_grad[a])
}

fn invert(m: &[[f64; 3]; 3], dim: usize) -> Option<([[f64; 3]; 3], f64)> {
    let mut inv = [[0.0; 3]; 3];
    let det = match dim {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    };
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    match dim {
        1 => inv[0][0] = 1.0 / det,
        2 => {
            inv[0][0] = m[1][1] / det;
            inv[0][1] = -m[0][1] / det;
            inv[1][0] = -m[1][0] / det;
            inv[1][1] = m[0][0] / det;
        }
        _ => {
            for r in 0..3 {
                for c in 0..3 {
                    let (r1, r2) = ((c + 1) % 3, (c + 2) % 3);
                    let (c1, c2) = ((r + 1) % 3, (r + 2) % 3);
                    inv[r][c] = (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) / det;
                }
            }
        }
    }
    let norm1 = |a: &[[f64; 3]; 3]| (0..dim).map(|c| (0..dim).map(|r| a[r][c].abs()).sum::<f64>()).fold(0.0, f64::max);
    let cond = norm1(m) * norm1(&inv);
    Some((inv, cond))
}

/// Computes Shepard sums and inverse moment matrices
/// `M_ab = Σ_j ∂_a φ_ij (x_j − x_i)_b ΔV_j` for every fixed node.
pub fn build_correction(
    stencil: &Stencil<'_>,
    table: &NeighborTable,
    kernel: &KernelSpec,
) -> Result<ConsistencyCorrection, CorrectionError> {
    let dim = kernel.dim();
    let n = stencil.fixed.len();
    let mut shepard = Vec::with_capacity(n);
    let mut inverse_moments = Vec::with_capacity(n);
    let mut moments = Vec::with_capacity(n);
    for i in 0..n {
        let t = node_terms(i, stencil, table, kernel)?;
        let mut m = [[0.0; 3]; 3];
        for (j, wv, gv) in &t.terms {
            let phi = mixed(&t, *wv, gv);
            let rel = sub(&stencil.others[*j], &stencil.fixed[i]);
            for a in 0..dim {
                for b in 0..dim {
                    m[a][b] += phi[a] * rel[b];
                }
            }
        }
        let (inv, cond) = invert(&m, dim).ok_or(CorrectionError::Singular { node: i, condition: f64::INFINITY })?;
        if !(cond <= MAX_CONDITION) {
            return Err(CorrectionError::Singular { node: i, condition: cond });
        }
        shepard.push(t.shepard);
        inverse_moments.push(inv);
        moments.push(m);
    }
    Ok(ConsistencyCorrection { dim, shepard, inverse_moments, moments })
}

/// Corrected gradient weights: row `i` of axis `a` holds
/// `(M_i⁻¹ ∇φ_ij)_a ΔV_j` for every neighbour `j`, explicit zeros included.
pub fn corrected_gradient(
    stencil: &Stencil<'_>,
    table: &NeighborTable,
    kernel: &KernelSpec,
) -> Result<GradientWeights, CorrectionError> {
    let corr = build_correction(stencil, table, kernel)?;
    assemble(stencil, table, kernel, |i, t, wv, gv| {
        let phi = mixed(t, wv, gv);
        let l = &corr.inverse_moments[i];
        std::array::from_fn(|a| (0..3).map(|b| l[a][b] * phi[b]).sum())
    })
}

/// Uncorrected weights `∇W_ij ΔV_j`.
pub fn raw_gradient(
    stencil: &Stencil<'_>,
    table: &NeighborTable,
    kernel: &KernelSpec,
) -> Result<GradientWeights, CorrectionError> {
    assemble(stencil, table, kernel, |_, _, _, gv| *gv)
}

fn assemble(
    stencil: &Stencil<'_>,
    table: &NeighborTable,
    kernel: &KernelSpec,
    weight: impl Fn(usize, &NodeTerms, f64, &[f64; 3]) -> [f64; 3],
) -> Result<GradientWeights, CorrectionError> {
    let dim = kernel.dim();
    let n = stencil.fixed.len();
    let mut offsets = vec![0];
    let mut cols = Vec::with_capacity(table.total());
    let mut vals: Vec<Vec<f64>> = vec![Vec::with_capacity(table.total()); dim];
    for i in 0..n {
        let t = node_terms(i, stencil, table, kernel)?;
        for (j, wv, gv) in &t.terms {
            let w = weight(i, &t, *wv, gv);
            cols.push(*j);
            for a in 0..dim {
                vals[a].push(w[a]);
            }
        }
        offsets.push(cols.len());
    }
    let m = stencil.others.len();
    let axes = vals.into_iter().map(|v| CsrMatrix::from_sorted_rows(n, m, offsets.clone(), cols.clone(), v)).collect();
    Ok(GradientWeights { axes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::{GridSpec, Material, ParticleCloud, Role};

    fn setup(alpha: f64, jitter: f64) -> (ParticleCloud, KernelSpec) {
        let c = ParticleCloud::regular(GridSpec::new(6, 6, 0.1), alpha, Material::VACUUM)
            .unwrap()
            .jitter(jitter, 11)
            .unwrap();
        (c, KernelSpec::cubic_spline(2).unwrap())
    }

    #[test]
    fn linear_field_gradient_is_exact() {
        let (c, k) = setup(0.7075, 0.2);
        let table = c.neighbors(Role::H, Role::E, &k);
        let st =
            Stencil { fixed: &c.h.positions, smoothing: &c.h.smoothing, others: &c.e.positions, volumes: &c.e.volumes };
        let g = corrected_gradient(&st, &table, &k).unwrap();
        let f: Vec<f64> = c.e.positions.iter().map(|p| 3.0 * p[0] - 2.0 * p[1]).collect();
        let gx = g.axis(0).matvec(&f).unwrap();
        let gy = g.axis(1).matvec(&f).unwrap();
        for i in 0..c.h.len() {
            assert!((gx[i] - 3.0).abs() < 1e-10, "{}", gx[i]);
            assert!((gy[i] + 2.0).abs() < 1e-10, "{}", gy[i]);
        }
    }

    #[test]
    fn constant_rows_sum_to_zero() {
        let (c, k) = setup(0.7075, 0.2);
        let table = c.neighbors(Role::E, Role::H, &k);
        let st =
            Stencil { fixed: &c.e.positions, smoothing: &c.e.smoothing, others: &c.h.positions, volumes: &c.h.volumes };
        let g = corrected_gradient(&st, &table, &k).unwrap();
        for a in 0..2 {
            let s = g.axis(a).matvec(&vec![1.0; c.h.len()]).unwrap();
            assert!(s.iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn collinear_stencil_is_singular() {
        // at alpha = 0.5 an x-facing H-node sees only its two E-neighbours
        let (c, k) = setup(0.5, 0.0);
        let table = c.neighbors(Role::H, Role::E, &k);
        let st =
            Stencil { fixed: &c.h.positions, smoothing: &c.h.smoothing, others: &c.e.positions, volumes: &c.e.volumes };
        assert!(matches!(build_correction(&st, &table, &k), Err(CorrectionError::Singular { .. })));
    }
}
