use crate::cloud::{GridSpec, Material, ParticleCloud};
use crate::constants::C0;
use crate::kernel::KernelSpec;
use crate::operators::{
    assemble_implicit_tmz, stability_bound, Derivatives, ImplicitOptions, Pairing, StabilityReport,
};
use crate::sparse::PowerIteration;

use super::config::ScenarioConfig;
use super::run::{build_setup, explicit_operators, resolve_dt, simulate};
use super::ScenarioError;

/// Published sparsity percentages of the E-node block on regular clouds.
pub const TABLE_SPARSITY: [(usize, f64); 6] =
    [(100, 81.86), (200, 91.412), (625, 96.45), (900, 96.45), (2500, 97.48), (3600, 99.33)];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    /// Relative L2 error against the reference; infinite when the run failed.
    pub l2: f64,
    pub is_min: bool,
}

/// One full run per smoothing factor, sorted by `alpha`. Failed runs are
/// recorded with an infinite error.
pub fn alpha_sweep(cfg: &ScenarioConfig, alphas: &[f64]) -> Result<Vec<SweepRow>, ScenarioError> {
    if cfg.output.reference == super::Reference::None {
        return Err(ScenarioError::Invalid("alpha sweep needs `reference` in [output]".into()));
    }
    let mut rows: Vec<SweepRow> = alphas
        .iter()
        .map(|&alpha| {
            let mut c = cfg.clone();
            c.alpha = alpha;
            c.output.snapshot_steps.clear();
            c.output.probes.clear();
            c.output.energy = false;
            c.output.stability = false;
            let l2 = match simulate(&c) {
                Ok(out) => out.l2_profile.or(out.l2_ez).unwrap_or(f64::INFINITY),
                Err(_) => f64::INFINITY,
            };
            SweepRow { alpha, l2, is_min: false }
        })
        .collect();
    rows.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    if let Some(k) = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.l2.is_finite())
        .min_by(|a, b| a.1.l2.total_cmp(&b.1.l2))
        .map(|(k, _)| k)
    {
        rows[k].is_min = true;
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityRow {
    pub n: usize,
    pub nx: usize,
    pub ny: usize,
    pub nnz: usize,
    /// `100 (1 − nnz / N²)`.
    pub sparsity: f64,
    /// Published value for this size, when there is one.
    pub table: Option<f64>,
}

fn lattice_sides(n: usize) -> Option<(usize, usize)> {
    let mut best = None;
    let mut a = 2;
    while a * a <= n {
        if n.is_multiple_of(a) && n / a >= 2 {
            best = Some((a, n / a));
        }
        a += 1;
    }
    best
}

/// Sparsity of the E-node system matrix on regular `nx × ny = N` clouds
/// with the most nearly square sides. `N = 1` is a single self-entry.
pub fn sparsity_report(sizes: &[usize], alpha: f64) -> Result<Vec<SparsityRow>, ScenarioError> {
    let table = |n: usize| TABLE_SPARSITY.iter().find(|t| t.0 == n).map(|t| t.1);
    let kernel = KernelSpec::cubic_spline(2).map_err(|e| ScenarioError::Setup(e.to_string()))?;
    let spacing = 0.01;
    sizes
        .iter()
        .map(|&n| {
            if n == 1 {
                return Ok(SparsityRow { n, nx: 1, ny: 1, nnz: 1, sparsity: 0.0, table: table(n) });
            }
            let (nx, ny) = lattice_sides(n).ok_or_else(|| {
                ScenarioError::Setup(format!("{n} nodes do not form a lattice with both sides at least 2"))
            })?;
            let cloud = ParticleCloud::regular(GridSpec::new(nx, ny, spacing), alpha, Material::VACUUM)?;
            let d = Derivatives::assemble(&cloud, &kernel, Pairing::Adjoint)?;
            let ops =
                assemble_implicit_tmz(&cloud, &d, &kernel, spacing / (2.0 * C0), ImplicitOptions::default(), None)?;
            let nnz = ops.a.nnz();
            let sparsity = 100.0 * (1.0 - nnz as f64 / (n * n) as f64);
            Ok(SparsityRow { n, nx, ny, nnz, sparsity, table: table(n) })
        })
        .collect()
}

/// Stability report of a scenario at its own time step, PEC nodes excluded.
pub fn stability_report(cfg: &ScenarioConfig) -> Result<StabilityReport, ScenarioError> {
    let setup = build_setup(cfg)?;
    let (_, explicit) = explicit_operators(cfg, &setup)?;
    let (dt, _) = resolve_dt(cfg, &setup, &explicit)?;
    Ok(stability_bound(&setup.cloud, &explicit, setup.pec.as_ref(), Some(dt), &PowerIteration::default())?)
}
