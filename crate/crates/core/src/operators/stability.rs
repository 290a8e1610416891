use super::{curl_curl, ExplicitTmz, OperatorError};
use crate::boundary::PecMask;
use crate::cloud::ParticleCloud;
use crate::constants::C0;
use crate::sparse::{dominant_eigenvalue, growth_rate, PowerIteration};

/// Time-step limits of the explicit leapfrog scheme for one cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// Dominant eigenvalue of the curl-curl operator `G`.
    pub lambda_max: f64,
    pub power_iterations: usize,
    /// `2 / sqrt(λ_max)`.
    pub dt_bound: f64,
    /// `Δr / (c √d)`, the Yee limit for the nominal spacing.
    pub dt_cfl: f64,
    /// `Δr / (2c)`, half the single-cell transit time.
    pub dt_cfl_half: f64,
    /// `min_i h_i / c`.
    pub min_h_over_c: f64,
    /// Step the report was evaluated at, if any.
    pub dt: Option<f64>,
    /// Growth factor per step of the explicit update at `dt`.
    pub spectral_radius: Option<f64>,
    /// `dt > dt_bound`.
    pub explicit_unstable: bool,
}

impl StabilityReport {
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("lambda_max_s-2 = {:.10e}", self.lambda_max),
            format!("power_iterations = {}", self.power_iterations),
            format!("dt_bound_s = {:.10e}", self.dt_bound),
            format!("dt_cfl_s = {:.10e}", self.dt_cfl),
            format!("dt_cfl_half_spacing_s = {:.10e}", self.dt_cfl_half),
            format!("min_h_over_c_s = {:.10e}", self.min_h_over_c),
        ];
        if let Some(dt) = self.dt {
            out.push(format!("dt_s = {dt:.10e}"));
        }
        if let Some(rho) = self.spectral_radius {
            out.push(format!("spectral_radius = {rho:.10e}"));
        }
        out.push(format!("explicit_unstable = {}", self.explicit_unstable));
        out
    }
}

/// Estimates `λ_max(G)` by power iteration and derives the explicit bound.
///
/// With a PEC mask, only the free E-nodes take part. When `dt` is given,
/// the growth factor of the full one-step update is measured as well.
pub fn stability_bound(
    cloud: &ParticleCloud,
    ops: &ExplicitTmz,
    pec: Option<&PecMask>,
    dt: Option<f64>,
    cfg: &PowerIteration,
) -> Result<StabilityReport, OperatorError> {
    let g_full = curl_curl(ops)?;
    let free: Vec<usize> = match pec {
        Some(m) => m.free_indices(),
        None => (0..cloud.e.len()).collect(),
    };
    let g = if free.len() == cloud.e.len() { g_full } else { g_full.submatrix(&free, &free) };
    let mut cfg = cfg.clone();
    if cfg.weights.is_none() {
        cfg.weights = Some(free.iter().map(|&i| cloud.e.eps[i] * cloud.e.volumes[i]).collect());
    }
    let est = dominant_eigenvalue(&g, &cfg)?;
    if !(est.value > 0.0) {
        return Err(OperatorError::NonPositiveSpectrum(est.value));
    }
    let dt_bound = 2.0 / est.value.sqrt();
    let d = cloud.dim as f64;
    let spectral_radius = match dt {
        Some(dt) => Some(leapfrog_growth(cloud, ops, pec, dt, cfg.seed)?),
        None => None,
    };
    Ok(StabilityReport {
        lambda_max: est.value,
        power_iterations: est.iterations,
        dt_bound,
        dt_cfl: cloud.spacing / (C0 * d.sqrt()),
        dt_cfl_half: cloud.spacing / (2.0 * C0),
        min_h_over_c: cloud.min_smoothing() / C0,
        dt,
        spectral_radius,
        explicit_unstable: dt.is_some_and(|dt| dt > dt_bound),
    })
}

/// Growth factor per step of the explicit TMz update at `dt`.
fn leapfrog_growth(
    cloud: &ParticleCloud,
    ops: &ExplicitTmz,
    pec: Option<&PecMask>,
    dt: f64,
    seed: u64,
) -> Result<f64, OperatorError> {
    let (ne, nh) = (cloud.e.len(), cloud.h.len());
    let rate = growth_rate(ne + 2 * nh, 4000, seed, |x| {
        let mut ez = x[..ne].to_vec();
        let mut hx = x[ne..ne + nh].to_vec();
        let mut hy = x[ne + nh..].to_vec();
        if let Some(m) = pec {
            m.apply(&mut ez);
        }
        ops.v.matvec_add(-dt, &ez, &mut hx)?;
        ops.z.matvec_add(dt, &ez, &mut hy)?;
        ops.t.matvec_add(dt, &hy, &mut ez)?;
        ops.u.matvec_add(-dt, &hx, &mut ez)?;
        if let Some(m) = pec {
            m.apply(&mut ez);
        }
        let mut y = ez;
        y.extend(hx);
        y.extend(hy);
        Ok(y)
    })?;
    Ok(rate)
}
