use super::{Derivatives, OperatorError};
use crate::cloud::ParticleCloud;
use crate::sparse::CsrMatrix;

/// TMz operators for explicit leapfrog.
///
/// With `T = D_x/ε`, `U = D_y/ε` on E-rows and `V = D_y/μ`, `Z = D_x/μ` on
/// H-rows the semi-discrete system reads
/// `dHx/dt = −V Ez`, `dHy/dt = Z Ez`, `dEz/dt = T Hy − U Hx`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitTmz {
    pub t: CsrMatrix,
    pub u: CsrMatrix,
    pub v: CsrMatrix,
    pub z: CsrMatrix,
    /// Unit-free ∂x at E-nodes acting on Hy.
    pub dx_e: CsrMatrix,
    /// Unit-free ∂y at E-nodes acting on Hx.
    pub dy_e: CsrMatrix,
    /// Unit-free ∂x at H-nodes.
    pub dx_h: CsrMatrix,
    /// Unit-free ∂y at H-nodes.
    pub dy_h: CsrMatrix,
}

pub fn assemble_explicit_tmz(cloud: &ParticleCloud, d: &Derivatives) -> Result<ExplicitTmz, OperatorError> {
    if d.dim < 2 {
        return Err(OperatorError::Unsupported("TMz operators need a 2-D or 3-D cloud".into()));
    }
    let inv_eps: Vec<f64> = cloud.e.eps.iter().map(|e| 1.0 / e).collect();
    let inv_mu: Vec<f64> = cloud.h.mu.iter().map(|m| 1.0 / m).collect();
    let dx_e = d.e_from_h(0, 1).clone();
    let dy_e = d.e_from_h(1, 0).clone();
    let dx_h = d.h_from_e(0).clone();
    let dy_h = d.h_from_e(1).clone();
    Ok(ExplicitTmz {
        t: dx_e.scale_rows(&inv_eps)?,
        u: dy_e.scale_rows(&inv_eps)?,
        v: dy_h.scale_rows(&inv_mu)?,
        z: dx_h.scale_rows(&inv_mu)?,
        dx_e,
        dy_e,
        dx_h,
        dy_h,
    })
}

/// Curl-curl operator `G = −(T Z + U V)` on E-nodes.
pub fn curl_curl(ops: &ExplicitTmz) -> Result<CsrMatrix, OperatorError> {
    let tz = ops.t.matmul(&ops.z)?;
    let uv = ops.u.matmul(&ops.v)?;
    Ok(tz.add_scaled(-1.0, &uv, -1.0)?)
}
