use super::{Derivatives, HMass, OperatorError, SecondDerivative, SignMode};
use crate::boundary::Absorption;
use crate::cloud::{ParticleCloud, Role};
use crate::kernel::KernelSpec;
use crate::sparse::CsrMatrix;

/// Options of the implicit TMz assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ImplicitOptions {
    pub sign_mode: SignMode,
    pub h_mass: HMass,
    pub second_derivative: SecondDerivative,
}

/// Time-invariant matrices of the leapfrog ADI update, with `τ = Δt/2`.
///
/// E-update, x-split part solved implicitly:
/// `A E⁺ = A_rhs E + B_x Hx + B_y Hy`, where
/// `A = diag(ε + Δtσx/2) − τ² K_e` and `A_rhs = diag(ε − Δtσx/2) ± τ² K_e`.
///
/// H-update: `C_xx Hx⁺ = C_xx_rhs Hx + F_x E⁺` and
/// `diag(C_yy) Hy⁺ = diag(C_yy_rhs) Hy + F_y E⁺`.
///
/// `K_e` and `K_h` are the second-derivative operators along x at E-nodes
/// and along y at H-nodes, already weighted by the material parameters.
/// With absorption, the y-split part of Ez is advanced explicitly with the
/// diagonal coefficients `ezy_lhs` and `ezy_rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitTmz {
    pub dt: f64,
    pub options: ImplicitOptions,
    pub k_e: CsrMatrix,
    pub k_h: CsrMatrix,
    pub a: CsrMatrix,
    pub a_rhs: CsrMatrix,
    pub c_xx: CsrMatrix,
    pub c_xx_rhs: CsrMatrix,
    pub c_yy: Vec<f64>,
    pub c_yy_rhs: Vec<f64>,
    /// E-rows acting on Hx: `−Δt ∂y`.
    pub b_x: CsrMatrix,
    /// E-rows acting on Hy: `+Δt ∂x`.
    pub b_y: CsrMatrix,
    /// Hx-rows acting on E.
    pub f_x: CsrMatrix,
    /// Hy-rows acting on E.
    pub f_y: CsrMatrix,
    /// `ε − Δtσx/2`, multiplying the x-split part on the right-hand side.
    pub ezx_rhs: Vec<f64>,
    pub ezy_lhs: Vec<f64>,
    pub ezy_rhs: Vec<f64>,
    /// `+1` for standard-plus, `−1` for literal-paper.
    pub rhs_sign: f64,
}

impl ImplicitTmz {
    /// `τ²`.
    pub fn tau_sq(&self) -> f64 {
        0.25 * self.dt * self.dt
    }
}

pub fn assemble_implicit_tmz(
    cloud: &ParticleCloud,
    d: &Derivatives,
    kernel: &KernelSpec,
    dt: f64,
    options: ImplicitOptions,
    absorption: Option<&Absorption>,
) -> Result<ImplicitTmz, OperatorError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(OperatorError::InvalidTimeStep(dt));
    }
    if d.dim != 2 {
        return Err(OperatorError::Unsupported("implicit TMz operators need a 2-D cloud".into()));
    }
    let ne = cloud.e.len();
    let nh = cloud.h.len();
    let zeros_e = vec![0.0; ne];
    let zeros_h = vec![0.0; nh];
    let (sx_e, sy_e, sx_h, sy_h) = match absorption {
        Some(a) => (&a.e_x[..], &a.e_y[..], &a.h_x[..], &a.h_y[..]),
        None => (&zeros_e[..], &zeros_e[..], &zeros_h[..], &zeros_h[..]),
    };
    let tau2 = 0.25 * dt * dt;
    let s = match options.sign_mode {
        SignMode::LiteralPaper => -1.0,
        SignMode::StandardPlus => 1.0,
    };
    let inv = |v: &[f64]| v.iter().map(|x| 1.0 / x).collect::<Vec<f64>>();
    let inv_mu_h = inv(&cloud.h.mu);
    let inv_eps_e = inv(&cloud.e.eps);

    let dx_e = d.e_from_h(0, 1);
    let dy_e = d.e_from_h(1, 0);
    let dx_h = d.h_from_e(0);
    let dy_h = d.h_from_e(1);

    let k_e = match options.second_derivative {
        SecondDerivative::Composite => dx_e.matmul(&dx_h.scale_rows(&inv_mu_h)?)?,
        mode => kernel_second_derivative(cloud, Role::E, 0, kernel, mode)?.scale_rows(&inv(&cloud.e.mu))?,
    };
    let k_h = match (options.second_derivative, options.h_mass) {
        (SecondDerivative::Composite, HMass::Maxwell) => dy_h.matmul(&dy_e.scale_rows(&inv_eps_e)?)?,
        (SecondDerivative::Composite, HMass::LiteralPaper) => dy_h.matmul(dy_e)?.scale_rows(&inv_mu_h)?,
        (mode, HMass::Maxwell) => {
            kernel_second_derivative(cloud, Role::H, 1, kernel, mode)?.scale_rows(&inv(&cloud.h.eps))?
        }
        (mode, HMass::LiteralPaper) => {
            kernel_second_derivative(cloud, Role::H, 1, kernel, mode)?.scale_rows(&inv_mu_h)?
        }
    };

    let half = 0.5 * dt;
    let plus = |m: &[f64], sig: &[f64]| m.iter().zip(sig).map(|(m, s)| m + half * s).collect::<Vec<f64>>();
    let minus = |m: &[f64], sig: &[f64]| m.iter().zip(sig).map(|(m, s)| m - half * s).collect::<Vec<f64>>();

    let eps = &cloud.e.eps;
    let a = CsrMatrix::diagonal(&plus(eps, sx_e)).add_scaled(1.0, &k_e, -tau2)?;
    let ezx_rhs = minus(eps, sx_e);
    let a_rhs = CsrMatrix::diagonal(&ezx_rhs).add_scaled(1.0, &k_e, s * tau2)?;

    // Magnetic conductivities are given in the μ-scaled form; the literal
    // H-mass uses ε as its mass, so the damping is rescaled by ε/μ.
    let (mass_h, sig_hx, sig_hy): (Vec<f64>, Vec<f64>, Vec<f64>) = match options.h_mass {
        HMass::Maxwell => (cloud.h.mu.clone(), sx_h.to_vec(), sy_h.to_vec()),
        HMass::LiteralPaper => {
            let r: Vec<f64> = cloud.h.eps.iter().zip(&cloud.h.mu).map(|(e, m)| e / m).collect();
            (
                cloud.h.eps.clone(),
                sx_h.iter().zip(&r).map(|(s, r)| s * r).collect(),
                sy_h.iter().zip(&r).map(|(s, r)| s * r).collect(),
            )
        }
    };
    let c_xx = CsrMatrix::diagonal(&plus(&mass_h, &sig_hy)).add_scaled(1.0, &k_h, -tau2)?;
    let c_xx_rhs = CsrMatrix::diagonal(&minus(&mass_h, &sig_hy)).add_scaled(1.0, &k_h, s * tau2)?;
    let c_yy = plus(&mass_h, &sig_hx);
    let c_yy_rhs = minus(&mass_h, &sig_hx);

    let b_x = dy_e.scale(-dt);
    let b_y = dx_e.scale(dt);
    let (f_x, f_y) = match options.h_mass {
        HMass::Maxwell => (dy_h.scale(-dt), dx_h.scale(dt)),
        HMass::LiteralPaper => (dy_h.scale(-dt).scale_rows(&inv_mu_h)?, dx_h.scale(dt).scale_rows(&inv_mu_h)?),
    };

    Ok(ImplicitTmz {
        dt,
        options,
        k_e,
        k_h,
        a,
        a_rhs,
        c_xx,
        c_xx_rhs,
        c_yy,
        c_yy_rhs,
        b_x,
        b_y,
        f_x,
        f_y,
        ezx_rhs,
        ezy_lhs: plus(eps, sy_e),
        ezy_rhs: minus(eps, sy_e),
        rhs_sign: s,
    })
}

/// Difference-form kernel second derivative along `axis` on same-role
/// neighbours: row `i` holds `∂²W/∂x_a²(x_i − x_j) ΔV_j` off the diagonal
/// and minus the row sum on it.
pub fn kernel_second_derivative(
    cloud: &ParticleCloud,
    role: Role,
    axis: usize,
    kernel: &KernelSpec,
    mode: SecondDerivative,
) -> Result<CsrMatrix, OperatorError> {
    let set = cloud.nodes(role);
    let table = cloud.neighbors(role, role, kernel);
    let mut trip = Vec::with_capacity(table.total());
    for i in 0..set.len() {
        let p = set.positions[i];
        let h = set.smoothing[i];
        let mut row = Vec::new();
        let mut moment = 0.0;
        for &j in table.neighbors(i) {
            if j == i {
                continue;
            }
            let q = set.positions[j];
            let dx = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
            let w = kernel.second_derivative(dx, h, axis)? * set.volumes[j];
            moment += w * 0.5 * dx[axis] * dx[axis];
            row.push((j, w));
        }
        let scale = match mode {
            SecondDerivative::KernelNormalized => {
                if !(moment > 0.0) {
                    return Err(OperatorError::Unsupported(format!(
                        "second-derivative normalisation failed at {role}-node {i}"
                    )));
                }
                1.0 / moment
            }
            _ => 1.0,
        };
        let mut diag = 0.0;
        for (j, w) in row {
            trip.push((i, j, w * scale));
            diag -= w * scale;
        }
        trip.push((i, i, diag));
    }
    Ok(CsrMatrix::from_triplets(set.len(), set.len(), &trip)?)
}
