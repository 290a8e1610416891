use super::{ExplicitStepper, FieldsTmz, StepError, Stepper, TimeConvention};
use crate::boundary::{Absorption, PecMask};
use crate::cloud::{Facing, ParticleCloud};
use crate::constants::C0;
use crate::operators::{ExplicitTmz, OperatorError};
use crate::source::SourceSpec;
use crate::sparse::CsrMatrix;

/// Yee central differences on a regular 2-D cloud, in the same node layout
/// and operator form as the particle operators.
///
/// x-facing H-nodes carry Hy and y-facing H-nodes carry Hx; the other
/// component has zero rows there. H-values beyond the domain rim are zero.
pub fn yee_operators(cloud: &ParticleCloud) -> Result<ExplicitTmz, OperatorError> {
    let lat = match cloud.lattice {
        Some(l) if cloud.dim == 2 && l.nz == 1 => l,
        _ => return Err(OperatorError::Unsupported("finite differences need a regular 2-D cloud".into())),
    };
    let (nx, ny) = (lat.nx, lat.ny);
    let n_xf = ny * (nx - 1);
    let nh = n_xf + (ny - 1) * nx;
    if cloud.h.len() != nh || cloud.e.len() != nx * ny {
        return Err(OperatorError::Unsupported("cloud does not have the regular staggered layout".into()));
    }
    let x_face = |i: usize, j: usize| j * (nx - 1) + (i - 1);
    let y_face = |i: usize, j: usize| n_xf + (j - 1) * nx + i;
    let inv = 1.0 / cloud.spacing;

    let mut dx_h = Vec::new();
    let mut dy_h = Vec::new();
    for (k, f) in cloud.facing.iter().enumerate() {
        match f {
            Facing::X => {
                let (i, j) = (k % (nx - 1) + 1, k / (nx - 1));
                dx_h.push((k, lat.e_index(i, j, 0), inv));
                dx_h.push((k, lat.e_index(i - 1, j, 0), -inv));
            }
            Facing::Y => {
                let m = k - n_xf;
                let (i, j) = (m % nx, m / nx + 1);
                dy_h.push((k, lat.e_index(i, j, 0), inv));
                dy_h.push((k, lat.e_index(i, j - 1, 0), -inv));
            }
            _ => return Err(OperatorError::Unsupported("unexpected H-node facing".into())),
        }
    }
    let mut dx_e = Vec::new();
    let mut dy_e = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let e = lat.e_index(i, j, 0);
            if i + 1 < nx {
                dx_e.push((e, x_face(i + 1, j), inv));
            }
            if i > 0 {
                dx_e.push((e, x_face(i, j), -inv));
            }
            if j + 1 < ny {
                dy_e.push((e, y_face(i, j + 1), inv));
            }
            if j > 0 {
                dy_e.push((e, y_face(i, j), -inv));
            }
        }
    }
    let ne = nx * ny;
    let dx_h = CsrMatrix::from_triplets(nh, ne, &dx_h)?;
    let dy_h = CsrMatrix::from_triplets(nh, ne, &dy_h)?;
    let dx_e = CsrMatrix::from_triplets(ne, nh, &dx_e)?;
    let dy_e = CsrMatrix::from_triplets(ne, nh, &dy_e)?;
    let inv_eps: Vec<f64> = cloud.e.eps.iter().map(|e| 1.0 / e).collect();
    let inv_mu: Vec<f64> = cloud.h.mu.iter().map(|m| 1.0 / m).collect();
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

/// Finite-difference reference solver: explicit leapfrog on
/// [`yee_operators`].
#[derive(Debug, Clone)]
pub struct FdtdStepper {
    inner: ExplicitStepper,
    /// Set when `Δt` exceeds the Courant limit `Δx / (c √2)`.
    pub cfl_exceeded: bool,
}

impl FdtdStepper {
    pub fn new(
        cloud: &ParticleCloud,
        dt: f64,
        pec: Option<PecMask>,
        sources: Vec<SourceSpec>,
        absorption: Option<&Absorption>,
    ) -> Result<Self, StepError> {
        let ops = yee_operators(cloud)?;
        let inner = ExplicitStepper::new(cloud, ops, dt, pec, sources, absorption)?.with_name("fdtd");
        Ok(FdtdStepper { inner, cfl_exceeded: dt > Self::courant_limit(cloud) })
    }

    pub fn courant_limit(cloud: &ParticleCloud) -> f64 {
        cloud.spacing / (C0 * 2f64.sqrt())
    }

    pub fn operators(&self) -> &ExplicitTmz {
        self.inner.operators()
    }

    pub fn initialise_at_rest(&self, f: &mut FieldsTmz) -> Result<(), StepError> {
        self.inner.initialise_at_rest(f)
    }
}

impl Stepper for FdtdStepper {
    fn dt(&self) -> f64 {
        self.inner.dt()
    }

    fn convention(&self) -> TimeConvention {
        TimeConvention::Leapfrog
    }

    fn name(&self) -> &'static str {
        "fdtd"
    }

    fn step(&mut self, f: &mut FieldsTmz) -> Result<(), StepError> {
        self.inner.step(f)
    }
}
