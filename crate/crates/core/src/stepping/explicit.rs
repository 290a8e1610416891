use super::{check_layout, FieldsTmz, StepError, Stepper, TimeConvention};
use crate::boundary::{Absorption, PecMask};
use crate::cloud::ParticleCloud;
use crate::operators::ExplicitTmz;
use crate::source::SourceSpec;

/// Per-node update coefficients of the split-field absorbing layer.
#[derive(Debug, Clone, PartialEq)]
struct SplitCoefficients {
    /// Ezx decay and drive: `Ezx⁺ = ca_x Ezx + cb_x ∂x Hy`.
    ca_x: Vec<f64>,
    cb_x: Vec<f64>,
    ca_y: Vec<f64>,
    cb_y: Vec<f64>,
    /// Hx uses σ*_y, Hy uses σ*_x.
    da_x: Vec<f64>,
    db_x: Vec<f64>,
    da_y: Vec<f64>,
    db_y: Vec<f64>,
}

fn decay(mass: &[f64], sigma: &[f64], dt: f64) -> (Vec<f64>, Vec<f64>) {
    mass.iter()
        .zip(sigma)
        .map(|(&m, &s)| {
            let den = m + 0.5 * dt * s;
            ((m - 0.5 * dt * s) / den, dt / den)
        })
        .unzip()
}

/// Explicit leapfrog: `Hx −= Δt V Ez`, `Hy += Δt Z Ez`, then
/// `Ez += Δt (T Hy − U Hx)`, followed by sources and the PEC projection.
#[derive(Debug, Clone)]
pub struct ExplicitStepper {
    ops: ExplicitTmz,
    dt: f64,
    pec: Option<PecMask>,
    sources: Vec<SourceSpec>,
    split: Option<SplitCoefficients>,
    name: &'static str,
}

impl ExplicitStepper {
    pub fn new(
        cloud: &ParticleCloud,
        ops: ExplicitTmz,
        dt: f64,
        pec: Option<PecMask>,
        sources: Vec<SourceSpec>,
        absorption: Option<&Absorption>,
    ) -> Result<Self, StepError> {
        if !(dt >= 0.0 && dt.is_finite()) {
            return Err(StepError::Setup(format!("time step must be non-negative, got {dt}")));
        }
        for s in &sources {
            s.check(cloud.e.len())?;
        }
        let split = absorption.map(|a| {
            let (ca_x, cb_x) = decay(&cloud.e.eps, &a.e_x, dt);
            let (ca_y, cb_y) = decay(&cloud.e.eps, &a.e_y, dt);
            let (da_x, db_x) = decay(&cloud.h.mu, &a.h_x, dt);
            let (da_y, db_y) = decay(&cloud.h.mu, &a.h_y, dt);
            SplitCoefficients { ca_x, cb_x, ca_y, cb_y, da_x, db_x, da_y, db_y }
        });
        Ok(ExplicitStepper { ops, dt, pec, sources, split, name: "explicit-spem" })
    }

    pub(super) fn with_name(mut self, name: &'static str) -> Self {
        self.name = name;
        self
    }

    pub fn operators(&self) -> &ExplicitTmz {
        &self.ops
    }

    /// Sets `H` at `−Δt/2` from `E` at 0 for a field starting at rest:
    /// `H(−Δt/2) = −(Δt/2) ∂H/∂t(0)`.
    pub fn initialise_at_rest(&self, f: &mut FieldsTmz) -> Result<(), StepError> {
        let half = 0.5 * self.dt;
        f.hx = self.ops.v.matvec(&f.ez)?.into_iter().map(|v| half * v).collect();
        f.hy = self.ops.z.matvec(&f.ez)?.into_iter().map(|v| -half * v).collect();
        if self.split.is_some() {
            f.ezx = f.ez.clone();
            f.ezy = vec![0.0; f.ez.len()];
        }
        Ok(())
    }
}

impl Stepper for ExplicitStepper {
    fn dt(&self) -> f64 {
        self.dt
    }

    fn convention(&self) -> TimeConvention {
        TimeConvention::Leapfrog
    }

    fn name(&self) -> &'static str {
        self.name
    }

    fn step(&mut self, f: &mut FieldsTmz) -> Result<(), StepError> {
        check_layout(f, self.ops.t.nrows(), self.ops.v.nrows())?;
        let dt = self.dt;
        let next = f.step + 1;
        match &self.split {
            None => {
                self.ops.v.matvec_add(-dt, &f.ez, &mut f.hx)?;
                self.ops.z.matvec_add(dt, &f.ez, &mut f.hy)?;
                self.ops.t.matvec_add(dt, &f.hy, &mut f.ez)?;
                self.ops.u.matvec_add(-dt, &f.hx, &mut f.ez)?;
                for s in &self.sources {
                    f.ez[s.node] += s.value(next, dt);
                }
                if let Some(m) = &self.pec {
                    m.apply(&mut f.ez);
                }
            }
            Some(c) => {
                f.ensure_split();
                let dy = self.ops.dy_h.matvec(&f.ez)?;
                let dx = self.ops.dx_h.matvec(&f.ez)?;
                for j in 0..f.hx.len() {
                    f.hx[j] = c.da_y[j] * f.hx[j] - c.db_y[j] * dy[j];
                    f.hy[j] = c.da_x[j] * f.hy[j] + c.db_x[j] * dx[j];
                }
                let dxh = self.ops.dx_e.matvec(&f.hy)?;
                let dyh = self.ops.dy_e.matvec(&f.hx)?;
                for i in 0..f.ez.len() {
                    f.ezx[i] = c.ca_x[i] * f.ezx[i] + c.cb_x[i] * dxh[i];
                    f.ezy[i] = c.ca_y[i] * f.ezy[i] - c.cb_y[i] * dyh[i];
                }
                for s in &self.sources {
                    f.ezx[s.node] += s.value(next, dt);
                }
                if let Some(m) = &self.pec {
                    m.apply(&mut f.ezx);
                    m.apply(&mut f.ezy);
                }
                for i in 0..f.ez.len() {
                    f.ez[i] = f.ezx[i] + f.ezy[i];
                }
            }
        }
        f.step = next;
        Ok(())
    }
}
