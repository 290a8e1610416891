use std::time::{Duration, Instant};

use super::{check_layout, FieldsTmz, StepError, Stepper, TimeConvention};
use crate::boundary::PecMask;
use crate::cloud::ParticleCloud;
use crate::operators::{ExplicitTmz, ImplicitTmz};
use crate::source::SourceSpec;
use crate::sparse::{LinearSolver, SolveMethod};

/// Leapfrog ADI stepper.
///
/// Each step solves one sparse system for Ez and one for Hx; Hy is
/// diagonal. Both matrices are factorised once at construction. With a
/// y-graded absorbing layer, Ez is split into an implicitly updated x-part
/// and an explicitly updated y-part.
#[derive(Debug, Clone)]
pub struct LafStepper {
    ops: ImplicitTmz,
    e_solver: LinearSolver,
    h_solver: LinearSolver,
    eps: Vec<f64>,
    pec: Option<PecMask>,
    sources: Vec<SourceSpec>,
    split: bool,
    factorization: Duration,
    solves: Duration,
}

impl LafStepper {
    pub fn new(
        cloud: &ParticleCloud,
        ops: ImplicitTmz,
        method: SolveMethod,
        pec: Option<PecMask>,
        sources: Vec<SourceSpec>,
    ) -> Result<Self, StepError> {
        for s in &sources {
            s.check(cloud.e.len())?;
        }
        if ops.a.nrows() != cloud.e.len() || ops.c_xx.nrows() != cloud.h.len() {
            return Err(StepError::Setup("implicit operators were assembled for a different cloud".into()));
        }
        let start = Instant::now();
        let e_solver = LinearSolver::prepare(&ops.a, method)?;
        let h_solver = LinearSolver::prepare(&ops.c_xx, method)?;
        let factorization = start.elapsed();
        let split = ops.ezy_lhs.iter().zip(&ops.ezy_rhs).any(|(l, r)| l != r);
        Ok(LafStepper {
            ops,
            e_solver,
            h_solver,
            eps: cloud.e.eps.clone(),
            pec,
            sources,
            split,
            factorization,
            solves: Duration::ZERO,
        })
    }

    pub fn operators(&self) -> &ImplicitTmz {
        &self.ops
    }

    /// True when Ez is advanced in split form.
    pub fn is_split(&self) -> bool {
        self.split
    }

    pub fn factorization_time(&self) -> Duration {
        self.factorization
    }

    /// Sets `H` at `+Δt/2` from `E` at 0 for a field starting at rest,
    /// using one explicit half step of the given operators.
    pub fn initialise_at_rest(&self, explicit: &ExplicitTmz, f: &mut FieldsTmz) -> Result<(), StepError> {
        let half = 0.5 * self.ops.dt;
        f.hx = explicit.v.matvec(&f.ez)?.into_iter().map(|v| -half * v).collect();
        f.hy = explicit.z.matvec(&f.ez)?.into_iter().map(|v| half * v).collect();
        if self.split {
            f.ezx = f.ez.clone();
            f.ezy = vec![0.0; f.ez.len()];
        }
        Ok(())
    }

    fn add_sources(&self, rhs: &mut [f64], step: usize) {
        for s in &self.sources {
            rhs[s.node] += self.eps[s.node] * s.value(step, self.ops.dt);
        }
    }

    fn solve_e(&mut self, rhs: &[f64]) -> Result<Vec<f64>, StepError> {
        let t = Instant::now();
        let x = self.e_solver.solve(rhs)?;
        self.solves += t.elapsed();
        Ok(x)
    }

    fn solve_h(&mut self, rhs: &[f64]) -> Result<Vec<f64>, StepError> {
        let t = Instant::now();
        let x = self.h_solver.solve(rhs)?;
        self.solves += t.elapsed();
        Ok(x)
    }
}

impl Stepper for LafStepper {
    fn dt(&self) -> f64 {
        self.ops.dt
    }

    fn convention(&self) -> TimeConvention {
        TimeConvention::LeapfrogAdi
    }

    fn name(&self) -> &'static str {
        "laf-spem"
    }

    fn solve_time(&self) -> Duration {
        self.solves
    }

    fn step(&mut self, f: &mut FieldsTmz) -> Result<(), StepError> {
        check_layout(f, self.ops.a.nrows(), self.ops.c_xx.nrows())?;
        let next = f.step + 1;
        if self.split {
            f.ensure_split();
            let ops = &self.ops;
            let tau2 = ops.tau_sq();
            let bx = ops.b_x.matvec(&f.hx)?;
            let ezy_new: Vec<f64> =
                (0..f.ez.len()).map(|i| (ops.ezy_rhs[i] * f.ezy[i] + bx[i]) / ops.ezy_lhs[i]).collect();
            let mut rhs: Vec<f64> = (0..f.ez.len()).map(|i| ops.ezx_rhs[i] * f.ezx[i]).collect();
            let total: Vec<f64> = f.ezx.iter().zip(&f.ezy).map(|(a, b)| a + b).collect();
            ops.k_e.matvec_add(ops.rhs_sign * tau2, &total, &mut rhs)?;
            ops.k_e.matvec_add(tau2, &ezy_new, &mut rhs)?;
            ops.b_y.matvec_add(1.0, &f.hy, &mut rhs)?;
            self.add_sources(&mut rhs, next);
            f.ezx = self.solve_e(&rhs)?;
            f.ezy = ezy_new;
            if let Some(m) = &self.pec {
                m.apply(&mut f.ezx);
                m.apply(&mut f.ezy);
            }
            for i in 0..f.ez.len() {
                f.ez[i] = f.ezx[i] + f.ezy[i];
            }
        } else {
            let ops = &self.ops;
            let mut rhs = ops.a_rhs.matvec(&f.ez)?;
            ops.b_x.matvec_add(1.0, &f.hx, &mut rhs)?;
            ops.b_y.matvec_add(1.0, &f.hy, &mut rhs)?;
            self.add_sources(&mut rhs, next);
            f.ez = self.solve_e(&rhs)?;
            if let Some(m) = &self.pec {
                m.apply(&mut f.ez);
            }
        }
        let mut rhs_h = self.ops.c_xx_rhs.matvec(&f.hx)?;
        self.ops.f_x.matvec_add(1.0, &f.ez, &mut rhs_h)?;
        f.hx = self.solve_h(&rhs_h)?;
        let fy = self.ops.f_y.matvec(&f.ez)?;
        for (j, h) in f.hy.iter_mut().enumerate() {
            *h = (self.ops.c_yy_rhs[j] * *h + fy[j]) / self.ops.c_yy[j];
        }
        f.step = next;
        Ok(())
    }
}
