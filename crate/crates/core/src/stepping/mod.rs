//! Time integration of the TMz system.
//!
//! Three steppers share one field layout: explicit leapfrog on the
//! particle operators, the leapfrog ADI scheme with one sparse solve per
//! field family, and a Yee finite-difference reference on the same nodes.

mod explicit;
mod fdtd;
mod laf;

pub use explicit::ExplicitStepper;
pub use fdtd::{yee_operators, FdtdStepper};
pub use laf::LafStepper;

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cloud::ParticleCloud;
use crate::operators::OperatorError;
use crate::source::SourceError;
use crate::sparse::SparseError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("divergence at step {step}: |field| = {value:.3e} exceeds {threshold:.3e}")]
    Divergence { step: usize, value: f64, threshold: f64 },
    #[error("linear solve failed: {0}")]
    Solver(#[from] SparseError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error("field vectors do not match the operators: {0}")]
    Layout(String),
    #[error("{0}")]
    Setup(String),
}

/// Where the two field families sit in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeConvention {
    /// Explicit leapfrog: E at integer steps, H half a step behind.
    Leapfrog,
    /// Leapfrog ADI: H half a step ahead of E.
    LeapfrogAdi,
}

/// Field state. Every H-node carries both in-plane components.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldsTmz {
    pub ez: Vec<f64>,
    pub hx: Vec<f64>,
    pub hy: Vec<f64>,
    /// x- and y-split parts of Ez inside absorbing layers; empty when the
    /// stepper does not split.
    pub ezx: Vec<f64>,
    pub ezy: Vec<f64>,
    pub step: usize,
    pub dt: f64,
    pub convention: TimeConvention,
}

impl FieldsTmz {
    pub fn zeros(cloud: &ParticleCloud, dt: f64, convention: TimeConvention) -> Self {
        FieldsTmz {
            ez: vec![0.0; cloud.e.len()],
            hx: vec![0.0; cloud.h.len()],
            hy: vec![0.0; cloud.h.len()],
            ezx: Vec::new(),
            ezy: Vec::new(),
            step: 0,
            dt,
            convention,
        }
    }

    /// Physical time of the E-field.
    pub fn e_time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    /// Physical time of the H-field.
    pub fn h_time(&self) -> f64 {
        match self.convention {
            TimeConvention::Leapfrog => (self.step as f64 - 0.5) * self.dt,
            TimeConvention::LeapfrogAdi => (self.step as f64 + 0.5) * self.dt,
        }
    }

    /// Largest field magnitude; infinite if any value is not finite.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for v in self.ez.iter().chain(&self.hx).chain(&self.hy) {
            if !v.is_finite() {
                return f64::INFINITY;
            }
            m = m.max(v.abs());
        }
        m
    }

    pub fn max_abs_ez(&self) -> f64 {
        self.ez.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    fn ensure_split(&mut self) {
        if self.ezx.len() != self.ez.len() {
            self.ezx = self.ez.clone();
            self.ezy = vec![0.0; self.ez.len()];
        }
    }
}

/// Discrete electromagnetic energy
/// `½ Σ ε Ez² ΔV + ½ Σ μ (Hx² W_x + Hy² W_y)`, with the H-node component
/// weights of the cloud.
pub fn energy(cloud: &ParticleCloud, f: &FieldsTmz) -> f64 {
    let mut e = 0.0;
    for i in 0..cloud.e.len() {
        e += cloud.e.eps[i] * f.ez[i] * f.ez[i] * cloud.e.volumes[i];
    }
    for j in 0..cloud.h.len() {
        let m = cloud.h.mu[j];
        e += m
            * (f.hx[j] * f.hx[j] * cloud.h_component_weight(j, 0) + f.hy[j] * f.hy[j] * cloud.h_component_weight(j, 1));
    }
    0.5 * e
}

/// Advances a [`FieldsTmz`] by one step.
pub trait Stepper {
    fn dt(&self) -> f64;
    fn convention(&self) -> TimeConvention;
    fn name(&self) -> &'static str;
    /// Advances `fields` from `fields.step` to `fields.step + 1`.
    fn step(&mut self, fields: &mut FieldsTmz) -> Result<(), StepError>;
    /// Time spent inside linear solves so far.
    fn solve_time(&self) -> Duration {
        Duration::ZERO
    }
}

/// Flags runaway growth: any field value above `threshold` or non-finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceGuard {
    pub threshold: f64,
}

impl DivergenceGuard {
    /// `1e12` times the reference amplitude (peak source amplitude, or the
    /// initial field maximum for source-free runs).
    pub fn for_amplitude(reference: f64) -> Self {
        let r = if reference > 0.0 { reference } else { 1.0 };
        DivergenceGuard { threshold: 1e12 * r }
    }

    pub fn check(&self, f: &FieldsTmz) -> Result<(), StepError> {
        let m = f.max_abs();
        if !(m <= self.threshold) {
            return Err(StepError::Divergence { step: f.step, value: m, threshold: self.threshold });
        }
        Ok(())
    }
}

/// Wall-clock time per phase.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Timings {
    pub assembly: Duration,
    pub factorization: Duration,
    pub stepping: Duration,
    pub solves: Duration,
}

/// Runs `steps` steps, checking for divergence after each one and handing
/// the state to `observe`.
pub fn run<S: Stepper + ?Sized>(
    stepper: &mut S,
    fields: &mut FieldsTmz,
    steps: usize,
    guard: &DivergenceGuard,
    mut observe: impl FnMut(&FieldsTmz),
) -> Result<Duration, StepError> {
    let start = Instant::now();
    for _ in 0..steps {
        stepper.step(fields)?;
        guard.check(fields)?;
        observe(fields);
    }
    Ok(start.elapsed())
}

fn check_layout(f: &FieldsTmz, ne: usize, nh: usize) -> Result<(), StepError> {
    if f.ez.len() != ne || f.hx.len() != nh || f.hy.len() != nh {
        return Err(StepError::Layout(format!(
            "expected {ne} E and {nh} H values, found {}/{}/{}",
            f.ez.len(),
            f.hx.len(),
            f.hy.len()
        )));
    }
    Ok(())
}
