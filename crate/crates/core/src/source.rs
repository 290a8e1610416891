//! Soft point sources.

use std::f64::consts::PI;

use thiserror::Error;

use crate::cloud::{ParticleCloud, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SourceError {
    #[error("source node {node} out of range for {count} E-nodes")]
    NodeOutOfRange { node: usize, count: usize },
    #[error("invalid source parameter: {0}")]
    InvalidParameter(String),
}

/// Time signature, evaluated at integer step indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Waveform {
    /// `exp(−(n − center)² / width_sq)`.
    GaussianPulse { center: f64, width_sq: f64 },
    /// `sin(2π f n Δt)`.
    Sinusoid { frequency: f64 },
}

impl Waveform {
    pub const fn default_pulse() -> Self {
        Waveform::GaussianPulse { center: 20.0, width_sq: 72.0 }
    }

    pub fn at(&self, step: usize, dt: f64) -> f64 {
        let n = step as f64;
        match *self {
            Waveform::GaussianPulse { center, width_sq } => (-(n - center).powi(2) / width_sq).exp(),
            Waveform::Sinusoid { frequency } => (2.0 * PI * frequency * n * dt).sin(),
        }
    }

    /// First step after which the waveform stays below `1e-16` of its peak,
    /// or `None` for waveforms that never switch off.
    pub fn shutoff_step(&self) -> Option<usize> {
        match *self {
            Waveform::GaussianPulse { center, width_sq } => {
                // exp(−x²/w) < 1e-16  ⇔  x > sqrt(w · 16 ln 10)
                Some((center + (width_sq * 16.0 * 10f64.ln()).sqrt()).ceil().max(0.0) as usize)
            }
            Waveform::Sinusoid { .. } => None,
        }
    }
}

/// Additive excitation of one E-node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub node: usize,
    pub amplitude: f64,
    pub waveform: Waveform,
}

impl SourceSpec {
    pub fn new(node: usize, amplitude: f64, waveform: Waveform) -> Self {
        SourceSpec { node, amplitude, waveform }
    }

    /// Value added to Ez at the given step.
    pub fn value(&self, step: usize, dt: f64) -> f64 {
        self.amplitude * self.waveform.at(step, dt)
    }

    pub fn check(&self, n_e: usize) -> Result<(), SourceError> {
        if self.node >= n_e {
            return Err(SourceError::NodeOutOfRange { node: self.node, count: n_e });
        }
        if !self.amplitude.is_finite() {
            return Err(SourceError::InvalidParameter("amplitude must be finite".into()));
        }
        match self.waveform {
            Waveform::GaussianPulse { width_sq, .. } if !(width_sq > 0.0) => {
                Err(SourceError::InvalidParameter("pulse width must be positive".into()))
            }
            Waveform::Sinusoid { frequency } if !(frequency > 0.0 && frequency.is_finite()) => {
                Err(SourceError::InvalidParameter("frequency must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Largest amplitude among the sources.
pub fn peak_amplitude(sources: &[SourceSpec]) -> f64 {
    sources.iter().map(|s| s.amplitude.abs()).fold(0.0, f64::max)
}

/// Index of the E-node closest to `p`; ties go to the lower index.
pub fn nearest_e_node(cloud: &ParticleCloud, p: &Point) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (i, q) in cloud.e.positions.iter().enumerate() {
        let d = (0..cloud.dim).map(|a| (p[a] - q[a]).powi(2)).sum::<f64>();
        if d < best.0 {
            best = (d, i);
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pulse_peaks_at_centre() {
        let w = Waveform::default_pulse();
        assert_eq!(w.at(20, 1.0), 1.0);
        assert!((w.at(26, 1.0) - (-0.5f64).exp()).abs() < 1e-15);
        let off = w.shutoff_step().unwrap();
        assert!(w.at(off, 1.0) < 1e-16);
    }

    #[test]
    fn sinusoid_quarter_period() {
        let w = Waveform::Sinusoid { frequency: 1.0 };
        assert!((w.at(1, 0.25) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_node() {
        let s = SourceSpec::new(5, 1.0, Waveform::default_pulse());
        assert!(s.check(5).is_err());
        assert!(s.check(6).is_ok());
    }
}
