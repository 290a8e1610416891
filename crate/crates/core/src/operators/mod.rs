//! Assembled spatial operators.
//!
//! Everything here is built once per cloud (and per time step for the
//! implicit matrices) and reused by the steppers. The first-derivative
//! operators come in two directions: H←E, evaluated at H-nodes from
//! E-samples, and E←H. H←E operators always use the corrected gradient
//! weights. E←H operators depend on [`Pairing`].

mod explicit;
mod implicit;
mod stability;
mod three_d;

pub use explicit::{assemble_explicit_tmz, curl_curl, ExplicitTmz};
pub use implicit::{assemble_implicit_tmz, kernel_second_derivative, ImplicitOptions, ImplicitTmz};
pub use stability::{stability_bound, StabilityReport};
pub use three_d::{assemble_explicit_3d, Explicit3d};

use thiserror::Error;

use crate::cloud::{CloudError, ParticleCloud, Role};
use crate::correction::{corrected_gradient, CorrectionError, Stencil};
use crate::kernel::{KernelError, KernelSpec};
use crate::sparse::{CsrMatrix, SparseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Cloud(#[from] CloudError),
    #[error("{role}-side gradient: {source}")]
    Correction { role: Role, source: CorrectionError },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error("time step must be positive and finite, got {0}")]
    InvalidTimeStep(f64),
    #[error("curl-curl operator has no positive eigenvalue (estimate {0:.3e})")]
    NonPositiveSpectrum(f64),
    #[error("{0}")]
    Unsupported(String),
}

/// How the E←H derivative operators are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pairing {
    /// Negative weighted adjoint of the corrected H←E operators:
    /// `D^{E←H} = −M_E⁻¹ (D^{H←E})ᵀ W_c`, with `M_E` the E-node volumes and
    /// `W_c` the H-node quadrature weights of the field component acted on.
    /// The discrete curl-curl operator is then self-adjoint and positive
    /// semidefinite in the energy inner product.
    #[default]
    Adjoint,
    /// Independently corrected gradient weights at E-nodes.
    Corrected,
}

/// Second-derivative operator used in the implicit matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SecondDerivative {
    /// Product of the two first-derivative operators, E→H→E or H→E→H.
    #[default]
    Composite,
    /// Kernel second derivatives in difference form on same-role neighbours.
    Kernel,
    /// As `Kernel`, rescaled per row so that `(x − x_i)²/2` maps to 1.
    KernelNormalized,
}

/// Right-hand side of the implicit E-update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignMode {
    /// The same matrix on both sides: `A E⁺ = A E + …`.
    #[default]
    LiteralPaper,
    /// Crank–Nicolson-like sign flip: `A E⁺ = (εI + τ²/μ D_xx) E + …`.
    StandardPlus,
}

/// Mass term in the implicit H-update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HMass {
    /// `(μI − τ²/ε D_yy) H⁺ = … − Δt D_y E`.
    #[default]
    Maxwell,
    /// `(εI − τ²/μ D_yy) H⁺ = … − (Δt/μ) D_y E`.
    LiteralPaper,
}

impl Pairing {
    pub fn name(self) -> &'static str {
        match self {
            Pairing::Adjoint => "adjoint",
            Pairing::Corrected => "corrected",
        }
    }
}

impl SecondDerivative {
    pub fn name(self) -> &'static str {
        match self {
            SecondDerivative::Composite => "composite",
            SecondDerivative::Kernel => "kernel",
            SecondDerivative::KernelNormalized => "kernel-normalized",
        }
    }
}

impl SignMode {
    pub fn name(self) -> &'static str {
        match self {
            SignMode::LiteralPaper => "literal-paper",
            SignMode::StandardPlus => "standard-plus",
        }
    }
}

impl HMass {
    pub fn name(self) -> &'static str {
        match self {
            HMass::Maxwell => "maxwell",
            HMass::LiteralPaper => "literal-paper",
        }
    }
}

/// Unit-free first-derivative operators of a cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub dim: usize,
    pub pairing: Pairing,
    /// `h_from_e[a]`: ∂/∂x_a evaluated at H-nodes.
    pub h_from_e: Vec<CsrMatrix>,
    /// `e_from_h[a][c]`: ∂/∂x_a at E-nodes, applied to H-component `c`.
    /// Under [`Pairing::Corrected`] the operator does not depend on `c`.
    pub e_from_h: Vec<Vec<CsrMatrix>>,
}

impl Derivatives {
    /// Assembles derivative operators for every axis of the cloud.
    pub fn assemble(cloud: &ParticleCloud, kernel: &KernelSpec, pairing: Pairing) -> Result<Self, OperatorError> {
        if kernel.dim() != cloud.dim {
            return Err(OperatorError::Unsupported(format!(
                "kernel dimension {} does not match cloud dimension {}",
                kernel.dim(),
                cloud.dim
            )));
        }
        cloud.validate(kernel)?;
        let dim = cloud.dim;
        let he_table = cloud.neighbors(Role::H, Role::E, kernel);
        let he = corrected_gradient(
            &Stencil {
                fixed: &cloud.h.positions,
                smoothing: &cloud.h.smoothing,
                others: &cloud.e.positions,
                volumes: &cloud.e.volumes,
            },
            &he_table,
            kernel,
        )
        .map_err(|source| OperatorError::Correction { role: Role::H, source })?;
        let h_from_e = he.axes;
        let e_from_h = match pairing {
            Pairing::Corrected => {
                let eh_table = cloud.neighbors(Role::E, Role::H, kernel);
                let eh = corrected_gradient(
                    &Stencil {
                        fixed: &cloud.e.positions,
                        smoothing: &cloud.e.smoothing,
                        others: &cloud.h.positions,
                        volumes: &cloud.h.volumes,
                    },
                    &eh_table,
                    kernel,
                )
                .map_err(|source| OperatorError::Correction { role: Role::E, source })?;
                eh.axes.into_iter().map(|m| vec![m; 3]).collect()
            }
            Pairing::Adjoint => {
                let inv_vol: Vec<f64> = cloud.e.volumes.iter().map(|v| -1.0 / v).collect();
                let weights: Vec<Vec<f64>> = (0..3).map(|c| cloud.h_component_weights(c)).collect();
                let mut out = Vec::with_capacity(dim);
                for d in &h_from_e {
                    let t = d.transpose().scale_rows(&inv_vol)?;
                    let per_comp = weights.iter().map(|w| t.scale_cols(w)).collect::<Result<Vec<_>, _>>()?;
                    out.push(per_comp);
                }
                out
            }
        };
        Ok(Derivatives { dim, pairing, h_from_e, e_from_h })
    }

    /// ∂/∂x_axis at H-nodes.
    pub fn h_from_e(&self, axis: usize) -> &CsrMatrix {
        &self.h_from_e[axis]
    }

    /// ∂/∂x_axis at E-nodes acting on H-component `component`.
    pub fn e_from_h(&self, axis: usize, component: usize) -> &CsrMatrix {
        &self.e_from_h[axis][component]
    }
}
