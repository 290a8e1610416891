use super::{Derivatives, OperatorError};
use crate::cloud::ParticleCloud;

/// Full-vector explicit operators.
///
/// Stores the unit-free derivative matrices and the material scalings. The
/// six curl terms are applied through [`Explicit3d::curl_e`] and
/// [`Explicit3d::curl_h`]. A planar cloud has no z-derivative, so it
/// reproduces the TMz and TEz systems.
#[derive(Debug, Clone, PartialEq)]
pub struct Explicit3d {
    pub derivatives: Derivatives,
    pub inv_eps: Vec<f64>,
    pub inv_mu: Vec<f64>,
    n_e: usize,
    n_h: usize,
}

pub fn assemble_explicit_3d(cloud: &ParticleCloud, d: &Derivatives) -> Result<Explicit3d, OperatorError> {
    if d.dim != cloud.dim {
        return Err(OperatorError::Unsupported("derivatives were built for a different cloud".into()));
    }
    Ok(Explicit3d {
        derivatives: d.clone(),
        inv_eps: cloud.e.eps.iter().map(|e| 1.0 / e).collect(),
        inv_mu: cloud.h.mu.iter().map(|m| 1.0 / m).collect(),
        n_e: cloud.e.len(),
        n_h: cloud.h.len(),
    })
}

impl Explicit3d {
    fn axis_available(&self, a: usize) -> bool {
        a < self.derivatives.dim
    }

    /// `∂_a f_c` at H-nodes; zero for axes the cloud does not span.
    fn h_term(&self, axis: usize, f: &[f64], out: &mut [f64], sign: f64) -> Result<(), OperatorError> {
        if self.axis_available(axis) {
            self.derivatives.h_from_e(axis).matvec_add(sign, f, out)?;
        }
        Ok(())
    }

    fn e_term(&self, axis: usize, comp: usize, f: &[f64], out: &mut [f64], sign: f64) -> Result<(), OperatorError> {
        if self.axis_available(axis) {
            self.derivatives.e_from_h(axis, comp).matvec_add(sign, f, out)?;
        }
        Ok(())
    }

    /// Unit-free curl of an E-field, evaluated at H-nodes.
    pub fn curl_e(&self, e: &[Vec<f64>; 3]) -> Result<[Vec<f64>; 3], OperatorError> {
        let mut out = [vec![0.0; self.n_h], vec![0.0; self.n_h], vec![0.0; self.n_h]];
        for (c, o) in out.iter_mut().enumerate() {
            let (a, b) = ((c + 1) % 3, (c + 2) % 3);
            // (curl E)_c = ∂_a E_b − ∂_b E_a
            self.h_term(a, &e[b], o, 1.0)?;
            self.h_term(b, &e[a], o, -1.0)?;
        }
        Ok(out)
    }

    /// Unit-free curl of an H-field, evaluated at E-nodes.
    pub fn curl_h(&self, h: &[Vec<f64>; 3]) -> Result<[Vec<f64>; 3], OperatorError> {
        let mut out = [vec![0.0; self.n_e], vec![0.0; self.n_e], vec![0.0; self.n_e]];
        for (c, o) in out.iter_mut().enumerate() {
            let (a, b) = ((c + 1) % 3, (c + 2) % 3);
            self.e_term(a, b, &h[b], o, 1.0)?;
            self.e_term(b, a, &h[a], o, -1.0)?;
        }
        Ok(out)
    }

    /// One leapfrog step: `H −= Δt/μ curl E`, then `E += Δt/ε curl H`.
    pub fn step(&self, e: &mut [Vec<f64>; 3], h: &mut [Vec<f64>; 3], dt: f64) -> Result<(), OperatorError> {
        let ce = self.curl_e(e)?;
        for c in 0..3 {
            for (j, v) in h[c].iter_mut().enumerate() {
                *v -= dt * self.inv_mu[j] * ce[c][j];
            }
        }
        let ch = self.curl_h(h)?;
        for c in 0..3 {
            for (i, v) in e[c].iter_mut().enumerate() {
                *v += dt * self.inv_eps[i] * ch[c][i];
            }
        }
        Ok(())
    }
}
