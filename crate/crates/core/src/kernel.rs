//! Smoothing kernels and their analytic derivatives.
//!
//! A kernel is a radial function `W(r, h) = σ_d h^-d f(r/h)` with compact
//! support `κh`. Derivatives are assembled from the radial profile by the
//! chain rule, so the gradient is `f'(q)/h · x/r` scaled by the
//! normalisation and the Hessian adds the curvature of the radial profile.

use std::f64::consts::PI;

use thiserror::Error;

/// erf(3), used by the truncated Gaussian normalisation.
const ERF_3: f64 = 0.999_977_909_503_001_4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("smoothing length must be positive and finite, got {0}")]
    InvalidSmoothingLength(f64),
    #[error("kernel dimension must be 1, 2 or 3, got {0}")]
    InvalidDimension(usize),
    #[error("axis {axis} is out of range for a {dim}-D kernel")]
    InvalidAxis { axis: usize, dim: usize },
    #[error("displacement has a non-finite component")]
    NonFiniteDisplacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// Piecewise cubic B-spline, support 2h.
    CubicSpline,
    /// Gaussian truncated at 3h and renormalised over the truncated ball.
    Gaussian,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::CubicSpline => "cubic-spline",
            KernelKind::Gaussian => "gaussian",
        }
    }
}

/// Radial profile samples at `q = r/h`, before normalisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    pub f: f64,
    /// df/dq.
    pub df: f64,
    /// (df/dq)/q, finite at q = 0.
    pub df_over_q: f64,
    /// d²f/dq².
    pub d2f: f64,
}

/// A kernel family bound to a spatial dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    kind: KernelKind,
    dim: usize,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, dim: usize) -> Result<Self, KernelError> {
        if !(1..=3).contains(&dim) {
            return Err(KernelError::InvalidDimension(dim));
        }
        Ok(KernelSpec { kind, dim })
    }

    pub fn cubic_spline(dim: usize) -> Result<Self, KernelError> {
        Self::new(KernelKind::CubicSpline, dim)
    }

    pub fn gaussian(dim: usize) -> Result<Self, KernelError> {
        Self::new(KernelKind::Gaussian, dim)
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Support radius in units of h.
    pub fn support_factor(&self) -> f64 {
        match self.kind {
            KernelKind::CubicSpline => 2.0,
            KernelKind::Gaussian => 3.0,
        }
    }

    pub fn support_radius(&self, h: f64) -> f64 {
        self.support_factor() * h
    }

    /// Dimensionless normalisation σ_d, so that `W = σ_d h^-d f(q)`.
    pub fn normalisation(&self) -> f64 {
        match (self.kind, self.dim) {
            (KernelKind::CubicSpline, 1) => 2.0 / 3.0,
            (KernelKind::CubicSpline, 2) => 10.0 / (7.0 * PI),
            (KernelKind::CubicSpline, _) => 1.0 / PI,
            (KernelKind::Gaussian, 1) => 1.0 / (PI.sqrt() * ERF_3),
            (KernelKind::Gaussian, 2) => 1.0 / (PI * (1.0 - (-9.0f64).exp())),
            (KernelKind::Gaussian, _) => 1.0 / (PI.powf(1.5) * ERF_3 - 6.0 * PI * (-9.0f64).exp()),
        }
    }

    /// Unnormalised radial profile at `q >= 0`.
    pub fn profile(&self, q: f64) -> Profile {
        match self.kind {
            KernelKind::CubicSpline => {
                if q < 1.0 {
                    Profile {
                        f: 1.0 - 1.5 * q * q + 0.75 * q * q * q,
                        df: -3.0 * q + 2.25 * q * q,
                        df_over_q: -3.0 + 2.25 * q,
                        d2f: -3.0 + 4.5 * q,
                    }
                } else if q < 2.0 {
                    let s = 2.0 - q;
                    Profile { f: 0.25 * s * s * s, df: -0.75 * s * s, df_over_q: -0.75 * s * s / q, d2f: 1.5 * s }
                } else {
                    Profile { f: 0.0, df: 0.0, df_over_q: 0.0, d2f: 0.0 }
                }
            }
            KernelKind::Gaussian => {
                if q < 3.0 {
                    let e = (-q * q).exp();
                    Profile { f: e, df: -2.0 * q * e, df_over_q: -2.0 * e, d2f: (4.0 * q * q - 2.0) * e }
                } else {
                    Profile { f: 0.0, df: 0.0, df_over_q: 0.0, d2f: 0.0 }
                }
            }
        }
    }

    fn check(&self, dx: &[f64; 3], h: f64) -> Result<(f64, f64), KernelError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(KernelError::InvalidSmoothingLength(h));
        }
        let mut r2 = 0.0;
        for &c in &dx[..self.dim] {
            if !c.is_finite() {
                return Err(KernelError::NonFiniteDisplacement);
            }
            r2 += c * c;
        }
        Ok((r2.sqrt(), self.normalisation() / h.powi(self.dim as i32)))
    }

    /// Kernel value for displacement `dx = x_i - x_j`. Components beyond
    /// the kernel dimension are ignored.
    pub fn value(&self, dx: [f64; 3], h: f64) -> Result<f64, KernelError> {
        let (r, norm) = self.check(&dx, h)?;
        Ok(norm * self.profile(r / h).f)
    }

    /// Gradient with respect to `x_i`.
    pub fn gradient(&self, dx: [f64; 3], h: f64) -> Result<[f64; 3], KernelError> {
        let (r, norm) = self.check(&dx, h)?;
        let p = self.profile(r / h);
        // W'(r)/r = norm * f'(q)/(q h^2)
        let scale = norm * p.df_over_q / (h * h);
        let mut g = [0.0; 3];
        for a in 0..self.dim {
            g[a] = scale * dx[a];
        }
        Ok(g)
    }

    /// Full Hessian with respect to `x_i`.
    pub fn hessian(&self, dx: [f64; 3], h: f64) -> Result<[[f64; 3]; 3], KernelError> {
        let (r, norm) = self.check(&dx, h)?;
        let p = self.profile(r / h);
        let d2 = norm * p.d2f / (h * h);
        let a = norm * p.df_over_q / (h * h);
        let mut m = [[0.0; 3]; 3];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let delta = if i == j { 1.0 } else { 0.0 };
                m[i][j] = if r > 0.0 {
                    let ninj = dx[i] * dx[j] / (r * r);
                    d2 * ninj + a * (delta - ninj)
                } else {
                    d2 * delta
                };
            }
        }
        Ok(m)
    }

    /// Second derivative along a single axis.
    pub fn second_derivative(&self, dx: [f64; 3], h: f64, axis: usize) -> Result<f64, KernelError> {
        if axis >= self.dim {
            return Err(KernelError::InvalidAxis { axis, dim: self.dim });
        }
        Ok(self.hessian(dx, h)?[axis][axis])
    }

    /// Radial derivatives `(W, dW/dr, d²W/dr²)` at distance `r`.
    pub fn radial(&self, r: f64, h: f64) -> Result<(f64, f64, f64), KernelError> {
        let (_, norm) = self.check(&[r, 0.0, 0.0], h)?;
        let p = self.profile(r.abs() / h);
        Ok((norm * p.f, norm * p.df / h, norm * p.d2f / (h * h)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_2d(spec: &KernelSpec, h: f64, n: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
        let extent = spec.support_radius(h);
        let step = 2.0 * extent / n as f64;
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = -extent + (i as f64 + 0.5) * step;
                let y = -extent + (j as f64 + 0.5) * step;
                sum += f(x, y) * step * step;
            }
        }
        sum
    }

    #[test]
    fn spline_peak_2d() {
        let k = KernelSpec::cubic_spline(2).unwrap();
        let w = k.value([0.0; 3], 1.0).unwrap();
        assert!((w - 10.0 / (7.0 * PI)).abs() < 1e-15);
        assert!((w - 0.454_728_408_833_986_9).abs() < 1e-6);
    }

    #[test]
    fn zero_outside_support() {
        for spec in [KernelSpec::cubic_spline(2).unwrap(), KernelSpec::gaussian(2).unwrap()] {
            let r = spec.support_radius(0.3);
            assert_eq!(spec.value([r, 0.0, 0.0], 0.3).unwrap(), 0.0);
            assert_eq!(spec.gradient([0.0, r * 1.01, 0.0], 0.3).unwrap(), [0.0; 3]);
        }
    }

    #[test]
    fn unit_integral_by_midpoint_rule() {
        for spec in [KernelSpec::cubic_spline(2).unwrap(), KernelSpec::gaussian(2).unwrap()] {
            let s = quad_2d(&spec, 0.7, 600, |x, y| spec.value([x, y, 0.0], 0.7).unwrap());
            assert!((s - 1.0).abs() < 1e-5, "{spec:?}: {s}");
        }
    }

    #[test]
    fn unit_integral_1d_and_3d_radial() {
        // 1D: ∫ W dx; 3D: 4π ∫ r² W dr, both by composite Simpson on the radius.
        for kind in [KernelKind::CubicSpline, KernelKind::Gaussian] {
            for dim in [1usize, 3] {
                let spec = KernelSpec::new(kind, dim).unwrap();
                let h = 1.3;
                let rmax = spec.support_radius(h);
                let n = 4000;
                let step = rmax / n as f64;
                let mut s = 0.0;
                for i in 0..=n {
                    let r = i as f64 * step;
                    let w = spec.radial(r, h).unwrap().0;
                    let f = if dim == 1 { 2.0 * w } else { 4.0 * PI * r * r * w };
                    let c = if i == 0 || i == n {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    s += c * f;
                }
                s *= step / 3.0;
                assert!((s - 1.0).abs() < 1e-6, "{kind:?} {dim}D: {s}");
            }
        }
    }

    #[test]
    fn gradient_at_origin_vanishes() {
        let k = KernelSpec::cubic_spline(2).unwrap();
        assert_eq!(k.gradient([0.0; 3], 0.5).unwrap(), [0.0; 3]);
    }

    #[test]
    fn gradient_matches_central_difference() {
        for spec in [KernelSpec::cubic_spline(2).unwrap(), KernelSpec::gaussian(2).unwrap()] {
            let h = 0.8;
            for &(x, y) in &[(0.3, 0.1), (-0.9, 0.4), (1.1, -0.6), (0.05, -0.02)] {
                let g = spec.gradient([x, y, 0.0], h).unwrap();
                let d = 1e-6;
                let fx =
                    (spec.value([x + d, y, 0.0], h).unwrap() - spec.value([x - d, y, 0.0], h).unwrap()) / (2.0 * d);
                let fy =
                    (spec.value([x, y + d, 0.0], h).unwrap() - spec.value([x, y - d, 0.0], h).unwrap()) / (2.0 * d);
                assert!((g[0] - fx).abs() < 1e-7, "{g:?} vs {fx}");
                assert!((g[1] - fy).abs() < 1e-7, "{g:?} vs {fy}");
            }
        }
    }

    #[test]
    fn invalid_inputs() {
        let k = KernelSpec::cubic_spline(2).unwrap();
        assert!(matches!(k.value([0.0; 3], 0.0), Err(KernelError::InvalidSmoothingLength(_))));
        assert!(matches!(k.value([f64::NAN, 0.0, 0.0], 1.0), Err(KernelError::NonFiniteDisplacement)));
        assert!(matches!(k.second_derivative([0.1, 0.0, 0.0], 1.0, 2), Err(KernelError::InvalidAxis { .. })));
        assert!(matches!(KernelSpec::cubic_spline(4), Err(KernelError::InvalidDimension(4))));
    }
}
