//! Exact field of the PEC circular cavity released from rest with the
//! profile `Ez(r, 0) = 1 − r²/r0²`.
//!
//! The solution is a Fourier–Bessel series over the axisymmetric TM modes,
//! `Ez(r, t) = Σ A_k J0(j_k r/r0) cos(j_k c t/r0)`, with `j_k` the zeros of
//! `J0` and `A_k` projected numerically.

use std::f64::consts::{FRAC_PI_4, PI};

use thiserror::Error;

use crate::constants::{EPS0, MU0};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CavityError {
    #[error("radius {r} lies outside the cavity of radius {r0}")]
    OutOfDomain { r: f64, r0: f64 },
    #[error("adaptive quadrature did not reach tolerance {tol:.1e} on [{a}, {b}]")]
    QuadratureNoConvergence { a: f64, b: f64, tol: f64 },
    #[error("invalid cavity parameter: {0}")]
    InvalidParameter(String),
}

/// Argument above which the Hankel asymptotic form is used.
const SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_LIMIT {
        power_series(x, 0)
    } else {
        asymptotic(x, 0)
    }
}

/// Bessel function of the first kind, order one.
pub fn bessel_j1(x: f64) -> f64 {
    let s = x.signum();
    let x = x.abs();
    let v = if x < SERIES_LIMIT { power_series(x, 1) } else { asymptotic(x, 1) };
    s * v
}

/// `Σ (−1)^k (x/2)^{2k+n} / (k! (k+n)!)` for `n ∈ {0, 1}`.
fn power_series(x: f64, order: u32) -> f64 {
    let q = -0.25 * x * x;
    let mut term = if order == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    for k in 1..200 {
        let k = k as f64;
        term *= q / (k * (k + order as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > 4.0 {
            break;
        }
    }
    sum
}

/// Hankel expansion `sqrt(2/(πx)) (P cos χ − Q sin χ)`,
/// `χ = x − (2n + 1)π/4`, summed until the terms stop decreasing.
fn asymptotic(x: f64, order: u32) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let chi = x - (2 * order + 1) as f64 * FRAC_PI_4;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let m = (2 * k - 1) as f64;
        term *= (mu - m * m) / (k as f64 * 8.0 * x);
        if term.abs() >= last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// First `count` positive zeros of `J0`, by bisection inside brackets
/// around the McMahon estimates.
pub fn bessel_j0_zeros(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|k| {
            let beta = (k as f64 - 0.25) * PI;
            let guess = beta + 1.0 / (8.0 * beta);
            let (mut lo, mut hi) = (guess - 0.5, guess + 0.5);
            let mut f_lo = bessel_j0(lo);
            while lo >= hi || f_lo * bessel_j0(hi) > 0.0 {
                lo -= 0.1;
                hi += 0.1;
                f_lo = bessel_j0(lo);
            }
            while hi - lo > 1e-13 * hi {
                let mid = 0.5 * (lo + hi);
                let f_mid = bessel_j0(mid);
                if f_mid == 0.0 {
                    return mid;
                }
                if f_lo * f_mid < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    f_lo = f_mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd-indexed Kronrod nodes (including the centre).
const GAUSS_WEIGHTS: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = KRONROD_WEIGHTS[7] * fc;
    let mut g = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let s = f(c - h * KRONROD_NODES[i]) + f(c + h * KRONROD_NODES[i]);
        k += KRONROD_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += GAUSS_WEIGHTS[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive 7/15-point Gauss–Kronrod quadrature: the interval
/// with the largest error estimate is bisected until the summed estimate
/// drops below `tol`, within a budget of 4000 intervals.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, CavityError> {
    let (v, e) = gauss_kronrod(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total_err: f64 = parts.iter().map(|p| p.3).sum();
        if total_err <= tol {
            return Ok(parts.iter().map(|p| p.2).sum());
        }
        if parts.len() >= 4000 {
            return Err(CavityError::QuadratureNoConvergence { a, b, tol });
        }
        let worst = (0..parts.len()).max_by(|&i, &j| parts[i].3.total_cmp(&parts[j].3)).unwrap_or(0);
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        for (x0, x1) in [(lo, mid), (mid, hi)] {
            let (v, e) = gauss_kronrod(&f, x0, x1);
            parts.push((x0, x1, v, e));
        }
    }
}

/// Mode count giving a reconstruction error below 1e-6 at `t = 0`.
pub const DEFAULT_MODES: usize = 300;

/// Truncated modal solution of the cavity problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselModeExpansion {
    pub r0: f64,
    pub zeros: Vec<f64>,
    pub coefficients: Vec<f64>,
    /// `∫₀^{r0} J0²(j_k r/r0) r dr`.
    pub norms: Vec<f64>,
}

impl BesselModeExpansion {
    /// Projects the initial parabola onto the first `modes` modes.
    pub fn project(r0: f64, modes: usize) -> Result<Self, CavityError> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(CavityError::InvalidParameter(format!("radius must be positive, got {r0}")));
        }
        if modes == 0 {
            return Err(CavityError::InvalidParameter("need at least one mode".into()));
        }
        let zeros = bessel_j0_zeros(modes);
        let tol = 1e-10 * r0 * r0;
        let mut coefficients = Vec::with_capacity(modes);
        let mut norms = Vec::with_capacity(modes);
        for &j in &zeros {
            let num = integrate(|r| (1.0 - (r / r0).powi(2)) * bessel_j0(j * r / r0) * r, 0.0, r0, tol)?;
            let den = integrate(|r| bessel_j0(j * r / r0).powi(2) * r, 0.0, r0, tol)?;
            coefficients.push(num / den);
            norms.push(den);
        }
        Ok(BesselModeExpansion { r0, zeros, coefficients, norms })
    }

    pub fn modes(&self) -> usize {
        self.zeros.len()
    }

    fn check(&self, r: f64) -> Result<(), CavityError> {
        if !(0.0..=self.r0 * (1.0 + 1e-12)).contains(&r) {
            return Err(CavityError::OutOfDomain { r, r0: self.r0 });
        }
        Ok(())
    }

    /// `Ez(r, t)` for wave speed `c`.
    pub fn exact_ez(&self, r: f64, t: f64, c: f64) -> Result<f64, CavityError> {
        self.check(r)?;
        Ok(self
            .zeros
            .iter()
            .zip(&self.coefficients)
            .map(|(&j, &a)| a * bessel_j0(j * r / self.r0) * (j * c * t / self.r0).cos())
            .sum())
    }

    /// Azimuthal magnetic field in vacuum, `Hφ = −Σ A_k J1(j_k r/r0) sin(ω_k t) / η₀`.
    pub fn exact_h_phi(&self, r: f64, t: f64, c: f64) -> Result<f64, CavityError> {
        self.check(r)?;
        let eta = (MU0 / EPS0).sqrt();
        Ok(-self
            .zeros
            .iter()
            .zip(&self.coefficients)
            .map(|(&j, &a)| a * bessel_j1(j * r / self.r0) * (j * c * t / self.r0).sin())
            .sum::<f64>()
            / eta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_matches_tabulated_values() {
        assert!((bessel_j0(0.0) - 1.0).abs() < 1e-15);
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((bessel_j0(10.0) + 0.245_935_764_451_348_3).abs() < 1e-12);
        assert!((bessel_j0(20.0) - 0.167_024_664_340_583).abs() < 1e-12);
        assert!((bessel_j1(1.0) - 0.440_050_585_744_933_5).abs() < 1e-14);
    }

    #[test]
    fn series_and_asymptotic_agree_at_switch() {
        for x in [11.5, 12.0, 12.5] {
            assert!((power_series(x, 0) - asymptotic(x, 0)).abs() < 1e-11, "x = {x}");
            assert!((power_series(x, 1) - asymptotic(x, 1)).abs() < 1e-11, "x = {x}");
        }
    }

    #[test]
    fn leading_zeros() {
        let z = bessel_j0_zeros(30);
        assert!((z[0] - 2.404_825_558).abs() < 1e-8);
        assert!((z[1] - 5.520_078_110).abs() < 1e-8);
        assert!(bessel_j0(z[0]).abs() < 1e-12);
        for k in 19..29 {
            assert!((z[k + 1] - z[k] - PI).abs() < 0.01);
        }
        assert!(z.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn quadrature_of_polynomial() {
        let v = integrate(|x| x * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 4.0).abs() < 1e-13);
    }

    fn max_error_at_rest(m: &BesselModeExpansion) -> f64 {
        (0..=400)
            .map(|i| {
                let r = m.r0 * i as f64 / 400.0;
                (m.exact_ez(r, 0.0, 1.0).unwrap() - (1.0 - (r / m.r0).powi(2))).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn reconstruction_at_rest() {
        let m = BesselModeExpansion::project(0.2, DEFAULT_MODES).unwrap();
        assert!((m.exact_ez(0.0, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-6);
        assert!(m.exact_ez(0.2, 0.0, 1.0).unwrap().abs() < 1e-4);
        assert!(max_error_at_rest(&m) < 1e-6);
        assert!(m.exact_ez(0.21, 0.0, 1.0).is_err());
    }

    #[test]
    fn forty_modes_truncation() {
        // Coefficients fall off like k^(-5/2), so forty modes leave an
        // alternating tail of a few 1e-5 on the axis.
        let m = BesselModeExpansion::project(0.2, 40).unwrap();
        let err = max_error_at_rest(&m);
        assert!(err > 1e-6 && err < 1e-4, "{err:e}");
        assert!(max_error_at_rest(&BesselModeExpansion::project(0.2, 80).unwrap()) < err);
    }
}
