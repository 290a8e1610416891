use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CsrMatrix, SparseError};

/// Settings for [`dominant_eigenvalue`].
#[derive(Debug, Clone, PartialEq)]
pub struct PowerIteration {
    /// Relative tolerance on the eigenvalue estimate.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Optional diagonal inner-product weights. When the operator is
    /// self-adjoint in this inner product the Rayleigh quotient converges
    /// at twice the rate.
    pub weights: Option<Vec<f64>>,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration { tol: 1e-10, max_iter: 200_000, seed: 0x5eed, weights: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenEstimate {
    pub value: f64,
    pub iterations: usize,
    /// Weighted residual `|Ax - λx| / |λx|` at the returned vector.
    pub residual: f64,
}

fn wdot(w: Option<&[f64]>, a: &[f64], b: &[f64]) -> f64 {
    match w {
        Some(w) => a.iter().zip(b).zip(w).map(|((x, y), z)| x * y * z).sum(),
        None => a.iter().zip(b).map(|(x, y)| x * y).sum(),
    }
}

/// Dominant (largest-magnitude, real) eigenvalue by seeded power iteration
/// with a Rayleigh-quotient estimate.
///
/// Converged when successive estimates agree to `tol` and the residual is
/// below `sqrt(tol)`.
pub fn dominant_eigenvalue(a: &CsrMatrix, cfg: &PowerIteration) -> Result<EigenEstimate, SparseError> {
    let (n, m) = a.shape();
    if n != m {
        return Err(SparseError::NotSquare(n, m));
    }
    if let Some(w) = &cfg.weights {
        if w.len() != n {
            return Err(SparseError::DimensionMismatch { expected: (n, 1), found: (w.len(), 1) });
        }
    }
    let w = cfg.weights.as_deref();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    let nx = wdot(w, &x, &x).sqrt();
    x.iter_mut().for_each(|v| *v /= nx);
    let mut y = vec![0.0; n];
    let mut prev = f64::NAN;
    let mut lambda = 0.0;
    for it in 1..=cfg.max_iter {
        a.matvec_into(&x, &mut y)?;
        let ny = wdot(w, &y, &y).sqrt();
        if ny == 0.0 {
            // A^k x = 0 for a random start: the operator is nilpotent.
            return Ok(EigenEstimate { value: 0.0, iterations: it, residual: 0.0 });
        }
        lambda = wdot(w, &x, &y);
        let resid: f64 = {
            let r: Vec<f64> = y.iter().zip(&x).map(|(yi, xi)| yi - lambda * xi).collect();
            wdot(w, &r, &r).sqrt() / lambda.abs().max(f64::MIN_POSITIVE)
        };
        let change = ((lambda - prev) / lambda).abs();
        if change <= cfg.tol && resid <= cfg.tol.sqrt() {
            return Ok(EigenEstimate { value: lambda, iterations: it, residual: resid });
        }
        prev = lambda;
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
    }
    Err(SparseError::EigenNoConvergence { iterations: cfg.max_iter, estimate: lambda })
}

/// Asymptotic growth factor per application, `lim |A^k x|^(1/k)`.
///
/// Unlike [`dominant_eigenvalue`] this also works when the dominant
/// eigenvalues form a complex pair. `apply` maps `x` to `A x`.
pub fn growth_rate(
    dim: usize,
    iterations: usize,
    seed: u64,
    mut apply: impl FnMut(&[f64]) -> Result<Vec<f64>, SparseError>,
) -> Result<f64, SparseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= nx);
    let burn_in = iterations / 2;
    let mut log_sum = 0.0;
    let mut counted = 0usize;
    for it in 0..iterations {
        let y = apply(&x)?;
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if ny == 0.0 {
            return Ok(0.0);
        }
        if it >= burn_in {
            log_sum += ny.ln();
            counted += 1;
        }
        x = y.into_iter().map(|v| v / ny).collect();
    }
    Ok((log_sum / counted.max(1) as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_dominant_value() {
        let a = CsrMatrix::diagonal(&[1.0, 3.0, -2.0]);
        let e = dominant_eigenvalue(&a, &PowerIteration { tol: 1e-12, ..Default::default() }).unwrap();
        assert!((e.value - 3.0).abs() < 1e-10);
    }

    #[test]
    fn rotation_growth_is_one() {
        // 90 degree rotation: eigenvalues ±i, power iteration on the value
        // cannot converge but the growth rate is exactly 1.
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 1, -1.0), (1, 0, 1.0)]).unwrap();
        let cfg = PowerIteration { max_iter: 200, ..Default::default() };
        assert!(matches!(dominant_eigenvalue(&a, &cfg), Err(SparseError::EigenNoConvergence { .. })));
        let g = growth_rate(2, 50, 1, |x| a.matvec(x)).unwrap();
        assert!((g - 1.0).abs() < 1e-12);
    }
}
