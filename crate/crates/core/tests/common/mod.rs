#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use spem::cloud::{GridSpec, Material, ParticleCloud};
use spem::constants::{EPS0, MU0};
use spem::kernel::KernelSpec;
use spem::operators::ExplicitTmz;
use spem::operators::{Derivatives, Pairing};
use spem::sparse::CsrMatrix;
use spem::stepping::FieldsTmz;

pub const ALPHA: f64 = 0.7075;

pub fn dense(m: &CsrMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for (i, j, v) in m.iter() {
        d[(i, j)] += v;
    }
    d
}

pub fn kernel() -> KernelSpec {
    KernelSpec::cubic_spline(2).unwrap()
}

pub fn grid(nx: usize, ny: usize, spacing: f64) -> ParticleCloud {
    ParticleCloud::regular(GridSpec::new(nx, ny, spacing), ALPHA, Material::VACUUM).unwrap()
}

pub fn derivatives(cloud: &ParticleCloud, pairing: Pairing) -> Derivatives {
    Derivatives::assemble(cloud, &kernel(), pairing).unwrap()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// E-node indices at least `margin` cells away from the box edge.
pub fn interior_e(cloud: &ParticleCloud, margin: f64) -> Vec<usize> {
    let d = margin * cloud.spacing;
    (0..cloud.e.len())
        .filter(|&i| {
            let p = cloud.e.positions[i];
            (0..2).all(|a| p[a] - cloud.lower[a] > d && cloud.upper[a] - p[a] > d)
        })
        .collect()
}

pub fn interior_h(cloud: &ParticleCloud, margin: f64) -> Vec<usize> {
    let d = margin * cloud.spacing;
    (0..cloud.h.len())
        .filter(|&j| {
            let p = cloud.h.positions[j];
            (0..2).all(|a| p[a] - cloud.lower[a] > d && cloud.upper[a] - p[a] > d)
        })
        .collect()
}

/// One leapfrog ADI step built from dense derivative matrices:
/// `(ε − τ²K)(E⁺ − E) = Δt(∂x Hy − ∂y Hx)` for the literal form, and the
/// Crank–Nicolson-like splitting for the standard-plus form.
pub fn dense_laf_step(
    ops: &ExplicitTmz,
    dt: f64,
    plus: bool,
    f: &FieldsTmz,
) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
    let (dx_e, dy_e, dx_h, dy_h) = (dense(&ops.dx_e), dense(&ops.dy_e), dense(&ops.dx_h), dense(&ops.dy_h));
    let (ne, nh) = (dx_e.nrows(), dx_h.nrows());
    let tau2 = 0.25 * dt * dt;
    let ke = &dx_e * &dx_h / MU0;
    let kh = &dy_h * &dy_e / EPS0;
    let a = DMatrix::identity(ne, ne) * EPS0 - &ke * tau2;
    let c = DMatrix::identity(nh, nh) * MU0 - &kh * tau2;
    let (a_rhs, c_rhs) = if plus {
        (DMatrix::identity(ne, ne) * EPS0 + &ke * tau2, DMatrix::identity(nh, nh) * MU0 + &kh * tau2)
    } else {
        (a.clone(), c.clone())
    };
    let (ez, hx, hy) =
        (DVector::from_vec(f.ez.clone()), DVector::from_vec(f.hx.clone()), DVector::from_vec(f.hy.clone()));
    let rhs = &a_rhs * &ez + (&dx_e * &hy - &dy_e * &hx) * dt;
    let ez1 = a.lu().solve(&rhs).unwrap();
    let hx1 = c.lu().solve(&(&c_rhs * &hx - &dy_h * &ez1 * dt)).unwrap();
    let hy1 = &hy + &dx_h * &ez1 * (dt / MU0);
    (ez1, hx1, hy1)
}
