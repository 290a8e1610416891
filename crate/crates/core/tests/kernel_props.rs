use proptest::prelude::*;
use spem::kernel::{KernelKind, KernelSpec};

fn specs() -> Vec<KernelSpec> {
    let mut v = Vec::new();
    for kind in [KernelKind::CubicSpline, KernelKind::Gaussian] {
        for d in 1..=3 {
            v.push(KernelSpec::new(kind, d).unwrap());
        }
    }
    v
}

#[test]
fn spline_peak_matches_closed_form() {
    let k = KernelSpec::cubic_spline(2).unwrap();
    let w = k.value([0.0; 3], 1.0).unwrap();
    assert!((w - 10.0 / (7.0 * std::f64::consts::PI)).abs() < 1e-15);
    assert_eq!(k.value([2.5, 0.0, 0.0], 1.0).unwrap(), 0.0);
}

#[test]
fn midpoint_rule_integrates_to_one() {
    // Property (c) on a 400^d midpoint grid, for three smoothing lengths.
    for spec in specs().into_iter().filter(|s| s.dim() <= 2) {
        for h in [0.5, 1.0, 2.0] {
            let r = spec.support_radius(h);
            let n = 400;
            let step = 2.0 * r / n as f64;
            let c = |i: usize| -r + (i as f64 + 0.5) * step;
            let sum: f64 = if spec.dim() == 1 {
                (0..n).map(|i| spec.value([c(i), 0.0, 0.0], h).unwrap() * step).sum()
            } else {
                (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| spec.value([c(i), c(j), 0.0], h).unwrap() * step * step)
                    .sum()
            };
            assert!((sum - 1.0).abs() < 1e-6, "{:?} d={} h={h}: {sum}", spec.kind(), spec.dim());
        }
    }
}

#[test]
fn radial_integral_in_three_dimensions() {
    for kind in [KernelKind::CubicSpline, KernelKind::Gaussian] {
        let spec = KernelSpec::new(kind, 3).unwrap();
        let r = spec.support_radius(1.0);
        let n = 200_000;
        let step = r / n as f64;
        let sum: f64 = (0..n)
            .map(|i| {
                let q = (i as f64 + 0.5) * step;
                4.0 * std::f64::consts::PI * q * q * spec.value([q, 0.0, 0.0], 1.0).unwrap() * step
            })
            .sum();
        assert!((sum - 1.0).abs() < 1e-8, "{kind:?}: {sum}");
    }
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    (-2.2..2.2f64, -2.2..2.2f64, -2.2..2.2f64).prop_map(|(x, y, z)| [x, y, z])
}

fn restrict(spec: &KernelSpec, p: [f64; 3]) -> [f64; 3] {
    let mut q = [0.0; 3];
    q[..spec.dim()].copy_from_slice(&p[..spec.dim()]);
    q
}

fn near_knot(spec: &KernelSpec, p: &[f64; 3], h: f64) -> bool {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() / h;
    let knots: &[f64] = match spec.kind() {
        KernelKind::CubicSpline => &[0.0, 1.0, 2.0],
        KernelKind::Gaussian => &[0.0, 3.0],
    };
    knots.iter().any(|k| (r - k).abs() < 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gradient_matches_finite_difference(p in point(), h in 0.6..1.5f64) {
        for spec in specs() {
            let p = restrict(&spec, p);
            prop_assume!(!near_knot(&spec, &p, h));
            let g = spec.gradient(p, h).unwrap();
            let scale = spec.normalisation() / h.powi(spec.dim() as i32 + 1);
            for a in 0..spec.dim() {
                let e = 1e-6;
                let (mut lo, mut hi) = (p, p);
                lo[a] -= e;
                hi[a] += e;
                let fd = (spec.value(hi, h).unwrap() - spec.value(lo, h).unwrap()) / (2.0 * e);
                prop_assert!((g[a] - fd).abs() <= 1e-5 * scale, "axis {a}: {} vs {fd}", g[a]);
            }
        }
    }

    #[test]
    fn second_derivative_matches_finite_difference(p in point(), h in 0.6..1.5f64) {
        for spec in specs() {
            let p = restrict(&spec, p);
            prop_assume!(!near_knot(&spec, &p, h));
            let scale = spec.normalisation() / h.powi(spec.dim() as i32 + 2);
            for a in 0..spec.dim() {
                let e = 1e-4;
                let (mut lo, mut hi) = (p, p);
                lo[a] -= e;
                hi[a] += e;
                let w0 = spec.value(p, h).unwrap();
                let fd = (spec.value(hi, h).unwrap() - 2.0 * w0 + spec.value(lo, h).unwrap()) / (e * e);
                let d2 = spec.second_derivative(p, h, a).unwrap();
                prop_assert!((d2 - fd).abs() <= 1e-5 * scale.max(1.0) * 10.0, "axis {a}: {d2} vs {fd}");
            }
        }
    }

    #[test]
    fn laplacian_matches_radial_form(p in point(), h in 0.6..1.5f64) {
        for spec in specs().into_iter().filter(|s| s.dim() >= 2) {
            let p = restrict(&spec, p);
            prop_assume!(!near_knot(&spec, &p, h));
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            let (_, dw, d2w) = spec.radial(r, h).unwrap();
            let radial = d2w + (spec.dim() as f64 - 1.0) * dw / r;
            let lap: f64 = (0..spec.dim()).map(|a| spec.second_derivative(p, h, a).unwrap()).sum();
            prop_assert!((lap - radial).abs() <= 1e-10 * (1.0 + radial.abs()), "{lap} vs {radial}");
        }
    }

    #[test]
    fn symmetry_and_scaling(p in point(), h in 0.3..3.0f64) {
        for spec in specs() {
            let p = restrict(&spec, p);
            let m = [-p[0], -p[1], -p[2]];
            prop_assert_eq!(spec.value(p, h).unwrap(), spec.value(m, h).unwrap());
            let (g, gm) = (spec.gradient(p, h).unwrap(), spec.gradient(m, h).unwrap());
            for a in 0..3 {
                prop_assert_eq!(g[a], -gm[a]);
                prop_assert_eq!(spec.hessian(p, h).unwrap()[a][a], spec.hessian(m, h).unwrap()[a][a]);
            }
            let unit = [p[0] / h, p[1] / h, p[2] / h];
            let scaled = spec.value(unit, 1.0).unwrap() / h.powi(spec.dim() as i32);
            prop_assert!((spec.value(p, h).unwrap() - scaled).abs() <= 1e-12 * scaled.abs().max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn radially_non_increasing(r1 in 0.0..3.2f64, dr in 0.0..1.0f64) {
        for spec in specs() {
            let a = spec.value([r1, 0.0, 0.0], 1.0).unwrap();
            let b = spec.value([r1 + dr, 0.0, 0.0], 1.0).unwrap();
            prop_assert!(b <= a && b >= 0.0);
        }
    }
}
