use std::sync::Arc;

use gwl4::ambient::*;
use gwl4::geometry::{ProductChart, VectorField, Direction, Mode};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_multiple_of_metric(t: &Tensor, g: &Tensor, c: f64, tol: f64) {
    for (a, b) in t.data.iter().zip(&g.data) {
        assert!((a - c * b).abs() < tol, "{a} vs {}", c * b);
    }
}

fn deformed(dim: usize, seed: u64, eps: f64) -> AmbientChart {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes = (0..6)
        .map(|_| {
            let a = rng.random_range(0..dim);
            let b = rng.random_range(0..dim);
            MetricMode {
                a,
                b,
                coeff: eps * rng.random_range(-1.0..1.0),
                freq: (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect(),
                phase: rng.random_range(0.0..6.3),
            }
        })
        .collect();
    AmbientChart::Deformed { dim, modes }
}

#[test]
fn flat_curvature_vanishes() {
    let p = curvature_pack(&AmbientChart::flat(5), &[0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
    for t in [&p.schouten, &p.weyl, &p.bach, &p.riemann, &p.nabla_schouten] {
        assert_eq!(t.max_abs(), 0.0);
    }
    let (g2, g4) = fg_coefficients(&p).unwrap();
    assert_eq!(g2.max_abs() + g4.max_abs(), 0.0);
}

#[test]
fn round_sphere_curvature() {
    let x = [0.3, -0.2, 0.5, 0.1, 0.25];
    let p = curvature_pack(&AmbientChart::round_sphere(5), &x).unwrap();
    let tol = 1e-12 * p.metric.max_abs().max(1.0);
    assert_multiple_of_metric(&p.schouten, &p.metric, 0.5, tol);
    assert!(p.weyl.max_abs() < 1e-12);
    assert!(p.bach.max_abs() < 1e-11);
    assert!(p.nabla_schouten.max_abs() < 1e-12);
    assert!((p.scalar - 20.0).abs() < 1e-11);
    // Sectional curvature +1.
    for a in 0..5 {
        for b in 0..5 {
            for c in 0..5 {
                for d in 0..5 {
                    let g = |i: usize, j: usize| p.metric.get(&[i, j]);
                    let expect = g(a, c) * g(b, d) - g(a, d) * g(b, c);
                    assert!((p.riemann.get(&[a, b, c, d]) - expect).abs() < tol);
                }
            }
        }
    }
    let (g2, g4) = fg_coefficients(&p).unwrap();
    assert_multiple_of_metric(&g2, &p.metric, -0.5, tol);
    assert_multiple_of_metric(&g4, &p.metric, 1.0 / 16.0, 1e-11);
}

#[test]
fn hyperbolic_curvature() {
    let x = [0.1, 0.2, -0.3, 0.05, 0.2];
    let p = curvature_pack(&AmbientChart::hyperbolic(5), &x).unwrap();
    let tol = 1e-11 * p.metric.max_abs();
    assert_multiple_of_metric(&p.schouten, &p.metric, -0.5, tol);
    assert!(p.bach.max_abs() < 1e-10 && p.weyl.max_abs() < 1e-10);
    let (g2, g4) = fg_coefficients(&p).unwrap();
    assert_multiple_of_metric(&g2, &p.metric, 0.5, tol);
    assert_multiple_of_metric(&g4, &p.metric, 1.0 / 16.0, tol);
}

#[test]
fn dimension_four_pole_is_reported() {
    let p = curvature_pack(&AmbientChart::round_sphere(4), &[0.1, 0.2, 0.3, 0.4]).unwrap();
    assert!(matches!(fg_coefficients(&p), Err(gwl4::GwError::Dimension(_))));
}

#[test]
fn adapted_frames() {
    let s4 = ProductChart::sphere(4, 1.0).unwrap();
    let x = [0.8, 0.3, 1.0, 2.0];
    let f = adapted_frame(&s4, &AmbientChart::flat(5), &x).unwrap();
    let p = gwl4::geometry::Immersion::evaluate(&s4, &x);
    let dot: f64 = f.normal[0].iter().zip(&p).map(|(a, b)| a * b).sum();
    assert!((dot.abs() - 1.0).abs() < 1e-12);

    let round = AmbientChart::round_sphere(5);
    let f = adapted_frame(&s4, &round, &x).unwrap();
    let g = round.metric(&p).unwrap();
    let ip = |u: &[f64], v: &[f64]| -> f64 {
        (0..5).map(|a| (0..5).map(|b| g[a][b] * u[a] * v[b]).sum::<f64>()).sum()
    };
    for t in &f.tangent {
        assert!(ip(t, &f.normal[0]).abs() < 1e-14);
    }

    let wobble = VectorField::single(vec![Mode { coeff: 0.04, freq: vec![(1, 2.0)], phase: 0.1 }], Direction::Radial(0));
    let c = ProductChart::product(&[(3, 1.0), (1, 0.5)]).unwrap().perturbed(wobble);
    let amb = deformed(6, 3, 0.05);
    let x = [0.4, 1.0, 2.0, 0.7];
    let f = adapted_frame(&c, &amb, &x).unwrap();
    let p = gwl4::geometry::Immersion::evaluate(&c, &x);
    let g = amb.metric(&p).unwrap();
    let all: Vec<&Vec<f64>> = f.tangent.iter().chain(&f.normal).collect();
    for (i, u) in all.iter().enumerate() {
        for (j, v) in all.iter().enumerate() {
            let ip: f64 = (0..6).map(|a| (0..6).map(|b| g[a][b] * u[a] * v[b]).sum::<f64>()).sum();
            assert!((ip - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
}

fn check_symmetries(p: &CurvaturePack, tol: f64) {
    let d = p.metric.dim;
    let r = |a, b, c, e| p.riemann.get(&[a, b, c, e]);
    let pp = |a: usize, b: usize| p.schouten.get(&[a, b]);
    let g = |a: usize, b: usize| p.metric.get(&[a, b]);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let v = r(a, b, c, e);
                    assert!((v + r(b, a, c, e)).abs() < tol);
                    assert!((v + r(a, b, e, c)).abs() < tol);
                    assert!((v - r(c, e, a, b)).abs() < tol);
                    let rebuilt = p.weyl.get(&[a, b, c, e]) + pp(a, c) * g(b, e) + pp(b, e) * g(a, c)
                        - pp(a, e) * g(b, c)
                        - pp(b, c) * g(a, e);
                    assert!((v - rebuilt).abs() < tol);
                }
            }
        }
    }
    // Weyl is trace free.
    for b in 0..d {
        for e in 0..d {
            let tr: f64 = (0..d)
                .map(|a| (0..d).map(|c| p.metric_inv.get(&[a, c]) * p.weyl.get(&[a, b, c, e])).sum::<f64>())
                .sum();
            assert!(tr.abs() < 1e-8, "trace {tr}");
        }
    }
}

#[test]
fn deformed_metric_has_weyl_and_symmetries() {
    let amb = deformed(5, 11, 0.1);
    let p = curvature_pack(&amb, &[0.2, 0.1, -0.3, 0.4, 0.0]).unwrap();
    assert!(p.weyl.max_abs() > 1e-3);
    check_symmetries(&p, 1e-12);
}

#[test]
fn cotton_tensor_vanishes_when_conformally_flat() {
    for id in ["sin1", "quad", "bump", "mixed"] {
        let amb = AmbientChart::conformally_flat(5, Omega::builtin(id).unwrap());
        let p = curvature_pack(&amb, &[0.3, 0.2, -0.1, 0.4, -0.2]).unwrap();
        assert!(p.weyl.max_abs() < 1e-12);
        for a in 0..5 {
            for b in 0..5 {
                for c in 0..5 {
                    let cot = p.nabla_schouten.get(&[a, b, c]) - p.nabla_schouten.get(&[b, a, c]);
                    assert!(cot.abs() < 1e-6, "{id}: cotton {cot}");
                }
            }
        }
    }
}

#[test]
fn finite_differences_match_exact_round_sphere() {
    let exact = AmbientChart::round_sphere(5);
    let oracle = exact.clone();
    let sampled = AmbientChart::sampled(5, Arc::new(move |x: &[f64]| oracle.metric(x).unwrap()));
    let x = [0.3, -0.2, 0.5, 0.1, 0.25];
    let e = curvature_pack(&exact, &x).unwrap();
    let s = curvature_pack(&sampled, &x).unwrap();
    let pairs = [
        (&e.christoffel, &s.christoffel),
        (&e.riemann, &s.riemann),
        (&e.schouten, &s.schouten),
        (&e.weyl, &s.weyl),
        (&e.nabla_schouten, &s.nabla_schouten),
        (&e.bach, &s.bach),
    ];
    for (k, (a, b)) in pairs.iter().enumerate() {
        let err = a.data.iter().zip(&b.data).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(err < 1e-6, "tensor {k}: error {err:e}");
    }
    check_symmetries(&s, 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn weyl_is_conformally_covariant(
        seed in 0u64..500,
        x in prop::collection::vec(-0.4f64..0.4, 5),
        which in 0usize..3,
    ) {
        let base = deformed(5, seed, 0.08);
        let omega = [Omega::builtin("sin1"), Omega::builtin("quad"), Omega::builtin("bump")][which].clone().unwrap();
        let w = omega.eval(&x).unwrap();
        let p = curvature_pack(&base, &x).unwrap();
        let q = curvature_pack(&base.rescaled(omega), &x).unwrap();
        for (a, b) in p.weyl.data.iter().zip(&q.weyl.data) {
            prop_assert!((b - (2.0 * w).exp() * a).abs() < 1e-6);
        }
        check_symmetries(&q, 1e-10);
    }
}
