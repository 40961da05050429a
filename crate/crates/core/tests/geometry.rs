use std::f64::consts::PI;

use gwl4::geometry::*;
use proptest::prelude::*;

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn a_h_contraction(j: &FrameJet) -> f64 {
    let n = j.n();
    let mut acc = 0.0;
    for a in 0..n {
        for b in 0..n {
            let ah: f64 = j.a[a][b].iter().zip(&j.h).map(|(x, y)| x * y).sum();
            acc += ah * ah;
        }
    }
    acc
}

#[test]
fn unit_four_sphere_jet() {
    let c = ProductChart::sphere(4, 1.0).unwrap();
    let x = [0.7, 0.4, 1.3, -0.6];
    let jet = extrinsic_jet(&c, &x, 4).unwrap();
    let p = c.evaluate(&x);
    assert!((norm2(&jet.h) - 16.0).abs() < 1e-12);
    // H = -4 x: its outward component is -4.
    let h = jet.to_ambient(&jet.h);
    let outward: f64 = h.iter().zip(&p).map(|(a, b)| a * b).sum();
    assert!((outward + 4.0).abs() < 1e-12);
    for i in 0..4 {
        for k in 0..4 {
            let ak = jet.to_ambient(&jet.a[i][k]);
            for (aa, pa) in ak.iter().zip(&p) {
                assert!((aa + jet.metric[i][k] * pa).abs() < 1e-12);
            }
        }
    }
    assert!(norm2(&jet.grad_perp_h[0]) < 1e-24);
    assert!(norm2(jet.lap_perp_h.as_ref().unwrap()) < 1e-22);
}

#[test]
fn flat_plane_jet_vanishes() {
    let c = ProductChart::plane(4, 5).unwrap();
    let jet = extrinsic_jet(&c, &[0.1, 0.2, 0.3, 0.4], 6).unwrap();
    assert_eq!(norm2(&jet.h), 0.0);
    assert!(jet.a.iter().flatten().all(|v| norm2(v) == 0.0));
    assert_eq!(norm2(jet.lap_perp_bracket.as_ref().unwrap()), 0.0);
}

#[test]
fn flat_torus_jet() {
    let c = ProductChart::product(&[(1, 1.0); 4]).unwrap();
    let jet = extrinsic_jet(&c, &[0.3, 1.0, 2.0, 4.0], 4).unwrap();
    let f = jet.orthonormal();
    assert!((norm2(&jet.h) - 4.0).abs() < 1e-12);
    assert!((a_h_contraction(&f) - 4.0).abs() < 1e-12);
    assert!(jet.grad_perp_h.iter().all(|v| norm2(v) < 1e-24));
}

#[test]
fn product_jet_values() {
    let p = ProductOfSpheres::new(&[(3, 1.0), (1, 1.0 / 3f64.sqrt())]).unwrap();
    let j = product_jet(&p);
    assert!((norm2(&j.h) - 12.0).abs() < 1e-12);
    let t = ProductOfSpheres::new(&[(1, 1.0); 4]).unwrap();
    assert!(product_jet(&t).grad_perp_h.iter().flatten().all(|&x| x == 0.0));
}

/// Frame-independent summary: `⟨H, ν_a⟩` for the outward normals of the
/// factors, and the Gram matrix `⟨A, ν_a⟩·⟨A, ν_b⟩`.
fn factor_summary(jet: &ExtrinsicJet, outward: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let f = jet.orthonormal();
    let comp = |c: &[f64], nu: &[f64]| -> f64 {
        let v = jet.to_ambient(c);
        v.iter().zip(nu).map(|(a, b)| a * b).sum()
    };
    let h = outward.iter().map(|nu| comp(&f.h, nu)).collect();
    let gram = outward
        .iter()
        .map(|na| {
            outward
                .iter()
                .map(|nb| {
                    let mut acc = 0.0;
                    for a in 0..4 {
                        for b in 0..4 {
                            acc += comp(&f.a[a][b], na) * comp(&f.a[a][b], nb);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    (h, gram)
}

#[test]
fn chart_jet_agrees_with_product_jet() {
    let profiles: [&[(usize, f64)]; 4] =
        [&[(4, 1.3)], &[(3, 1.0), (1, 0.4)], &[(2, 0.8), (2, 1.7)], &[(2, 1.0), (1, 0.5), (1, 2.0)]];
    for prof in profiles {
        let p = ProductOfSpheres::ordered(prof).unwrap();
        let chart = p.chart();
        let x = [0.9, 0.6, 1.7, 2.2];
        let jet = extrinsic_jet(&chart, &x, 4).unwrap();
        let pt = chart.evaluate(&x);
        let outward: Vec<Vec<f64>> = (0..prof.len())
            .map(|b| {
                let mut v = vec![0.0; pt.len()];
                let r = prof[b].1;
                for a in chart.factor_block(b) {
                    v[a] = pt[a] / r;
                }
                v
            })
            .collect();
        let (h, gram) = factor_summary(&jet, &outward);
        let pj = product_jet(&p);
        let canon: Vec<Vec<f64>> = pj.normal_frame.clone();
        let (hp, gp) = factor_summary(&pj, &canon);
        for (a, b) in h.iter().zip(&hp) {
            assert!((a - b).abs() < 1e-10, "{prof:?}: {a} vs {b}");
        }
        for (ra, rb) in gram.iter().zip(&gp) {
            for (a, b) in ra.iter().zip(rb) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn jet_invariants_on_perturbed_torus() {
    let field = VectorField::single(
        vec![Mode { coeff: 0.05, freq: vec![(0, 1.0), (3, 2.0)], phase: 0.3 }],
        Direction::Radial(0),
    );
    let c = ProductChart::product(&[(2, 1.0), (1, 0.7), (1, 1.2)]).unwrap().perturbed(field);
    let jet = extrinsic_jet(&c, &[1.1, 0.2, 0.5, 2.5], 4).unwrap();
    let n = 4;
    for i in 0..n {
        for k in 0..n {
            let prod: f64 = (0..n).map(|j| jet.metric[i][j] * jet.inverse[j][k]).sum();
            assert!((prod - if i == k { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
    for (a, na) in jet.normal_frame.iter().enumerate() {
        for (b, nb) in jet.normal_frame.iter().enumerate() {
            let ip: f64 = na.iter().zip(nb).map(|(x, y)| x * y).sum();
            assert!((ip - if a == b { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
        for t in &jet.tangent {
            let ip: f64 = na.iter().zip(t).map(|(x, y)| x * y).sum();
            assert!(ip.abs() < 1e-12);
        }
    }
    let mut tr = vec![0.0; jet.codim()];
    for i in 0..n {
        for j in 0..n {
            for (t, a) in tr.iter_mut().zip(&jet.a[i][j]) {
                *t += jet.inverse[i][j] * a;
            }
        }
    }
    for (t, h) in tr.iter().zip(&jet.h) {
        assert!((t - h).abs() < 1e-10);
    }
}

#[test]
fn sphere_and_torus_volumes() {
    let cases: Vec<(ProductChart, f64)> = vec![
        (ProductChart::sphere(4, 1.0).unwrap(), 8.0 * PI * PI / 3.0),
        (ProductChart::product(&[(1, 1.0); 4]).unwrap(), (2.0 * PI).powi(4)),
        (ProductChart::product(&[(2, 1.0), (2, 1.0)]).unwrap(), 16.0 * PI * PI),
        (ProductChart::product(&[(3, 2.0), (1, 0.5)]).unwrap(), 2.0 * PI * PI * 8.0 * PI),
    ];
    for (c, exact) in cases {
        let g = QuadratureGrid::new(&c, 32).unwrap();
        assert!((g.total_weight() - exact).abs() < 1e-10 * exact);
        assert!(g.nodes.iter().all(|n| n.weight > 0.0));
        let full = QuadratureGrid::with_counts(&c, &[8; 4]).unwrap();
        let full2 = QuadratureGrid::with_counts(&c, &[16; 4]).unwrap();
        assert!((full.total_weight() - exact).abs() < 1e-10 * exact);
        assert!((full.total_weight() - full2.total_weight()).abs() <= 1e-12 * exact);
    }
}

#[test]
fn integrate_reports_non_finite_node() {
    let c = ProductChart::sphere(4, 1.0).unwrap();
    let g = QuadratureGrid::with_counts(&c, &[2, 1, 1, 1]).unwrap();
    match integrate(&g, |n| Ok(if n.point[0] > 1.0 { f64::NAN } else { 1.0 })) {
        Err(gwl4::GwError::NonFinite { index, .. }) => assert_eq!(index, 0),
        other => panic!("expected a non-finite error, got {other:?}"),
    }
}

#[test]
fn depth_beyond_capability_is_rejected() {
    let c = ProductChart::sphere(4, 1.0).unwrap();
    assert!(matches!(extrinsic_jet(&c, &[0.5; 4], 7), Err(gwl4::GwError::Capability { .. })));
    assert!(matches!(c.derivative(&[0.5; 4], &[7, 0, 0, 0]), Err(gwl4::GwError::Capability { .. })));
}

#[test]
fn degenerate_point_is_rejected() {
    // Polar parameter at the pole, where the Hopf coordinates collapse.
    let c = ProductChart::sphere(4, 1.0).unwrap();
    assert!(matches!(extrinsic_jet(&c, &[0.0, 0.3, 0.1, 0.2], 4), Err(gwl4::GwError::Degenerate { .. })));
}

fn sample_charts() -> Vec<ProductChart> {
    let wobble = VectorField::single(
        vec![Mode { coeff: 0.03, freq: vec![(0, 1.5), (2, -1.0)], phase: 0.2 }],
        Direction::Radial(0),
    );
    vec![
        ProductChart::sphere(4, 1.0).unwrap(),
        ProductChart::ellipsoid(&[1.0, 1.2, 0.8, 1.5, 0.9]).unwrap(),
        ProductChart::product(&[(3, 1.0), (1, 0.6)]).unwrap(),
        ProductChart::product(&[(2, 1.0), (2, 0.5)]).unwrap(),
        ProductChart::product(&[(1, 1.0), (1, 1.3), (1, 0.7), (1, 2.0)]).unwrap().perturbed(wobble),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn derivatives_match_finite_differences(
        which in 0usize..5,
        x in prop::collection::vec(0.3f64..2.8, 4),
        order in 1usize..=6,
        seed in 0u64..1000,
    ) {
        let chart = &sample_charts()[which];
        let n = 4;
        // Multi-index of the requested order, then drop one unit along axis `i`.
        let mut alpha = vec![0u8; n];
        let mut s = seed;
        for _ in 0..order {
            alpha[(s % n as u64) as usize] += 1;
            s /= 3;
        }
        let i = alpha.iter().position(|&a| a > 0).unwrap();
        let mut lower = alpha.clone();
        lower[i] -= 1;
        let h = 1e-3;
        let at = |t: f64| {
            let mut y = x.clone();
            y[i] += t;
            chart.derivative(&y, &lower).unwrap()
        };
        let (m2, m1, p1, p2) = (at(-2.0 * h), at(-h), at(h), at(2.0 * h));
        let exact = chart.derivative(&x, &alpha).unwrap();
        let scale = exact.iter().map(|v| v.abs()).fold(1.0, f64::max);
        for a in 0..exact.len() {
            let fd = (m2[a] - 8.0 * m1[a] + 8.0 * p1[a] - p2[a]) / (12.0 * h);
            prop_assert!((fd - exact[a]).abs() <= 1e-6 * scale, "axis {a}: fd {fd} exact {}", exact[a]);
        }
    }

    #[test]
    fn mean_curvature_scales_inversely(
        which in 0usize..5,
        x in prop::collection::vec(0.3f64..2.8, 4),
        lambda in prop::sample::select(vec![0.5, 2.0, 10.0]),
    ) {
        let chart = sample_charts()[which].clone();
        let scaled = chart.clone().dilated(lambda).unwrap();
        let j1 = extrinsic_jet(&chart, &x, 3).unwrap();
        let j2 = extrinsic_jet(&scaled, &x, 3).unwrap();
        let h1 = norm2(&j1.h).sqrt();
        let h2 = norm2(&j2.h).sqrt();
        prop_assert!((h2 * lambda - h1).abs() <= 1e-10 * (1.0 + h1));
        for i in 0..4 {
            for k in 0..4 {
                prop_assert!((j2.metric[i][k] - lambda * lambda * j1.metric[i][k]).abs() <= 1e-10 * lambda * lambda);
            }
        }
    }
}
