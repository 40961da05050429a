//! One line per acceptance criterion. Runs without the test harness so the
//! lines appear in order; exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use gwl4::ambient::{ambient_jet, curvature_pack, AmbientChart, MetricMode, Omega, Tensor};
use gwl4::euler_lagrange::*;
use gwl4::geometry::*;
use gwl4::invariants::*;
use gwl4::renvol::HemisphereSurface;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = fn() -> Check;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn within(t: Duration, limit: f64) -> Result<(), String> {
    ensure(t.as_secs_f64() < limit, || format!("took {:.1} s, limit {limit} s", t.as_secs_f64()))
}

fn critical_table() -> Vec<(Vec<(usize, f64)>, f64)> {
    let (s2, s3, s5) = (2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt());
    vec![
        (vec![(4, 1.0)], 64.0 * PI * PI),
        (vec![(3, 1.0), (1, 1.0 / s3)], 18.0 * s3 * PI.powi(3)),
        (vec![(3, 1.0), (1, 0.6f64.sqrt())], 8.0 * 15f64.sqrt() * PI.powi(3)),
        (vec![(2, 1.0), (2, 1.0)], 96.0 * PI * PI),
        (vec![(2, 1.0), (1, 1.0 / s2), (1, 1.0 / s2)], 48.0 * PI.powi(3)),
        (vec![(2, 1.0), (1, 1.0 / s2), (1, 3.0 / 10f64.sqrt())], 64.0 * s5 / 3.0 * PI.powi(3)),
        (vec![(1, 1.0); 4], 24.0 * PI.powi(4)),
        (vec![(1, 1.0), (1, 1.0), (1, 1.0), (1, 3.0 / s5)], 32.0 * s5 / 3.0 * PI.powi(4)),
    ]
}

fn critical_values() -> Check {
    let t = Instant::now();
    let (mut worst_closed, mut worst_quad) = (0.0f64, 0.0f64);
    for (profile, exact) in critical_table() {
        let p = ProductOfSpheres::new(&profile).map_err(|e| e.to_string())?;
        let closed = ll4_flat(Shape::Product(&p), 0).map_err(|e| e.to_string())?.value;
        let quad = ll4_flat(Shape::Chart(&p.chart()), 8).map_err(|e| e.to_string())?.value;
        worst_closed = worst_closed.max(rel(closed, exact));
        worst_quad = worst_quad.max(rel(quad, exact));
    }
    ensure(worst_closed <= 1e-10, || format!("closed form off by {worst_closed:.2e}"))?;
    ensure(worst_quad <= 1e-8, || format!("quadrature off by {worst_quad:.2e}"))?;
    within(t.elapsed(), 10.0)?;
    Ok(format!("closed {worst_closed:.1e}, quadrature {worst_quad:.1e}"))
}

fn critical_radii() -> Check {
    let t = Instant::now();
    let (s2, s3, s5) = (2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt());
    let expected: Vec<(Vec<usize>, Vec<Vec<f64>>)> = vec![
        (vec![4], vec![vec![1.0]]),
        (vec![3, 1], vec![vec![1.0, 1.0 / s3], vec![1.0, 0.6f64.sqrt()]]),
        (vec![2, 2], vec![vec![1.0, 1.0]]),
        (vec![2, 1, 1], vec![vec![1.0, 1.0 / s2, 1.0 / s2], vec![1.0, 1.0 / s2, 3.0 / 10f64.sqrt()]]),
        (vec![1, 1, 1, 1], vec![vec![1.0; 4], vec![1.0, 1.0, 1.0, 3.0 / s5]]),
    ];
    let opt = SearchOptions::default();
    ensure(opt.log_min == -2.0 && opt.log_max == 2.0, || "search box is not [e⁻², e²]".into())?;
    let mut found = 0;
    for (dims, want) in expected {
        let roots = critical_search(&dims, &opt).map_err(|e| e.to_string())?;
        let mut got: Vec<Vec<f64>> = roots.iter().map(|c| c.radii.clone()).collect();
        let norm = |v: &mut Vec<f64>| {
            let r0 = v[0];
            v.iter_mut().for_each(|r| *r /= r0);
        };
        got.iter_mut().for_each(norm);
        ensure(got.len() == want.len(), || format!("{dims:?}: {} roots, expected {}", got.len(), want.len()))?;
        for w in &want {
            let hit = got.iter().any(|g| g.iter().zip(w).all(|(a, b)| (a - b).abs() <= 1e-8));
            ensure(hit, || format!("{dims:?}: radii {w:?} not found in {got:?}"))?;
        }
        found += got.len();
    }
    within(t.elapsed(), 60.0)?;
    Ok(format!("{found} roots over five profiles, none extra"))
}

fn volume_cross_check() -> Check {
    let t = Instant::now();
    let fit = HemisphereSurface::new(4, 1.0, 5).and_then(|s| s.expansion(1e-3, 1e-1, 40)).map_err(|e| e.to_string())?;
    let (l, c0) = (fit.anomaly(), fit.power(-4).unwrap());
    ensure((l - PI * PI).abs() <= 1e-3, || format!("fitted L4 = {l}"))?;
    ensure((c0 - 2.0 * PI * PI / 3.0).abs() <= 1e-3, || format!("leading coefficient {c0}"))?;
    let chart = ProductChart::sphere(4, 1.0).map_err(|e| e.to_string())?;
    let grid = QuadratureGrid::with_counts(&chart, &[16, 1, 1, 1]).map_err(|e| e.to_string())?;
    let full = l4_full(&chart, &AmbientChart::flat(5), &grid).map_err(|e| e.to_string())?.value;
    let flat = AmbientChart::flat(5);
    let mut iv = 0.0;
    for node in &grid.nodes {
        let (jet, pack) = ambient_jet(&chart, &flat, &node.point, 4).map_err(|e| e.to_string())?;
        iv += v4(&jet, Some(&pack)).map_err(|e| e.to_string())?.total * node.weight;
    }
    ensure((l - full).abs() <= 1e-3, || format!("fit {l} vs l4_full {full}"))?;
    ensure((l - iv).abs() <= 1e-3, || format!("fit {l} vs integrated v4 {iv}"))?;
    within(t.elapsed(), 60.0)?;
    Ok(format!("L4 {l:.9}, leading {c0:.9}, l4_full {full:.9}, ∫v4 {iv:.9}"))
}

/// Taylor coefficient of `r^(2k)` in `√(1 − r²) − 1`, from the binomial series.
fn hemisphere_coefficient(k: u32) -> f64 {
    let mut binom = 1.0;
    for j in 0..k {
        binom *= (0.5 - j as f64) / (j + 1) as f64;
    }
    binom * if k.is_multiple_of(2) { 1.0 } else { -1.0 }
}

fn expansion_coefficients() -> Check {
    let chart = ProductChart::sphere(4, 1.0).map_err(|e| e.to_string())?;
    let (want2, want4) = (hemisphere_coefficient(1), hemisphere_coefficient(2));
    let mut worst = 0.0f64;
    for x in [[0.9, 0.7, 1.3, 2.1], [2.2, 0.3, -0.4, 5.0]] {
        let jet = extrinsic_jet(&chart, &x, 4).map_err(|e| e.to_string())?;
        let p = chart.evaluate(&x);
        let outward = |c: &[f64]| -> f64 { jet.to_ambient(c).iter().zip(&p).map(|(a, b)| a * b).sum() };
        let a2 = outward(&u2(&jet));
        let a4 = outward(&u4(&jet, None).map_err(|e| e.to_string())?);
        let v = v4(&jet, None).map_err(|e| e.to_string())?.total;
        for (got, want) in [(a2, want2), (a4, want4), (v, 0.375)] {
            worst = worst.max((got - want).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("largest deviation {worst:.2e}"))?;
    Ok(format!("u2 = {want2}, u4 = {want4}, v4 = 3/8, max error {worst:.1e}"))
}

fn conformal_invariance() -> Check {
    let s4 = ProductChart::sphere(4, 1.0).map_err(|e| e.to_string())?;
    let grid = QuadratureGrid::with_counts(&s4, &[16, 1, 1, 1]).map_err(|e| e.to_string())?;
    let base = l4_full(&s4, &AmbientChart::flat(5), &grid).map_err(|e| e.to_string())?.value;
    // sin1 and quad keep the rotations about the polar axis, so the polar
    // slice suffices; bump has no symmetry and needs the full grid.
    let full = QuadratureGrid::with_counts(&s4, &[8, 8, 8, 8]).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (id, g) in [("sin1", &grid), ("quad", &grid), ("bump", &full)] {
        let amb = AmbientChart::conformally_flat(5, Omega::builtin(id).unwrap());
        let v = l4_full(&s4, &amb, g).map_err(|e| e.to_string())?.value;
        worst = worst.max((v - base).abs());
    }
    ensure(worst <= 1e-4, || format!("conformal change {worst:.2e}"))?;

    // Flat reduction, pointwise on a perturbed sphere and integrated on a product.
    let wavy = ProductChart::sphere(4, 1.0).map_err(|e| e.to_string())?.perturbed(VectorField::single(
        vec![Mode { coeff: 0.04, freq: vec![(0, 2.0), (2, 1.0)], phase: 0.3 }],
        Direction::Radial(0),
    ));
    let mut reduction = 0.0f64;
    for x in [[0.4, 0.3, 1.0, 2.0], [2.0, 1.1, 5.0, 0.2]] {
        let (jet, pack) = ambient_jet(&wavy, &AmbientChart::flat(5), &x, 3).map_err(|e| e.to_string())?;
        let full = l4_integrand(&jet.orthonormal(), &pack).map_err(|e| e.to_string())?;
        reduction = reduction.max(rel(full, l4_integrand_flat(&jet)));
    }
    let p = ProductOfSpheres::new(&[(3, 1.0), (1, 0.6)]).map_err(|e| e.to_string())?;
    let pc = p.chart();
    let pg = QuadratureGrid::new(&pc, 8).map_err(|e| e.to_string())?;
    let integrated = l4_full(&pc, &AmbientChart::flat(6), &pg).map_err(|e| e.to_string())?.value;
    reduction = reduction.max(rel(integrated, ll4_product(&p) / 64.0));
    ensure(reduction <= 1e-10, || format!("flat reduction off by {reduction:.2e}"))?;

    let eq = l4_full(&s4, &AmbientChart::round_sphere(5), &grid).map_err(|e| e.to_string())?.value;
    ensure((eq - PI * PI).abs() <= 1e-6, || format!("equatorial S⁴ ⊂ S⁵ gives {eq}"))?;
    Ok(format!("conformal change {worst:.1e}, reduction {reduction:.1e}, equator {eq:.10}"))
}

fn random_modes(rng: &mut ChaCha8Rng, amp: f64, axes: &[usize]) -> Vec<Mode> {
    (0..2)
        .map(|_| Mode {
            coeff: amp * rng.random_range(0.3..1.0),
            freq: axes.iter().map(|&a| (a, rng.random_range(-1.2..1.2))).collect(),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
        })
        .collect()
}

fn warped_torus(seed: u64) -> (ProductChart, VectorField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radii = [1.0, rng.random_range(0.6..1.4), 0.9, 1.1];
    let base = ProductChart::product(&radii.map(|r| (1, r))).unwrap();
    let warp = VectorField {
        terms: vec![
            FieldTerm { profile: random_modes(&mut rng, 0.08, &[0, 2]), direction: Direction::Radial(0) },
            FieldTerm { profile: random_modes(&mut rng, 0.06, &[1, 3]), direction: Direction::Radial(1) },
            FieldTerm { profile: random_modes(&mut rng, 0.04, &[0, 3]), direction: Direction::Coordinate(3) },
        ],
    };
    let x = VectorField {
        terms: vec![
            FieldTerm { profile: random_modes(&mut rng, 1.0, &[0, 2]), direction: Direction::Radial(0) },
            FieldTerm { profile: random_modes(&mut rng, 1.0, &[1, 2]), direction: Direction::Radial(2) },
        ],
    };
    (base.perturbed(warp), x)
}

fn first_variation_law() -> Check {
    let c = ProductChart::product(&[(3, 1.0), (1, 1.0)]).map_err(|e| e.to_string())?;
    let radial = VectorField::single(vec![Mode::constant(1.0)], Direction::Radial(1));
    let grid = QuadratureGrid::with_counts(&c, &[1, 1, 1, 1]).map_err(|e| e.to_string())?;
    let pairing = el_pairing(&c, &radial, &grid).map_err(|e| e.to_string())?;
    let want = 4.5 * PI.powi(3);
    ensure(rel(pairing, want) <= 1e-4, || format!("−∫⟨ℰ, X_r⟩ = {pairing}, expected {want}"))?;
    let mut worst = 0.0f64;
    for seed in [11, 12, 13] {
        let (chart, x) = warped_torus(seed);
        let counts = [24, 24, 1, 1];
        let g = QuadratureGrid::with_counts(&chart, &counts).map_err(|e| e.to_string())?;
        let predicted = el_pairing(&chart, &x, &g).map_err(|e| e.to_string())?;
        let fd = first_variation(&chart, &x, 2.5e-4, &counts).map_err(|e| e.to_string())?;
        worst = worst.max((fd - predicted).abs() / (1.0 + predicted.abs()));
    }
    ensure(worst <= 1e-4, || format!("finite difference off by {worst:.2e}"))?;
    Ok(format!("dℒ₄/dr = {pairing:.8}, perturbed charts {worst:.1e}"))
}

fn willmore() -> Check {
    let s2 = ProductChart::sphere(2, 1.0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for x in [[0.7, 1.9], [2.5, 4.0]] {
        let jet = extrinsic_jet(&s2, &x, 4).map_err(|e| e.to_string())?;
        let w = willmore_operator(&jet, None).map_err(|e| e.to_string())?;
        worst = worst.max(w.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    ensure(worst <= 1e-10, || format!("Willmore operator {worst:.2e}"))?;
    let fit = HemisphereSurface::new(2, 1.0, 3).and_then(|s| s.expansion(1e-3, 1e-1, 40)).map_err(|e| e.to_string())?;
    let l2 = fit.anomaly();
    ensure((-8.0 * l2 - 16.0 * PI).abs() <= 1e-3, || format!("−8 L2 = {}", -8.0 * l2))?;
    Ok(format!("W(S²) {worst:.1e}, L2 = {l2:.9}"))
}

fn deformed(dim: usize, seed: u64, eps: f64) -> AmbientChart {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes = (0..6)
        .map(|_| MetricMode {
            a: rng.random_range(0..dim),
            b: rng.random_range(0..dim),
            coeff: eps * rng.random_range(-1.0..1.0),
            freq: (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect(),
            phase: rng.random_range(0.0..6.3),
        })
        .collect();
    AmbientChart::Deformed { dim, modes }
}

fn max_dev(t: &Tensor, g: &Tensor, c: f64) -> f64 {
    t.data.iter().zip(&g.data).fold(0.0, |m, (a, b)| m.max((a - c * b).abs()))
}

fn property_suites() -> Check {
    // Scale invariance.
    let p = ProductOfSpheres::new(&[(2, 1.0), (1, 0.7), (1, 1.9)]).map_err(|e| e.to_string())?;
    let wavy = ProductChart::sphere(4, 1.0).map_err(|e| e.to_string())?.perturbed(VectorField::single(
        vec![Mode { coeff: 0.03, freq: vec![(0, 2.0)], phase: 0.0 }],
        Direction::Radial(0),
    ));
    let base = ll4_product(&p);
    let wbase = ll4_flat(Shape::Chart(&wavy), 8).map_err(|e| e.to_string())?.value;
    let mut scale = 0.0f64;
    for lambda in [0.5, 2.0, 10.0] {
        scale = scale.max(rel(ll4_product(&p.dilated(lambda).map_err(|e| e.to_string())?), base));
        let big = wavy.clone().dilated(lambda).map_err(|e| e.to_string())?;
        scale = scale.max(rel(ll4_flat(Shape::Chart(&big), 8).map_err(|e| e.to_string())?.value, wbase));
    }
    ensure(scale <= 1e-10, || format!("scale invariance off by {scale:.2e}"))?;

    // Permutation equivariance of the residual components.
    let a = el_residual_product(&ProductOfSpheres::ordered(&[(1, 0.7), (2, 1.0), (1, 1.9)]).unwrap());
    let b = el_residual_product(&ProductOfSpheres::ordered(&[(1, 1.9), (2, 1.0), (1, 0.7)]).unwrap());
    let perm = (a.components[0] - b.components[2]).abs() + (a.components[2] - b.components[0]).abs() + (a.components[1] - b.components[1]).abs();
    ensure(perm <= 1e-12 * (1.0 + a.norm()), || format!("permutation mismatch {perm:.2e}"))?;

    // Tangential leak.
    let leak_p = el_residual_product(&p).tangential_leak;
    let leak_c = el_residual_chart(&wavy, &[0.5, 0.8, 1.7, 2.9]).map_err(|e| e.to_string())?.tangential_leak;
    ensure(leak_p <= 1e-8 && leak_c <= 1e-5, || format!("leaks {leak_p:.2e}, {leak_c:.2e}"))?;

    // Weyl trace-free and conformally covariant.
    let x = [0.2, 0.1, -0.3, 0.4, 0.0];
    let amb = deformed(5, 11, 0.1);
    let pk = curvature_pack(&amb, &x).map_err(|e| e.to_string())?;
    let mut trace = 0.0f64;
    for bb in 0..5 {
        for d in 0..5 {
            let t: f64 = (0..5)
                .flat_map(|a| (0..5).map(move |c| (a, c)))
                .map(|(a, c)| pk.metric_inv.get(&[a, c]) * pk.weyl.get(&[a, bb, c, d]))
                .sum();
            trace = trace.max(t.abs());
        }
    }
    ensure(trace <= 1e-8, || format!("Weyl trace {trace:.2e}"))?;
    let om = Omega::builtin("sin1").unwrap();
    let w = om.eval(&x).map_err(|e| e.to_string())?;
    let q = curvature_pack(&amb.rescaled(om), &x).map_err(|e| e.to_string())?;
    let cov = max_dev(&q.weyl, &pk.weyl, (2.0 * w).exp());
    ensure(cov <= 1e-6, || format!("Weyl covariance off by {cov:.2e}"))?;

    // Model spaces.
    let y = [0.3, -0.2, 0.5, 0.1, 0.25];
    let flat = curvature_pack(&AmbientChart::flat(5), &y).map_err(|e| e.to_string())?;
    let fm = flat.schouten.max_abs() + flat.weyl.max_abs() + flat.bach.max_abs();
    let round = curvature_pack(&AmbientChart::round_sphere(5), &y).map_err(|e| e.to_string())?;
    let hyp = curvature_pack(&AmbientChart::hyperbolic(5), &[0.1, 0.2, -0.3, 0.05, 0.2]).map_err(|e| e.to_string())?;
    let rm = max_dev(&round.schouten, &round.metric, 0.5) + round.weyl.max_abs() + round.bach.max_abs();
    let hm = max_dev(&hyp.schouten, &hyp.metric, -0.5) + hyp.weyl.max_abs() + hyp.bach.max_abs();
    ensure(fm == 0.0 && rm <= 1e-10 && hm <= 1e-9, || format!("model spaces: flat {fm:.1e}, round {rm:.1e}, hyperbolic {hm:.1e}"))?;
    Ok(format!("scale {scale:.1e}, leak {leak_c:.1e}, Weyl trace {trace:.1e}, covariance {cov:.1e}"))
}

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("critical-value table", critical_values),
        ("critical-radius recovery", critical_radii),
        ("renormalized-volume cross-check", volume_cross_check),
        ("expansion coefficients", expansion_coefficients),
        ("conformal invariance", conformal_invariance),
        ("first-variation law", first_variation_law),
        ("Willmore sanity", willmore),
        ("property suites", property_suites),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}: {name} ({detail}; {secs:.1} s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name} ({why}; {secs:.1} s)", i + 1);
            }
        }
    }
    println!("{} of 8 criteria passed in {:.1} s", 8 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
