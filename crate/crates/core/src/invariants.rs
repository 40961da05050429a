//! The conformal invariants of closed four-dimensional submanifolds and the
//! local coefficients of the singular Yamabe / minimal-surface expansions.
//!
//! Everything pointwise is evaluated in orthonormal frames: tangent indices
//! run over `e_a`, normal indices over `ν_α`, and normal vectors are stored
//! as their frame components.

use crate::ambient::{ambient_jet, fg_coefficients, AmbientChart, CurvaturePack, Tensor};
use crate::error::{GwError, Result};
use crate::geometry::{
    integrand_values, pairwise_sum, product_jet, ExtrinsicJet, FrameJet, Immersion, ProductOfSpheres,
    QuadratureGrid,
};

/// A quadrature result together with the pointwise samples behind it.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub value: f64,
    /// Integrand at each grid node, in node order.
    pub integrand_samples: Vec<f64>,
    pub order: usize,
    /// Difference against the same rule at half resolution.
    pub error_estimate: f64,
}

/// What to integrate over.
#[derive(Clone, Copy)]
pub enum Shape<'a> {
    /// Closed form, no quadrature.
    Product(&'a ProductOfSpheres),
    Chart(&'a dyn Immersion),
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn norm2(u: &[f64]) -> f64 {
    dot(u, u)
}

/// The flat-space integrand `|∇⊥H|² − Σ⟨A_ij,H⟩² + (7/16)|H|⁴`, equal to
/// 128 times the density of `L₄` when the ambient space is Euclidean.
pub fn l4_integrand_flat(jet: &ExtrinsicJet) -> f64 {
    flat_part(&jet.orthonormal())
}

fn flat_part(f: &FrameJet) -> f64 {
    let n = f.n();
    let grad: f64 = f.grad_h.iter().map(|g| norm2(g)).sum();
    let mut ah = 0.0;
    for a in 0..n {
        for b in 0..n {
            ah += dot(&f.a[a][b], &f.h).powi(2);
        }
    }
    grad - ah + 7.0 / 16.0 * norm2(&f.h).powi(2)
}

/// Ambient-coordinate vectors of the frame and of `H`, shared by the
/// curvature contractions.
struct Frame<'a> {
    f: &'a FrameJet,
    h: Vec<f64>,
}

impl<'a> Frame<'a> {
    fn new(f: &'a FrameJet) -> Self {
        let h = Self::lift(f, &f.h);
        Frame { f, h }
    }

    fn lift(f: &FrameJet, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; f.ambient_metric.len()];
        for (ca, nu) in c.iter().zip(&f.normal_frame) {
            out.iter_mut().zip(nu).for_each(|(o, x)| *o += ca * x);
        }
        out
    }

    fn e(&self, a: usize) -> &[f64] {
        &self.f.tangent_frame[a]
    }

    fn nu(&self, al: usize) -> &[f64] {
        &self.f.normal_frame[al]
    }

    fn tr(&self, t: &Tensor) -> f64 {
        (0..self.f.n()).map(|a| t.eval(&[self.e(a), self.e(a)])).sum()
    }
}

/// Pointwise integrand of `128 L₄` for a submanifold of a curved ambient
/// space. With a flat pack it reduces to [`l4_integrand_flat`].
pub fn l4_integrand(f: &FrameJet, pack: &CurvaturePack) -> Result<f64> {
    let d = pack.metric.dim;
    if d == 4 {
        return Err(GwError::Dimension("the Bach term has a pole when the ambient dimension is 4".into()));
    }
    let n = f.n();
    let fr = Frame::new(f);
    let p = &pack.schouten;
    let trp = fr.tr(p);
    let mut pij2 = 0.0;
    let mut pia2 = 0.0;
    let mut pah = 0.0;
    for a in 0..n {
        for b in 0..n {
            let pab = p.eval(&[fr.e(a), fr.e(b)]);
            pij2 += pab * pab;
            pah += pab * dot(&f.a[a][b], &f.h);
        }
        for al in 0..f.codim() {
            pia2 += p.eval(&[fr.e(a), fr.nu(al)]).powi(2);
        }
    }
    let trb = fr.tr(&pack.bach);
    let h2 = norm2(&f.h);
    let weyl: f64 = (0..n).map(|a| pack.weyl.eval(&[fr.e(a), &fr.h, fr.e(a), &fr.h])).sum();
    let dp: f64 = (0..n)
        .map(|a| {
            pack.nabla_schouten.eval(&[&fr.h, fr.e(a), fr.e(a)])
                - 2.0 * pack.nabla_schouten.eval(&[fr.e(a), fr.e(a), &fr.h])
        })
        .sum();
    Ok(flat_part(f)
        + 16.0 * (trp * trp - pij2 + pia2 - trb / (d as f64 - 4.0))
        + (-16.0 * pah + 5.0 * trp * h2 + 8.0 * p.eval(&[&fr.h, &fr.h]) - weyl)
        - 8.0 * dp)
}

/// `ℒ₄ = ½ ∫ (|∇⊥H|² − Σ⟨A_ij,H⟩² + (7/16)|H|⁴) dμ` for a product of round
/// spheres, in closed form.
pub fn ll4_product(p: &ProductOfSpheres) -> f64 {
    0.5 * product_density(p) * p.volume()
}

/// The constant flat integrand `−Σ k³/r⁴ + (7/16)(Σ k²/r²)²` of a product.
pub fn product_density(p: &ProductOfSpheres) -> f64 {
    let mut cubic = 0.0;
    let mut h2 = 0.0;
    for (&k, &r) in p.dims().iter().zip(p.radii().iter()) {
        let k = k as f64;
        cubic += k.powi(3) / r.powi(4);
        h2 += k * k / (r * r);
    }
    -cubic + 7.0 / 16.0 * h2 * h2
}

/// `ℒ₄` of a closed 4-submanifold of Euclidean space.
pub fn ll4_flat(shape: Shape<'_>, order: usize) -> Result<InvariantReport> {
    match shape {
        Shape::Product(p) => {
            let density = l4_integrand_flat(&product_jet(p));
            Ok(InvariantReport {
                value: 0.5 * density * p.volume(),
                integrand_samples: vec![0.5 * density],
                order: 0,
                error_estimate: 0.0,
            })
        }
        Shape::Chart(c) => {
            let grid = QuadratureGrid::new(c, order)?;
            let mut r = l4_full(c, &AmbientChart::flat(c.ambient_dim()), &grid)?;
            r.value *= 64.0;
            r.error_estimate *= 64.0;
            r.integrand_samples.iter_mut().for_each(|v| *v *= 64.0);
            Ok(r)
        }
    }
}

/// `ℒ₄` of a chart in Euclidean space on a fixed grid, without an error
/// estimate.
pub fn ll4_on_grid(chart: &dyn Immersion, grid: &QuadratureGrid) -> Result<f64> {
    Ok(64.0 * l4_on(chart, &AmbientChart::flat(chart.ambient_dim()), grid)?.0)
}

fn l4_on(sigma: &dyn Immersion, ambient: &AmbientChart, grid: &QuadratureGrid) -> Result<(f64, Vec<f64>)> {
    let samples = integrand_values(grid, |node| {
        let (jet, pack) = ambient_jet(sigma, ambient, &node.point, 3)?;
        Ok(l4_integrand(&jet.orthonormal(), &pack)? / 128.0)
    })?;
    // The grid weights carry the Euclidean density; recompute the induced one.
    let weighted = grid
        .nodes
        .iter()
        .zip(&samples)
        .map(|(node, s)| {
            let rho = if ambient.is_flat() { node.weight / node.param_weight } else { induced_density(sigma, ambient, &node.point)? };
            Ok(s * rho * node.param_weight)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((pairwise_sum(&weighted), samples))
}

fn induced_density(sigma: &dyn Immersion, ambient: &AmbientChart, x: &[f64]) -> Result<f64> {
    let f = sigma.expand(x, 1);
    let n = sigma.source_dim();
    let p: Vec<f64> = f.iter().map(|s| s.value()).collect();
    let gbar = ambient.metric(&p)?;
    let jac: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0u8; n];
            e[i] = 1;
            f.iter().map(|s| s.coeff(&e)).collect()
        })
        .collect();
    let g = nalgebra::DMatrix::<f64>::from_fn(n, n, |i, j| {
        let mut s = 0.0;
        for (a, ga) in gbar.iter().enumerate() {
            for (b, gab) in ga.iter().enumerate() {
                s += gab * jac[i][a] * jac[j][b];
            }
        }
        s
    });
    let det = g.determinant();
    if !(det > 0.0) {
        return Err(GwError::Degenerate { point: x.to_vec() });
    }
    Ok(det.sqrt())
}

/// `L₄` of a closed 4-submanifold of an arbitrary ambient chart. The error
/// estimate compares against the grid with every count above two halved.
pub fn l4_full(sigma: &dyn Immersion, ambient: &AmbientChart, grid: &QuadratureGrid) -> Result<InvariantReport> {
    if sigma.source_dim() != 4 {
        return Err(GwError::Dimension(format!("L4 needs a 4-dimensional submanifold, got {}", sigma.source_dim())));
    }
    let (value, samples) = l4_on(sigma, ambient, grid)?;
    let coarse = grid.coarsened(sigma)?;
    let error_estimate = if coarse.counts == grid.counts { 0.0 } else { (l4_on(sigma, ambient, &coarse)?.0 - value).abs() };
    Ok(InvariantReport { value, integrand_samples: samples, order: grid.order, error_estimate })
}

/// Second-order coefficient `u⁽²⁾ = H / 2n`, as normal-frame components.
pub fn u2(jet: &ExtrinsicJet) -> Vec<f64> {
    let n = jet.source_dim() as f64;
    jet.h.iter().map(|h| h / (2.0 * n)).collect()
}

/// Coefficients of the nine terms assembled by [`expansion_rhs`], for
/// submanifold dimension `n`:
/// `ΔH`, `⟨A_ab,H⟩A_ab`, `|H|²H`, `W̄(e_a,H,e_a,ν)`, `P̄(H,ν)`, `tr P̄ · H`,
/// `P̄_ab A_ab`, `∇̄P̄(ν;e_a,e_a) − 2∇̄P̄(e_a;e_a,ν)`, `ḡ(ν, Γ̄(H,H))`.
pub fn u4_coefficients(n: f64) -> [f64; 9] {
    [1.0, 1.0, -2.0 / (n * n), 1.0, n - 4.0, -1.0, 2.0 * n, n, -(n - 2.0) / n]
}

/// The same nine coefficients for the Willmore operator of a surface.
pub const WILLMORE_COEFFICIENTS: [f64; 9] = [1.0, 1.0, -0.5, 1.0, -2.0, -1.0, 4.0, 2.0, 0.0];

/// Linear combination of the nine vector terms listed at [`u4_coefficients`].
pub fn expansion_rhs(f: &FrameJet, pack: Option<&CurvaturePack>, c: &[f64; 9]) -> Result<Vec<f64>> {
    let n = f.n();
    let m = f.codim();
    let lap = f.lap_h.as_ref().ok_or(GwError::Capability { requested: 4, supported: 3 })?;
    let h2 = norm2(&f.h);
    let mut out = vec![0.0; m];
    for al in 0..m {
        let mut aah = 0.0;
        for a in 0..n {
            for b in 0..n {
                aah += dot(&f.a[a][b], &f.h) * f.a[a][b][al];
            }
        }
        out[al] = c[0] * lap[al] + c[1] * aah + c[2] * h2 * f.h[al];
    }
    if let Some(pack) = pack {
        let fr = Frame::new(f);
        let p = &pack.schouten;
        let trp = fr.tr(p);
        let mut gamma_hh = vec![0.0; pack.metric.dim];
        for (cc, g) in gamma_hh.iter_mut().enumerate() {
            for (a, ha) in fr.h.iter().enumerate() {
                for (b, hb) in fr.h.iter().enumerate() {
                    *g += pack.christoffel.get(&[cc, a, b]) * ha * hb;
                }
            }
        }
        for (al, o) in out.iter_mut().enumerate() {
            let nu = fr.nu(al);
            let weyl: f64 = (0..n).map(|a| pack.weyl.eval(&[fr.e(a), &fr.h, fr.e(a), nu])).sum();
            let mut pa = 0.0;
            for a in 0..n {
                for b in 0..n {
                    pa += p.eval(&[fr.e(a), fr.e(b)]) * f.a[a][b][al];
                }
            }
            let dp: f64 = (0..n)
                .map(|a| {
                    pack.nabla_schouten.eval(&[nu, fr.e(a), fr.e(a)])
                        - 2.0 * pack.nabla_schouten.eval(&[fr.e(a), fr.e(a), nu])
                })
                .sum();
            let gam = pack.metric.eval(&[nu, &gamma_hh]);
            *o += c[3] * weyl
                + c[4] * p.eval(&[&fr.h, nu])
                + c[5] * trp * f.h[al]
                + c[6] * pa
                + c[7] * dp
                + c[8] * gam;
        }
    }
    Ok(out)
}

/// Fourth-order coefficient `u⁽⁴⁾` of the singular Yamabe expansion, for
/// `n ≥ 3`. A missing pack means Euclidean ambient space.
pub fn u4(jet: &ExtrinsicJet, pack: Option<&CurvaturePack>) -> Result<Vec<f64>> {
    let n = jet.source_dim();
    if n < 3 {
        return Err(GwError::Dimension(format!("u4 is defined for n >= 3, got n = {n}")));
    }
    let nf = n as f64;
    let rhs = expansion_rhs(&jet.orthonormal(), pack, &u4_coefficients(nf))?;
    Ok(rhs.iter().map(|r| r / (8.0 * nf * (nf - 2.0))).collect())
}

/// Willmore operator `W` of a surface; its Euler–Lagrange equation is `W = 0`.
pub fn willmore_operator(jet: &ExtrinsicJet, pack: Option<&CurvaturePack>) -> Result<Vec<f64>> {
    if jet.source_dim() != 2 {
        return Err(GwError::Dimension(format!("the Willmore operator needs a surface, got n = {}", jet.source_dim())));
    }
    expansion_rhs(&jet.orthonormal(), pack, &WILLMORE_COEFFICIENTS)
}

/// The surface coefficient `w₂ = −W/16`.
pub fn w2(jet: &ExtrinsicJet, pack: Option<&CurvaturePack>) -> Result<Vec<f64>> {
    Ok(willmore_operator(jet, pack)?.iter().map(|w| -w / 16.0).collect())
}

/// `v⁽⁴⁾` split into the part without derivatives of `|v|²` and the
/// divergence, which integrates to zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct V4 {
    pub without_divergence: f64,
    pub divergence: f64,
    pub total: f64,
}

/// Renormalized-volume coefficient `v⁽⁴⁾` of a 4-dimensional minimal
/// submanifold's renormalized area, pointwise. The divergence is taken in
/// the covariant form `½Δ|v|² + 2 div(g⁽²⁾(·, v))`.
pub fn v4(jet: &ExtrinsicJet, pack: Option<&CurvaturePack>) -> Result<V4> {
    let n = jet.source_dim();
    if n != 4 {
        return Err(GwError::Dimension(format!("v4 is evaluated on 4-dimensional submanifolds, got n = {n}")));
    }
    let flat;
    let pack = match pack {
        Some(p) => p,
        None => {
            flat = CurvaturePack::flat(&vec![0.0; jet.ambient_dim()]);
            &flat
        }
    };
    let f = jet.orthonormal();
    let nf = n as f64;
    let w = u4(jet, Some(pack))?;
    let (g2, g4) = fg_coefficients(pack)?;
    let fr = Frame::new(&f);
    let s = 1.0 / (2.0 * nf);
    let v: Vec<f64> = f.h.iter().map(|h| h * s).collect();
    let va = Frame::lift(&f, &v);
    let lap_v: Vec<f64> = f.lap_h.as_ref().expect("u4 checked the depth").iter().map(|x| x * s).collect();
    let grad_v: Vec<Vec<f64>> = f.grad_h.iter().map(|g| g.iter().map(|x| x * s).collect()).collect();
    let v2 = norm2(&v);
    let trg2 = fr.tr(&g2);
    let mut av2 = 0.0;
    let mut g2sq = 0.0;
    let mut g2av = 0.0;
    for a in 0..n {
        for b in 0..n {
            let av = dot(&f.a[a][b], &v);
            let g = g2.eval(&[fr.e(a), fr.e(b)]);
            av2 += av * av;
            g2sq += g * g;
            g2av += g * av;
        }
    }
    let riem: f64 = (0..n).map(|a| pack.riemann.eval(&[fr.e(a), &va, fr.e(a), &va])).sum();
    // ∇̄g⁽²⁾ = −∇̄P̄.
    let dg2: f64 = -(0..n)
        .map(|a| {
            pack.nabla_schouten.eval(&[&va, fr.e(a), fr.e(a)])
                - 2.0 * pack.nabla_schouten.eval(&[fr.e(a), fr.e(a), &va])
        })
        .sum::<f64>();
    let mut gamma_vv = vec![0.0; pack.metric.dim];
    for (cc, g) in gamma_vv.iter_mut().enumerate() {
        for (a, x) in va.iter().enumerate() {
            for (b, y) in va.iter().enumerate() {
                *g += pack.christoffel.get(&[cc, a, b]) * x * y;
            }
        }
    }
    let two_v4 = -dot(&lap_v, &v) - av2 + 4.0 * (nf * nf - 2.0 * nf - 1.0) * v2 * v2 + 0.25 * trg2 * trg2
        - 0.5 * g2sq
        + fr.tr(&g4)
        + 2.0 * g2av
        - 2.0 * (nf - 1.0) * trg2 * v2
        - 4.0 * (nf - 1.0) * g2.eval(&[&va, &va])
        - riem
        + dg2
        - 4.0 * (nf - 4.0) * dot(&v, &w)
        - 2.0 * (nf - 4.0) * pack.metric.eval(&[&va, &gamma_vv]);

    let p = &pack.schouten;
    let mut div_p = 0.0;
    for a in 0..n {
        let aa = Frame::lift(&f, &f.a[a][a]);
        let dva = Frame::lift(&f, &grad_v[a]);
        div_p += pack.nabla_schouten.eval(&[fr.e(a), fr.e(a), &va]) + p.eval(&[&aa, &va]) + p.eval(&[fr.e(a), &dva]);
        for b in 0..n {
            div_p -= dot(&f.a[a][b], &v) * p.eval(&[fr.e(a), fr.e(b)]);
        }
    }
    let grad_v2: f64 = grad_v.iter().map(|g| norm2(g)).sum();
    let divergence = 0.5 * (dot(&lap_v, &v) + grad_v2 - 2.0 * div_p);
    let without = 0.5 * two_v4;
    Ok(V4 { without_divergence: without, divergence, total: without + divergence })
}
