//! Pointwise extrinsic geometry of a chart.
//!
//! Everything is computed on Taylor expansions of the embedding around the
//! evaluation point, with vectors kept in ambient coordinates. Normal-valued
//! tensors are differentiated with the normal connection and the induced
//! Levi-Civita connection, then read off at the point in an orthonormal
//! normal frame.

use super::chart::Immersion;
use super::product::ProductOfSpheres;
use crate::error::{GwError, Result};
use crate::series::{inverse, Series, MAX_DEGREE};

/// Ambient metric and Christoffel symbols pulled back along the chart.
#[derive(Clone, Debug)]
pub struct AmbientAlong {
    /// `ḡ_AB(F(x))`.
    pub metric: Vec<Vec<Series>>,
    /// `Γ̄^C_AB(F(x))`, indexed `[C][A][B]`.
    pub christoffel: Vec<Vec<Vec<Series>>>,
}

type Vector = Vec<Series>;

/// Normal-valued tensor with `rank` lower tangent indices, stored flat.
#[derive(Clone, Debug)]
pub(crate) struct NTensor {
    pub rank: usize,
    pub data: Vec<Vector>,
}

pub(crate) struct SurfaceSeries<'a> {
    pub n: usize,
    pub d: usize,
    pub df: Vec<Vector>,
    pub g: Vec<Vec<Series>>,
    pub ginv: Vec<Vec<Series>>,
    /// `Γ^k_ij`, indexed `[k][i][j]`.
    pub gamma: Vec<Vec<Vec<Series>>>,
    pub a: NTensor,
    pub h: Vector,
    ambient: Option<&'a AmbientAlong>,
}

fn min_deg(v: &[Series]) -> usize {
    v.iter().map(Series::degree).min().unwrap_or(0)
}

fn trunc(v: &[Series], deg: usize) -> Vector {
    v.iter().map(|s| s.truncate(deg)).collect()
}

impl<'a> SurfaceSeries<'a> {
    pub fn new(chart: &dyn Immersion, x: &[f64], depth: usize, ambient: Option<&'a AmbientAlong>) -> Result<Self> {
        let (n, d) = (chart.source_dim(), chart.ambient_dim());
        if depth > chart.max_order() || depth > MAX_DEGREE {
            return Err(GwError::Capability { requested: depth, supported: chart.max_order().min(MAX_DEGREE) });
        }
        if depth < 2 {
            return Err(GwError::InvalidInput("jet depth must be at least 2".into()));
        }
        let f = chart.expand(x, depth);
        let df: Vec<Vector> = (0..n).map(|i| f.iter().map(|s| s.deriv(i)).collect()).collect();
        let mut s = SurfaceSeries {
            n,
            d,
            df,
            g: Vec::new(),
            ginv: Vec::new(),
            gamma: Vec::new(),
            a: NTensor { rank: 2, data: Vec::new() },
            h: Vec::new(),
            ambient,
        };
        let mut g: Vec<Vec<Series>> = vec![vec![]; n];
        for i in 0..n {
            for j in 0..n {
                let v = if j < i { g[j][i].clone() } else { s.inner(&s.df[i], &s.df[j]) };
                g[i].push(v);
            }
        }
        let scale = (0..n).map(|i| g[i][i].value()).fold(0.0, f64::max);
        let g0 = nalgebra::DMatrix::from_fn(n, n, |i, j| g[i][j].value());
        let min_eig = g0.clone().symmetric_eigenvalues().min();
        if !(min_eig > 1e-12 * scale) {
            return Err(GwError::Degenerate { point: x.to_vec() });
        }
        s.ginv = inverse(&g).ok_or_else(|| GwError::Degenerate { point: x.to_vec() })?;
        s.g = g;

        // ∇̄_i F_j, deg depth-2.
        let mut dd = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v: Vector = s.df[j].iter().map(|c| c.deriv(i)).collect();
                let v = s.amb_correct(v, &s.df[i], &s.df[j]);
                dd[i][j] = v.clone();
                dd[j][i] = v;
            }
        }
        let mut gamma = vec![vec![vec![]; n]; n];
        let low: Vec<Vec<Series>> = (0..n)
            .map(|l| (0..n * n).map(|ij| s.inner(&s.df[l], &dd[ij / n][ij % n])).collect())
            .collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = Series::zero(f[0].space(), depth - 2);
                    for l in 0..n {
                        acc.add_product(1.0, &s.ginv[k][l], &low[l][i * n + j], depth - 2);
                    }
                    gamma[k][i].push(acc);
                }
            }
        }
        s.gamma = gamma;
        let mut a = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = s.normal_part(&dd[i][j]);
                a[i * n + j] = v.clone();
                a[j * n + i] = v;
            }
        }
        s.a = NTensor { rank: 2, data: a };
        s.h = s.trace(&s.a);
        Ok(s)
    }

    fn space(&self) -> &'static crate::series::Space {
        self.df[0][0].space()
    }

    /// `ḡ(u, v)` along the chart.
    pub fn inner(&self, u: &[Series], v: &[Series]) -> Series {
        let deg = min_deg(u).min(min_deg(v));
        let mut acc = Series::zero(self.space(), deg);
        match self.ambient {
            None => {
                for (a, b) in u.iter().zip(v) {
                    acc.add_product(1.0, a, b, deg);
                }
            }
            Some(amb) => {
                for (aa, ua) in u.iter().enumerate() {
                    let mut gv = Series::zero(self.space(), deg);
                    for (bb, vb) in v.iter().enumerate() {
                        gv.add_product(1.0, &amb.metric[aa][bb], vb, deg);
                    }
                    acc.add_product(1.0, ua, &gv, deg);
                }
            }
        }
        acc
    }

    /// Adds `Γ̄(u, w)` to `v`.
    fn amb_correct(&self, mut v: Vector, u: &[Series], w: &[Series]) -> Vector {
        if let Some(amb) = self.ambient {
            let deg = min_deg(&v);
            let uw: Vec<Vec<Series>> =
                u.iter().map(|ua| w.iter().map(|wb| ua.mul_to(wb, deg)).collect()).collect();
            for (c, vc) in v.iter_mut().enumerate() {
                for aa in 0..self.d {
                    for bb in 0..self.d {
                        vc.add_product(1.0, &amb.christoffel[c][aa][bb], &uw[aa][bb], deg);
                    }
                }
            }
        }
        v
    }

    /// Orthogonal projection onto the normal bundle.
    pub fn normal_part(&self, v: &[Series]) -> Vector {
        let deg = min_deg(v);
        let n = self.n;
        let low: Vec<Series> = (0..n).map(|l| self.inner(&trunc(&self.df[l], deg), v)).collect();
        let mut out = v.to_vec();
        for k in 0..n {
            let mut c = Series::zero(self.space(), deg);
            for (l, lo) in low.iter().enumerate() {
                c.add_product(1.0, &self.ginv[k][l], lo, deg);
            }
            for (oa, fa) in out.iter_mut().zip(&self.df[k]) {
                oa.add_product(-1.0, &c, fa, deg);
            }
        }
        out
    }

    /// `ḡ`-trace of a rank-2 normal tensor.
    pub fn trace(&self, t: &NTensor) -> Vector {
        let n = self.n;
        let deg = t.data.iter().map(|v| min_deg(v)).min().unwrap_or(0);
        let mut out = vec![Series::zero(self.space(), deg); self.d];
        for i in 0..n {
            for j in 0..n {
                for (oa, ta) in out.iter_mut().zip(&t.data[i * n + j]) {
                    oa.add_product(1.0, &self.ginv[i][j], ta, deg);
                }
            }
        }
        out
    }

    /// Normal-connection covariant derivative, new index first, result of degree `deg`.
    pub fn cov_deriv(&self, t: &NTensor, deg: usize) -> NTensor {
        let n = self.n;
        let size = n.pow(t.rank as u32);
        let mut data = Vec::with_capacity(n * size);
        for m in 0..n {
            let fm = trunc(&self.df[m], deg);
            for idx in 0..size {
                let src = trunc(&t.data[idx], deg + 1);
                let dv: Vector = src.iter().map(|s| s.deriv(m)).collect();
                let src = trunc(&src, deg);
                let dv = self.amb_correct(dv, &fm, &src);
                let mut v = self.normal_part(&dv);
                // Levi-Civita correction on each tangent slot.
                let mut stride = 1;
                let mut rem = idx;
                let mut slots = Vec::with_capacity(t.rank);
                for _ in 0..t.rank {
                    slots.push(rem % n);
                    rem /= n;
                }
                for (s, &is) in slots.iter().enumerate() {
                    for p in 0..n {
                        let other = idx - is * stride + p * stride;
                        let coef = &self.gamma[p][m][is];
                        for (va, ta) in v.iter_mut().zip(&t.data[other]) {
                            va.add_product(-1.0, coef, ta, deg);
                        }
                    }
                    let _ = s;
                    stride *= n;
                }
                data.push(v);
            }
        }
        NTensor { rank: t.rank + 1, data }
    }

    pub fn vector_tensor(&self, v: Vector) -> NTensor {
        NTensor { rank: 0, data: vec![v] }
    }

    /// Rough normal Laplacian of a normal vector field, to degree `deg`.
    pub fn laplacian(&self, v: &NTensor, deg: usize) -> Vector {
        let d1 = self.cov_deriv(v, deg + 1);
        let d2 = self.cov_deriv(&d1, deg);
        self.trace(&d2)
    }
}

/// Extrinsic data of an immersion at one parameter point.
///
/// Tangent indices refer to the chart coordinates; normal components are
/// taken in the orthonormal frame `normal_frame`. Higher-order fields are
/// present only when the jet was built deep enough.
#[derive(Clone, Debug)]
pub struct ExtrinsicJet {
    pub point: Vec<f64>,
    pub depth: usize,
    pub metric: Vec<Vec<f64>>,
    pub inverse: Vec<Vec<f64>>,
    /// `Γ^k_ij`, indexed `[k][i][j]`.
    pub christoffel: Vec<Vec<Vec<f64>>>,
    /// Coordinate tangent vectors `∂_i F` in ambient coordinates.
    pub tangent: Vec<Vec<f64>>,
    pub normal_frame: Vec<Vec<f64>>,
    /// Ambient metric at the point (identity for flat ambient space).
    pub ambient_metric: Vec<Vec<f64>>,
    /// `A_ij^α`, indexed `[i][j][α]`.
    pub a: Vec<Vec<Vec<f64>>>,
    pub h: Vec<f64>,
    pub grad_perp_h: Vec<Vec<f64>>,
    pub hess_perp_h: Option<Vec<Vec<Vec<f64>>>>,
    pub lap_perp_h: Option<Vec<f64>>,
    /// `Δ⊥A_ij`, available at depth 6.
    pub lap_perp_a: Option<Vec<Vec<Vec<f64>>>>,
    /// `Δ⊥(Δ⊥H + ⟨A_ij,H⟩A^ij − (7/8)|H|²H)`, available at depth 6.
    pub lap_perp_bracket: Option<Vec<f64>>,
    /// Length of the tangential part of the ambient vector behind
    /// `lap_perp_bracket`; zero up to rounding.
    pub bracket_leak: Option<f64>,
}

fn inner_at(gbar: &[Vec<f64>], u: &[f64], v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (a, ua) in u.iter().enumerate() {
        for (b, vb) in v.iter().enumerate() {
            acc += gbar[a][b] * ua * vb;
        }
    }
    acc
}

/// Orthonormal basis of the complement of `tangent`, by modified Gram–Schmidt
/// over the coordinate basis with largest-residual pivoting.
pub(crate) fn normal_completion(gbar: &[Vec<f64>], tangent: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = gbar.len();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for t in tangent {
        let mut v = t.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = inner_at(gbar, b, &v);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nv = inner_at(gbar, &v, &v).sqrt();
        basis.push(v.iter().map(|x| x / nv).collect());
    }
    let mut normals = Vec::new();
    let mut used = vec![false; d];
    while basis.len() < d {
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for a in 0..d {
            if used[a] {
                continue;
            }
            let mut v = vec![0.0; d];
            v[a] = 1.0;
            for _ in 0..2 {
                for b in &basis {
                    let c = inner_at(gbar, b, &v);
                    v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let nv = inner_at(gbar, &v, &v).sqrt();
            if best.as_ref().is_none_or(|b| nv > b.2 * (1.0 + 1e-12)) {
                best = Some((a, v, nv));
            }
        }
        let (a, v, nv) = best.expect("ambient dimension exceeds tangent rank");
        used[a] = true;
        let u: Vec<f64> = v.iter().map(|x| x / nv).collect();
        basis.push(u.clone());
        normals.push(u);
    }
    normals
}

fn values(v: &[Series]) -> Vec<f64> {
    v.iter().map(Series::value).collect()
}

/// Jet of `chart` at `x` in flat ambient space.
pub fn extrinsic_jet(chart: &dyn Immersion, x: &[f64], depth: usize) -> Result<ExtrinsicJet> {
    extrinsic_jet_in(chart, x, depth, None)
}

/// Jet of `chart` at `x`, optionally in a curved ambient metric given along
/// the chart to degree at least `depth - 1`.
pub fn extrinsic_jet_in(
    chart: &dyn Immersion,
    x: &[f64],
    depth: usize,
    ambient: Option<&AmbientAlong>,
) -> Result<ExtrinsicJet> {
    if depth < 3 {
        return Err(GwError::InvalidInput("jet depth must be at least 3".into()));
    }
    let s = SurfaceSeries::new(chart, x, depth, ambient)?;
    let (n, d) = (s.n, s.d);
    let gbar: Vec<Vec<f64>> = match ambient {
        None => (0..d).map(|a| (0..d).map(|b| if a == b { 1.0 } else { 0.0 }).collect()).collect(),
        Some(amb) => amb.metric.iter().map(|r| values(r)).collect(),
    };
    let tangent: Vec<Vec<f64>> = s.df.iter().map(|v| values(v)).collect();
    let frame = normal_completion(&gbar, &tangent);
    let comp = |v: &[Series]| -> Vec<f64> {
        let v0 = values(v);
        frame.iter().map(|nu| inner_at(&gbar, nu, &v0)).collect()
    };
    let comp_t = |t: &NTensor| -> Vec<Vec<f64>> { t.data.iter().map(|v| comp(v)).collect() };
    let reshape2 = |flat: Vec<Vec<f64>>| -> Vec<Vec<Vec<f64>>> { flat.chunks(n).map(|c| c.to_vec()).collect() };

    let h_t = s.vector_tensor(s.h.clone());
    let dh = s.cov_deriv(&h_t, depth - 3);
    let (mut hess, mut lap_h, mut lap_a, mut lap_bracket, mut leak) = (None, None, None, None, None);
    if depth >= 4 {
        let ddh = s.cov_deriv(&dh, depth - 4);
        let lh = s.trace(&ddh);
        hess = Some(reshape2(comp_t(&ddh)));
        if depth >= 6 {
            let da = s.cov_deriv(&s.a, 1);
            let dda = s.cov_deriv(&da, 0);
            // ΔA_ij = g^kl ∇_k∇_l A_ij; the two new slots are the leading ones.
            let mut lap = vec![Vec::new(); n * n];
            for (ij, slot) in lap.iter_mut().enumerate() {
                let mut acc = vec![0.0; d];
                for k in 0..n {
                    for l in 0..n {
                        let gkl = s.ginv[k][l].value();
                        let v = values(&dda.data[l * n * n * n + k * n * n + ij]);
                        acc.iter_mut().zip(&v).for_each(|(x, y)| *x += gkl * y);
                    }
                }
                *slot = frame.iter().map(|nu| inner_at(&gbar, nu, &acc)).collect();
            }
            lap_a = Some(reshape2(lap));
            let lb = values(&bracket_laplacian(&s, &lh));
            let c: Vec<f64> = frame.iter().map(|nu| inner_at(&gbar, nu, &lb)).collect();
            let mut tang = lb.clone();
            for (ca, nu) in c.iter().zip(&frame) {
                tang.iter_mut().zip(nu).for_each(|(t, x)| *t -= ca * x);
            }
            leak = Some(inner_at(&gbar, &tang, &tang).sqrt());
            lap_bracket = Some(c);
        }
        lap_h = Some(comp(&lh));
    }
    let ginv: Vec<Vec<f64>> = s.ginv.iter().map(|r| values(r)).collect();
    Ok(ExtrinsicJet {
        point: x.to_vec(),
        depth,
        metric: s.g.iter().map(|r| values(r)).collect(),
        inverse: ginv,
        christoffel: s.gamma.iter().map(|m| m.iter().map(|r| values(r)).collect()).collect(),
        tangent,
        normal_frame: frame.clone(),
        ambient_metric: gbar.clone(),
        a: reshape2(comp_t(&s.a)),
        h: comp(&s.h),
        grad_perp_h: comp_t(&dh),
        hess_perp_h: hess,
        lap_perp_h: lap_h,
        lap_perp_a: lap_a,
        lap_perp_bracket: lap_bracket,
        bracket_leak: leak,
    })
}

/// `Δ⊥V` for `V = Δ⊥H + ⟨A_ij,H⟩A^ij − (7/8)|H|²H`, from series of degree ≥ 2.
fn bracket_laplacian(s: &SurfaceSeries<'_>, lap_h: &[Series]) -> Vec<Series> {
    let n = s.n;
    let deg = 2;
    let h = trunc(&s.h, deg);
    let mut v = trunc(lap_h, deg);
    for i in 0..n {
        for j in 0..n {
            let aij = trunc(&s.a.data[i * n + j], deg);
            let ah = s.inner(&aij, &h);
            // raise both indices
            let mut raised = vec![Series::zero(s.space(), deg); s.d];
            for k in 0..n {
                for l in 0..n {
                    let c = s.ginv[i][k].mul_to(&s.ginv[j][l], deg);
                    for (ra, akl) in raised.iter_mut().zip(&s.a.data[k * n + l]) {
                        ra.add_product(1.0, &c, akl, deg);
                    }
                }
            }
            for (va, ra) in v.iter_mut().zip(&raised) {
                va.add_product(1.0, &ah, ra, deg);
            }
        }
    }
    let hh = s.inner(&h, &h);
    for (va, ha) in v.iter_mut().zip(&h) {
        va.add_product(-7.0 / 8.0, &hh, ha, deg);
    }
    let t = s.vector_tensor(v);
    s.laplacian(&t, 0)
}

impl ExtrinsicJet {
    pub fn source_dim(&self) -> usize {
        self.metric.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_metric.len()
    }

    pub fn codim(&self) -> usize {
        self.normal_frame.len()
    }

    /// Normal vector with frame components `c`, in ambient coordinates.
    pub fn to_ambient(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient_dim()];
        for (ca, nu) in c.iter().zip(&self.normal_frame) {
            out.iter_mut().zip(nu).for_each(|(o, x)| *o += ca * x);
        }
        out
    }

    /// `ḡ(ν_α, v)` for an ambient vector `v`.
    pub fn normal_components(&self, v: &[f64]) -> Vec<f64> {
        self.normal_frame.iter().map(|nu| inner_at(&self.ambient_metric, nu, v)).collect()
    }

    /// Tangent vectors `e_a = E_ia ∂_i F` of an orthonormal tangent frame,
    /// together with the matrix `E`.
    pub fn orthonormal_tangent(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let n = self.source_dim();
        let g = nalgebra::DMatrix::from_fn(n, n, |i, j| self.metric[i][j]);
        let l = g.cholesky().expect("metric is positive definite").l();
        let e = l.transpose().try_inverse().expect("invertible factor");
        let em: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|a| e[(i, a)]).collect()).collect();
        let frame = (0..n)
            .map(|a| {
                let mut v = vec![0.0; self.ambient_dim()];
                for i in 0..n {
                    v.iter_mut().zip(&self.tangent[i]).for_each(|(o, t)| *o += em[i][a] * t);
                }
                v
            })
            .collect();
        (frame, em)
    }

    /// The same data with tangent indices in an orthonormal tangent frame.
    pub fn orthonormal(&self) -> FrameJet {
        let n = self.source_dim();
        let (frame, e) = self.orthonormal_tangent();
        let low1 = |t: &[Vec<f64>]| -> Vec<Vec<f64>> {
            (0..n)
                .map(|a| {
                    let mut v = vec![0.0; self.codim()];
                    for i in 0..n {
                        v.iter_mut().zip(&t[i]).for_each(|(o, x)| *o += e[i][a] * x);
                    }
                    v
                })
                .collect()
        };
        let low2 = |t: &[Vec<Vec<f64>>]| -> Vec<Vec<Vec<f64>>> {
            (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| {
                            let mut v = vec![0.0; self.codim()];
                            for i in 0..n {
                                for j in 0..n {
                                    let c = e[i][a] * e[j][b];
                                    v.iter_mut().zip(&t[i][j]).for_each(|(o, x)| *o += c * x);
                                }
                            }
                            v
                        })
                        .collect()
                })
                .collect()
        };
        FrameJet {
            tangent_frame: frame,
            normal_frame: self.normal_frame.clone(),
            ambient_metric: self.ambient_metric.clone(),
            a: low2(&self.a),
            h: self.h.clone(),
            grad_h: low1(&self.grad_perp_h),
            hess_h: self.hess_perp_h.as_ref().map(|t| low2(t)),
            lap_h: self.lap_perp_h.clone(),
            lap_a: self.lap_perp_a.as_ref().map(|t| low2(t)),
            lap_bracket: self.lap_perp_bracket.clone(),
        }
    }
}

/// Extrinsic data in orthonormal tangent and normal frames at one point.
#[derive(Clone, Debug)]
pub struct FrameJet {
    pub tangent_frame: Vec<Vec<f64>>,
    pub normal_frame: Vec<Vec<f64>>,
    pub ambient_metric: Vec<Vec<f64>>,
    pub a: Vec<Vec<Vec<f64>>>,
    pub h: Vec<f64>,
    pub grad_h: Vec<Vec<f64>>,
    pub hess_h: Option<Vec<Vec<Vec<f64>>>>,
    pub lap_h: Option<Vec<f64>>,
    pub lap_a: Option<Vec<Vec<Vec<f64>>>>,
    pub lap_bracket: Option<Vec<f64>>,
}

impl FrameJet {
    pub fn n(&self) -> usize {
        self.tangent_frame.len()
    }

    pub fn codim(&self) -> usize {
        self.normal_frame.len()
    }
}

/// Closed-form jet of a product of round spheres.
///
/// The product is homogeneous, so every point looks the same; the jet is
/// taken at the point where each factor sits at its first-axis pole, with an
/// orthonormal tangent basis and the outward unit normals of the factors as
/// normal frame. All covariant derivatives vanish.
pub fn product_jet(p: &ProductOfSpheres) -> ExtrinsicJet {
    let profile = p.profile();
    let n = 4;
    let m = profile.len();
    let d = p.ambient_dim();
    let mut tangent = Vec::new();
    let mut normal_frame = Vec::new();
    let mut factor_of = Vec::new();
    let mut off = 0;
    for (b, &(k, _)) in profile.iter().enumerate() {
        let mut nu = vec![0.0; d];
        nu[off] = 1.0;
        normal_frame.push(nu);
        for j in 1..=k {
            let mut t = vec![0.0; d];
            t[off + j] = 1.0;
            tangent.push(t);
            factor_of.push(b);
        }
        off += k + 1;
    }
    let mut a = vec![vec![vec![0.0; m]; n]; n];
    let mut h = vec![0.0; m];
    for i in 0..n {
        let b = factor_of[i];
        let kappa = -1.0 / profile[b].1;
        a[i][i][b] = kappa;
        h[b] += kappa;
    }
    let id = |k: usize| -> Vec<Vec<f64>> { (0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect() };
    ExtrinsicJet {
        point: vec![0.0; n],
        depth: MAX_DEGREE,
        metric: id(n),
        inverse: id(n),
        christoffel: vec![vec![vec![0.0; n]; n]; n],
        tangent,
        normal_frame,
        ambient_metric: id(d),
        a,
        h,
        grad_perp_h: vec![vec![0.0; m]; n],
        hess_perp_h: Some(vec![vec![vec![0.0; m]; n]; n]),
        lap_perp_h: Some(vec![0.0; m]),
        lap_perp_a: Some(vec![vec![vec![0.0; m]; n]; n]),
        lap_perp_bracket: Some(vec![0.0; m]),
        bracket_leak: Some(0.0),
    }
}
