use super::metric::{AmbientChart, LocalMetric};
use crate::error::{GwError, Result};
use crate::geometry::{extrinsic_jet_in, normal_completion, AmbientAlong, ExtrinsicJet, Immersion};
use crate::series::{inverse, Series};

/// Dense fully covariant tensor on `ℝᵈ`, row-major in its indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub dim: usize,
    pub rank: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(dim: usize, rank: usize) -> Tensor {
        Tensor { dim, rank, data: vec![0.0; dim.pow(rank as u32)] }
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    /// Full contraction with one vector per slot.
    pub fn eval(&self, vecs: &[&[f64]]) -> f64 {
        assert_eq!(vecs.len(), self.rank);
        let mut partial = self.data.clone();
        let mut len = partial.len();
        for v in vecs.iter().rev() {
            len /= self.dim;
            let next: Vec<f64> =
                (0..len).map(|i| (0..self.dim).map(|a| partial[i * self.dim + a] * v[a]).sum()).collect();
            partial = next;
        }
        partial[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Tensor {
        Tensor { dim: self.dim, rank: self.rank, data: self.data.iter().map(|v| v * c).collect() }
    }
}

/// Pointwise curvature of the ambient metric.
#[derive(Clone, Debug)]
pub struct CurvaturePack {
    pub point: Vec<f64>,
    pub metric: Tensor,
    pub metric_inv: Tensor,
    /// `Γ̄^C_AB` stored as `[C][A][B]`.
    pub christoffel: Tensor,
    /// `R̄_ABCD`, with the round sphere giving `g_AC g_BD − g_AD g_BC`.
    pub riemann: Tensor,
    pub ricci: Tensor,
    pub scalar: f64,
    pub schouten: Tensor,
    pub weyl: Tensor,
    pub bach: Tensor,
    /// `∇̄_A P̄_BC`.
    pub nabla_schouten: Tensor,
}

type S = Series;

fn idx3(d: usize, a: usize, b: usize, c: usize) -> usize {
    (a * d + b) * d + c
}

fn idx4(d: usize, a: usize, b: usize, c: usize, e: usize) -> usize {
    ((a * d + b) * d + c) * d + e
}

/// Series-level curvature around a point.
pub(crate) struct LocalCurvature {
    pub d: usize,
    pub point: Vec<f64>,
    pub g: Vec<S>,
    pub ginv: Vec<S>,
    pub gamma: Vec<S>,
    pub riemann: Vec<S>,
    pub ricci: Vec<S>,
    pub scalar: S,
    pub schouten: Vec<S>,
    pub weyl: Vec<S>,
    pub nabla_p: Vec<S>,
    pub bach: Option<Vec<S>>,
}

impl LocalCurvature {
    pub fn new(local: &LocalMetric) -> Result<LocalCurvature> {
        let d = local.metric.len();
        if d < 3 {
            return Err(GwError::Dimension(format!("ambient dimension {d} is below 3")));
        }
        let deg = local.metric[0][0].degree();
        if deg < 2 {
            return Err(GwError::InvalidInput("curvature needs a metric expansion of degree at least 2".into()));
        }
        let space = local.metric[0][0].space();
        let zero = |k: usize| S::zero(space, k);
        let ginv_m = inverse(&local.metric)
            .ok_or_else(|| GwError::InvalidInput(format!("metric not positive definite at {:?}", local.point)))?;
        let g: Vec<S> = local.metric.iter().flatten().cloned().collect();
        let ginv: Vec<S> = ginv_m.into_iter().flatten().collect();
        let mut dg = vec![zero(0); d * d * d];
        for c in 0..d {
            for a in 0..d {
                for b in 0..d {
                    dg[idx3(d, c, a, b)] = g[a * d + b].deriv(c);
                }
            }
        }
        let mut low = vec![zero(0); d * d * d];
        for c in 0..d {
            for a in 0..d {
                for b in a..d {
                    let mut s = &dg[idx3(d, a, b, c)] + &dg[idx3(d, b, a, c)];
                    s.axpy(-1.0, &dg[idx3(d, c, a, b)]);
                    let s = s.scale(0.5);
                    low[idx3(d, c, b, a)] = s.clone();
                    low[idx3(d, c, a, b)] = s;
                }
            }
        }
        let mut gamma = vec![zero(0); d * d * d];
        for c in 0..d {
            for a in 0..d {
                for b in a..d {
                    let mut acc = zero(deg - 1);
                    for e in 0..d {
                        acc.axpy(1.0, &(&ginv[c * d + e] * &low[idx3(d, e, a, b)]));
                    }
                    gamma[idx3(d, c, b, a)] = acc.clone();
                    gamma[idx3(d, c, a, b)] = acc;
                }
            }
        }
        // R^A_BCD = ∂_C Γ^A_DB − ∂_D Γ^A_CB + Γ^A_CE Γ^E_DB − Γ^A_DE Γ^E_CB
        let rdeg = deg - 2;
        let mut rup = vec![zero(rdeg); d * d * d * d];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in (c + 1)..d {
                        let mut s = gamma[idx3(d, a, e, b)].deriv(c);
                        s.axpy(-1.0, &gamma[idx3(d, a, c, b)].deriv(e));
                        for f in 0..d {
                            s.add_product(1.0, &gamma[idx3(d, a, c, f)], &gamma[idx3(d, f, e, b)], rdeg);
                            s.add_product(-1.0, &gamma[idx3(d, a, e, f)], &gamma[idx3(d, f, c, b)], rdeg);
                        }
                        rup[idx4(d, a, b, e, c)] = s.scale(-1.0);
                        rup[idx4(d, a, b, c, e)] = s;
                    }
                }
            }
        }
        // Only the Bach contraction needs the full Riemann tensor beyond its value.
        let wdeg = rdeg.saturating_sub(2);
        let mut riemann = vec![zero(wdeg); d * d * d * d];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let mut acc = zero(wdeg);
                        for f in 0..d {
                            acc.add_product(1.0, &g[a * d + f], &rup[idx4(d, f, b, c, e)], wdeg);
                        }
                        riemann[idx4(d, a, b, c, e)] = acc;
                    }
                }
            }
        }
        let mut ricci = vec![zero(rdeg); d * d];
        for b in 0..d {
            for e in 0..d {
                let mut acc = zero(rdeg);
                for a in 0..d {
                    acc.axpy(1.0, &rup[idx4(d, a, b, a, e)]);
                }
                ricci[b * d + e] = acc;
            }
        }
        let mut scalar = zero(rdeg);
        for b in 0..d {
            for e in 0..d {
                scalar.add_product(1.0, &ginv[b * d + e], &ricci[b * d + e], rdeg);
            }
        }
        let df = d as f64;
        let mut schouten = vec![zero(rdeg); d * d];
        for a in 0..d {
            for b in 0..d {
                let mut s = ricci[a * d + b].clone();
                s.add_product(-1.0 / (2.0 * (df - 1.0)), &scalar, &g[a * d + b], rdeg);
                schouten[a * d + b] = s.scale(1.0 / (df - 2.0));
            }
        }
        let mut weyl = riemann.clone();
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let w = &mut weyl[idx4(d, a, b, c, e)];
                        w.add_product(-1.0, &schouten[a * d + c], &g[b * d + e], wdeg);
                        w.add_product(-1.0, &schouten[b * d + e], &g[a * d + c], wdeg);
                        w.add_product(1.0, &schouten[a * d + e], &g[b * d + c], wdeg);
                        w.add_product(1.0, &schouten[b * d + c], &g[a * d + e], wdeg);
                    }
                }
            }
        }
        let nabla_p = if rdeg >= 1 { covariant_of_sym2(d, &schouten, &gamma, rdeg - 1) } else { Vec::new() };
        let bach = if rdeg >= 2 {
            let ndeg = rdeg - 2;
            let nnp = covariant_of_rank3(d, &nabla_p, &gamma, ndeg);
            let mut pup = vec![zero(ndeg); d * d];
            for e in 0..d {
                for f in 0..d {
                    let mut acc = zero(ndeg);
                    for a in 0..d {
                        for b in 0..d {
                            let t = ginv[e * d + a].mul_to(&ginv[f * d + b], ndeg);
                            acc.add_product(1.0, &t, &schouten[a * d + b], ndeg);
                        }
                    }
                    pup[e * d + f] = acc;
                }
            }
            let mut bach = vec![zero(ndeg); d * d];
            for c in 0..d {
                for e in 0..d {
                    let mut acc = zero(ndeg);
                    for f in 0..d {
                        for a in 0..d {
                            let gi = &ginv[f * d + a];
                            acc.add_product(1.0, gi, &nnp[idx4(d, f, a, c, e)], ndeg);
                            acc.add_product(-1.0, gi, &nnp[idx4(d, f, e, c, a)], ndeg);
                        }
                    }
                    for f in 0..d {
                        for h in 0..d {
                            acc.add_product(1.0, &pup[f * d + h], &weyl[idx4(d, c, f, e, h)], ndeg);
                        }
                    }
                    bach[c * d + e] = acc;
                }
            }
            Some(bach)
        } else {
            None
        };
        Ok(LocalCurvature {
            d,
            point: local.point.clone(),
            g,
            ginv,
            gamma,
            riemann,
            ricci,
            scalar,
            schouten,
            weyl,
            nabla_p,
            bach,
        })
    }

    pub fn pack(&self) -> Result<CurvaturePack> {
        let d = self.d;
        let t = |rank: usize, v: &[S]| Tensor { dim: d, rank, data: v.iter().map(S::value).collect() };
        let bach = self
            .bach
            .as_ref()
            .ok_or_else(|| GwError::InvalidInput("Bach tensor needs a degree-4 metric expansion".into()))?;
        Ok(CurvaturePack {
            point: self.point.clone(),
            metric: t(2, &self.g),
            metric_inv: t(2, &self.ginv),
            christoffel: t(3, &self.gamma),
            riemann: t(4, &self.riemann),
            ricci: t(2, &self.ricci),
            scalar: self.scalar.value(),
            schouten: t(2, &self.schouten),
            weyl: t(4, &self.weyl),
            bach: t(2, bach),
            nabla_schouten: t(3, &self.nabla_p),
        })
    }

    /// Metric and Christoffel symbols composed with a chart expansion `f`
    /// centred at this point, to degrees `deg` and `deg - 1`.
    pub fn along(&self, f: &[Series], deg: usize) -> AmbientAlong {
        let d = self.d;
        let delta: Vec<Series> = f.iter().zip(&self.point).map(|(s, p)| s.add_const(-p)).collect();
        let mut metric: Vec<Vec<Series>> = vec![vec![]; d];
        for a in 0..d {
            for b in 0..d {
                let v = if b < a { metric[b][a].clone() } else { self.g[a * d + b].compose(&delta, deg) };
                metric[a].push(v);
            }
        }
        let cdeg = deg.saturating_sub(1);
        let mut christoffel: Vec<Vec<Vec<Series>>> = vec![vec![Vec::with_capacity(d); d]; d];
        for c in 0..d {
            for a in 0..d {
                for b in 0..d {
                    let v = if b < a {
                        christoffel[c][b][a].clone()
                    } else {
                        self.gamma[idx3(d, c, a, b)].compose(&delta, cdeg)
                    };
                    christoffel[c][a].push(v);
                }
            }
        }
        AmbientAlong { metric, christoffel }
    }
}

/// `∇_A T_BC` for a symmetric 2-tensor.
fn covariant_of_sym2(d: usize, t: &[S], gamma: &[S], deg: usize) -> Vec<S> {
    let space = t[0].space();
    let mut out = vec![S::zero(space, deg); d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in b..d {
                let mut s = t[b * d + c].deriv(a).truncate(deg);
                for e in 0..d {
                    s.add_product(-1.0, &gamma[idx3(d, e, a, b)], &t[e * d + c], deg);
                    s.add_product(-1.0, &gamma[idx3(d, e, a, c)], &t[b * d + e], deg);
                }
                out[idx3(d, a, c, b)] = s.clone();
                out[idx3(d, a, b, c)] = s;
            }
        }
    }
    out
}

/// `∇_F T_ABC` for `T_ABC = ∇_A P_BC`.
fn covariant_of_rank3(d: usize, t: &[S], gamma: &[S], deg: usize) -> Vec<S> {
    let space = t[0].space();
    let mut out = vec![S::zero(space, deg); d * d * d * d];
    for f in 0..d {
        for a in 0..d {
            for b in 0..d {
                for c in b..d {
                    let mut s = t[idx3(d, a, b, c)].deriv(f).truncate(deg);
                    for e in 0..d {
                        s.add_product(-1.0, &gamma[idx3(d, e, f, a)], &t[idx3(d, e, b, c)], deg);
                        s.add_product(-1.0, &gamma[idx3(d, e, f, b)], &t[idx3(d, a, e, c)], deg);
                        s.add_product(-1.0, &gamma[idx3(d, e, f, c)], &t[idx3(d, a, b, e)], deg);
                    }
                    out[idx4(d, f, a, c, b)] = s.clone();
                    out[idx4(d, f, a, b, c)] = s;
                }
            }
        }
    }
    out
}

impl CurvaturePack {
    /// Curvature of Euclidean space.
    pub fn flat(point: &[f64]) -> CurvaturePack {
        let d = point.len();
        let mut metric = Tensor::zeros(d, 2);
        for a in 0..d {
            metric.set(&[a, a], 1.0);
        }
        CurvaturePack {
            point: point.to_vec(),
            metric_inv: metric.clone(),
            metric,
            christoffel: Tensor::zeros(d, 3),
            riemann: Tensor::zeros(d, 4),
            ricci: Tensor::zeros(d, 2),
            scalar: 0.0,
            schouten: Tensor::zeros(d, 2),
            weyl: Tensor::zeros(d, 4),
            bach: Tensor::zeros(d, 2),
            nabla_schouten: Tensor::zeros(d, 3),
        }
    }
}

/// Jet of `sigma` at `x` inside the ambient chart, with the ambient
/// curvature at the image point.
pub fn ambient_jet(
    sigma: &dyn Immersion,
    ambient: &AmbientChart,
    x: &[f64],
    depth: usize,
) -> Result<(ExtrinsicJet, CurvaturePack)> {
    if sigma.ambient_dim() != ambient.dim() {
        return Err(GwError::Dimension(format!(
            "submanifold lives in dimension {}, ambient chart has dimension {}",
            sigma.ambient_dim(),
            ambient.dim()
        )));
    }
    let f = sigma.expand(x, depth);
    let p0: Vec<f64> = f.iter().map(Series::value).collect();
    if ambient.is_flat() {
        return Ok((extrinsic_jet_in(sigma, x, depth, None)?, CurvaturePack::flat(&p0)));
    }
    let local = ambient.expand(&p0, 4.max(depth - 1))?;
    let lc = LocalCurvature::new(&local)?;
    let along = lc.along(&f, depth - 1);
    let jet = extrinsic_jet_in(sigma, x, depth, Some(&along))?;
    Ok((jet, lc.pack()?))
}

/// Curvature of `chart` at `p`.
pub fn curvature_pack(chart: &AmbientChart, p: &[f64]) -> Result<CurvaturePack> {
    let local = chart.expand(p, 4)?;
    LocalCurvature::new(&local)?.pack()
}

/// `ḡ`-orthonormal frame at a point of `Σ`: the tangent frame comes from
/// Gram–Schmidt on the coordinate vectors, the normal frame from the
/// deterministic completion used throughout the crate.
#[derive(Clone, Debug)]
pub struct AdaptedFrame {
    pub tangent: Vec<Vec<f64>>,
    pub normal: Vec<Vec<f64>>,
}

pub fn adapted_frame(sigma: &dyn Immersion, chart: &AmbientChart, x: &[f64]) -> Result<AdaptedFrame> {
    let f = sigma.expand(x, 1);
    let n = sigma.source_dim();
    let p: Vec<f64> = f.iter().map(Series::value).collect();
    let gbar = chart.metric(&p)?;
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0u8; n];
            e[i] = 1;
            f.iter().map(|s| s.coeff(&e)).collect()
        })
        .collect();
    let normal = normal_completion(&gbar, &cols);
    let mut tangent: Vec<Vec<f64>> = Vec::new();
    let ip = |u: &[f64], v: &[f64]| -> f64 {
        let mut acc = 0.0;
        for (a, ua) in u.iter().enumerate() {
            for (b, vb) in v.iter().enumerate() {
                acc += gbar[a][b] * ua * vb;
            }
        }
        acc
    };
    for c in &cols {
        let mut v = c.clone();
        for _ in 0..2 {
            for t in &tangent {
                let k = ip(t, &v);
                v.iter_mut().zip(t).for_each(|(x, y)| *x -= k * y);
            }
        }
        let nv = ip(&v, &v).sqrt();
        if !(nv > 1e-10) {
            return Err(GwError::Degenerate { point: x.to_vec() });
        }
        tangent.push(v.into_iter().map(|x| x / nv).collect());
    }
    Ok(AdaptedFrame { tangent, normal })
}

/// `g⁽²⁾ = −P̄` and `g⁽⁴⁾ = B̄/(4(4−d)) + ¼ P̄_CE ḡ^EF P̄_DF`.
pub fn fg_coefficients(pack: &CurvaturePack) -> Result<(Tensor, Tensor)> {
    let d = pack.metric.dim;
    if d == 4 {
        return Err(GwError::Dimension("the fourth-order coefficient has a pole at d = 4".into()));
    }
    let g2 = pack.schouten.scaled(-1.0);
    let mut g4 = pack.bach.scaled(1.0 / (4.0 * (4.0 - d as f64)));
    for c in 0..d {
        for e in 0..d {
            let mut acc = 0.0;
            for a in 0..d {
                for b in 0..d {
                    acc += pack.schouten.get(&[c, a]) * pack.metric_inv.get(&[a, b]) * pack.schouten.get(&[e, b]);
                }
            }
            let v = g4.get(&[c, e]) + 0.25 * acc;
            g4.set(&[c, e], v);
        }
    }
    Ok((g2, g4))
}
