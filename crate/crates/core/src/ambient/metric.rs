use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{GwError, Result};
use crate::series::{Series, Space};

/// Smooth function used as a conformal exponent `ω` in `e^{2ω}·ḡ`.
#[derive(Clone, Debug, PartialEq)]
pub enum Omega {
    Zero,
    /// `ln 2 − ln(1 + |x|²)`: stereographic chart of the unit round sphere.
    RoundSphere,
    /// `ln 2 − ln(1 − |x|²)`: Poincaré ball chart of hyperbolic space.
    HyperbolicBall,
    /// `amp · sin(x_axis)`.
    Sine { amp: f64, axis: usize },
    /// `amp · |x|²`.
    Quadratic { amp: f64 },
    /// `amp · exp(−|x − center|² / width²)`.
    Gaussian { amp: f64, center: Vec<f64>, width: f64 },
    Sum(Vec<Omega>),
}

impl Omega {
    /// Catalogue of named exponents accepted on the command line.
    pub fn builtin(id: &str) -> Option<Omega> {
        Some(match id {
            "zero" => Omega::Zero,
            "sin1" => Omega::Sine { amp: 0.1, axis: 0 },
            "sin2" => Omega::Sine { amp: 0.1, axis: 1 },
            "quad" => Omega::Quadratic { amp: 0.05 },
            "bump" => Omega::Gaussian { amp: 0.2, center: vec![0.3, -0.2, 0.1], width: 1.0 },
            "mixed" => Omega::Sum(vec![Omega::Sine { amp: 0.1, axis: 1 }, Omega::Quadratic { amp: 0.03 }]),
            _ => return None,
        })
    }

    pub fn builtin_ids() -> &'static [&'static str] {
        &["zero", "sin1", "sin2", "quad", "bump", "mixed"]
    }

    fn series(&self, y: &[Series]) -> Result<Series> {
        let space = y[0].space();
        let deg = y[0].degree();
        let r2 = || y.iter().fold(Series::zero(space, deg), |mut acc, s| {
            acc.axpy(1.0, &(s * s));
            acc
        });
        Ok(match self {
            Omega::Zero => Series::zero(space, deg),
            Omega::RoundSphere => r2().add_const(1.0).ln().scale(-1.0).add_const(std::f64::consts::LN_2),
            Omega::HyperbolicBall => {
                let q = r2().scale(-1.0).add_const(1.0);
                if !(q.value() > 0.0) {
                    return Err(GwError::InvalidInput("point outside the hyperbolic ball".into()));
                }
                q.ln().scale(-1.0).add_const(std::f64::consts::LN_2)
            }
            Omega::Sine { amp, axis } => y[*axis].sin().scale(*amp),
            Omega::Quadratic { amp } => r2().scale(*amp),
            Omega::Gaussian { amp, center, width } => {
                let mut q = Series::zero(space, deg);
                for (a, s) in y.iter().enumerate() {
                    let c = center.get(a).copied().unwrap_or(0.0);
                    let t = s.add_const(-c);
                    q.axpy(1.0, &(&t * &t));
                }
                q.scale(-1.0 / (width * width)).exp().scale(*amp)
            }
            Omega::Sum(parts) => {
                let mut acc = Series::zero(space, deg);
                for p in parts {
                    acc.axpy(1.0, &p.series(y)?);
                }
                acc
            }
        })
    }

    /// Value at a point.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let space = Space::get(x.len());
        let y: Vec<Series> = x.iter().map(|&v| Series::constant(space, 0, v)).collect();
        Ok(self.series(&y)?.value())
    }
}

/// One symmetric perturbation mode `coeff · cos(freq·x + phase)` added to
/// the `(a, b)` and `(b, a)` metric entries.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricMode {
    pub a: usize,
    pub b: usize,
    pub coeff: f64,
    pub freq: Vec<f64>,
    pub phase: f64,
}

/// Metric evaluated pointwise, differentiated by finite differences.
pub type MetricFn = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;

/// A coordinate chart of the ambient manifold `(Mᵈ, ḡ)`.
#[derive(Clone)]
pub enum AmbientChart {
    /// Euclidean `ℝᵈ`.
    Flat { dim: usize },
    /// `e^{2ω}` times the Euclidean metric.
    ConformallyFlat { dim: usize, omega: Omega },
    /// `δ + Σ modes`, generically with nonzero Weyl tensor.
    Deformed { dim: usize, modes: Vec<MetricMode> },
    /// `e^{2ω}` times another chart's metric.
    Rescaled { base: Box<AmbientChart>, omega: Omega },
    /// Metric known only through evaluations; derivatives up to order four
    /// come from fourth-order central differences with one Richardson step.
    Sampled { dim: usize, metric: MetricFn, step: f64 },
}

impl fmt::Debug for AmbientChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmbientChart::Flat { dim } => write!(f, "Flat({dim})"),
            AmbientChart::ConformallyFlat { dim, omega } => write!(f, "ConformallyFlat({dim}, {omega:?})"),
            AmbientChart::Deformed { dim, modes } => write!(f, "Deformed({dim}, {} modes)", modes.len()),
            AmbientChart::Rescaled { base, omega } => write!(f, "Rescaled({base:?}, {omega:?})"),
            AmbientChart::Sampled { dim, step, .. } => write!(f, "Sampled({dim}, step {step})"),
        }
    }
}

/// Taylor expansion of the metric around a point, in `dim` variables.
#[derive(Clone, Debug)]
pub struct LocalMetric {
    pub point: Vec<f64>,
    pub metric: Vec<Vec<Series>>,
}

impl AmbientChart {
    pub fn flat(dim: usize) -> AmbientChart {
        AmbientChart::Flat { dim }
    }

    /// Stereographic chart of the unit round `Sᵈ`; the unit sphere `|x| = 1`
    /// is a totally geodesic equator.
    pub fn round_sphere(dim: usize) -> AmbientChart {
        AmbientChart::ConformallyFlat { dim, omega: Omega::RoundSphere }
    }

    /// Poincaré ball chart of hyperbolic space of curvature −1.
    pub fn hyperbolic(dim: usize) -> AmbientChart {
        AmbientChart::ConformallyFlat { dim, omega: Omega::HyperbolicBall }
    }

    pub fn conformally_flat(dim: usize, omega: Omega) -> AmbientChart {
        AmbientChart::ConformallyFlat { dim, omega }
    }

    /// `e^{2ω}` times this metric.
    pub fn rescaled(&self, omega: Omega) -> AmbientChart {
        AmbientChart::Rescaled { base: Box::new(self.clone()), omega }
    }

    /// Finite-difference chart with the default step `1e-2`.
    pub fn sampled(dim: usize, metric: MetricFn) -> AmbientChart {
        AmbientChart::Sampled { dim, metric, step: 1e-2 }
    }

    pub fn dim(&self) -> usize {
        match self {
            AmbientChart::Flat { dim }
            | AmbientChart::ConformallyFlat { dim, .. }
            | AmbientChart::Deformed { dim, .. }
            | AmbientChart::Sampled { dim, .. } => *dim,
            AmbientChart::Rescaled { base, .. } => base.dim(),
        }
    }

    pub fn is_flat(&self) -> bool {
        match self {
            AmbientChart::Flat { .. } => true,
            AmbientChart::ConformallyFlat { omega, .. } => *omega == Omega::Zero,
            _ => false,
        }
    }

    /// Maximum Taylor degree available from [`AmbientChart::expand`].
    pub fn max_degree(&self) -> usize {
        match self {
            AmbientChart::Sampled { .. } => 4,
            AmbientChart::Rescaled { base, .. } => base.max_degree(),
            _ => crate::series::MAX_DEGREE,
        }
    }

    fn metric_series(&self, y: &[Series]) -> Result<Vec<Vec<Series>>> {
        let d = y.len();
        let space = y[0].space();
        let deg = y[0].degree();
        let identity =
            |c: &Series| -> Vec<Vec<Series>> {
                (0..d)
                    .map(|a| (0..d).map(|b| if a == b { c.clone() } else { Series::zero(space, deg) }).collect())
                    .collect()
            };
        match self {
            AmbientChart::Flat { .. } => Ok(identity(&Series::constant(space, deg, 1.0))),
            AmbientChart::ConformallyFlat { omega, .. } => {
                let e = omega.series(y)?.scale(2.0).exp();
                Ok(identity(&e))
            }
            AmbientChart::Deformed { modes, .. } => {
                let mut g = identity(&Series::constant(space, deg, 1.0));
                for m in modes {
                    let mut arg = Series::constant(space, deg, m.phase);
                    for (ya, w) in y.iter().zip(&m.freq) {
                        arg.axpy(*w, ya);
                    }
                    let c = arg.cos().scale(m.coeff);
                    g[m.a][m.b].axpy(1.0, &c);
                    if m.a != m.b {
                        g[m.b][m.a].axpy(1.0, &c);
                    }
                }
                Ok(g)
            }
            AmbientChart::Rescaled { base, omega } => {
                let e = omega.series(y)?.scale(2.0).exp();
                Ok(base.metric_series(y)?.iter().map(|r| r.iter().map(|s| s * &e).collect()).collect())
            }
            AmbientChart::Sampled { .. } => unreachable!("sampled charts are expanded by finite differences"),
        }
    }

    /// Metric matrix at a point.
    pub fn metric(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        if let AmbientChart::Sampled { metric, .. } = self {
            return Ok(metric(x));
        }
        let space = Space::get(x.len());
        let y: Vec<Series> = x.iter().map(|&v| Series::constant(space, 0, v)).collect();
        Ok(self.metric_series(&y)?.iter().map(|r| r.iter().map(Series::value).collect()).collect())
    }

    /// Taylor expansion of the metric around `p` to degree `deg`.
    pub fn expand(&self, p: &[f64], deg: usize) -> Result<LocalMetric> {
        let d = self.dim();
        if p.len() != d {
            return Err(GwError::Dimension(format!("point has {} coordinates, chart has {d}", p.len())));
        }
        if deg > self.max_degree() {
            return Err(GwError::Capability { requested: deg, supported: self.max_degree() });
        }
        let metric = match self {
            AmbientChart::Sampled { metric, step, .. } => fd_expansion(metric.as_ref(), p, deg, *step),
            AmbientChart::Rescaled { base, omega } if base.max_degree() < crate::series::MAX_DEGREE => {
                let inner = base.expand(p, deg)?;
                let space = Space::get(d);
                let y: Vec<Series> = (0..d).map(|a| Series::variable(space, deg, a, p[a])).collect();
                let e = omega.series(&y)?.scale(2.0).exp();
                inner.metric.iter().map(|r| r.iter().map(|s| s * &e).collect()).collect()
            }
            _ => {
                let space = Space::get(d);
                let y: Vec<Series> = (0..d).map(|a| Series::variable(space, deg, a, p[a])).collect();
                self.metric_series(&y)?
            }
        };
        for a in 0..d {
            for b in 0..d {
                if !metric[a][b].value().is_finite() {
                    return Err(GwError::InvalidInput(format!("metric is not finite at {p:?}")));
                }
            }
        }
        Ok(LocalMetric { point: p.to_vec(), metric })
    }
}

const STENCILS: [&[(i32, f64)]; 5] = [
    &[(0, 1.0)],
    &[(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)],
    &[(-2, -1.0 / 12.0), (-1, 16.0 / 12.0), (0, -30.0 / 12.0), (1, 16.0 / 12.0), (2, -1.0 / 12.0)],
    &[(-3, 1.0 / 8.0), (-2, -1.0), (-1, 13.0 / 8.0), (1, -13.0 / 8.0), (2, 1.0), (3, -1.0 / 8.0)],
    &[
        (-3, -1.0 / 6.0),
        (-2, 2.0),
        (-1, -13.0 / 2.0),
        (0, 28.0 / 3.0),
        (1, -13.0 / 2.0),
        (2, 2.0),
        (3, -1.0 / 6.0),
    ],
];

/// Taylor expansion (degree ≤ 4) of a sampled metric by tensor-product
/// fourth-order central stencils at steps `h` and `h/2`, combined by one
/// Richardson extrapolation.
pub fn fd_expansion(metric: &(dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync), p: &[f64], deg: usize, h: f64) -> Vec<Vec<Series>> {
    let d = p.len();
    let space = Space::get(d);
    let len = space.len(deg);
    let mut cache: HashMap<(Vec<i32>, u8), Vec<Vec<f64>>> = HashMap::new();
    let mut coeffs = vec![vec![vec![0.0; len]; d]; d];
    for idx in 0..len {
        let alpha = space.exponents(idx).to_vec();
        let mut fact = 1.0;
        for &a in &alpha {
            fact *= (1..=a as u32).product::<u32>() as f64;
        }
        let mut est = [vec![vec![0.0; d]; d], vec![vec![0.0; d]; d]];
        for (level, e) in est.iter_mut().enumerate() {
            let step = h / (1 << level) as f64;
            // Iterate over the tensor product of the per-axis stencils.
            let axes: Vec<&[(i32, f64)]> = alpha.iter().map(|&a| STENCILS[a as usize]).collect();
            let mut counter = vec![0usize; d];
            loop {
                let mut off = vec![0i32; d];
                let mut w = 1.0;
                for a in 0..d {
                    let (o, c) = axes[a][counter[a]];
                    off[a] = o;
                    w *= c;
                }
                let m = cache.entry((off.clone(), level as u8)).or_insert_with(|| {
                    let x: Vec<f64> = p.iter().zip(&off).map(|(pa, &o)| pa + o as f64 * step).collect();
                    metric(&x)
                });
                for a in 0..d {
                    for b in 0..d {
                        e[a][b] += w * m[a][b];
                    }
                }
                let mut ax = 0;
                loop {
                    if ax == d {
                        break;
                    }
                    counter[ax] += 1;
                    if counter[ax] < axes[ax].len() {
                        break;
                    }
                    counter[ax] = 0;
                    ax += 1;
                }
                if ax == d {
                    break;
                }
            }
            let order: i32 = alpha.iter().map(|&a| a as i32).sum();
            let scale = step.powi(order);
            e.iter_mut().flatten().for_each(|v| *v /= scale);
        }
        let order: usize = alpha.iter().map(|&a| a as usize).sum();
        for a in 0..d {
            for b in 0..d {
                let v = if order == 0 { est[0][a][b] } else { (16.0 * est[1][a][b] - est[0][a][b]) / 15.0 };
                coeffs[a][b][idx] = v / fact;
            }
        }
    }
    coeffs
        .into_iter()
        .map(|r| r.into_iter().map(|c| Series::from_coeffs(space, deg, c)).collect())
        .collect()
}
