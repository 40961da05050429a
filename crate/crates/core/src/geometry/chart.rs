use crate::error::{GwError, Result};
use crate::series::{Series, Space, MAX_DEGREE};

/// How a parameter axis is sampled by the quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// Angle in `[0, 2π)`, trapezoid rule.
    Periodic,
    /// Polar angle `θ ∈ (0, π)`, Gauss–Legendre in `cos θ`.
    Polar,
    /// Hopf angle `η ∈ (0, π/2)` of a three-sphere, Gauss–Legendre in `cos 2η`.
    Hopf,
    /// Non-compact line parameter. Charts with such an axis cannot be integrated.
    Line,
}

/// A smooth parametrized submanifold `F: U ⊂ ℝⁿ → ℝᵈ` with exact derivatives.
///
/// The whole submanifold is covered by one parameter box (up to a null set),
/// described by [`Immersion::axes`].
pub trait Immersion: Send + Sync {
    fn source_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;

    fn chart_count(&self) -> usize {
        1
    }

    /// Highest derivative order the chart can deliver.
    fn max_order(&self) -> usize {
        MAX_DEGREE
    }

    /// Taylor expansion of `F` around `x` to total degree `deg`, one series per
    /// ambient coordinate, in `source_dim` variables.
    fn expand(&self, x: &[f64], deg: usize) -> Vec<Series>;

    fn axes(&self) -> Vec<Axis>;

    /// Axes along which every integrand of interest is constant, so a single
    /// quadrature node suffices. Default: none.
    fn symmetric_axes(&self) -> Vec<bool> {
        vec![false; self.source_dim()]
    }

    fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        self.expand(x, 0).iter().map(Series::value).collect()
    }

    /// `∂^α F(x)` for a multi-index `alpha` of order at most [`Immersion::max_order`].
    fn derivative(&self, x: &[f64], alpha: &[u8]) -> Result<Vec<f64>> {
        let order: usize = alpha.iter().map(|&a| a as usize).sum();
        if order > self.max_order() {
            return Err(GwError::Capability { requested: order, supported: self.max_order() });
        }
        Ok(self.expand(x, order).iter().map(|s| s.derivative_value(alpha)).collect())
    }
}

/// One factor of a product chart.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    /// Round sphere `Sᵏ(r) ⊂ ℝᵏ⁺¹`, `1 ≤ k ≤ 4`.
    Sphere { k: usize, radius: f64 },
    /// A straight line `ℝ ⊂ ℝ`.
    Line,
}

impl Factor {
    fn source_dim(&self) -> usize {
        match self {
            Factor::Sphere { k, .. } => *k,
            Factor::Line => 1,
        }
    }

    fn ambient_dim(&self) -> usize {
        match self {
            Factor::Sphere { k, .. } => k + 1,
            Factor::Line => 1,
        }
    }

    fn axes(&self) -> Vec<Axis> {
        match self {
            Factor::Sphere { k: 1, .. } => vec![Axis::Periodic],
            Factor::Sphere { k: 2, .. } => vec![Axis::Polar, Axis::Periodic],
            Factor::Sphere { k: 3, .. } => vec![Axis::Hopf, Axis::Periodic, Axis::Periodic],
            Factor::Sphere { .. } => vec![Axis::Polar, Axis::Hopf, Axis::Periodic, Axis::Periodic],
            Factor::Line => vec![Axis::Line],
        }
    }

    /// Embedding of this factor in terms of its own parameter series.
    fn embed(&self, t: &[Series]) -> Vec<Series> {
        match *self {
            Factor::Line => vec![t[0].clone()],
            Factor::Sphere { k, radius } => {
                let unit = match k {
                    1 => vec![t[0].cos(), t[0].sin()],
                    2 => {
                        let s = t[0].sin();
                        vec![t[0].cos(), &s * &t[1].cos(), &s * &t[1].sin()]
                    }
                    3 => hopf(&t[0], &t[1], &t[2]),
                    _ => {
                        let s = t[0].sin();
                        let mut out = vec![t[0].cos()];
                        out.extend(hopf(&t[1], &t[2], &t[3]).iter().map(|h| &s * h));
                        out
                    }
                };
                unit.iter().map(|u| u.scale(radius)).collect()
            }
        }
    }
}

fn hopf(eta: &Series, p1: &Series, p2: &Series) -> Vec<Series> {
    let (c, s) = (eta.cos(), eta.sin());
    vec![&c * &p1.cos(), &c * &p1.sin(), &s * &p2.cos(), &s * &p2.sin()]
}

/// Direction attached to a term of a [`VectorField`].
#[derive(Clone, Debug, PartialEq)]
pub enum Direction {
    /// Unit outward radial direction of the given sphere factor.
    Radial(usize),
    /// Constant ambient coordinate direction.
    Coordinate(usize),
}

/// `coeff · cos(Σ_A w_A y_A + phase)` where `y` is the unperturbed embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode {
    pub coeff: f64,
    pub freq: Vec<(usize, f64)>,
    pub phase: f64,
}

impl Mode {
    pub fn constant(coeff: f64) -> Mode {
        Mode { coeff, freq: Vec::new(), phase: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldTerm {
    pub profile: Vec<Mode>,
    pub direction: Direction,
}

/// Smooth ambient vector field along a product chart, written as a function
/// of the unperturbed embedding point so that it is smooth on the closed
/// manifold whatever the parametrization singularities.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VectorField {
    pub terms: Vec<FieldTerm>,
}

impl VectorField {
    pub fn zero() -> VectorField {
        VectorField::default()
    }

    pub fn single(profile: Vec<Mode>, direction: Direction) -> VectorField {
        VectorField { terms: vec![FieldTerm { profile, direction }] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.profile.iter().all(|m| m.coeff == 0.0))
    }

    pub fn scaled(&self, h: f64) -> VectorField {
        let mut out = self.clone();
        for t in &mut out.terms {
            for m in &mut t.profile {
                m.coeff *= h;
            }
        }
        out
    }

    fn series(&self, y: &[Series], layout: &Layout, deg: usize) -> Vec<Series> {
        let space = y[0].space();
        let mut out = vec![Series::zero(space, deg); y.len()];
        for term in &self.terms {
            let mut prof = Series::zero(space, deg);
            for m in &term.profile {
                let mut arg = Series::constant(space, deg, m.phase);
                for &(a, w) in &m.freq {
                    arg.axpy(w, &y[a]);
                }
                prof.axpy(m.coeff, &arg.cos());
            }
            match term.direction {
                Direction::Coordinate(a) => out[a].axpy(1.0, &prof),
                Direction::Radial(b) => {
                    let (off, size) = (layout.ambient_off[b], layout.ambient_size[b]);
                    let r = match layout.factors[b] {
                        Factor::Sphere { radius, .. } => radius,
                        Factor::Line => 1.0,
                    };
                    for a in off..off + size {
                        let t = prof.mul_to(&y[a], deg);
                        out[a].axpy(1.0 / r, &t);
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
struct Layout {
    factors: Vec<Factor>,
    source_off: Vec<usize>,
    ambient_off: Vec<usize>,
    ambient_size: Vec<usize>,
}

/// Product of round spheres and lines, optionally padded with extra ambient
/// coordinates, perturbed, and linearly rescaled:
/// `F = L·(y + P(y)) + Q(y)` with `y` the round product embedding.
#[derive(Clone, Debug)]
pub struct ProductChart {
    layout: Layout,
    n: usize,
    d: usize,
    pre: VectorField,
    scale: Option<Vec<f64>>,
    post: VectorField,
}

impl ProductChart {
    pub fn new(factors: Vec<Factor>, pad: usize) -> Result<ProductChart> {
        if factors.is_empty() {
            return Err(GwError::InvalidInput("a product chart needs at least one factor".into()));
        }
        let (mut source_off, mut ambient_off, mut ambient_size) = (vec![], vec![], vec![]);
        let (mut n, mut d) = (0, 0);
        for f in &factors {
            if let Factor::Sphere { k, radius } = *f {
                if !(1..=4).contains(&k) {
                    return Err(GwError::InvalidInput(format!("sphere dimension {k} not in 1..=4")));
                }
                if !(radius >= 1e-8) || !radius.is_finite() {
                    return Err(GwError::InvalidInput(format!("radius {radius} must be at least 1e-8")));
                }
            }
            source_off.push(n);
            ambient_off.push(d);
            ambient_size.push(f.ambient_dim());
            n += f.source_dim();
            d += f.ambient_dim();
        }
        if n != 2 && n != 4 {
            return Err(GwError::InvalidInput(format!("source dimension {n} must be 2 or 4")));
        }
        Ok(ProductChart {
            layout: Layout { factors, source_off, ambient_off, ambient_size },
            n,
            d: d + pad,
            pre: VectorField::zero(),
            scale: None,
            post: VectorField::zero(),
        })
    }

    /// Round `Sᵏ(r) ⊂ ℝᵏ⁺¹`.
    pub fn sphere(k: usize, radius: f64) -> Result<ProductChart> {
        ProductChart::new(vec![Factor::Sphere { k, radius }], 0)
    }

    /// Flat `ℝⁿ ⊂ ℝᵈ`.
    pub fn plane(n: usize, d: usize) -> Result<ProductChart> {
        if d <= n {
            return Err(GwError::InvalidInput("plane needs codimension at least one".into()));
        }
        ProductChart::new(vec![Factor::Line; n], d - n)
    }

    pub fn product(spheres: &[(usize, f64)]) -> Result<ProductChart> {
        ProductChart::new(spheres.iter().map(|&(k, radius)| Factor::Sphere { k, radius }).collect(), 0)
    }

    /// Ellipsoid `Σ x_A² / a_A² = 1` in `ℝ⁵`.
    pub fn ellipsoid(axes: &[f64]) -> Result<ProductChart> {
        if axes.len() != 5 {
            return Err(GwError::InvalidInput("an ellipsoid needs five semi-axes".into()));
        }
        ProductChart::sphere(4, 1.0)?.with_linear(axes.to_vec())
    }

    /// Appends zero ambient coordinates.
    pub fn padded(mut self, extra: usize) -> ProductChart {
        self.d += extra;
        self
    }

    /// Diagonal linear map applied after the inner perturbation.
    pub fn with_linear(mut self, diag: Vec<f64>) -> Result<ProductChart> {
        if diag.len() != self.d || diag.iter().any(|a| !(a.abs() >= 1e-8)) {
            return Err(GwError::InvalidInput("linear scaling must be nonzero, one entry per ambient axis".into()));
        }
        self.scale = Some(diag);
        Ok(self)
    }

    /// Uniform dilation by `lambda`.
    pub fn dilated(self, lambda: f64) -> Result<ProductChart> {
        let d = self.d;
        match self.scale.clone() {
            Some(s) => self.with_linear(s.iter().map(|a| a * lambda).collect()),
            None => self.with_linear(vec![lambda; d]),
        }
    }

    /// Adds `field` to the round embedding before the linear map.
    pub fn perturbed(mut self, field: VectorField) -> ProductChart {
        self.pre.terms.extend(field.terms);
        self
    }

    /// `F + h·X`.
    pub fn displaced(&self, field: &VectorField, h: f64) -> ProductChart {
        let mut out = self.clone();
        out.post.terms.extend(field.scaled(h).terms);
        out
    }

    pub fn factors(&self) -> &[Factor] {
        &self.layout.factors
    }

    pub fn is_round(&self) -> bool {
        self.pre.is_zero() && self.post.is_zero()
    }

    /// Ambient coordinate range of factor `b`.
    pub fn factor_block(&self, b: usize) -> std::ops::Range<usize> {
        let off = self.layout.ambient_off[b];
        off..off + self.layout.ambient_size[b]
    }

    pub fn factor_axes(&self, b: usize) -> std::ops::Range<usize> {
        let off = self.layout.source_off[b];
        off..off + self.layout.factors[b].source_dim()
    }

    /// The unperturbed round embedding `y` around `x`.
    pub fn base_series(&self, x: &[f64], deg: usize) -> Vec<Series> {
        let space = Space::get(self.n);
        let vars: Vec<Series> = (0..self.n).map(|i| Series::variable(space, deg, i, x[i])).collect();
        let mut y = Vec::with_capacity(self.d);
        for (b, f) in self.layout.factors.iter().enumerate() {
            let off = self.layout.source_off[b];
            y.extend(f.embed(&vars[off..off + f.source_dim()]));
        }
        while y.len() < self.d {
            y.push(Series::zero(space, deg));
        }
        y
    }

    /// Values of a field along the chart at `x`.
    pub fn field_at(&self, field: &VectorField, x: &[f64]) -> Vec<f64> {
        let y = self.base_series(x, 0);
        field.series(&y, &self.layout, 0).iter().map(Series::value).collect()
    }
}

impl Immersion for ProductChart {
    fn source_dim(&self) -> usize {
        self.n
    }

    fn ambient_dim(&self) -> usize {
        self.d
    }

    fn expand(&self, x: &[f64], deg: usize) -> Vec<Series> {
        let y = self.base_series(x, deg);
        let mut f = y.clone();
        if !self.pre.terms.is_empty() {
            for (fa, pa) in f.iter_mut().zip(self.pre.series(&y, &self.layout, deg)) {
                fa.axpy(1.0, &pa);
            }
        }
        if let Some(diag) = &self.scale {
            for (fa, &a) in f.iter_mut().zip(diag) {
                *fa = fa.scale(a);
            }
        }
        if !self.post.terms.is_empty() {
            for (fa, qa) in f.iter_mut().zip(self.post.series(&y, &self.layout, deg)) {
                fa.axpy(1.0, &qa);
            }
        }
        f
    }

    fn axes(&self) -> Vec<Axis> {
        self.layout.factors.iter().flat_map(Factor::axes).collect()
    }

    fn symmetric_axes(&self) -> Vec<bool> {
        let uniform = match &self.scale {
            None => true,
            Some(s) => s.iter().all(|a| (a - s[0]).abs() <= 1e-15 * s[0].abs()),
        };
        vec![uniform && self.is_round(); self.n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_embedding_is_on_the_sphere() {
        let c = ProductChart::sphere(4, 2.0).unwrap();
        let p = c.evaluate(&[0.3, 0.7, 1.1, -2.0]);
        let r2: f64 = p.iter().map(|v| v * v).sum();
        assert!((r2 - 4.0).abs() < 1e-14);
    }

    #[test]
    fn zero_multi_index_is_evaluation() {
        let c = ProductChart::product(&[(3, 1.0), (1, 0.5)]).unwrap();
        let x = [0.4, 0.1, 2.0, 0.3];
        assert_eq!(c.derivative(&x, &[0, 0, 0, 0]).unwrap(), c.evaluate(&x));
    }

    #[test]
    fn rejects_tiny_radius() {
        assert!(ProductChart::sphere(4, 1e-9).is_err());
        assert!(ProductChart::product(&[(2, 1.0), (1, 1.0)]).is_err());
    }
}
