use std::f64::consts::PI;

use rayon::prelude::*;

use super::chart::{Axis, Immersion};
use crate::error::{GwError, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// A quadrature node: parameter point and the weight of `dμ` there.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub chart_id: usize,
    pub point: Vec<f64>,
    pub weight: f64,
    /// Weight of the bare parameter rule, before the volume density.
    pub param_weight: f64,
}

/// Tensor-product rule on the parameter box of a chart, weights already
/// multiplied by the induced volume density.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    pub nodes: Vec<Node>,
    pub order: usize,
    pub counts: Vec<usize>,
}

fn axis_rule(axis: Axis, n: usize) -> Result<Vec<(f64, f64)>> {
    Ok(match axis {
        Axis::Periodic => (0..n).map(|j| (2.0 * PI * (j as f64 + 0.5) / n as f64, 2.0 * PI / n as f64)).collect(),
        Axis::Polar => {
            let (t, w) = gauss_legendre(n);
            t.iter().zip(&w).map(|(&t, &w)| (t.acos(), w / (1.0 - t * t).sqrt())).collect()
        }
        Axis::Hopf => {
            let (c, w) = gauss_legendre(n);
            c.iter().zip(&w).map(|(&c, &w)| (0.5 * c.acos(), w / (2.0 * (1.0 - c * c).sqrt()))).collect()
        }
        Axis::Line => return Err(GwError::InvalidInput("a line factor cannot be integrated".into())),
    })
}

/// Square root of the Gram determinant of the Jacobian at `x`.
pub fn volume_density(chart: &dyn Immersion, x: &[f64]) -> Result<f64> {
    let f = chart.expand(x, 1);
    let n = chart.source_dim();
    let jac: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0u8; n];
            e[i] = 1;
            f.iter().map(|s| s.coeff(&e)).collect()
        })
        .collect();
    let g = nalgebra::DMatrix::<f64>::from_fn(n, n, |i, j| jac[i].iter().zip(&jac[j]).map(|(a, b)| a * b).sum());
    let det = g.determinant();
    let scale = (0..n).map(|i| g[(i, i)]).product::<f64>();
    if !(det > 1e-24 * scale) {
        return Err(GwError::Degenerate { point: x.to_vec() });
    }
    Ok(det.sqrt())
}

impl QuadratureGrid {
    /// Grid of resolution `order`, with a single node (two on a four-sphere's
    /// polar axis) along axes the chart declares symmetric.
    pub fn new(chart: &dyn Immersion, order: usize) -> Result<QuadratureGrid> {
        let counts: Vec<usize> = chart
            .axes()
            .iter()
            .zip(chart.symmetric_axes())
            .map(|(&a, sym)| if sym { if a == Axis::Polar { 2 } else { 1 } } else { order })
            .collect();
        let mut grid = QuadratureGrid::with_counts(chart, &counts)?;
        grid.order = order;
        Ok(grid)
    }

    /// Grid with an explicit node count per parameter axis.
    pub fn with_counts(chart: &dyn Immersion, counts: &[usize]) -> Result<QuadratureGrid> {
        let axes = chart.axes();
        if counts.len() != axes.len() || counts.contains(&0) {
            return Err(GwError::InvalidInput("one positive node count per axis is required".into()));
        }
        let rules: Vec<Vec<(f64, f64)>> =
            axes.iter().zip(counts).map(|(&a, &n)| axis_rule(a, n)).collect::<Result<_>>()?;
        let total: usize = counts.iter().product();
        let mut params = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            let mut point = vec![0.0; axes.len()];
            let mut w = 1.0;
            for ax in (0..axes.len()).rev() {
                let (x, wx) = rules[ax][rem % counts[ax]];
                rem /= counts[ax];
                point[ax] = x;
                w *= wx;
            }
            params.push((point, w));
        }
        let nodes = params
            .into_par_iter()
            .map(|(point, w)| {
                let rho = volume_density(chart, &point)?;
                Ok(Node { chart_id: 0, point, weight: w * rho, param_weight: w })
            })
            .collect::<Result<Vec<Node>>>()?;
        Ok(QuadratureGrid { nodes, order: counts.iter().copied().max().unwrap_or(1), counts: counts.to_vec() })
    }

    /// Same axes with every count above two halved; used for error estimates.
    pub fn coarsened(&self, chart: &dyn Immersion) -> Result<QuadratureGrid> {
        let counts: Vec<usize> = self.counts.iter().map(|&c| if c > 2 { c / 2 } else { c }).collect();
        let mut g = QuadratureGrid::with_counts(chart, &counts)?;
        g.order = (self.order / 2).max(1);
        Ok(g)
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.nodes.iter().map(|n| n.weight).collect::<Vec<_>>())
    }
}

/// Fixed-shape pairwise summation; identical results for any thread count.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2..=8 => v.iter().sum(),
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// `Σ weight · f(node)` over the grid.
pub fn integrate<F>(grid: &QuadratureGrid, f: F) -> Result<f64>
where
    F: Fn(&Node) -> Result<f64> + Sync,
{
    let values = integrand_values(grid, f)?;
    let weighted: Vec<f64> = values.iter().zip(&grid.nodes).map(|(v, n)| v * n.weight).collect();
    Ok(pairwise_sum(&weighted))
}

/// Integrand values at every node, in node order, checked for finiteness.
pub fn integrand_values<F>(grid: &QuadratureGrid, f: F) -> Result<Vec<f64>>
where
    F: Fn(&Node) -> Result<f64> + Sync,
{
    grid.nodes
        .par_iter()
        .enumerate()
        .map(|(index, node)| {
            let v = f(node)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(GwError::NonFinite { index, point: node.point.clone() })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(7);
        for p in 0..14 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {p}");
        }
        let (x1, w1) = gauss_legendre(1);
        assert_eq!((x1[0], w1[0]), (0.0, 2.0));
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let v: Vec<f64> = (1..=100).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&v), 5050.0);
    }
}
