//! Truncated hyperbolic volumes of totally geodesic hemispheres and the fit
//! of their small-`ε` expansion.
//!
//! In the half-space model `r⁻²(dr² + |x|²)` the hemisphere over the round
//! sphere `Sⁿ(R)` is minimal. Slicing at height `t` gives `Sⁿ(ρ)` with
//! `ρ = √(R² − t²)`, and the Euclidean area element of the hemisphere is
//! `(R/ρ) ρⁿ dt dσ`, so
//!
//! ```text
//! Vol(Y ∩ {r > ε}) = Vol(Sⁿ) R ∫_ε^R (R² − t²)^((n−1)/2) t^(−n−1) dt.
//! ```
//!
//! For even `n` the right side equals
//! `Σ_j c_j ε^(−n+2j) + L log(1/ε) + c + O(ε²)`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{GwError, Result};
use crate::geometry::{gauss_legendre, unit_sphere_volume};

/// The hemisphere `{|x|² + r² = R², x ∈ ℝⁿ⁺¹}` in hyperbolic `(d+1)`-space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HemisphereSurface {
    n: usize,
    radius: f64,
    ambient_dim: usize,
}

impl HemisphereSurface {
    /// `n` is the dimension of the boundary sphere, `ambient_dim` the `d` of
    /// the boundary `ℝᵈ`.
    pub fn new(n: usize, radius: f64, ambient_dim: usize) -> Result<HemisphereSurface> {
        if n == 0 {
            return Err(GwError::InvalidInput("boundary sphere dimension must be positive".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GwError::InvalidInput(format!("radius {radius} must be positive")));
        }
        if ambient_dim < n + 1 {
            return Err(GwError::Dimension(format!("Sⁿ with n = {n} does not fit in ℝ^{ambient_dim}")));
        }
        Ok(HemisphereSurface { n, radius, ambient_dim })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Hyperbolic volume of the part of the hemisphere above height `eps`.
    pub fn truncated_volume(&self, eps: f64) -> Result<f64> {
        let r = self.radius;
        if !(eps > 0.0 && eps <= r) {
            return Err(GwError::InvalidInput(format!("cutoff {eps} must lie in (0, {r}]")));
        }
        let n = self.n as i32;
        let half = (n - 1) as f64 / 2.0;
        let split = eps.max(0.5 * r);
        let mut total = 0.0;
        if eps < split {
            // t = e^u takes the steep t^(−n−1) to a smooth exponential.
            let f = |u: f64| {
                let t = u.exp();
                (r * r - t * t).powf(half) * t.powi(-n)
            };
            total += adaptive(&f, eps.ln(), split.ln());
        }
        // t = R − s² removes the branch point of (R² − t²)^((n−1)/2).
        let g = |s: f64| {
            let s2 = s * s;
            2.0 * s.powi(n) * (2.0 * r - s2).powf(half) * (r - s2).powi(-n - 1)
        };
        total += adaptive(&g, 0.0, (r - split).max(0.0).sqrt());
        Ok(unit_sphere_volume(self.n) * r * total)
    }

    /// Truncated volumes at every cutoff, computed in parallel.
    pub fn sample(&self, eps: &[f64]) -> Result<Vec<f64>> {
        eps.par_iter().map(|&e| self.truncated_volume(e)).collect()
    }

    /// Samples the volume on `count` geometric cutoffs in `[lo, hi]` and fits
    /// the expansion.
    pub fn expansion(&self, lo: f64, hi: f64, count: usize) -> Result<ExpansionFit> {
        let eps = geometric_grid(lo, hi, count)?;
        let vol = self.sample(&eps)?;
        fit_expansion(self.n, &eps, &vol)
    }
}

const PANEL: usize = 12;

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (x1, w1) = gauss_legendre(PANEL);
    let (x2, w2) = gauss_legendre(2 * PANEL);
    let rule = |x: &[f64], w: &[f64], a: f64, b: f64| -> f64 {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        h * x.iter().zip(w).map(|(x, w)| w * f(c + h * x)).sum::<f64>()
    };
    let whole = rule(&x2, &w2, a, b);
    let tol = 1e-15 * whole.abs().max(f64::MIN_POSITIVE) / (b - a);
    let mut stack = vec![(a, b, whole, 0u32)];
    let mut parts = Vec::new();
    while let Some((a, b, fine, depth)) = stack.pop() {
        let coarse = rule(&x1, &w1, a, b);
        // Below a few ulps of the panel the two rules cannot agree any better.
        let floor = 8.0 * f64::EPSILON * fine.abs();
        if (fine - coarse).abs() <= (tol * (b - a)).max(floor) || depth >= 30 {
            parts.push(fine);
        } else {
            let m = 0.5 * (a + b);
            stack.push((a, m, rule(&x2, &w2, a, m), depth + 1));
            stack.push((m, b, rule(&x2, &w2, m, b), depth + 1));
        }
    }
    parts.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    parts.iter().sum()
}

/// `count` cutoffs spaced geometrically from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(GwError::InvalidInput(format!("bad cutoff grid [{lo}, {hi}] with {count} points")));
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    Ok((0..count).map(|i| lo * (ratio * i as f64).exp()).collect())
}

/// Result of fitting `V(ε) = Σ_j c_j ε^(−n+2j) + L log(1/ε) + c + a ε² + b ε⁴`.
#[derive(Clone, Debug)]
pub struct ExpansionFit {
    pub n: usize,
    pub epsilons: Vec<f64>,
    pub volumes: Vec<f64>,
    /// Exponents of the power terms, `−n, −n+2, …, −2, 0, 2, 4`.
    pub powers: Vec<i32>,
    /// Coefficients of the power terms, in the order of `powers`.
    pub power_coefficients: Vec<f64>,
    pub log_coefficient: f64,
    /// Largest weighted residual, relative to each sample.
    pub residual_norm: f64,
    /// Condition number of the column-equilibrated design matrix.
    pub condition: f64,
}

impl ExpansionFit {
    /// `L_n`, the coefficient of `log(1/ε)`.
    pub fn anomaly(&self) -> f64 {
        self.log_coefficient
    }

    /// Coefficient of `ε⁰`.
    pub fn constant(&self) -> f64 {
        self.power(0).expect("the basis always has a constant")
    }

    pub fn power(&self, p: i32) -> Option<f64> {
        self.powers.iter().position(|&q| q == p).map(|i| self.power_coefficients[i])
    }

    pub fn evaluate(&self, eps: f64) -> f64 {
        let pw: f64 = self.powers.iter().zip(&self.power_coefficients).map(|(&p, c)| c * eps.powi(p)).sum();
        pw + self.log_coefficient * (1.0 / eps).ln()
    }
}

const MAX_CONDITION: f64 = 1e12;

/// Least-squares fit of the small-`ε` expansion for an even boundary
/// dimension `n`. Rows are weighted by `1/|V|` so every sample counts with
/// its relative accuracy.
pub fn fit_expansion(n: usize, eps: &[f64], volumes: &[f64]) -> Result<ExpansionFit> {
    if n == 0 || n % 2 == 1 {
        return Err(GwError::InvalidInput(format!("the expansion is fitted for even n only, got {n}")));
    }
    if eps.len() != volumes.len() {
        return Err(GwError::InvalidInput("cutoffs and volumes differ in length".into()));
    }
    if eps.len() < 8 {
        return Err(GwError::InvalidInput(format!("at least 8 samples are needed, got {}", eps.len())));
    }
    if let Some(e) = eps.iter().find(|&&e| !(1e-3 * (1.0 - 1e-9)..=1e-1 * (1.0 + 1e-9)).contains(&e)) {
        return Err(GwError::InvalidInput(format!("cutoff {e} outside [1e-3, 1e-1]")));
    }
    if volumes.iter().any(|v| !v.is_finite()) {
        return Err(GwError::InvalidInput("volumes must be finite".into()));
    }
    let ni = n as i32;
    let mut powers: Vec<i32> = (0..n / 2).map(|j| -ni + 2 * j as i32).collect();
    powers.extend([0, 2, 4]);
    let cols = powers.len() + 1;
    let log_col = n / 2;
    let column = |e: f64, c: usize| -> f64 {
        match c.cmp(&log_col) {
            std::cmp::Ordering::Less => e.powi(powers[c]),
            std::cmp::Ordering::Equal => (1.0 / e).ln(),
            std::cmp::Ordering::Greater => e.powi(powers[c - 1]),
        }
    };
    let weight: Vec<f64> = volumes.iter().map(|v| 1.0 / v.abs().max(1.0)).collect();
    let mut a = DMatrix::from_fn(eps.len(), cols, |i, c| weight[i] * column(eps[i], c));
    let scale: Vec<f64> = (0..cols).map(|c| a.column(c).norm().max(f64::MIN_POSITIVE)).collect();
    for (c, s) in scale.iter().enumerate() {
        a.column_mut(c).scale_mut(1.0 / s);
    }
    let b = DVector::from_iterator(eps.len(), volumes.iter().zip(&weight).map(|(v, w)| v * w));
    let svd = a.clone().svd(true, true);
    let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(GwError::Conditioning(condition));
    }
    let solve = |rhs: &DVector<f64>| svd.solve(rhs, 0.0).map_err(|e| GwError::InvalidInput(e.to_string()));
    let mut x = solve(&b)?;
    // One step of iterative refinement.
    x += solve(&(&b - &a * &x))?;
    let coef: Vec<f64> = x.iter().zip(&scale).map(|(x, s)| x / s).collect();
    let residual_norm = (&a * &x - &b).amax();
    let mut power_coefficients = coef.clone();
    let log_coefficient = power_coefficients.remove(log_col);
    Ok(ExpansionFit {
        n,
        epsilons: eps.to_vec(),
        volumes: volumes.to_vec(),
        powers,
        power_coefficients,
        log_coefficient,
        residual_norm,
        condition,
    })
}
