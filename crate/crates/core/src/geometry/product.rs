use std::f64::consts::PI;

use super::chart::ProductChart;
use crate::error::{GwError, Result};

/// Volume of the unit sphere `Sᵏ ⊂ ℝᵏ⁺¹`.
pub fn unit_sphere_volume(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * unit_sphere_volume(k - 2),
    }
}

/// `S^{k_1}(r_1) × … × S^{k_m}(r_m) ⊂ ℝ^{Σ(k_a+1)}` with `Σ k_a = 4`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductOfSpheres {
    profile: Vec<(usize, f64)>,
}

fn validate(profile: &[(usize, f64)]) -> Result<()> {
    if profile.is_empty() {
        return Err(GwError::InvalidInput("empty profile".into()));
    }
    for &(k, r) in profile {
        if k == 0 || k > 4 {
            return Err(GwError::InvalidInput(format!("factor dimension {k} must be between 1 and 4")));
        }
        if !(r >= 1e-8) || !r.is_finite() {
            return Err(GwError::InvalidInput(format!("radius {r} must be finite and at least 1e-8")));
        }
    }
    let n: usize = profile.iter().map(|p| p.0).sum();
    if n != 4 {
        return Err(GwError::InvalidInput(format!("factor dimensions sum to {n}, expected 4")));
    }
    Ok(())
}

impl ProductOfSpheres {
    /// Validates and puts the profile in canonical order: descending `k`,
    /// ascending radius within equal `k`.
    pub fn new(profile: &[(usize, f64)]) -> Result<ProductOfSpheres> {
        validate(profile)?;
        let mut profile = profile.to_vec();
        profile.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.total_cmp(&b.1)));
        Ok(ProductOfSpheres { profile })
    }

    /// Keeps the factor order as given.
    pub fn ordered(profile: &[(usize, f64)]) -> Result<ProductOfSpheres> {
        validate(profile)?;
        Ok(ProductOfSpheres { profile: profile.to_vec() })
    }

    pub fn profile(&self) -> &[(usize, f64)] {
        &self.profile
    }

    pub fn dims(&self) -> Vec<usize> {
        self.profile.iter().map(|p| p.0).collect()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.profile.iter().map(|p| p.1).collect()
    }

    pub fn ambient_dim(&self) -> usize {
        self.profile.iter().map(|p| p.0 + 1).sum()
    }

    pub fn volume(&self) -> f64 {
        self.profile.iter().map(|&(k, r)| unit_sphere_volume(k) * r.powi(k as i32)).product()
    }

    pub fn dilated(&self, lambda: f64) -> Result<ProductOfSpheres> {
        let p: Vec<(usize, f64)> = self.profile.iter().map(|&(k, r)| (k, r * lambda)).collect();
        ProductOfSpheres::ordered(&p)
    }

    /// Explicit parametrization, factors in the same order.
    pub fn chart(&self) -> ProductChart {
        ProductChart::product(&self.profile).expect("validated profile")
    }
}
