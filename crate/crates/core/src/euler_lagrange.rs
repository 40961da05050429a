//! Euler–Lagrange residual of `ℒ₄` in Euclidean space, its first-variation
//! check, and critical products of round spheres.
//!
//! The sign convention is `δℒ₄(X) = −∫⟨ℰ, X⟩ dμ`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{GwError, Result};
use crate::geometry::{
    extrinsic_jet, integrate, product_jet, unit_sphere_volume, ExtrinsicJet, FrameJet, Immersion, ProductChart,
    ProductOfSpheres, QuadratureGrid, VectorField,
};
use crate::invariants::{ll4_on_grid, ll4_product};

/// `ℰ` at one point, as components in `normal_frame`.
#[derive(Clone, Debug)]
pub struct ELResidual {
    pub components: Vec<f64>,
    /// Ambient-coordinate normal frame the components refer to.
    pub normal_frame: Vec<Vec<f64>>,
    /// Size of the tangential part picked up while differentiating; zero up
    /// to rounding and truncation.
    pub tangential_leak: f64,
}

impl ELResidual {
    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn to_ambient(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.normal_frame.first().map_or(0, Vec::len)];
        for (c, nu) in self.components.iter().zip(&self.normal_frame) {
            out.iter_mut().zip(nu).for_each(|(o, x)| *o += c * x);
        }
        out
    }
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn axpy(out: &mut [f64], c: f64, v: &[f64]) {
    out.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);
}

/// The residual assembled from frame data; needs the depth-6 fields.
pub fn el_vector(f: &FrameJet) -> Result<Vec<f64>> {
    let missing = || GwError::Capability { requested: 6, supported: 5 };
    let lb = f.lap_bracket.as_ref().ok_or_else(missing)?;
    let la = f.lap_a.as_ref().ok_or_else(missing)?;
    let lh = f.lap_h.as_ref().ok_or_else(missing)?;
    let (n, m) = (f.n(), f.codim());
    let (a, h, dh) = (&f.a, &f.h, &f.grad_h);
    let ah: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| dot(&a[i][j], h)).collect()).collect();
    let h2 = dot(h, h);
    let dh2: f64 = dh.iter().map(|v| dot(v, v)).sum();
    let ah2: f64 = ah.iter().flatten().map(|x| x * x).sum();

    let mut e = lb.clone();
    axpy(&mut e, dot(lh, h) + 1.5 * dh2 - 0.5 * ah2 + 7.0 / 32.0 * h2 * h2, h);
    for i in 0..n {
        axpy(&mut e, 3.0 * dot(h, &dh[i]), &dh[i]);
        for j in 0..n {
            let mut c = dot(lh, &a[i][j]) - dot(&dh[i], &dh[j]) - 7.0 / 8.0 * h2 * ah[i][j];
            for k in 0..n {
                c -= ah[j][k] * ah[i][k];
            }
            axpy(&mut e, c, &a[i][j]);
            axpy(&mut e, 2.0 * ah[i][j], &la[i][j]);
            axpy(&mut e, 2.0 * dot(&a[i][j], &dh[i]), &dh[j]);
            if ah[i][j] == 0.0 {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    // Simons in codimension above one carries the normal
                    // curvature, which doubles the last two terms.
                    let c = 3.0 * dot(&a[i][j], &a[k][l]) - 4.0 * dot(&a[i][k], &a[j][l]);
                    axpy(&mut e, ah[i][j] * c, &a[k][l]);
                    axpy(&mut e, 4.0 * ah[i][j] * dot(&a[i][k], &a[k][l]), &a[j][l]);
                }
            }
        }
    }
    debug_assert_eq!(e.len(), m);
    Ok(e)
}

fn residual_of(jet: &ExtrinsicJet) -> Result<ELResidual> {
    Ok(ELResidual {
        components: el_vector(&jet.orthonormal())?,
        normal_frame: jet.normal_frame.clone(),
        tangential_leak: jet.bracket_leak.unwrap_or(0.0),
    })
}

/// `ℰ = Σ c_a ν_a` of a product of spheres, with `ν_a` the outward normal of
/// factor `a`; the components are the `c_a`, in the product's order.
pub fn el_residual_product(p: &ProductOfSpheres) -> ELResidual {
    residual_of(&product_jet(p)).expect("closed-form jets carry every field")
}

/// `ℰ` of a Euclidean chart at parameter point `x`, from a depth-6 jet.
pub fn el_residual_chart(sigma: &dyn Immersion, x: &[f64]) -> Result<ELResidual> {
    residual_of(&extrinsic_jet(sigma, x, 6)?)
}

/// `−∫⟨ℰ, X⟩ dμ`, the first variation predicted by the residual.
pub fn el_pairing(sigma: &ProductChart, field: &VectorField, grid: &QuadratureGrid) -> Result<f64> {
    integrate(grid, |node| {
        let x = sigma.field_at(field, &node.point);
        let e = el_residual_chart(sigma, &node.point)?.to_ambient();
        Ok(-dot(&e, &x))
    })
}

/// Central difference `(ℒ₄(F + hX) − ℒ₄(F − hX)) / 2h` on a grid with the
/// given node counts.
pub fn first_variation(sigma: &ProductChart, field: &VectorField, h: f64, counts: &[usize]) -> Result<f64> {
    if field.is_zero() {
        return Ok(0.0);
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(GwError::InvalidInput(format!("step must be positive, got {h}")));
    }
    let energy = |s: f64| -> Result<f64> {
        let c = sigma.displaced(field, s);
        let grid = QuadratureGrid::with_counts(&c, counts).map_err(|e| degenerate_step(e, h))?;
        ll4_on_grid(&c, &grid).map_err(|e| degenerate_step(e, h))
    };
    Ok((energy(h)? - energy(-h)?) / (2.0 * h))
}

fn degenerate_step(e: GwError, h: f64) -> GwError {
    match e {
        GwError::Degenerate { point } => {
            GwError::StepTooLarge { step: h, reason: format!("the displaced immersion degenerates at {point:?}") }
        }
        other => other,
    }
}

/// Gradient of `ℒ₄` with respect to the log-radii of a product, from the
/// closed form `½ f V`.
pub fn reduced_gradient(dims: &[usize], log_radii: &[f64]) -> Vec<f64> {
    let (g, pref) = gradient_parts(dims, log_radii);
    g.iter().map(|x| pref * x).collect()
}

// ∂ℒ₄/∂s_a = ½ V G_a with s = log r, x = r⁻², S = Σ k² x and
// G_a = k_a f + 4 k_a³ x_a² − (7/4) S k_a² x_a.
fn gradient_parts(dims: &[usize], s: &[f64]) -> (Vec<f64>, f64) {
    let k: Vec<f64> = dims.iter().map(|&k| k as f64).collect();
    let x: Vec<f64> = s.iter().map(|s| (-2.0 * s).exp()).collect();
    let sum: f64 = k.iter().zip(&x).map(|(k, x)| k * k * x).sum();
    let f = -k.iter().zip(&x).map(|(k, x)| k.powi(3) * x * x).sum::<f64>() + 7.0 / 16.0 * sum * sum;
    let g = k
        .iter()
        .zip(&x)
        .map(|(k, x)| k * f + 4.0 * k.powi(3) * x * x - 1.75 * sum * k * k * x)
        .collect();
    let vol: f64 = dims.iter().zip(s).map(|(&kk, s)| unit_sphere_volume(kk) * (kk as f64 * s).exp()).product();
    (g, 0.5 * vol)
}

fn gradient_jacobian(dims: &[usize], s: &[f64]) -> DMatrix<f64> {
    let m = dims.len();
    let k: Vec<f64> = dims.iter().map(|&k| k as f64).collect();
    let x: Vec<f64> = s.iter().map(|s| (-2.0 * s).exp()).collect();
    let sum: f64 = k.iter().zip(&x).map(|(k, x)| k * k * x).sum();
    // ∂f/∂s_b
    let df: Vec<f64> = (0..m).map(|b| 4.0 * k[b].powi(3) * x[b] * x[b] - 1.75 * sum * k[b] * k[b] * x[b]).collect();
    DMatrix::from_fn(m, m, |a, b| {
        let mut v = k[a] * df[b] + 3.5 * k[a] * k[a] * k[b] * k[b] * x[a] * x[b];
        if a == b {
            v += -16.0 * k[a].powi(3) * x[a] * x[a] + 3.5 * sum * k[a] * k[a] * x[a];
        }
        v
    })
}

/// Tuning of [`critical_search`].
#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Box for every log-radius relative to the first factor.
    pub log_min: f64,
    pub log_max: f64,
    /// Spacing of the multi-start grid in log-radius.
    pub step: f64,
    pub max_iter: usize,
    /// Convergence threshold on the gradient, relative to its term sizes.
    pub grad_tol: f64,
    pub dedup: f64,
    /// Largest accepted `|ℰ|` at a root.
    pub residual_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            log_min: -2.0,
            log_max: 2.0,
            step: 0.1,
            max_iter: 100,
            grad_tol: 1e-12,
            dedup: 1e-6,
            residual_tol: 1e-10,
        }
    }
}

/// A critical product of round spheres in canonical form.
#[derive(Clone, Debug)]
pub struct CriticalPoint {
    pub dims: Vec<usize>,
    pub radii: Vec<f64>,
    pub energy: f64,
    pub residual_norm: f64,
    /// Signs of the eigenvalues of the reduced Hessian, ascending.
    pub second_variation: Vec<i8>,
}

impl CriticalPoint {
    pub fn shape(&self) -> ProductOfSpheres {
        let profile: Vec<(usize, f64)> = self.dims.iter().copied().zip(self.radii.iter().copied()).collect();
        ProductOfSpheres::ordered(&profile).expect("critical points are valid products")
    }
}

/// Canonical log-radii: within each group of equal dimension the radii are
/// ascending, and the smallest radius of the first group is 1.
fn canonical(dims: &[usize], s: &[f64]) -> Vec<f64> {
    let mut out = s.to_vec();
    let mut start = 0;
    while start < dims.len() {
        let end = start + dims[start..].iter().take_while(|&&k| k == dims[start]).count();
        out[start..end].sort_by(f64::total_cmp);
        start = end;
    }
    let shift = out[0];
    out.iter_mut().for_each(|x| *x -= shift);
    out
}

fn newton(dims: &[usize], start: Vec<f64>, opt: &SearchOptions) -> Option<Vec<f64>> {
    let m = dims.len();
    let mut s = start;
    let measure = |s: &[f64]| -> (f64, f64) {
        let (g, _) = gradient_parts(dims, s);
        let scale: f64 = 1.0 + gradient_scale(dims, s);
        (g[1..].iter().fold(0.0f64, |a, x| a.max(x.abs())), scale)
    };
    let step = |s: &[f64]| -> Option<DVector<f64>> {
        let (g, _) = gradient_parts(dims, s);
        let jf = gradient_jacobian(dims, s).view((1, 1), (m - 1, m - 1)).into_owned();
        jf.lu().solve(&DVector::from_iterator(m - 1, g[1..].iter().map(|x| -x)))
    };
    // One undamped step past the tolerance, kept if it does not hurt.
    let polish = |s: Vec<f64>, gn: f64| -> Vec<f64> {
        if m < 2 {
            return s;
        }
        let Some(delta) = step(&s) else { return s };
        let trial: Vec<f64> = (0..m).map(|a| if a == 0 { s[0] } else { s[a] + delta[a - 1] }).collect();
        if measure(&trial).0 <= gn {
            trial
        } else {
            s
        }
    };
    let (mut gn, mut scale) = measure(&s);
    for _ in 0..opt.max_iter {
        if gn <= opt.grad_tol * scale {
            return Some(polish(s, gn));
        }
        let delta = step(&s)?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = (0..m).map(|a| if a == 0 { s[0] } else { s[a] + t * delta[a - 1] }).collect();
            let (tn, tscale) = measure(&trial);
            if tn.is_finite() && tn < gn {
                s = trial;
                gn = tn;
                scale = tscale;
                break;
            }
            t *= 0.5;
            if t < 1e-10 {
                return None;
            }
        }
        if s.iter().any(|x| x.abs() > 50.0) {
            return None;
        }
    }
    (gn <= opt.grad_tol * scale).then(|| polish(s, gn))
}

fn gradient_scale(dims: &[usize], s: &[f64]) -> f64 {
    let k: Vec<f64> = dims.iter().map(|&k| k as f64).collect();
    let x: Vec<f64> = s.iter().map(|s| (-2.0 * s).exp()).collect();
    let sum: f64 = k.iter().zip(&x).map(|(k, x)| k * k * x).sum();
    let cubic: f64 = k.iter().zip(&x).map(|(k, x)| k.powi(3) * x * x).sum();
    4.0 * (cubic + sum * sum)
}

fn sign_pattern(dims: &[usize], s: &[f64]) -> Vec<i8> {
    let m = dims.len();
    if m < 2 {
        return Vec::new();
    }
    let h = 1e-4;
    let mut hess = DMatrix::zeros(m - 1, m - 1);
    for b in 1..m {
        let mut sp = s.to_vec();
        let mut sm = s.to_vec();
        sp[b] += h;
        sm[b] -= h;
        let gp = reduced_gradient(dims, &sp);
        let gm = reduced_gradient(dims, &sm);
        for a in 1..m {
            hess[(a - 1, b - 1)] = (gp[a] - gm[a]) / (2.0 * h);
        }
    }
    let sym = (&hess + hess.transpose()) * 0.5;
    let scale = sym.abs().max().max(1e-300);
    let mut eig: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig.iter().map(|&l| if l.abs() <= 1e-6 * scale { 0 } else if l > 0.0 { 1 } else { -1 }).collect()
}

/// All critical products with the given factor dimensions inside the search
/// box, found by damped Newton iteration from every point of the log-radius
/// grid and validated against the residual.
pub fn critical_search(dims: &[usize], opt: &SearchOptions) -> Result<Vec<CriticalPoint>> {
    if dims.iter().sum::<usize>() != 4 || dims.is_empty() || dims.contains(&0) || dims.len() > 4 {
        return Err(GwError::InvalidInput(format!("factor dimensions {dims:?} must be positive and sum to 4")));
    }
    if !(opt.step > 0.0 && opt.log_max > opt.log_min) {
        return Err(GwError::InvalidInput("search box must be non-empty with a positive step".into()));
    }
    let mut dims = dims.to_vec();
    dims.sort_unstable_by(|a, b| b.cmp(a));
    let m = dims.len();
    let per_axis = ((opt.log_max - opt.log_min) / opt.step + 1e-9).floor() as usize + 1;
    let total = per_axis.pow(m as u32 - 1);
    let starts: Vec<Vec<f64>> = (0..total)
        .map(|mut flat| {
            let mut s = vec![0.0; m];
            for v in s.iter_mut().skip(1) {
                *v = opt.log_min + (flat % per_axis) as f64 * opt.step;
                flat /= per_axis;
            }
            s
        })
        .collect();
    let roots: Vec<Vec<f64>> = starts
        .into_par_iter()
        .filter_map(|s| newton(&dims, s, opt))
        .map(|s| canonical(&dims, &s))
        .filter(|s| s.iter().all(|&x| x >= opt.log_min - 1e-9 && x <= opt.log_max + 1e-9))
        .collect();
    let mut unique: Vec<Vec<f64>> = Vec::new();
    for r in roots {
        if !unique.iter().any(|u| u.iter().zip(&r).all(|(a, b)| (a - b).abs() <= opt.dedup)) {
            unique.push(r);
        }
    }
    unique.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .find(|(x, y)| (*x - *y).abs() > opt.dedup)
            .map_or(std::cmp::Ordering::Equal, |(x, y)| x.total_cmp(y))
    });
    let mut out = Vec::new();
    for s in unique {
        let radii: Vec<f64> = s.iter().map(|x| x.exp()).collect();
        let profile: Vec<(usize, f64)> = dims.iter().copied().zip(radii.iter().copied()).collect();
        let shape = ProductOfSpheres::ordered(&profile)?;
        let residual_norm = el_residual_product(&shape).norm();
        if residual_norm > opt.residual_tol {
            continue;
        }
        out.push(CriticalPoint {
            dims: dims.clone(),
            energy: ll4_product(&shape),
            second_variation: sign_pattern(&dims, &s),
            radii,
            residual_norm,
        });
    }
    Ok(out)
}
