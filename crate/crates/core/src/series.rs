//! Truncated multivariate Taylor series.
//!
//! A [`Series`] holds the Taylor coefficients of a smooth function of a few
//! variables around a base point, truncated at some total degree. Monomials
//! are stored in graded order, so truncating to degree `k` is a prefix slice.
//! Every derivative used in the crate is produced by exact arithmetic on these
//! series; there is no numerical differentiation on the hot path.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

/// Highest total degree any series can carry.
pub const MAX_DEGREE: usize = 6;

/// Monomial bookkeeping for a fixed number of variables.
#[derive(Debug)]
pub struct Space {
    nvars: usize,
    exps: Vec<Vec<u8>>,
    /// `len_upto[k]` is the number of monomials of degree at most `k`.
    len_upto: Vec<usize>,
    /// Product table `(i, j, k)` meaning `m_i * m_j = m_k`, sorted by degree of `m_k`.
    pairs: Vec<(u32, u32, u32)>,
    pairs_upto: Vec<usize>,
    /// For each variable: `(source, factor)` per target monomial so that
    /// `d/dx_v` maps coefficient `source` times `factor` to the target.
    deriv: Vec<Vec<(u32, f64)>>,
    index: HashMap<Vec<u8>, usize>,
}

fn build_exponents(nvars: usize, deg: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if prefix.len() == nvars - 1 {
        let mut e = prefix.clone();
        e.push(deg as u8);
        out.push(e);
        return;
    }
    for first in (0..=deg).rev() {
        prefix.push(first as u8);
        build_exponents(nvars, deg - first, prefix, out);
        prefix.pop();
    }
}

impl Space {
    fn build(nvars: usize) -> Space {
        assert!(nvars >= 1, "series need at least one variable");
        let mut exps = Vec::new();
        let mut len_upto = Vec::with_capacity(MAX_DEGREE + 1);
        for deg in 0..=MAX_DEGREE {
            build_exponents(nvars, deg, &mut Vec::new(), &mut exps);
            len_upto.push(exps.len());
        }
        let index: HashMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let degree = |e: &[u8]| e.iter().map(|&x| x as usize).sum::<usize>();

        let mut pairs = Vec::new();
        let mut pairs_upto = Vec::with_capacity(MAX_DEGREE + 1);
        for rdeg in 0..=MAX_DEGREE {
            for i in 0..exps.len() {
                let di = degree(&exps[i]);
                if di > rdeg {
                    break;
                }
                let lo = if rdeg - di == 0 { 0 } else { len_upto[rdeg - di - 1] };
                for j in lo..len_upto[rdeg - di] {
                    let e: Vec<u8> = exps[i].iter().zip(&exps[j]).map(|(a, b)| a + b).collect();
                    pairs.push((i as u32, j as u32, index[&e] as u32));
                }
            }
            pairs_upto.push(pairs.len());
        }

        let mut deriv = Vec::with_capacity(nvars);
        for v in 0..nvars {
            let mut table = Vec::with_capacity(len_upto[MAX_DEGREE - 1]);
            for t in 0..len_upto[MAX_DEGREE - 1] {
                let mut e = exps[t].clone();
                e[v] += 1;
                table.push((index[&e] as u32, e[v] as f64));
            }
            deriv.push(table);
        }
        Space { nvars, exps, len_upto, pairs, pairs_upto, deriv, index }
    }

    /// Shared table for `nvars` variables.
    pub fn get(nvars: usize) -> &'static Space {
        static CACHE: OnceLock<Mutex<HashMap<usize, &'static Space>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("series cache poisoned");
        guard
            .entry(nvars)
            .or_insert_with(|| Box::leak(Box::new(Space::build(nvars))))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of coefficients of a series truncated at `deg`.
    pub fn len(&self, deg: usize) -> usize {
        self.len_upto[deg]
    }

    pub fn exponents(&self, idx: usize) -> &[u8] {
        &self.exps[idx]
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }
}

/// Taylor coefficients truncated at total degree `deg`.
#[derive(Clone, Debug)]
pub struct Series {
    space: &'static Space,
    deg: usize,
    coeffs: Vec<f64>,
}

impl Series {
    pub fn zero(space: &'static Space, deg: usize) -> Series {
        Series { space, deg, coeffs: vec![0.0; space.len(deg)] }
    }

    pub fn constant(space: &'static Space, deg: usize, c: f64) -> Series {
        let mut s = Series::zero(space, deg);
        s.coeffs[0] = c;
        s
    }

    /// The coordinate function `c + x_v`.
    pub fn variable(space: &'static Space, deg: usize, v: usize, c: f64) -> Series {
        let mut s = Series::constant(space, deg, c);
        if deg >= 1 {
            s.coeffs[1 + v] = 1.0;
        }
        s
    }

    pub fn from_coeffs(space: &'static Space, deg: usize, coeffs: Vec<f64>) -> Series {
        assert_eq!(coeffs.len(), space.len(deg));
        Series { space, deg, coeffs }
    }

    pub fn space(&self) -> &'static Space {
        self.space
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Coefficient of the monomial with the given exponents (zero if truncated away).
    pub fn coeff(&self, exps: &[u8]) -> f64 {
        match self.space.index_of(exps) {
            Some(i) if i < self.coeffs.len() => self.coeffs[i],
            _ => 0.0,
        }
    }

    /// Partial derivative value `∂^α f(0)` for the multi-index `exps`.
    pub fn derivative_value(&self, exps: &[u8]) -> f64 {
        let fact: f64 = exps.iter().map(|&e| (1..=e as u32).product::<u32>() as f64).product();
        self.coeff(exps) * fact
    }

    pub fn truncate(&self, deg: usize) -> Series {
        let deg = deg.min(self.deg);
        Series { space: self.space, deg, coeffs: self.coeffs[..self.space.len(deg)].to_vec() }
    }

    pub fn scale(&self, c: f64) -> Series {
        Series { space: self.space, deg: self.deg, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn add_const(&self, c: f64) -> Series {
        let mut s = self.clone();
        s.coeffs[0] += c;
        s
    }

    /// `self += c * other`, truncating to the smaller degree.
    pub fn axpy(&mut self, c: f64, other: &Series) {
        if other.deg < self.deg {
            self.deg = other.deg;
            self.coeffs.truncate(self.space.len(other.deg));
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
    }

    /// Partial derivative in variable `v`; the result loses one degree.
    pub fn deriv(&self, v: usize) -> Series {
        if self.deg == 0 {
            return Series::zero(self.space, 0);
        }
        let deg = self.deg - 1;
        let table = &self.space.deriv[v];
        let coeffs = (0..self.space.len(deg))
            .map(|t| {
                let (src, f) = table[t];
                self.coeffs[src as usize] * f
            })
            .collect();
        Series { space: self.space, deg, coeffs }
    }

    /// Product truncated at `deg` (which may be lower than both operands).
    pub fn mul_to(&self, other: &Series, deg: usize) -> Series {
        let deg = deg.min(self.deg).min(other.deg);
        let mut out = Series::zero(self.space, deg);
        out.add_product(1.0, self, other, deg);
        out
    }

    /// `self += c · a · b`, with the same truncation as
    /// `self.axpy(c, &a.mul_to(b, deg))` but without the temporary.
    pub fn add_product(&mut self, c: f64, a: &Series, b: &Series, deg: usize) {
        debug_assert!(std::ptr::eq(a.space, b.space) && std::ptr::eq(a.space, self.space));
        let deg = deg.min(a.deg).min(b.deg);
        if deg < self.deg {
            self.deg = deg;
            self.coeffs.truncate(self.space.len(deg));
        }
        let deg = self.deg;
        let pairs = &self.space.pairs[..self.space.pairs_upto[deg]];
        let len = self.space.len(deg);
        let (a, b, out) = (&a.coeffs[..len], &b.coeffs[..len], &mut self.coeffs[..len]);
        for &(i, j, k) in pairs {
            // Every pair below `pairs_upto[deg]` indexes monomials of degree at most `deg`.
            unsafe {
                *out.get_unchecked_mut(k as usize) += c * a.get_unchecked(i as usize) * b.get_unchecked(j as usize);
            }
        }
    }

    /// Applies `sum_k f[k] * (self - self(0))^k`.
    fn compose_univariate(&self, f: &[f64]) -> Series {
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut acc = Series::constant(self.space, self.deg, f[self.deg.min(f.len() - 1)]);
        for k in (0..self.deg.min(f.len() - 1)).rev() {
            acc = acc.mul_to(&delta, self.deg);
            acc.coeffs[0] += f[k];
        }
        acc
    }

    pub fn recip(&self) -> Series {
        let c = self.value();
        let f: Vec<f64> = (0..=self.deg).map(|k| (-1f64).powi(k as i32) / c.powi(k as i32 + 1)).collect();
        self.compose_univariate(&f)
    }

    pub fn sqrt(&self) -> Series {
        let c = self.value();
        let mut f = vec![c.sqrt()];
        let mut binom = 1.0;
        for k in 1..=self.deg {
            binom *= (0.5 - (k as f64 - 1.0)) / k as f64;
            f.push(binom * c.sqrt() / c.powi(k as i32));
        }
        self.compose_univariate(&f)
    }

    pub fn exp(&self) -> Series {
        let e = self.value().exp();
        let mut f = vec![e];
        for k in 1..=self.deg {
            let prev = f[k - 1];
            f.push(prev / k as f64);
        }
        self.compose_univariate(&f)
    }

    pub fn ln(&self) -> Series {
        let c = self.value();
        let mut f = vec![c.ln()];
        for k in 1..=self.deg {
            f.push((-1f64).powi(k as i32 + 1) / (k as f64 * c.powi(k as i32)));
        }
        self.compose_univariate(&f)
    }

    pub fn sin(&self) -> Series {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        self.compose_univariate(&taylor_cycle(&cycle, self.deg))
    }

    pub fn cos(&self) -> Series {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        self.compose_univariate(&taylor_cycle(&cycle, self.deg))
    }

    pub fn powi(&self, p: u32) -> Series {
        let mut acc = Series::constant(self.space, self.deg, 1.0);
        for _ in 0..p {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes `args[v]` for variable `v`. Constant terms of the arguments
    /// are ignored, so the substitution is around the base point of `self`;
    /// the result lives in the arguments' space.
    pub fn compose(&self, args: &[Series], deg: usize) -> Series {
        assert_eq!(args.len(), self.space.nvars);
        let target = args[0].space;
        let deg = deg.min(self.deg).min(args.iter().map(|a| a.deg).min().unwrap_or(deg));
        // Powers of each argument up to the needed degree.
        let powers: Vec<Vec<Series>> = args
            .iter()
            .map(|a| {
                let mut a = a.truncate(deg);
                a.coeffs[0] = 0.0;
                let mut p = vec![Series::constant(target, deg, 1.0)];
                for k in 1..=deg.min(self.deg) {
                    let next = p[k - 1].mul_to(&a, deg);
                    p.push(next);
                }
                p
            })
            .collect();
        let mut out = Series::zero(target, deg);
        for idx in 0..self.space.len(deg.min(self.deg)) {
            let c = self.coeffs[idx];
            if c == 0.0 {
                continue;
            }
            let e = &self.space.exps[idx];
            let mut term: Option<Series> = None;
            for (v, &ev) in e.iter().enumerate() {
                if ev == 0 {
                    continue;
                }
                let p = &powers[v][ev as usize];
                term = Some(match term {
                    None => p.clone(),
                    Some(t) => t.mul_to(p, deg),
                });
            }
            match term {
                None => out.coeffs[0] += c,
                Some(t) => out.axpy(c, &t),
            }
        }
        out
    }
}

fn taylor_cycle(cycle: &[f64; 4], deg: usize) -> Vec<f64> {
    let mut fact = 1.0;
    (0..=deg)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            cycle[k % 4] / fact
        })
        .collect()
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        self.mul_to(rhs, self.deg.min(rhs.deg))
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-1.0)
    }
}

/// Inverse of a symmetric positive definite matrix of series by Gauss–Jordan
/// elimination. Returns `None` when a pivot value is not positive.
pub fn inverse(m: &[Vec<Series>]) -> Option<Vec<Vec<Series>>> {
    let n = m.len();
    let space = m[0][0].space;
    let deg = m.iter().flatten().map(|s| s.deg).min().unwrap_or(0);
    let mut a: Vec<Vec<Series>> = m.iter().map(|r| r.iter().map(|s| s.truncate(deg)).collect()).collect();
    let mut inv: Vec<Vec<Series>> = (0..n)
        .map(|i| (0..n).map(|j| Series::constant(space, deg, if i == j { 1.0 } else { 0.0 })).collect())
        .collect();
    let scale = (0..n).map(|i| a[i][i].value().abs()).fold(0.0, f64::max);
    for col in 0..n {
        let pivot = a[col][col].value();
        if !(pivot > 1e-13 * scale) {
            return None;
        }
        let p_inv = a[col][col].recip();
        for j in 0..n {
            a[col][j] = &a[col][j] * &p_inv;
            inv[col][j] = &inv[col][j] * &p_inv;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row][col].clone();
            for j in 0..n {
                let t = &f * &a[col][j];
                a[row][j].axpy(-1.0, &t);
                let t = &f * &inv[col][j];
                inv[row][j].axpy(-1.0, &t);
            }
        }
    }
    Some(inv)
}
