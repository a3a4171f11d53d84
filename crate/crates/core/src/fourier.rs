//! Arithmetic for smooth periodic coefficient functions on the circle.
//!
//! A [`CoeffFn`] is a finitely supported Fourier coefficient map
//! `x -> sum_k c_k e^{ikx}`. Addition and multiplication are exact (the
//! latter as coefficient convolution); only [`CoeffFn::inverse`] goes
//! through a sample grid and therefore truncates.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use thiserror::Error;

/// Amplitudes below this magnitude are pruned to zero.
pub const PRUNE_EPS: f64 = 1e-14;

/// Pointwise lower bound under which a function counts as non-invertible.
pub const INVERT_FLOOR: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum FourierError {
    #[error("function not invertible: min |f| = {min_abs:.3e} on the sample grid")]
    NotInvertible { min_abs: f64 },
    #[error("inverse residual {residual:.3e} > tol {tol:.3e} within bandwidth cap {band_cap}")]
    BandwidthExceeded {
        residual: f64,
        tol: f64,
        band_cap: i64,
    },
}

/// Finitely supported Fourier series with complex amplitudes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoeffFn {
    coeffs: BTreeMap<i64, Complex64>,
}

/// Result of [`CoeffFn::inverse`], carrying the achieved residual so callers
/// can propagate a worst-case error budget.
#[derive(Clone, Debug)]
pub struct Inverse {
    pub value: CoeffFn,
    /// l1 norm of the coefficients of `f * inverse - 1`; bounds the sup norm
    /// of the pointwise defect on the circle.
    pub residual: f64,
}

fn is_negligible(c: Complex64) -> bool {
    c.norm() <= PRUNE_EPS
}

impl CoeffFn {
    pub fn zero() -> Self {
        CoeffFn::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut f = CoeffFn::default();
        f.add_term(0, c);
        f
    }

    pub fn one() -> Self {
        CoeffFn::constant(Complex64::new(1.0, 0.0))
    }

    /// e^{ikx}
    pub fn monomial(k: i64) -> Self {
        let mut f = CoeffFn::default();
        f.add_term(k, Complex64::new(1.0, 0.0));
        f
    }

    /// cos(kx)
    pub fn cosine(k: i64) -> Self {
        let mut f = CoeffFn::default();
        f.add_term(k, Complex64::new(0.5, 0.0));
        f.add_term(-k, Complex64::new(0.5, 0.0));
        f
    }

    /// sin(kx)
    pub fn sine(k: i64) -> Self {
        let mut f = CoeffFn::default();
        f.add_term(k, Complex64::new(0.0, -0.5));
        f.add_term(-k, Complex64::new(0.0, 0.5));
        f
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut f = CoeffFn::default();
        for (k, c) in pairs {
            f.add_term(k, c);
        }
        f
    }

    pub fn add_term(&mut self, k: i64, c: Complex64) {
        let entry = self.coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if is_negligible(*entry) {
            self.coeffs.remove(&k);
        }
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs
            .get(&k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(k, c)| (*k, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn bandwidth(&self) -> i64 {
        self.coeffs.keys().map(|k| k.abs()).max().unwrap_or(0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn add(&self, other: &CoeffFn) -> CoeffFn {
        let mut out = self.clone();
        for (k, c) in other.iter() {
            out.add_term(k, c);
        }
        out
    }

    pub fn sub(&self, other: &CoeffFn) -> CoeffFn {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> CoeffFn {
        let mut out = CoeffFn::default();
        for (k, c) in self.iter() {
            out.add_term(k, c * s);
        }
        out
    }

    /// Coefficient convolution; exact up to float roundoff.
    pub fn mul(&self, other: &CoeffFn) -> CoeffFn {
        let mut out = CoeffFn::default();
        for (k1, c1) in self.iter() {
            for (k2, c2) in other.iter() {
                out.add_term(k1 + k2, c1 * c2);
            }
        }
        out
    }

    /// d/dx: c_k -> i k c_k.
    pub fn dx(&self) -> CoeffFn {
        let mut out = CoeffFn::default();
        for (k, c) in self.iter() {
            out.add_term(k, c * Complex64::new(0.0, k as f64));
        }
        out
    }

    /// (1/2pi) integral over the circle, i.e. the k = 0 coefficient.
    pub fn mean(&self) -> Complex64 {
        self.coeff(0)
    }

    /// Complex conjugate of the function: c_k -> conj(c_{-k}).
    pub fn conj(&self) -> CoeffFn {
        let mut out = CoeffFn::default();
        for (k, c) in self.iter() {
            out.add_term(-k, c.conj());
        }
        out
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.iter() {
            acc += c * Complex64::new(0.0, k as f64 * x).exp();
        }
        acc
    }

    pub fn approx_eq(&self, other: &CoeffFn, eps: f64) -> bool {
        self.sub(other).sup_norm() <= eps
    }

    /// Samples on the uniform grid x_j = 2 pi j / n.
    pub fn sample(&self, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|j| self.eval(2.0 * PI * j as f64 / n as f64))
            .collect()
    }

    /// Coefficients of the trig interpolant of uniform grid samples,
    /// truncated to |k| <= band_cap.
    pub fn from_samples(samples: &[Complex64], band_cap: i64) -> CoeffFn {
        grid_to_coeffs(samples, band_cap).value
    }

    /// Pointwise reciprocal, computed on an oversampled grid and transformed
    /// back, with the residual of `f * g - 1` recorded.
    pub fn inverse(&self, band_cap: i64, tol: f64) -> Result<Inverse, FourierError> {
        self.inverse_with_floor(band_cap, tol, INVERT_FLOOR)
    }

    pub fn inverse_with_floor(
        &self,
        band_cap: i64,
        tol: f64,
        floor: f64,
    ) -> Result<Inverse, FourierError> {
        let bw = self.bandwidth();
        let mut n = next_pow2((4 * (bw + 1)).max(2 * (band_cap + bw + 2)).max(16) as usize);
        let mut best: Option<Inverse> = None;
        loop {
            let samples = self.sample(n);
            let min_abs = samples
                .iter()
                .map(|v| v.norm())
                .fold(f64::INFINITY, f64::min);
            if min_abs <= floor {
                return Err(FourierError::NotInvertible { min_abs });
            }
            let recip: Vec<Complex64> = samples.iter().map(|v| v.inv()).collect();
            let g = grid_to_coeffs(&recip, band_cap);
            let residual = self.mul(&g.value).sub(&CoeffFn::one()).l1_norm();
            let cand = Inverse {
                value: g.value,
                residual,
            };
            if residual <= tol {
                return Ok(cand);
            }
            if best.as_ref().map_or(true, |b| residual < b.residual) {
                best = Some(cand);
            }
            if n >= 4096 {
                let residual = best.map(|b| b.residual).unwrap_or(f64::INFINITY);
                return Err(FourierError::BandwidthExceeded {
                    residual,
                    tol,
                    band_cap,
                });
            }
            n *= 2;
        }
    }
}

struct GridCoeffs {
    value: CoeffFn,
}

/// Direct DFT of grid samples, truncated to |k| <= band_cap.
fn grid_to_coeffs(samples: &[Complex64], band_cap: i64) -> GridCoeffs {
    let n = samples.len();
    let cap = band_cap.min(n as i64 / 2 - 1);
    let mut f = CoeffFn::default();
    for k in -cap..=cap {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in samples.iter().enumerate() {
            let phase = -2.0 * PI * k as f64 * j as f64 / n as f64;
            acc += v * Complex64::new(0.0, phase).exp();
        }
        f.add_term(k, acc / n as f64);
    }
    GridCoeffs { value: f }
}

fn next_pow2(n: usize) -> usize {
    let mut p = 1;
    while p < n {
        p *= 2;
    }
    p
}
