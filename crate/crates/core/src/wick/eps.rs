//! Truncated formal power series in the deformation indeterminate.

use num_complex::Complex64;

/// Coefficients of eps^0 .. eps^trunc; arithmetic never reads beyond trunc.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsSeries {
    coeffs: Vec<Complex64>,
}

impl EpsSeries {
    pub fn zero(trunc: usize) -> Self {
        EpsSeries {
            coeffs: vec![Complex64::new(0.0, 0.0); trunc + 1],
        }
    }

    pub fn constant(c: Complex64, trunc: usize) -> Self {
        let mut s = EpsSeries::zero(trunc);
        s.coeffs[0] = c;
        s
    }

    pub fn one(trunc: usize) -> Self {
        EpsSeries::constant(Complex64::new(1.0, 0.0), trunc)
    }

    /// c * eps^k
    pub fn monomial(c: Complex64, k: usize, trunc: usize) -> Self {
        let mut s = EpsSeries::zero(trunc);
        if k <= trunc {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty());
        EpsSeries { coeffs }
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// Lowest power with a nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| c.norm() != 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &EpsSeries) -> EpsSeries {
        let trunc = self.trunc().min(other.trunc());
        let mut out = EpsSeries::zero(trunc);
        for k in 0..=trunc {
            out.coeffs[k] = self.coeff(k) + other.coeff(k);
        }
        out
    }

    /// In-place sum over the common range.
    pub fn add_assign(&mut self, other: &EpsSeries) {
        let trunc = self.trunc().min(other.trunc());
        for k in 0..=trunc {
            self.coeffs[k] += other.coeffs[k];
        }
    }

    pub fn sub(&self, other: &EpsSeries) -> EpsSeries {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> EpsSeries {
        EpsSeries {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn mul(&self, other: &EpsSeries) -> EpsSeries {
        let trunc = self.trunc().min(other.trunc());
        let mut out = EpsSeries::zero(trunc);
        let hi2 = other
            .coeffs
            .iter()
            .rposition(|c| c.norm() != 0.0)
            .unwrap_or(0);
        let lo2 = other.valuation().unwrap_or(0);
        for i in 0..=trunc {
            if self.coeffs[i].norm() == 0.0 {
                continue;
            }
            for j in lo2..=hi2.min(trunc - i) {
                out.coeffs[i + j] += self.coeffs[i] * other.coeffs[j];
            }
        }
        out
    }

    /// Multiply by eps^k, shifting coefficients up and truncating.
    pub fn shift_up(&self, k: usize) -> EpsSeries {
        let trunc = self.trunc();
        let mut out = EpsSeries::zero(trunc);
        for i in 0..=trunc.saturating_sub(k) {
            out.coeffs[i + k] = self.coeffs[i];
        }
        out
    }

    pub fn max_abs_diff(&self, other: &EpsSeries, up_to: usize) -> f64 {
        (0..=up_to)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Zero all coefficients above `cap` in place.
    pub fn trim_above(&mut self, cap: usize) {
        for (k, c) in self.coeffs.iter_mut().enumerate() {
            if k > cap {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
}

/// Series with a tracked power offset, `eps^min_pow * (c_0 + c_1 eps + ...)`.
/// Contractions produce inverse powers; the paper's bookkeeping guarantees
/// they cancel against factors carrying positive powers, and the engine
/// checks exactly that before clearing the offset.
#[derive(Clone, Debug)]
pub struct LaurentEps {
    pub min_pow: i64,
    pub coeffs: Vec<Complex64>,
}

impl LaurentEps {
    pub fn zero_window(min_pow: i64, max_pow: i64) -> Self {
        assert!(max_pow >= min_pow);
        LaurentEps {
            min_pow,
            coeffs: vec![Complex64::new(0.0, 0.0); (max_pow - min_pow + 1) as usize],
        }
    }

    pub fn accumulate(&mut self, series: &EpsSeries, power_shift: i64, factor: Complex64) {
        for (i, c) in series.coeffs().iter().enumerate() {
            let pow = i as i64 + power_shift;
            let idx = pow - self.min_pow;
            if idx < 0 || idx as usize >= self.coeffs.len() {
                continue;
            }
            self.coeffs[idx as usize] += c * factor;
        }
    }

    /// Largest magnitude sitting at a negative power.
    pub fn negative_mass(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| (*i as i64 + self.min_pow) < 0)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    /// Clear the offset into a plain series, requiring the negative powers
    /// to have cancelled below `tol`.
    pub fn into_series(&self, trunc: usize, tol: f64) -> Result<EpsSeries, f64> {
        let mass = self.negative_mass();
        if mass > tol {
            return Err(mass);
        }
        let mut out = EpsSeries::zero(trunc);
        for (i, c) in self.coeffs.iter().enumerate() {
            let pow = i as i64 + self.min_pow;
            if pow >= 0 && (pow as usize) <= trunc {
                out.coeffs[pow as usize] = *c;
            }
        }
        Ok(out)
    }
}
