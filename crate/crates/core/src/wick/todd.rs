//! Todd determinant identities, checked through two independent pipelines:
//! Duhamel expansion plus Wick contraction on one side, the determinant of
//! the matrix series R/(e^R - 1) on the other.

use super::eps::EpsSeries;
use super::rational::{bernoulli, factorial};
use super::word::{duhamel_exp_windowed, evaluate, midx_total, multi_indices, PPoly, WeylWord};
use super::WickError;
use num_complex::Complex64;

/// Square matrix of truncated series.
#[derive(Clone, Debug)]
pub struct SeriesMatrix {
    dim: usize,
    entries: Vec<EpsSeries>,
}

impl SeriesMatrix {
    pub fn zero(dim: usize, trunc: usize) -> Self {
        SeriesMatrix {
            dim,
            entries: vec![EpsSeries::zero(trunc); dim * dim],
        }
    }

    pub fn identity(dim: usize, trunc: usize) -> Self {
        let mut m = SeriesMatrix::zero(dim, trunc);
        for i in 0..dim {
            m.entries[i * dim + i] = EpsSeries::one(trunc);
        }
        m
    }

    /// eps * R0 for a constant matrix R0.
    pub fn from_constant_times_eps(r0: &[Vec<Complex64>], trunc: usize) -> Self {
        let dim = r0.len();
        let mut m = SeriesMatrix::zero(dim, trunc);
        for i in 0..dim {
            assert_eq!(r0[i].len(), dim);
            for j in 0..dim {
                m.entries[i * dim + j] = EpsSeries::monomial(r0[i][j], 1, trunc);
            }
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &EpsSeries {
        &self.entries[i * self.dim + j]
    }

    pub fn add(&self, other: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!(self.dim, other.dim);
        SeriesMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> SeriesMatrix {
        SeriesMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.scale(s)).collect(),
        }
    }

    pub fn mul(&self, other: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!(self.dim, other.dim);
        let trunc = self.entries[0].trunc();
        let mut out = SeriesMatrix::zero(self.dim, trunc);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = EpsSeries::zero(trunc);
                for l in 0..self.dim {
                    acc = acc.add(&self.at(i, l).mul(other.at(l, j)));
                }
                out.entries[i * self.dim + j] = acc;
            }
        }
        out
    }

    /// Determinant by Laplace expansion on series entries.
    pub fn det(&self) -> EpsSeries {
        match self.dim {
            1 => self.entries[0].clone(),
            _ => {
                let trunc = self.entries[0].trunc();
                let mut acc = EpsSeries::zero(trunc);
                for j in 0..self.dim {
                    let term = self.at(0, j).mul(&self.minor(0, j).det());
                    let signed = if j % 2 == 0 {
                        term
                    } else {
                        term.scale(Complex64::new(-1.0, 0.0))
                    };
                    acc = acc.add(&signed);
                }
                acc
            }
        }
    }

    fn minor(&self, row: usize, col: usize) -> SeriesMatrix {
        let mut entries = Vec::new();
        for i in 0..self.dim {
            if i == row {
                continue;
            }
            for j in 0..self.dim {
                if j == col {
                    continue;
                }
                entries.push(self.at(i, j).clone());
            }
        }
        SeriesMatrix {
            dim: self.dim - 1,
            entries,
        }
    }
}

/// The matrix series R/(e^R - 1) = sum_m B_m/m! R^m.
pub fn todd_matrix(r: &SeriesMatrix, trunc: usize) -> SeriesMatrix {
    let b = bernoulli(trunc);
    let mut acc = SeriesMatrix::identity(r.dim, trunc).scale(Complex64::new(b[0].to_f64(), 0.0));
    let mut power = SeriesMatrix::identity(r.dim, trunc);
    for m in 1..=trunc {
        power = power.mul(r);
        let coeff = b[m].to_f64() / factorial(m) as f64;
        acc = acc.add(&power.scale(Complex64::new(coeff, 0.0)));
    }
    acc
}

/// det(R/(e^R - 1)) for R = eps * R0, truncated at eps^trunc.
pub fn todd_det_series(r0: &[Vec<Complex64>], trunc: usize) -> EpsSeries {
    let r = SeriesMatrix::from_constant_times_eps(r0, trunc);
    todd_matrix(&r, trunc).det()
}

/// Discrepancies of the three contraction identities at a given matrix.
#[derive(Clone, Debug)]
pub struct ToddReport {
    /// contraction of exp(Delta + p R dp) against the determinant series
    pub disc_exp: f64,
    /// the x-derivative identity, one entry per base direction
    pub disc_dx: f64,
    /// vanishing of (i eps dx + p R)^mu contractions for 1 <= |mu| <= 2
    pub disc_iden: f64,
}

impl ToddReport {
    pub fn max(&self) -> f64 {
        self.disc_exp.max(self.disc_dx).max(self.disc_iden)
    }
}

/// Verify the contraction identities for the perturbation p R dp with
/// R = eps R0, comparing coefficients through eps^trunc.
pub fn verify_todd(r0: &[Vec<Complex64>], trunc: usize) -> Result<ToddReport, WickError> {
    let dim = r0.len();
    // A term with m x-derivatives carries eps^{2m} and the contraction
    // shifts it down by m, so coefficients through eps^trunc draw on word
    // coefficients through eps^{2 trunc}; prepended bare x-derivatives
    // (|mu| <= 2) widen both ends by two more.
    let internal = 2 * trunc + 4;
    let max_levels = trunc + 2;
    let perturbation = scaling_perturbation(r0, internal);
    let word = duhamel_exp_windowed(&perturbation, max_levels, 2, trunc)?;
    let td = todd_det_series(r0, internal);

    // <exp(Delta + p R dp)> = Td(R)
    let lhs0 = evaluate(&word)?;
    let rhs0 = PPoly::constant(dim, td.clone());
    let disc_exp = lhs0.max_abs_diff(&rhs0, trunc);

    // <dx_i exp(...)> = (i/eps) Td(R) (p R)_i = i Td(R) sum_k R0[k][i] p_k
    let mut disc_dx = 0.0f64;
    for i in 0..dim {
        let lhs = evaluate(&WeylWord::dx_gen(dim, i, internal).mul(&word))?;
        let mut rhs = PPoly::zero(dim);
        for k in 0..dim {
            let coeff = Complex64::new(0.0, 1.0) * r0[k][i];
            let mut key = vec![0u8; dim];
            key[k] = 1;
            rhs.insert_add(key, td.scale(coeff));
        }
        disc_dx = disc_dx.max(lhs.max_abs_diff(&rhs, trunc));
    }

    // <(i eps dx + p_L R)^mu exp(...)> = 0 for 1 <= |mu| <= 2
    let mut disc_iden = 0.0f64;
    let factors: Vec<WeylWord> = (0..dim)
        .map(|i| {
            let mut f = WeylWord::dx_gen(dim, i, internal).scale_series(&EpsSeries::monomial(
                Complex64::new(0.0, 1.0),
                1,
                internal,
            ));
            for k in 0..dim {
                let p_term = WeylWord::p_gen(dim, k, internal)
                    .scale_series(&EpsSeries::monomial(r0[k][i], 1, internal));
                f = f.add(&p_term);
            }
            f
        })
        .collect();
    for mu in multi_indices(dim, 2) {
        if midx_total(&mu) == 0 {
            continue;
        }
        let mut op = WeylWord::one(dim, internal);
        for (i, count) in mu.iter().enumerate() {
            for _ in 0..*count {
                op = op.mul(&factors[i]);
            }
        }
        let lhs = evaluate(&op.mul(&word))?;
        disc_iden = disc_iden.max(lhs.max_abs(trunc));
    }

    Ok(ToddReport {
        disc_exp,
        disc_dx,
        disc_iden,
    })
}

/// The perturbation word `p_L . (eps R0) . dp`.
pub fn scaling_perturbation(r0: &[Vec<Complex64>], trunc: usize) -> WeylWord {
    let dim = r0.len();
    let mut s = WeylWord::zero(dim, trunc);
    for i in 0..dim {
        for j in 0..dim {
            if r0[i][j].norm() == 0.0 {
                continue;
            }
            let term = WeylWord::p_gen(dim, i, trunc)
                .mul(&WeylWord::dp_gen(dim, j, trunc))
                .scale_series(&EpsSeries::monomial(r0[i][j], 1, trunc));
            s = s.add(&term);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn todd_series_bernoulli_coefficients() {
        // n = 1, R0 = 1: eps/(e^eps - 1) = 1 - eps/2 + eps^2/12 - eps^4/720
        let td = todd_det_series(&[vec![c(1.0, 0.0)]], 6);
        let want = [1.0, -0.5, 1.0 / 12.0, 0.0, -1.0 / 720.0, 0.0, 1.0 / 30240.0];
        for (k, w) in want.iter().enumerate() {
            assert!(
                (td.coeff(k) - c(*w, 0.0)).norm() <= 1e-15,
                "coefficient of eps^{k}: {} vs {w}",
                td.coeff(k)
            );
        }
    }

    #[test]
    fn todd_zero_matrix_is_one() {
        let r = ToddReport {
            disc_exp: 0.0,
            disc_dx: 0.0,
            disc_iden: 0.0,
        };
        let _ = r.max();
        let report = verify_todd(&[vec![c(0.0, 0.0)]], 4).unwrap();
        assert!(report.max() == 0.0, "{report:?}");
    }

    #[test]
    fn contraction_matches_determinant_n1() {
        let report = verify_todd(&[vec![c(1.0, 0.0)]], 6).unwrap();
        assert!(report.max() <= 1e-12, "{report:?}");
    }

    #[test]
    fn contraction_matches_determinant_n2() {
        let r0 = vec![
            vec![c(0.5, 0.0), c(-0.25, 0.0)],
            vec![c(1.0 / 3.0, 0.0), c(0.125, 0.0)],
        ];
        let report = verify_todd(&r0, 6).unwrap();
        assert!(report.max() <= 1e-10, "{report:?}");
    }

    #[test]
    fn contraction_matches_determinant_n3() {
        let r0 = vec![
            vec![c(0.5, 0.0), c(0.25, 0.0), c(-0.125, 0.0)],
            vec![c(-1.0 / 3.0, 0.0), c(0.2, 0.0), c(0.5, 0.0)],
            vec![c(0.125, 0.0), c(-0.25, 0.0), c(1.0 / 6.0, 0.0)],
        ];
        let report = verify_todd(&r0, 5).unwrap();
        assert!(report.max() <= 1e-10, "{report:?}");
    }

    #[test]
    fn determinant_multiplicative_on_series() {
        let a = SeriesMatrix::from_constant_times_eps(
            &[
                vec![c(1.0, 0.0), c(0.5, 0.0)],
                vec![c(0.0, 0.0), c(2.0, 0.0)],
            ],
            4,
        )
        .add(&SeriesMatrix::identity(2, 4));
        let b = SeriesMatrix::from_constant_times_eps(
            &[
                vec![c(0.25, 0.0), c(0.0, 0.0)],
                vec![c(1.0, 0.0), c(-1.0, 0.0)],
            ],
            4,
        )
        .add(&SeriesMatrix::identity(2, 4));
        let lhs = a.mul(&b).det();
        let rhs = a.det().mul(&b.det());
        assert!(lhs.max_abs_diff(&rhs, 4) <= 1e-13);
    }
}
