//! Closed form of the Wick contraction functional.

use super::eps::{EpsSeries, LaurentEps};
use super::word::{midx_factorial, midx_total, MIdx};
use super::WickError;
use num_complex::Complex64;

/// Cap on contraction multi-index size.
pub const CONTRACTION_CAP: usize = 8;

/// `<dx^alpha dp^beta exp(Laplacian)>`: zero unless the multi-indices
/// match, and `alpha! (i/eps)^{|alpha|}` when they do. The inverse power is
/// kept as a tracked offset; callers clear it against the eps factors their
/// coefficients carry.
pub fn contract(alpha: &MIdx, beta: &MIdx, trunc: usize) -> Result<LaurentEps, WickError> {
    if alpha.len() != beta.len() {
        return Err(WickError::CapExceeded {
            what: format!(
                "contraction multi-indices live in different dimensions ({} vs {})",
                alpha.len(),
                beta.len()
            ),
        });
    }
    let n = midx_total(alpha);
    if n > CONTRACTION_CAP || midx_total(beta) > CONTRACTION_CAP {
        return Err(WickError::CapExceeded {
            what: format!("contraction order {n} exceeds cap {CONTRACTION_CAP}"),
        });
    }
    if alpha != beta {
        return Ok(LaurentEps::zero_window(0, trunc as i64));
    }
    let value =
        Complex64::new(0.0, 1.0).powu(n as u32) * Complex64::new(midx_factorial(alpha), 0.0);
    let mut out = LaurentEps::zero_window(-(n as i64), trunc as i64);
    out.accumulate(
        &EpsSeries::constant(value, trunc),
        -(n as i64),
        Complex64::new(1.0, 0.0),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn value_at(l: &LaurentEps, pow: i64) -> Complex64 {
        let idx = pow - l.min_pow;
        l.coeffs.get(idx as usize).copied().unwrap_or(c(0.0, 0.0))
    }

    #[test]
    fn empty_contraction_is_one() {
        let l = contract(&vec![0, 0], &vec![0, 0], 4).unwrap();
        assert_eq!(value_at(&l, 0), c(1.0, 0.0));
    }

    #[test]
    fn single_pairing() {
        // <dx_i dp_j exp Delta> = (i/eps) delta_ij
        let l = contract(&vec![1, 0], &vec![1, 0], 4).unwrap();
        assert_eq!(l.min_pow, -1);
        assert_eq!(value_at(&l, -1), c(0.0, 1.0));
        let z = contract(&vec![1, 0], &vec![0, 1], 4).unwrap();
        assert!(z.coeffs.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn double_pairing_counts_matchings() {
        // alpha = beta = (2): 2! (i/eps)^2 = -2 eps^{-2}
        let l = contract(&vec![2], &vec![2], 4).unwrap();
        assert_eq!(value_at(&l, -2), c(-2.0, 0.0));
        // alpha = beta = (1,1): 1 matching per dimension, (i/eps)^2
        let l2 = contract(&vec![1, 1], &vec![1, 1], 4).unwrap();
        assert_eq!(value_at(&l2, -2), c(-1.0, 0.0));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            contract(&vec![9], &vec![9], 4),
            Err(WickError::CapExceeded { .. })
        ));
    }
}
