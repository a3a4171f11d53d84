//! Independent oracles shared by the integration suites. Everything here
//! is deliberately built from first principles, separate from the library's
//! own algebra, so the acceptance checks compare two routes.

use num_complex::Complex64;
use std::collections::BTreeMap;

/// Symbolic brute-force evaluation of the contraction functional: apply
/// `dx^alpha dp^beta` to `exp((i/eps) (p - q) . (x - y))` as a polynomial
/// in the differences `u_i = x^i - y^i`, `v_i = p_i - q_i` times the
/// exponential, then set u = v = 0 and collect powers of (i/eps).
///
/// Returns the coefficients of (i/eps)^m for m = 0.., as complex numbers.
pub fn brute_force_contraction(alpha: &[u8], beta: &[u8]) -> Vec<Complex64> {
    assert_eq!(alpha.len(), beta.len());
    let dim = alpha.len();
    // monomial key: (u powers, v powers, power m of (i/eps)) -> coefficient
    type Key = (Vec<u8>, Vec<u8>, usize);
    let mut poly: BTreeMap<Key, Complex64> = BTreeMap::new();
    poly.insert((vec![0; dim], vec![0; dim], 0), Complex64::new(1.0, 0.0));
    let diff = |poly: &BTreeMap<Key, Complex64>, var: usize, is_x: bool| {
        let mut out: BTreeMap<Key, Complex64> = BTreeMap::new();
        let mut add = |key: Key, c: Complex64| {
            if c.norm() == 0.0 {
                return;
            }
            *out.entry(key).or_insert(Complex64::new(0.0, 0.0)) += c;
        };
        for ((u, v, m), c) in poly {
            if is_x {
                // d/dx^i hits the polynomial factor u_i ...
                if u[var] > 0 {
                    let mut u2 = u.clone();
                    u2[var] -= 1;
                    add((u2, v.clone(), *m), c * u[var] as f64);
                }
                // ... and the exponential, pulling down (i/eps) v_i
                let mut v2 = v.clone();
                v2[var] += 1;
                add((u.clone(), v2, m + 1), *c);
            } else {
                if v[var] > 0 {
                    let mut v2 = v.clone();
                    v2[var] -= 1;
                    add((u.clone(), v2, *m), c * v[var] as f64);
                }
                let mut u2 = u.clone();
                u2[var] += 1;
                add((u2, v.clone(), m + 1), *c);
            }
        }
        out
    };
    for (i, count) in alpha.iter().enumerate() {
        for _ in 0..*count {
            poly = diff(&poly, i, true);
        }
    }
    for (j, count) in beta.iter().enumerate() {
        for _ in 0..*count {
            poly = diff(&poly, j, false);
        }
    }
    // evaluate at u = v = 0: only constant monomials survive
    let max_m = poly.keys().map(|(_, _, m)| *m).max().unwrap_or(0);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); max_m + 1];
    for ((u, v, m), c) in poly {
        if u.iter().all(|p| *p == 0) && v.iter().all(|p| *p == 0) {
            coeffs[m] += c;
        }
    }
    coeffs
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn matches_hand_values() {
        // <exp> = 1
        let c = brute_force_contraction(&[0], &[0]);
        assert_eq!(c[0], Complex64::new(1.0, 0.0));
        // <dx dp> = (i/eps)
        let c = brute_force_contraction(&[1], &[1]);
        assert_eq!(c[1], Complex64::new(1.0, 0.0));
        assert_eq!(c[0], Complex64::new(0.0, 0.0));
        // <dx^2 dp^2> = 2 (i/eps)^2
        let c = brute_force_contraction(&[2], &[2]);
        assert_eq!(c[2], Complex64::new(2.0, 0.0));
        // mismatch vanishes
        let c = brute_force_contraction(&[1, 0], &[0, 1]);
        assert!(c.iter().all(|v| v.norm() == 0.0));
    }
}
