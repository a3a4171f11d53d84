//! The outer derivation [log q, .] on symbols and the residue one-cocycle
//! built from it.
//!
//! Two construction paths are provided. The canonical path takes q = |p|,
//! where the commutator expands exactly as
//! `[log|p|, a] = sum_{k>=1} (-i)^k/k! (d_p^k log|p|) d_x^k a` with
//! `d_p^k log|p| = (-1)^{k-1} (k-1)! p^{-k}`. The elliptic path takes a
//! user-supplied positive elliptic scalar symbol q of order one and uses
//! `[log q, a] = sum_{k>=1} (-1)^{k-1}/k a^{(k)} * q^{-k}`, where a^{(k)}
//! iterates the star-commutator with q; term k drops k orders, so the sum
//! truncates against the trusted window.
//!
//! The cocycle is `c(a0, a1) = -wres(a0 * [log q, a1])`: the leading minus
//! sign is the canonical orientation of the two-point cosphere relative to
//! the plain both-branch residue normalization, and is pinned by the
//! operator-counting oracle on the winding generator.

use crate::fourier::INVERT_FLOOR;
use crate::residue::wres;
use crate::symbol::{ClassicalSymbol, SymbolError, DEGREE_EPS};
use num_complex::Complex64;

/// Derivation [log q, .] with a cached choice of q.
#[derive(Clone, Debug)]
pub struct LogDerivation {
    mode: LogMode,
    depth: usize,
}

#[derive(Clone, Debug)]
enum LogMode {
    Canonical,
    Elliptic(Box<EllipticLog>),
}

#[derive(Clone, Debug)]
struct EllipticLog {
    q: ClassicalSymbol,
    /// q^{-1}, q^{-2}, ... up to the derivation depth; write-once cache.
    inv_powers: Vec<ClassicalSymbol>,
    parametrix_residual: f64,
}

impl LogDerivation {
    /// q = |p| mode; exact term by term.
    pub fn canonical(depth: usize) -> Self {
        LogDerivation {
            mode: LogMode::Canonical,
            depth: depth.max(1),
        }
    }

    /// General mode for a scalar order-one q with positive elliptic leading
    /// symbol on both branches.
    pub fn elliptic(q: ClassicalSymbol, depth: usize) -> Result<Self, SymbolError> {
        let depth = depth.max(1);
        if q.dim() != 1 {
            return Err(SymbolError::ShapeMismatch(
                "log derivation needs a scalar q".into(),
            ));
        }
        if (q.order() - 1.0).abs() > DEGREE_EPS {
            return Err(SymbolError::ShapeMismatch(format!(
                "q must have order 1, got {}",
                q.order()
            )));
        }
        for (name, branch) in [
            ("plus", &q.component(0).plus),
            ("minus", &q.component(0).minus),
        ] {
            let f = branch.at(0, 0);
            let grid = 8 * (f.bandwidth() + 1).max(2);
            for j in 0..grid {
                let x = 2.0 * std::f64::consts::PI * j as f64 / grid as f64;
                let v = f.eval(x);
                if v.re <= INVERT_FLOOR || v.im.abs() > 1e-9 * (1.0 + v.re.abs()) {
                    return Err(SymbolError::NotElliptic(format!(
                        "leading symbol of q is not real-positive on the {name} branch (value {v} at x = {x:.3})"
                    )));
                }
            }
        }
        let par = q.parametrix(q.depth())?;
        let qinv = par.symbol;
        let mut inv_powers = vec![qinv.clone()];
        for _ in 1..depth {
            let next = inv_powers.last().unwrap().star(&qinv)?;
            inv_powers.push(next);
        }
        Ok(LogDerivation {
            mode: LogMode::Elliptic(Box::new(EllipticLog {
                q,
                inv_powers,
                parametrix_residual: par.leading_residual,
            })),
            depth,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self.mode, LogMode::Canonical)
    }

    /// Residual recorded while inverting q, zero in canonical mode.
    pub fn residual(&self) -> f64 {
        match &self.mode {
            LogMode::Canonical => 0.0,
            LogMode::Elliptic(e) => e.parametrix_residual,
        }
    }

    /// [log q, a]; the result has order(a) - 1.
    pub fn commutator(&self, a: &ClassicalSymbol) -> Result<ClassicalSymbol, SymbolError> {
        match &self.mode {
            LogMode::Canonical => self.commutator_canonical(a),
            LogMode::Elliptic(e) => self.commutator_elliptic(e, a),
        }
    }

    fn commutator_canonical(&self, a: &ClassicalSymbol) -> Result<ClassicalSymbol, SymbolError> {
        let depth = a.depth().min(self.depth);
        let order = a.order() - 1.0;
        let mut out = ClassicalSymbol::zero(order, depth, a.dim());
        let mi = Complex64::new(0.0, -1.0);
        let mut mi_pow = Complex64::new(1.0, 0.0);
        for k in 1..=depth {
            mi_pow *= mi;
            // (-i)^k/k! d_p^k log|p| = (-1)^{k-1} (-i)^k / k on p > 0 and
            // -(-i)^k / k on p < 0, at degree -k.
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let plus_c = mi_pow * sign / k as f64;
            let minus_c = -mi_pow / k as f64;
            for j in 0..=(depth - k) {
                let part = a.component(j);
                let mut plus = part.plus.clone();
                let mut minus = part.minus.clone();
                for _ in 0..k {
                    plus = plus.dx();
                    minus = minus.dx();
                }
                // lands at degree (order(a) - j) - k, i.e. output slot j + k - 1
                let slot = j + k - 1;
                let cur = out.component_mut(slot);
                cur.plus = cur.plus.add(&plus.scale(plus_c));
                cur.minus = cur.minus.add(&minus.scale(minus_c));
            }
        }
        Ok(out)
    }

    fn commutator_elliptic(
        &self,
        e: &EllipticLog,
        a: &ClassicalSymbol,
    ) -> Result<ClassicalSymbol, SymbolError> {
        let q = if a.dim() == 1 {
            e.q.clone()
        } else {
            e.q.promote(a.dim())
        };
        let mut acc: Option<ClassicalSymbol> = None;
        let mut iterated = a.clone();
        for k in 1..=self.depth {
            let prev_order = iterated.order();
            iterated = q.commutator(&iterated)?;
            if iterated.sup_norm() == 0.0 {
                break;
            }
            if iterated.order() > prev_order + DEGREE_EPS {
                // The leading cancellation fell outside the trusted window;
                // deeper terms of the expansion are not computable.
                break;
            }
            let inv_pow = if a.dim() == 1 {
                e.inv_powers[k - 1].clone()
            } else {
                e.inv_powers[k - 1].promote(a.dim())
            };
            let coeff = if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            let term = iterated.star(&inv_pow)?.scale(Complex64::new(coeff, 0.0));
            acc = Some(match acc {
                None => term,
                Some(prev) => prev.add(&term)?,
            });
        }
        match acc {
            Some(sum) => Ok(sum),
            None => Ok(ClassicalSymbol::zero(a.order() - 1.0, 1, a.dim())),
        }
    }
}

/// The residue one-cocycle c(a0, a1) on symbols of order <= 0, with the
/// matrix trace folded in through the residue.
pub fn radul(
    log: &LogDerivation,
    a0: &ClassicalSymbol,
    a1: &ClassicalSymbol,
) -> Result<Complex64, SymbolError> {
    for a in [a0, a1] {
        if a.order() > DEGREE_EPS {
            return Err(SymbolError::ShapeMismatch(format!(
                "cocycle arguments must have order <= 0, got {}",
                a.order()
            )));
        }
    }
    let w = log.commutator(a1)?;
    let prod = a0.star(&w)?;
    Ok(-wres(&prod)?)
}

/// Hochschild coboundary defect bc(a0, a1, a2); ~0 for the cocycle.
pub fn cyclic_check_b(
    log: &LogDerivation,
    a0: &ClassicalSymbol,
    a1: &ClassicalSymbol,
    a2: &ClassicalSymbol,
) -> Result<Complex64, SymbolError> {
    let first = radul(log, &a0.star(a1)?, a2)?;
    let second = radul(log, a0, &a1.star(a2)?)?;
    let third = radul(log, &a2.star(a0)?, a1)?;
    Ok(first - second + third)
}

/// Antisymmetry defect c(a0, a1) + c(a1, a0); ~0 for the cocycle.
pub fn cyclic_check_antisym(
    log: &LogDerivation,
    a0: &ClassicalSymbol,
    a1: &ClassicalSymbol,
) -> Result<Complex64, SymbolError> {
    Ok(radul(log, a0, a1)? + radul(log, a1, a0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::CoeffFn;
    use crate::rng::SplitMix64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_fn(rng: &mut SplitMix64, band: i64, scale: f64) -> CoeffFn {
        let mut f = CoeffFn::zero();
        for k in -band..=band {
            f.add_term(k, rng.complex(scale / (1.0 + k.abs() as f64)));
        }
        f
    }

    fn random_order0(rng: &mut SplitMix64, depth: usize, band: i64) -> ClassicalSymbol {
        let branches = (0..depth)
            .map(|_| (random_fn(rng, band, 1.0), random_fn(rng, band, 1.0)))
            .collect();
        ClassicalSymbol::scalar_from_branches(0.0, branches)
    }

    fn winding_generator(w: i64, depth: usize) -> ClassicalSymbol {
        let mut branches = vec![(CoeffFn::monomial(w), CoeffFn::one())];
        branches.extend((1..depth).map(|_| (CoeffFn::zero(), CoeffFn::zero())));
        ClassicalSymbol::scalar_from_branches(0.0, branches)
    }

    /// |p| as a classical symbol; admissible q for the elliptic mode.
    fn abs_p(depth: usize) -> ClassicalSymbol {
        let mut branches = vec![(CoeffFn::one(), CoeffFn::one())];
        branches.extend((1..depth).map(|_| (CoeffFn::zero(), CoeffFn::zero())));
        ClassicalSymbol::scalar_from_branches(1.0, branches)
    }

    fn two_plus_cos_q(depth: usize) -> ClassicalSymbol {
        let g = CoeffFn::constant(c(2.0, 0.0)).add(&CoeffFn::cosine(1));
        let mut branches = vec![(g.clone(), g)];
        branches.extend((1..depth).map(|_| (CoeffFn::zero(), CoeffFn::zero())));
        ClassicalSymbol::scalar_from_branches(1.0, branches)
    }

    #[test]
    fn canonical_kills_x_constants() {
        let log = LogDerivation::canonical(4);
        let a = ClassicalSymbol::constant(c(2.5, -1.0), 4);
        let out = log.commutator(&a).unwrap();
        assert!(out.sup_norm() == 0.0);
        assert_eq!(out.order(), -1.0);
    }

    #[test]
    fn canonical_commutator_with_phase_matches_shift_expansion() {
        // Operator-level oracle: [log|p|, e^{ix}] maps e^{ikx} to
        // (log|k+1| - log|k|) e^{i(k+1)x}, whose large-k expansion is
        // sum_j (-1)^{j-1}/j k^{-j}. The symbol expansion must agree
        // branchwise with that alternating series.
        let depth = 5;
        let log = LogDerivation::canonical(depth);
        let a = winding_generator(1, depth);
        let out = log.commutator(&a).unwrap();
        assert_eq!(out.order(), -1.0);
        for k in 1..=depth {
            let comp = out.component(k - 1); // degree -k
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let want_plus = CoeffFn::monomial(1).scale(c(sign / k as f64, 0.0));
            assert!(
                comp.plus.at(0, 0).approx_eq(&want_plus, 1e-13),
                "plus branch at degree -{k}"
            );
            assert!(comp.minus.at(0, 0).is_zero(), "minus branch at degree -{k}");
        }
    }

    #[test]
    fn residue_of_log_commutator_vanishes() {
        let mut rng = SplitMix64::new(31);
        let log = LogDerivation::canonical(4);
        for _ in 0..20 {
            let a = random_order0(&mut rng, 4, 3);
            let w = log.commutator(&a).unwrap();
            assert!(wres(&w).unwrap().norm() <= 1e-12);
        }
    }

    #[test]
    fn residue_of_log_commutator_vanishes_general_mode() {
        let mut rng = SplitMix64::new(37);
        let log = LogDerivation::elliptic(two_plus_cos_q(6), 4).unwrap();
        for _ in 0..10 {
            let a = random_order0(&mut rng, 5, 2);
            let w = log.commutator(&a).unwrap();
            let r = wres(&w).unwrap().norm();
            assert!(r <= 1e-10, "residue {r:.3e}");
            // and the cocycle against the unit vanishes with it
            let one = ClassicalSymbol::identity(5, 1);
            assert!(radul(&log, &one, &a).unwrap().norm() <= 1e-10);
        }
    }

    #[test]
    fn elliptic_mode_with_abs_p_matches_canonical() {
        let mut rng = SplitMix64::new(32);
        let canonical = LogDerivation::canonical(4);
        let general = LogDerivation::elliptic(abs_p(5), 4).unwrap();
        for _ in 0..10 {
            let a = random_order0(&mut rng, 4, 2);
            let lhs = canonical.commutator(&a).unwrap();
            let rhs = general.commutator(&a).unwrap();
            let defect = lhs.sub(&rhs).unwrap().sup_norm();
            assert!(defect <= 1e-10, "defect {defect}");
        }
    }

    #[test]
    fn cocycle_on_unit_and_diagonal() {
        let mut rng = SplitMix64::new(33);
        let log = LogDerivation::canonical(4);
        let one = ClassicalSymbol::identity(4, 1);
        for _ in 0..10 {
            let a = random_order0(&mut rng, 4, 2);
            assert!(radul(&log, &one, &a).unwrap().norm() <= 1e-12);
            assert!(radul(&log, &a, &a).unwrap().norm() <= 1e-11);
        }
    }

    #[test]
    fn pairing_on_winding_generator() {
        let log = LogDerivation::canonical(4);
        let q = winding_generator(1, 4);
        let p = q.parametrix(4).unwrap().symbol;
        let value = radul(&log, &p, &q).unwrap();
        assert!((value - c(-1.0, 0.0)).norm() <= 1e-12, "got {value}");
    }

    #[test]
    fn cocycle_identities_canonical() {
        let mut rng = SplitMix64::new(34);
        let log = LogDerivation::canonical(4);
        for trial in 0..25 {
            let a0 = random_order0(&mut rng, 4, 2);
            let a1 = random_order0(&mut rng, 4, 2);
            let a2 = random_order0(&mut rng, 4, 2);
            let anti = cyclic_check_antisym(&log, &a0, &a1).unwrap();
            let hoch = cyclic_check_b(&log, &a0, &a1, &a2).unwrap();
            assert!(anti.norm() <= 1e-10, "trial {trial}: antisym {anti}");
            assert!(hoch.norm() <= 1e-10, "trial {trial}: bc {hoch}");
        }
    }

    #[test]
    fn cocycle_identities_elliptic_mode() {
        let mut rng = SplitMix64::new(35);
        let log = LogDerivation::elliptic(two_plus_cos_q(6), 4).unwrap();
        for trial in 0..10 {
            let a0 = random_order0(&mut rng, 5, 2);
            let a1 = random_order0(&mut rng, 5, 2);
            let a2 = random_order0(&mut rng, 5, 2);
            let anti = cyclic_check_antisym(&log, &a0, &a1).unwrap();
            let hoch = cyclic_check_b(&log, &a0, &a1, &a2).unwrap();
            assert!(anti.norm() <= 1e-10, "trial {trial}: antisym {anti}");
            assert!(hoch.norm() <= 1e-10, "trial {trial}: bc {hoch}");
        }
    }

    #[test]
    fn cocycle_identities_matrix_inputs() {
        let mut rng = SplitMix64::new(36);
        let log = LogDerivation::canonical(4);
        let rand_mat = |rng: &mut SplitMix64| {
            let mut s = ClassicalSymbol::zero(0.0, 4, 2);
            for j in 0..4 {
                for i in 0..2 {
                    for l in 0..2 {
                        *s.component_mut(j).plus.at_mut(i, l) = random_fn(rng, 2, 1.0);
                        *s.component_mut(j).minus.at_mut(i, l) = random_fn(rng, 2, 1.0);
                    }
                }
            }
            s
        };
        for trial in 0..8 {
            let a0 = rand_mat(&mut rng);
            let a1 = rand_mat(&mut rng);
            let a2 = rand_mat(&mut rng);
            let anti = cyclic_check_antisym(&log, &a0, &a1).unwrap();
            let hoch = cyclic_check_b(&log, &a0, &a1, &a2).unwrap();
            assert!(anti.norm() <= 1e-10, "trial {trial}: antisym {anti}");
            assert!(hoch.norm() <= 1e-10, "trial {trial}: bc {hoch}");
        }
    }

    #[test]
    fn mode_agreement_on_index_pairing() {
        // the pairing value is independent of the admissible q; general
        // cocycle values need not agree pointwise, only on the pairing
        let canonical = LogDerivation::canonical(4);
        let three_plus_sin = {
            let g = CoeffFn::constant(c(3.0, 0.0)).add(&CoeffFn::sine(2));
            let mut branches = vec![(g.clone(), g)];
            branches.extend((1..6).map(|_| (CoeffFn::zero(), CoeffFn::zero())));
            ClassicalSymbol::scalar_from_branches(1.0, branches)
        };
        let generals = [
            LogDerivation::elliptic(two_plus_cos_q(6), 4).unwrap(),
            LogDerivation::elliptic(three_plus_sin, 4).unwrap(),
        ];
        for w in [-2i64, -1, 1, 2] {
            let q = winding_generator(w, 4);
            let p = q.parametrix(4).unwrap().symbol;
            let a = radul(&canonical, &p, &q).unwrap();
            assert!((a - c(-(w as f64), 0.0)).norm() <= 1e-8);
            for general in &generals {
                let b = radul(general, &p, &q).unwrap();
                assert!(
                    (a - b).norm() <= 1e-8,
                    "w={w}: canonical {a} vs general {b}"
                );
            }
        }
    }

    #[test]
    fn elliptic_mode_rejects_bad_q() {
        // not positive: leading symbol -1
        let g = CoeffFn::constant(c(-1.0, 0.0));
        let q = ClassicalSymbol::scalar_from_branches(1.0, vec![(g.clone(), g)]);
        assert!(matches!(
            LogDerivation::elliptic(q, 3),
            Err(SymbolError::NotElliptic(_))
        ));
        // wrong order
        let q2 = ClassicalSymbol::identity(3, 1);
        assert!(matches!(
            LogDerivation::elliptic(q2, 3),
            Err(SymbolError::ShapeMismatch(_))
        ));
    }
}
