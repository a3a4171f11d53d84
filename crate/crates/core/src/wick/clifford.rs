//! Exterior-algebra endomorphisms as normal-ordered words in creation and
//! annihilation generators, with the graded trace.
//!
//! Generators psi^i and psibar_i obey the anticommutation relations
//! `{psi^i, psi^j} = 0`, `{psibar_i, psibar_j} = 0`,
//! `{psi^i, psibar_j} = delta^i_j`. Basis monomials are written with all
//! psi factors first, indices strictly ascending in each block. The graded
//! trace is supported on the unique top monomial.

use num_complex::Complex64;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    Psi(usize),
    PsiBar(usize),
}

/// Element of the Clifford algebra on `dim` generators of each kind, as a
/// map from (psi index set, psibar index set) bitmasks to coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    dim: usize,
    terms: BTreeMap<(u64, u64), Complex64>,
}

impl CliffordElement {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= 32);
        CliffordElement {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        let mut e = CliffordElement::zero(dim);
        e.add_term((0, 0), Complex64::new(1.0, 0.0));
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u64, u64), &Complex64)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, key: (u64, u64), c: Complex64) {
        if c.norm() == 0.0 {
            return;
        }
        let entry = self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() <= 1e-15 {
            self.terms.remove(&key);
        }
    }

    /// Canonicalize an arbitrary generator sequence into the element it
    /// represents, applying the anticommutation relations eagerly.
    pub fn from_word(dim: usize, word: &[Gen]) -> Self {
        let mut out = CliffordElement::zero(dim);
        normal_order(word.to_vec(), Complex64::new(1.0, 0.0), &mut out);
        out
    }

    pub fn add(&self, other: &CliffordElement) -> CliffordElement {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(*k, *c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CliffordElement {
        let mut out = CliffordElement::zero(self.dim);
        for (k, c) in self.terms() {
            out.add_term(*k, c * s);
        }
        out
    }

    pub fn mul(&self, other: &CliffordElement) -> CliffordElement {
        assert_eq!(self.dim, other.dim);
        let mut out = CliffordElement::zero(self.dim);
        for ((eta1, theta1), c1) in self.terms() {
            for ((eta2, theta2), c2) in other.terms() {
                let mut word = Vec::new();
                push_mask(&mut word, *eta1, false, self.dim);
                push_mask(&mut word, *theta1, true, self.dim);
                push_mask(&mut word, *eta2, false, self.dim);
                push_mask(&mut word, *theta2, true, self.dim);
                normal_order(word, c1 * c2, &mut out);
            }
        }
        out
    }

    /// Graded trace: supported on the top monomial, normalized so that
    /// `tr_s(psi^1..psi^n psibar_n..psibar_1) = (-1)^n`.
    pub fn supertrace(&self) -> Complex64 {
        let full = if self.dim == 64 {
            u64::MAX
        } else {
            (1u64 << self.dim) - 1
        };
        let coeff = self
            .terms
            .get(&(full, full))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0));
        // reversing the descending psibar block of the reference monomial
        // into ascending order costs (-1)^{n(n-1)/2}
        let n = self.dim;
        let sign = if (n + n * (n - 1) / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        coeff * sign
    }
}

fn push_mask(word: &mut Vec<Gen>, mask: u64, bar: bool, dim: usize) {
    for i in 0..dim {
        if mask & (1 << i) != 0 {
            word.push(if bar { Gen::PsiBar(i) } else { Gen::Psi(i) });
        }
    }
}

/// Rewrite `coeff * word` into canonical basis monomials, accumulating into
/// `out`. One relation is applied per recursion step.
fn normal_order(word: Vec<Gen>, coeff: Complex64, out: &mut CliffordElement) {
    if coeff.norm() == 0.0 {
        return;
    }
    for t in 0..word.len().saturating_sub(1) {
        match (word[t], word[t + 1]) {
            (Gen::Psi(i), Gen::Psi(j)) if i == j => return, // square is zero
            (Gen::PsiBar(i), Gen::PsiBar(j)) if i == j => return,
            (Gen::Psi(i), Gen::Psi(j)) if i > j => {
                let mut swapped = word.clone();
                swapped.swap(t, t + 1);
                normal_order(swapped, -coeff, out);
                return;
            }
            (Gen::PsiBar(i), Gen::PsiBar(j)) if i > j => {
                let mut swapped = word.clone();
                swapped.swap(t, t + 1);
                normal_order(swapped, -coeff, out);
                return;
            }
            (Gen::PsiBar(i), Gen::Psi(j)) => {
                // psibar_i psi^j = delta_i^j - psi^j psibar_i
                if i == j {
                    let mut contracted = word.clone();
                    contracted.drain(t..t + 2);
                    normal_order(contracted, coeff, out);
                }
                let mut swapped = word.clone();
                swapped.swap(t, t + 1);
                normal_order(swapped, -coeff, out);
                return;
            }
            _ => {}
        }
    }
    // word is normal ordered: split into masks
    let mut eta = 0u64;
    let mut theta = 0u64;
    for g in &word {
        match g {
            Gen::Psi(i) => eta |= 1 << i,
            Gen::PsiBar(i) => theta |= 1 << i,
        }
    }
    out.add_term((eta, theta), coeff);
}

/// The projection onto functions, `psibar_1 psi^1 ... psibar_n psi^n`.
pub fn projector(dim: usize) -> CliffordElement {
    let mut word = Vec::new();
    for i in 0..dim {
        word.push(Gen::PsiBar(i));
        word.push(Gen::Psi(i));
    }
    CliffordElement::from_word(dim, &word)
}

/// The reference top monomial `psi^1 .. psi^n psibar_n .. psibar_1`.
pub fn top_monomial(dim: usize) -> CliffordElement {
    let mut word = Vec::new();
    for i in 0..dim {
        word.push(Gen::Psi(i));
    }
    for i in (0..dim).rev() {
        word.push(Gen::PsiBar(i));
    }
    CliffordElement::from_word(dim, &word)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn car_relation() {
        // psibar_0 psi^0 = 1 - psi^0 psibar_0
        let e = CliffordElement::from_word(1, &[Gen::PsiBar(0), Gen::Psi(0)]);
        let mut want = CliffordElement::one(1);
        want.add_term((1, 1), c(-1.0, 0.0));
        assert_eq!(e, want);
    }

    #[test]
    fn squares_vanish() {
        assert!(CliffordElement::from_word(2, &[Gen::Psi(1), Gen::Psi(1)])
            .terms
            .is_empty());
        let prod = CliffordElement::from_word(2, &[Gen::Psi(0)])
            .mul(&CliffordElement::from_word(2, &[Gen::Psi(0)]));
        assert!(prod.terms.is_empty());
    }

    #[test]
    fn canonicalization_is_involutive() {
        // re-normal-ordering a canonical element changes nothing
        for n in 1..=3usize {
            let e = projector(n);
            let again = e.mul(&CliffordElement::one(n));
            assert_eq!(e, again);
        }
    }

    #[test]
    fn supertrace_vanishes_below_top() {
        for n in 1..=4usize {
            assert_eq!(CliffordElement::one(n).supertrace(), c(0.0, 0.0));
            let single = CliffordElement::from_word(n, &[Gen::Psi(0), Gen::PsiBar(0)]);
            if n > 1 {
                assert_eq!(single.supertrace(), c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn supertrace_normalization_on_top_monomial() {
        for n in 1..=4usize {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(top_monomial(n).supertrace(), c(sign, 0.0), "n={n}");
        }
    }

    #[test]
    fn supertrace_of_projector_is_one() {
        for n in 1..=4usize {
            assert_eq!(projector(n).supertrace(), c(1.0, 0.0), "n={n}");
        }
    }

    #[test]
    fn supertrace_is_linear() {
        let a = top_monomial(2);
        let b = projector(2);
        let alpha = c(0.5, 1.5);
        let beta = c(-2.0, 0.25);
        let lhs = a.scale(alpha).add(&b.scale(beta)).supertrace();
        let rhs = alpha * a.supertrace() + beta * b.supertrace();
        assert!((lhs - rhs).norm() <= 1e-14);
    }
}
