//! Normal-ordered words in p-left multiplications and derivative
//! placeholders, with series coefficients.
//!
//! Generators per base dimension: `p_i` (left multiplication), `dx_i` and
//! `dp_i` (derivative placeholders). Normal order keeps all p factors to
//! the left; the rewriting uses `[dp_i, p_j] = delta_ij` and `[dx_i, p_j]
//! = 0`, applied eagerly so map keys are canonical. The flat Laplacian is
//! `i eps sum_i dx_i dp_i`, and words are evaluated against its
//! exponential by Wick contraction.

use super::eps::{EpsSeries, LaurentEps};
use super::rational::{binomial, factorial, Rat};
use super::WickError;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Multi-index over the base dimensions.
pub type MIdx = Vec<u8>;

pub fn midx_total(m: &MIdx) -> usize {
    m.iter().map(|v| *v as usize).sum()
}

pub fn midx_factorial(m: &MIdx) -> f64 {
    m.iter().map(|v| factorial(*v as usize) as f64).product()
}

/// All multi-indices of total degree <= max_total, in a deterministic order.
pub fn multi_indices(dim: usize, max_total: usize) -> Vec<MIdx> {
    let mut out = vec![vec![0u8; dim]];
    for _ in 0..max_total {
        let mut next = Vec::new();
        for m in &out {
            if midx_total(m) == max_total {
                continue;
            }
            for i in 0..dim {
                let mut m2 = m.clone();
                m2[i] += 1;
                next.push(m2);
            }
        }
        out.extend(next);
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WordKey {
    pub p: MIdx,
    pub dx: MIdx,
    pub dp: MIdx,
}

impl WordKey {
    pub fn unit(dim: usize) -> Self {
        WordKey {
            p: vec![0; dim],
            dx: vec![0; dim],
            dp: vec![0; dim],
        }
    }
}

/// Word keys packed into a u64: three blocks (p, dx, dp) of four 4-bit
/// per-dimension counts. Counts in this engine stay well below the field
/// cap of 15; overflow asserts rather than corrupting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Packed(u64);

const FIELD_MAX: u8 = 15;

impl Packed {
    const UNIT: Packed = Packed(0);

    fn get(self, block: usize, d: usize) -> u8 {
        ((self.0 >> (16 * block + 4 * d)) & 0xF) as u8
    }

    fn bump(self, block: usize, d: usize, v: u8) -> Packed {
        let cur = self.get(block, d);
        assert!(cur + v <= FIELD_MAX, "word exponent field overflow");
        Packed(self.0 + ((v as u64) << (16 * block + 4 * d)))
    }

    fn drop(self, block: usize, d: usize, v: u8) -> Packed {
        debug_assert!(self.get(block, d) >= v);
        Packed(self.0 - ((v as u64) << (16 * block + 4 * d)))
    }

    /// Blockwise sum; panics on field overflow.
    fn merge(self, other: Packed) -> Packed {
        let sum = Packed(self.0 + other.0);
        debug_assert!(
            (0..3).all(|b| (0..4)
                .all(|d| self.get(b, d) as u16 + other.get(b, d) as u16 <= FIELD_MAX as u16)),
            "word exponent field overflow"
        );
        sum
    }

    fn block(self, block: usize) -> u16 {
        ((self.0 >> (16 * block)) & 0xFFFF) as u16
    }

    fn pack(key: &WordKey) -> Packed {
        assert!(key.p.len() <= 4);
        let mut out = Packed(0);
        for (block, idx) in [(0usize, &key.p), (1, &key.dx), (2, &key.dp)] {
            for (d, v) in idx.iter().enumerate() {
                out = out.bump(block, d, *v);
            }
        }
        out
    }

    fn unpack(self, dim: usize) -> WordKey {
        let mut key = WordKey::unit(dim);
        for d in 0..dim {
            key.p[d] = self.get(0, d);
            key.dx[d] = self.get(1, d);
            key.dp[d] = self.get(2, d);
        }
        key
    }

    fn midx(self, block: usize, dim: usize) -> MIdx {
        (0..dim).map(|d| self.get(block, d)).collect()
    }

    fn total(self, block: usize) -> u32 {
        (0..4).map(|d| self.get(block, d) as u32).sum()
    }
}

/// Finite sum of normal-ordered terms `coeff(eps) p^gamma dx^alpha dp^beta`.
#[derive(Clone, Debug)]
pub struct WeylWord {
    dim: usize,
    trunc: usize,
    terms: BTreeMap<Packed, EpsSeries>,
}

impl WeylWord {
    pub fn zero(dim: usize, trunc: usize) -> Self {
        assert!(dim >= 1 && dim <= 4);
        WeylWord {
            dim,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize, trunc: usize) -> Self {
        let mut w = WeylWord::zero(dim, trunc);
        w.terms.insert(Packed::UNIT, EpsSeries::one(trunc));
        w
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (WordKey, &EpsSeries)> {
        self.terms.iter().map(|(k, s)| (k.unpack(self.dim), s))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|s| s.is_zero())
    }

    pub fn coeff(&self, key: &WordKey) -> EpsSeries {
        self.terms
            .get(&Packed::pack(key))
            .cloned()
            .unwrap_or_else(|| EpsSeries::zero(self.trunc))
    }

    pub fn add_term(&mut self, key: WordKey, series: EpsSeries) {
        self.add_packed(Packed::pack(&key), series);
    }

    fn add_packed(&mut self, key: Packed, series: EpsSeries) {
        if series.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(cur) => {
                cur.add_assign(&series);
                if cur.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, series);
            }
        }
    }

    /// Single generator p_i.
    pub fn p_gen(dim: usize, i: usize, trunc: usize) -> Self {
        let mut w = WeylWord::zero(dim, trunc);
        w.terms
            .insert(Packed::UNIT.bump(0, i, 1), EpsSeries::one(trunc));
        w
    }

    /// Single generator dx_i.
    pub fn dx_gen(dim: usize, i: usize, trunc: usize) -> Self {
        let mut w = WeylWord::zero(dim, trunc);
        w.terms
            .insert(Packed::UNIT.bump(1, i, 1), EpsSeries::one(trunc));
        w
    }

    /// Single generator dp_i.
    pub fn dp_gen(dim: usize, i: usize, trunc: usize) -> Self {
        let mut w = WeylWord::zero(dim, trunc);
        w.terms
            .insert(Packed::UNIT.bump(2, i, 1), EpsSeries::one(trunc));
        w
    }

    /// The flat Laplacian `i eps sum_i dx_i dp_i`.
    pub fn laplacian(dim: usize, trunc: usize) -> Self {
        let mut w = WeylWord::zero(dim, trunc);
        for i in 0..dim {
            w.terms.insert(
                Packed::UNIT.bump(1, i, 1).bump(2, i, 1),
                EpsSeries::monomial(Complex64::new(0.0, 1.0), 1, trunc),
            );
        }
        w
    }

    pub fn add(&self, other: &WeylWord) -> WeylWord {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &WeylWord) {
        assert_eq!(self.dim, other.dim);
        for (k, s) in other.terms.iter() {
            self.add_packed(*k, s.clone());
        }
    }

    pub fn scale(&self, s: Complex64) -> WeylWord {
        let mut out = WeylWord::zero(self.dim, self.trunc);
        for (k, series) in self.terms.iter() {
            out.add_packed(*k, series.scale(s));
        }
        out
    }

    pub fn scale_series(&self, s: &EpsSeries) -> WeylWord {
        let mut out = WeylWord::zero(self.dim, self.trunc);
        for (k, series) in self.terms.iter() {
            out.add_packed(*k, series.mul(s));
        }
        out
    }

    /// Product with eager normal ordering: dp factors of the left term are
    /// commuted past p factors of the right one, each contraction removing
    /// one of each with the count factor `C(b, v) g!/(g-v)!` per dimension.
    pub fn mul(&self, other: &WeylWord) -> WeylWord {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut out = WeylWord::zero(dim, self.trunc.min(other.trunc));
        for (k1, s1) in self.terms.iter() {
            for (k2, s2) in other.terms.iter() {
                let coeff = s1.mul(s2);
                if coeff.is_zero() {
                    continue;
                }
                let merged = k1.merge(*k2);
                // enumerate contraction counts v per dimension
                let mut stack: Vec<(Packed, f64)> = vec![(merged, 1.0)];
                for d in 0..dim {
                    let max_v = k1.get(2, d).min(k2.get(0, d));
                    if max_v == 0 {
                        continue;
                    }
                    let b = k1.get(2, d) as i128;
                    let g = k2.get(0, d) as i128;
                    let mut next = Vec::with_capacity(stack.len() * (max_v as usize + 1));
                    for (key, factor) in &stack {
                        next.push((*key, *factor));
                        for v in 1..=max_v {
                            let mut ff = 1.0f64;
                            for step in 0..v as i128 {
                                ff *= (g - step) as f64;
                            }
                            let count = binomial(b, v as i128) as f64 * ff;
                            next.push((key.drop(0, d, v).drop(2, d, v), factor * count));
                        }
                    }
                    stack = next;
                }
                for (key, factor) in stack {
                    out.add_packed(key, coeff.scale(Complex64::new(factor, 0.0)));
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &WeylWord) -> WeylWord {
        self.mul(other)
            .add(&other.mul(self).scale(Complex64::new(-1.0, 0.0)))
    }

    /// Smallest eps-valuation over all terms; `None` for the zero word.
    pub fn valuation(&self) -> Option<usize> {
        self.terms.values().filter_map(|s| s.valuation()).min()
    }

    /// Drop terms that can never again contract against the Laplacian
    /// exponential once at most `extra_dx` x-derivatives are prepended, and
    /// zero coefficients above `report + dp_total`, the highest power the
    /// contraction shift can pull down into the reported range.
    fn retain_contraction_window(&mut self, extra_dx: u32, report: usize) {
        self.terms.retain(|key, series| {
            let dx = key.total(1);
            let dp = key.total(2);
            if dp < dx || dp > dx + extra_dx {
                return false;
            }
            series.trim_above(report + dp as usize);
            !series.is_zero()
        });
    }

    /// Largest coefficient magnitude across terms.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|s| s.max_abs()).fold(0.0, f64::max)
    }
}

/// Conjugation by exp(t Laplacian) as a polynomial in t: returns
/// `[s, ad(s)/1!, ad^2(s)/2!, ...]` up to the first vanishing level. Each
/// bracket with the Laplacian trades one p factor for `i eps dx`, so the
/// list has at most max-p-degree + 1 entries.
pub fn sigma_levels(s: &WeylWord) -> Vec<WeylWord> {
    let delta = WeylWord::laplacian(s.dim(), s.trunc());
    let mut levels = vec![s.clone()];
    let mut k = 1.0;
    loop {
        let prev = levels.last().unwrap();
        let next = delta.commutator(prev).scale(Complex64::new(1.0 / k, 0.0));
        if next.is_zero() {
            break;
        }
        levels.push(next);
        k += 1.0;
    }
    levels
}

/// Expansion of `exp(Laplacian + s) exp(-Laplacian)` as iterated simplex
/// integrals of conjugated perturbations, truncated at the word's eps
/// order. Simplex integrals of the t-monomials are evaluated in exact
/// rational arithmetic. Every term of `s` must carry at least one power of
/// eps.
pub fn duhamel_exp(s: &WeylWord) -> Result<WeylWord, WickError> {
    duhamel_exp_with_levels(s, s.trunc())
}

/// `duhamel_exp` with an explicit bound on the number of perturbation
/// factors. Each factor carries at least one power of eps, so callers that
/// only read contracted output through a lower order can cap the depth.
///
/// A product of k conjugated factors with t-powers (a_1, ..., a_k)
/// integrates over the ordered simplex to the exact rational
/// `prod_i 1/(a_1 + ... + a_i + i)`. Partial products sharing the running
/// denominator `e_i = a_1 + ... + a_i + i` are grouped, so each level
/// divides a consolidated word by one exact integer instead of walking
/// every tuple.
pub fn duhamel_exp_with_levels(s: &WeylWord, max_levels: usize) -> Result<WeylWord, WickError> {
    duhamel_core(s, max_levels, None)
}

/// `duhamel_exp` specialized to callers that will only contract the result
/// against the Laplacian exponential after prepending at most `extra_dx`
/// bare x-derivatives, reading coefficients through eps^report.
///
/// Along products with conjugated perturbation factors, both
/// `dp_total - dx_total` and `power - dp_total` are non-decreasing per
/// term, so terms outside the contraction window and coefficients above
/// `report + dp_total` can never re-enter it and are pruned eagerly.
pub fn duhamel_exp_windowed(
    s: &WeylWord,
    max_levels: usize,
    extra_dx: u32,
    report: usize,
) -> Result<WeylWord, WickError> {
    duhamel_core(s, max_levels, Some((extra_dx, report)))
}

fn duhamel_core(
    s: &WeylWord,
    max_levels: usize,
    window: Option<(u32, usize)>,
) -> Result<WeylWord, WickError> {
    match s.valuation() {
        None => return Ok(WeylWord::one(s.dim(), s.trunc())),
        Some(0) => {
            return Err(WickError::NotFormallySmall);
        }
        Some(_) => {}
    }
    let trunc = s.trunc();
    let levels = sigma_levels(s);
    if levels.len() > 8 {
        return Err(WickError::CapExceeded {
            what: format!(
                "perturbation needs {} conjugation levels (cap 8)",
                levels.len()
            ),
        });
    }
    let mut acc = WeylWord::one(s.dim(), trunc);
    let mut states: BTreeMap<i128, WeylWord> = BTreeMap::new();
    states.insert(0, WeylWord::one(s.dim(), trunc));
    for _depth in 0..max_levels {
        let mut next: BTreeMap<i128, WeylWord> = BTreeMap::new();
        for (e, prefix) in &states {
            for (a, level) in levels.iter().enumerate() {
                let mut word = prefix.mul(level);
                if let Some((extra_dx, report)) = window {
                    word.retain_contraction_window(extra_dx, report);
                }
                if word.is_zero() {
                    continue;
                }
                match word.valuation() {
                    Some(v) if v <= trunc => {}
                    _ => continue,
                }
                let e2 = e + a as i128 + 1;
                let scaled = word.scale(Complex64::new(Rat::new(1, e2).to_f64(), 0.0));
                acc.add_assign(&scaled);
                match next.get_mut(&e2) {
                    Some(cur) => cur.add_assign(&scaled),
                    None => {
                        next.insert(e2, scaled);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        states = next;
    }
    Ok(acc)
}

/// Polynomial in p with series coefficients: the image of the contraction
/// map on a trace-class word.
#[derive(Clone, Debug)]
pub struct PPoly {
    pub dim: usize,
    pub terms: BTreeMap<MIdx, EpsSeries>,
}

impl PPoly {
    pub fn zero(dim: usize) -> Self {
        PPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, series: EpsSeries) -> Self {
        let mut p = PPoly::zero(dim);
        if !series.is_zero() {
            p.terms.insert(vec![0; dim], series);
        }
        p
    }

    pub fn insert_add(&mut self, key: MIdx, series: EpsSeries) {
        if series.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(cur) => *cur = cur.add(&series),
            None => {
                self.terms.insert(key, series);
            }
        }
    }

    /// Max coefficientwise discrepancy against `other` through eps^up_to.
    pub fn max_abs_diff(&self, other: &PPoly, up_to: usize) -> f64 {
        let mut worst = 0.0f64;
        let keys: std::collections::BTreeSet<&MIdx> =
            self.terms.keys().chain(other.terms.keys()).collect();
        for key in keys {
            let zero = EpsSeries::zero(up_to);
            let a = self.terms.get(key).unwrap_or(&zero);
            let b = other.terms.get(key).unwrap_or(&zero);
            worst = worst.max(a.max_abs_diff(b, up_to));
        }
        worst
    }

    pub fn max_abs(&self, up_to: usize) -> f64 {
        self.max_abs_diff(&PPoly::zero(self.dim), up_to)
    }
}

/// Threshold below which cancelled inverse powers are cleared in
/// contraction results.
pub const NEGATIVE_POWER_TOL: f64 = 1e-9;

/// Wick contraction of `word * exp(Laplacian)`: a term
/// `c(eps) p^gamma dx^alpha dp^beta` contributes
/// `c(eps) alpha! (i/eps)^{|alpha|} p^gamma` when alpha == beta and nothing
/// otherwise. Inverse powers must cancel against eps factors carried by the
/// coefficients; surviving negative mass is an error.
pub fn evaluate(word: &WeylWord) -> Result<PPoly, WickError> {
    let trunc = word.trunc();
    let dim = word.dim();
    let max_shift = word
        .terms
        .keys()
        .filter(|k| k.block(1) == k.block(2))
        .map(|k| k.total(1) as i64)
        .max()
        .unwrap_or(0);
    let mut buckets: BTreeMap<MIdx, LaurentEps> = BTreeMap::new();
    for (key, series) in word.terms.iter() {
        if key.block(1) != key.block(2) {
            continue; // contraction vanishes unless the multi-indices match
        }
        let alpha = key.midx(1, dim);
        let n = midx_total(&alpha);
        let factor =
            Complex64::new(0.0, 1.0).powu(n as u32) * Complex64::new(midx_factorial(&alpha), 0.0);
        let bucket = buckets
            .entry(key.midx(0, dim))
            .or_insert_with(|| LaurentEps::zero_window(-max_shift, trunc as i64));
        bucket.accumulate(series, -(n as i64), factor);
    }
    let mut out = PPoly::zero(dim);
    for (key, bucket) in buckets {
        match bucket.into_series(trunc, NEGATIVE_POWER_TOL) {
            Ok(series) => out.insert_add(key, series),
            Err(mass) => return Err(WickError::NegativeValuation { magnitude: mass }),
        }
    }
    Ok(out)
}
