//! Truncated formal classical symbols on the circle.
//!
//! The cosphere of the circle is the two-point set {p > 0, p < 0}, so a
//! component that is positively homogeneous of degree `d` is stored as an
//! exact pair of coefficient functions, one per branch:
//! `a(x, p) = plus(x) |p|^d` for `p > 0` and `minus(x) |p|^d` for `p < 0`.
//! A symbol is a list of such components at degrees `order, order-1, ...`
//! and is only meaningful modulo terms of degree <= order - depth.

pub mod text;

use crate::fourier::{CoeffFn, FourierError, INVERT_FLOOR};
use num_complex::Complex64;
use thiserror::Error;

pub use text::{parse_symbol, render_symbol};

/// Numerical slack when comparing symbol degrees, which are reals that the
/// index pipeline keeps on an integer lattice.
pub const DEGREE_EPS: f64 = 1e-9;

/// Leading-matrix condition numbers above this trigger `NotElliptic`.
pub const CONDITION_CAP: f64 = 1e8;

/// Default bandwidth cap handed to coefficient inversion inside parametrix
/// construction.
pub const DEFAULT_BAND_CAP: i64 = 48;

/// Default residual tolerance for coefficient inversion.
pub const DEFAULT_INVERSE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SymbolError {
    #[error("depth exhausted: {0}")]
    DepthExhausted(String),
    #[error("not elliptic: {0}")]
    NotElliptic(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error(transparent)]
    Fourier(#[from] FourierError),
}

/// Square matrix of coefficient functions, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffMatrix {
    dim: usize,
    entries: Vec<CoeffFn>,
}

impl CoeffMatrix {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1);
        CoeffMatrix {
            dim,
            entries: vec![CoeffFn::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CoeffMatrix::zero(dim);
        for i in 0..dim {
            *m.at_mut(i, i) = CoeffFn::one();
        }
        m
    }

    pub fn scalar(f: CoeffFn) -> Self {
        CoeffMatrix {
            dim: 1,
            entries: vec![f],
        }
    }

    pub fn from_entries(dim: usize, entries: Vec<CoeffFn>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        CoeffMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, i: usize, j: usize) -> &CoeffFn {
        &self.entries[i * self.dim + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut CoeffFn {
        &mut self.entries[i * self.dim + j]
    }

    pub fn add(&self, other: &CoeffMatrix) -> CoeffMatrix {
        assert_eq!(self.dim, other.dim);
        CoeffMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &CoeffMatrix) -> CoeffMatrix {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> CoeffMatrix {
        CoeffMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.scale(s)).collect(),
        }
    }

    pub fn scale_fn(&self, f: &CoeffFn) -> CoeffMatrix {
        CoeffMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.mul(f)).collect(),
        }
    }

    pub fn matmul(&self, other: &CoeffMatrix) -> CoeffMatrix {
        assert_eq!(self.dim, other.dim);
        let mut out = CoeffMatrix::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = CoeffFn::zero();
                for l in 0..self.dim {
                    acc = acc.add(&self.at(i, l).mul(other.at(l, j)));
                }
                *out.at_mut(i, j) = acc;
            }
        }
        out
    }

    pub fn dx(&self) -> CoeffMatrix {
        CoeffMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.dx()).collect(),
        }
    }

    pub fn trace(&self) -> CoeffFn {
        let mut acc = CoeffFn::zero();
        for i in 0..self.dim {
            acc = acc.add(self.at(i, i));
        }
        acc
    }

    pub fn conj_transpose(&self) -> CoeffMatrix {
        let mut out = CoeffMatrix::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                *out.at_mut(i, j) = self.at(j, i).conj();
            }
        }
        out
    }

    /// Determinant by Laplace expansion; the pipeline only meets small dims.
    pub fn det(&self) -> CoeffFn {
        match self.dim {
            1 => self.at(0, 0).clone(),
            _ => {
                let mut acc = CoeffFn::zero();
                for j in 0..self.dim {
                    let minor = self.minor(0, j);
                    let term = self.at(0, j).mul(&minor.det());
                    if j % 2 == 0 {
                        acc = acc.add(&term);
                    } else {
                        acc = acc.sub(&term);
                    }
                }
                acc
            }
        }
    }

    fn minor(&self, row: usize, col: usize) -> CoeffMatrix {
        let mut entries = Vec::with_capacity((self.dim - 1) * (self.dim - 1));
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
        CoeffMatrix::from_entries(self.dim - 1, entries)
    }

    fn adjugate(&self) -> CoeffMatrix {
        if self.dim == 1 {
            return CoeffMatrix::identity(1);
        }
        let mut out = CoeffMatrix::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let cof = self.minor(i, j).det();
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                // adjugate = transpose of cofactor matrix
                *out.at_mut(j, i) = cof.scale(Complex64::new(sign, 0.0));
            }
        }
        out
    }

    pub fn sup_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.sup_norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self, eps: f64) -> bool {
        self.sup_norm() <= eps
    }

    pub fn bandwidth(&self) -> i64 {
        self.entries
            .iter()
            .map(|e| e.bandwidth())
            .max()
            .unwrap_or(0)
    }

    pub fn approx_eq(&self, other: &CoeffMatrix, eps: f64) -> bool {
        self.sub(other).sup_norm() <= eps
    }

    /// Frobenius norm evaluated at a point of the circle.
    fn frobenius_at(&self, x: f64) -> f64 {
        self.entries
            .iter()
            .map(|e| e.eval(x).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Pointwise matrix inverse via adjugate and coefficient inversion.
    ///
    /// Fails with `NotElliptic` when the determinant dips below the
    /// invertibility floor or the condition number exceeds `CONDITION_CAP`;
    /// bandwidth exhaustion inside the reciprocal propagates as a Fourier
    /// error. Returns the inverse and the recorded residual of `m * inv - 1`.
    pub fn inverse(&self, band_cap: i64, tol: f64) -> Result<(CoeffMatrix, f64), SymbolError> {
        let det = self.det();
        let inv_det = match det.inverse(band_cap, tol) {
            Ok(inv) => inv,
            Err(FourierError::NotInvertible { min_abs }) => {
                return Err(SymbolError::NotElliptic(format!(
                    "leading determinant has min |det| = {min_abs:.3e} <= {INVERT_FLOOR:.0e}"
                )))
            }
            Err(e) => return Err(e.into()),
        };
        let inv = self.adjugate().scale_fn(&inv_det.value);
        let grid = 8 * (self.bandwidth().max(inv.bandwidth()) + 1);
        let mut cond: f64 = 0.0;
        for j in 0..grid {
            let x = 2.0 * std::f64::consts::PI * j as f64 / grid as f64;
            cond = cond.max(self.frobenius_at(x) * inv.frobenius_at(x));
        }
        if cond > CONDITION_CAP {
            return Err(SymbolError::NotElliptic(format!(
                "leading matrix condition number {cond:.3e} exceeds {CONDITION_CAP:.0e}"
            )));
        }
        let defect = self.matmul(&inv).sub(&CoeffMatrix::identity(self.dim));
        let residual = defect
            .entries
            .iter()
            .map(|e| e.l1_norm())
            .fold(0.0, f64::max);
        Ok((inv, residual))
    }
}

/// One positively homogeneous component, given branchwise.
#[derive(Clone, Debug, PartialEq)]
pub struct HomComponent {
    pub degree: f64,
    pub plus: CoeffMatrix,
    pub minus: CoeffMatrix,
}

impl HomComponent {
    pub fn zero(degree: f64, dim: usize) -> Self {
        HomComponent {
            degree,
            plus: CoeffMatrix::zero(dim),
            minus: CoeffMatrix::zero(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.plus.dim()
    }

    pub fn is_zero(&self, eps: f64) -> bool {
        self.plus.is_zero(eps) && self.minus.is_zero(eps)
    }

    pub fn sup_norm(&self) -> f64 {
        self.plus.sup_norm().max(self.minus.sup_norm())
    }

    fn add(&self, other: &HomComponent) -> HomComponent {
        debug_assert!((self.degree - other.degree).abs() < DEGREE_EPS);
        HomComponent {
            degree: self.degree,
            plus: self.plus.add(&other.plus),
            minus: self.minus.add(&other.minus),
        }
    }

    fn scale(&self, s: Complex64) -> HomComponent {
        HomComponent {
            degree: self.degree,
            plus: self.plus.scale(s),
            minus: self.minus.scale(s),
        }
    }

    /// k-th p-derivative. On the branch p > 0 a degree-d term picks up the
    /// falling factorial d(d-1)...(d-k+1); on p < 0 an extra (-1)^k.
    /// Degree-0 components are annihilated exactly.
    fn p_derivative(&self, k: u32) -> HomComponent {
        let mut ff = 1.0;
        for step in 0..k {
            ff *= self.degree - step as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        HomComponent {
            degree: self.degree - k as f64,
            plus: self.plus.scale(Complex64::new(ff, 0.0)),
            minus: self.minus.scale(Complex64::new(sign * ff, 0.0)),
        }
    }

    fn x_derivative(&self, k: u32) -> HomComponent {
        let mut plus = self.plus.clone();
        let mut minus = self.minus.clone();
        for _ in 0..k {
            plus = plus.dx();
            minus = minus.dx();
        }
        HomComponent {
            degree: self.degree,
            plus,
            minus,
        }
    }

    /// Branchwise matrix product; degrees add.
    fn branch_mul(&self, other: &HomComponent) -> HomComponent {
        HomComponent {
            degree: self.degree + other.degree,
            plus: self.plus.matmul(&other.plus),
            minus: self.minus.matmul(&other.minus),
        }
    }
}

/// Truncated formal classical symbol. `components[j]` has degree `order - j`
/// and the symbol is trusted only modulo degrees <= order - depth.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalSymbol {
    order: f64,
    dim: usize,
    components: Vec<HomComponent>,
}

/// Parametrix together with the residual recorded from the leading-term
/// inversion, for downstream error budgets.
#[derive(Clone, Debug)]
pub struct Parametrix {
    pub symbol: ClassicalSymbol,
    pub leading_residual: f64,
}

fn powers_of_minus_i(max_k: usize) -> Vec<Complex64> {
    let mi = Complex64::new(0.0, -1.0);
    let mut v = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..max_k {
        v.push(v.last().unwrap() * mi);
    }
    v
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl ClassicalSymbol {
    pub fn new(order: f64, dim: usize, components: Vec<HomComponent>) -> Self {
        assert!(
            !components.is_empty(),
            "symbol needs at least one component"
        );
        for (j, comp) in components.iter().enumerate() {
            assert!(
                (comp.degree - (order - j as f64)).abs() < DEGREE_EPS,
                "component {j} has degree {} but order - j = {}",
                comp.degree,
                order - j as f64
            );
            assert_eq!(comp.plus.dim(), dim);
            assert_eq!(comp.minus.dim(), dim);
        }
        ClassicalSymbol {
            order,
            dim,
            components,
        }
    }

    pub fn zero(order: f64, depth: usize, dim: usize) -> Self {
        let components = (0..depth.max(1))
            .map(|j| HomComponent::zero(order - j as f64, dim))
            .collect();
        ClassicalSymbol::new(order, dim, components)
    }

    pub fn identity(depth: usize, dim: usize) -> Self {
        let mut s = ClassicalSymbol::zero(0.0, depth, dim);
        s.components[0].plus = CoeffMatrix::identity(dim);
        s.components[0].minus = CoeffMatrix::identity(dim);
        s
    }

    pub fn constant(c: Complex64, depth: usize) -> Self {
        ClassicalSymbol::identity(depth, 1).scale(c)
    }

    /// Scalar symbol from a list of branch pairs starting at `order`.
    pub fn scalar_from_branches(order: f64, branches: Vec<(CoeffFn, CoeffFn)>) -> Self {
        let components = branches
            .into_iter()
            .enumerate()
            .map(|(j, (plus, minus))| HomComponent {
                degree: order - j as f64,
                plus: CoeffMatrix::scalar(plus),
                minus: CoeffMatrix::scalar(minus),
            })
            .collect();
        ClassicalSymbol::new(order, 1, components)
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn depth(&self) -> usize {
        self.components.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[HomComponent] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &HomComponent {
        &self.components[j]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut HomComponent {
        &mut self.components[j]
    }

    /// Lowest trusted degree, `order - depth + 1`.
    pub fn lowest_degree(&self) -> f64 {
        self.order - self.depth() as f64 + 1.0
    }

    pub fn component_at_degree(&self, degree: f64) -> Option<&HomComponent> {
        let j = self.order - degree;
        if j < -DEGREE_EPS || (j - j.round()).abs() > DEGREE_EPS {
            return None;
        }
        let j = j.round() as usize;
        self.components.get(j)
    }

    pub fn sup_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.sup_norm())
            .fold(0.0, f64::max)
    }

    pub fn max_bandwidth(&self) -> i64 {
        self.components
            .iter()
            .map(|c| c.plus.bandwidth().max(c.minus.bandwidth()))
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, s: Complex64) -> ClassicalSymbol {
        ClassicalSymbol {
            order: self.order,
            dim: self.dim,
            components: self.components.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn neg(&self) -> ClassicalSymbol {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    /// Embed a scalar symbol diagonally into dimension `dim`.
    pub fn promote(&self, dim: usize) -> ClassicalSymbol {
        assert_eq!(self.dim, 1);
        let components = self
            .components
            .iter()
            .map(|c| {
                let mut plus = CoeffMatrix::zero(dim);
                let mut minus = CoeffMatrix::zero(dim);
                for i in 0..dim {
                    *plus.at_mut(i, i) = c.plus.at(0, 0).clone();
                    *minus.at_mut(i, i) = c.minus.at(0, 0).clone();
                }
                HomComponent {
                    degree: c.degree,
                    plus,
                    minus,
                }
            })
            .collect();
        ClassicalSymbol::new(self.order, dim, components)
    }

    /// Block-diagonal direct sum of two symbols with matching grading.
    pub fn block_diag(&self, other: &ClassicalSymbol) -> Result<ClassicalSymbol, SymbolError> {
        if (self.order - other.order).abs() > DEGREE_EPS || self.depth() != other.depth() {
            return Err(SymbolError::ShapeMismatch(
                "block_diag needs matching order and depth".into(),
            ));
        }
        let dim = self.dim + other.dim;
        let mut out = ClassicalSymbol::zero(self.order, self.depth(), dim);
        for j in 0..self.depth() {
            for (i, l) in (0..self.dim).flat_map(|i| (0..self.dim).map(move |l| (i, l))) {
                *out.components[j].plus.at_mut(i, l) = self.components[j].plus.at(i, l).clone();
                *out.components[j].minus.at_mut(i, l) = self.components[j].minus.at(i, l).clone();
            }
            for (i, l) in (0..other.dim).flat_map(|i| (0..other.dim).map(move |l| (i, l))) {
                *out.components[j].plus.at_mut(self.dim + i, self.dim + l) =
                    other.components[j].plus.at(i, l).clone();
                *out.components[j].minus.at_mut(self.dim + i, self.dim + l) =
                    other.components[j].minus.at(i, l).clone();
            }
        }
        Ok(out)
    }

    /// Pointwise complex conjugation, branchwise and entrywise, with no
    /// transpose; degrees are unchanged.
    pub fn conj(&self) -> ClassicalSymbol {
        let components = self
            .components
            .iter()
            .map(|c| {
                let mut plus = c.plus.clone();
                let mut minus = c.minus.clone();
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        *plus.at_mut(i, j) = c.plus.at(i, j).conj();
                        *minus.at_mut(i, j) = c.minus.at(i, j).conj();
                    }
                }
                HomComponent {
                    degree: c.degree,
                    plus,
                    minus,
                }
            })
            .collect();
        ClassicalSymbol::new(self.order, self.dim, components)
    }

    /// Entrywise conjugate transpose; degrees are unchanged.
    pub fn conj_transpose(&self) -> ClassicalSymbol {
        let components = self
            .components
            .iter()
            .map(|c| HomComponent {
                degree: c.degree,
                plus: c.plus.conj_transpose(),
                minus: c.minus.conj_transpose(),
            })
            .collect();
        ClassicalSymbol::new(self.order, self.dim, components)
    }

    fn check_lattice(&self, other: &ClassicalSymbol) -> Result<(), SymbolError> {
        let gap = self.order - other.order;
        if (gap - gap.round()).abs() > DEGREE_EPS {
            return Err(SymbolError::ShapeMismatch(format!(
                "orders {} and {} do not differ by an integer; components cannot align",
                self.order, other.order
            )));
        }
        Ok(())
    }

    fn check_dim(&self, other: &ClassicalSymbol) -> Result<(), SymbolError> {
        if self.dim != other.dim {
            return Err(SymbolError::ShapeMismatch(format!(
                "matrix sizes {} and {} differ",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// Degree-aligned sum. The result is trusted on the overlap of the two
    /// valid windows.
    pub fn add(&self, other: &ClassicalSymbol) -> Result<ClassicalSymbol, SymbolError> {
        self.check_dim(other)?;
        self.check_lattice(other)?;
        let order = self.order.max(other.order);
        let bottom = self.lowest_degree().max(other.lowest_degree());
        let depth = ((order - bottom).round() as i64 + 1).max(1) as usize;
        let mut out = ClassicalSymbol::zero(order, depth, self.dim);
        for j in 0..depth {
            let degree = order - j as f64;
            let mut comp = HomComponent::zero(degree, self.dim);
            for src in [self, other] {
                // Degrees above a summand's own order contribute zero.
                if degree > src.order + DEGREE_EPS {
                    continue;
                }
                if let Some(c) = src.component_at_degree(degree) {
                    comp = comp.add(c);
                }
            }
            out.components[j] = comp;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ClassicalSymbol) -> Result<ClassicalSymbol, SymbolError> {
        self.add(&other.neg())
    }

    /// Composition of symbols: sum over k of (-i)^k / k! (d_p^k a)(d_x^k b),
    /// truncated to the overlap window.
    pub fn star(&self, other: &ClassicalSymbol) -> Result<ClassicalSymbol, SymbolError> {
        self.check_dim(other)?;
        self.check_lattice(other)?;
        let order = self.order + other.order;
        let depth = self.depth().min(other.depth());
        let coeffs = powers_of_minus_i(depth);
        let mut out = ClassicalSymbol::zero(order, depth, self.dim);
        for j in 0..depth {
            let mut comp = HomComponent::zero(order - j as f64, self.dim);
            for ja in 0..=j {
                for jb in 0..=(j - ja) {
                    let k = (j - ja - jb) as u32;
                    let a_part = self.components[ja].p_derivative(k);
                    if a_part.is_zero(0.0) {
                        continue;
                    }
                    let b_part = other.components[jb].x_derivative(k);
                    let factor = coeffs[k as usize] / factorial(k as usize);
                    comp = comp.add(&a_part.branch_mul(&b_part).scale(factor));
                }
            }
            out.components[j] = comp;
        }
        Ok(out)
    }

    /// a * b - b * a; numerically-vanished leading components are dropped so
    /// the effective order reflects the cancellation.
    pub fn commutator(&self, other: &ClassicalSymbol) -> Result<ClassicalSymbol, SymbolError> {
        let diff = self.star(other)?.sub(&other.star(self)?)?;
        let eps = 1e-12 * (1.0 + self.sup_norm() * other.sup_norm());
        Ok(diff.drop_zero_leading(eps))
    }

    /// Pop leading components whose sup norm is below `eps`. The trusted
    /// window bottom is unchanged, so no information is lost.
    pub fn drop_zero_leading(&self, eps: f64) -> ClassicalSymbol {
        let mut start = 0;
        while start + 1 < self.components.len() && self.components[start].is_zero(eps) {
            start += 1;
        }
        if start == 0 {
            return self.clone();
        }
        ClassicalSymbol::new(
            self.order - start as f64,
            self.dim,
            self.components[start..].to_vec(),
        )
    }

    /// The degree-`order` branch pair.
    pub fn leading(&self) -> (&CoeffMatrix, &CoeffMatrix) {
        (&self.components[0].plus, &self.components[0].minus)
    }

    /// Inverse modulo degrees below `order(q) - depth`, built degree by
    /// degree from the leading inverse on each branch.
    pub fn parametrix(&self, depth: usize) -> Result<Parametrix, SymbolError> {
        let depth = depth.max(1);
        if depth > self.depth() {
            return Err(SymbolError::DepthExhausted(format!(
                "parametrix depth {depth} exceeds symbol depth {}",
                self.depth()
            )));
        }
        let band_cap = DEFAULT_BAND_CAP.max(8 * (self.max_bandwidth() + 1));
        let (gp_inv, rp) = self.components[0]
            .plus
            .inverse(band_cap, DEFAULT_INVERSE_TOL)?;
        let (gm_inv, rm) = self.components[0]
            .minus
            .inverse(band_cap, DEFAULT_INVERSE_TOL)?;
        let order = -self.order;
        let mut b = ClassicalSymbol::zero(order, depth, self.dim);
        b.components[0].plus = gp_inv.clone();
        b.components[0].minus = gm_inv.clone();
        let coeffs = powers_of_minus_i(depth);
        for j in 1..depth {
            // Degree -j component of b * q, excluding the unknown b_j q_0
            // term; the recursion chooses b_j to cancel the rest.
            let mut acc = HomComponent::zero(-(j as f64), self.dim);
            for jb in 0..j {
                for k in 0..=(j - jb) {
                    let jq = j - jb - k;
                    let b_part = b.components[jb].p_derivative(k as u32);
                    if b_part.is_zero(0.0) {
                        continue;
                    }
                    let q_part = self.components[jq].x_derivative(k as u32);
                    let factor = coeffs[k] / factorial(k);
                    acc = acc.add(&b_part.branch_mul(&q_part).scale(factor));
                }
            }
            b.components[j].plus = acc.plus.matmul(&gp_inv).scale(Complex64::new(-1.0, 0.0));
            b.components[j].minus = acc.minus.matmul(&gm_inv).scale(Complex64::new(-1.0, 0.0));
        }
        Ok(Parametrix {
            symbol: b,
            leading_residual: rp.max(rm),
        })
    }

    /// Max sup norm over the computable components of `b*q - 1` and `q*b - 1`.
    pub fn parametrix_residual(&self, b: &ClassicalSymbol) -> Result<f64, SymbolError> {
        let one = ClassicalSymbol::identity(self.depth().min(b.depth()), self.dim);
        let left = b.star(self)?.sub(&one)?;
        let right = self.star(b)?.sub(&one)?;
        Ok(left.sup_norm().max(right.sup_norm()))
    }
}
