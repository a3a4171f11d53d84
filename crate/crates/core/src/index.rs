//! End-to-end index pipeline: the cocycle pairing, branch winding numbers,
//! and the reconciliation report.

use crate::oracle::{self, OracleError, OracleOutcome};
use crate::radul::{radul, LogDerivation};
use crate::symbol::{ClassicalSymbol, SymbolError, DEGREE_EPS};
use num_complex::Complex64;
use thiserror::Error;

/// Distance from an integer beyond which a computed winding is rejected.
pub const WINDING_TOL: f64 = 1e-6;

/// |analytic - round(analytic)| must stay below this for agreement.
pub const ANALYTIC_INT_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("winding {value} is {defect:.3e} away from an integer")]
    NonIntegerWinding { value: f64, defect: f64 },
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Branch windings of the leading determinant and the resulting index.
#[derive(Clone, Copy, Debug)]
pub struct TopologicalIndex {
    pub w_plus: i64,
    pub w_minus: i64,
    pub index: i64,
    /// worst distance of a raw winding from its integer
    pub defect: f64,
}

/// Winding number of a nonvanishing coefficient function, from the phase
/// increment over a uniform grid with unwrapping.
pub fn winding(f: &crate::fourier::CoeffFn) -> Result<f64, IndexError> {
    let n = (8 * (f.bandwidth() + 1)).max(16) as usize;
    let samples = f.sample(n);
    for v in &samples {
        if v.norm() <= 1e-10 {
            return Err(SymbolError::NotElliptic(
                "determinant vanishes on the winding grid".into(),
            )
            .into());
        }
    }
    let mut total = 0.0;
    for j in 0..n {
        let a = samples[j];
        let b = samples[(j + 1) % n];
        total += (b / a).arg();
    }
    Ok(total / (2.0 * std::f64::consts::PI))
}

fn winding_as_int(f: &crate::fourier::CoeffFn) -> Result<(i64, f64), IndexError> {
    let w = winding(f)?;
    let rounded = w.round();
    let defect = (w - rounded).abs();
    if defect > WINDING_TOL {
        return Err(IndexError::NonIntegerWinding { value: w, defect });
    }
    Ok((rounded as i64, defect))
}

/// Index from the leading symbol alone: w_minus - w_plus, the sign fixed by
/// the operator-counting oracle on the winding generator.
pub fn topological_index(q: &ClassicalSymbol) -> Result<TopologicalIndex, IndexError> {
    check_order_zero(q)?;
    let (gp, gm) = q.leading();
    let (w_plus, dp) = winding_as_int(&gp.det())?;
    let (w_minus, dm) = winding_as_int(&gm.det())?;
    Ok(TopologicalIndex {
        w_plus,
        w_minus,
        index: w_minus - w_plus,
        defect: dp.max(dm),
    })
}

fn check_order_zero(q: &ClassicalSymbol) -> Result<(), SymbolError> {
    if q.order().abs() > DEGREE_EPS {
        return Err(SymbolError::ShapeMismatch(format!(
            "index pipeline needs an order-0 symbol, got order {}",
            q.order()
        )));
    }
    Ok(())
}

/// Raw cocycle pairing c(P, Q) with P a parametrix of Q, plus the recorded
/// parametrix residual.
pub fn analytic_index(
    q: &ClassicalSymbol,
    log: &LogDerivation,
) -> Result<(Complex64, f64), IndexError> {
    check_order_zero(q)?;
    let par = q.parametrix(q.depth())?;
    let value = radul(log, &par.symbol, q)?;
    Ok((value, par.leading_residual))
}

/// Which methods `index_report` should run.
#[derive(Clone, Debug)]
pub struct IndexOptions {
    pub analytic: bool,
    pub topological: bool,
    pub oracle: bool,
    /// run the general-q pairing next to the canonical one
    pub general_q: Option<ClassicalSymbol>,
    pub derivation_depth: usize,
    pub oracle_modes: Vec<i64>,
    pub oracle_tol: f64,
}

impl Default for IndexOptions {
    fn default() -> Self {
        IndexOptions {
            analytic: true,
            topological: true,
            oracle: true,
            general_q: None,
            derivation_depth: 4,
            oracle_modes: vec![8, 12, 16, 20],
            oracle_tol: 1e-8,
        }
    }
}

/// Per-method error estimates; `None` where a method did not run.
#[derive(Clone, Copy, Debug, Default)]
pub struct Residuals {
    /// |analytic - nearest integer|
    pub analytic: Option<f64>,
    /// recorded parametrix inversion residual
    pub parametrix: Option<f64>,
    /// worst winding distance from an integer
    pub topological: Option<f64>,
    /// relative size of the largest singular value counted as zero
    pub oracle: Option<f64>,
}

/// Aggregated result of the three index computations.
#[derive(Clone, Debug, Default)]
pub struct IndexReport {
    pub analytic: Option<Complex64>,
    pub analytic_general: Option<Complex64>,
    pub analytic_rounded: Option<i64>,
    pub topological: Option<i64>,
    pub oracle: Option<i64>,
    pub residuals: Residuals,
    /// method name -> error message for methods that failed
    pub errors: Vec<(String, String)>,
    pub agree: bool,
}

impl IndexReport {
    fn record_error(&mut self, method: &str, err: impl std::fmt::Display) {
        self.errors.push((method.to_string(), err.to_string()));
    }

    /// All computed integers coincide and the raw analytic value sits on one.
    fn decide_agreement(&mut self) {
        let mut ints = Vec::new();
        if let Some(v) = self.analytic_rounded {
            ints.push(v);
        }
        if let Some(v) = self.topological {
            ints.push(v);
        }
        if let Some(v) = self.oracle {
            ints.push(v);
        }
        let coherent = ints.windows(2).all(|w| w[0] == w[1]);
        let on_integer = self
            .residuals
            .analytic
            .map_or(true, |d| d <= ANALYTIC_INT_TOL);
        let general_ok = match (self.analytic, self.analytic_general) {
            (Some(a), Some(b)) => (a - b).norm() <= 1e-8,
            _ => true,
        };
        self.agree =
            !ints.is_empty() && coherent && on_integer && general_ok && self.errors.is_empty();
    }
}

/// Runs the requested methods and reconciles them; failures are recorded in
/// the report rather than propagated.
pub fn index_report(q: &ClassicalSymbol, opts: &IndexOptions) -> IndexReport {
    let mut report = IndexReport::default();
    if opts.analytic {
        let log = LogDerivation::canonical(opts.derivation_depth);
        match analytic_index(q, &log) {
            Ok((value, par_res)) => {
                report.analytic = Some(value);
                report.analytic_rounded = Some(value.re.round() as i64);
                let defect = (value - Complex64::new(value.re.round(), 0.0)).norm();
                report.residuals.analytic = Some(defect);
                report.residuals.parametrix = Some(par_res);
            }
            Err(e) => report.record_error("analytic", e),
        }
        if let Some(qs) = &opts.general_q {
            match LogDerivation::elliptic(qs.clone(), opts.derivation_depth).and_then(|log| {
                analytic_index(q, &log).map_err(|e| match e {
                    IndexError::Symbol(s) => s,
                    other => SymbolError::NotElliptic(other.to_string()),
                })
            }) {
                Ok((value, _)) => report.analytic_general = Some(value),
                Err(e) => report.record_error("analytic_general", e),
            }
        }
    }
    if opts.topological {
        match topological_index(q) {
            Ok(t) => {
                report.topological = Some(t.index);
                report.residuals.topological = Some(t.defect);
            }
            Err(e) => report.record_error("topological", e),
        }
    }
    if opts.oracle {
        match oracle::oracle_index(q, &opts.oracle_modes, opts.oracle_tol) {
            Ok(OracleOutcome {
                index, residual, ..
            }) => {
                report.oracle = Some(index);
                report.residuals.oracle = Some(residual);
            }
            Err(e) => report.record_error("oracle", e),
        }
    }
    report.decide_agreement();
    report
}
