//! Acceptance suite: every release-gating property, one test per criterion,
//! with the tolerances pinned in code. Each test prints a PASS line with
//! the measured worst case so `--nocapture` gives a one-screen summary.

mod common;

use num_complex::Complex64;
use psindex::fourier::CoeffFn;
use psindex::index::{analytic_index, topological_index};
use psindex::oracle::oracle_index;
use psindex::radul::{radul, LogDerivation};
use psindex::rng::SplitMix64;
use psindex::suite::{
    cocycle_suite, elliptic_suite, homotopy_suite, mode_agreement_suite, reference_elliptic_q,
    trace_suite, winding_symbol, SUITE_ORACLE_MODES,
};
use psindex::symbol::ClassicalSymbol;
use psindex::wick::{
    contract, multi_indices, projector, todd_det_series, top_monomial, verify_todd,
};
use std::time::Instant;

const SEED: u64 = 20260808;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Criterion 1: analytic, topological and operator-counting indices agree
/// on the generated elliptic suite, and the raw analytic value sits within
/// 1e-6 of the common integer. Per-case runtime stays under 2 s.
#[test]
fn criterion_1_three_way_index_agreement() {
    let log = LogDerivation::canonical(4);
    let cases = elliptic_suite(4, SEED);
    assert!(cases.len() >= 12, "suite has {} cases", cases.len());
    let mut worst_defect = 0.0f64;
    let mut worst_time = 0.0f64;
    for (name, q) in &cases {
        let start = Instant::now();
        let (raw, _) = analytic_index(q, &log).expect("analytic index");
        let topo = topological_index(q).expect("topological index").index;
        let oracle = oracle_index(q, &SUITE_ORACLE_MODES, 1e-8)
            .expect("oracle plateau")
            .index;
        let elapsed = start.elapsed().as_secs_f64();
        let rounded = raw.re.round() as i64;
        let defect = (raw - c(rounded as f64, 0.0)).norm();
        worst_defect = worst_defect.max(defect);
        worst_time = worst_time.max(elapsed);
        assert_eq!(
            rounded, topo,
            "{name}: analytic {raw} vs topological {topo}"
        );
        assert_eq!(
            topo, oracle,
            "{name}: topological {topo} vs oracle {oracle}"
        );
        assert!(defect <= 1e-6, "{name}: analytic defect {defect:.3e}");
        assert!(elapsed < 2.0, "{name}: runtime {elapsed:.2}s");
    }
    println!(
        "PASS criterion 1: {} cases, max analytic defect {worst_defect:.3e}, max case time {worst_time:.3}s",
        cases.len()
    );
}

/// Criterion 2: the winding generator (e^{ix} on p>0, 1 on p<0) has index
/// -1 by all three methods; this pins the orientation and sign conventions.
#[test]
fn criterion_2_generator_value() {
    let q = winding_symbol(1, 4);
    let log = LogDerivation::canonical(4);
    let (raw, _) = analytic_index(&q, &log).unwrap();
    assert!((raw - c(-1.0, 0.0)).norm() <= 1e-9, "analytic {raw}");
    let topo = topological_index(&q).unwrap();
    assert_eq!(topo.index, -1);
    assert_eq!((topo.w_plus, topo.w_minus), (1, 0));
    let oracle = oracle_index(&q, &SUITE_ORACLE_MODES, 1e-8).unwrap();
    assert_eq!(oracle.index, -1);
    println!("PASS criterion 2: generator index -1 by all methods (analytic {raw})");
}

/// Criterion 3: |wres(a*b - b*a)| <= 1e-10 over >= 100 random pairs with
/// orders in {-1, 0, 1}, depth 4, bandwidth <= 3.
#[test]
fn criterion_3_trace_property() {
    let report = trace_suite(120, SEED);
    assert!(report.pass, "{:?}", report.lines);
    println!("PASS criterion 3: {}", report.lines.join(" "));
}

/// Criterion 4: antisymmetry and Hochschild defects <= 1e-10 over >= 50
/// random order-0 triples in each derivation mode (canonical, and general
/// with q = (2 + cos x)|p|).
#[test]
fn criterion_4_cyclic_cocycle_identities() {
    // trials alternate modes, so 100 trials exercise 50 in each
    let report = cocycle_suite(100, SEED);
    assert!(report.pass, "{:?}", report.lines);
    println!("PASS criterion 4: {}", report.lines.join(" "));
}

/// Criterion 5: the pairing c(P, Q) computed with the canonical and the
/// general derivation agrees to 1e-8 across the full criterion-1 suite.
#[test]
fn criterion_5_q_independence_of_pairing() {
    let report = mode_agreement_suite(SEED);
    assert!(report.pass, "{:?}", report.lines);
    println!("PASS criterion 5: {}", report.lines.join(" "));
}

/// Criterion 6: both-sided parametrix residual components vanish to 1e-11
/// on every computable degree, down to -(depth) for the suite symbols.
#[test]
fn criterion_6_parametrix_residual() {
    let depth = 6;
    let mut worst = 0.0f64;
    let cases = elliptic_suite(depth, SEED);
    for (name, q) in &cases {
        let par = q.parametrix(depth).expect("suite symbols are elliptic");
        let one = ClassicalSymbol::identity(depth, q.dim());
        let left = par.symbol.star(q).unwrap().sub(&one).unwrap();
        let right = q.star(&par.symbol).unwrap().sub(&one).unwrap();
        for residual in [&left, &right] {
            // computable degrees reach 0, -1, ..., -(depth - 1)
            assert!(residual.lowest_degree() <= -(depth as f64 - 1.0));
            for comp in residual.components() {
                let sup = comp.sup_norm();
                worst = worst.max(sup);
                assert!(
                    sup <= 1e-11,
                    "{name}: residual {sup:.3e} at degree {}",
                    comp.degree
                );
            }
        }
    }
    println!(
        "PASS criterion 6: {} parametrices at depth {depth}, max residual component {worst:.3e}",
        cases.len()
    );
}

/// Criterion 7: the contraction engine reproduces the Todd determinant
/// identities to 1e-9 at order 6 for dims 1..3, 20 seeded trials each, and
/// the n = 1 series matches the Bernoulli values to 1e-12.
#[test]
fn criterion_7_todd_engine() {
    let mut rng = SplitMix64::new(SEED);
    let mut worst = 0.0f64;
    for dim in 1..=3usize {
        for trial in 0..20 {
            let r0: Vec<Vec<Complex64>> = (0..dim)
                .map(|_| {
                    (0..dim)
                        .map(|_| {
                            c(
                                rng.range_i64(-3, 3) as f64 / rng.range_i64(4, 8) as f64,
                                0.0,
                            )
                        })
                        .collect()
                })
                .collect();
            let report = verify_todd(&r0, 6).expect("engine caps respected");
            worst = worst.max(report.max());
            assert!(report.max() <= 1e-9, "dim {dim} trial {trial}: {report:?}");
        }
    }
    let td = todd_det_series(&[vec![c(1.0, 0.0)]], 6);
    let bernoulli = [1.0, -0.5, 1.0 / 12.0, 0.0, -1.0 / 720.0];
    for (k, want) in bernoulli.iter().enumerate() {
        let got = td.coeff(k);
        assert!(
            (got - c(*want, 0.0)).norm() <= 1e-12,
            "Todd coefficient {k}: {got} vs {want}"
        );
    }
    println!(
        "PASS criterion 7: 60 trials at order 6, max discrepancy {worst:.3e}; Bernoulli check ok"
    );
}

/// Criterion 8: the closed-form contraction equals brute-force symbolic
/// differentiation for all multi-index pairs with |alpha|, |beta| <= 4 in
/// dims 1..3.
#[test]
fn criterion_8_contraction_oracle() {
    let trunc = 6;
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for dim in 1..=3usize {
        let indices = multi_indices(dim, 4);
        for alpha in &indices {
            for beta in &indices {
                let closed = contract(alpha, beta, trunc).unwrap();
                let brute = common::brute_force_contraction(alpha, beta);
                let max_m = brute.len().max((-closed.min_pow).max(0) as usize + 1);
                for m in 0..max_m {
                    // closed form stores eps^{-m}; brute force reports the
                    // coefficient of (i/eps)^m, i.e. an extra factor i^m
                    let got = closed
                        .coeffs
                        .get((-(m as i64) - closed.min_pow) as usize)
                        .copied()
                        .unwrap_or(c(0.0, 0.0));
                    let want = brute.get(m).copied().unwrap_or(c(0.0, 0.0))
                        * Complex64::new(0.0, 1.0).powu(m as u32);
                    let diff = (got - want).norm();
                    worst = worst.max(diff);
                    assert!(
                        diff <= 1e-12,
                        "dim {dim} alpha {alpha:?} beta {beta:?} power -{m}: {got} vs {want}"
                    );
                }
                checked += 1;
            }
        }
    }
    println!("PASS criterion 8: {checked} contraction pairs, max discrepancy {worst:.3e}");
}

/// Criterion 9: supertrace normalizations are exact for dims 1..4.
#[test]
fn criterion_9_supertrace_normalizations() {
    for n in 1..=4usize {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(
            top_monomial(n).supertrace(),
            c(sign, 0.0),
            "top monomial at n = {n}"
        );
        assert_eq!(
            projector(n).supertrace(),
            c(1.0, 0.0),
            "projector at n = {n}"
        );
    }
    println!("PASS criterion 9: supertrace normalizations exact for n <= 4");
}

/// Criterion 10: index reports are unchanged under order -1 perturbations,
/// zero-winding invertible multipliers, and constant conjugation, over 20
/// randomized trials.
#[test]
fn criterion_10_homotopy_invariance() {
    let report = homotopy_suite(20, SEED);
    assert!(report.pass, "{:?}", report.lines);
    println!("PASS criterion 10: {}", report.lines.join(" "));
}

/// The derivation-mode agreement asserted by criterion 5 holds at the
/// pairing level even though general-mode cocycle values may differ by a
/// coboundary; spot-check that both modes hit the hand value -1 on the
/// generator.
#[test]
fn pairing_value_pinned_in_both_modes() {
    let q = winding_symbol(1, 4);
    let p = q.parametrix(4).unwrap().symbol;
    let canonical = LogDerivation::canonical(4);
    let general = LogDerivation::elliptic(reference_elliptic_q(6), 4).unwrap();
    for log in [&canonical, &general] {
        let v = radul(log, &p, &q).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() <= 1e-8, "{v}");
    }
    // and the residue convention underneath is the plain two-branch sum
    let unit_mass =
        ClassicalSymbol::scalar_from_branches(-1.0, vec![(CoeffFn::one(), CoeffFn::one())]);
    assert_eq!(psindex::wres(&unit_mass).unwrap(), c(2.0, 0.0));
}
