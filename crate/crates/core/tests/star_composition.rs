//! The star product against genuine operator composition.
//!
//! Quantization is an algebra map up to the truncation order: the matrix of
//! Op(a star b) on a mode window must agree with Op(a) Op(b) composed
//! through exactly chained windows, with a defect that decays like
//! |k|^(-depth) down the columns. This exercises the star coefficients
//! through a route that never touches the symbol algebra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use psindex::oracle::quantize;
use psindex::rng::SplitMix64;
use psindex::suite::random_scalar_symbol;

fn column_norm(m: &DMatrix<Complex64>, col: usize) -> f64 {
    (0..m.nrows())
        .map(|r| m[(r, col)].norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[test]
fn star_product_matches_operator_composition_to_truncation_order() {
    let mut rng = SplitMix64::new(77);
    let k_max = 24i64;
    for trial in 0..4 {
        let depth = 4;
        let a = random_scalar_symbol(&mut rng, 0.0, depth, 2);
        let b = random_scalar_symbol(&mut rng, 0.0, depth, 2);
        let c = a.star(&b).unwrap();
        let (ba, bb, bc) = (a.max_bandwidth(), b.max_bandwidth(), c.max_bandwidth());
        // chain windows exactly: Op(b): K -> K+bb, Op(a): K+bb -> K+bb+ba
        let qb = quantize(&b, k_max).unwrap();
        let qa = quantize(&a, k_max + bb).unwrap();
        let composite = &qa.matrix * &qb.matrix;
        let qc = quantize(&c, k_max).unwrap();
        let rows_big = (2 * (k_max + ba + bb) + 1) as usize;
        let mut embedded = DMatrix::<Complex64>::zeros(rows_big, (2 * k_max + 1) as usize);
        let off = (ba + bb - bc) as usize;
        for r in 0..qc.matrix.nrows() {
            for col in 0..qc.matrix.ncols() {
                embedded[(r + off, col)] = qc.matrix[(r, col)];
            }
        }
        let diff = composite - embedded;
        for sign in [-1i64, 1] {
            let at = |k: i64| column_norm(&diff, (sign * k + k_max) as usize);
            // observed ratios sit near (4/16)^4 ~ 4e-3; allow a 5x margin
            let ratio = at(16) / at(4).max(1e-12);
            assert!(
                ratio <= 0.02,
                "trial {trial} sign {sign}: tail decay ratio {ratio:.4}"
            );
            assert!(
                at(24) <= 1e-3,
                "trial {trial} sign {sign}: window-edge defect {:.3e}",
                at(24)
            );
        }
    }
}

#[test]
fn exact_star_of_shift_symbols_composes_exactly() {
    // degree-0 branch pairs have vanishing p-derivatives, so the star is
    // the pointwise product and quantization composes with no truncation
    // defect at all away from the p = 0 column
    let a = psindex::suite::winding_symbol(1, 2);
    let b = psindex::suite::two_branch_symbol(-2, 1, 2);
    let c = a.star(&b).unwrap();
    let k_max = 8i64;
    let qb = quantize(&b, k_max).unwrap();
    let qa = quantize(&a, k_max + b.max_bandwidth()).unwrap();
    let composite = &qa.matrix * &qb.matrix;
    let qc = quantize(&c, k_max).unwrap();
    let (ba, bb, bc) = (a.max_bandwidth(), b.max_bandwidth(), c.max_bandwidth());
    let off = (ba + bb - bc) as usize;
    for k in -k_max..=k_max {
        if k.abs() <= 2 {
            continue; // the p = 0 branch convention spreads over |k| <= band
        }
        let col = (k + k_max) as usize;
        for r in 0..qc.matrix.nrows() {
            let d = (composite[(r + off, col)] - qc.matrix[(r, col)]).norm();
            assert!(d <= 1e-13, "k={k} row={r}: defect {d:.3e}");
        }
    }
}
