//! The noncommutative residue on symbols over the circle.
//!
//! For the two-point cosphere the residue of a symbol is the circle mean of
//! the matrix trace of its degree -1 component, summed over both branches
//! with no relative sign. Symbols whose degree lattice never meets -1, or
//! whose order lies below -1, have residue zero exactly.

use crate::symbol::{ClassicalSymbol, SymbolError, DEGREE_EPS};
use num_complex::Complex64;

/// Trusted degree window of a symbol, `[order - depth + 1, order]`.
pub fn trusted_window(a: &ClassicalSymbol) -> (f64, f64) {
    (a.lowest_degree(), a.order())
}

/// Wodzicki residue. Errors with `DepthExhausted` when the degree -1
/// component sits below the trusted window.
pub fn wres(a: &ClassicalSymbol) -> Result<Complex64, SymbolError> {
    let slot = a.order() + 1.0; // component index of degree -1, if any
    if (slot - slot.round()).abs() > DEGREE_EPS || slot.round() < 0.0 {
        // Degree -1 never occurs in the expansion: symbols of order below -1
        // and off-lattice symbols have residue zero.
        return Ok(Complex64::new(0.0, 0.0));
    }
    let j = slot.round() as usize;
    if j >= a.depth() {
        return Err(SymbolError::DepthExhausted(format!(
            "degree -1 lies below the trusted window [{}, {}]",
            a.lowest_degree(),
            a.order()
        )));
    }
    let comp = a.component(j);
    Ok(comp.plus.trace().mean() + comp.minus.trace().mean())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::CoeffFn;
    use crate::rng::SplitMix64;
    use crate::symbol::ClassicalSymbol;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_fn(rng: &mut SplitMix64, band: i64) -> CoeffFn {
        let mut f = CoeffFn::zero();
        for k in -band..=band {
            f.add_term(k, rng.complex(1.0 / (1.0 + k.abs() as f64)));
        }
        f
    }

    fn random_symbol(rng: &mut SplitMix64, order: f64, depth: usize, band: i64) -> ClassicalSymbol {
        let branches = (0..depth)
            .map(|_| (random_fn(rng, band), random_fn(rng, band)))
            .collect();
        ClassicalSymbol::scalar_from_branches(order, branches)
    }

    #[test]
    fn unit_mass_on_both_branches() {
        // degree -1 component (1, 1) integrates to 2
        let a = ClassicalSymbol::scalar_from_branches(-1.0, vec![(CoeffFn::one(), CoeffFn::one())]);
        assert_eq!(wres(&a).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn vanishes_below_order_minus_one() {
        let mut rng = SplitMix64::new(20);
        let a = random_symbol(&mut rng, -2.0, 3, 2);
        assert_eq!(wres(&a).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn off_lattice_orders_have_zero_residue() {
        let mut rng = SplitMix64::new(21);
        let a = random_symbol(&mut rng, 0.5, 2, 1);
        assert_eq!(wres(&a).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn depth_exhaustion_detected() {
        let mut rng = SplitMix64::new(22);
        // order 0, depth 1: the degree -1 slot is just below the window
        let a = random_symbol(&mut rng, 0.0, 1, 1);
        assert!(matches!(wres(&a), Err(SymbolError::DepthExhausted(_))));
        // order -1, depth 1: degree -1 is the leading component, trusted
        let b = random_symbol(&mut rng, -1.0, 1, 1);
        assert!(wres(&b).is_ok());
    }

    #[test]
    fn linear() {
        let mut rng = SplitMix64::new(23);
        let a = random_symbol(&mut rng, 0.0, 3, 2);
        let b = random_symbol(&mut rng, 0.0, 3, 2);
        let alpha = c(0.7, -0.3);
        let beta = c(-1.2, 0.4);
        let lhs = wres(&a.scale(alpha).add(&b.scale(beta)).unwrap()).unwrap();
        let rhs = alpha * wres(&a).unwrap() + beta * wres(&b).unwrap();
        assert!((lhs - rhs).norm() <= 1e-14);
    }

    #[test]
    fn kills_x_derivatives() {
        // the circle mean annihilates d/dx of every component
        let mut rng = SplitMix64::new(24);
        let a = random_symbol(&mut rng, 0.0, 3, 2);
        let mut da = a.clone();
        for j in 0..da.depth() {
            let plus = da.component(j).plus.dx();
            let minus = da.component(j).minus.dx();
            da.component_mut(j).plus = plus;
            da.component_mut(j).minus = minus;
        }
        assert_eq!(wres(&da).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn residue_of_reciprocal_symbol_matches_closed_form() {
        // wres of the parametrix of (2 + cos x)|p| is twice the circle mean
        // of 1/(2 + cos x), and the mean of 1/(a + cos x) is 1/sqrt(a^2 - 1)
        let g = CoeffFn::constant(c(2.0, 0.0)).add(&CoeffFn::cosine(1));
        let mut branches = vec![(g.clone(), g)];
        branches.extend((1..4).map(|_| (CoeffFn::zero(), CoeffFn::zero())));
        let q = ClassicalSymbol::scalar_from_branches(1.0, branches);
        let p = q.parametrix(4).unwrap().symbol;
        let got = wres(&p).unwrap();
        let want = 2.0 / 3.0f64.sqrt();
        assert!(
            (got - c(want, 0.0)).norm() <= 1e-11,
            "{got} vs {want}"
        );
    }

    #[test]
    fn trace_property_on_random_pairs() {
        let mut rng = SplitMix64::new(25);
        for trial in 0..40 {
            let ma = rng.range_i64(-1, 1) as f64;
            let mb = rng.range_i64(-1, 1) as f64;
            let a = random_symbol(&mut rng, ma, 4, 3);
            let b = random_symbol(&mut rng, mb, 4, 3);
            let comm = a.star(&b).unwrap().sub(&b.star(&a).unwrap()).unwrap();
            let r = wres(&comm).unwrap();
            assert!(
                r.norm() <= 1e-10,
                "trial {trial}: residue of commutator = {r}"
            );
        }
    }
}
