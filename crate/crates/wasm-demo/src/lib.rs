//! wasm-bindgen surface for the browser demo page.
//!
//! Three interactive operations: a full index report for a symbol typed in
//! the page, the phase curve of the leading determinant on both branches
//! (for the canvas plot), and the Todd/contraction verification table.
//! Everything returns plain text or flat number arrays so the page needs no
//! framework.

use num_complex::Complex64;
use psindex::index::{index_report, IndexOptions};
use psindex::rng::SplitMix64;
use psindex::symbol::parse_symbol;
use psindex::wick::{todd_det_series, verify_todd};
use wasm_bindgen::prelude::*;

fn fmt_c(v: Complex64) -> String {
    format!(
        "{:.9}{}{:.9}i",
        v.re,
        if v.im < 0.0 { "-" } else { "+" },
        v.im.abs()
    )
}

/// Index report for a symbol in the text format, as display lines.
#[wasm_bindgen]
pub fn demo_index_report(symbol_text: &str, modes_csv: &str) -> String {
    let sym = match parse_symbol(symbol_text) {
        Ok(s) => s,
        Err(e) => return format!("parse error: {e}"),
    };
    let mut opts = IndexOptions::default();
    if !modes_csv.trim().is_empty() {
        match modes_csv
            .split(',')
            .map(|v| v.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
        {
            Ok(modes) if !modes.is_empty() => opts.oracle_modes = modes,
            _ => return format!("bad mode list: {modes_csv}"),
        }
    }
    let report = index_report(&sym, &opts);
    let mut out = String::new();
    if let Some(v) = report.analytic {
        out.push_str(&format!("analytic pairing   {}\n", fmt_c(v)));
    }
    if let Some(v) = report.analytic_rounded {
        out.push_str(&format!("analytic (rounded) {v}\n"));
    }
    if let Some(v) = report.topological {
        out.push_str(&format!("topological        {v}\n"));
    }
    if let Some(v) = report.oracle {
        out.push_str(&format!("operator oracle    {v}\n"));
    }
    for (method, message) in &report.errors {
        out.push_str(&format!("{method} failed: {message}\n"));
    }
    out.push_str(&format!(
        "agreement          {}\n",
        if report.agree { "yes" } else { "NO" }
    ));
    out
}

/// Leading determinant sampled on `samples` grid points, interleaved as
/// [re+, im+, re-, im-] per point, for the phase-curve canvas.
#[wasm_bindgen]
pub fn demo_phase_curve(symbol_text: &str, samples: usize) -> Vec<f64> {
    let sym = match parse_symbol(symbol_text) {
        Ok(s) => s,
        Err(_) => return Vec::new(),
    };
    let n = samples.clamp(16, 4096);
    let (gp, gm) = sym.leading();
    let dp = gp.det();
    let dm = gm.det();
    let mut out = Vec::with_capacity(4 * n);
    for j in 0..n {
        let x = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let vp = dp.eval(x);
        let vm = dm.eval(x);
        out.extend_from_slice(&[vp.re, vp.im, vm.re, vm.im]);
    }
    out
}

/// One seeded verification trial of the contraction/Todd identities plus
/// the leading Todd coefficients, as display lines.
#[wasm_bindgen]
pub fn demo_todd_check(dim: usize, order: usize, seed: u32) -> String {
    if dim == 0 || dim > 3 {
        return "dim must be 1, 2 or 3".into();
    }
    let order = order.clamp(1, 8);
    let mut rng = SplitMix64::new(seed as u64);
    let r0: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    Complex64::new(
                        rng.range_i64(-3, 3) as f64 / rng.range_i64(4, 8) as f64,
                        0.0,
                    )
                })
                .collect()
        })
        .collect();
    let mut out = String::new();
    for (i, row) in r0.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{:+.4}", v.re)).collect();
        out.push_str(&format!("R0[{i}] = [{}]\n", cells.join(", ")));
    }
    match verify_todd(&r0, order) {
        Ok(report) => {
            out.push_str(&format!(
                "exp identity       {:.3e}\nderivative identity {:.3e}\ncombined identity  {:.3e}\n",
                report.disc_exp, report.disc_dx, report.disc_iden
            ));
            out.push_str(&format!(
                "verdict            {}\n",
                if report.max() <= 1e-9 { "pass" } else { "FAIL" }
            ));
        }
        Err(e) => out.push_str(&format!("engine error: {e}\n")),
    }
    let td = todd_det_series(&r0, order);
    let coeffs: Vec<String> = (0..=order)
        .map(|k| format!("{:.6}", td.coeff(k).re))
        .collect();
    out.push_str(&format!("Td coefficients    [{}]\n", coeffs.join(", ")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_for_winding_generator() {
        let text = "order 0\ndepth 3\ncomponent 0\nplus: exp(i*1*x)\nminus: 1\n";
        let out = demo_index_report(text, "");
        assert!(out.contains("agreement          yes"), "{out}");
        assert!(out.contains("topological        -1"), "{out}");
    }

    #[test]
    fn phase_curve_has_requested_shape() {
        let text = "order 0\ndepth 1\ncomponent 0\nplus: exp(i*2*x)\nminus: 1\n";
        let pts = demo_phase_curve(text, 64);
        assert_eq!(pts.len(), 4 * 64);
    }

    #[test]
    fn todd_check_passes() {
        let out = demo_todd_check(2, 5, 7);
        assert!(out.contains("verdict            pass"), "{out}");
    }

    #[test]
    fn parse_errors_are_reported_as_text() {
        let out = demo_index_report("order x", "");
        assert!(out.contains("parse error"));
    }
}
