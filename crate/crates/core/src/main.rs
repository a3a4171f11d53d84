//! Command-line driver. Every subcommand prints human-oriented `#` comment
//! lines plus machine-readable `key=value` lines, one per line. Exit code 0
//! means success (and agreement where applicable), 1 a computational
//! failure or disagreement, 2 a usage or parse error.

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use psindex::config::Config;
use psindex::index::{index_report, IndexOptions};
use psindex::oracle::{self, OracleError};
use psindex::radul::{radul, LogDerivation};
use psindex::residue::{trusted_window, wres};
use psindex::rng::SplitMix64;
use psindex::suite;
use psindex::symbol::{parse_symbol, render_symbol, ClassicalSymbol};
use psindex::wick::{todd_det_series, verify_todd};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "psindex",
    about = "Pseudodifferential symbol calculus and index computations on the circle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Star product of two symbol files, rendered to stdout
    Star {
        a: PathBuf,
        b: PathBuf,
        /// write the product to a file instead of stdout
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Wodzicki residue of a symbol file
    Residue { file: PathBuf },
    /// Residue one-cocycle c(a0, a1)
    Radul {
        a0: PathBuf,
        a1: PathBuf,
        /// `canonical` or a path to an order-one positive elliptic symbol
        #[arg(long, default_value = "canonical")]
        q: String,
        /// derivation depth
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Parametrix of an elliptic symbol
    Parametrix {
        q: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Index of an elliptic order-0 symbol; exit code 0 iff methods agree
    Index {
        symbol: PathBuf,
        /// analytic | topological | oracle | all
        #[arg(long, default_value = "all")]
        method: String,
        /// `canonical` or a path to an order-one positive elliptic symbol;
        /// a symbol path adds the general-q pairing next to the canonical one
        #[arg(long, default_value = "canonical")]
        q: String,
        /// oracle mode windows
        #[arg(long, value_delimiter = ',')]
        modes: Option<Vec<i64>>,
        #[arg(long)]
        depth: Option<usize>,
        /// relative singular-value threshold
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Operator-counting oracle index
    Oracle {
        q: PathBuf,
        #[arg(long, value_delimiter = ',')]
        modes: Option<Vec<i64>>,
        #[arg(long)]
        tol: Option<f64>,
        /// force the exact mode-counting path (errors if inapplicable)
        #[arg(long)]
        exact: bool,
    },
    /// Verify the Wick-contraction/Todd-determinant identities
    VerifyTodd {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// series truncation order
        #[arg(long, default_value_t = 6)]
        order: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Randomized verification suites
    Check {
        /// trace | cocycle | homotopy | agreement | mode-agreement | all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn fmt_c(v: Complex64) -> String {
    let re = if v.re == 0.0 { 0.0 } else { v.re };
    let im = if v.im == 0.0 { 0.0 } else { v.im };
    format!("{re:?},{im:?}")
}

fn fmt_e(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.3e}")
}

fn resolve_seed(flag: Option<u64>, config: &Config) -> u64 {
    if let Some(s) = flag {
        return s;
    }
    if let Ok(env) = std::env::var("PSINDEX_SEED") {
        if let Ok(v) = env.parse() {
            return v;
        }
    }
    config.seed
}

fn load_symbol(path: &PathBuf) -> Result<ClassicalSymbol, ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(ExitCode::from(2));
        }
    };
    match parse_symbol(&text) {
        Ok(s) => Ok(s),
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            Err(ExitCode::from(2))
        }
    }
}

fn load_log_derivation(spec: &str, depth: usize) -> Result<LogDerivation, ExitCode> {
    if spec == "canonical" {
        return Ok(LogDerivation::canonical(depth));
    }
    let q = load_symbol(&PathBuf::from(spec))?;
    match LogDerivation::elliptic(q, depth) {
        Ok(log) => Ok(log),
        Err(e) => {
            eprintln!("error: q symbol rejected: {e}");
            Err(ExitCode::from(1))
        }
    }
}

fn computational(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = Config::default();
    match cli.command {
        Command::Star { a, b, out } => {
            let (sa, sb) = match (load_symbol(&a), load_symbol(&b)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(c), _) | (_, Err(c)) => return c,
            };
            let prod = match sa.star(&sb) {
                Ok(p) => p,
                Err(e) => return computational(e),
            };
            let text = render_symbol(&prod);
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Command::Residue { file } => {
            let sym = match load_symbol(&file) {
                Ok(s) => s,
                Err(c) => return c,
            };
            let (lo, hi) = trusted_window(&sym);
            match wres(&sym) {
                Ok(v) => {
                    println!("# trusted degrees [{lo}, {hi}]");
                    println!("wres={}", fmt_c(v));
                    ExitCode::SUCCESS
                }
                Err(e) => computational(e),
            }
        }
        Command::Radul { a0, a1, q, depth } => {
            let depth = depth.unwrap_or(config.depth);
            let (s0, s1) = match (load_symbol(&a0), load_symbol(&a1)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(c), _) | (_, Err(c)) => return c,
            };
            let log = match load_log_derivation(&q, depth) {
                Ok(l) => l,
                Err(c) => return c,
            };
            match radul(&log, &s0, &s1) {
                Ok(v) => {
                    println!(
                        "# mode={}",
                        if log.is_canonical() {
                            "canonical"
                        } else {
                            "general"
                        }
                    );
                    println!("# inversion_residual={}", fmt_e(log.residual()));
                    println!("c={}", fmt_c(v));
                    ExitCode::SUCCESS
                }
                Err(e) => computational(e),
            }
        }
        Command::Parametrix { q, depth, out } => {
            let sym = match load_symbol(&q) {
                Ok(s) => s,
                Err(c) => return c,
            };
            let depth = depth.unwrap_or(sym.depth());
            let par = match sym.parametrix(depth) {
                Ok(p) => p,
                Err(e) => return computational(e),
            };
            let residual = match sym.parametrix_residual(&par.symbol) {
                Ok(r) => r,
                Err(e) => return computational(e),
            };
            let text = format!(
                "# parametrix, two-sided residual {:.3e}\n{}",
                residual,
                render_symbol(&par.symbol)
            );
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                    println!("residual={}", fmt_e(residual));
                }
                // keep stdout a parseable symbol file; the residual rides
                // in the comment header
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Command::Index {
            symbol,
            method,
            q,
            modes,
            depth,
            tol,
        } => {
            let sym = match load_symbol(&symbol) {
                Ok(s) => s,
                Err(c) => return c,
            };
            let mut opts = IndexOptions {
                derivation_depth: depth.unwrap_or(config.depth),
                oracle_modes: modes.unwrap_or(config.oracle_modes.clone()),
                oracle_tol: tol.unwrap_or(config.oracle_tol),
                ..IndexOptions::default()
            };
            match method.as_str() {
                "all" => {}
                "analytic" => {
                    opts.topological = false;
                    opts.oracle = false;
                }
                "topological" => {
                    opts.analytic = false;
                    opts.oracle = false;
                }
                "oracle" => {
                    opts.analytic = false;
                    opts.topological = false;
                }
                other => {
                    eprintln!("error: unknown method `{other}`");
                    return ExitCode::from(2);
                }
            }
            if q != "canonical" {
                let qs = match load_symbol(&PathBuf::from(&q)) {
                    Ok(s) => s,
                    Err(c) => return c,
                };
                opts.general_q = Some(qs);
            }
            let report = index_report(&sym, &opts);
            if let Some(v) = report.analytic {
                println!("analytic={}", fmt_c(v));
            }
            if let Some(v) = report.analytic_general {
                println!("analytic_general={}", fmt_c(v));
            }
            if let Some(v) = report.analytic_rounded {
                println!("analytic_rounded={v}");
            }
            if let Some(v) = report.topological {
                println!("topological={v}");
            }
            if let Some(v) = report.oracle {
                println!("oracle={v}");
            }
            if let Some(r) = report.residuals.analytic {
                println!("residual_analytic={}", fmt_e(r));
            }
            if let Some(r) = report.residuals.parametrix {
                println!("residual_parametrix={}", fmt_e(r));
            }
            if let Some(r) = report.residuals.topological {
                println!("residual_topological={}", fmt_e(r));
            }
            if let Some(r) = report.residuals.oracle {
                println!("residual_oracle={}", fmt_e(r));
            }
            for (method, message) in &report.errors {
                println!("error_{method}={message}");
            }
            println!("agree={}", report.agree);
            if report.agree {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Oracle {
            q,
            modes,
            tol,
            exact,
        } => {
            let sym = match load_symbol(&q) {
                Ok(s) => s,
                Err(c) => return c,
            };
            let modes = modes.unwrap_or(config.oracle_modes.clone());
            let tol = tol.unwrap_or(config.oracle_tol);
            if exact {
                return match oracle::exact_shift_index(&sym) {
                    Some(v) => {
                        println!("exact=true");
                        println!("index={v}");
                        ExitCode::SUCCESS
                    }
                    None => computational("symbol is not pure shift type; drop --exact"),
                };
            }
            match oracle::oracle_index(&sym, &modes, tol) {
                Ok(outcome) => {
                    for (k, d) in &outcome.per_mode {
                        println!("d_{k}={d}");
                    }
                    println!("exact={}", outcome.exact_path);
                    println!("residual={}", fmt_e(outcome.residual));
                    println!("index={}", outcome.index);
                    println!("verdict=ok");
                    ExitCode::SUCCESS
                }
                Err(OracleError::NoPlateau { per_mode }) => {
                    for (k, d) in &per_mode {
                        println!("d_{k}={d}");
                    }
                    println!("verdict=no-plateau");
                    ExitCode::from(1)
                }
                Err(e) => computational(e),
            }
        }
        Command::VerifyTodd {
            dim,
            order,
            trials,
            seed,
        } => {
            if dim == 0 || dim > 3 {
                eprintln!("error: --dim must be 1, 2 or 3");
                return ExitCode::from(2);
            }
            let seed = resolve_seed(seed, &config);
            let mut rng = SplitMix64::new(seed);
            let mut worst = 0.0f64;
            println!("# dim={dim} order={order} trials={trials} seed={seed}");
            for trial in 0..trials {
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
                match verify_todd(&r0, order) {
                    Ok(report) => {
                        worst = worst.max(report.max());
                        println!(
                            "trial={trial} disc_exp={:.3e} disc_dx={:.3e} disc_iden={:.3e}",
                            report.disc_exp, report.disc_dx, report.disc_iden
                        );
                    }
                    Err(e) => return computational(e),
                }
            }
            // reference series for the eye
            let td = todd_det_series(&[vec![Complex64::new(1.0, 0.0)]], order.min(6));
            let coeffs: Vec<String> = (0..=order.min(6))
                .map(|k| format!("{}", td.coeff(k).re))
                .collect();
            println!("# todd_series_n1=[{}]", coeffs.join(", "));
            let pass = worst <= 1e-9;
            println!("max_discrepancy={}", fmt_e(worst));
            println!("pass={pass}");
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Check {
            suite: which,
            trials,
            seed,
        } => {
            let seed = resolve_seed(seed, &config);
            let trials = trials.unwrap_or(config.trials);
            let names: Vec<&str> = match which.as_str() {
                "all" => vec![
                    "trace",
                    "cocycle",
                    "homotopy",
                    "agreement",
                    "mode-agreement",
                ],
                "trace" | "cocycle" | "homotopy" | "agreement" | "mode-agreement" => {
                    vec![which.as_str()]
                }
                other => {
                    eprintln!("error: unknown suite `{other}`");
                    return ExitCode::from(2);
                }
            };
            let mut all_pass = true;
            for name in names {
                let report = match name {
                    "trace" => suite::trace_suite(trials, seed),
                    "cocycle" => suite::cocycle_suite(trials, seed),
                    "homotopy" => suite::homotopy_suite(trials.min(25), seed),
                    "agreement" => suite::agreement_suite(seed),
                    "mode-agreement" => suite::mode_agreement_suite(seed),
                    _ => unreachable!(),
                };
                println!("# suite={} seed={seed}", report.name);
                for line in &report.lines {
                    println!("{}_{}", report.name, line);
                }
                all_pass &= report.pass;
            }
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
