//! `goldbach` — count ternary Goldbach representations over primes with
//! a < {ηp} < b, evaluate the associated series, and run experiment sweeps.
//!
//! Exit codes: 0 success, 2 validation error, 3 budget/numerical error.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::io::Write;
use std::process::ExitCode;

use goldbach_core::{
    best_convergent, cf_expand, constrained_set, density, dft_count_check, emit, headline_report,
    minor_arc_scan, parse_format, parse_rational, primes_up_to, run_sweep, sandwich_counts,
    sigma_window, singular_series, ternary_count, ternary_count_brute, Container, Error,
    QuadraticIrrational, SweepConfig, WeightedIndicator, Window,
};

#[derive(Parser)]
#[command(name = "goldbach", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct EtaArg {
    /// Quadratic irrationality (p0 + sqrt(d))/q0 as "p0,d,q0".
    #[arg(long, default_value = "0,2,1")]
    eta: String,
}

impl EtaArg {
    fn parse(&self) -> Result<QuadraticIrrational, Error> {
        QuadraticIrrational::parse(&self.eta)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Count primes up to N, optionally intersected with a window constraint.
    Primes {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        eta: EtaArg,
        /// Window "a..b" with exact rational endpoints, e.g. "1/5..17/20".
        #[arg(long)]
        window: Option<String>,
    },
    /// Continued fraction of a quadratic irrationality, with convergents.
    Cf {
        #[command(flatten)]
        eta: EtaArg,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
        /// How many convergents to print.
        #[arg(long, default_value_t = 10)]
        convergents: usize,
        /// Also report the best convergent with denominator <= tau1.
        #[arg(long)]
        tau1: Option<u64>,
    },
    /// Evaluate sigma(N,a,b) and the singular series sigma(N).
    Sigma {
        #[command(flatten)]
        eta: EtaArg,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "1/5..17/20")]
        window: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Use the plus-sign p|N factor as printed in the source formula.
        #[arg(long)]
        paper_literal: bool,
    },
    /// Exact representation counts J and I, optionally with sandwich bounds.
    Count {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        eta: EtaArg,
        #[arg(long, default_value = "1/5..17/20")]
        window: String,
        /// Cross-check with the quadratic brute-force oracle (N <= 10^4).
        #[arg(long)]
        brute: bool,
        /// Also compute container sandwich bounds J1 <= J <= J2.
        #[arg(long)]
        sandwich: bool,
        /// Sandwich smoothing width as a rational, e.g. "1/100".
        #[arg(long)]
        delta: Option<String>,
        /// Sandwich smoothing order.
        #[arg(long)]
        r: Option<u32>,
    },
    /// Run a sweep from a JSON config file.
    Sweep {
        #[arg(long)]
        config: std::path::PathBuf,
        /// Override the config output format (csv|json).
        #[arg(long)]
        format: Option<String>,
        /// Also print the headline model-fit summary to stderr.
        #[arg(long)]
        headline: bool,
    },
    /// Minor-arc diagnostics for the exponential sum S.
    Arcs {
        #[arg(long)]
        n: u64,
        /// Major/minor threshold exponent: q <= (ln N)^A is major.
        #[arg(long = "A", default_value_t = 10.0)]
        a_exp: f64,
        /// Dirichlet depth exponent: tau = N (ln N)^-B.
        #[arg(long = "B", default_value_t = 10.0)]
        b_exp: f64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        eta: EtaArg,
    },
    /// Audit a container's Fourier coefficients against the decay bounds.
    Container {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        delta: String,
        #[arg(long = "r")]
        r: u32,
        /// Check |c(m)| against the three-way bound for |m| <= M.
        #[arg(long, default_value_t = 1000)]
        check_coeffs: i64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("GOLDBACH_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            if k > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn print_json(value: &serde_json::Value) {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).expect("stdout");
    let _ = out.write_all(b"\n");
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Primes { n, eta, window } => {
            let table = primes_up_to(n)?;
            let mut report = json!({ "n": n, "pi": table.count() });
            if let Some(w) = window {
                let eta = eta.parse()?;
                let window = Window::parse(&w)?;
                let cset = constrained_set(&table, &eta, &window)?;
                report["eta"] = json!(eta.to_string());
                report["window"] = json!(window.to_string_exact());
                report["pi_constrained"] = json!(cset.count());
                report["density"] = json!(density(&cset, &table)?);
            }
            print_json(&report);
        }
        Command::Cf {
            eta,
            max_steps,
            convergents: count,
            tau1,
        } => {
            let eta = eta.parse()?;
            let cf = cf_expand(&eta, max_steps)?;
            let cs = goldbach_core::convergents(&eta, &cf, count.max(1))?;
            let mut report = json!({
                "eta": eta.to_string(),
                "preperiod": cf.preperiod,
                "period": cf.period,
                "convergents": cs.iter().map(|c| json!({
                    "d": c.d.to_string(),
                    "q": c.q.to_string(),
                    "theta2": c.theta2,
                })).collect::<Vec<_>>(),
            });
            if let Some(tau1) = tau1 {
                let (best, c_measured) = best_convergent(&eta, tau1)?;
                report["best"] = json!({
                    "d": best.d.to_string(),
                    "q": best.q.to_string(),
                    "theta2": best.theta2,
                    "tau1": tau1,
                    "c_measured": c_measured,
                });
            }
            print_json(&report);
        }
        Command::Sigma {
            eta,
            n,
            window,
            tol,
            paper_literal,
        } => {
            let eta = eta.parse()?;
            let window = Window::parse(&window)?;
            let sw = sigma_window(&eta, n, &window, tol)?;
            let sn = singular_series(n, tol, paper_literal)?;
            print_json(&json!({
                "n": n,
                "value": sw.value,
                "tail_bound": sw.tail_bound,
                "M": sw.truncation,
                "sigma_n": {
                    "value": sn.value,
                    "tail_bound": sn.tail_bound,
                    "cutoff": sn.truncation,
                    "paper_literal": paper_literal,
                },
            }));
        }
        Command::Count {
            n,
            eta,
            window,
            brute,
            sandwich,
            delta,
            r,
        } => {
            let eta = eta.parse()?;
            let window = Window::parse(&window)?;
            let result = if sandwich {
                let delta_str = delta
                    .ok_or_else(|| Error::config("delta", "required with --sandwich"))?;
                let delta = parse_rational(&delta_str)?;
                let r = r.ok_or_else(|| Error::config("r", "required with --sandwich"))?;
                sandwich_counts(n, &eta, &window, &delta, r)?
            } else {
                let primes = primes_up_to(n)?;
                let cset = constrained_set(&primes, &eta, &window)?;
                goldbach_core::CountResult {
                    n,
                    j: ternary_count(&WeightedIndicator::from_constrained(&cset), n)?,
                    i: ternary_count(&WeightedIndicator::from_primes(&primes), n)?,
                    j1: None,
                    j2: None,
                }
            };
            let mut report = serde_json::to_value(&result).expect("serializable");
            if brute {
                let primes = primes_up_to(n)?;
                let cset = constrained_set(&primes, &eta, &window)?;
                let ind = WeightedIndicator::from_constrained(&cset);
                let brute_j = ternary_count_brute(&ind, n)?;
                let dft_j = dft_count_check(&ind, n)?;
                if brute_j != result.j || dft_j != result.j {
                    return Err(Error::numerical(format!(
                        "count mismatch at n={n}: ntt={} brute={brute_j} dft={dft_j}",
                        result.j
                    )));
                }
                report["brute"] = json!(brute_j);
                report["dft"] = json!(dft_j);
            }
            print_json(&report);
        }
        Command::Sweep {
            config,
            format,
            headline,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::config("config", format!("{}: {e}", config.display())))?;
            let parsed: SweepConfig = serde_json::from_str(&text)
                .map_err(|e| Error::config("config", e.to_string()))?;
            let fmt = match format {
                Some(f) => parse_format(&f)?,
                None => parsed.output_format()?,
            };
            let rows = run_sweep(&parsed)?;
            let bytes = emit(&rows, fmt)?;
            std::io::stdout().write_all(&bytes).expect("stdout");
            if headline {
                let summary = headline_report(&rows)?;
                eprintln!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
            }
        }
        Command::Arcs {
            n,
            a_exp,
            b_exp,
            samples,
            seed,
            eta,
        } => {
            let eta = eta.parse()?;
            let primes = primes_up_to(n)?;
            let report = minor_arc_scan(&primes, &eta, a_exp, b_exp, samples, seed)?;
            print_json(&serde_json::to_value(&report).expect("serializable"));
        }
        Command::Container {
            alpha,
            beta,
            delta,
            r,
            check_coeffs,
        } => {
            let container = Container::new(
                parse_rational(&alpha)?,
                parse_rational(&beta)?,
                parse_rational(&delta)?,
                r,
            )?;
            let slack = 1.0 + 1e-6;
            let mut worst_ratio = 0.0f64;
            let mut worst_m = 0i64;
            let mut all_within = true;
            for m in -check_coeffs.abs()..=check_coeffs.abs() {
                let norm = container.coeff(m).norm();
                let bound = container.coeff_bound(m);
                let ratio = norm / bound;
                if ratio > worst_ratio {
                    worst_ratio = ratio;
                    worst_m = m;
                }
                if norm > bound * slack {
                    all_within = false;
                }
            }
            print_json(&json!({
                "alpha": alpha,
                "beta": beta,
                "delta": delta,
                "r": r,
                "coeff_audit": {
                    "checked_abs_m": check_coeffs.abs(),
                    "all_within_bound": all_within,
                    "worst_ratio": worst_ratio,
                    "worst_m": worst_m,
                    "slack": slack,
                },
            }));
        }
    }
    Ok(())
}
