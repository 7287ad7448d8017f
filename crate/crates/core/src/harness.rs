//! Experiment orchestration: sweeps over N, row assembly, serialization,
//! and the headline comparison of the theorem prediction I·σ(N,a,b) against
//! the naive density model I·(b−a)³.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::counting::{
    sandwich_from_tables, ternary_counts_all, WeightedIndicator, WEIGHT_SCALE_BITS,
};
use crate::error::{Error, Result};
use crate::quadratic::QuadraticIrrational;
use crate::series::{sigma_window, singular_series};
use crate::sieve::{constrained_set, primes_up_to, MAX_SIEVE_LIMIT};
use crate::window::{parse_rational, Window};

/// Sweep configuration as found in a JSON config document. CLI flags may
/// override individual fields before validation.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// η as `"p0,d,q0"`.
    pub eta: Option<String>,
    /// Window as `"num/den..num/den"`.
    pub window: Option<String>,
    /// Explicit list of N values.
    #[serde(default)]
    pub n_list: Vec<u64>,
    /// Range alternative to `n_list`.
    pub n_range: Option<NRange>,
    /// Allow even N (degenerate rows) instead of rejecting them.
    #[serde(default)]
    pub allow_even: bool,
    /// Tail tolerance for both series; default 1e-10.
    pub tol: Option<f64>,
    /// Optional sandwich Δ as a rational string; requires `r`.
    pub delta: Option<String>,
    /// Optional sandwich smoothing order r; requires `delta`.
    pub r: Option<u32>,
    /// Output format, `"csv"` (default) or `"json"`.
    pub format: Option<String>,
    /// Worker-thread hint; 0 or absent leaves the global default.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NRange {
    pub start: u64,
    pub end: u64,
    #[serde(default = "default_step")]
    pub step: u64,
}

fn default_step() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

pub(crate) struct ValidatedSweep {
    pub eta: QuadraticIrrational,
    pub window: Window,
    pub ns: Vec<u64>,
    pub tol: f64,
    pub sandwich: Option<(BigRational, u32)>,
}

impl SweepConfig {
    pub(crate) fn validate(&self) -> Result<ValidatedSweep> {
        let eta_str = self
            .eta
            .as_deref()
            .ok_or_else(|| Error::config("eta", "missing"))?;
        let eta = QuadraticIrrational::parse(eta_str)
            .map_err(|e| Error::config("eta", e.to_string()))?;
        let window_str = self
            .window
            .as_deref()
            .ok_or_else(|| Error::config("window", "missing"))?;
        let window =
            Window::parse(window_str).map_err(|e| Error::config("window", e.to_string()))?;

        let mut ns: Vec<u64> = self.n_list.clone();
        if let Some(range) = &self.n_range {
            if range.step == 0 {
                return Err(Error::config("n_range.step", "must be positive"));
            }
            if range.end < range.start {
                return Err(Error::config("n_range.end", "must be >= start"));
            }
            let mut n = range.start;
            while n <= range.end {
                // a range silently keeps the right parity
                if self.allow_even || n % 2 == 1 {
                    ns.push(n);
                }
                n += range.step;
            }
        }
        if ns.is_empty() {
            return Err(Error::config("n_list", "no N values supplied"));
        }
        for &n in &ns {
            if n < 2 {
                return Err(Error::config("n_list", format!("N={n} is below 2")));
            }
            if n > MAX_SIEVE_LIMIT {
                return Err(Error::config(
                    "n_list",
                    format!("N={n} exceeds the cap {MAX_SIEVE_LIMIT}"),
                ));
            }
            if n % 2 == 0 && !self.allow_even {
                return Err(Error::config(
                    "n_list",
                    format!("N={n} is even; set allow_even to permit degenerate rows"),
                ));
            }
        }

        let tol = self.tol.unwrap_or(1e-10);
        if !(tol > 0.0) {
            return Err(Error::config("tol", "must be positive"));
        }

        let sandwich = match (&self.delta, self.r) {
            (None, None) => None,
            (Some(d), Some(r)) => {
                let delta =
                    parse_rational(d).map_err(|e| Error::config("delta", e.to_string()))?;
                if r == 0 {
                    return Err(Error::config("r", "must be at least 1"));
                }
                Some((delta, r))
            }
            (Some(_), None) => return Err(Error::config("r", "missing while delta is set")),
            (None, Some(_)) => return Err(Error::config("delta", "missing while r is set")),
        };

        self.output_format()?;

        Ok(ValidatedSweep {
            eta,
            window,
            ns,
            tol,
            sandwich,
        })
    }

    /// The validated output format ("csv" when unset).
    pub fn output_format(&self) -> Result<OutputFormat> {
        match self.format.as_deref().unwrap_or("csv") {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::config("format", format!("unknown format {other:?}"))),
        }
    }
}

/// One experiment row: exact counts, series values, and model ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u64,
    pub pi: u64,
    pub pi_p: u64,
    pub j: u64,
    pub i: u64,
    pub sigma_n: f64,
    pub sigma_window: f64,
    /// I·σ(N,a,b), the theorem prediction.
    pub pred: f64,
    /// I·(b−a)³, the naive density model.
    pub pred_naive: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_naive: Option<f64>,
}

/// Run a sweep: one row per N over a shared sieve and constrained set.
/// All counts for every N come from a single exact triple convolution.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let v = config.validate()?;
    let max_n = *v.ns.iter().max().unwrap();
    let primes = primes_up_to(max_n)?;
    let cset = constrained_set(&primes, &v.eta, &v.window)?;
    let i_all = ternary_counts_all(&WeightedIndicator::from_primes(&primes))?;
    let j_all = ternary_counts_all(&WeightedIndicator::from_constrained(&cset))?;
    let width3 = v.window.width_f64().powi(3);

    let mut rows = Vec::with_capacity(v.ns.len());
    for &n in &v.ns {
        let i = i_all[n as usize];
        let j = j_all[n as usize];
        let sigma_n = singular_series(n, v.tol, false)
            .map_err(|e| Error::numerical(format!("sigma(N) failed at N={n}: {e}")))?;
        let sw = sigma_window(&v.eta, n, &v.window, v.tol)
            .map_err(|e| Error::numerical(format!("sigma(N,a,b) failed at N={n}: {e}")))?;
        let pred = i as f64 * sw.value;
        let pred_naive = i as f64 * width3;
        if let Some((delta, r)) = &v.sandwich {
            // rigorous per-row containment check; failure aborts the sweep
            let res = sandwich_from_tables(&primes, &cset, &v.eta, &v.window, delta, *r, n)
                .map_err(|e| Error::numerical(format!("sandwich failed at N={n}: {e}")))?;
            debug_assert_eq!(res.j, j);
            let _ = WEIGHT_SCALE_BITS;
        }
        rows.push(SweepRow {
            n,
            pi: primes.count_leq(n),
            pi_p: cset.count_leq(n),
            j,
            i,
            sigma_n: sigma_n.value,
            sigma_window: sw.value,
            pred,
            pred_naive,
            ratio: (pred > 0.0).then(|| j as f64 / pred),
            ratio_naive: (pred_naive > 0.0).then(|| j as f64 / pred_naive),
        });
    }
    Ok(rows)
}

/// Fixed CSV header; schema changes are breaking.
pub const CSV_HEADER: &str = "N,pi,piP,J,I,sigma_n,sigma_window,pred,pred_naive,ratio,ratio_naive";

/// Reals are printed at 12 significant digits.
fn fmt_real(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

/// Serialize rows as CSV (fixed header, 12 significant digits) or JSON.
pub fn emit(rows: &[SweepRow], format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Csv => {
            let mut out = String::with_capacity(rows.len() * 128 + 128);
            out.push_str(CSV_HEADER);
            out.push('\n');
            for row in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    row.n,
                    row.pi,
                    row.pi_p,
                    row.j,
                    row.i,
                    fmt_real(row.sigma_n),
                    fmt_real(row.sigma_window),
                    fmt_real(row.pred),
                    fmt_real(row.pred_naive),
                    fmt_opt(row.ratio),
                    fmt_opt(row.ratio_naive),
                ));
            }
            Ok(out.into_bytes())
        }
        OutputFormat::Json => {
            serde_json::to_vec_pretty(rows).map_err(|e| Error::numerical(e.to_string()))
        }
    }
}

/// Parse an output format name (CLI override).
pub fn parse_format(s: &str) -> Result<OutputFormat> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(Error::domain(format!("unknown format {other:?}"))),
    }
}

/// Aggregate model-fit summary over sweep rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeadlineSummary {
    pub rows_used: usize,
    /// mean/max of |J/(I·σ(N,a,b)) − 1|.
    pub mean_abs_err_theorem: f64,
    pub max_abs_err_theorem: f64,
    /// mean/max of |J/(I·(b−a)³) − 1|.
    pub mean_abs_err_naive: f64,
    pub max_abs_err_naive: f64,
    /// Rows where σ(N,a,b) deviates from (b−a)³ by at least 20%.
    pub sigma_window_big_deviation_rows: usize,
}

/// Quantify which model fits: the theorem factor σ(N,a,b) or the naive
/// density (b−a)³. Needs at least 10 rows with a positive prediction.
pub fn headline_report(rows: &[SweepRow]) -> Result<HeadlineSummary> {
    let usable: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.ratio.is_some() && r.ratio_naive.is_some())
        .collect();
    if usable.len() < 10 {
        return Err(Error::domain(format!(
            "headline report needs at least 10 rows with positive predictions, got {}",
            usable.len()
        )));
    }
    let mut sum_t = 0.0;
    let mut max_t = 0.0f64;
    let mut sum_n = 0.0;
    let mut max_n = 0.0f64;
    let mut deviations = 0usize;
    for row in &usable {
        let et = (row.ratio.unwrap() - 1.0).abs();
        let en = (row.ratio_naive.unwrap() - 1.0).abs();
        sum_t += et;
        max_t = max_t.max(et);
        sum_n += en;
        max_n = max_n.max(en);
        let width3 = row.pred_naive / row.i as f64;
        if (row.sigma_window / width3 - 1.0).abs() >= 0.20 {
            deviations += 1;
        }
    }
    Ok(HeadlineSummary {
        rows_used: usable.len(),
        mean_abs_err_theorem: sum_t / usable.len() as f64,
        max_abs_err_theorem: max_t,
        mean_abs_err_naive: sum_n / usable.len() as f64,
        max_abs_err_naive: max_n,
        sigma_window_big_deviation_rows: deviations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SweepConfig {
        SweepConfig {
            eta: Some("0,2,1".into()),
            window: Some("1/5..17/20".into()),
            n_list: vec![9, 11],
            ..Default::default()
        }
    }

    #[test]
    fn sweep_two_rows() {
        let rows = run_sweep(&small_config()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].n, 9);
        assert_eq!(rows[0].j, 1);
        assert_eq!(rows[0].i, 4);
        assert_eq!(rows[1].n, 11);
        assert_eq!(rows[0].pi, 4); // 2,3,5,7
        assert_eq!(rows[0].pi_p, 2); // 2,3
    }

    #[test]
    fn config_errors_name_their_field() {
        let mut c = small_config();
        c.eta = None;
        match run_sweep(&c) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "eta"),
            other => panic!("expected config error, got {other:?}"),
        }
        let mut c = small_config();
        c.window = Some("junk".into());
        assert!(matches!(
            c.validate(),
            Err(Error::Config { field, .. }) if field == "window"
        ));
        let mut c = small_config();
        c.n_list = vec![10];
        assert!(matches!(
            c.validate(),
            Err(Error::Config { field, .. }) if field == "n_list"
        ));
        let mut c = small_config();
        c.n_list = vec![];
        assert!(matches!(
            c.validate(),
            Err(Error::Config { field, .. }) if field == "n_list"
        ));
        let mut c = small_config();
        c.delta = Some("1/100".into());
        assert!(matches!(
            c.validate(),
            Err(Error::Config { field, .. }) if field == "r"
        ));
        let mut c = small_config();
        c.format = Some("xml".into());
        assert!(matches!(
            c.validate(),
            Err(Error::Config { field, .. }) if field == "format"
        ));
    }

    #[test]
    fn range_respects_parity() {
        let mut c = small_config();
        c.n_list = vec![];
        c.n_range = Some(NRange {
            start: 8,
            end: 16,
            step: 1,
        });
        let v = c.validate().unwrap();
        assert_eq!(v.ns, vec![9, 11, 13, 15]);
        c.allow_even = true;
        let v = c.validate().unwrap();
        assert_eq!(v.ns, vec![8, 9, 10, 11, 12, 13, 14, 15, 16]);
    }

    #[test]
    fn csv_shape_and_golden_row() {
        let rows = vec![SweepRow {
            n: 9,
            pi: 4,
            pi_p: 2,
            j: 1,
            i: 4,
            sigma_n: 1.5,
            sigma_window: 0.25,
            pred: 1.0,
            pred_naive: 1.098_5,
            ratio: Some(1.0),
            ratio_naive: Some(0.910_332),
        }];
        let bytes = emit(&rows, OutputFormat::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let expected = "N,pi,piP,J,I,sigma_n,sigma_window,pred,pred_naive,ratio,ratio_naive\n\
                        9,4,2,1,4,1.50000000000e0,2.50000000000e-1,1.00000000000e0,1.09850000000e0,1.00000000000e0,9.10332000000e-1\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn csv_header_only_when_empty() {
        let bytes = emit(&[], OutputFormat::Csv).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn json_roundtrip() {
        let rows = run_sweep(&small_config()).unwrap();
        let bytes = emit(&rows, OutputFormat::Json).unwrap();
        let parsed: Vec<SweepRow> = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(parsed, rows);
    }

    #[test]
    fn deterministic_bytes() {
        let a = emit(&run_sweep(&small_config()).unwrap(), OutputFormat::Csv).unwrap();
        let b = emit(&run_sweep(&small_config()).unwrap(), OutputFormat::Csv).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn headline_degenerate_and_small() {
        // all rows identical, sigma_window == width^3: both models agree
        let row = SweepRow {
            n: 9,
            pi: 4,
            pi_p: 2,
            j: 1,
            i: 4,
            sigma_n: 1.5,
            sigma_window: 0.274_625,
            pred: 1.098_5,
            pred_naive: 1.098_5,
            ratio: Some(1.0 / 1.098_5),
            ratio_naive: Some(1.0 / 1.098_5),
        };
        let rows = vec![row; 12];
        let summary = headline_report(&rows).unwrap();
        assert_eq!(summary.rows_used, 12);
        assert_eq!(
            summary.mean_abs_err_theorem,
            summary.mean_abs_err_naive
        );
        assert_eq!(summary.sigma_window_big_deviation_rows, 0);

        assert!(headline_report(&rows[..1]).is_err());
    }
}
