//! Convergence-time scaling runs over growing input sizes, and the log-log
//! slope fit used to read off the empirical exponent.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::compiler::{compile_piecewise, CompileError, CompileOptions};
use crate::crn::Crc;
use crate::kinetics::{run_trials, KineticsError, SimLimits, VolumePolicy};
use crate::semilinear::PiecewiseAffineFn;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("log-log fit needs at least 3 rows, got {0}")]
    TooFewRows(usize),
    #[error("log-log fit needs positive means; row n={0} has none")]
    NonPositive(u64),
    #[error("log-log fit is degenerate: all n are equal")]
    Degenerate,
    #[error("n values must be positive and strictly increasing")]
    BadSizes,
    #[error("input shape has {got} coordinates, the function takes {want}")]
    Shape { got: usize, want: usize },
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Kinetics(#[from] KineticsError),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

pub const SCALING_CSV_HEADER: &str = "n,trials,mean_conv_time,median,stddev,censored_fraction,mean_count_peak,slope_so_far";

/// Censoring above this fraction is flagged on the row.
pub const CENSOR_WARN: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: u64,
    pub trials: u64,
    pub mean_conv_time: Option<f64>,
    pub median: Option<f64>,
    pub stddev: Option<f64>,
    pub censored_fraction: f64,
    pub mean_count_peak: f64,
    /// Fit over this row and all earlier ones, once there are three.
    pub slope_so_far: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ScalingRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.trials,
            cell(self.mean_conv_time),
            cell(self.median),
            cell(self.stddev),
            self.censored_fraction,
            self.mean_count_peak,
            cell(self.slope_so_far)
        )
    }
}

pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut s = String::from(SCALING_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{}", r.csv_row());
    }
    s
}

/// Balanced input of norm `n` over `k` coordinates; the remainder goes to
/// the first coordinate.
pub fn balanced_input(n: u64, k: usize) -> Vec<u64> {
    if k == 0 {
        return Vec::new();
    }
    let mut x = vec![n / k as u64; k];
    x[0] += n % k as u64;
    x
}

/// Ordinary least-squares slope of `ln mean_conv_time` against `ln n`.
pub fn fit_loglog(rows: &[ScalingRow]) -> Result<f64> {
    if rows.len() < 3 {
        return Err(BenchError::TooFewRows(rows.len()));
    }
    let mut pts = Vec::with_capacity(rows.len());
    for r in rows {
        match r.mean_conv_time {
            Some(t) if t > 0.0 && r.n > 0 => pts.push(((r.n as f64).ln(), t.ln())),
            _ => return Err(BenchError::NonPositive(r.n)),
        }
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(BenchError::Degenerate);
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

/// Scaling run on an already compiled computer. `shape` maps `n` to an
/// input vector; rows are computed in parallel and merged in order of `n`.
pub fn scaling_run_crc(
    crc: &Crc,
    shape: &(dyn Fn(u64) -> Vec<u64> + Sync),
    n_values: &[u64],
    trials: u64,
    seed: u64,
) -> Result<Vec<ScalingRow>> {
    if n_values.is_empty() || n_values[0] == 0 || n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BenchError::BadSizes);
    }
    let k = crc.inputs().len();
    let mut rows = n_values
        .par_iter()
        .map(|&n| {
            let x = shape(n);
            if x.len() != k {
                return Err(BenchError::Shape { got: x.len(), want: k });
            }
            let stats = run_trials(crc, &x, trials, seed, VolumePolicy::Auto, SimLimits::default(), None)?;
            let censored = stats.censored_fraction();
            Ok(ScalingRow {
                n,
                trials,
                mean_conv_time: stats.mean_conv_time,
                median: stats.median_conv_time,
                stddev: stats.stddev_conv_time,
                censored_fraction: censored,
                mean_count_peak: stats.mean_count_peak,
                slope_so_far: None,
                warning: (censored > CENSOR_WARN).then(|| format!("censored fraction {censored} exceeds {CENSOR_WARN}")),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for i in 2..rows.len() {
        rows[i].slope_so_far = fit_loglog(&rows[..=i]).ok();
    }
    Ok(rows)
}

/// Compiles `f` with the fast backend and runs it on balanced inputs of
/// each norm in `n_values`.
pub fn scaling_run(f: &PiecewiseAffineFn, n_values: &[u64], trials: u64, seed: u64) -> Result<Vec<ScalingRow>> {
    let crc = compile_piecewise(f, &CompileOptions::default())?.crc;
    let k = f.arity();
    scaling_run_crc(&crc, &|n| balanced_input(n, k), n_values, trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(f: impl Fn(f64) -> f64, ns: &[u64]) -> Vec<ScalingRow> {
        ns.iter()
            .map(|&n| ScalingRow {
                n,
                trials: 1,
                mean_conv_time: Some(f(n as f64)),
                median: None,
                stddev: None,
                censored_fraction: 0.0,
                mean_count_peak: 0.0,
                slope_so_far: None,
                warning: None,
            })
            .collect()
    }

    const POW2: [u64; 7] = [16, 32, 64, 128, 256, 512, 1024];

    #[test]
    fn exact_lines() {
        assert!((fit_loglog(&rows(|n| n, &POW2)).unwrap() - 1.0).abs() < 1e-9);
        assert!(fit_loglog(&rows(|_| 3.5, &POW2)).unwrap().abs() < 1e-9);
    }

    #[test]
    fn n_log_n_slope() {
        // Independent oracle: slope of ln(n ln n) on ln n is
        // 1 + cov(u, ln u) / var(u) with u = ln n.
        let u: Vec<f64> = POW2.iter().map(|&n| (n as f64).ln()).collect();
        let mu = u.iter().sum::<f64>() / 7.0;
        let lu: Vec<f64> = u.iter().map(|v| v.ln()).collect();
        let ml = lu.iter().sum::<f64>() / 7.0;
        let cov: f64 = u.iter().zip(&lu).map(|(a, b)| (a - mu) * (b - ml)).sum();
        let var: f64 = u.iter().map(|a| (a - mu) * (a - mu)).sum();
        let oracle = 1.0 + cov / var;
        assert!((oracle - 1.2170).abs() < 1e-4);
        let got = fit_loglog(&rows(|n| n * n.ln(), &POW2)).unwrap();
        assert!((got - oracle).abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(fit_loglog(&rows(|n| n, &[4, 8])), Err(BenchError::TooFewRows(2))));
        assert!(matches!(fit_loglog(&rows(|n| n, &[4, 4, 4])), Err(BenchError::Degenerate)));
        assert!(matches!(fit_loglog(&rows(|_| 0.0, &[1, 2, 3])), Err(BenchError::NonPositive(1))));
    }

    #[test]
    fn balanced_shapes() {
        assert_eq!(balanced_input(10, 3), vec![4, 3, 3]);
        assert_eq!(balanced_input(7, 1), vec![7]);
        assert_eq!(balanced_input(1, 2), vec![1, 0]);
    }

    proptest::proptest! {
        #[test]
        fn recovers_power_laws(c in 0.01f64..100.0, s in -2.0f64..3.0) {
            let got = fit_loglog(&rows(|n| c * n.powf(s), &POW2)).unwrap();
            proptest::prop_assert!((got - s).abs() < 1e-9);
        }
    }
}
