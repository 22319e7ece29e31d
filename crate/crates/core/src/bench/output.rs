use std::path::Path;

use crate::error::{NstError, Result};

use super::{ExperimentOutput, TrialRecord};

/// Per (grid point, algorithm) summary of the trial records.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub algorithm: String,
    pub s: usize,
    pub s_over_n: f64,
    pub eps: Option<f64>,
    pub kappa: Option<f64>,
    pub trials: usize,
    pub mean_rel_error: f64,
    pub success_freq: f64,
    pub mean_iters: f64,
    /// Only filled for timing runs, so that other aggregates are
    /// byte-reproducible.
    pub mean_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub algorithm: String,
    pub s: usize,
    pub trial: usize,
    pub iter: usize,
    pub rel_error: f64,
}

/// Mean relative error per iteration across trials; shorter traces are
/// padded with their final value.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceMeanRow {
    pub algorithm: String,
    pub s: usize,
    pub iter: usize,
    pub mean_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub algorithm: String,
    pub s: usize,
    pub s_over_n: f64,
    pub trials: usize,
    pub mean_solve_s: f64,
    pub median_solve_s: f64,
    pub mean_build_s: f64,
    pub median_build_s: f64,
}

pub(crate) fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// Groups sorted records by grid point and algorithm. `n` is the number of
/// measurements; `with_time` fills `mean_time_s`.
pub fn aggregate(records: &[TrialRecord], n: usize, with_time: bool) -> Vec<AggregateRow> {
    let mut rows = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let head = &records[start];
        let end = start
            + records[start..]
                .iter()
                .take_while(|r| r.key == head.key && r.algorithm == head.algorithm)
                .count();
        let group = &records[start..end];
        let m = group.len() as f64;
        rows.push(AggregateRow {
            algorithm: head.algorithm.clone(),
            s: head.s,
            s_over_n: head.s as f64 / n as f64,
            eps: head.eps,
            kappa: head.kappa,
            trials: group.len(),
            mean_rel_error: group.iter().map(|r| r.rel_error).sum::<f64>() / m,
            success_freq: group.iter().filter(|r| r.success).count() as f64 / m,
            mean_iters: group.iter().map(|r| r.iterations as f64).sum::<f64>() / m,
            mean_time_s: with_time.then(|| group.iter().map(|r| r.wall_time_s).sum::<f64>() / m),
        });
        start = end;
    }
    rows
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> NstError {
    NstError::Io(e.to_string())
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `trials.csv` and `aggregate.csv` into `dir`, plus `trace.csv` and
/// `trace_mean.csv` or `timing.csv` when the output has them.
pub fn write_outputs(out: &ExperimentOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_csv(
        &dir.join("trials.csv"),
        &[
            "algorithm",
            "s",
            "eps",
            "trial",
            "seed",
            "rel_error",
            "iterations",
            "wall_time_s",
            "termination",
            "success",
        ],
        out.records.iter().map(|r| {
            vec![
                r.algorithm.clone(),
                r.s.to_string(),
                opt(r.eps),
                r.trial.to_string(),
                r.seed.to_string(),
                num(r.rel_error),
                r.iterations.to_string(),
                num(r.wall_time_s),
                r.termination.clone(),
                r.success.to_string(),
            ]
        }),
    )?;
    write_csv(
        &dir.join("aggregate.csv"),
        &[
            "algorithm",
            "s",
            "s_over_n",
            "eps",
            "kappa",
            "mean_rel_error",
            "success_freq",
            "mean_iters",
            "mean_time_s",
        ],
        out.aggregates.iter().map(|r| {
            vec![
                r.algorithm.clone(),
                r.s.to_string(),
                num(r.s_over_n),
                opt(r.eps),
                opt(r.kappa),
                num(r.mean_rel_error),
                num(r.success_freq),
                num(r.mean_iters),
                opt(r.mean_time_s),
            ]
        }),
    )?;
    if !out.traces.is_empty() {
        write_csv(
            &dir.join("trace.csv"),
            &["algorithm", "s", "trial", "iter", "rel_error"],
            out.traces.iter().map(|r| {
                vec![
                    r.algorithm.clone(),
                    r.s.to_string(),
                    r.trial.to_string(),
                    r.iter.to_string(),
                    num(r.rel_error),
                ]
            }),
        )?;
        write_csv(
            &dir.join("trace_mean.csv"),
            &["algorithm", "s", "iter", "mean_rel_error"],
            out.trace_means.iter().map(|r| {
                vec![r.algorithm.clone(), r.s.to_string(), r.iter.to_string(), num(r.mean_rel_error)]
            }),
        )?;
    }
    if !out.timing.is_empty() {
        write_csv(
            &dir.join("timing.csv"),
            &[
                "algorithm",
                "s",
                "s_over_n",
                "trials",
                "mean_solve_s",
                "median_solve_s",
                "mean_build_s",
                "median_build_s",
            ],
            out.timing.iter().map(|r| {
                vec![
                    r.algorithm.clone(),
                    r.s.to_string(),
                    num(r.s_over_n),
                    r.trials.to_string(),
                    num(r.mean_solve_s),
                    num(r.median_solve_s),
                    num(r.mean_build_s),
                    num(r.median_build_s),
                ]
            }),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(opt(None), "");
    }
}
