//! Batch runs reported as CSV rows, and speedup tables built from two
//! reports.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::path::PathBuf;

use batsvd2::batch_driver::{run_batch, Path, RunConfig};
use batsvd2::batch_layout::FieldKind;
use batsvd2::lane_math::check_fp_env;
use batsvd2::svd2_core::{Assembly, Backscale};
use batsvd2::verify::metrics;
use serde::{Deserialize, Serialize};

use crate::testfile::BatchReader;
use crate::CliError;

/// Significant digits of the metric columns.
const DIGITS: usize = 21;

pub fn backscale_name(b: Backscale) -> &'static str {
    match b {
        Backscale::None => "none",
        Backscale::Safe => "safe",
        Backscale::Unconditional => "unconditional",
    }
}

#[derive(Clone, Debug)]
pub struct RunArgs {
    pub input: PathBuf,
    pub field: FieldKind,
    pub path: Path,
    pub batch_size: usize,
    pub threads: usize,
    pub backscale: Backscale,
    pub assembly: Assembly,
    pub out: PathBuf,
}

/// One processed batch. Metric columns are decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub batch_index: usize,
    pub n: usize,
    pub field: String,
    pub path: String,
    pub backscale: String,
    pub wall_time_s: String,
    pub kappa: String,
    pub rho: String,
    pub delta: String,
    pub eta: String,
    /// Lanes left in the scaled domain although backscaling was requested.
    pub backscale_skipped_count: usize,
    /// Lanes with a non-finite singular value, left out of κ and ρ.
    pub rho_excluded_count: usize,
}

const HEADER: [&str; 12] = [
    "batch_index",
    "n",
    "field",
    "path",
    "backscale",
    "wall_time_s",
    "kappa",
    "rho",
    "delta",
    "eta",
    "backscale_skipped_count",
    "rho_excluded_count",
];

/// Runs every batch of `args.input` and appends one row per batch to
/// `args.out`, writing the header only when the file is new or empty.
///
/// Wall times cover the parallel loop only, not reading or repacking.
pub fn run(args: &RunArgs) -> Result<Vec<ReportRow>, CliError> {
    check_fp_env().map_err(|e| CliError::Data(e.to_string()))?;
    if args.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let mut reader = BatchReader::open(&args.input, args.field, args.batch_size)?;
    let file = OpenOptions::new().create(true).append(true).open(&args.out)?;
    let fresh = file.metadata()?.len() == 0;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if fresh {
        w.write_record(HEADER)?;
        w.flush()?;
    }
    let cfg = RunConfig { path: args.path, threads: args.threads, backscale: args.backscale, assembly: args.assembly };
    let mut rows = Vec::new();
    while let Some(batch) = reader.next_batch()? {
        let (out, t) = run_batch(&batch, &cfg).map_err(|e| CliError::Data(e.to_string()))?;
        let m = metrics(&batch, &out).map_err(|e| CliError::Data(e.to_string()))?;
        let row = ReportRow {
            batch_index: rows.len(),
            n: batch.len(),
            field: args.field.name().into(),
            path: args.path.name().into(),
            backscale: backscale_name(args.backscale).into(),
            wall_time_s: format!("{:.6}", t.as_secs_f64()),
            kappa: m.kappa.to_scientific(DIGITS),
            rho: m.rho.to_scientific(DIGITS),
            delta: m.delta.to_scientific(DIGITS),
            eta: m.eta.to_scientific(DIGITS),
            backscale_skipped_count: if args.backscale == Backscale::None { 0 } else { m.scaled_lanes },
            rho_excluded_count: m.rho_excluded,
        };
        w.serialize(&row)?;
        w.flush()?;
        rows.push(row);
    }
    Ok(rows)
}

/// One line of a speedup table; the summary line carries totals and the
/// spread of the per-batch speedups.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub batch: String,
    pub t_pointwise_s: String,
    pub t_vectorized_s: String,
    pub speedup: String,
    pub speedup_min: String,
    pub speedup_median: String,
    pub speedup_max: String,
}

#[derive(Deserialize)]
struct Timing {
    batch_index: usize,
    path: String,
    wall_time_s: f64,
}

/// Wall time per batch index; later rows replace earlier ones.
fn timings(file: &std::path::Path, want: Path) -> Result<BTreeMap<usize, f64>, CliError> {
    let mut r = csv::Reader::from_path(file)?;
    let mut m = BTreeMap::new();
    for row in r.deserialize() {
        let t: Timing = row?;
        if t.path != want.name() {
            return Err(CliError::Data(format!(
                "{}: batch {} was run on path {}, expected {}",
                file.display(),
                t.batch_index,
                t.path,
                want.name()
            )));
        }
        m.insert(t.batch_index, t.wall_time_s);
    }
    Ok(m)
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Speedup `t_pointwise / t_vectorized` per batch plus a summary row.
pub fn compare(report_vec: &std::path::Path, report_ptw: &std::path::Path) -> Result<Vec<CompareRow>, CliError> {
    let tv = timings(report_vec, Path::Vectorized)?;
    let tp = timings(report_ptw, Path::Pointwise)?;
    if tv.is_empty() || tv.keys().ne(tp.keys()) {
        return Err(CliError::Data("the two reports do not cover the same batches".into()));
    }
    let f = |x: f64| format!("{x:.6}");
    let mut rows = Vec::new();
    let mut speedups = Vec::new();
    for (k, v) in &tv {
        let p = tp[k];
        speedups.push(p / v);
        rows.push(CompareRow {
            batch: k.to_string(),
            t_pointwise_s: f(p),
            t_vectorized_s: f(*v),
            speedup: f(p / v),
            speedup_min: String::new(),
            speedup_median: String::new(),
            speedup_max: String::new(),
        });
    }
    speedups.sort_by(f64::total_cmp);
    let (sp, sv) = (tp.values().sum::<f64>(), tv.values().sum::<f64>());
    rows.push(CompareRow {
        batch: "summary".into(),
        t_pointwise_s: f(sp),
        t_vectorized_s: f(sv),
        speedup: f(sp / sv),
        speedup_min: f(speedups[0]),
        speedup_median: f(median(&speedups)),
        speedup_max: f(speedups[speedups.len() - 1]),
    });
    Ok(rows)
}

pub fn write_compare<W: std::io::Write>(rows: &[CompareRow], w: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(w);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
