//! Benchmark harness: runs solvers over a directory of instance files and
//! writes one CSV row per (instance, mode).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::approx::{solve_pipeline, ApproxError, Mode, BRUTE_FORCE_LIMIT};
use crate::instance::{read_instance, InstanceError};
use crate::rational::{as_string, Rational};

/// Extension of instance files picked up from a corpus directory.
pub const INSTANCE_EXT: &str = "lin";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Instance {
        path: PathBuf,
        source: InstanceError,
    },
    #[error("{path}: {source}")]
    Solve {
        path: PathBuf,
        source: ApproxError,
    },
    #[error("cannot read corpus {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub instance: String,
    pub mode: Mode,
    #[serde(with = "as_string")]
    pub value: Rational,
    #[serde(with = "as_string")]
    pub guarantee: Rational,
    pub time_ms: f64,
    pub seed: u64,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    instance: &'a str,
    mode: &'a str,
    value_num: u64,
    value_den: u64,
    guar_num: u64,
    guar_den: u64,
    time_ms: String,
    seed: u64,
}

/// `*.lin` files directly inside `dir`, sorted by file name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    let io = |source| BenchError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    files.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == INSTANCE_EXT));
    files.sort();
    Ok(files)
}

/// Solves every instance in every mode. Instances run in parallel; records
/// come back in input order, modes in the order given. Exact search is
/// skipped for instances whose search space exceeds the solver limit.
pub fn run_corpus(
    files: &[PathBuf],
    modes: &[Mode],
    seed: u64,
) -> Result<Vec<BenchRecord>, BenchError> {
    let per_file: Vec<Result<Vec<BenchRecord>, BenchError>> = files
        .par_iter()
        .map(|path| {
            let inst = read_instance(path).map_err(|source| BenchError::Instance {
                path: path.clone(),
                source,
            })?;
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let space = (inst.group().order() as f64).powi(inst.num_vars() as i32);
            let mut out = Vec::with_capacity(modes.len());
            for &mode in modes {
                if mode == Mode::BruteForce && space > BRUTE_FORCE_LIMIT {
                    continue;
                }
                let start = Instant::now();
                let report = solve_pipeline(&inst, seed, mode).map_err(|source| {
                    BenchError::Solve {
                        path: path.clone(),
                        source,
                    }
                })?;
                out.push(BenchRecord {
                    instance: name.clone(),
                    mode,
                    value: report.value,
                    guarantee: report.guarantee,
                    time_ms: start.elapsed().as_secs_f64() * 1e3,
                    seed,
                });
            }
            Ok(out)
        })
        .collect();
    let mut records = Vec::new();
    for r in per_file {
        records.extend(r?);
    }
    Ok(records)
}

/// Writes `instance,mode,value_num,value_den,guar_num,guar_den,time_ms,seed`.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow {
            instance: &r.instance,
            mode: r.mode.as_str(),
            value_num: *r.value.numer(),
            value_den: *r.value.denom(),
            guar_num: *r.guarantee.numer(),
            guar_den: *r.guarantee.denom(),
            time_ms: format!("{:.3}", r.time_ms),
            seed: r.seed,
        })?;
    }
    w.flush().map_err(|e| BenchError::Csv(e.into()))?;
    Ok(())
}
