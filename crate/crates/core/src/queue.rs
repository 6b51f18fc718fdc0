//! Loading job queues from disk and sampling random queues from a pool.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formats::{self, FormatError};
use crate::model::{Circuit, CircuitId};
use crate::qasm::{self, QasmError};

#[derive(Debug, Error)]
pub enum QueueError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Qasm {
        path: PathBuf,
        #[source]
        source: QasmError,
    },
    #[error("{path}: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error("{path}: {metric} is {actual} but the manifest expects {expected}")]
    MetricMismatch {
        path: PathBuf,
        metric: &'static str,
        actual: u64,
        expected: u64,
    },
    #[error("{path}: ideal outcome `{ideal}` has {len} bits but the circuit measures {bits}")]
    IdealWidth {
        path: PathBuf,
        ideal: String,
        len: usize,
        bits: usize,
    },
    #[error("{0}: no .qasm files found")]
    Empty(PathBuf),
    #[error("cannot sample from an empty pool")]
    EmptyPool,
}

/// A loaded circuit and the path it was read from, as written in the
/// manifest or relative to the queue directory.
#[derive(Debug, Clone)]
pub struct QueueEntry {
    pub source: String,
    pub circuit: Circuit,
}

fn read(path: &Path) -> Result<String, QueueError> {
    fs::read_to_string(path).map_err(|source| QueueError::Io {
        path: path.to_owned(),
        source,
    })
}

fn load_file(path: &Path, id: CircuitId) -> Result<Circuit, QueueError> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    qasm::parse_circuit(id, &name, &read(path)?).map_err(|source| QueueError::Qasm {
        path: path.to_owned(),
        source,
    })
}

/// Loads a queue from a `.qasm` file, a directory of `.qasm` files (sorted by
/// file name), or a manifest. Circuit ids follow queue order from 0.
pub fn load_queue(path: &Path) -> Result<Vec<QueueEntry>, QueueError> {
    if path.is_dir() {
        return load_dir(path);
    }
    if path.extension().is_some_and(|e| e == "qasm") {
        let source = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        return Ok(vec![QueueEntry {
            source,
            circuit: load_file(path, CircuitId(0))?,
        }]);
    }
    load_manifest(path)
}

pub fn load_dir(dir: &Path) -> Result<Vec<QueueEntry>, QueueError> {
    let io_err = |source| QueueError::Io {
        path: dir.to_owned(),
        source,
    };
    let mut names: Vec<String> = fs::read_dir(dir)
        .map_err(io_err)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".qasm"))
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(QueueError::Empty(dir.to_owned()));
    }
    names
        .into_iter()
        .enumerate()
        .map(|(i, name)| {
            let circuit = load_file(&dir.join(&name), CircuitId(i as u32))?;
            Ok(QueueEntry {
                source: name,
                circuit,
            })
        })
        .collect()
}

/// Loads the files listed in a manifest, resolving paths against the
/// manifest's directory. Metrics given in the manifest are checked against
/// the parsed circuit.
pub fn load_manifest(path: &Path) -> Result<Vec<QueueEntry>, QueueError> {
    let entries = formats::parse_manifest(&read(path)?).map_err(|source| QueueError::Manifest {
        path: path.to_owned(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::with_capacity(entries.len());
    for (i, entry) in entries.into_iter().enumerate() {
        let file = base.join(&entry.path);
        let mut circuit = load_file(&file, CircuitId(i as u32))?;
        let checks = [
            (
                "width",
                circuit.width() as u64,
                entry.width.map(|v| v as u64),
            ),
            (
                "depth",
                circuit.depth() as u64,
                entry.depth.map(|v| v as u64),
            ),
            ("two_qubit", circuit.two_qubit_count(), entry.two_qubit),
        ];
        for (metric, actual, expected) in checks {
            if let Some(expected) = expected.filter(|&e| e != actual) {
                return Err(QueueError::MetricMismatch {
                    path: file,
                    metric,
                    actual,
                    expected,
                });
            }
        }
        if let Some(ideal) = entry.ideal {
            let bits = circuit.measured_clbits().len();
            if ideal.len() != bits {
                return Err(QueueError::IdealWidth {
                    path: file,
                    len: ideal.len(),
                    ideal,
                    bits,
                });
            }
            circuit = circuit.with_ideal_outcome(ideal);
        }
        out.push(QueueEntry {
            source: entry.path,
            circuit,
        });
    }
    Ok(out)
}

/// Draws `n` jobs uniformly with replacement from `pool`.
///
/// The generator is ChaCha8 seeded with `seed_from_u64(seed)`; each draw is
/// `random_range(0..pool.len())`. Sampled jobs get fresh ids `0..n` in draw
/// order.
pub fn sample_queue(
    pool: &[QueueEntry],
    n: usize,
    seed: u64,
) -> Result<Vec<QueueEntry>, QueueError> {
    if pool.is_empty() {
        return if n == 0 {
            Ok(Vec::new())
        } else {
            Err(QueueError::EmptyPool)
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|i| {
            let pick = &pool[rng.random_range(0..pool.len())];
            QueueEntry {
                source: pick.source.clone(),
                circuit: pick.circuit.clone().with_id(CircuitId(i as u32)),
            }
        })
        .collect())
}

pub fn circuits(entries: &[QueueEntry]) -> Vec<Circuit> {
    entries.iter().map(|e| e.circuit.clone()).collect()
}
