//! Text and JSON file formats: topology, queue manifest, schedule, counts and
//! the register-layout sidecar of a combined program.
//!
//! Conventions restated in every schedule file:
//! * qubit, trap and layer indices are 0-based;
//! * `qubit_start` is relative to `trap`;
//! * result bitstrings concatenate registers in layout order, leftmost first,
//!   and each register is written from its highest classical bit down.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Algorithm, Batch, CircuitId, DeviceTopology, ModelError, Placement, Schedule, DEFAULT_ALPHA,
};
use crate::qasm::{Counts, RegisterSlot};

/// Upper bound on trap count and capacity accepted from files.
const MAX_TRAP_CAPACITY: usize = 1 << 16;
const MAX_TRAPS: usize = 1 << 12;

pub const BIT_ORDER: &str =
    "registers left to right in layout order; within a register highest classical index first";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("invalid topology: {0}")]
    Topology(#[from] ModelError),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("inconsistent schedule: {0}")]
    Schedule(String),
}

fn line_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Line {
        line,
        message: message.into(),
    }
}

/// Non-empty, comment-stripped lines with 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// Reads `key = value` topology text:
///
/// ```text
/// traps = 10,10
/// alpha = 170
/// layout = linear
/// ```
pub fn parse_topology(text: &str) -> Result<DeviceTopology, FormatError> {
    let mut traps = None;
    let mut alpha = DEFAULT_ALPHA;
    for (line, l) in content_lines(text) {
        let (key, value) = l
            .split_once('=')
            .ok_or_else(|| line_err(line, format!("expected `key = value`, found `{l}`")))?;
        let value = value.trim();
        match key.trim() {
            "traps" => {
                let caps = value
                    .split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<usize>()
                            .ok()
                            .filter(|&c| c <= MAX_TRAP_CAPACITY)
                            .ok_or_else(|| {
                                line_err(line, format!("bad trap capacity `{}`", v.trim()))
                            })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if caps.len() > MAX_TRAPS {
                    return Err(line_err(line, format!("{} traps is too many", caps.len())));
                }
                traps = Some(caps);
            }
            "alpha" => {
                alpha = value
                    .parse()
                    .map_err(|_| line_err(line, format!("bad alpha `{value}`")))?;
            }
            "layout" => {
                if value != "linear" {
                    return Err(line_err(line, format!("unsupported layout `{value}`")));
                }
            }
            other => return Err(line_err(line, format!("unknown key `{other}`"))),
        }
    }
    let traps = traps.ok_or_else(|| line_err(0, "missing `traps`"))?;
    Ok(DeviceTopology::new(traps, alpha)?)
}

pub fn write_topology(topology: &DeviceTopology) -> String {
    let traps: Vec<String> = topology.traps().iter().map(usize::to_string).collect();
    format!(
        "traps = {}\nalpha = {}\nlayout = {}\n",
        traps.join(","),
        topology.alpha(),
        topology.layout()
    )
}

/// One line of a queue manifest.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: String,
    pub ideal: Option<String>,
    pub width: Option<usize>,
    pub depth: Option<usize>,
    pub two_qubit: Option<u64>,
}

/// Reads a manifest: one `path [key=value ...]` per line, `#` comments.
/// Keys: `ideal`, `width`, `depth`, `two_qubit`.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, FormatError> {
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        let mut fields = l.split_whitespace();
        let mut entry = ManifestEntry {
            path: fields.next().unwrap_or_default().to_owned(),
            ..Default::default()
        };
        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| line_err(line, format!("expected `key=value`, found `{field}`")))?;
            let num = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| line_err(line, format!("bad number `{v}` for `{key}`")))
            };
            match key {
                "ideal" => {
                    if value.is_empty() || !value.bytes().all(|b| b == b'0' || b == b'1') {
                        return Err(line_err(
                            line,
                            format!("ideal `{value}` is not a bitstring"),
                        ));
                    }
                    entry.ideal = Some(value.to_owned());
                }
                "width" => entry.width = Some(num(value)?),
                "depth" => entry.depth = Some(num(value)?),
                "two_qubit" => entry.two_qubit = Some(num(value)? as u64),
                other => return Err(line_err(line, format!("unknown key `{other}`"))),
            }
        }
        out.push(entry);
    }
    Ok(out)
}

/// Reads shot counts: lines of `<bitstring> <count>`, or a JSON object
/// mapping bitstrings to counts.
pub fn parse_counts(text: &str) -> Result<Counts, FormatError> {
    if text.trim_start().starts_with('{') {
        let counts: Counts = serde_json::from_str(text)?;
        for key in counts.keys() {
            if key.is_empty() || !key.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(line_err(1, format!("`{key}` is not a bitstring")));
            }
        }
        counts
            .values()
            .try_fold(0u64, |acc, &n| acc.checked_add(n))
            .ok_or_else(|| line_err(1, "shot total exceeds 2^64 - 1"))?;
        return Ok(counts);
    }
    let mut counts = Counts::new();
    let mut total = 0u64;
    for (line, l) in content_lines(text) {
        let mut parts = l.split_whitespace();
        let (Some(bits), Some(n), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(line_err(
                line,
                format!("expected `<bitstring> <count>`, found `{l}`"),
            ));
        };
        if !bits.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(line_err(line, format!("`{bits}` is not a bitstring")));
        }
        let n: u64 = n
            .parse()
            .map_err(|_| line_err(line, format!("bad count `{n}`")))?;
        total = total
            .checked_add(n)
            .ok_or_else(|| line_err(line, "shot total exceeds 2^64 - 1"))?;
        *counts.entry(bits.to_owned()).or_insert(0) += n;
    }
    Ok(counts)
}

pub fn write_counts(counts: &Counts) -> String {
    let mut s = String::new();
    for (bits, n) in counts {
        let _ = writeln!(s, "{bits} {n}");
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub circuit_id: CircuitId,
    pub trap: usize,
    pub qubit_start: usize,
    pub layer_start: usize,
    pub depth: usize,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRecord {
    pub makespan: usize,
    pub two_qubit_total: u64,
    pub placements: Vec<PlacementRecord>,
}

/// Queue entry echoed into the schedule so later commands can find sources.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitRecord {
    pub id: CircuitId,
    pub name: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub total_makespan: usize,
    pub cutoff_count: usize,
    /// Cross-trap two-qubit gates under identity placement; an estimate,
    /// not a compiled shuttle schedule.
    pub estimated_shuttles: u64,
    pub avg_utilization: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub indices: String,
    pub qubit_start: String,
    pub bit_order: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            indices: "0-based qubits, traps and layers".into(),
            qubit_start:
                "relative to trap; physical = sum of preceding trap capacities + qubit_start".into(),
            bit_order: BIT_ORDER.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub algorithm: Algorithm,
    pub topology: DeviceTopology,
    #[serde(default)]
    pub conventions: Conventions,
    #[serde(default)]
    pub circuits: Vec<CircuitRecord>,
    pub batches: Vec<BatchRecord>,
    pub metrics: MetricsRecord,
}

impl ScheduleFile {
    pub fn new(
        schedule: &Schedule,
        topology: &DeviceTopology,
        circuits: Vec<CircuitRecord>,
        metrics: MetricsRecord,
    ) -> Self {
        let batches = schedule
            .batches
            .iter()
            .map(|b| BatchRecord {
                makespan: b.makespan(),
                two_qubit_total: b.two_qubit_total,
                placements: b
                    .placements
                    .iter()
                    .map(|p| PlacementRecord {
                        circuit_id: p.circuit_id,
                        trap: p.trap_index,
                        qubit_start: p.qubit_start,
                        layer_start: p.layer_start,
                        depth: p.depth,
                        width: p.width,
                    })
                    .collect(),
            })
            .collect();
        Self {
            algorithm: schedule.algorithm,
            topology: topology.clone(),
            conventions: Conventions::default(),
            circuits,
            batches,
            metrics,
        }
    }

    /// Rebuilds the schedule, checking every placement against the topology.
    pub fn to_schedule(&self) -> Result<Schedule, FormatError> {
        let total = self.topology.total_qubits();
        let mut batches = Vec::with_capacity(self.batches.len());
        for (index, b) in self.batches.iter().enumerate() {
            let mut placements = Vec::with_capacity(b.placements.len());
            for r in &b.placements {
                if r.trap >= self.topology.trap_count() {
                    return Err(FormatError::Schedule(format!(
                        "circuit {} in trap {} of {}",
                        r.circuit_id,
                        r.trap,
                        self.topology.trap_count()
                    )));
                }
                let p = Placement {
                    circuit_id: r.circuit_id,
                    trap_index: r.trap,
                    qubit_start: r.qubit_start,
                    layer_start: r.layer_start,
                    width: r.width,
                    depth: r.depth,
                };
                let end = p
                    .physical_qubit_start(&self.topology)
                    .checked_add(p.width)
                    .filter(|&e| e <= total && p.width > 0 && p.depth > 0);
                if end.is_none() || p.layer_start.checked_add(p.depth).is_none() {
                    return Err(FormatError::Schedule(format!(
                        "circuit {} does not fit the {total}-qubit device",
                        r.circuit_id
                    )));
                }
                placements.push(p);
            }
            let batch = Batch {
                index,
                placements,
                two_qubit_total: b.two_qubit_total,
            };
            if batch.makespan() != b.makespan {
                return Err(FormatError::Schedule(format!(
                    "batch {index} records makespan {} but its placements end at {}",
                    b.makespan,
                    batch.makespan()
                )));
            }
            batches.push(batch);
        }
        Ok(Schedule {
            algorithm: self.algorithm,
            batches,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialises") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Register layout of one combined program, stored beside its QASM file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutSidecar {
    pub batch_index: usize,
    pub bit_order: String,
    pub registers: Vec<RegisterSlot>,
}

impl LayoutSidecar {
    pub fn new(batch_index: usize, registers: Vec<RegisterSlot>) -> Self {
        Self {
            batch_index,
            bit_order: BIT_ORDER.into(),
            registers,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serialises") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }
}
