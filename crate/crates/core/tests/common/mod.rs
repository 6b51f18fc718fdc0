//! Test-only oracles, independent of the packers they check.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use circpack::model::{Circuit, CircuitId, DeviceTopology, Gate, Schedule};
use circpack::queue::{self, QueueEntry};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/benchmarks")
}

/// All fourteen benchmark circuits.
pub fn all_fixtures() -> Vec<QueueEntry> {
    queue::load_queue(&fixture_dir().join("manifest.txt")).expect("fixtures load")
}

/// Benchmark circuits 1-8.
pub fn small_pool() -> Vec<QueueEntry> {
    queue::load_queue(&fixture_dir().join("manifest_small.txt")).expect("fixtures load")
}

pub fn sampled(n: usize, seed: u64) -> Vec<Circuit> {
    queue::circuits(&queue::sample_queue(&small_pool(), n, seed).unwrap())
}

/// `width × depth` block of single-qubit gates carrying `cx` two-qubit gates.
pub fn block(id: u32, width: usize, depth: usize, cx: usize) -> Circuit {
    assert!(cx <= depth && (cx == 0 || width >= 2));
    let mut gates = Vec::new();
    gates.extend((0..cx).map(|_| Gate::two("cx", 0, 1)));
    gates.extend((cx..depth).map(|_| Gate::one("h", 0)));
    let first_idle = if cx > 0 { 2 } else { 1 };
    gates.extend((first_idle..width).map(|q| Gate::one("x", q)));
    let c = Circuit::new(CircuitId(id), format!("block{id}"), width, gates).unwrap();
    assert_eq!((c.width(), c.depth()), (width, depth));
    c
}

/// Brute-force feasibility check: cell-level non-overlap, device capacity,
/// trap confinement for trap-aware packers, geometry and completeness.
pub fn check_feasible(
    schedule: &Schedule,
    circuits: &[Circuit],
    topology: &DeviceTopology,
) -> Result<(), String> {
    let by_id: HashMap<CircuitId, &Circuit> = circuits.iter().map(|c| (c.id(), c)).collect();
    let total = topology.total_qubits();
    let mut seen: BTreeMap<CircuitId, usize> = BTreeMap::new();

    for batch in &schedule.batches {
        let makespan = batch
            .placements
            .iter()
            .map(|p| p.layer_start + p.depth)
            .max()
            .unwrap_or(0);
        let mut cells: Vec<Option<CircuitId>> = vec![None; total * makespan];
        for p in &batch.placements {
            let c = by_id
                .get(&p.circuit_id)
                .ok_or(format!("unknown circuit {}", p.circuit_id))?;
            if (p.width, p.depth) != (c.width(), c.depth()) {
                return Err(format!("circuit {} placed with wrong shape", p.circuit_id));
            }
            if p.trap_index >= topology.trap_count() {
                return Err(format!("circuit {} in missing trap", p.circuit_id));
            }
            let start: usize =
                topology.traps()[..p.trap_index].iter().sum::<usize>() + p.qubit_start;
            if start + p.width > total {
                return Err(format!("circuit {} exceeds device capacity", p.circuit_id));
            }
            if schedule.algorithm.is_trap_confined()
                && p.qubit_start + p.width > topology.traps()[p.trap_index]
            {
                return Err(format!("circuit {} crosses a trap boundary", p.circuit_id));
            }
            for q in start..start + p.width {
                for t in p.layer_start..p.layer_start + p.depth {
                    let cell = &mut cells[q * makespan + t];
                    if let Some(other) = cell {
                        return Err(format!(
                            "batch {}: qubit {q} layer {t} holds circuits {other} and {}",
                            batch.index, p.circuit_id
                        ));
                    }
                    *cell = Some(p.circuit_id);
                }
            }
            *seen.entry(p.circuit_id).or_default() += 1;
        }
    }

    let mut expected: BTreeMap<CircuitId, usize> = BTreeMap::new();
    for c in circuits {
        *expected.entry(c.id()).or_default() += 1;
    }
    if seen != expected {
        return Err("scheduled ids differ from the queue".into());
    }
    Ok(())
}

/// Utilization as the mean over layers of busy qubits / total, counted cell
/// by cell.
pub fn utilization_by_layers(schedule: &Schedule, total_qubits: usize) -> f64 {
    let mut busy_cells = 0u64;
    let mut layers = 0u64;
    for batch in &schedule.batches {
        let makespan = batch
            .placements
            .iter()
            .map(|p| p.layer_start + p.depth)
            .max()
            .unwrap_or(0);
        for t in 0..makespan {
            busy_cells += batch
                .placements
                .iter()
                .filter(|p| p.layer_start <= t && t < p.layer_start + p.depth)
                .map(|p| p.width as u64)
                .sum::<u64>();
        }
        layers += makespan as u64;
    }
    busy_cells as f64 / (layers as f64 * total_qubits as f64)
}

pub fn report(name: &str, pass: bool, detail: impl AsRef<str>) {
    println!(
        "[{}] {name}: {}",
        if pass { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
}
