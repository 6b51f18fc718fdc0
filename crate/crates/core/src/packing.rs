//! Rectangle packing of circuits onto the qubit-time grid.
//!
//! Every packer keeps a skyline: for each qubit, the first layer at which it
//! is free again. A circuit of width `q` goes to the `q`-qubit window whose
//! highest frontier entry is lowest, and starts at that layer.
//!
//! [`pack_circpack`] runs one skyline per trap so that no circuit straddles a
//! trap boundary, and seals a batch once the running two-qubit-gate count
//! reaches the topology's `alpha`. The baselines ([`pack_fifo`],
//! [`pack_generic_skyline`]) use one skyline over the whole device and never
//! cut.

use std::collections::HashSet;

use thiserror::Error;

use crate::model::{Algorithm, Batch, Circuit, CircuitId, DeviceTopology, Placement, Schedule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PackError {
    #[error(
        "circuit {id} (`{name}`) needs {width} qubits but the largest {scope} holds {capacity}"
    )]
    Oversized {
        id: CircuitId,
        name: String,
        width: usize,
        capacity: usize,
        scope: &'static str,
    },
    #[error("circuit id {0} appears more than once in the queue")]
    DuplicateCircuit(CircuitId),
}

/// Per-trap, per-qubit next free layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkylineGrid {
    traps: Vec<Vec<usize>>,
}

impl SkylineGrid {
    pub fn new(capacities: &[usize]) -> Self {
        Self {
            traps: capacities.iter().map(|&c| vec![0; c]).collect(),
        }
    }

    pub fn trap(&self, index: usize) -> &[usize] {
        &self.traps[index]
    }

    pub fn trap_count(&self) -> usize {
        self.traps.len()
    }

    /// Raises `width` qubits starting at `qubit_start` to `layer_end`.
    pub fn occupy(&mut self, trap: usize, qubit_start: usize, width: usize, layer_end: usize) {
        for slot in &mut self.traps[trap][qubit_start..qubit_start + width] {
            *slot = layer_end;
        }
    }

    pub fn reset(&mut self) {
        for t in &mut self.traps {
            t.fill(0);
        }
    }

    /// Highest frontier entry over all traps.
    pub fn max_layer(&self) -> usize {
        self.traps.iter().flatten().copied().max().unwrap_or(0)
    }
}

/// Earliest start over all `width`-qubit windows of `frontier`, as
/// `(layer_start, qubit_start)`. Ties go to the lowest qubit. `None` when
/// the window is wider than the frontier.
pub fn skyline_minimax(frontier: &[usize], width: usize) -> Option<(usize, usize)> {
    if width == 0 || width > frontier.len() {
        return None;
    }
    frontier
        .windows(width)
        .enumerate()
        .map(|(start, w)| (w.iter().copied().max().unwrap_or(0), start))
        .min()
}

pub fn pack(
    algorithm: Algorithm,
    circuits: &[Circuit],
    topology: &DeviceTopology,
) -> Result<Schedule, PackError> {
    match algorithm {
        Algorithm::Serial => pack_serial(circuits, topology),
        Algorithm::Fifo => pack_fifo(circuits, topology),
        Algorithm::Skyline => pack_generic_skyline(circuits, topology),
        Algorithm::CircPack => pack_circpack(circuits, topology),
    }
}

fn check_unique(circuits: &[Circuit]) -> Result<(), PackError> {
    let mut seen = HashSet::with_capacity(circuits.len());
    match circuits.iter().find(|c| !seen.insert(c.id())) {
        Some(c) => Err(PackError::DuplicateCircuit(c.id())),
        None => Ok(()),
    }
}

fn check_width(c: &Circuit, capacity: usize, scope: &'static str) -> Result<(), PackError> {
    if c.width() > capacity {
        return Err(PackError::Oversized {
            id: c.id(),
            name: c.name().to_owned(),
            width: c.width(),
            capacity,
            scope,
        });
    }
    Ok(())
}

/// Width descending, id ascending.
fn by_width_desc(circuits: &[Circuit]) -> Vec<&Circuit> {
    let mut sorted: Vec<&Circuit> = circuits.iter().collect();
    sorted.sort_by_key(|c| (std::cmp::Reverse(c.width()), c.id()));
    sorted
}

/// Trap-aware packing with the two-qubit-gate cutoff.
pub fn pack_circpack(
    circuits: &[Circuit],
    topology: &DeviceTopology,
) -> Result<Schedule, PackError> {
    check_unique(circuits)?;
    let capacity = topology.max_trap_capacity();
    for c in circuits {
        check_width(c, capacity, "trap")?;
    }

    let mut grid = SkylineGrid::new(topology.traps());
    let mut batches = Vec::new();
    let mut current: Vec<Placement> = Vec::new();
    let mut running = 0u64;

    for circuit in by_width_desc(circuits) {
        let mut best: Option<(usize, usize, usize)> = None;
        for trap in 0..grid.trap_count() {
            if let Some((layer, qs)) = skyline_minimax(grid.trap(trap), circuit.width()) {
                if best.is_none_or(|(l, _, _)| layer < l) {
                    best = Some((layer, trap, qs));
                }
            }
        }
        let (layer, trap, qs) = best.expect("width checked against the largest trap");
        grid.occupy(trap, qs, circuit.width(), layer + circuit.depth());
        current.push(Placement {
            circuit_id: circuit.id(),
            trap_index: trap,
            qubit_start: qs,
            layer_start: layer,
            width: circuit.width(),
            depth: circuit.depth(),
        });
        running += circuit.two_qubit_count();

        if running >= topology.alpha() {
            batches.push(Batch {
                index: batches.len(),
                placements: std::mem::take(&mut current),
                two_qubit_total: running,
            });
            grid.reset();
            running = 0;
        }
    }
    if !current.is_empty() {
        batches.push(Batch {
            index: batches.len(),
            placements: current,
            two_qubit_total: running,
        });
    }
    Ok(Schedule {
        algorithm: Algorithm::CircPack,
        batches,
    })
}

/// One circuit per batch, each starting at layer 0.
pub fn pack_serial(circuits: &[Circuit], topology: &DeviceTopology) -> Result<Schedule, PackError> {
    check_unique(circuits)?;
    let total = topology.total_qubits();
    let mut batches = Vec::with_capacity(circuits.len());
    for circuit in circuits {
        check_width(circuit, total, "device")?;
        let (trap_index, qubit_start) = topology
            .traps()
            .iter()
            .position(|&cap| cap >= circuit.width())
            .map_or((0, 0), |t| (t, 0));
        batches.push(Batch {
            index: batches.len(),
            placements: vec![Placement {
                circuit_id: circuit.id(),
                trap_index,
                qubit_start,
                layer_start: 0,
                width: circuit.width(),
                depth: circuit.depth(),
            }],
            two_qubit_total: circuit.two_qubit_count(),
        });
    }
    Ok(Schedule {
        algorithm: Algorithm::Serial,
        batches,
    })
}

/// Queue order, one skyline across all traps.
pub fn pack_fifo(circuits: &[Circuit], topology: &DeviceTopology) -> Result<Schedule, PackError> {
    let order: Vec<&Circuit> = circuits.iter().collect();
    pack_global(order, circuits, topology, Algorithm::Fifo)
}

/// Width-descending order, one skyline across all traps.
pub fn pack_generic_skyline(
    circuits: &[Circuit],
    topology: &DeviceTopology,
) -> Result<Schedule, PackError> {
    pack_global(
        by_width_desc(circuits),
        circuits,
        topology,
        Algorithm::Skyline,
    )
}

fn pack_global(
    order: Vec<&Circuit>,
    circuits: &[Circuit],
    topology: &DeviceTopology,
    algorithm: Algorithm,
) -> Result<Schedule, PackError> {
    check_unique(circuits)?;
    let total = topology.total_qubits();
    for c in circuits {
        check_width(c, total, "device")?;
    }
    if circuits.is_empty() {
        return Ok(Schedule::empty(algorithm));
    }

    let mut frontier = vec![0usize; total];
    let mut placements = Vec::with_capacity(order.len());
    let mut two_qubit_total = 0;
    for circuit in order {
        let (layer, start) =
            skyline_minimax(&frontier, circuit.width()).expect("width checked against device");
        let end = layer + circuit.depth();
        frontier[start..start + circuit.width()].fill(end);
        let trap_index = topology.trap_of(start).expect("start inside device");
        placements.push(Placement {
            circuit_id: circuit.id(),
            trap_index,
            qubit_start: start - topology.trap_offset(trap_index),
            layer_start: layer,
            width: circuit.width(),
            depth: circuit.depth(),
        });
        two_qubit_total += circuit.two_qubit_count();
    }
    Ok(Schedule {
        algorithm,
        batches: vec![Batch {
            index: 0,
            placements,
            two_qubit_total,
        }],
    })
}
