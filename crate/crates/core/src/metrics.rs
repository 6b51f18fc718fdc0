//! Schedule quality: utilization, layer reduction, shuttle estimate and
//! scheduling time.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::model::{Algorithm, Circuit, CircuitId, DeviceTopology, Schedule};
use crate::packing::{self, PackError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("utilization is undefined for an empty schedule")]
    EmptySchedule,
    #[error("layer {layer} is outside a schedule of {makespan} layers")]
    LayerOutOfRange { layer: usize, makespan: usize },
    #[error("layer reduction needs a positive serial layer count")]
    ZeroSerialLayers,
}

/// Sum of circuit areas over the `total_qubits × total_makespan` container.
pub fn avg_utilization(schedule: &Schedule, total_qubits: usize) -> Result<f64, MetricError> {
    let makespan = schedule.total_makespan();
    if makespan == 0 || total_qubits == 0 {
        return Err(MetricError::EmptySchedule);
    }
    Ok(schedule.total_area() as f64 / (total_qubits as f64 * makespan as f64))
}

/// Fraction of qubits inside some circuit's rectangle at global layer `t`.
/// Batches follow one another on the time axis.
pub fn instantaneous_utilization(
    schedule: &Schedule,
    total_qubits: usize,
    t: usize,
) -> Result<f64, MetricError> {
    let makespan = schedule.total_makespan();
    if t >= makespan {
        return Err(MetricError::LayerOutOfRange { layer: t, makespan });
    }
    let busy: usize = schedule
        .batches_with_offsets()
        .flat_map(|(offset, b)| b.placements.iter().map(move |p| (offset, p)))
        .filter(|(offset, p)| (offset + p.layer_start..offset + p.layer_end()).contains(&t))
        .map(|(_, p)| p.width)
        .sum();
    Ok(busy as f64 / total_qubits as f64)
}

/// Layer reduction factor in percent.
pub fn lrf(serial_layers: usize, makespan: usize) -> Result<f64, MetricError> {
    if serial_layers == 0 {
        return Err(MetricError::ZeroSerialLayers);
    }
    Ok(100.0 * (serial_layers as f64 - makespan as f64) / serial_layers as f64)
}

/// Two-qubit gates whose operands land in different traps, with logical
/// qubit `k` of a placement on physical qubit `start + k`.
///
/// Stands in for a shuttle compiler: it counts gates that would need ion
/// transport, not the transport operations themselves.
pub fn estimate_shuttles(
    schedule: &Schedule,
    circuits: &[Circuit],
    topology: &DeviceTopology,
) -> u64 {
    let by_id: HashMap<CircuitId, &Circuit> = circuits.iter().map(|c| (c.id(), c)).collect();
    let mut count = 0;
    for p in schedule.placements() {
        if p.is_trap_confined(topology) {
            continue;
        }
        let Some(circuit) = by_id.get(&p.circuit_id) else {
            continue;
        };
        let start = p.physical_qubit_start(topology);
        count += circuit
            .gates()
            .iter()
            .filter(|g| g.is_two_qubit())
            .filter(|g| {
                topology.trap_of(start + g.operands[0]) != topology.trap_of(start + g.operands[1])
            })
            .count() as u64;
    }
    count
}

/// One row of a packer comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleReport {
    pub algorithm: Algorithm,
    pub circuits: usize,
    pub makespan: usize,
    pub cutoffs: usize,
    pub shuttles: u64,
    pub avg_utilization: Option<f64>,
    /// `None` for the serial baseline itself.
    pub lrf: Option<f64>,
    pub elapsed: Duration,
}

/// Bundles the metrics of `schedule`. `serial_layers` is the serial
/// makespan of the same queue.
pub fn schedule_report(
    schedule: &Schedule,
    circuits: &[Circuit],
    topology: &DeviceTopology,
    serial_layers: usize,
    elapsed: Duration,
) -> ScheduleReport {
    let makespan = schedule.total_makespan();
    ScheduleReport {
        algorithm: schedule.algorithm,
        circuits: schedule.circuit_count(),
        makespan,
        cutoffs: schedule.cutoff_count(),
        shuttles: estimate_shuttles(schedule, circuits, topology),
        avg_utilization: avg_utilization(schedule, topology.total_qubits()).ok(),
        lrf: match schedule.algorithm {
            Algorithm::Serial => None,
            _ => lrf(serial_layers, makespan).ok(),
        },
        elapsed,
    }
}

/// Runs `algorithm`, timing only the packer call.
pub fn timed_pack(
    algorithm: Algorithm,
    circuits: &[Circuit],
    topology: &DeviceTopology,
) -> Result<(Schedule, Duration), PackError> {
    let start = Instant::now();
    let schedule = packing::pack(algorithm, circuits, topology)?;
    Ok((schedule, start.elapsed()))
}

/// Serial layer count of a queue: the sum of its depths.
pub fn serial_layers(circuits: &[Circuit]) -> usize {
    circuits.iter().map(Circuit::depth).sum()
}
