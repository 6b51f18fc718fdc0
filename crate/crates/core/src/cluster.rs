//! Spreading a queue over several devices before packing each one.

use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::model::{Algorithm, Circuit, DeviceTopology, Schedule, WorkerAssignment};
use crate::packing::{self, PackError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error("at least one worker is required")]
    NoWorkers,
    #[error("circuit {id} needs {width} qubits but no worker can host it")]
    Unplaceable {
        id: crate::model::CircuitId,
        width: usize,
    },
    #[error("worker {worker}: {source}")]
    Pack {
        worker: usize,
        #[source]
        source: PackError,
    },
}

/// Greedy area balancing: in queue order, each circuit goes to the lowest
/// index worker carrying the least total area.
pub fn balanced_assign(
    circuits: &[Circuit],
    worker_count: usize,
) -> Result<WorkerAssignment, ClusterError> {
    assign_with_capacity(circuits, &vec![usize::MAX; worker_count])
}

/// Like [`balanced_assign`], but a circuit wider than `capacities[w]` skips
/// worker `w` and falls to the next least-loaded worker that can host it.
pub fn assign_with_capacity(
    circuits: &[Circuit],
    capacities: &[usize],
) -> Result<WorkerAssignment, ClusterError> {
    if capacities.is_empty() {
        return Err(ClusterError::NoWorkers);
    }
    let mut workers = vec![Vec::new(); capacities.len()];
    let mut loads = vec![0u64; capacities.len()];
    for c in circuits {
        let target = (0..capacities.len())
            .filter(|&w| capacities[w] >= c.width())
            .min_by_key(|&w| (loads[w], w))
            .ok_or(ClusterError::Unplaceable {
                id: c.id(),
                width: c.width(),
            })?;
        loads[target] += c.area();
        workers[target].push(c.id());
    }
    Ok(WorkerAssignment { workers, loads })
}

/// Widest circuit `algorithm` can place on `topology`.
fn capacity_for(algorithm: Algorithm, topology: &DeviceTopology) -> usize {
    if algorithm.is_trap_confined() {
        topology.max_trap_capacity()
    } else {
        topology.total_qubits()
    }
}

/// Balanced assignment followed by an independent pack per worker. Workers
/// are packed on separate threads; results come back in worker order.
pub fn schedule_cluster(
    circuits: &[Circuit],
    topologies: &[DeviceTopology],
    algorithm: Algorithm,
) -> Result<(WorkerAssignment, Vec<Schedule>), ClusterError> {
    let (assignment, timed) = schedule_cluster_timed(circuits, topologies, algorithm)?;
    Ok((assignment, timed.into_iter().map(|(s, _)| s).collect()))
}

/// [`schedule_cluster`] with the pack time of each worker.
pub fn schedule_cluster_timed(
    circuits: &[Circuit],
    topologies: &[DeviceTopology],
    algorithm: Algorithm,
) -> Result<(WorkerAssignment, Vec<(Schedule, Duration)>), ClusterError> {
    let capacities: Vec<usize> = topologies
        .iter()
        .map(|t| capacity_for(algorithm, t))
        .collect();
    let assignment = assign_with_capacity(circuits, &capacities)?;

    let mut queues: Vec<Vec<Circuit>> = vec![Vec::new(); topologies.len()];
    let owner: std::collections::HashMap<_, usize> = assignment
        .workers
        .iter()
        .enumerate()
        .flat_map(|(w, ids)| ids.iter().map(move |&id| (id, w)))
        .collect();
    for c in circuits {
        queues[owner[&c.id()]].push(c.clone());
    }

    let results: Vec<Result<(Schedule, Duration), PackError>> = thread::scope(|s| {
        let handles: Vec<_> = queues
            .iter()
            .zip(topologies)
            .map(|(q, t)| {
                s.spawn(move || {
                    let start = Instant::now();
                    packing::pack(algorithm, q, t).map(|s| (s, start.elapsed()))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("packer thread panicked"))
            .collect()
    });
    let schedules = results
        .into_iter()
        .enumerate()
        .map(|(worker, r)| r.map_err(|source| ClusterError::Pack { worker, source }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((assignment, schedules))
}

/// Packs each worker's queue one after another; same result as
/// [`schedule_cluster`].
pub fn schedule_cluster_sequential(
    circuits: &[Circuit],
    topologies: &[DeviceTopology],
    algorithm: Algorithm,
) -> Result<(WorkerAssignment, Vec<Schedule>), ClusterError> {
    let capacities: Vec<usize> = topologies
        .iter()
        .map(|t| capacity_for(algorithm, t))
        .collect();
    let assignment = assign_with_capacity(circuits, &capacities)?;
    let mut schedules = Vec::with_capacity(topologies.len());
    for (worker, (ids, topology)) in assignment.workers.iter().zip(topologies).enumerate() {
        let queue: Vec<Circuit> = circuits
            .iter()
            .filter(|c| ids.contains(&c.id()))
            .cloned()
            .collect();
        schedules.push(
            packing::pack(algorithm, &queue, topology)
                .map_err(|source| ClusterError::Pack { worker, source })?,
        );
    }
    Ok((assignment, schedules))
}
