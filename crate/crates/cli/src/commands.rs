use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use circpack::cluster::{schedule_cluster_timed, ClusterError};
use circpack::formats::{self, CircuitRecord, LayoutSidecar, MetricsRecord, ScheduleFile};
use circpack::metrics::{self, ScheduleReport};
use circpack::model::{Algorithm, Circuit, CircuitId, DeviceTopology, Schedule};
use circpack::qasm;
use circpack::queue::{self, QueueEntry};
use circpack::render;

use crate::table::Table;
use crate::{
    BenchArgs, CliError, ClusterArgs, CombineArgs, DeviceArgs, ScheduleArgs, UnbundleArgs,
};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(CliError::Output)
}

fn load_topology(args: &DeviceArgs) -> Result<DeviceTopology, CliError> {
    let topology =
        formats::parse_topology(&read(&args.topology)?).map_err(|source| CliError::Format {
            path: args.topology.clone(),
            source,
        })?;
    Ok(match args.alpha {
        Some(alpha) => topology.with_alpha(alpha)?,
        None => topology,
    })
}

fn load_entries(
    path: &Path,
    sample: Option<usize>,
    seed: u64,
) -> Result<Vec<QueueEntry>, CliError> {
    let pool = queue::load_queue(path)?;
    Ok(match sample {
        Some(n) => queue::sample_queue(&pool, n, seed)?,
        None => pool,
    })
}

fn records(entries: &[QueueEntry]) -> Vec<CircuitRecord> {
    entries
        .iter()
        .map(|e| CircuitRecord {
            id: e.circuit.id(),
            name: e.circuit.name().to_owned(),
            source: e.source.clone(),
        })
        .collect()
}

fn metrics_record(report: &ScheduleReport) -> MetricsRecord {
    MetricsRecord {
        total_makespan: report.makespan,
        cutoff_count: report.cutoffs,
        estimated_shuttles: report.shuttles,
        avg_utilization: report.avg_utilization,
    }
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "---".to_owned(), |v| format!("{v:.2}"))
}

fn with_unit(v: Option<f64>) -> String {
    v.map_or_else(|| "---".to_owned(), |v| format!("{v:.2}%"))
}

fn millis(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

fn summary(report: &ScheduleReport, batches: usize) -> String {
    format!(
        "{}: {} circuits, {} batches, makespan {} layers, {} cutoffs, {} est. shuttles, utilization {}, LRF {}, {} ms\n",
        report.algorithm,
        report.circuits,
        batches,
        report.makespan,
        report.cutoffs,
        report.shuttles,
        with_unit(report.avg_utilization.map(|u| 100.0 * u)),
        with_unit(report.lrf),
        millis(report.elapsed)
    )
}

pub fn schedule(args: &ScheduleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let topology = load_topology(&args.device)?;
    let entries = load_entries(&args.queue, args.sample, args.seed)?;
    let circuits = queue::circuits(&entries);
    let (schedule, elapsed) = metrics::timed_pack(args.algo, &circuits, &topology)?;
    let report = metrics::schedule_report(
        &schedule,
        &circuits,
        &topology,
        metrics::serial_layers(&circuits),
        elapsed,
    );
    if let Some(path) = &args.out {
        let file = ScheduleFile::new(
            &schedule,
            &topology,
            records(&entries),
            metrics_record(&report),
        );
        write(path, &file.to_json())?;
    }
    if let Some(path) = &args.svg {
        write(path, &render::gantt_svg(&schedule, &circuits, &topology))?;
    }
    if args.gantt {
        emit(out, &render::gantt_text(&schedule, &circuits, &topology))?;
    }
    emit(out, &summary(&report, schedule.batches.len()))
}

pub fn bench(args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let topology = load_topology(&args.device)?;
    let pool = queue::load_queue(&args.queue)?;
    let mut table = Table::new(&[
        "algorithm",
        "circuits",
        "makespan",
        "cutoffs",
        "shuttles",
        "util %",
        "LRF %",
        "time ms",
    ]);
    let mut csv =
        String::from("circuits,algorithm,makespan,cutoffs,shuttles,avg_util_pct,lrf_pct\n");
    for &size in &args.sizes {
        let circuits = queue::circuits(&queue::sample_queue(&pool, size, args.seed)?);
        let serial = metrics::serial_layers(&circuits);
        for algorithm in Algorithm::ALL {
            let (schedule, elapsed) = metrics::timed_pack(algorithm, &circuits, &topology)?;
            let r = metrics::schedule_report(&schedule, &circuits, &topology, serial, elapsed);
            let util = pct(r.avg_utilization.map(|u| 100.0 * u));
            let lrf = pct(r.lrf);
            table.push(vec![
                algorithm.to_string(),
                size.to_string(),
                r.makespan.to_string(),
                r.cutoffs.to_string(),
                r.shuttles.to_string(),
                util.clone(),
                lrf.clone(),
                millis(r.elapsed),
            ]);
            let _ = writeln!(
                csv,
                "{size},{algorithm},{},{},{},{util},{lrf}",
                r.makespan, r.cutoffs, r.shuttles
            );
        }
    }
    if let Some(path) = &args.csv {
        write(path, &csv)?;
    }
    emit(out, &table.render())
}

pub fn cluster(args: &ClusterArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.workers == 0 {
        return Err(ClusterError::NoWorkers.into());
    }
    let topology = load_topology(&args.device)?;
    let entries = load_entries(&args.queue, Some(args.size), args.seed)?;
    let circuits = queue::circuits(&entries);
    let topologies = vec![topology.clone(); args.workers];
    let (assignment, schedules) = schedule_cluster_timed(&circuits, &topologies, args.algo)?;

    let mut table = Table::new(&[
        "worker", "circuits", "area", "makespan", "util %", "time ms",
    ]);
    let mut makespans = Vec::new();
    let mut utils = Vec::new();
    for (w, (schedule, elapsed)) in schedules.iter().enumerate() {
        let util = metrics::avg_utilization(schedule, topology.total_qubits())
            .ok()
            .map(|u| 100.0 * u);
        makespans.push(schedule.total_makespan());
        utils.extend(util);
        table.push(vec![
            w.to_string(),
            assignment.workers[w].len().to_string(),
            assignment.loads[w].to_string(),
            schedule.total_makespan().to_string(),
            pct(util),
            millis(*elapsed),
        ]);
    }
    if let Some(dir) = &args.out_dir {
        create_dir(dir)?;
        for (w, (schedule, _)) in schedules.iter().enumerate() {
            write(
                &dir.join(format!("worker_{w}.json")),
                &worker_file(schedule, &topology, &entries)?,
            )?;
        }
    }

    let hi = makespans.iter().copied().max().unwrap_or(0);
    let lo = makespans.iter().copied().min().unwrap_or(0);
    let spread = if hi == 0 {
        0.0
    } else {
        100.0 * (hi - lo) as f64 / hi as f64
    };
    let (util_lo, util_hi) = utils
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &u| {
            (a.min(u), b.max(u))
        });
    let util_spread = if utils.is_empty() {
        0.0
    } else {
        util_hi - util_lo
    };
    let mut text = table.render();
    let _ = writeln!(
        text,
        "{} circuits on {} workers: makespan spread {spread:.2}% (max {hi}, min {lo}), utilization spread {util_spread:.2} pp",
        circuits.len(),
        args.workers
    );
    emit(out, &text)
}

/// Schedule file for one worker, listing only the circuits it ran.
fn worker_file(
    schedule: &Schedule,
    topology: &DeviceTopology,
    entries: &[QueueEntry],
) -> Result<String, CliError> {
    let ids: std::collections::HashSet<CircuitId> =
        schedule.placements().map(|p| p.circuit_id).collect();
    let mine: Vec<QueueEntry> = entries
        .iter()
        .filter(|e| ids.contains(&e.circuit.id()))
        .cloned()
        .collect();
    let circuits = queue::circuits(&mine);
    let report = metrics::schedule_report(
        schedule,
        &circuits,
        topology,
        metrics::serial_layers(&circuits),
        Duration::ZERO,
    );
    Ok(ScheduleFile::new(schedule, topology, records(&mine), metrics_record(&report)).to_json())
}

fn load_schedule(path: &Path) -> Result<(ScheduleFile, Schedule), CliError> {
    let format = |source| CliError::Format {
        path: path.to_owned(),
        source,
    };
    let file = ScheduleFile::from_json(&read(path)?).map_err(format)?;
    let schedule = file.to_schedule().map_err(format)?;
    Ok((file, schedule))
}

/// Circuits named by the schedule file, looked up in the queue by source.
fn scheduled_circuits(file: &ScheduleFile, queue_path: &Path) -> Result<Vec<Circuit>, CliError> {
    let entries = queue::load_queue(queue_path)?;
    if file.circuits.is_empty() {
        return Ok(queue::circuits(&entries));
    }
    let by_source: HashMap<&str, &Circuit> = entries
        .iter()
        .map(|e| (e.source.as_str(), &e.circuit))
        .collect();
    file.circuits
        .iter()
        .map(|r| {
            by_source
                .get(r.source.as_str())
                .map(|c| (*c).clone().with_id(r.id))
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "schedule lists `{}` for circuit {} but {} has no such entry",
                        r.source,
                        r.id,
                        queue_path.display()
                    ))
                })
        })
        .collect()
}

pub fn combine(args: &CombineArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (file, schedule) = load_schedule(&args.schedule)?;
    let circuits = scheduled_circuits(&file, &args.queue)?;
    let batches: Vec<_> = match args.batch {
        Some(i) => vec![schedule.batches.get(i).ok_or_else(|| {
            CliError::Usage(format!(
                "batch {i} requested but the schedule has {}",
                schedule.batches.len()
            ))
        })?],
        None => schedule.batches.iter().collect(),
    };
    create_dir(&args.out_dir)?;
    let mut text = String::new();
    for batch in batches {
        let program = qasm::emit_combined(batch, &circuits, &file.topology).map_err(|source| {
            CliError::Qasm {
                path: args.schedule.clone(),
                source,
            }
        })?;
        let qasm_path = args.out_dir.join(format!("batch_{}.qasm", batch.index));
        let layout_path = args
            .out_dir
            .join(format!("batch_{}.layout.json", batch.index));
        write(&qasm_path, &program.text)?;
        write(
            &layout_path,
            &LayoutSidecar::new(batch.index, program.register_layout.clone()).to_json(),
        )?;
        let _ = writeln!(
            text,
            "batch {}: {} circuits, {} registers -> {}",
            batch.index,
            batch.placements.len(),
            program.register_layout.len(),
            qasm_path.display()
        );
    }
    emit(out, &text)
}

pub fn unbundle(args: &UnbundleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let counts =
        formats::parse_counts(&read(&args.counts)?).map_err(|source| CliError::Format {
            path: args.counts.clone(),
            source,
        })?;
    let layout =
        LayoutSidecar::from_json(&read(&args.layout)?).map_err(|source| CliError::Format {
            path: args.layout.clone(),
            source,
        })?;
    let split = qasm::unbundle(&counts, &layout.registers).map_err(|source| CliError::Qasm {
        path: args.counts.clone(),
        source,
    })?;

    let known: HashMap<CircuitId, Circuit> = match (&args.schedule, &args.queue) {
        (Some(schedule), Some(queue)) => {
            let (file, _) = load_schedule(schedule)?;
            scheduled_circuits(&file, queue)?
                .into_iter()
                .map(|c| (c.id(), c))
                .collect()
        }
        _ => HashMap::new(),
    };

    create_dir(&args.out_dir)?;
    let mut table = Table::new(&["circuit", "name", "shots", "PST %"]);
    for (id, marginal) in &split {
        write(
            &args.out_dir.join(format!("circuit_{id}.counts")),
            &formats::write_counts(marginal),
        )?;
        let circuit = known.get(id);
        let pst = circuit
            .and_then(|c| c.ideal_outcome())
            .map(|ideal| qasm::pst(marginal, ideal));
        table.push(vec![
            id.to_string(),
            circuit.map_or("", |c| c.name()).to_owned(),
            marginal.values().sum::<u64>().to_string(),
            pct(pst),
        ]);
    }
    emit(out, &table.render())
}
