use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use circpack::formats::{LayoutSidecar, ScheduleFile};
use circpack::qasm::parse_program;
use circpack_cli::{run, Cli};
use clap::Parser;
use tempfile::TempDir;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/benchmarks")
}

fn small() -> String {
    fixtures().join("manifest_small.txt").display().to_string()
}

struct Scratch {
    dir: TempDir,
}

impl Scratch {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("topo.txt"),
            "traps = 10,10\nalpha = 170\nlayout = linear\n",
        )
        .unwrap();
        Self { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).display().to_string()
    }

    fn topo(&self) -> String {
        self.path("topo.txt")
    }
}

fn call(args: &[&str]) -> Result<String, String> {
    let cli = Cli::try_parse_from(std::iter::once("circpack").chain(args.iter().copied()))
        .map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    run(cli, &mut out).map_err(|e| e.to_string())?;
    Ok(String::from_utf8(out).unwrap())
}

fn schedule_file(path: &str) -> ScheduleFile {
    ScheduleFile::from_json(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn small_fixtures_fit_one_batch() {
    let s = Scratch::new();
    let out = s.path("s.json");
    let svg = s.path("s.svg");
    let line = call(&[
        "schedule",
        "--topology",
        &s.topo(),
        "--queue",
        &small(),
        "--out",
        &out,
        "--svg",
        &svg,
    ])
    .unwrap();
    assert!(
        line.starts_with("circpack: 8 circuits, 1 batches"),
        "{line}"
    );
    let file = schedule_file(&out);
    assert_eq!(file.batches.len(), 1);
    assert_eq!(file.metrics.estimated_shuttles, 0);
    assert_eq!(file.metrics.cutoff_count, 0);
    assert_eq!(file.batches[0].two_qubit_total, 100);
    assert_eq!(file.circuits.len(), 8);
    assert_eq!(file.to_schedule().unwrap().circuit_count(), 8);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn serial_reports_one_cutoff_per_circuit() {
    let s = Scratch::new();
    let out = s.path("s.json");
    call(&[
        "schedule",
        "--topology",
        &s.topo(),
        "--queue",
        &small(),
        "--algo",
        "serial",
        "--out",
        &out,
    ])
    .unwrap();
    let file = schedule_file(&out);
    assert_eq!(file.metrics.cutoff_count, 8);
    assert_eq!(file.metrics.total_makespan, 173);
}

#[test]
fn alpha_one_gives_one_batch_per_circuit() {
    let s = Scratch::new();
    let out = s.path("s.json");
    call(&[
        "schedule",
        "--topology",
        &s.topo(),
        "--queue",
        &small(),
        "--alpha",
        "1",
        "--out",
        &out,
    ])
    .unwrap();
    assert_eq!(schedule_file(&out).batches.len(), 8);
}

#[test]
fn sampling_is_seeded() {
    let s = Scratch::new();
    let (a, b, c) = (s.path("a.json"), s.path("b.json"), s.path("c.json"));
    for (seed, out) in [("3", &a), ("3", &b), ("4", &c)] {
        call(&[
            "schedule",
            "--topology",
            &s.topo(),
            "--queue",
            &small(),
            "--sample",
            "50",
            "--seed",
            seed,
            "--out",
            out,
        ])
        .unwrap();
    }
    let read = |p: &str| fs::read_to_string(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    assert_eq!(schedule_file(&a).circuits.len(), 50);
}

#[test]
fn oversized_circuit_is_named() {
    let s = Scratch::new();
    let all = fixtures().join("manifest.txt").display().to_string();
    let err = call(&["schedule", "--topology", &s.topo(), "--queue", &all]).unwrap_err();
    assert!(
        err.contains("10_multiply_n13") && err.contains("13 qubits"),
        "{err}"
    );
    // trap-oblivious packers take the same queue
    call(&[
        "schedule",
        "--topology",
        &s.topo(),
        "--queue",
        &all,
        "--algo",
        "fifo",
    ])
    .unwrap();
}

#[test]
fn parse_errors_carry_file_and_line() {
    let s = Scratch::new();
    let dir = s.dir.path().join("queue");
    fs::create_dir(&dir).unwrap();
    fs::write(dir.join("a.qasm"), "OPENQASM 2.0;\nqreg q[2];\nh q[0];\n").unwrap();
    fs::write(
        dir.join("b.qasm"),
        "OPENQASM 2.0;\nqreg q[2];\nh q[0];\nccx q[0],q[1],q[0];\n",
    )
    .unwrap();
    let err = call(&[
        "schedule",
        "--topology",
        &s.topo(),
        "--queue",
        dir.to_str().unwrap(),
    ])
    .unwrap_err();
    assert!(err.contains("b.qasm") && err.contains("line 4"), "{err}");

    fs::write(s.path("bad.txt"), "traps = 10\nalpha = zero\n").unwrap();
    let err = call(&[
        "schedule",
        "--topology",
        &s.path("bad.txt"),
        "--queue",
        &small(),
    ])
    .unwrap_err();
    assert!(err.contains("bad.txt") && err.contains("line 2"), "{err}");
}

#[test]
fn failures_exit_nonzero() {
    let s = Scratch::new();
    let status = Command::new(env!("CARGO_BIN_EXE_circpack"))
        .args([
            "schedule",
            "--topology",
            &s.topo(),
            "--queue",
            &s.path("missing"),
        ])
        .output()
        .unwrap();
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("missing"));
    let ok = Command::new(env!("CARGO_BIN_EXE_circpack"))
        .args(["schedule", "--topology", &s.topo(), "--queue", &small()])
        .output()
        .unwrap();
    assert!(ok.status.success());
}

#[test]
fn bench_table_and_csv() {
    let s = Scratch::new();
    let (a, b) = (s.path("a.csv"), s.path("b.csv"));
    let text = call(&[
        "bench",
        "--topology",
        &s.topo(),
        "--queue",
        &small(),
        "--sizes",
        "20,200",
        "--seed",
        "1",
        "--csv",
        &a,
    ])
    .unwrap();
    call(&[
        "bench",
        "--topology",
        &s.topo(),
        "--queue",
        &small(),
        "--sizes",
        "20,200",
        "--seed",
        "1",
        "--csv",
        &b,
    ])
    .unwrap();
    let csv = fs::read_to_string(&a).unwrap();
    assert_eq!(csv, fs::read_to_string(&b).unwrap());
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
    assert!(text
        .lines()
        .filter(|l| l.starts_with("serial"))
        .all(|l| l.contains("---")));

    for size in ["20", "200"] {
        let shuttles = |algo: &str| -> u64 {
            let row = csv
                .lines()
                .find(|l| l.starts_with(&format!("{size},{algo},")))
                .unwrap();
            row.split(',').nth(4).unwrap().parse().unwrap()
        };
        assert_eq!(shuttles("circpack"), 0);
        assert!(shuttles("circpack") <= shuttles("skyline"));
        assert!(shuttles("skyline") <= shuttles("fifo"));
    }
}

#[test]
fn cluster_conserves_circuits() {
    let s = Scratch::new();
    let text = call(&[
        "cluster",
        "--topology",
        &s.topo(),
        "--queue",
        &small(),
        "--workers",
        "5",
        "--size",
        "1000",
    ])
    .unwrap();
    let rows: Vec<&str> = text.lines().skip(2).take(5).collect();
    let total: usize = rows
        .iter()
        .map(|r| {
            r.split_whitespace()
                .nth(1)
                .unwrap()
                .parse::<usize>()
                .unwrap()
        })
        .sum();
    assert_eq!(total, 1000);
    assert!(text.contains("makespan spread") && text.contains('%'));
    let err = call(&[
        "cluster",
        "--topology",
        &s.topo(),
        "--queue",
        &small(),
        "--workers",
        "0",
        "--size",
        "10",
    ])
    .unwrap_err();
    assert!(err.contains("worker"));
}

#[test]
fn single_worker_matches_schedule() {
    let s = Scratch::new();
    let dir = s.path("workers");
    let single = s.path("single.json");
    call(&[
        "cluster",
        "--topology",
        &s.topo(),
        "--queue",
        &small(),
        "--workers",
        "1",
        "--size",
        "120",
        "--seed",
        "9",
        "--out-dir",
        &dir,
    ])
    .unwrap();
    call(&[
        "schedule",
        "--topology",
        &s.topo(),
        "--queue",
        &small(),
        "--sample",
        "120",
        "--seed",
        "9",
        "--out",
        &single,
    ])
    .unwrap();
    assert_eq!(
        fs::read_to_string(Path::new(&dir).join("worker_0.json")).unwrap(),
        fs::read_to_string(&single).unwrap()
    );
}

#[test]
fn combine_then_unbundle_scores_ideal_results() {
    let s = Scratch::new();
    let sched = s.path("s.json");
    let combined = s.path("combined");
    let split = s.path("split");
    call(&[
        "schedule",
        "--topology",
        &s.topo(),
        "--queue",
        &small(),
        "--sample",
        "30",
        "--seed",
        "2",
        "--out",
        &sched,
    ])
    .unwrap();
    let text = call(&[
        "combine",
        "--schedule",
        &sched,
        "--queue",
        &small(),
        "--out-dir",
        &combined,
    ])
    .unwrap();
    let file = schedule_file(&sched);
    assert_eq!(text.lines().count(), file.batches.len());

    let ideals: std::collections::HashMap<String, String> =
        fs::read_to_string(fixtures().join("manifest_small.txt"))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .map(|l| {
                let mut parts = l.split_whitespace();
                let path = parts.next().unwrap().to_owned();
                let ideal = parts
                    .find_map(|p| p.strip_prefix("ideal="))
                    .unwrap()
                    .to_owned();
                (path, ideal)
            })
            .collect();
    let source_of =
        |id: u32| -> &str { &file.circuits.iter().find(|c| c.id.0 == id).unwrap().source };

    let qasm = fs::read_to_string(Path::new(&combined).join("batch_0.qasm")).unwrap();
    assert_eq!(parse_program(&qasm).unwrap().width(), 20);
    let layout_path = Path::new(&combined).join("batch_0.layout.json");
    let layout = LayoutSidecar::from_json(&fs::read_to_string(&layout_path).unwrap()).unwrap();
    let key: String = layout
        .registers
        .iter()
        .map(|r| ideals[source_of(r.circuit_id.0)].as_str())
        .collect();
    let counts = s.path("counts.txt");
    fs::write(&counts, format!("{key} 1000\n")).unwrap();

    let table = call(&[
        "unbundle",
        "--counts",
        &counts,
        "--layout",
        layout_path.to_str().unwrap(),
        "--schedule",
        &sched,
        "--queue",
        &small(),
        "--out-dir",
        &split,
    ])
    .unwrap();
    let rows: Vec<&str> = table.lines().skip(2).collect();
    assert_eq!(rows.len(), layout.registers.len());
    assert!(rows.iter().all(|r| r.ends_with("100.00")), "{table}");
    let first = layout.registers[0].circuit_id;
    let marginal =
        fs::read_to_string(Path::new(&split).join(format!("circuit_{first}.counts"))).unwrap();
    assert_eq!(marginal, format!("{} 1000\n", ideals[source_of(first.0)]));
}
