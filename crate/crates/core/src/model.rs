//! Domain types shared by the parser, the packers and the metrics.
//!
//! A [`Circuit`] is a rectangle `width × depth` on the qubit-time grid. A
//! [`DeviceTopology`] is the container: an ordered list of traps. Packers
//! produce [`Placement`]s grouped into cutoff-delimited [`Batch`]es.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layering;

/// Default running 2-qubit-gate threshold that seals a batch.
pub const DEFAULT_ALPHA: u64 = 170;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("gate `{gate}` (#{index}) uses qubit {qubit} but the circuit has width {width}")]
    OperandOutOfRange {
        gate: String,
        index: usize,
        qubit: usize,
        width: usize,
    },
    #[error("gate `{gate}` (#{index}) has {found} operands, expected {expected}")]
    OperandCount {
        gate: String,
        index: usize,
        found: usize,
        expected: &'static str,
    },
    #[error("two-qubit gate `{gate}` (#{index}) acts twice on qubit {qubit}")]
    RepeatedOperand {
        gate: String,
        index: usize,
        qubit: usize,
    },
    #[error("circuit width must be at least 1")]
    ZeroWidth,
    #[error("circuit `{0}` has no gates")]
    EmptyCircuit(String),
    #[error("topology must have at least one trap")]
    NoTraps,
    #[error("trap {0} has zero capacity")]
    EmptyTrap(usize),
    #[error("alpha must be at least 1")]
    ZeroAlpha,
}

/// Identifier of a job in a queue. Unique within one scheduling call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CircuitId(pub u32);

impl fmt::Display for CircuitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    OneQubit,
    TwoQubit,
    Measure,
    Reset,
    Barrier,
}

/// One operation of a pre-decomposed circuit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    /// Mnemonic as written in the source (`h`, `cx`, `rz`, `measure`, ...).
    pub name: String,
    /// Parameter expression text, carried verbatim (`pi/4`), if any.
    pub params: Option<String>,
    pub operands: Vec<usize>,
    /// Classical bit written by a measurement.
    pub clbit: Option<usize>,
}

impl Gate {
    pub fn one(name: &str, qubit: usize) -> Self {
        Self {
            kind: GateKind::OneQubit,
            name: name.to_owned(),
            params: None,
            operands: vec![qubit],
            clbit: None,
        }
    }

    pub fn two(name: &str, a: usize, b: usize) -> Self {
        Self {
            kind: GateKind::TwoQubit,
            name: name.to_owned(),
            params: None,
            operands: vec![a, b],
            clbit: None,
        }
    }

    pub fn measure(qubit: usize, clbit: usize) -> Self {
        Self {
            kind: GateKind::Measure,
            name: "measure".to_owned(),
            params: None,
            operands: vec![qubit],
            clbit: Some(clbit),
        }
    }

    pub fn reset(qubit: usize) -> Self {
        Self {
            kind: GateKind::Reset,
            name: "reset".to_owned(),
            params: None,
            operands: vec![qubit],
            clbit: None,
        }
    }

    pub fn barrier(qubits: impl IntoIterator<Item = usize>) -> Self {
        Self {
            kind: GateKind::Barrier,
            name: "barrier".to_owned(),
            params: None,
            operands: qubits.into_iter().collect(),
            clbit: None,
        }
    }

    pub fn with_params(mut self, params: impl Into<String>) -> Self {
        self.params = Some(params.into());
        self
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind == GateKind::TwoQubit
    }

    /// Checks operand count, distinctness and range against `width`.
    pub(crate) fn validate(&self, index: usize, width: usize) -> Result<(), ModelError> {
        let n = self.operands.len();
        let expected = match self.kind {
            GateKind::OneQubit | GateKind::Measure | GateKind::Reset => (n == 1, "1"),
            GateKind::TwoQubit => (n == 2, "2"),
            GateKind::Barrier => (n >= 1, "at least 1"),
        };
        if !expected.0 {
            return Err(ModelError::OperandCount {
                gate: self.name.clone(),
                index,
                found: n,
                expected: expected.1,
            });
        }
        if let Some(&qubit) = self.operands.iter().find(|&&q| q >= width) {
            return Err(ModelError::OperandOutOfRange {
                gate: self.name.clone(),
                index,
                qubit,
                width,
            });
        }
        if self.kind == GateKind::TwoQubit && self.operands[0] == self.operands[1] {
            return Err(ModelError::RepeatedOperand {
                gate: self.name.clone(),
                index,
                qubit: self.operands[0],
            });
        }
        Ok(())
    }
}

/// A job: a gate list plus the metrics that make it a rectangle.
///
/// Metrics are derived once at construction and never stored apart from the
/// gates they describe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    id: CircuitId,
    name: String,
    width: usize,
    gates: Vec<Gate>,
    layer_of: Vec<usize>,
    depth: usize,
    two_qubit_count: u64,
    ideal_outcome: Option<String>,
}

impl Circuit {
    pub fn new(
        id: CircuitId,
        name: impl Into<String>,
        width: usize,
        gates: Vec<Gate>,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        if width == 0 {
            return Err(ModelError::ZeroWidth);
        }
        let layering = layering::asap_layers(&gates, width)?;
        if layering.depth == 0 {
            return Err(ModelError::EmptyCircuit(name));
        }
        Ok(Self {
            id,
            name,
            width,
            two_qubit_count: layering::two_qubit_count(&gates),
            depth: layering.depth,
            layer_of: layering.layer_of,
            gates,
            ideal_outcome: None,
        })
    }

    pub fn with_ideal_outcome(mut self, ideal: impl Into<String>) -> Self {
        self.ideal_outcome = Some(ideal.into());
        self
    }

    /// Same circuit under a new job id (queues sample fixtures with replacement).
    pub fn with_id(mut self, id: CircuitId) -> Self {
        self.id = id;
        self
    }

    pub fn id(&self) -> CircuitId {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Qubit count, the rectangle's extent along the qubit axis.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Layer count, the rectangle's extent along the time axis.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn two_qubit_count(&self) -> u64 {
        self.two_qubit_count
    }

    pub fn area(&self) -> u64 {
        (self.width * self.depth) as u64
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// ASAP layer of each gate; barriers report their synchronisation layer.
    pub fn layer_of(&self) -> &[usize] {
        &self.layer_of
    }

    pub fn ideal_outcome(&self) -> Option<&str> {
        self.ideal_outcome.as_deref()
    }

    /// Classical bits targeted by measurements, ascending and deduplicated.
    pub fn measured_clbits(&self) -> Vec<usize> {
        let mut bits: Vec<usize> = self.gates.iter().filter_map(|g| g.clbit).collect();
        bits.sort_unstable();
        bits.dedup();
        bits
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    #[default]
    Linear,
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Layout::Linear => f.write_str("linear"),
        }
    }
}

/// A QCCD device: traps in physical order, plus the cutoff threshold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TopologyRepr", into = "TopologyRepr")]
pub struct DeviceTopology {
    traps: Vec<usize>,
    /// Global index of each trap's first qubit.
    offsets: Vec<usize>,
    alpha: u64,
    layout: Layout,
}

#[derive(Serialize, Deserialize)]
struct TopologyRepr {
    traps: Vec<usize>,
    alpha: u64,
    #[serde(default)]
    layout: Layout,
}

impl TryFrom<TopologyRepr> for DeviceTopology {
    type Error = ModelError;

    fn try_from(r: TopologyRepr) -> Result<Self, Self::Error> {
        Self::new(r.traps, r.alpha)
    }
}

impl From<DeviceTopology> for TopologyRepr {
    fn from(t: DeviceTopology) -> Self {
        Self {
            traps: t.traps,
            alpha: t.alpha,
            layout: t.layout,
        }
    }
}

impl DeviceTopology {
    pub fn new(traps: Vec<usize>, alpha: u64) -> Result<Self, ModelError> {
        if traps.is_empty() {
            return Err(ModelError::NoTraps);
        }
        if let Some(i) = traps.iter().position(|&c| c == 0) {
            return Err(ModelError::EmptyTrap(i));
        }
        if alpha == 0 {
            return Err(ModelError::ZeroAlpha);
        }
        let offsets = traps
            .iter()
            .scan(0, |acc, &c| {
                let start = *acc;
                *acc += c;
                Some(start)
            })
            .collect();
        Ok(Self {
            traps,
            offsets,
            alpha,
            layout: Layout::Linear,
        })
    }

    /// `count` traps of `capacity` ions each, default cutoff.
    pub fn uniform(count: usize, capacity: usize) -> Result<Self, ModelError> {
        Self::new(vec![capacity; count], DEFAULT_ALPHA)
    }

    pub fn with_alpha(mut self, alpha: u64) -> Result<Self, ModelError> {
        if alpha == 0 {
            return Err(ModelError::ZeroAlpha);
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn traps(&self) -> &[usize] {
        &self.traps
    }

    pub fn trap_count(&self) -> usize {
        self.traps.len()
    }

    pub fn total_qubits(&self) -> usize {
        self.traps.iter().sum()
    }

    pub fn max_trap_capacity(&self) -> usize {
        self.traps.iter().copied().max().unwrap_or(0)
    }

    pub fn min_trap_capacity(&self) -> usize {
        self.traps.iter().copied().min().unwrap_or(0)
    }

    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Global index of the first qubit of `trap`.
    pub fn trap_offset(&self, trap: usize) -> usize {
        self.offsets[trap]
    }

    /// Trap holding global qubit `qubit`, or `None` past the last trap.
    pub fn trap_of(&self, qubit: usize) -> Option<usize> {
        if qubit >= self.total_qubits() {
            return None;
        }
        Some(self.offsets.partition_point(|&o| o <= qubit) - 1)
    }
}

/// Where one circuit sits on the qubit-time grid of its batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Placement {
    pub circuit_id: CircuitId,
    pub trap_index: usize,
    /// Offset inside `trap_index`.
    pub qubit_start: usize,
    pub layer_start: usize,
    pub width: usize,
    pub depth: usize,
}

impl Placement {
    pub fn layer_end(&self) -> usize {
        self.layer_start + self.depth
    }

    pub fn physical_qubit_start(&self, topology: &DeviceTopology) -> usize {
        topology.trap_offset(self.trap_index) + self.qubit_start
    }

    pub fn physical_qubits(&self, topology: &DeviceTopology) -> std::ops::Range<usize> {
        let start = self.physical_qubit_start(topology);
        start..start + self.width
    }

    /// True when the whole qubit interval lies in one trap.
    pub fn is_trap_confined(&self, topology: &DeviceTopology) -> bool {
        self.qubit_start + self.width <= topology.traps()[self.trap_index]
    }

    pub fn area(&self) -> u64 {
        (self.width * self.depth) as u64
    }
}

/// A cutoff-delimited sub-schedule, executed as one combined program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Batch {
    pub index: usize,
    /// In placement order; the last entry is the circuit that sealed the batch.
    pub placements: Vec<Placement>,
    pub two_qubit_total: u64,
}

impl Batch {
    pub fn makespan(&self) -> usize {
        self.placements
            .iter()
            .map(Placement::layer_end)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Serial,
    Fifo,
    Skyline,
    CircPack,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Serial,
        Algorithm::Fifo,
        Algorithm::Skyline,
        Algorithm::CircPack,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Serial => "serial",
            Algorithm::Fifo => "fifo",
            Algorithm::Skyline => "skyline",
            Algorithm::CircPack => "circpack",
        }
    }

    /// Packers that keep every placement inside one trap.
    pub fn is_trap_confined(self) -> bool {
        matches!(self, Algorithm::CircPack)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "serial" => Ok(Algorithm::Serial),
            "fifo" => Ok(Algorithm::Fifo),
            "skyline" | "rectpack" => Ok(Algorithm::Skyline),
            "circpack" => Ok(Algorithm::CircPack),
            other => Err(format!(
                "unknown algorithm `{other}` (expected circpack, fifo, skyline or serial)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub algorithm: Algorithm,
    pub batches: Vec<Batch>,
}

impl Schedule {
    pub fn empty(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            batches: Vec::new(),
        }
    }

    /// Sum of batch makespans, in layers.
    pub fn total_makespan(&self) -> usize {
        self.batches.iter().map(Batch::makespan).sum()
    }

    /// Serial execution resets after every circuit, so each batch counts as a
    /// cutoff; every other packer counts boundaries between batches.
    pub fn cutoff_count(&self) -> usize {
        match self.algorithm {
            Algorithm::Serial => self.batches.len(),
            _ => self.batches.len().saturating_sub(1),
        }
    }

    pub fn placements(&self) -> impl Iterator<Item = &Placement> {
        self.batches.iter().flat_map(|b| b.placements.iter())
    }

    /// Each batch paired with its layer offset on the concatenated time axis.
    pub fn batches_with_offsets(&self) -> impl Iterator<Item = (usize, &Batch)> {
        self.batches.iter().scan(0, |acc, b| {
            let start = *acc;
            *acc += b.makespan();
            Some((start, b))
        })
    }

    pub fn circuit_count(&self) -> usize {
        self.batches.iter().map(|b| b.placements.len()).sum()
    }

    pub fn total_area(&self) -> u64 {
        self.placements().map(Placement::area).sum()
    }
}

/// Per-worker circuit lists produced by the balanced assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkerAssignment {
    pub workers: Vec<Vec<CircuitId>>,
    /// Sum of circuit areas per worker.
    pub loads: Vec<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> Circuit {
        Circuit::new(
            CircuitId(0),
            "bell",
            2,
            vec![
                Gate::one("h", 0),
                Gate::two("cx", 0, 1),
                Gate::measure(0, 0),
                Gate::measure(1, 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn derived_metrics() {
        let c = bell();
        assert_eq!(c.width(), 2);
        assert_eq!(c.depth(), 3);
        assert_eq!(c.two_qubit_count(), 1);
        assert_eq!(c.area(), 6);
        assert_eq!(c.measured_clbits(), vec![0, 1]);
    }

    #[test]
    fn rejects_bad_gates() {
        let err = Circuit::new(CircuitId(0), "x", 1, vec![Gate::one("h", 1)]).unwrap_err();
        assert!(matches!(
            err,
            ModelError::OperandOutOfRange { qubit: 1, .. }
        ));
        let err = Circuit::new(CircuitId(0), "x", 2, vec![Gate::two("cx", 1, 1)]).unwrap_err();
        assert!(matches!(err, ModelError::RepeatedOperand { .. }));
        assert_eq!(
            Circuit::new(CircuitId(0), "x", 0, vec![]).unwrap_err(),
            ModelError::ZeroWidth
        );
        assert!(matches!(
            Circuit::new(CircuitId(0), "x", 2, vec![]).unwrap_err(),
            ModelError::EmptyCircuit(_)
        ));
        assert!(matches!(
            Circuit::new(CircuitId(0), "x", 2, vec![Gate::barrier([0, 1])]).unwrap_err(),
            ModelError::EmptyCircuit(_)
        ));
    }

    #[test]
    fn topology_offsets_and_lookup() {
        let t = DeviceTopology::new(vec![3, 5, 2], 10).unwrap();
        assert_eq!(t.total_qubits(), 10);
        assert_eq!(t.trap_offset(2), 8);
        assert_eq!(t.trap_of(0), Some(0));
        assert_eq!(t.trap_of(2), Some(0));
        assert_eq!(t.trap_of(3), Some(1));
        assert_eq!(t.trap_of(7), Some(1));
        assert_eq!(t.trap_of(9), Some(2));
        assert_eq!(t.trap_of(10), None);
        assert_eq!(DeviceTopology::new(vec![], 1), Err(ModelError::NoTraps));
        assert_eq!(
            DeviceTopology::new(vec![2, 0], 1),
            Err(ModelError::EmptyTrap(1))
        );
        assert_eq!(DeviceTopology::new(vec![2], 0), Err(ModelError::ZeroAlpha));
    }

    #[test]
    fn placement_geometry() {
        let t = DeviceTopology::uniform(2, 10).unwrap();
        let p = Placement {
            circuit_id: CircuitId(4),
            trap_index: 1,
            qubit_start: 3,
            layer_start: 7,
            width: 4,
            depth: 5,
        };
        assert_eq!(p.layer_end(), 12);
        assert_eq!(p.physical_qubit_start(&t), 13);
        assert_eq!(p.physical_qubits(&t), 13..17);
        assert!(p.is_trap_confined(&t));
    }

    #[test]
    fn serial_counts_every_batch_as_cutoff() {
        let batch = |i| Batch {
            index: i,
            placements: vec![],
            two_qubit_total: 0,
        };
        let mut s = Schedule {
            algorithm: Algorithm::Serial,
            batches: vec![batch(0), batch(1), batch(2)],
        };
        assert_eq!(s.cutoff_count(), 3);
        s.algorithm = Algorithm::CircPack;
        assert_eq!(s.cutoff_count(), 2);
        assert_eq!(Schedule::empty(Algorithm::Fifo).cutoff_count(), 0);
    }
}
