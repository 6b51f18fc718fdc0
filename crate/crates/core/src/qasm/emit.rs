use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::model::{Batch, Circuit, CircuitId, DeviceTopology, GateKind};

use super::QasmError;

/// One circuit's classical register in a combined program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterSlot {
    pub circuit_id: CircuitId,
    pub register: String,
    pub bits: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinedProgram {
    pub batch_index: usize,
    pub text: String,
    /// Classical registers in declaration order. Result keys concatenate
    /// them left to right.
    pub register_layout: Vec<RegisterSlot>,
    /// Owning circuit of each emitted gate statement, in text order.
    pub owners: Vec<CircuitId>,
}

/// Merges the circuits of one batch into a single program on the device's
/// full register.
///
/// Logical qubit `k` of a placed circuit becomes physical qubit
/// `physical_qubit_start + k`. Statements are ordered by global layer, then
/// circuit id, then source position. Every measurement is followed by a reset
/// of the measured qubit so later circuits start from `|0>`.
pub fn emit_combined(
    batch: &Batch,
    circuits: &[Circuit],
    topology: &DeviceTopology,
) -> Result<CombinedProgram, QasmError> {
    let by_id: BTreeMap<CircuitId, &Circuit> = circuits.iter().map(|c| (c.id(), c)).collect();
    let total = topology.total_qubits();

    struct Item {
        layer: usize,
        circuit: CircuitId,
        source: usize,
        offset: usize,
        clbit_map: usize,
    }

    let mut placed: Vec<(&Circuit, usize)> = Vec::with_capacity(batch.placements.len());
    let mut items = Vec::new();
    for p in &batch.placements {
        let circuit = by_id.get(&p.circuit_id).ok_or_else(|| {
            QasmError::Consistency(format!(
                "placement references unknown circuit {}",
                p.circuit_id
            ))
        })?;
        if p.trap_index >= topology.trap_count() {
            return Err(QasmError::Consistency(format!(
                "circuit {} placed in trap {} of a {}-trap device",
                p.circuit_id,
                p.trap_index,
                topology.trap_count()
            )));
        }
        if p.width != circuit.width() || p.depth != circuit.depth() {
            return Err(QasmError::Consistency(format!(
                "placement of circuit {} is {}x{} but the circuit is {}x{}",
                p.circuit_id,
                p.width,
                p.depth,
                circuit.width(),
                circuit.depth()
            )));
        }
        let offset = p.physical_qubit_start(topology);
        if offset + circuit.width() > total {
            return Err(QasmError::Consistency(format!(
                "circuit {} needs physical qubits {}..{} but the device has {total}",
                p.circuit_id,
                offset,
                offset + circuit.width()
            )));
        }
        let slot = placed.len();
        placed.push((circuit, offset));
        for (source, layer) in circuit.layer_of().iter().enumerate() {
            items.push(Item {
                layer: p.layer_start + layer,
                circuit: circuit.id(),
                source,
                offset,
                clbit_map: slot,
            });
        }
    }
    items.sort_by_key(|i| (i.layer, i.circuit, i.source));

    // Registers in ascending circuit id; measured bits compacted in order.
    let mut order: Vec<usize> = (0..placed.len()).collect();
    order.sort_by_key(|&i| placed[i].0.id());
    let compact: Vec<BTreeMap<usize, usize>> = placed
        .iter()
        .map(|(c, _)| {
            c.measured_clbits()
                .into_iter()
                .enumerate()
                .map(|(k, b)| (b, k))
                .collect()
        })
        .collect();

    let mut text = String::new();
    let mut register_layout = Vec::new();
    text.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(text, "qreg q[{total}];");
    for &i in &order {
        let bits = compact[i].len();
        if bits == 0 {
            continue;
        }
        let register = format!("c{}", placed[i].0.id());
        let _ = writeln!(text, "creg {register}[{bits}];");
        register_layout.push(RegisterSlot {
            circuit_id: placed[i].0.id(),
            register,
            bits,
        });
    }

    let mut owners = Vec::with_capacity(items.len());
    for item in &items {
        let circuit = placed[item.clbit_map].0;
        let gate = &circuit.gates()[item.source];
        let phys = |q: &usize| format!("q[{}]", item.offset + q);
        match gate.kind {
            GateKind::Measure => {
                let q = item.offset + gate.operands[0];
                let bit = compact[item.clbit_map][&gate.clbit.expect("measure has a clbit")];
                let _ = writeln!(text, "measure q[{q}] -> c{}[{bit}];", item.circuit);
                let _ = writeln!(text, "reset q[{q}];");
                owners.push(item.circuit);
                owners.push(item.circuit);
            }
            _ => {
                text.push_str(&gate.name);
                if let Some(params) = &gate.params {
                    let _ = write!(text, "({params})");
                }
                text.push(' ');
                let args: Vec<String> = gate.operands.iter().map(phys).collect();
                text.push_str(&args.join(","));
                text.push_str(";\n");
                owners.push(item.circuit);
            }
        }
    }

    Ok(CombinedProgram {
        batch_index: batch.index,
        text,
        register_layout,
        owners,
    })
}
