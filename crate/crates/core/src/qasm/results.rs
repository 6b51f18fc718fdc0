use std::collections::BTreeMap;

use crate::model::CircuitId;

use super::{QasmError, RegisterSlot};

/// Bitstring to shot count.
pub type Counts = BTreeMap<String, u64>;

/// Splits counts over a combined program back into per-circuit marginals.
///
/// Each key is the concatenation of the registers in `layout` order, leftmost
/// first; within a register the highest classical index comes first.
pub fn unbundle(
    counts: &Counts,
    layout: &[RegisterSlot],
) -> Result<Vec<(CircuitId, Counts)>, QasmError> {
    let width: usize = layout.iter().map(|s| s.bits).sum();
    let mut out: Vec<(CircuitId, Counts)> = layout
        .iter()
        .map(|s| (s.circuit_id, Counts::new()))
        .collect();
    for (key, &shots) in counts {
        if key.len() != width {
            return Err(QasmError::MalformedResults(format!(
                "key `{key}` has {} bits, layout expects {width}",
                key.len()
            )));
        }
        if !key.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(QasmError::MalformedResults(format!(
                "key `{key}` is not a bitstring"
            )));
        }
        let mut start = 0;
        for (slot, (_, marginal)) in layout.iter().zip(out.iter_mut()) {
            let field = &key[start..start + slot.bits];
            let n = marginal.entry(field.to_owned()).or_insert(0);
            *n = n
                .checked_add(shots)
                .ok_or_else(|| QasmError::MalformedResults("shot total exceeds 2^64 - 1".into()))?;
            start += slot.bits;
        }
    }
    Ok(out)
}

/// Probability of successful trial, in percent. Zero for empty counts.
pub fn pst(counts: &Counts, ideal: &str) -> f64 {
    let total: u128 = counts.values().map(|&n| u128::from(n)).sum();
    if total == 0 {
        return 0.0;
    }
    let hits = counts.get(ideal).copied().unwrap_or(0);
    100.0 * hits as f64 / total as f64
}
