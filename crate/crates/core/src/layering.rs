//! ASAP layering: the depth metric that turns a gate list into a rectangle.

use crate::model::{Gate, GateKind, ModelError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layering {
    /// Number of occupied layers; barriers do not count.
    pub depth: usize,
    /// Layer of each gate. A barrier reports the layer at which its operands
    /// resynchronise, so it sorts before anything that follows it.
    pub layer_of: Vec<usize>,
}

/// Greedy as-soon-as-possible layering.
///
/// Every non-barrier gate goes one layer past the latest layer used on any of
/// its operands. Measure and reset take a full layer. A barrier takes none but
/// lifts all its operands to their common frontier.
pub fn asap_layers(gates: &[Gate], width: usize) -> Result<Layering, ModelError> {
    let mut frontier = vec![0usize; width];
    let mut layer_of = Vec::with_capacity(gates.len());
    let mut depth = 0;
    for (index, gate) in gates.iter().enumerate() {
        gate.validate(index, width)?;
        let layer = gate
            .operands
            .iter()
            .map(|&q| frontier[q])
            .max()
            .unwrap_or(0);
        layer_of.push(layer);
        let next = if gate.kind == GateKind::Barrier {
            layer
        } else {
            depth = depth.max(layer + 1);
            layer + 1
        };
        for &q in &gate.operands {
            frontier[q] = next;
        }
    }
    Ok(Layering { depth, layer_of })
}

pub fn two_qubit_count(gates: &[Gate]) -> u64 {
    gates.iter().filter(|g| g.is_two_qubit()).count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig1() -> Vec<Gate> {
        vec![
            Gate::one("h", 0),
            Gate::one("x", 1),
            Gate::one("h", 1),
            Gate::two("cx", 0, 1),
            Gate::one("h", 0),
            Gate::measure(1, 1),
            Gate::measure(0, 0),
        ]
    }

    #[test]
    fn two_layers_for_parallel_then_entangle() {
        let g = vec![Gate::one("h", 0), Gate::one("x", 1), Gate::two("cx", 0, 1)];
        let l = asap_layers(&g, 2).unwrap();
        assert_eq!(l.depth, 2);
        assert_eq!(l.layer_of, vec![0, 0, 1]);
    }

    #[test]
    fn single_gate() {
        assert_eq!(asap_layers(&[Gate::one("h", 0)], 1).unwrap().depth, 1);
    }

    #[test]
    fn two_qubit_example_has_five_layers() {
        let l = asap_layers(&fig1(), 2).unwrap();
        assert_eq!(l.depth, 5);
        assert_eq!(l.layer_of, vec![0, 0, 1, 2, 3, 3, 4]);
    }

    #[test]
    fn empty_is_depth_zero() {
        assert_eq!(asap_layers(&[], 3).unwrap().depth, 0);
    }

    #[test]
    fn barrier_synchronises_without_a_layer() {
        let g = vec![
            Gate::one("h", 0),
            Gate::one("h", 0),
            Gate::barrier([0, 1]),
            Gate::one("x", 1),
        ];
        let l = asap_layers(&g, 2).unwrap();
        assert_eq!(l.layer_of, vec![0, 1, 2, 2]);
        assert_eq!(l.depth, 3);

        let only_barrier = vec![Gate::one("h", 0), Gate::barrier([0, 1])];
        assert_eq!(asap_layers(&only_barrier, 2).unwrap().depth, 1);
    }

    #[test]
    fn out_of_range_operand_is_rejected() {
        let err = asap_layers(&[Gate::two("cx", 0, 2)], 2).unwrap_err();
        assert!(matches!(
            err,
            ModelError::OperandOutOfRange { qubit: 2, .. }
        ));
    }

    #[test]
    fn counts_two_qubit_gates() {
        assert_eq!(two_qubit_count(&[]), 0);
        let g = vec![
            Gate::two("cx", 0, 1),
            Gate::one("h", 0),
            Gate::two("cx", 1, 0),
        ];
        assert_eq!(two_qubit_count(&g), 2);
    }

    fn arb_gate(width: usize) -> impl Strategy<Value = Gate> {
        prop_oneof![
            (0..width).prop_map(|q| Gate::one("h", q)),
            (0..width, 0..width)
                .prop_filter("distinct", |(a, b)| a != b)
                .prop_map(|(a, b)| Gate::two("cx", a, b)),
            (0..width).prop_map(|q| Gate::measure(q, q)),
            (0..width).prop_map(Gate::reset),
            proptest::sample::subsequence((0..width).collect::<Vec<_>>(), 1..=width)
                .prop_map(Gate::barrier),
        ]
    }

    fn arb_circuit() -> impl Strategy<Value = (usize, Vec<Gate>)> {
        (2usize..6).prop_flat_map(|w| (Just(w), prop::collection::vec(arb_gate(w), 0..40)))
    }

    proptest! {
        #[test]
        fn depth_bounds((w, gates) in arb_circuit()) {
            let l = asap_layers(&gates, w).unwrap();
            let ops: Vec<&Gate> = gates.iter().filter(|g| g.kind != GateKind::Barrier).collect();
            prop_assert!(l.depth <= ops.len());
            for q in 0..w {
                let touching = ops.iter().filter(|g| g.operands.contains(&q)).count();
                prop_assert!(l.depth >= touching);
            }
            prop_assert_eq!(&l, &asap_layers(&gates, w).unwrap());
        }

        #[test]
        fn appending_never_shrinks((w, gates) in arb_circuit(), extra in arb_gate(2)) {
            let before = asap_layers(&gates, w).unwrap().depth;
            let mut longer = gates.clone();
            longer.push(extra);
            prop_assert!(asap_layers(&longer, w).unwrap().depth >= before);
        }
    }
}
