mod common;

use circpack::metrics::{avg_utilization, instantaneous_utilization};
use circpack::model::{Algorithm, Circuit, DeviceTopology};
use circpack::packing::pack;
use proptest::prelude::*;

use common::{block, check_feasible, utilization_by_layers};

fn arb_queue(max_width: usize) -> impl Strategy<Value = Vec<Circuit>> {
    prop::collection::vec((1..=max_width, 1usize..30, 0usize..40), 0..40).prop_map(|dims| {
        dims.into_iter()
            .enumerate()
            .map(|(i, (w, d, cx))| {
                let cx = if w >= 2 { cx.min(d) } else { 0 };
                block(i as u32, w, d, cx)
            })
            .collect()
    })
}

fn arb_topology() -> impl Strategy<Value = DeviceTopology> {
    (prop::collection::vec(4usize..9, 1..4), 1u64..200)
        .prop_map(|(traps, alpha)| DeviceTopology::new(traps, alpha).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_packer_is_feasible(topo in arb_topology(), queue in arb_queue(4)) {
        for algo in Algorithm::ALL {
            let s = pack(algo, &queue, &topo).unwrap();
            prop_assert_eq!(check_feasible(&s, &queue, &topo), Ok(()));
            prop_assert_eq!(&s, &pack(algo, &queue, &topo).unwrap());
        }
    }

    #[test]
    fn circpack_never_loses_to_serial(topo in arb_topology(), queue in arb_queue(4)) {
        let circ = pack(Algorithm::CircPack, &queue, &topo).unwrap();
        let serial = pack(Algorithm::Serial, &queue, &topo).unwrap();
        prop_assert!(circ.total_makespan() <= serial.total_makespan());
    }

    #[test]
    fn cutoff_bound_holds(topo in arb_topology(), queue in arb_queue(4)) {
        let s = pack(Algorithm::CircPack, &queue, &topo).unwrap();
        let two_q: std::collections::HashMap<_, _> =
            queue.iter().map(|c| (c.id(), c.two_qubit_count())).collect();
        for (i, b) in s.batches.iter().enumerate() {
            let sum: u64 = b.placements.iter().map(|p| two_q[&p.circuit_id]).sum();
            prop_assert_eq!(sum, b.two_qubit_total);
            let last = two_q[&b.placements.last().unwrap().circuit_id];
            prop_assert!(sum - last < topo.alpha());
            if i + 1 < s.batches.len() {
                prop_assert!(sum >= topo.alpha());
            }
        }
    }

    #[test]
    fn utilization_matches_layer_sum(topo in arb_topology(), queue in arb_queue(4)) {
        prop_assume!(!queue.is_empty());
        for algo in Algorithm::ALL {
            let s = pack(algo, &queue, &topo).unwrap();
            let q = topo.total_qubits();
            let u = avg_utilization(&s, q).unwrap();
            prop_assert!(u > 0.0 && u <= 1.0);
            prop_assert!((u - utilization_by_layers(&s, q)).abs() < 1e-9);
            let mean: f64 = (0..s.total_makespan())
                .map(|t| instantaneous_utilization(&s, q, t).unwrap())
                .sum::<f64>() / s.total_makespan() as f64;
            prop_assert!((u - mean).abs() < 1e-9);
        }
    }

    #[test]
    fn relabelling_ids_keeps_utilization(topo in arb_topology(), queue in arb_queue(4)) {
        prop_assume!(!queue.is_empty());
        let n = queue.len() as u32;
        let relabelled: Vec<Circuit> = queue
            .iter()
            .map(|c| c.clone().with_id(circpack::CircuitId(1000 + n - c.id().0)))
            .collect();
        let a = pack(Algorithm::Fifo, &queue, &topo).unwrap();
        let b = pack(Algorithm::Fifo, &relabelled, &topo).unwrap();
        let q = topo.total_qubits();
        prop_assert_eq!(avg_utilization(&a, q).unwrap(), avg_utilization(&b, q).unwrap());
    }

    #[test]
    fn skyline_no_worse_than_circpack_without_cutoffs(queue in arb_queue(5)) {
        // a single batch and one trap: both packers see the same windows
        let topo = DeviceTopology::new(vec![10], u64::MAX).unwrap();
        let circ = pack(Algorithm::CircPack, &queue, &topo).unwrap();
        let sky = pack(Algorithm::Skyline, &queue, &topo).unwrap();
        prop_assert!(sky.total_makespan() <= circ.total_makespan());
    }
}
