#![no_main]

use circpack::formats::{parse_counts, write_counts};
use circpack::qasm::{unbundle, RegisterSlot};
use circpack::CircuitId;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(counts) = parse_counts(text) else {
        return;
    };
    assert_eq!(parse_counts(&write_counts(&counts)).unwrap(), counts);
    let Some(width) = counts.keys().next().map(String::len) else {
        return;
    };
    let layout: Vec<RegisterSlot> = (0..width)
        .map(|i| RegisterSlot {
            circuit_id: CircuitId(i as u32),
            register: format!("c{i}"),
            bits: 1,
        })
        .collect();
    if let Ok(split) = unbundle(&counts, &layout) {
        let total: u64 = counts.values().sum();
        assert!(split.iter().all(|(_, m)| m.values().sum::<u64>() == total));
    }
});
