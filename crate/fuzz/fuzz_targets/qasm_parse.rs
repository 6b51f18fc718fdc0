#![no_main]

use circpack::qasm::parse_program;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(c) = parse_program(text) {
        assert_eq!(c.layer_of().len(), c.gates().len());
        assert!(c
            .gates()
            .iter()
            .all(|g| g.operands.iter().all(|&q| q < c.width())));
        assert_eq!(c.area(), (c.width() * c.depth()) as u64);
    }
});
