#![no_main]

use circpack::formats::{parse_topology, write_topology};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(t) = parse_topology(text) {
        assert_eq!(parse_topology(&write_topology(&t)).unwrap(), t);
    }
});
