#![no_main]

use circpack::formats::LayoutSidecar;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(layout) = LayoutSidecar::from_json(text) {
            assert_eq!(LayoutSidecar::from_json(&layout.to_json()).unwrap(), layout);
        }
    }
});
