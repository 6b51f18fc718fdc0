#![no_main]

use circpack::formats::ScheduleFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = ScheduleFile::from_json(text) else {
        return;
    };
    if let Ok(schedule) = file.to_schedule() {
        let total = file.topology.total_qubits();
        for p in schedule.placements() {
            assert!(p.physical_qubit_start(&file.topology) + p.width <= total);
        }
        let _ = schedule.total_makespan();
    }
});
