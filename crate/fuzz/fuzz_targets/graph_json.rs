#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(doc) = lattice_kit::io::graph_from_json(s) {
            let _ = lattice_kit::io::graph_json_to_dot(&doc);
        }
    }
});
