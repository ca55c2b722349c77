#![no_main]

use libfuzzer_sys::fuzz_target;

// Parsing and validating a lattice candidate must never panic; invalid
// candidates come back as reports or errors.
fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = lattice_kit::io::lattice_from_json(s, 64);
    }
});
