#![no_main]

use libfuzzer_sys::fuzz_target;
use lattice_kit::lattice::catalog;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let lattice = catalog::three_chain();
        if let Ok(table) = lattice_kit::io::table_from_json(s, &lattice) {
            // exercise the classification and restriction paths too
            let _ = table.kind();
            let keep: Vec<u32> = table.nodes().iter().copied().take(3).collect();
            let _ = table.restrict(&keep);
        }
    }
});
