#![no_main]

use libfuzzer_sys::fuzz_target;
use lattice_kit::lattice::catalog;
use lattice_kit::pudlak::{build_homogenized, table_of};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(cert) = lattice_kit::io::certificate_from_json(s) {
            let graph = build_homogenized(&catalog::two(), 1, 1_000).unwrap();
            let table = table_of(&graph.stage(1));
            let _ = cert.verify(table.carrier_len(), table.rels());
        }
    }
});
