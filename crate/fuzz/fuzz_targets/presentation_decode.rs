#![no_main]

use libfuzzer_sys::fuzz_target;

// The decoders consume untrusted presentations through the positive-fact
// interface; corrupt tables must surface as decode errors, never panics.
fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(pres) = lattice_kit::io::presentation_from_json(s) {
            let _ = lattice_kit::coding::decode_u(&pres.view());
            let _ = lattice_kit::coding::decode_g_sequence(&pres.view(), 3);
        }
    }
});
