#![no_main]

use libfuzzer_sys::fuzz_target;
use lattice_kit::embed::verify_embedding;
use lattice_kit::pudlak::build_homogenized;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(emb) = lattice_kit::io::embedding_from_json(s) {
            // cap the rebuild so hostile stage fields stay cheap
            if emb.source_stage <= 2 && emb.target_stage <= 3 {
                let source = build_homogenized(emb.phi.target(), emb.source_stage, 50_000);
                let target = build_homogenized(emb.phi.source(), emb.target_stage, 50_000);
                if let (Ok(source), Ok(target)) = (source, target) {
                    let _ = verify_embedding(&source, &target, &emb);
                }
            }
        }
    }
});
