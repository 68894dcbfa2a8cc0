//! Inputs shared by the benchmarks in `benches/`.

use std::path::PathBuf;

/// Text of a file under `corpus/`.
pub fn corpus(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
