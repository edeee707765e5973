//! Every checked-in fuzz seed must parse cleanly, so the corpus can't rot
//! when the config schema or the CSV contract moves.

use std::fs;
use std::path::PathBuf;

use dirac_spectral::config::ExperimentConfig;
use dirac_spectral::Potential;

fn corpus(target: &str) -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("missing corpus dir {}: {e}", dir.display()))
        .map(|entry| entry.unwrap().path())
        .collect();
    paths.sort();
    assert!(!paths.is_empty(), "empty corpus at {}", dir.display());
    paths
}

#[test]
fn config_seeds_parse() {
    for path in corpus("fuzz_config_toml") {
        let text = fs::read_to_string(&path).unwrap();
        ExperimentConfig::from_toml_str(&text)
            .unwrap_or_else(|e| panic!("{} no longer parses: {e}", path.display()));
    }
}

#[test]
fn potential_seeds_parse() {
    for path in corpus("fuzz_potential_csv") {
        let bytes = fs::read(&path).unwrap();
        Potential::from_csv_bytes(&bytes)
            .unwrap_or_else(|e| panic!("{} no longer parses: {e}", path.display()));
    }
}
