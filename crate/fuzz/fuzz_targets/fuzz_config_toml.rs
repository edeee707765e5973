#![no_main]
use libfuzzer_sys::fuzz_target;

// parsing alone must never panic or touch the filesystem; errors are fine
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = dirac_spectral::config::ExperimentConfig::from_toml_str(text);
    }
});
