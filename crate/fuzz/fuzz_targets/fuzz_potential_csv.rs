#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = dirac_spectral::Potential::from_csv_bytes(data);
});
