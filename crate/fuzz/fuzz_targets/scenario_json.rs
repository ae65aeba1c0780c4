//! Fuzz the scenario JSON entry point: arbitrary bytes must either parse
//! into a fully validated scenario or come back as a structured error —
//! never a panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = amortis_core::scenario::Scenario::from_json_str(text);
    }
});
