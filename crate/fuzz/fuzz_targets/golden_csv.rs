//! Fuzz the reference-table CSV parser: arbitrary bytes must either parse
//! into a table or fail with a line-numbered error — never a panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = amortis_core::golden::GoldenTable::parse_csv(text, "fuzz input");
    }
});
