//! Fuzz the formula parser: arbitrary bytes must never panic, and any
//! formula that parses must print to canonical text that reparses to the
//! same canonical text.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mucalc::formula::parse;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(f) = parse(text) {
            let printed = f.to_string();
            let reparsed = parse(&printed).expect("canonical text reparses");
            assert_eq!(reparsed.to_string(), printed, "canonical text is stable");
        }
    }
});
