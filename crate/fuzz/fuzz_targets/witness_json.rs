//! Fuzz the witness-kit JSON decoder: arbitrary bytes must never panic,
//! and any kit that decodes must pass validation-on-read, encode to
//! canonical JSON, and round-trip.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mucalc::encoder::WitnessFrames;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(wf) = WitnessFrames::from_json(text) {
            let encoded = wf.to_json();
            let redecoded = WitnessFrames::from_json(&encoded).expect("own output redecodes");
            assert_eq!(redecoded.to_json(), encoded, "canonical JSON is stable");
        }
    }
});
