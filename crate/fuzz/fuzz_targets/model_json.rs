//! Fuzz the pointed-model JSON decoder: arbitrary bytes must never
//! panic, and any model that decodes must encode to canonical JSON that
//! round-trips.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mucalc::kripke::PointedModel;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(pm) = PointedModel::from_json(text) {
            let encoded = pm.to_json();
            let redecoded = PointedModel::from_json(&encoded).expect("own output redecodes");
            assert_eq!(redecoded.to_json(), encoded, "canonical JSON is stable");
        }
    }
});
