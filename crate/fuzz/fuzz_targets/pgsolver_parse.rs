//! Fuzz the parity-game text reader: arbitrary bytes must never panic,
//! and any game that reads must write canonical text that round-trips.

#![no_main]

use libfuzzer_sys::fuzz_target;
use mucalc::paritygame::ParityGame;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(g) = ParityGame::read_pg(text) {
            let written = g.write_pg();
            let reread = ParityGame::read_pg(&written).expect("own output rereads");
            assert_eq!(reread.write_pg(), written, "canonical text is stable");
        }
    }
});
