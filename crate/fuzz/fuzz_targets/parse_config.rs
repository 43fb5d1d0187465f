#![no_main]

use crlab::syntax::{parse_config, parse_solution, solution_to_config};
use libfuzzer_sys::fuzz_target;

// Config lines, then the solution record built from them, then its round trip.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(config) = parse_config(text) else { return };
    if let Ok(sol) = parse_solution(&config) {
        let reparsed = parse_solution(&parse_config(&solution_to_config(&sol)).expect("printed config parses"))
            .expect("printed solution parses");
        assert_eq!(reparsed.big_n, sol.big_n);
    }
});
