#![no_main]

use crlab::syntax::parse_expression;
use libfuzzer_sys::fuzz_target;

// Anything that parses must print to text that parses to the same tree.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(node) = parse_expression(text) {
        let printed = node.to_string();
        let again = parse_expression(&printed).expect("printed form parses");
        assert_eq!(again.to_string(), printed);
    }
});
