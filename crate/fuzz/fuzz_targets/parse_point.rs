#![no_main]

use crlab::syntax::parse_point;
use libfuzzer_sys::fuzz_target;

// The first byte picks the dimension.
fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let n = usize::from(n % 10);
    if let Ok(p) = parse_point(text, n) {
        assert_eq!(p.z.len(), n);
    }
});
