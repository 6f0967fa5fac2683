#![no_main]

use kohncert_core::parse_germ;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_germ(text) {
        // printing and reparsing must give back the same germ
        let again = parse_germ(&g.to_string()).expect("display output parses");
        assert_eq!(again, g);
    }
});
