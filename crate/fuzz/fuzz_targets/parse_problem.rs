#![no_main]

use kohncert_core::problem::parse_problem_str;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_problem_str(text) {
        assert!(spec.germs.len() >= 2);
        assert!(spec.validate_caps().is_ok());
    }
});
