#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(report) = gdei::report::parse_comparison_json(text) {
        let json = gdei::report::comparison_to_json(&report);
        assert_eq!(gdei::report::parse_comparison_json(&json).expect("re-parse"), report);
    }
});
