#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(records) = gdei::report::parse_trace_csv(text) {
        let csv = gdei::report::records_to_csv(&records);
        assert_eq!(gdei::report::parse_trace_csv(&csv).expect("re-parse"), records);
    }
});
