#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(spec) = gdei::cli::parse_optimizer_spec(text) {
        spec.optimizer.validate().expect("parsed specs are valid");
    }
});
