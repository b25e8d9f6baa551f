#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(dataset) = gdei::data::read_csv(data, "y") {
        // anything accepted must survive its own serialisation
        let text = dataset.to_csv();
        let again = gdei::data::read_csv(text.as_bytes(), "y").expect("re-read");
        assert_eq!(again, dataset);
    }
});
