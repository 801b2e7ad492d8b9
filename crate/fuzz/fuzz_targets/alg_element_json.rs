#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = wedderburn::galg::AlgElement::from_json(data);
});
