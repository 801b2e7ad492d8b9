#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = wedderburn::cyclo::CycloNumber::from_json(data);
});
