#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = wedderburn::group_spec::load_group(data, 64);
});
