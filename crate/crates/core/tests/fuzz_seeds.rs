//! The checked-in fuzz seeds are valid inputs.

use std::path::PathBuf;

use wedderburn::cyclo::{CycloNumber, FixedFieldSpec};
use wedderburn::galg::AlgElement;
use wedderburn::group_spec;

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    assert!(!paths.is_empty());
    paths.iter().map(|p| std::fs::read_to_string(p).unwrap()).collect()
}

#[test]
fn group_spec_seeds() {
    for s in seeds("group_spec") {
        group_spec::load_group(&s, 2000).unwrap();
    }
}

#[test]
fn json_seeds() {
    for s in seeds("cyclo_json") {
        CycloNumber::from_json(&s).unwrap();
    }
    for s in seeds("fixed_field_json") {
        FixedFieldSpec::from_json(&s).unwrap();
    }
    for s in seeds("alg_element_json") {
        AlgElement::from_json(&s).unwrap();
    }
}
