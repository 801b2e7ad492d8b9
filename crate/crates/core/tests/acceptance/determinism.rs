//! Byte-identical output across runs and worker counts; JSON round trips.

use proptest::prelude::*;

use wedderburn::cli;
use wedderburn::cyclo::{fixed_field, CycloNumber, FixedFieldSpec};
use wedderburn::galg::AlgElement;
use wedderburn::group_spec::{parse_group_spec, GroupSpec};
use wedderburn::report::Report;

use super::props::{alg_element, runner, small_q, verdict};
use super::{expect, Outcome};

fn decompose_bytes(name: &str, jobs: usize) -> (i32, Vec<u8>) {
    let spec = format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let jobs = jobs.to_string();
    let mut out = Vec::new();
    let code = cli::run(["wedderburn", "decompose", spec.as_str(), "--full", "--jobs", jobs.as_str()], &mut out, &mut std::io::sink());
    (code, out)
}

fn group_spec() -> impl Strategy<Value = GroupSpec> {
    let leaf = prop_oneof![
        (1usize..30, prop::option::of("[a-z]")).prop_map(|(n, label)| GroupSpec::Cyclic { n, label }),
        Just(GroupSpec::Quaternion8),
        prop::sample::select(vec![2usize, 3, 5]).prop_map(|p| GroupSpec::Heisenberg { p }),
        (2usize..6).prop_flat_map(|d| {
            prop::collection::vec(Just((1..=d).collect::<Vec<usize>>()).prop_shuffle(), 1..3)
                .prop_map(move |generators| GroupSpec::Permutation { degree: d, generators, labels: None })
        }),
    ];
    leaf.prop_recursive(2, 6, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3).prop_map(|factors| GroupSpec::Direct { factors }),
            (inner, 1usize..5).prop_map(|(n, k)| GroupSpec::Semidirect {
                normal: Box::new(n),
                cyclic_order: k,
                action: Default::default(),
                label: Some("w".into())
            }),
        ]
    })
}

fn field() -> impl Strategy<Value = FixedFieldSpec> {
    (1u64..40).prop_flat_map(|m| {
        let units: Vec<u64> = (1..=m.max(1)).filter(|&k| num_integer::gcd(k, m) == 1).collect();
        prop::collection::vec(prop::sample::select(units), 0..3).prop_map(move |gens| fixed_field(m, &gens))
    })
}

pub fn run(out: &mut Outcome) {
    out.check("C5.decompose_bytes", || {
        let mut notes = Vec::new();
        for name in ["g168", "frob21", "d8", "q8"] {
            let (c1, a) = decompose_bytes(name, 1);
            let (c2, b) = decompose_bytes(name, 1);
            let (c3, c) = decompose_bytes(name, 4);
            if a != b || a != c || c1 != c2 || c1 != c3 || a.is_empty() {
                return Err(format!("{name}: outputs differ"));
            }
            notes.push(format!("{name} {} bytes", a.len()));
        }
        expect(true, format!("identical across two runs and 1 vs 4 jobs: {}", notes.join(", ")), "")
    });
    out.check("C5.report_round_trip", || {
        let (_, a) = decompose_bytes("g168", 1);
        let text = String::from_utf8(a).map_err(|e| e.to_string())?;
        let r = Report::from_json(&text).map_err(|e| e.to_string())?;
        expect(r.to_json() + "\n" == text, "full g168 report parses and re-serializes to the same bytes", "report bytes differ")
    });
    out.check("C5.group_spec_round_trip", || {
        let r = runner().run(&group_spec(), |s| {
            let back = parse_group_spec(&serde_json::to_string(&s).unwrap()).unwrap();
            prop_assert_eq!(back, s);
            Ok(())
        });
        verdict(r, "group spec JSON round trip")
    });
    out.check("C5.cyclo_round_trip", || {
        let r = runner().run(&(1u64..60).prop_flat_map(|m| prop::collection::vec((0..m as i64, small_q()), 0..5).prop_map(move |t| CycloNumber::from_exponents(m, &t))), |c| {
            prop_assert_eq!(CycloNumber::from_json(&c.to_json()).unwrap(), c);
            Ok(())
        });
        verdict(r, "cyclotomic number JSON round trip")
    });
    out.check("C5.field_round_trip", || {
        let r = runner().run(&field(), |f| {
            prop_assert_eq!(FixedFieldSpec::from_json(&f.to_json()).unwrap(), f);
            Ok(())
        });
        verdict(r, "fixed-field JSON round trip")
    });
    out.check("C5.alg_element_round_trip", || {
        let r = runner().run(&alg_element(200, 12), |a| {
            prop_assert_eq!(AlgElement::from_json(&a.to_json()).unwrap(), a);
            Ok(())
        });
        verdict(r, "group-algebra element JSON round trip")
    });
}
