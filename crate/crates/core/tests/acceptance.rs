//! Acceptance criteria. Every check is exact; the tolerance printed on each line is zero.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};

use wedderburn::arith::q;
use wedderburn::decompose::{self, Component, Decomposition, Options};
use wedderburn::galg::{self, AlgElement, LinearCharacter};
use wedderburn::group_spec;
use wedderburn::grp::{self, FiniteGroup, Subgroup, SUBGROUP_LATTICE_BOUND};
use wedderburn::report;
use wedderburn::shoda;
use wedderburn::simple::{self, Tower};

#[path = "acceptance/determinism.rs"]
mod determinism;
#[path = "acceptance/oracles.rs"]
mod oracles;
#[path = "acceptance/props.rs"]
mod props;

pub fn fixture(name: &str) -> FiniteGroup {
    let path = format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    group_spec::load_group(&std::fs::read_to_string(path).unwrap(), 2000).unwrap()
}

pub fn sub(g: &FiniteGroup, words: &[&str]) -> Subgroup {
    grp::subgroup_generated(g, &words.iter().map(|w| g.parse_word(w).unwrap()).collect::<Vec<_>>())
}

pub fn el(g: &FiniteGroup, w: &str) -> AlgElement {
    AlgElement::basis(g.parse_word(w).unwrap())
}

pub fn find<'a>(dec: &'a Decomposition, h: &Subgroup, k: &Subgroup) -> &'a Component {
    dec.components.iter().find(|c| c.h == *h && c.k == *k).expect("pair among the classes")
}

pub struct Outcome {
    results: Vec<(String, bool)>,
}

impl Outcome {
    pub fn check(&mut self, name: &str, f: impl FnOnce() -> Result<String, String>) {
        let (ok, detail) = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(Ok(d)) => (true, d),
            Ok(Err(d)) => (false, d),
            Err(p) => {
                let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
                (false, format!("panicked: {}", msg.unwrap_or_default()))
            }
        };
        let line = format!("{} {name}: {detail} (tolerance: exact)", if ok { "PASS" } else { "FAIL" });
        let _ = writeln!(std::io::stdout(), "{line}");
        self.results.push((name.to_string(), ok));
    }
}

pub fn expect(cond: bool, ok: impl Into<String>, bad: impl Into<String>) -> Result<String, String> {
    if cond {
        Ok(ok.into())
    } else {
        Err(bad.into())
    }
}

fn order168(out: &mut Outcome) {
    let g = fixture("g168");
    let (h, k) = (sub(&g, &["x", "b"]), sub(&g, &[]));
    let subs = grp::all_subgroups(&g, SUBGROUP_LATTICE_BOUND).unwrap();
    out.check("C1.chain", || {
        let chain = shoda::find_strong_inductive_chain(&g, &h, &k, &subs).map_err(|e| e.to_string())?;
        let hs: Vec<&Subgroup> = chain.levels.iter().map(|l| &l.h).collect();
        expect(
            hs == [&h, &sub(&g, &["x", "y", "b"])] && !shoda::is_strong_shoda_pair(&g, &h, &k).unwrap(),
            "(<x,b>, 1) is Shoda but not strong; chain <x,b> < <x,y,b> < G",
            format!("chain orders {:?}", hs.iter().map(|s| s.order()).collect::<Vec<_>>()),
        )
    });
    let comp = decompose::component(&g, &h, &k, &subs, &Options { debug_checks: true, ..Options::default() });
    let comp = comp.as_ref().map_err(|e| e.to_string());
    out.check("C1.sigma_a_F", || {
        let c = comp.clone()?;
        let cf = c.cyclic.as_ref().ok_or("no cyclic form")?;
        let f = c.descriptor.f.describe();
        expect(
            cf.sigma == 23 && cf.a.as_rational() == Some(q(-8)) && f == "Q(sqrt(-7))" && c.descriptor.m == 28,
            format!("E = Q(zeta_28), F = {f}, sigma = {} mod 28, a = {}", cf.sigma, cf.a),
            format!("sigma {} a {} F {f}", cf.sigma, cf.a),
        )
    });
    out.check("C1.schur", || {
        let c = comp.clone()?;
        let s = &c.schur;
        let r2 = s.certificates.iter().any(|t| t.starts_with("R2: a^2"));
        let r4 = s.certificates.iter().any(|t| t.starts_with("R4"));
        expect((s.lower, s.upper) == (2, 2) && r2 && r4, format!("index 2 from {:?}", s.certificates), format!("{s:?}"))
    });
    out.check("C1.component", || {
        let c = comp.clone()?;
        let r = report::component_report(&g, c, false);
        let text = r.reduced_form.map(|f| f.text).unwrap_or_default();
        expect(text == "M_3(H(Q(sqrt(-7))))" && r.dim_over_q == 72, format!("{text}, dimension 72"), text)
    });
    out.check("C1.published_unit", || {
        // z_a = a(xy + y^2)e with e = e_Q(λ) on <x,b>
        let e = galg::pci_from_character(&g, &galg::induce_character(&g, &LinearCharacter::new(&g, &h, &k).unwrap(), &h)).unwrap();
        let a_a = el(&g, "x*y").add(&el(&g, "y^2")).mul(&g, &e);
        let z = el(&g, "a").mul(&g, &a_a);
        let z6 = z.pow(&g, 6);
        let eight_x2 = el(&g, "x^2").mul(&g, &e).scale(&q(8));
        let moves_x = el(&g, "x").mul(&g, &e).mul(&g, &z) == z.mul(&g, &el(&g, "x^3").mul(&g, &e));
        let moves_b = el(&g, "b").mul(&g, &e).mul(&g, &z) == z.mul(&g, &el(&g, "b^2").mul(&g, &e));
        expect(
            z6 == eight_x2 && z6 == e.scale(&q(-8)) && moves_x && moves_b,
            "z_a^6 = 8x^2 e = -8e; z_a moves xe to x^3e and be to b^2e",
            format!("z_a^6 = {}", z6.display(&g)),
        )
    });
}

fn g1000(out: &mut Outcome, dec: &Decomposition, g: &FiniteGroup) {
    let rep = report::build_report(g, dec, false);
    let texts: Vec<String> = rep.components.iter().map(|c| c.reduced_form.as_ref().map_or("?".into(), |r| r.text.clone())).collect();
    out.check("C2.classes", || {
        expect(dec.components.len() == 9 && dec.complete, "9 Shoda classes, idempotents sum to 1", format!("{} classes, complete {}", dec.components.len(), dec.complete))
    });
    out.check("C2.abelian", || {
        let whole = Subgroup::whole(g);
        let mut fields: Vec<String> = dec.components.iter().filter(|c| c.h == whole).map(|c| c.descriptor.f.describe()).collect();
        fields.sort();
        expect(fields == ["Q", "Q", "Q(sqrt(-1))", "Q(zeta_8)"], format!("{fields:?}"), format!("{fields:?}"))
    });
    out.check("C2.m8", || {
        let n = texts.iter().filter(|t| *t == "M_8(Q)").count();
        expect(n == 3, "three components M_8(Q)", format!("{n} components M_8(Q)"))
    });
    let qq = sub(g, &["x", "y", "w^4"]);
    out.check("C2.Q_y", || {
        let c = find(dec, &qq, &sub(g, &["y"]));
        let cf = c.cyclic.as_ref().ok_or("no cyclic form")?;
        let s = &c.schur;
        let r2 = s.certificates.iter().any(|t| t.starts_with("R2: a^2"));
        let r3 = s.certificates.iter().any(|t| t.starts_with("R3"));
        expect(
            cf.a.as_rational() == Some(q(-25)) && cf.sigma == 7 && (s.lower, s.upper) == (2, 2) && r2 && r3,
            format!("a = {}, sigma = {}, index 2 from {:?}", cf.a, cf.sigma, s.certificates),
            format!("a {} sigma {} schur {s:?}", cf.a, cf.sigma),
        )
    });
    out.check("C2.Q_y_w4", || {
        let c = find(dec, &qq, &sub(g, &["y", "w^4"]));
        expect(c.schur.index() == Some(1), format!("splits: {:?}", c.schur.certificates), format!("{:?}", c.schur))
    });
    out.check("C2.staged_published_unit", || staged_published(g));
    out.check("C2.audit", || {
        let has = |t: &str| texts.iter().any(|x| x == t);
        expect(
            rep.audit.sum_dim == 1000 && rep.audit.complete && has("M_10(H(Q))") && has("M_20(Q)"),
            format!("dimensions sum to 1000: {}", texts.join(" + ")),
            format!("sum {} forms {texts:?}", rep.audit.sum_dim),
        )
    });
    out.check("C2.published_sizes", || {
        let path = format!("{}/fixtures/g1000.expected.json", env!("CARGO_MANIFEST_DIR"));
        let expected: report::Expected = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        let notes = report::compare_expected(&rep, &expected);
        let flagged = notes.iter().any(|n| n.contains("M_20(H(Q))")) && notes.iter().any(|n| n.contains("M_40(Q)"));
        expect(flagged, format!("discrepancy flagged: {}", notes.join("; ")), format!("notes {notes:?}"))
    });
}

/// The published unit `z_w = w A_w`, `A_w = Σ z^-(j-1) x^-(i-1)(j-1)q e z^(i-1)` with `q = 3`, pushed
/// through the staged recursion and through direct multiplication.
fn staged_published(g: &FiniteGroup) -> Result<String, String> {
    let (h, k) = (sub(g, &["x", "y", "w^4"]), sub(g, &["y"]));
    let chain = shoda::chain_through(g, &h, &k, &[sub(g, &["x", "y", "z", "w^4"])]).map_err(|e| e.to_string())?;
    let lam = LinearCharacter::new(g, &h, &k).unwrap();
    let tower = Tower::new(g, lam, chain);
    let e = tower.e(0).clone();
    let zg = g.parse_word("z").unwrap();
    let x = g.parse_word("x").unwrap();
    let mut a_w = AlgElement::zero();
    for i in 0..5i64 {
        for j in 0..5i64 {
            let t = e.left_mul(g, g.pow(x, -(i * j * 3))).left_mul(g, g.pow(zg, -j)).right_mul(g, g.pow(zg, i));
            a_w = a_w.add(&t);
        }
    }
    let z_w = el(g, "w").mul(g, &a_w);
    let sp = simple::staged_power(&tower, &z_w, g.parse_word("w").unwrap(), &[1, 4]).map_err(|e| e.to_string())?;
    let st1 = &sp.stages[0];
    let five_e = e.scale(&q(5));
    let direct2 = z_w.mul(g, &z_w).mul(g, &e) == el(g, "w^2").mul(g, &five_e);
    let direct4 = z_w.pow(g, 4).mul(g, &e) == el(g, "w^4").mul(g, &e.scale(&q(25)));
    expect(
        st1.d == 2 && st1.y == five_e && sp.b == e.scale(&q(25)) && g.label(sp.a) == "w^4" && direct2 && direct4,
        "d = 2, Y = 5e, b = 25e; z_w^2 e = w^2 5e and z_w^4 e = w^4 25e",
        format!("d {} Y {} b {} a {} direct {direct2} {direct4}", st1.d, st1.y.display(g), sp.b.display(g), g.label(sp.a)),
    )
}

fn main() {
    let mut out = Outcome { results: Vec::new() };
    order168(&mut out);
    let g = fixture("g1000");
    let dec = decompose::decompose(&g, &Options::default()).expect("decomposition");
    g1000(&mut out, &dec, &g);
    oracles::run(&mut out, &g, &dec);
    props::run(&mut out, &g, &dec);
    determinism::run(&mut out);
    let failed: Vec<&str> = out.results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    println!("{} of {} criteria passed", out.results.len() - failed.len(), out.results.len());
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
