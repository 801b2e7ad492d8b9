//! Independent checks: strong-pair formulas against length-1 chains, and brute-force searches
//! for central idempotents and zero divisors in small group algebras.

use wedderburn::arith::{q, Q};
use wedderburn::decompose::{self, Decomposition, Options};
use wedderburn::galg::{AlgElement, LinearCharacter};
use wedderburn::grp::{FiniteGroup, SUBGROUP_LATTICE_BOUND};
use wedderburn::report;
use wedderburn::shoda;
use wedderburn::simple::{self, Generalized};

use super::{expect, fixture, Outcome};

pub fn run(out: &mut Outcome, g1000: &FiniteGroup, dec1000: &Decomposition) {
    for name in ["q8", "d8", "c4", "s3", "frob21"] {
        let g = fixture(name);
        let dec = decompose::decompose(&g, &Options::default()).unwrap();
        out.check(&format!("C3.strong_vs_chain.{name}"), || strong_vs_chain(&g, &dec));
    }
    out.check("C3.strong_vs_chain.g1000", || strong_vs_chain(g1000, dec1000));
    for (name, division) in [("q8", true), ("d8", false)] {
        out.check(&format!("C3.idempotent_oracle.{name}"), || idempotent_oracle(name, division));
    }
}

fn strong_vs_chain(g: &FiniteGroup, dec: &Decomposition) -> Result<String, String> {
    let subs = wedderburn::grp::all_subgroups(g, SUBGROUP_LATTICE_BOUND).map_err(|e| e.to_string())?;
    let mut n = 0;
    for c in dec.components.iter().filter(|c| c.strong) {
        let lam = LinearCharacter::new(g, &c.h, &c.k).map_err(|e| e.to_string())?;
        let direct = simple::strong_component(g, &lam).map_err(|e| e.to_string())?;
        let chain = if c.h.order() == g.order() {
            shoda::find_strong_inductive_chain(g, &c.h, &c.k, &subs)
        } else {
            shoda::chain_through(g, &c.h, &c.k, &[])
        }
        .map_err(|e| e.to_string())?;
        if chain.len() > 1 {
            return Err(format!("strong pair with chain of length {}", chain.len()));
        }
        let gen = Generalized::new(g, lam, chain).map_err(|e| e.to_string())?;
        if gen.descriptor != direct.descriptor {
            return Err(format!("descriptors differ for H of order {}, K of order {}", c.h.order(), c.k.order()));
        }
        n += 1;
    }
    Ok(format!("{n} strong pairs give equal (E, F, k, tau)"))
}

fn classes(g: &FiniteGroup) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.order()];
    let mut out = Vec::new();
    for x in 0..g.order() {
        if seen[x] {
            continue;
        }
        let mut cl: Vec<usize> = (0..g.order()).map(|y| g.mul(g.mul(g.inv(y), x), y)).collect();
        cl.sort_unstable();
        cl.dedup();
        for &y in &cl {
            seen[y] = true;
        }
        out.push(cl);
    }
    out
}

fn is_idem(g: &FiniteGroup, e: &AlgElement) -> bool {
    !e.is_zero() && e.mul(g, e) == *e
}

/// Central idempotents `Σ (c_i/8) C_i` with `c_i ∈ [-4, 4]`; the minimal ones are compared with
/// the computed primitive central idempotents. A 4-dimensional component is `H(Q)` when `QGe`
/// has no idempotent other than `0` and `e` with coefficients in `{-1, 0, 1}/2`.
fn idempotent_oracle(name: &str, division: bool) -> Result<String, String> {
    let g = fixture(name);
    let cls = classes(&g);
    let sums: Vec<AlgElement> = cls.iter().map(|c| AlgElement::from_terms(c.iter().map(|&x| (x, q(1))))).collect();
    let mut idems = Vec::new();
    let total = 9usize.pow(cls.len() as u32);
    for mut code in 0..total {
        let mut e = AlgElement::zero();
        for s in &sums {
            let c = (code % 9) as i64 - 4;
            code /= 9;
            e = e.add(&s.scale(&Q::new(c.into(), 8.into())));
        }
        if is_idem(&g, &e) {
            idems.push(e);
        }
    }
    let primitive: Vec<&AlgElement> =
        idems.iter().filter(|e| !idems.iter().any(|f| f != *e && f.mul(&g, e) == *f)).collect();
    let dec = decompose::decompose(&g, &Options::default()).map_err(|e| e.to_string())?;
    let mut computed: Vec<&AlgElement> = dec.components.iter().map(|c| &c.chain.top_pci).collect();
    let mut oracle = primitive.clone();
    computed.sort_by_key(|e| e.digest());
    oracle.sort_by_key(|e| e.digest());
    if computed != oracle {
        return Err(format!("{} primitive idempotents by search, {} computed", oracle.len(), computed.len()));
    }
    let big = primitive.iter().find(|e| e.coeff(0) * q(g.order() as i64) == q(4)).ok_or("no 4-dimensional component")?;
    let half = Q::new(1.into(), 2.into());
    let mut split = false;
    for mut code in 0..3usize.pow(g.order() as u32) {
        let mut x = AlgElement::zero();
        for y in 0..g.order() {
            let c = (code % 3) as i64 - 1;
            code /= 3;
            x.add_term(y, &(half.clone() * q(c)));
        }
        let x = x.mul(&g, big);
        if is_idem(&g, &x) && x != **big {
            split = true;
            break;
        }
    }
    let noncommutative = (0..g.order()).any(|a| {
        (0..g.order()).any(|b| {
            let (ea, eb) = (big.left_mul(&g, a), big.left_mul(&g, b));
            ea.mul(&g, &eb) != eb.mul(&g, &ea)
        })
    });
    let rep = report::build_report(&g, &dec, false);
    let mut texts: Vec<String> = rep.components.iter().map(|c| c.reduced_form.as_ref().unwrap().text.clone()).collect();
    texts.sort();
    let want = if division { "H(Q)" } else { "M_2(Q)" };
    let expected: Vec<String> = [want, "Q", "Q", "Q", "Q"].iter().map(|s| s.to_string()).collect();
    expect(
        noncommutative && split != division && texts == expected,
        format!(
            "{} idempotents found by search, 5 primitive and equal to the computed ones; 4-dimensional component {} ({})",
            idems.len(),
            if split { "has a nontrivial idempotent" } else { "has no nontrivial idempotent" },
            texts.join(" + ")
        ),
        format!("split {split}, noncommutative {noncommutative}, computed {texts:?}"),
    )
}

