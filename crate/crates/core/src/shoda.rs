//! Shoda pairs, their equivalence classes, strong pairs and strong inductive chains.

use serde::{Deserialize, Serialize};

use crate::arith::Q;
use crate::cyclo::FixedFieldSpec;
use crate::error::{Error, Result};
use crate::galg::{self, AlgElement, LinearCharacter};
use crate::grp::{self, FiniteGroup, Subgroup};

/// Why `(H, K)` fails to be a Shoda pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShodaFailure {
    /// `K` is not normal in `H` or `H/K` is not cyclic.
    Condition1(String),
    /// `g ∉ H` with `[H,g] ∩ H ⊆ K`.
    Witness(usize),
}

pub fn is_shoda_pair(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> std::result::Result<(), ShodaFailure> {
    match grp::cyclic_quotient_data(g, h, k) {
        Err(_) => return Err(ShodaFailure::Condition1("K is not a normal subgroup of H".into())),
        Ok(None) => return Err(ShodaFailure::Condition1("H/K is not cyclic".into())),
        Ok(Some(_)) => {}
    }
    for x in 0..g.order() {
        if h.contains(x) {
            continue;
        }
        if !commutator_meets_outside(g, h, k, x) {
            return Err(ShodaFailure::Witness(x));
        }
    }
    Ok(())
}

/// Whether some single commutator `[y,x]`, `y ∈ H`, lies in `H` but not in `K`. Closing the
/// commutators under products first would accept pairs whose induced character is reducible.
fn commutator_meets_outside(g: &FiniteGroup, h: &Subgroup, k: &Subgroup, x: usize) -> bool {
    h.members().iter().any(|&y| {
        let c = g.comm(x, y);
        h.contains(c) && !k.contains(c)
    })
}

/// `∃ x: H1^x ∩ K2 = K1^x ∩ H2`.
pub fn are_equivalent(g: &FiniteGroup, (h1, k1): (&Subgroup, &Subgroup), (h2, k2): (&Subgroup, &Subgroup)) -> bool {
    if h1.order() != h2.order() || k1.order() != k2.order() {
        return false;
    }
    (0..g.order()).any(|x| {
        let a: Vec<usize> = h1.members().iter().map(|&y| g.conj(y, x)).filter(|&y| k2.contains(y)).collect();
        let b: Vec<usize> = k1.members().iter().map(|&y| g.conj(y, x)).filter(|&y| h2.contains(y)).collect();
        if a.len() != b.len() {
            return false;
        }
        let mut a = a;
        let mut b = b;
        a.sort_unstable();
        b.sort_unstable();
        a == b
    })
}

/// Condition (i) `H ⊴ Cen_G(ε)` and (ii) pairwise orthogonal `G`-conjugates of `ε(H,K)`.
pub fn is_strong_shoda_pair(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Result<bool> {
    let whole = Subgroup::whole(g);
    if grp::is_normal(g, h, &whole) {
        return Ok(true);
    }
    let eps = galg::epsilon(g, h, k)?;
    Ok(chain_step_ok(g, h, &eps, &whole).is_some())
}

/// Checks `H ⊴ C` and orthogonality of the `A`-conjugates of the central idempotent `e` of `QH`,
/// where `C = Cen_A(e)`; returns `C` and a left transversal of it in `A`.
fn chain_step_ok(g: &FiniteGroup, h: &Subgroup, e: &AlgElement, a: &Subgroup) -> Option<(Subgroup, Vec<usize>)> {
    let c = galg::centralizer_of_element(g, e, a, Some(h));
    let t = grp::left_transversal(g, &c, a);
    if grp::is_normal(g, h, a) {
        return Some((c, t));
    }
    if !grp::is_normal(g, h, &c) {
        return None;
    }
    let conjs: Vec<AlgElement> = t.iter().map(|&x| e.conj(g, g.inv(x))).collect();
    for i in 0..conjs.len() {
        for j in 0..conjs.len() {
            if i != j && !conjs[i].mul(g, &conjs[j]).is_zero() {
                return None;
            }
        }
    }
    Some((c, t))
}

/// One equivalence class of Shoda pairs with its primitive central idempotent.
#[derive(Clone, Debug)]
pub struct ShodaClass {
    pub h: Subgroup,
    pub k: Subgroup,
    pub pci: AlgElement,
    /// `χ(1) = [G:H]`
    pub degree: usize,
    pub field: FixedFieldSpec,
    pub strong: bool,
}

#[derive(Clone, Debug)]
pub struct ShodaEnumeration {
    pub classes: Vec<ShodaClass>,
    pub complete: bool,
    /// `1 - Σ e` over the classes found.
    pub residual: AlgElement,
}

pub fn pci_of_pair(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Result<(AlgElement, FixedFieldSpec)> {
    let lam = LinearCharacter::new(g, h, k)?;
    let chi = galg::induce_character(g, &lam, &Subgroup::whole(g));
    let field = galg::character_field(&chi);
    Ok((galg::pci_from_character(g, &chi)?, field))
}

/// Representatives of the Shoda-pair classes, scanning `H` by decreasing order and then `K` by
/// decreasing order; the first pair of each class is kept. Stops once the idempotents sum to 1
/// unless `full_scan` is set.
pub fn enumerate_shoda_pairs(g: &FiniteGroup, subgroups: &[Subgroup], full_scan: bool) -> Result<ShodaEnumeration> {
    let mut hs: Vec<&Subgroup> = subgroups.iter().collect();
    hs.sort_by(|a, b| b.order().cmp(&a.order()).then_with(|| a.members().cmp(b.members())));
    let mut classes: Vec<ShodaClass> = Vec::new();
    let mut dim_sum = Q::from_integer(0.into());
    let target = Q::from_integer(g.order().into());
    'outer: for h in &hs {
        let derived = grp::derived_subgroup(g, h);
        for k in &hs {
            if !(derived.is_subgroup_of(k) && k.is_subgroup_of(h) && grp::is_normal(g, k, h)) {
                continue;
            }
            if is_shoda_pair(g, h, k).is_err() {
                continue;
            }
            let degree = g.order() / h.order();
            let dup = classes
                .iter()
                .filter(|c| c.degree == degree)
                .any(|c| are_equivalent(g, (&c.h, &c.k), (h, k)));
            if dup {
                continue;
            }
            let (pci, field) = pci_of_pair(g, h, k)?;
            if classes.iter().any(|c| c.pci == pci) {
                return Err(Error::Invariant("inequivalent Shoda pairs with equal idempotents".into()));
            }
            if dim_sum == target {
                return Err(Error::Invariant("new Shoda class after the idempotents summed to 1".into()));
            }
            dim_sum += galg::dimension(g, &pci);
            let strong = is_strong_shoda_pair(g, h, k)?;
            classes.push(ShodaClass { h: (*h).clone(), k: (*k).clone(), pci, degree, field, strong });
            if dim_sum == target && !full_scan {
                break 'outer;
            }
        }
    }
    let mut sum = AlgElement::zero();
    for c in &classes {
        sum = sum.add(&c.pci);
    }
    let residual = AlgElement::one().sub(&sum);
    Ok(ShodaEnumeration { complete: residual.is_zero(), classes, residual })
}

/// One step `H_i ≤ H_{i+1}` of a strong inductive chain.
#[derive(Clone, Debug)]
pub struct ChainLevel {
    pub h: Subgroup,
    /// `e_Q(λ^{H_i})`, a primitive central idempotent of `QH_i`.
    pub pci: AlgElement,
    /// `C_i = Cen_{H_{i+1}}(e_Q(λ^{H_i}))`
    pub c: Subgroup,
    /// Left transversal of `C_i` in `H_{i+1}`, identity first.
    pub transversal: Vec<usize>,
}

impl ChainLevel {
    /// `k_i = [H_{i+1} : C_i]`
    pub fn k(&self) -> usize {
        self.transversal.len()
    }
}

#[derive(Clone, Debug)]
pub struct InductiveChain {
    pub levels: Vec<ChainLevel>,
    /// `e_Q(λ^G)`
    pub top_pci: AlgElement,
}

impl InductiveChain {
    pub fn len(&self) -> usize {
        self.levels.len()
    }
    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

fn level_pci(g: &FiniteGroup, lam: &LinearCharacter, a: &Subgroup) -> Option<AlgElement> {
    let chi = galg::induce_character(g, lam, a);
    galg::pci_from_character(g, &chi).ok()
}

/// Shortest strong inductive chain `H = H_0 < H_1 < … < H_n = G`; among chains of equal
/// length, depth-first with candidate overgroups by increasing index, then member order.
pub fn find_strong_inductive_chain(g: &FiniteGroup, h: &Subgroup, k: &Subgroup, subgroups: &[Subgroup]) -> Result<InductiveChain> {
    let lam = LinearCharacter::new(g, h, k)?;
    let whole = Subgroup::whole(g);
    let top_pci = level_pci(g, &lam, &whole).ok_or(Error::NotIrreducible)?;
    if h.order() == g.order() {
        return Ok(InductiveChain { levels: vec![], top_pci });
    }
    let over: Vec<&Subgroup> = subgroups.iter().filter(|s| h.is_subgroup_of(s) && s.order() > h.order()).collect();
    let max_len = over.len().max(1);
    for len in 1..=max_len {
        let mut levels = Vec::new();
        if dfs(g, &lam, h, len, &over, &whole, &mut levels) {
            return Ok(InductiveChain { levels, top_pci });
        }
    }
    Err(Error::NoChain(format!("H of order {}, K of order {}", h.order(), k.order())))
}

fn dfs(
    g: &FiniteGroup,
    lam: &LinearCharacter,
    cur: &Subgroup,
    remaining: usize,
    over: &[&Subgroup],
    whole: &Subgroup,
    levels: &mut Vec<ChainLevel>,
) -> bool {
    let Some(e) = level_pci(g, lam, cur) else {
        return false;
    };
    let mut cands: Vec<&Subgroup> = if remaining == 1 {
        vec![whole]
    } else {
        over.iter().copied().filter(|s| cur.is_subgroup_of(s) && s.order() > cur.order() && s.order() < g.order()).collect()
    };
    cands.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members().cmp(b.members())));
    for next in cands {
        if let Some((c, t)) = chain_step_ok(g, cur, &e, next) {
            levels.push(ChainLevel { h: cur.clone(), pci: e.clone(), c, transversal: t });
            if remaining == 1 || dfs(g, lam, next, remaining - 1, over, whole, levels) {
                return true;
            }
            levels.pop();
        }
    }
    false
}

/// Chain through explicitly given intermediate subgroups, checked level by level.
pub fn chain_through(g: &FiniteGroup, h: &Subgroup, k: &Subgroup, middle: &[Subgroup]) -> Result<InductiveChain> {
    let lam = LinearCharacter::new(g, h, k)?;
    let whole = Subgroup::whole(g);
    let top_pci = level_pci(g, &lam, &whole).ok_or(Error::NotIrreducible)?;
    let mut hs = vec![h.clone()];
    hs.extend(middle.iter().cloned());
    hs.push(whole);
    let mut levels = Vec::new();
    for w in hs.windows(2) {
        let e = level_pci(g, &lam, &w[0]).ok_or(Error::NotIrreducible)?;
        let (c, t) = chain_step_ok(g, &w[0], &e, &w[1]).ok_or_else(|| Error::NoChain("given subgroups fail the chain conditions".into()))?;
        levels.push(ChainLevel { h: w[0].clone(), pci: e, c, transversal: t });
    }
    Ok(InductiveChain { levels, top_pci })
}

/// Serializable summary of a pair and its chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShodaPairCert {
    pub h: Vec<usize>,
    pub k: Vec<usize>,
    pub h_gens: Vec<String>,
    pub k_gens: Vec<String>,
    pub strong: bool,
    pub chain: Vec<ChainLevelCert>,
    pub pci_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pci: Option<AlgElement>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainLevelCert {
    pub h: Vec<usize>,
    pub c: Vec<usize>,
    pub k: usize,
    pub transversal: Vec<usize>,
    pub pci_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pci: Option<AlgElement>,
}

pub fn certificate(g: &FiniteGroup, h: &Subgroup, k: &Subgroup, strong: bool, chain: &InductiveChain, full: bool) -> ShodaPairCert {
    let labels = |s: &Subgroup| s.gens().iter().map(|&x| g.label(x)).collect();
    ShodaPairCert {
        h: h.members().to_vec(),
        k: k.members().to_vec(),
        h_gens: labels(h),
        k_gens: labels(k),
        strong,
        chain: chain
            .levels
            .iter()
            .map(|l| ChainLevelCert {
                h: l.h.members().to_vec(),
                c: l.c.members().to_vec(),
                k: l.k(),
                transversal: l.transversal.clone(),
                pci_digest: l.pci.digest(),
                pci: full.then(|| l.pci.clone()),
            })
            .collect(),
        pci_digest: chain.top_pci.digest(),
        pci: full.then(|| chain.top_pci.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::*;

    fn sg(g: &FiniteGroup, ws: &[&str]) -> Subgroup {
        subgroup_generated(g, &ws.iter().map(|w| g.parse_word(w).unwrap()).collect::<Vec<_>>())
    }

    #[test]
    fn q8_classes() {
        let g = build_quaternion8().unwrap();
        let subs = all_subgroups(&g, 2000).unwrap();
        let en = enumerate_shoda_pairs(&g, &subs, true).unwrap();
        assert!(en.complete);
        assert_eq!(en.classes.len(), 5);
        assert_eq!(en.classes.iter().filter(|c| c.degree == 2).count(), 1);
    }

    #[test]
    fn witness_for_non_shoda() {
        let g = build_quaternion8().unwrap();
        let h = sg(&g, &["x"]);
        let k = sg(&g, &["x^2"]);
        // λ with kernel <x^2> on <x> is fixed by conjugation, so some g outside H is a witness
        assert!(matches!(is_shoda_pair(&g, &h, &k), Err(ShodaFailure::Witness(_))));
        let k = sg(&g, &["y"]);
        assert!(matches!(is_shoda_pair(&g, &h, &k), Err(ShodaFailure::Condition1(_))));
    }

    #[test]
    fn order168_chain() {
        let g = build_order168().unwrap();
        let h = sg(&g, &["x", "b"]);
        let k = Subgroup::trivial(&g);
        assert!(is_shoda_pair(&g, &h, &k).is_ok());
        assert!(!is_strong_shoda_pair(&g, &h, &k).unwrap());
        let subs = all_subgroups(&g, 2000).unwrap();
        let ch = find_strong_inductive_chain(&g, &h, &k, &subs).unwrap();
        assert_eq!(ch.len(), 2);
        assert_eq!(ch.levels[1].h, sg(&g, &["x", "y", "b"]));
        assert_eq!(ch.levels[0].c, ch.levels[1].h);
        assert_eq!(ch.levels[1].c.order(), 168);
    }

    #[test]
    fn commutator_subgroup_is_too_weak() {
        // λ^G is induced through the SL(2,3) quotient, which has no irreducible of degree 4
        let g = build_order168().unwrap();
        let (h, k) = (sg(&g, &["b", "a", "x^2"]), sg(&g, &["b", "a"]));
        let x = g.parse_word("x").unwrap();
        let closed = commutator_subgroup_with(&g, &h, x);
        assert!(closed.members().iter().any(|&c| h.contains(c) && !k.contains(c)));
        assert!(matches!(is_shoda_pair(&g, &h, &k), Err(ShodaFailure::Witness(w)) if !h.contains(w)));
        assert!(pci_of_pair(&g, &h, &k).is_err());
    }
}
