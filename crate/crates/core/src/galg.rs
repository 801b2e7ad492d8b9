//! Sparse elements of the rational group algebra, idempotents and characters.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, q, ramanujan, units, Q};
use crate::cyclo::{parse_rational, CycloNumber, FixedFieldSpec};
use crate::error::{Error, Result};
use crate::grp::{self, FiniteGroup, Subgroup};

/// `Σ c_g g` with nonzero rational coefficients keyed by element index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AlgElement {
    terms: BTreeMap<usize, Q>,
}

impl AlgElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::basis(0)
    }

    pub fn basis(g: usize) -> Self {
        Self::scalar_at(g, Q::one())
    }

    pub fn scalar(c: Q) -> Self {
        Self::scalar_at(0, c)
    }

    pub fn scalar_at(g: usize, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(g, c);
        }
        AlgElement { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, Q)>>(it: I) -> Self {
        let mut a = Self::zero();
        for (g, c) in it {
            a.add_term(g, &c);
        }
        a
    }

    pub fn add_term(&mut self, g: usize, c: &Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(g).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn terms(&self) -> &BTreeMap<usize, Q> {
        &self.terms
    }

    pub fn coeff(&self, g: usize) -> Q {
        self.terms.get(&g).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (g, c) in &o.terms {
            r.add_term(*g, c);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (g, c) in &o.terms {
            r.add_term(*g, &-c);
        }
        r
    }

    pub fn neg(&self) -> Self {
        AlgElement { terms: self.terms.iter().map(|(g, c)| (*g, -c)).collect() }
    }

    pub fn scale(&self, r: &Q) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        AlgElement { terms: self.terms.iter().map(|(g, c)| (*g, c * r)).collect() }
    }

    /// `x·self`
    pub fn left_mul(&self, grp: &FiniteGroup, x: usize) -> Self {
        AlgElement { terms: self.terms.iter().map(|(g, c)| (grp.mul(x, *g), c.clone())).collect() }
    }

    /// `self·x`
    pub fn right_mul(&self, grp: &FiniteGroup, x: usize) -> Self {
        AlgElement { terms: self.terms.iter().map(|(g, c)| (grp.mul(*g, x), c.clone())).collect() }
    }

    /// `x^-1 · self · x`
    pub fn conj(&self, grp: &FiniteGroup, x: usize) -> Self {
        AlgElement { terms: self.terms.iter().map(|(g, c)| (grp.conj(*g, x), c.clone())).collect() }
    }

    /// Common denominator and integer numerators.
    fn int_form(&self) -> (BigInt, Vec<(usize, BigInt)>) {
        let den = self.terms.values().fold(BigInt::one(), |d, c| d.lcm(c.denom()));
        let nums = self.terms.iter().map(|(g, c)| (*g, c.numer() * (&den / c.denom()))).collect();
        (den, nums)
    }

    pub fn mul(&self, grp: &FiniteGroup, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let (da, na) = self.int_form();
        let (db, nb) = o.int_form();
        let den = da * db;
        let bits = |v: &[(usize, BigInt)]| v.iter().map(|(_, x)| x.bits()).max().unwrap_or(0);
        let len_bits = 64 - (na.len().min(nb.len()) as u64).leading_zeros() as u64;
        let n = grp.order();
        let mut out = BTreeMap::new();
        if bits(&na) + bits(&nb) + len_bits < 120 {
            let a: Vec<(usize, i128)> = na.iter().map(|(g, x)| (*g, x.to_i128().unwrap())).collect();
            let b: Vec<(usize, i128)> = nb.iter().map(|(g, x)| (*g, x.to_i128().unwrap())).collect();
            let mut acc = vec![0i128; n];
            for &(g, x) in &a {
                for &(h, y) in &b {
                    acc[grp.mul(g, h)] += x * y;
                }
            }
            for (g, v) in acc.into_iter().enumerate() {
                if v != 0 {
                    out.insert(g, Q::new(BigInt::from(v), den.clone()));
                }
            }
        } else {
            let mut acc = vec![BigInt::zero(); n];
            for (g, x) in &na {
                for (h, y) in &nb {
                    acc[grp.mul(*g, *h)] += x * y;
                }
            }
            for (g, v) in acc.into_iter().enumerate() {
                if !v.is_zero() {
                    out.insert(g, Q::new(v, den.clone()));
                }
            }
        }
        AlgElement { terms: out }
    }

    pub fn pow(&self, grp: &FiniteGroup, k: u64) -> Self {
        let mut r = Self::one();
        for _ in 0..k {
            r = r.mul(grp, self);
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Error unless every support index lies in `0..order`.
    pub fn validate(&self, order: usize) -> Result<()> {
        match self.terms.keys().next_back() {
            Some(&g) if g >= order => Err(Error::Parse(format!("element index {g} outside group of order {order}"))),
            _ => Ok(()),
        }
    }

    /// SHA-256 over the sorted `index:coefficient` list.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        for (g, c) in &self.terms {
            h.update(format!("{g}:{c};").as_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn display(&self, grp: &FiniteGroup) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms.iter().map(|(g, c)| format!("({c})*{}", grp.label(*g))).collect::<Vec<_>>().join(" + ")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgJson {
    terms: BTreeMap<String, String>,
}

impl Serialize for AlgElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AlgJson { terms: self.terms.iter().map(|(g, c)| (g.to_string(), c.to_string())).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = AlgJson::deserialize(d)?;
        let mut a = AlgElement::zero();
        for (k, v) in j.terms {
            if k.is_empty() || !k.bytes().all(|b| b.is_ascii_digit()) || k.len() > 9 {
                return Err(D::Error::custom(format!("bad element index {k:?}")));
            }
            let g: usize = k.parse().map_err(D::Error::custom)?;
            let c = parse_rational(&v).map_err(D::Error::custom)?;
            a.add_term(g, &c);
        }
        Ok(a)
    }
}

/// `Ŝ = |S|^-1 Σ_{s∈S} s`
pub fn hat(s: &Subgroup) -> AlgElement {
    let c = Q::new(BigInt::one(), BigInt::from(s.order()));
    AlgElement { terms: s.members().iter().map(|&g| (g, c.clone())).collect() }
}

/// `ε(H,K) = Π (K̂ - L̂)` over the minimal normal subgroups `L/K` of `H/K`; `K̂` when `H = K`.
/// Uses the cyclic-quotient description of the `L` whenever `H/K` is cyclic.
pub fn epsilon(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Result<AlgElement> {
    match grp::cyclic_quotient_data(g, h, k)? {
        Some((x, o)) => {
            let ls: Vec<Subgroup> = factor(o as u64)
                .into_iter()
                .map(|(p, _)| grp::join(g, k, &[g.pow(x, (o as u64 / p) as i64)]))
                .collect();
            Ok(epsilon_product(g, k, &ls))
        }
        None => epsilon_general(g, h, k),
    }
}

/// `ε(H,K)` from the minimal normal overgroups computed as normal closures.
pub fn epsilon_general(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Result<AlgElement> {
    if !k.is_subgroup_of(h) || !grp::is_normal(g, k, h) {
        return Err(Error::NotNormal);
    }
    let mut cands: Vec<Subgroup> = Vec::new();
    for &x in h.members() {
        if k.contains(x) {
            continue;
        }
        let c = grp::normal_closure(g, &grp::join(g, k, &[x]), h);
        if !cands.contains(&c) {
            cands.push(c);
        }
    }
    let minimal: Vec<Subgroup> = cands
        .iter()
        .filter(|c| !cands.iter().any(|d| d != *c && d.is_subgroup_of(c)))
        .cloned()
        .collect();
    Ok(epsilon_product(g, k, &minimal))
}

fn epsilon_product(g: &FiniteGroup, k: &Subgroup, ls: &[Subgroup]) -> AlgElement {
    let kh = hat(k);
    let mut e = kh.clone();
    for l in ls {
        e = e.mul(g, &kh.sub(&hat(l)));
    }
    e
}

/// `{x ∈ within : x^-1 α x = α}`; `known` must be a subgroup of the answer.
pub fn centralizer_of_element(g: &FiniteGroup, a: &AlgElement, within: &Subgroup, known: Option<&Subgroup>) -> Subgroup {
    let triv = Subgroup::trivial(g);
    let known = known.unwrap_or(&triv);
    let reps = grp::left_transversal(g, known, within);
    let mut members = Vec::new();
    for t in reps {
        if a.conj(g, t) == *a {
            members.extend(known.members().iter().map(|&y| g.mul(t, y)));
        }
    }
    grp::from_members(g, members)
}

/// Sum of the distinct `G`-conjugates of `ε(H,K)`.
pub fn e_sum_conjugates(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Result<AlgElement> {
    let eps = epsilon(g, h, k)?;
    Ok(sum_conjugates(g, &eps, h, &Subgroup::whole(g)))
}

/// Sum of the distinct `within`-conjugates of `α`, given a subgroup `known` centralizing it.
pub fn sum_conjugates(g: &FiniteGroup, a: &AlgElement, known: &Subgroup, within: &Subgroup) -> AlgElement {
    let cen = centralizer_of_element(g, a, within, Some(known));
    let mut s = AlgElement::zero();
    for t in grp::left_transversal(g, &cen, within) {
        s = s.add(&a.conj(g, g.inv(t)));
    }
    s
}

pub fn is_idempotent(g: &FiniteGroup, a: &AlgElement) -> bool {
    a.mul(g, a) == *a
}

/// Commutes with every generator of `within`.
pub fn is_central(g: &FiniteGroup, a: &AlgElement, within: &Subgroup) -> bool {
    within.gens().iter().all(|&x| a.left_mul(g, x) == a.right_mul(g, x))
}

pub fn are_orthogonal(g: &FiniteGroup, a: &AlgElement, b: &AlgElement) -> bool {
    a.mul(g, b).is_zero() && b.mul(g, a).is_zero()
}

/// Linear character of `H` with kernel `K`, sending the least-index generator of `H/K` to `ζ_m`.
#[derive(Clone, Debug)]
pub struct LinearCharacter {
    pub h: Subgroup,
    pub k: Subgroup,
    pub m: u64,
    pub generator: usize,
    exps: Vec<u32>,
}

impl LinearCharacter {
    pub fn new(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Result<Self> {
        let (x, m) = grp::cyclic_quotient_data(g, h, k)?
            .ok_or_else(|| Error::NotShoda("H/K is not cyclic".into()))?;
        let mut exps = vec![u32::MAX; g.order()];
        let mut y = 0;
        for t in 0..m {
            for &kk in k.members() {
                exps[g.mul(y, kk)] = t as u32;
            }
            y = g.mul(y, x);
        }
        Ok(LinearCharacter { h: h.clone(), k: k.clone(), m: m as u64, generator: x, exps })
    }

    /// Exponent `t` with `λ(x) = ζ_m^t`, or `None` off `H`.
    pub fn exponent(&self, x: usize) -> Option<u64> {
        match self.exps[x] {
            u32::MAX => None,
            t => Some(t as u64),
        }
    }
}

/// Character values on an ambient subgroup, as multiplicities of `ζ_m^j`.
#[derive(Clone, Debug)]
pub struct CharacterValues {
    pub m: u64,
    pub ambient: Subgroup,
    counts: BTreeMap<usize, Vec<i64>>,
}

impl CharacterValues {
    pub fn value(&self, x: usize) -> CycloNumber {
        match self.counts.get(&x) {
            Some(c) => CycloNumber::from_counts(self.m, c),
            None => CycloNumber::zero(self.m),
        }
    }

    pub fn degree(&self) -> i64 {
        self.counts[&0].iter().sum()
    }

    fn trace(&self, x: usize, table: &[i64]) -> i64 {
        self.counts.get(&x).map_or(0, |c| c.iter().zip(table).map(|(a, b)| a * b).sum())
    }
}

/// `λ^A(x) = Σ_t λ°(t^-1 x t)` over a left transversal of `H` in `A`.
pub fn induce_character(g: &FiniteGroup, lam: &LinearCharacter, ambient: &Subgroup) -> CharacterValues {
    let reps = grp::left_transversal(g, &lam.h, ambient);
    let m = lam.m as usize;
    let mut counts = BTreeMap::new();
    for &x in ambient.members() {
        let mut c = vec![0i64; m];
        let mut any = false;
        for &t in &reps {
            let y = g.mul(g.mul(g.inv(t), x), t);
            if let Some(e) = lam.exponent(y) {
                c[e as usize] += 1;
                any = true;
            }
        }
        if any {
            counts.insert(x, c);
        }
    }
    CharacterValues { m: lam.m, ambient: ambient.clone(), counts }
}

/// Subfield of `Q(ζ_m)` generated by the character values.
pub fn character_field(chi: &CharacterValues) -> FixedFieldSpec {
    let vals: BTreeSet<&Vec<i64>> = chi.counts.values().collect();
    let vals: Vec<CycloNumber> = vals.into_iter().map(|c| CycloNumber::from_counts(chi.m, c)).collect();
    let fixing = units(chi.m)
        .into_iter()
        .filter(|&k| vals.iter().all(|v| v.galois(k as i64).unwrap() == *v))
        .collect();
    FixedFieldSpec { conductor: chi.m, fixing }
}

/// `e_Q(χ) = χ(1)/|A| · [Q(ζ_m):Q(χ)]^-1 · Σ_{σ} Σ_{a∈A} σ(χ(a)) a^-1`, checked to be a
/// central idempotent of `QA`.
pub fn pci_from_character(g: &FiniteGroup, chi: &CharacterValues) -> Result<AlgElement> {
    let field = character_field(chi);
    let table: Vec<i64> = (0..chi.m).map(|j| ramanujan(chi.m, j)).collect();
    let scale = Q::new(BigInt::from(chi.degree()), BigInt::from(chi.ambient.order() as u64 * field.fixing.len() as u64));
    let mut e = AlgElement::zero();
    for &a in chi.ambient.members() {
        let t = chi.trace(a, &table);
        if t != 0 {
            e.add_term(g.inv(a), &(q(t) * &scale));
        }
    }
    if !is_central(g, &e, &chi.ambient) || !is_idempotent(g, &e) {
        return Err(Error::NotIrreducible);
    }
    Ok(e)
}

/// Coefficient of the identity scaled by `|G|`: the `Q`-dimension of `QG·e`.
pub fn dimension(g: &FiniteGroup, e: &AlgElement) -> Q {
    e.coeff(0) * Q::from_integer(BigInt::from(g.order()))
}

pub fn abs_max_coeff(a: &AlgElement) -> Q {
    a.terms.values().map(|c| c.abs()).max().unwrap_or_else(Q::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grp::*;

    #[test]
    fn epsilon_is_idempotent() {
        let g = build_order168().unwrap();
        let h = subgroup_generated(&g, &[g.parse_word("x").unwrap(), g.parse_word("b").unwrap()]);
        let k = Subgroup::trivial(&g);
        let e = epsilon(&g, &h, &k).unwrap();
        assert!(is_idempotent(&g, &e));
        assert_eq!(e, epsilon_general(&g, &h, &k).unwrap());
        let lam = LinearCharacter::new(&g, &h, &k).unwrap();
        let chi = induce_character(&g, &lam, &h);
        assert_eq!(pci_from_character(&g, &chi).unwrap(), e);
    }

    #[test]
    fn q8_quaternion_idempotent() {
        let g = build_quaternion8().unwrap();
        let h = subgroup_generated(&g, &[g.parse_word("x").unwrap()]);
        let k = Subgroup::trivial(&g);
        let e = e_sum_conjugates(&g, &h, &k).unwrap();
        let x2 = g.parse_word("x^2").unwrap();
        assert_eq!(e, AlgElement::from_terms([(0, Q::new(1.into(), 2.into())), (x2, Q::new((-1).into(), 2.into()))]));
        let lam = LinearCharacter::new(&g, &h, &k).unwrap();
        let chi = induce_character(&g, &lam, &Subgroup::whole(&g));
        assert_eq!(chi.degree(), 2);
        assert_eq!(character_field(&chi).degree(), 1);
        assert_eq!(pci_from_character(&g, &chi).unwrap(), e);
        assert_eq!(dimension(&g, &e), q(4));
    }

    #[test]
    fn reducible_character_rejected() {
        let g = build_dihedral(4).unwrap();
        let h = subgroup_generated(&g, &[g.parse_word("s").unwrap()]);
        let lam = LinearCharacter::new(&g, &h, &Subgroup::trivial(&g)).unwrap();
        let chi = induce_character(&g, &lam, &Subgroup::whole(&g));
        assert!(matches!(pci_from_character(&g, &chi), Err(Error::NotIrreducible)));
    }

    #[test]
    fn json_round_trip() {
        let a = AlgElement::from_terms([(3, Q::new(1.into(), 2.into())), (10, q(-2))]);
        let s = a.to_json();
        assert_eq!(s, r#"{"terms":{"10":"-2","3":"1/2"}}"#);
        assert_eq!(AlgElement::from_json(&s).unwrap(), a);
        assert!(AlgElement::from_json(r#"{"terms":{"-1":"1"}}"#).is_err());
        assert!(a.validate(8).is_err());
    }
}
