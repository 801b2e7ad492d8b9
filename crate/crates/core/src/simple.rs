//! Simple components: strong pairs directly, the others through a strong inductive chain.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::arith::{mul_order, phi, Q};
use crate::cyclo::{CycloNumber, FixedFieldSpec};
use crate::error::{Error, Result};
use crate::galg::{self, AlgElement, LinearCharacter};
use crate::grp::{self, FiniteGroup, Subgroup};
use crate::linalg;
use crate::shoda::InductiveChain;

/// Crossed product `M_k((E/F, τ))` with `E = Q(ζ_m)` and `Gal(E/F)` given by `f.fixing`.
#[derive(Clone, Debug, PartialEq)]
pub struct Descriptor {
    pub m: u64,
    pub f: FixedFieldSpec,
    pub matrix_degree: usize,
    /// `τ(σ, ρ)` keyed by Galois exponents.
    pub tau: BTreeMap<(u64, u64), CycloNumber>,
}

impl Descriptor {
    pub fn galois(&self) -> &[u64] {
        &self.f.fixing
    }

    /// `[E:F]`
    pub fn relative_degree(&self) -> u64 {
        self.f.fixing.len() as u64
    }

    pub fn dim_over_q(&self) -> u64 {
        let k = self.matrix_degree as u64;
        k * k * self.relative_degree() * phi(self.m)
    }

    pub fn tau_trivial(&self) -> bool {
        self.tau.values().all(|t| t.as_rational().is_some_and(|r| r.is_one()))
    }

    fn compose(&self, a: u64, b: u64) -> u64 {
        if self.m <= 2 {
            1
        } else {
            a * b % self.m
        }
    }

    /// Least Galois exponent generating `Gal(E/F)`, if the group is cyclic.
    pub fn cyclic_generator(&self) -> Option<u64> {
        let n = self.relative_degree();
        self.galois().iter().copied().find(|&s| mul_order(s, self.m.max(1)) == n || n == 1)
    }

    /// `τ(σρ,π)·π(τ(σ,ρ)) = τ(σ,ρπ)·τ(ρ,π)` for all triples.
    pub fn check_cocycle(&self) -> bool {
        let gal = self.galois();
        for &s in gal {
            for &r in gal {
                for &p in gal {
                    let sr = self.compose(s, r);
                    let rp = self.compose(r, p);
                    let lhs = self.tau[&(sr, p)].mul(&self.tau[&(s, r)].galois(p as i64).unwrap());
                    let rhs = self.tau[&(s, rp)].mul(&self.tau[&(r, p)]);
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `a = c_N` with `c_1 = 1`, `c_{j+1} = τ(σ^j, σ)·σ(c_j)`, so that `u_σ^N = a`.
    pub fn a_from_tau(&self, sigma: u64) -> CycloNumber {
        let n = self.relative_degree();
        let mut c = CycloNumber::one(self.m);
        let mut sj = sigma % self.m.max(1);
        if self.m <= 2 {
            sj = 1;
        }
        for _ in 1..n {
            c = self.tau[&(sj, sigma)].mul(&c.galois(sigma as i64).unwrap());
            sj = self.compose(sj, sigma);
        }
        c
    }
}

/// Cyclic presentation `(E/F, σ, a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicForm {
    pub sigma: u64,
    pub a: CycloNumber,
    /// The unit `z` with `α·z = z·σ(α)`, as a group word or a product of level units.
    pub generator: String,
}

/// Description of a strong Shoda pair: `N = N_G(K)` acts on `Q(ζ_m)` through
/// conjugation of `H/K`.
#[derive(Clone, Debug)]
pub struct StrongComponent {
    pub descriptor: Descriptor,
    pub normalizer: Subgroup,
    /// Least-index representatives of `N/H` and their Galois exponents.
    pub reps: Vec<usize>,
    pub exps: Vec<u64>,
    lam: LinearCharacter,
}

pub fn strong_component(g: &FiniteGroup, lam: &LinearCharacter) -> Result<StrongComponent> {
    let whole = Subgroup::whole(g);
    let n = grp::normalizer(g, &lam.k, &whole);
    let reps = grp::left_transversal(g, &lam.h, &n);
    let m = lam.m;
    let exps = reps
        .iter()
        .map(|&x| lam.exponent(g.conj(lam.generator, x)).ok_or_else(|| Error::NotShoda("N does not normalize H".into())))
        .collect::<Result<Vec<_>>>()?;
    let mut fixing = exps.clone();
    fixing.sort_unstable();
    fixing.dedup();
    if fixing.len() != exps.len() {
        return Err(Error::NotShoda("N/H does not act faithfully".into()));
    }
    if m <= 2 {
        fixing = vec![1];
    }
    let rep_of = |y: usize| reps.iter().position(|&r| lam.h.contains(g.mul(g.inv(r), y))).unwrap();
    let mut tau = BTreeMap::new();
    for (i, &a) in reps.iter().enumerate() {
        for (j, &b) in reps.iter().enumerate() {
            let ab = g.mul(a, b);
            let r = rep_of(ab);
            let h = g.mul(g.inv(reps[r]), ab);
            let t = lam.exponent(h).unwrap();
            tau.insert((exps[i] % m.max(1), exps[j] % m.max(1)), CycloNumber::zeta(m, t as i64));
        }
    }
    if m <= 2 {
        let t = tau.values().next().cloned().unwrap();
        tau = BTreeMap::from([((1, 1), t)]);
    }
    let descriptor = Descriptor { m, f: FixedFieldSpec { conductor: m, fixing }, matrix_degree: g.order() / n.order(), tau };
    Ok(StrongComponent { descriptor, normalizer: n, reps, exps, lam: lam.clone() })
}

impl StrongComponent {
    /// First representative whose exponent generates the Galois group; `a = λ(z^N)`.
    pub fn cyclic_form(&self, g: &FiniteGroup) -> Option<CyclicForm> {
        let d = &self.descriptor;
        let n = d.relative_degree();
        let i = (0..self.reps.len()).find(|&i| n == 1 || mul_order(self.exps[i], d.m) == n)?;
        let z = self.reps[i];
        let zn = g.pow(z, n as i64);
        let a = CycloNumber::zeta(d.m, self.lam.exponent(zn)? as i64);
        let sigma = if d.m <= 2 { 1 } else { self.exps[i] };
        Some(CyclicForm { sigma, a, generator: g.label(z) })
    }
}

/// Realization maps along a strong inductive chain `H_0 < … < H_n = G`.
pub struct Tower<'a> {
    pub g: &'a FiniteGroup,
    pub lam: LinearCharacter,
    pub chain: InductiveChain,
    whole: Subgroup,
    gpow: Vec<usize>,
}

impl<'a> Tower<'a> {
    pub fn new(g: &'a FiniteGroup, lam: LinearCharacter, chain: InductiveChain) -> Self {
        let gpow = (0..lam.m).map(|j| g.pow(lam.generator, j as i64)).collect();
        Tower { g, lam, chain, whole: Subgroup::whole(g), gpow }
    }

    pub fn n(&self) -> usize {
        self.chain.len()
    }

    pub fn m(&self) -> u64 {
        self.lam.m
    }

    pub fn h(&self, i: usize) -> &Subgroup {
        if i == self.n() {
            &self.whole
        } else {
            &self.chain.levels[i].h
        }
    }

    pub fn e(&self, i: usize) -> &AlgElement {
        if i == self.n() {
            &self.chain.top_pci
        } else {
            &self.chain.levels[i].pci
        }
    }

    pub fn c(&self, i: usize) -> &Subgroup {
        &self.chain.levels[i].c
    }

    pub fn t(&self, i: usize) -> &[usize] {
        &self.chain.levels[i].transversal
    }

    /// `b` rewritten with conductor `m`.
    pub fn cyclo(&self, b: &CycloNumber) -> Result<CycloNumber> {
        let m = self.m();
        if m.is_multiple_of(b.conductor()) {
            Ok(b.lift(m))
        } else if let Some(r) = b.as_rational() {
            Ok(CycloNumber::rational(m, r))
        } else {
            Err(Error::NotInField(format!("Q(zeta_{m})")))
        }
    }

    /// `Σ c_j g^j · e_0` for `b = Σ c_j ζ^j`.
    pub fn to_alg(&self, b: &CycloNumber) -> Result<AlgElement> {
        let b = self.cyclo(b)?;
        let a = AlgElement::from_terms(b.coeffs().iter().enumerate().map(|(j, c)| (self.gpow[j], c.clone())));
        Ok(a.mul(self.g, self.e(0)))
    }

    /// `Σ c_h ζ^{λ(h)}` for `α` supported on `H_0`.
    pub fn to_cyclo(&self, a: &AlgElement) -> Result<CycloNumber> {
        let mut terms = Vec::with_capacity(a.support_len());
        for (&h, c) in a.terms() {
            let e = self.lam.exponent(h).ok_or_else(|| Error::Invariant("element leaves H_0".into()))?;
            terms.push((e as i64, c.clone()));
        }
        Ok(CycloNumber::from_exponents(self.m(), &terms))
    }

    /// `R_l(x) = Σ_{t∈T_l} t x t^-1`
    pub fn lift_level(&self, x: &AlgElement, l: usize) -> AlgElement {
        let t = self.t(l);
        if t.len() == 1 {
            return x.clone();
        }
        let mut out = AlgElement::zero();
        for &s in t {
            for (&y, c) in x.terms() {
                out.add_term(self.g.mul(self.g.mul(s, y), self.g.inv(s)), c);
            }
        }
        out
    }

    /// `R_{to-1} ∘ … ∘ R_from`
    pub fn realize(&self, x: &AlgElement, from: usize, to: usize) -> AlgElement {
        (from..to).fold(x.clone(), |acc, l| self.lift_level(&acc, l))
    }

    /// `R_{<upto}(β)`, an element of the center of `QH_upto · e_upto`.
    pub fn embed(&self, b: &CycloNumber, upto: usize) -> Result<AlgElement> {
        Ok(self.realize(&self.to_alg(b)?, 0, upto))
    }

    /// `β` with `R_{<upto}(β) = γ`, or an error when `γ` is not in the realized field.
    pub fn project(&self, gamma: &AlgElement, upto: usize) -> Result<CycloNumber> {
        let e0 = self.e(0);
        let d = e0.mul(self.g, gamma).mul(self.g, e0);
        let b = self.to_cyclo(&d)?;
        if self.embed(&b, upto)? != *gamma {
            return Err(Error::Invariant("element is not in the realized field".into()));
        }
        Ok(b)
    }

    /// `(e_l t_i^-1 a t_j e_l)_{ij}` for `a ∈ QH_{l+1} e_{l+1}`.
    pub fn matrix_image(&self, a: &AlgElement, l: usize) -> Vec<Vec<AlgElement>> {
        let (t, e) = (self.t(l), self.e(l));
        t.iter()
            .map(|&ti| {
                let left = e.right_mul(self.g, self.g.inv(ti)).mul(self.g, a);
                t.iter().map(|&tj| left.mul(self.g, &e.left_mul(self.g, tj))).collect()
            })
            .collect()
    }

    /// `Σ t_i M_ij t_j^-1`
    pub fn from_matrix(&self, mat: &[Vec<AlgElement>], l: usize) -> AlgElement {
        let t = self.t(l);
        let mut out = AlgElement::zero();
        for (i, row) in mat.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                out = out.add(&x.left_mul(self.g, t[i]).right_mul(self.g, self.g.inv(t[j])));
            }
        }
        out
    }

    /// Spanning set of `QH_i e_i` built level by level from `{g^j e_0}`.
    fn structural_basis(&self, i: usize, quotient_reps: &[Vec<usize>]) -> Vec<AlgElement> {
        let f = phi(self.m()) as usize;
        let e0 = self.e(0);
        let mut b: Vec<AlgElement> = (0..f).map(|j| e0.left_mul(self.g, self.gpow[j])).collect();
        for l in 0..i {
            let mut bc = Vec::with_capacity(b.len() * quotient_reps[l].len());
            for &c in &quotient_reps[l] {
                for x in &b {
                    bc.push(x.left_mul(self.g, c));
                }
            }
            let t = self.t(l);
            let mut next = Vec::with_capacity(bc.len() * t.len() * t.len());
            for &ta in t {
                for &tc in t {
                    for x in &bc {
                        next.push(x.left_mul(self.g, ta).right_mul(self.g, self.g.inv(tc)));
                    }
                }
            }
            b = next;
        }
        b
    }

    /// `E_{0l}` and `E_{l0}` of every lower level, realized in `QH_i`.
    fn lower_matrix_units(&self, i: usize) -> Vec<AlgElement> {
        let mut out = Vec::new();
        for j in 0..i {
            let t = self.t(j);
            let e = self.e(j);
            for &tl in &t[1..] {
                out.push(self.realize(&e.right_mul(self.g, self.g.inv(tl)), j + 1, i));
                out.push(self.realize(&e.left_mul(self.g, tl), j + 1, i));
            }
        }
        out
    }
}

/// Representatives of `C_i/H_i` with their Galois lifts and realized units.
#[derive(Clone, Debug)]
pub struct LevelUnits {
    pub reps: Vec<usize>,
    pub lifts: Vec<u64>,
    /// `x̄u ∈ QC_i e_i` per representative.
    pub local: Vec<AlgElement>,
    /// The same units realized in `QG e`.
    pub units: Vec<AlgElement>,
    /// Representatives are powers of one generator.
    pub cyclic: bool,
}

/// Component of a Shoda pair computed along a strong inductive chain.
pub struct Generalized<'a> {
    pub tower: Tower<'a>,
    pub levels: Vec<LevelUnits>,
    pub descriptor: Descriptor,
    /// Level tuple of each Galois exponent.
    pub tuples: BTreeMap<u64, Vec<usize>>,
    pub units: BTreeMap<u64, AlgElement>,
    inverses: BTreeMap<u64, AlgElement>,
}

fn mod_m(k: u64, m: u64) -> u64 {
    if m <= 2 {
        1
    } else {
        k % m
    }
}

fn generated(gens: &[u64], m: u64) -> BTreeSet<u64> {
    let mut set = BTreeSet::from([1u64]);
    let mut frontier = vec![1u64];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = mod_m(x * g, m);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set
}

impl<'a> Generalized<'a> {
    pub fn new(g: &'a FiniteGroup, lam: LinearCharacter, chain: InductiveChain) -> Result<Self> {
        let tower = Tower::new(g, lam, chain);
        let m = tower.m();
        let chi = galg::induce_character(g, &tower.lam, &tower.whole);
        let f = galg::character_field(&chi);
        let n = tower.n();
        let mut levels: Vec<LevelUnits> = Vec::with_capacity(n);
        let mut all_reps: Vec<Vec<usize>> = Vec::with_capacity(n);
        for i in 0..n {
            let below: Vec<u64> = levels.iter().flat_map(|l| l.lifts.iter().copied()).collect();
            let s_i = generated(&below, m);
            let (reps, cyclic) = match (i, grp::cyclic_quotient_data(g, tower.c(i), tower.h(i))?) {
                (0, _) | (_, None) => (grp::left_transversal(g, tower.h(i), tower.c(i)), false),
                (_, Some((x, o))) => ((0..o).map(|j| g.pow(x, j as i64)).collect(), true),
            };
            let mut lifts = Vec::with_capacity(reps.len());
            let mut local = Vec::with_capacity(reps.len());
            for (j, &x) in reps.iter().enumerate() {
                if j == 0 {
                    lifts.push(1);
                    local.push(tower.e(i).clone());
                    continue;
                }
                if cyclic && j > 1 {
                    lifts.push(mod_m(lifts[j - 1] * lifts[1], m));
                    local.push(local[j - 1].mul(g, &local[1]));
                    continue;
                }
                let k = if i == 0 {
                    let e = tower.lam.exponent(g.conj(tower.lam.generator, x)).ok_or(Error::NotShoda("C_0 does not normalize H_0".into()))?;
                    mod_m(e, m)
                } else {
                    choose_lift(&tower, i, x, &s_i, &f)?
                };
                lifts.push(k);
                local.push(if i == 0 { tower.e(0).left_mul(g, x) } else { solve_basis_unit(&tower, i, x, k, &all_reps)? });
            }
            let units = local.iter().map(|u| tower.realize(u, i, n)).collect();
            all_reps.push(reps.clone());
            levels.push(LevelUnits { reps, lifts, local, units, cyclic });
        }
        let mut tuples = BTreeMap::new();
        let mut units = BTreeMap::new();
        let top = tower.e(n).clone();
        let mut tuple = vec![0usize; n];
        loop {
            let mut s = 1u64;
            let mut z = top.clone();
            for (i, &r) in tuple.iter().enumerate() {
                s = mod_m(s * levels[i].lifts[r], m);
                if r != 0 {
                    z = z.mul(g, &levels[i].units[r]);
                }
            }
            if tuples.insert(s, tuple.clone()).is_some() {
                return Err(Error::Invariant("level lifts do not give distinct Galois elements".into()));
            }
            units.insert(s, z);
            if !next_tuple(&mut tuple, &levels.iter().map(|l| l.reps.len()).collect::<Vec<_>>()) {
                break;
            }
        }
        let fixing: Vec<u64> = tuples.keys().copied().collect();
        let f_expected = if m <= 2 { vec![1] } else { f.fixing.clone() };
        if fixing != f_expected {
            return Err(Error::Invariant("lifted Galois elements do not form Gal(E/F)".into()));
        }
        let matrix_degree = tower.chain.levels.iter().map(|l| l.k()).product();
        let mut out = Generalized {
            tower,
            levels,
            descriptor: Descriptor { m, f: FixedFieldSpec { conductor: m, fixing }, matrix_degree, tau: BTreeMap::new() },
            tuples,
            units,
            inverses: BTreeMap::new(),
        };
        for (&s, z) in &out.units {
            let inv = out.unit_inverse(z, s)?;
            out.inverses.insert(s, inv);
        }
        let gal = out.descriptor.f.fixing.clone();
        for &s in &gal {
            for &r in &gal {
                let sr = mod_m(s * r, m);
                let prod = out.inverses[&sr].mul(g, &out.units[&s]).mul(g, &out.units[&r]);
                let t = out.tower.project(&prod, n)?;
                out.descriptor.tau.insert((s, r), t);
            }
        }
        Ok(out)
    }

    /// `Z^-1 = Z^{d-1}·R(β^-1)` where `Z^d = R(β)` and `d` is the order of `σ`.
    fn unit_inverse(&self, z: &AlgElement, sigma: u64) -> Result<AlgElement> {
        let d = mul_order(sigma, self.tower.m().max(1));
        let n = self.tower.n();
        let zd1 = z.pow(self.tower.g, d - 1);
        let zd = zd1.mul(self.tower.g, z);
        let beta = self.tower.project(&zd, n)?;
        let bi = beta.inverse().ok_or_else(|| Error::Invariant("unit power vanishes".into()))?;
        Ok(zd1.mul(self.tower.g, &self.tower.embed(&bi, n)?))
    }

    pub fn unit(&self, sigma: u64) -> &AlgElement {
        &self.units[&sigma]
    }

    pub fn unit_inv(&self, sigma: u64) -> &AlgElement {
        &self.inverses[&sigma]
    }

    /// Lex-least level tuple whose Galois element generates `Gal(E/F)`.
    pub fn generator_tuple(&self) -> Option<(u64, Vec<usize>)> {
        let n = self.descriptor.relative_degree();
        let m = self.tower.m();
        let mut best: Option<(u64, Vec<usize>)> = None;
        for (&s, t) in &self.tuples {
            if (n == 1 || mul_order(s, m) == n) && best.as_ref().is_none_or(|(_, b)| t < b) {
                best = Some((s, t.clone()));
            }
        }
        best
    }

    fn describe_tuple(&self, t: &[usize]) -> String {
        let parts: Vec<String> = t
            .iter()
            .enumerate()
            .filter(|(_, &r)| r != 0)
            .map(|(i, &r)| if self.levels[i].cyclic { format!("z_{}^{}", self.tower.g.label(self.levels[i].reps[1]), r) } else { format!("z_{}", self.tower.g.label(self.levels[i].reps[r])) })
            .collect();
        if parts.is_empty() {
            "e".into()
        } else {
            parts.join("*")
        }
    }

    /// Cyclic form with `a` computed from `τ`, from the direct power and, when the stage
    /// recursion applies, from [`staged_power`]; all available values must agree.
    pub fn cyclic_form(&self) -> Result<Option<(CyclicForm, Option<StagedPower>)>> {
        let Some((sigma, tuple)) = self.generator_tuple() else {
            return Ok(None);
        };
        let g = self.tower.g;
        let n = self.tower.n();
        let big_n = self.descriptor.relative_degree();
        let a_tau = self.descriptor.a_from_tau(sigma);
        let z = &self.units[&sigma];
        let a_direct = self.tower.project(&z.pow(g, big_n), n)?;
        if a_tau != a_direct {
            return Err(Error::Invariant("a from the cocycle differs from the direct power".into()));
        }
        let staged = if n > 0 {
            let top = n - 1;
            let a0 = self.levels[top].reps[tuple[top]];
            let orders: Vec<usize> = self.levels.iter().map(|l| l.reps.len()).collect();
            match staged_power(&self.tower, z, a0, &orders) {
                Ok(sp) => {
                    let ab = sp.b.left_mul(g, sp.a);
                    if self.tower.to_cyclo(&ab)? != a_direct {
                        return Err(Error::Invariant("staged power differs from the direct power".into()));
                    }
                    Some(sp)
                }
                Err(_) => None,
            }
        } else {
            None
        };
        Ok(Some((CyclicForm { sigma, a: a_direct, generator: self.describe_tuple(&tuple) }, staged)))
    }
}

fn next_tuple(t: &mut [usize], sizes: &[usize]) -> bool {
    for i in (0..t.len()).rev() {
        t[i] += 1;
        if t[i] < sizes[i] {
            return true;
        }
        t[i] = 0;
    }
    false
}

/// Galois lift of conjugation by `x` on the realized field `E_i`: among exponents in
/// `Gal(E/F)` acting correctly on every Gauss period of `S_i`, the one of largest order, then
/// the least.
fn choose_lift(tower: &Tower, i: usize, x: usize, s_i: &BTreeSet<u64>, f: &FixedFieldSpec) -> Result<u64> {
    let m = tower.m();
    let g = tower.g;
    let mut periods: Vec<CycloNumber> = Vec::new();
    for j in 0..m.max(1) {
        let terms: Vec<(i64, Q)> = s_i.iter().map(|&s| ((j * s) as i64, Q::one())).collect();
        let p = CycloNumber::from_exponents(m, &terms);
        if !periods.contains(&p) {
            periods.push(p);
        }
    }
    let realized: Vec<(AlgElement, &CycloNumber)> = periods.iter().map(|p| Ok((tower.embed(p, i)?.conj(g, x), p))).collect::<Result<_>>()?;
    let mut best: Option<(u64, u64)> = None;
    for &k in &f.fixing {
        let ok = realized.iter().all(|(lhs, p)| tower.embed(&p.galois(k as i64).unwrap(), i).is_ok_and(|r| r == *lhs));
        if ok {
            let o = mul_order(k, m.max(1));
            if best.is_none_or(|(bo, _)| o > bo) {
                best = Some((o, k));
            }
        }
    }
    best.map(|(_, k)| mod_m(k, m)).ok_or_else(|| Error::Invariant("no Galois lift for a level representative".into()))
}

/// `x̄u ∈ QC_i e_i` with `u ∈ QH_i e_i`, commuting with the lower matrix units and with
/// `α·x̄u = x̄u·σ_k(α)` on the realized field.
pub fn solve_basis_unit(tower: &Tower, i: usize, x: usize, k: u64, quotient_reps: &[Vec<usize>]) -> Result<AlgElement> {
    let g = tower.g;
    let m = tower.m();
    let alpha = tower.embed(&CycloNumber::zeta(m, 1), i)?;
    let alpha_k = tower.embed(&CycloNumber::zeta(m, k as i64), i)?;
    let mus = tower.lower_matrix_units(i);
    let constraint = |y: &AlgElement| -> Vec<AlgElement> {
        let mut out = vec![alpha.mul(g, y).sub(&y.mul(g, &alpha_k))];
        for u in &mus {
            out.push(u.mul(g, y).sub(&y.mul(g, u)));
        }
        out
    };
    let basis = tower.structural_basis(i, quotient_reps);
    let ncols = basis.len();
    let mut rows: BTreeMap<(usize, usize), Vec<Q>> = BTreeMap::new();
    for (col, b) in basis.iter().enumerate() {
        for (ci, img) in constraint(&b.left_mul(g, x)).into_iter().enumerate() {
            for (&y, c) in img.terms() {
                rows.entry((ci, y)).or_insert_with(|| vec![Q::zero(); ncols])[col] = c.clone();
            }
        }
    }
    let rows: Vec<Vec<Q>> = rows.into_values().collect();
    let combine = |v: &[Q]| {
        let mut u = AlgElement::zero();
        for (c, b) in v.iter().zip(&basis) {
            if !c.is_zero() {
                u = u.add(&b.scale(c));
            }
        }
        u.left_mul(g, x)
    };
    let satisfies = |y: &AlgElement| !y.is_zero() && constraint(y).iter().all(|c| c.is_zero());
    let mut ns = linalg::nullspace_selected(&rows, ncols);
    let mut cand = ns.first().map(|v| combine(v));
    if !cand.as_ref().is_some_and(&satisfies) {
        ns = linalg::nullspace(&rows, ncols);
        cand = ns.first().map(|v| combine(v));
    }
    if ns.len() != phi(m) as usize {
        return Err(Error::Invariant(format!("unit space has dimension {}, expected {}", ns.len(), phi(m))));
    }
    cand.filter(|y| satisfies(y)).ok_or_else(|| Error::Invariant("no basis unit".into()))
}

/// One stage of the power recursion.
#[derive(Clone, Debug)]
pub struct Stage {
    pub level: usize,
    pub d: usize,
    pub s: usize,
    /// `Y = s·X·f`
    pub y: AlgElement,
    pub a: usize,
    pub b: AlgElement,
}

/// `z^P e_0 = a·b` with `P` the product of the quotient orders, reached level by level.
#[derive(Clone, Debug)]
pub struct StagedPower {
    pub power: u64,
    pub stages: Vec<Stage>,
    pub a: usize,
    pub b: AlgElement,
}

/// Stage recursion for `z^P`: at level `j` with `z^{P_j} = a·b`, find the least `d` with
/// `a^-d f a^d = s^-1 f s` (`f = e_{j-1}`, `s` over the inverse transversal), set
/// `X = ∏_{i=d-1..0} a^-i b a^i`, `Y = sXf`, `c = a^d s^-1`, and continue with
/// `a' = c^{o/d}`, `b' = ∏_{k=o/d-1..0} c^-k Y c^k`.
pub fn staged_power(tower: &Tower, z: &AlgElement, a0: usize, orders: &[usize]) -> Result<StagedPower> {
    let g = tower.g;
    let n = tower.n();
    if n == 0 || orders.len() != n {
        return Err(Error::Invariant("staged power needs one order per level".into()));
    }
    let mut a = a0;
    let mut b = z.mul(g, tower.e(n - 1)).left_mul(g, g.inv(a0));
    let mut stages = Vec::with_capacity(n);
    for j in (0..n).rev() {
        let o = orders[j];
        let (f, s_set): (&AlgElement, Vec<usize>) =
            if j > 0 { (tower.e(j - 1), tower.t(j - 1).iter().map(|&t| g.inv(t)).collect()) } else { (tower.e(0), vec![0]) };
        let conj_f: Vec<AlgElement> = s_set.iter().map(|&s| f.conj(g, s)).collect();
        let mut found = None;
        for d in 1..=o {
            let fd = f.conj(g, g.pow(a, d as i64));
            if let Some(idx) = conj_f.iter().position(|c| *c == fd) {
                found = Some((d, s_set[idx]));
                break;
            }
        }
        let (d, s) = found.ok_or_else(|| Error::Invariant(format!("no stage exponent at level {j}")))?;
        if !o.is_multiple_of(d) {
            return Err(Error::Invariant(format!("stage exponent {d} does not divide {o}")));
        }
        let mut x = AlgElement::one();
        for i in (0..d).rev() {
            x = x.mul(g, &b.conj(g, g.pow(a, i as i64)));
        }
        let y = x.left_mul(g, s).mul(g, f);
        let c = g.mul(g.pow(a, d as i64), g.inv(s));
        let r = o / d;
        let mut bn = AlgElement::one();
        for k in (0..r).rev() {
            bn = bn.mul(g, &y.conj(g, g.pow(c, k as i64)));
        }
        a = g.pow(c, r as i64);
        if j > 0 && !tower.c(j - 1).contains(a) {
            return Err(Error::Invariant(format!("stage element leaves C_{}", j - 1)));
        }
        b = bn;
        stages.push(Stage { level: j, d, s, y, a, b: b.clone() });
    }
    Ok(StagedPower { power: orders.iter().map(|&o| o as u64).product(), stages, a, b })
}
