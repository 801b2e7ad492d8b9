//! Bounds on the Schur index of a component.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, Q};
use crate::cyclo::{
    self, fixed_field, hilbert_symbol_rational, quadratic_discriminant_of, quadratic_generator, quadratic_splitting, relevant_places,
    sign_at_embedding, FixedFieldSpec, Place, Splitting,
};
use crate::error::{Error, Result};
use crate::simple::{CyclicForm, Descriptor};

/// Search limits for norm witnesses.
#[derive(Clone, Copy, Debug)]
pub struct NormLimits {
    pub height: u64,
    pub den_bound: u64,
    pub budget: u64,
}

impl Default for NormLimits {
    fn default() -> Self {
        NormLimits { height: 4, den_bound: 2, budget: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchurBounds {
    pub lower: u64,
    pub upper: u64,
    pub certificates: Vec<String>,
}

impl SchurBounds {
    pub fn index(&self) -> Option<u64> {
        (self.lower == self.upper).then_some(self.lower)
    }
}

/// Rational `c` with `c^n = r`.
fn rational_root(r: &Q, n: u64) -> Option<Q> {
    let root = |x: &BigInt| -> Option<BigInt> {
        let s = x.abs().nth_root(n as u32);
        (num_traits::pow(s.clone(), n as usize) == x.abs()).then_some(s)
    };
    if r.is_negative() && n.is_multiple_of(2) {
        return None;
    }
    let (p, q) = (root(r.numer())?, root(r.denom())?);
    let c = Q::new(p, q);
    Some(if r.is_negative() { -c } else { c })
}

/// Apply the rules in order:
///
/// * R1: `E = F`, `τ ≡ 1` or `a = 1` give index 1;
/// * R2: the least `d | [E:F]` with `a^d` a norm from `E` bounds the index from above;
/// * R3: `F` real, `E` complex and `a < 0` at a real place force index at least 2;
/// * R4: for the quadratic subextension `E' = F(√c)` fixed by `σ²`, a place `v` of `Q` splitting in
///   `F` with `(c, a)_v = -1` forces index at least 2 (`F = Q` or quadratic, `a` rational).
pub fn schur_bounds(desc: &Descriptor, cyclic: Option<&CyclicForm>, limits: NormLimits) -> Result<SchurBounds> {
    let n = desc.relative_degree();
    if n == 1 {
        return Ok(SchurBounds { lower: 1, upper: 1, certificates: vec!["R1: E = F".into()] });
    }
    if desc.tau_trivial() {
        return Ok(SchurBounds { lower: 1, upper: 1, certificates: vec!["R1: trivial cocycle".into()] });
    }
    let Some(cf) = cyclic else {
        return Ok(SchurBounds {
            lower: 1,
            upper: n,
            certificates: vec![format!("no rule applies to a non-cyclic Galois group; the index divides [E:F] = {n}")],
        });
    };
    cyclic_bounds(desc.m, &desc.f, cf, limits)
}

pub fn cyclic_bounds(m: u64, f: &FixedFieldSpec, cf: &CyclicForm, limits: NormLimits) -> Result<SchurBounds> {
    let n = f.fixing.len() as u64;
    let a = &cf.a;
    if a.as_rational().is_some_and(|r| r.is_one()) {
        return Ok(SchurBounds { lower: 1, upper: 1, certificates: vec!["R1: a = 1".into()] });
    }
    let e = FixedFieldSpec::full(m);
    let mut certs = Vec::new();
    let mut upper = n;
    for d in divisors(n) {
        if d == n {
            certs.push(format!("R2: a^{n} = N(a), so the index divides {n}"));
            break;
        }
        let ad = a.pow(d);
        if let Some(c) = ad.as_rational().and_then(|r| rational_root(&r, n)) {
            upper = d;
            certs.push(format!("R2: a^{d} = {c}^{n} = N({c}); Brauer exponent equals Schur index over number fields"));
            break;
        }
        let s = cyclo::norm_witness_search(&ad, &e, f, limits.height, limits.den_bound, limits.budget)?;
        if let Some(w) = s.witness {
            upper = d;
            certs.push(format!("R2: a^{d} = N({w}); Brauer exponent equals Schur index over number fields"));
            break;
        }
        certs.push(format!(
            "R2: no norm witness for a^{d} ({} candidates, {})",
            s.examined,
            if s.exhausted { "search space exhausted" } else { "budget reached" }
        ));
    }
    let mut lower = 1;
    if f.is_real() && m > 2 {
        if let Some(k) = f.embedding_reps().into_iter().find(|&k| sign_at_embedding(a, k).is_lt()) {
            lower = 2;
            certs.push(format!("R3: F is real, E is complex and a < 0 at the embedding zeta -> zeta^{k}"));
        }
    }
    if lower < 2 && n.is_multiple_of(2) {
        if let Some(cert) = rule4(m, f, cf)? {
            lower = 2;
            certs.push(cert);
        }
    }
    if lower > upper {
        return Err(Error::Invariant(format!("Schur bounds cross: {lower} > {upper}")));
    }
    Ok(SchurBounds { lower, upper, certificates: certs })
}

fn rule4(m: u64, f: &FixedFieldSpec, cf: &CyclicForm) -> Result<Option<String>> {
    let Some(a) = cf.a.as_rational() else {
        return Ok(None);
    };
    let fd = match f.degree() {
        1 => None,
        2 => quadratic_discriminant_of(f),
        _ => return Ok(None),
    };
    if f.degree() == 2 && fd.is_none() {
        return Ok(None);
    }
    let s2 = if m <= 2 { 1 } else { cf.sigma * cf.sigma % m };
    let e2 = fixed_field(m, &[s2]);
    let Some(c) = quadratic_generator(&e2, f) else {
        return Ok(None);
    };
    let cq = Q::from_integer(BigInt::from(c));
    for v in relevant_places(&cq, &a) {
        if hilbert_symbol_rational(&cq, &a, v)? != -1 {
            continue;
        }
        let splits = match fd {
            None => true,
            Some(d) => quadratic_splitting(d, v) == Splitting::Split,
        };
        if splits {
            let where_ = match (v, fd) {
                (_, None) => "F = Q".to_string(),
                (Place::Infinite, Some(d)) => format!("infinity splits in Q(sqrt({d}))"),
                (Place::Prime(p), Some(d)) => format!("{p} splits in Q(sqrt({d}))"),
            };
            return Ok(Some(format!("R4: E' = F(sqrt({c})), ({c}, {a})_{v} = -1 and {where_}")));
        }
    }
    Ok(None)
}

/// `M_{k[E:F]/s}(D)` once the index `s` is known.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedForm {
    pub matrix_size: u64,
    pub division_index: u64,
    pub center: String,
    pub text: String,
}

pub fn reduced_form(desc: &Descriptor, index: u64) -> ReducedForm {
    let size = desc.matrix_degree as u64 * desc.relative_degree() / index;
    let center = desc.f.describe();
    let field = if desc.relative_degree() == 1 { FixedFieldSpec::full(desc.m).describe() } else { center.clone() };
    let d = match index {
        1 => field,
        2 => format!("H({center})"),
        s => format!("D_{s}({center})"),
    };
    let text = if size == 1 { d } else { format!("M_{size}({d})") };
    ReducedForm { matrix_size: size, division_index: index, center, text }
}
