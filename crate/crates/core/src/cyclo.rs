//! Exact arithmetic in cyclotomic fields, Galois actions, subfields, norms and Hilbert symbols.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, gcd, lcm, mul_order, phi, q, ramanujan, squarefree, units, Q};
use crate::error::{Error, Result};

pub const MAX_CONDUCTOR: u64 = 4096;

type PowerTable = Arc<Vec<Vec<i64>>>;

fn cyclotomic_poly(n: u64) -> Vec<i64> {
    // x^n - 1 divided by every Φ_d with d | n, d < n.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        let den = cyclotomic_poly(d);
        let mut rem = num.clone();
        let dd = den.len() - 1;
        let mut quo = vec![0i64; rem.len() - dd];
        for i in (0..quo.len()).rev() {
            let c = rem[i + dd];
            quo[i] = c;
            for (j, &dc) in den.iter().enumerate() {
                rem[i + j] -= c * dc;
            }
        }
        num = quo;
    }
    num
}

/// `ζ_n^j` in the power basis, for `j` in `0..n`.
fn powers(n: u64) -> PowerTable {
    static CACHE: OnceLock<Mutex<HashMap<u64, PowerTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&n) {
        return t.clone();
    }
    let poly = cyclotomic_poly(n);
    let f = poly.len() - 1;
    let mut out = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; f];
    cur[0] = 1;
    for _ in 0..n {
        out.push(cur.clone());
        // multiply by x
        let top = cur[f - 1];
        let mut next = vec![0i64; f];
        next[1..f].copy_from_slice(&cur[..f - 1]);
        for j in 0..f {
            next[j] -= top * poly[j];
        }
        cur = next;
    }
    let t = Arc::new(out);
    cache.lock().unwrap().insert(n, t.clone());
    t
}

/// Element of `Q(ζ_n)` in the power basis modulo `Φ_n`.
#[derive(Clone, Debug)]
pub struct CycloNumber {
    n: u64,
    c: Vec<Q>,
}

impl CycloNumber {
    pub fn new(n: u64, c: Vec<Q>) -> Result<Self> {
        check_conductor(n)?;
        if c.len() as u64 != phi(n) {
            return Err(Error::Parse(format!("conductor {n} needs {} coefficients, got {}", phi(n), c.len())));
        }
        Ok(CycloNumber { n, c })
    }

    pub fn zero(n: u64) -> Self {
        CycloNumber { n, c: vec![Q::zero(); phi(n) as usize] }
    }

    pub fn rational(n: u64, r: Q) -> Self {
        let mut z = Self::zero(n);
        z.c[0] = r;
        z
    }

    pub fn one(n: u64) -> Self {
        Self::rational(n, Q::one())
    }

    /// `ζ_n^j`
    pub fn zeta(n: u64, j: i64) -> Self {
        Self::from_exponents(n, &[(j, Q::one())])
    }

    /// `Σ c ζ_n^j` over the given `(j, c)`.
    pub fn from_exponents(n: u64, terms: &[(i64, Q)]) -> Self {
        let mut acc = vec![Q::zero(); n as usize];
        for (j, c) in terms {
            acc[j.rem_euclid(n as i64) as usize] += c;
        }
        Self::from_acc(n, acc)
    }

    /// `Σ counts[j] ζ_n^j`
    pub fn from_counts(n: u64, counts: &[i64]) -> Self {
        let p = powers(n);
        let f = phi(n) as usize;
        let mut c = vec![0i64; f];
        for (j, &k) in counts.iter().enumerate() {
            if k != 0 {
                for (x, &pv) in c.iter_mut().zip(&p[j % n as usize]) {
                    *x += k * pv;
                }
            }
        }
        CycloNumber { n, c: c.into_iter().map(q).collect() }
    }

    fn from_acc(n: u64, acc: Vec<Q>) -> Self {
        let p = powers(n);
        let f = phi(n) as usize;
        let mut c = vec![Q::zero(); f];
        for (j, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (x, &pv) in c.iter_mut().zip(&p[j]) {
                if pv != 0 {
                    *x += a * Q::from_integer(pv.into());
                }
            }
        }
        CycloNumber { n, c }
    }

    pub fn conductor(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.c.iter().skip(1).all(Zero::is_zero) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    /// Same number written over `Q(ζ_l)`; `l` must be a multiple of the conductor.
    pub fn lift(&self, l: u64) -> Self {
        if l == self.n {
            return self.clone();
        }
        assert!(l.is_multiple_of(self.n), "lift to non-multiple conductor");
        let s = l / self.n;
        let mut acc = vec![Q::zero(); l as usize];
        for (j, a) in self.c.iter().enumerate() {
            acc[j * s as usize] = a.clone();
        }
        Self::from_acc(l, acc)
    }

    fn common(&self, o: &Self) -> (Self, Self) {
        let l = lcm(self.n, o.n);
        (self.lift(l), o.lift(l))
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        CycloNumber { n: a.n, c: a.c.iter().zip(&b.c).map(|(x, y)| x + y).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        CycloNumber { n: a.n, c: a.c.iter().zip(&b.c).map(|(x, y)| x - y).collect() }
    }

    pub fn neg(&self) -> Self {
        CycloNumber { n: self.n, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, r: &Q) -> Self {
        CycloNumber { n: self.n, c: self.c.iter().map(|x| x * r).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        let n = a.n as usize;
        let mut acc = vec![Q::zero(); n];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if !y.is_zero() {
                    acc[(i + j) % n] += x * y;
                }
            }
        }
        Self::from_acc(a.n, acc)
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut r = Self::one(self.n);
        let mut b = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        r
    }

    /// `ζ ↦ ζ^k`
    pub fn galois(&self, k: i64) -> Result<Self> {
        let n = self.n as i64;
        if gcd(k.rem_euclid(n) as u64, self.n) != 1 {
            return Err(Error::NotUnit { k, n: self.n });
        }
        let mut acc = vec![Q::zero(); self.n as usize];
        for (j, a) in self.c.iter().enumerate() {
            acc[(j as i64 * k).rem_euclid(n) as usize] += a;
        }
        Ok(Self::from_acc(self.n, acc))
    }

    /// Norm down to `Q`.
    pub fn norm(&self) -> Q {
        let mut p = Self::one(self.n);
        for k in units(self.n) {
            p = p.mul(&self.galois(k as i64).unwrap());
        }
        p.as_rational().expect("norm is rational")
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut p = Self::one(self.n);
        for k in units(self.n).into_iter().skip(1) {
            p = p.mul(&self.galois(k as i64).unwrap());
        }
        let nrm = self.mul(&p).as_rational().expect("norm is rational");
        Some(p.scale(&(Q::one() / nrm)))
    }

    /// Trace down to `Q`.
    pub fn trace(&self) -> Q {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(j, a)| a * q(ramanujan(self.n, j as u64)))
            .sum()
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Self {
        self.galois(-1).unwrap()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CycloJson::from(self)).unwrap()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: CycloJson = serde_json::from_str(s)?;
        j.try_into()
    }
}

impl PartialEq for CycloNumber {
    fn eq(&self, o: &Self) -> bool {
        let (a, b) = self.common(o);
        a.c == b.c
    }
}
impl Eq for CycloNumber {}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (j, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            parts.push(match j {
                0 => format!("{a}"),
                1 => format!("{a}*z{}", self.n),
                _ => format!("{a}*z{}^{j}", self.n),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn check_conductor(n: u64) -> Result<()> {
    if n == 0 || n > MAX_CONDUCTOR {
        return Err(Error::Parse(format!("conductor {n} outside 1..={MAX_CONDUCTOR}")));
    }
    Ok(())
}

pub fn parse_rational(s: &str) -> Result<Q> {
    let t = s.trim();
    if t.len() > 200 {
        return Err(Error::Parse("rational literal too long".into()));
    }
    Q::from_str(t).map_err(|_| Error::Parse(format!("bad rational {s:?}")))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CycloJson {
    conductor: u64,
    coeffs: Vec<String>,
}

impl From<&CycloNumber> for CycloJson {
    fn from(c: &CycloNumber) -> Self {
        CycloJson { conductor: c.n, coeffs: c.c.iter().map(|x| x.to_string()).collect() }
    }
}

impl TryFrom<CycloJson> for CycloNumber {
    type Error = Error;
    fn try_from(j: CycloJson) -> Result<Self> {
        check_conductor(j.conductor)?;
        let c = j.coeffs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        CycloNumber::new(j.conductor, c)
    }
}

impl Serialize for CycloNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CycloJson::deserialize(d)?;
        j.try_into().map_err(serde::de::Error::custom)
    }
}

/// `σ_k : ζ_n ↦ ζ_n^k`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GaloisElement {
    pub conductor: u64,
    pub exponent: u64,
}

impl GaloisElement {
    pub fn new(conductor: u64, k: i64) -> Result<Self> {
        let e = k.rem_euclid(conductor as i64) as u64;
        if conductor > 1 && gcd(e, conductor) != 1 {
            return Err(Error::NotUnit { k, n: conductor });
        }
        Ok(GaloisElement { conductor, exponent: if conductor <= 2 { 1 } else { e } })
    }
    pub fn compose(&self, o: &Self) -> Self {
        if self.conductor <= 2 {
            return *self;
        }
        GaloisElement { conductor: self.conductor, exponent: self.exponent * o.exponent % self.conductor }
    }
    pub fn order(&self) -> u64 {
        mul_order(self.exponent, self.conductor)
    }
}

pub fn galois_apply(k: i64, a: &CycloNumber) -> Result<CycloNumber> {
    a.galois(k)
}

/// Subfield of `Q(ζ_n)` given by the subgroup of `(Z/n)^*` fixing it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedFieldSpec {
    pub conductor: u64,
    pub fixing: Vec<u64>,
}

impl FixedFieldSpec {
    pub fn full(n: u64) -> Self {
        FixedFieldSpec { conductor: n, fixing: vec![1] }
    }

    pub fn degree(&self) -> u64 {
        phi(self.conductor) / self.fixing.len() as u64
    }

    pub fn fixes(&self, k: u64) -> bool {
        self.fixing.binary_search(&(k % self.conductor.max(1))).is_ok() || self.conductor == 1
    }

    pub fn is_real(&self) -> bool {
        self.conductor <= 2 || self.fixes(self.conductor - 1)
    }

    /// Preimage of the fixing group in `(Z/l)^*`.
    pub fn lift(&self, l: u64) -> Self {
        assert!(l.is_multiple_of(self.conductor));
        let fixing = units(l).into_iter().filter(|&k| self.fixes(k % self.conductor)).collect();
        FixedFieldSpec { conductor: l, fixing }
    }

    pub fn is_subfield_of(&self, o: &Self) -> bool {
        let l = lcm(self.conductor, o.conductor);
        let (a, b) = (self.lift(l), o.lift(l));
        b.fixing.iter().all(|k| a.fixes(*k))
    }

    /// Representatives of `(Z/n)^* / fixing`, i.e. the embeddings, least first.
    pub fn embedding_reps(&self) -> Vec<u64> {
        let mut seen = std::collections::BTreeSet::new();
        let mut reps = Vec::new();
        for k in units(self.conductor) {
            if seen.contains(&k) {
                continue;
            }
            reps.push(k);
            for &s in &self.fixing {
                seen.insert(k * s % self.conductor.max(1));
            }
        }
        reps
    }

    pub fn validate(&self) -> Result<()> {
        check_conductor(self.conductor)?;
        let n = self.conductor;
        let u = units(n);
        let mulmod = |a: u64, b: u64| if n <= 2 { 1 } else { a * b % n };
        let f = &self.fixing;
        let ok = f.windows(2).all(|w| w[0] < w[1])
            && f.first() == Some(&1)
            && f.iter().all(|k| u.contains(k))
            && f.iter().all(|&a| f.iter().all(|&b| f.binary_search(&mulmod(a, b)).is_ok()));
        if !ok {
            return Err(Error::Parse("fixing set is not a sorted subgroup of (Z/n)^*".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: FixedFieldSpec = serde_json::from_str(s)?;
        f.validate()?;
        Ok(f)
    }

    /// Human name: `Q`, `Q(sqrt(d))`, `Q(zeta_n)` or `Q(zeta_n)^<gens>`.
    pub fn describe(&self) -> String {
        if self.degree() == 1 {
            return "Q".into();
        }
        if let Some(d) = quadratic_discriminant_of(self) {
            return format!("Q(sqrt({d}))");
        }
        let base = if self.conductor % 4 == 2 { self.conductor / 2 } else { self.conductor };
        if self.fixing.len() == 1 {
            return format!("Q(zeta_{base})");
        }
        if self.is_real() && self.fixing.len() == 2 {
            return format!("Q(zeta_{base})^+");
        }
        format!("Q(zeta_{})^<{}>", self.conductor, subgroup_gens(&self.fixing, self.conductor).iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","))
    }
}

fn subgroup_gens(s: &[u64], n: u64) -> Vec<u64> {
    let mut cur = vec![1u64];
    let mut gens = Vec::new();
    for &k in s {
        if !cur.contains(&k) {
            gens.push(k);
            cur = fixed_field(n, &gens).fixing;
        }
    }
    gens
}

/// Fixed field of the subgroup generated by `gens`.
pub fn fixed_field(n: u64, gens: &[u64]) -> FixedFieldSpec {
    let mut set = vec![1 % n.max(2)];
    if n == 1 {
        set = vec![1];
    }
    let mut i = 0;
    while i < set.len() {
        for &g in gens {
            let p = if n == 1 { 1 } else { set[i] * (g % n) % n };
            if !set.contains(&p) {
                set.push(p);
            }
        }
        i += 1;
    }
    set.sort_unstable();
    FixedFieldSpec { conductor: n, fixing: set }
}

pub fn is_fixed(a: &CycloNumber, f: &FixedFieldSpec) -> bool {
    let l = lcm(a.conductor(), f.conductor);
    let (a, f) = (a.lift(l), f.lift(l));
    f.fixing.iter().all(|&k| a.galois(k as i64).unwrap() == a)
}

/// `N_{E/F}(a)` as the product of `σ(a)` over representatives of `Fix(E)` in `Fix(F)`.
pub fn relative_norm(a: &CycloNumber, e: &FixedFieldSpec, f: &FixedFieldSpec) -> Result<CycloNumber> {
    if !is_fixed(a, e) {
        return Err(Error::NotInField(e.describe()));
    }
    let l = lcm(lcm(a.conductor(), e.conductor), f.conductor);
    let (a, e, f) = (a.lift(l), e.lift(l), f.lift(l));
    if !f.is_subfield_of(&e) {
        return Err(Error::Invariant("relative norm needs F inside E".into()));
    }
    let reps = coset_reps(&e.fixing, &f.fixing, l);
    let mut p = CycloNumber::one(l);
    for r in reps {
        p = p.mul(&a.galois(r as i64)?);
    }
    Ok(p)
}

/// Representatives of the cosets of `small` in `big`, least first.
pub fn coset_reps(small: &[u64], big: &[u64], n: u64) -> Vec<u64> {
    let mut seen = std::collections::BTreeSet::new();
    let mut reps = Vec::new();
    for &k in big {
        if seen.contains(&k) {
            continue;
        }
        reps.push(k);
        for &s in small {
            seen.insert(k * s % n.max(1));
        }
    }
    reps
}

/// Candidate values `c/d` with `|c| <= height`, `d | den_bound`, ordered by size then sign.
pub fn witness_values(height: u64, den_bound: u64) -> Vec<Q> {
    let mut v: Vec<Q> = Vec::new();
    for d in (1..=den_bound).filter(|d| den_bound.is_multiple_of(*d)) {
        for c in 1..=height as i64 {
            for s in [1, -1] {
                let x = Q::new(BigInt::from(s * c), BigInt::from(d));
                if !v.contains(&x) {
                    v.push(x);
                }
            }
        }
    }
    v.sort_by(|a, b| a.abs().cmp(&b.abs()).then(b.cmp(a)));
    v
}

/// Outcome of a bounded norm-equation search.
#[derive(Clone, Debug)]
pub struct NormSearch {
    pub witness: Option<CycloNumber>,
    pub examined: u64,
    pub exhausted: bool,
}

/// First `c ∈ E` with `N_{E/F}(c) = target`, enumerating power-basis coefficient vectors by
/// support size, then support positions, then values in [`witness_values`] order.
pub fn norm_witness_search(
    target: &CycloNumber,
    e: &FixedFieldSpec,
    f: &FixedFieldSpec,
    height: u64,
    den_bound: u64,
    budget: u64,
) -> Result<NormSearch> {
    let n = lcm(lcm(target.conductor(), e.conductor), f.conductor);
    let (e, f) = (e.lift(n), f.lift(n));
    let target = target.lift(n);
    let reps = coset_reps(&e.fixing, &f.fixing, n);
    let deg = reps.len() as u32;
    let dim = phi(n) as usize;
    let vals = witness_values(height, den_bound);
    let scale = BigInt::from(den_bound);
    let scaled_vals: Vec<i128> = vals.iter().map(|v| (v * Q::from_integer(scale.clone())).to_integer().to_i128().unwrap()).collect();
    let tscale = Q::from_integer(scale.pow(deg));
    let mut tgt = Vec::with_capacity(dim);
    for c in target.coeffs() {
        let t = c * &tscale;
        if !t.is_integer() {
            return Ok(NormSearch { witness: None, examined: 0, exhausted: true });
        }
        match t.to_integer().to_i128() {
            Some(v) => tgt.push(v),
            None => return Ok(NormSearch { witness: None, examined: 0, exhausted: true }),
        }
    }
    let pt = powers(n);
    let ctx = IntCtx { n: n as usize, dim, pt: &pt };
    let e_gens = subgroup_gens(&e.fixing, n);
    let mut examined = 0u64;
    for support in 1..=dim {
        let mut pos: Vec<usize> = (0..support).collect();
        loop {
            let mut idx = vec![0usize; support];
            loop {
                if examined >= budget {
                    return Ok(NormSearch { witness: None, examined, exhausted: false });
                }
                examined += 1;
                let mut y = vec![0i128; dim];
                for (p, &i) in pos.iter().zip(&idx) {
                    y[*p] = scaled_vals[i];
                }
                let in_e = e_gens.iter().all(|&g| ctx.galois(&y, g) == y);
                if in_e {
                    let mut prod = ctx.one();
                    for &r in &reps {
                        prod = ctx.mul(&prod, &ctx.galois(&y, r));
                    }
                    if prod == tgt {
                        let c: Vec<Q> = y.iter().map(|&v| Q::new(BigInt::from(v), scale.clone())).collect();
                        return Ok(NormSearch { witness: Some(CycloNumber::new(n, c)?), examined, exhausted: false });
                    }
                }
                // odometer over values, last position fastest
                let mut k = support;
                let mut done = true;
                while k > 0 {
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < vals.len() {
                        done = false;
                        break;
                    }
                    idx[k] = 0;
                }
                if done {
                    break;
                }
            }
            if !next_combination(&mut pos, dim) {
                break;
            }
        }
    }
    Ok(NormSearch { witness: None, examined, exhausted: true })
}

fn next_combination(pos: &mut [usize], n: usize) -> bool {
    let k = pos.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if pos[i] < n - k + i {
            pos[i] += 1;
            for j in i + 1..k {
                pos[j] = pos[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

struct IntCtx<'a> {
    n: usize,
    dim: usize,
    pt: &'a [Vec<i64>],
}

impl IntCtx<'_> {
    fn one(&self) -> Vec<i128> {
        let mut v = vec![0; self.dim];
        v[0] = 1;
        v
    }
    fn reduce(&self, acc: &[i128]) -> Vec<i128> {
        let mut out = vec![0i128; self.dim];
        for (j, &a) in acc.iter().enumerate() {
            if a != 0 {
                for (o, &p) in out.iter_mut().zip(&self.pt[j]) {
                    *o += a * p as i128;
                }
            }
        }
        out
    }
    fn mul(&self, a: &[i128], b: &[i128]) -> Vec<i128> {
        let mut acc = vec![0i128; self.n];
        for (i, &x) in a.iter().enumerate() {
            if x != 0 {
                for (j, &y) in b.iter().enumerate() {
                    if y != 0 {
                        acc[(i + j) % self.n] += x * y;
                    }
                }
            }
        }
        self.reduce(&acc)
    }
    fn galois(&self, a: &[i128], k: u64) -> Vec<i128> {
        let mut acc = vec![0i128; self.n];
        for (j, &x) in a.iter().enumerate() {
            acc[(j as u64 * k % self.n as u64) as usize] += x;
        }
        self.reduce(&acc)
    }
}

/// Local place of `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Place {
    Infinite,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

fn square_class(a: &Q) -> BigInt {
    squarefree(&(a.numer() * a.denom()))
}

fn legendre(u: &BigInt, p: u64) -> i32 {
    let r = u.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    match crate::grp::modpow(r, (p - 1) / 2, p) {
        1 => 1,
        0 => 0,
        _ => -1,
    }
}

fn split_p(a: &BigInt, p: u64) -> (u32, BigInt) {
    let mut a = a.clone();
    let pb = BigInt::from(p);
    let mut e = 0;
    while (&a % &pb).is_zero() {
        a /= &pb;
        e += 1;
    }
    (e, a)
}

/// Hilbert symbol `(a, b)_v` of nonzero rationals.
pub fn hilbert_symbol_rational(a: &Q, b: &Q, place: Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::Invariant("hilbert symbol of zero".into()));
    }
    let (a, b) = (square_class(a), square_class(b));
    match place {
        Place::Infinite => Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        Place::Prime(2) => {
            let (al, u) = split_p(&a, 2);
            let (be, v) = split_p(&b, 2);
            let m8 = |x: &BigInt| x.mod_floor(&BigInt::from(8)).to_u64().unwrap();
            let (u8_, v8) = (m8(&u), m8(&v));
            let eps = |x: u64| ((x + 7) / 2 % 2) as u32; // (x-1)/2 mod 2 for odd x mod 8
            let omega = |x: u64| ((x * x - 1) / 8 % 2) as u32;
            let e = eps(u8_) * eps(v8) + al * omega(v8) + be * omega(u8_);
            Ok(if e % 2 == 0 { 1 } else { -1 })
        }
        Place::Prime(p) => {
            if !crate::grp::is_prime(p) {
                return Err(Error::Invariant(format!("{p} is not prime")));
            }
            let (al, u) = split_p(&a, p);
            let (be, v) = split_p(&b, p);
            let mut s = if (al * be) as u64 * ((p - 1) / 2) % 2 == 1 { -1 } else { 1 };
            if be % 2 == 1 {
                s *= legendre(&u, p);
            }
            if al % 2 == 1 {
                s *= legendre(&v, p);
            }
            Ok(s)
        }
    }
}

/// Places where `(a, b)_v` can be `-1`: infinity, 2, and the odd primes dividing `ab`.
pub fn relevant_places(a: &Q, b: &Q) -> Vec<Place> {
    let mut primes = std::collections::BTreeSet::new();
    primes.insert(2u64);
    for x in [a, b] {
        for part in [x.numer(), x.denom()] {
            for (p, _) in factor(part.abs().to_u64().expect("small rational")) {
                primes.insert(p);
            }
        }
    }
    let mut v = vec![Place::Infinite];
    v.extend(primes.into_iter().map(Place::Prime));
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// Behaviour of the place in `Q(sqrt(d))`, `d` squarefree and not 1.
pub fn quadratic_splitting(d: i64, place: Place) -> Splitting {
    match place {
        Place::Infinite => {
            if d > 0 {
                Splitting::Split
            } else {
                Splitting::Ramified
            }
        }
        Place::Prime(2) => match d.rem_euclid(8) {
            1 => Splitting::Split,
            5 => Splitting::Inert,
            _ => Splitting::Ramified,
        },
        Place::Prime(p) => match legendre(&BigInt::from(d), p) {
            0 => Splitting::Ramified,
            1 => Splitting::Split,
            _ => Splitting::Inert,
        },
    }
}

/// Conductor of `Q(sqrt(d))`.
pub fn quadratic_conductor(d: i64) -> u64 {
    if d.rem_euclid(4) == 1 {
        d.unsigned_abs()
    } else {
        4 * d.unsigned_abs()
    }
}

/// `sqrt(d)` for squarefree `d`, built from quadratic Gauss sums, `ζ_4` and `ζ_8`.
pub fn sqrt_rational(d: i64) -> CycloNumber {
    assert!(d != 0 && squarefree(&BigInt::from(d)) == BigInt::from(d), "d must be squarefree");
    let mut acc = CycloNumber::one(1);
    let mut sign = 1i64;
    let mut two = false;
    for (p, _) in factor(d.unsigned_abs()) {
        if p == 2 {
            two = true;
            continue;
        }
        let terms: Vec<(i64, Q)> = (1..p).map(|a| (a as i64, q(legendre(&BigInt::from(a), p) as i64))).collect();
        acc = acc.mul(&CycloNumber::from_exponents(p, &terms));
        if p % 4 == 3 {
            sign = -sign;
        }
    }
    let rest = d.signum() * sign * if two { 2 } else { 1 };
    let extra = match rest {
        1 => CycloNumber::one(1),
        -1 => CycloNumber::zeta(4, 1),
        2 => CycloNumber::zeta(8, 1).add(&CycloNumber::zeta(8, 7)),
        -2 => CycloNumber::zeta(8, 1).add(&CycloNumber::zeta(8, 3)),
        _ => unreachable!(),
    };
    acc.mul(&extra).lift(quadratic_conductor(d))
}

/// Squarefree `d != 1` whose conductor divides `n`, by `|d|` then negative first.
pub fn quadratic_candidates(n: u64) -> Vec<i64> {
    let primes: Vec<u64> = factor(n).into_iter().map(|(p, _)| p).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << primes.len()) {
        let m: i64 = primes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p as i64).product();
        for d in [-m, m] {
            if d != 1 && n.is_multiple_of(quadratic_conductor(d)) {
                out.push(d);
            }
        }
    }
    out.sort_by_key(|&d| (d.unsigned_abs(), d > 0));
    out.dedup();
    out
}

/// `d` with `F = Q(sqrt(d))` when `F` is quadratic.
pub fn quadratic_discriminant_of(f: &FixedFieldSpec) -> Option<i64> {
    if f.degree() != 2 {
        return None;
    }
    quadratic_candidates(f.conductor).into_iter().find(|&d| is_fixed(&sqrt_rational(d), f))
}

/// Least squarefree `c` with `sqrt(c)` in `big` but not in `small`.
pub fn quadratic_generator(big: &FixedFieldSpec, small: &FixedFieldSpec) -> Option<i64> {
    let n = lcm(big.conductor, small.conductor);
    quadratic_candidates(n).into_iter().find(|&c| {
        let s = sqrt_rational(c);
        is_fixed(&s, big) && !is_fixed(&s, small)
    })
}

/// Exact sign of `a` (assumed real there) at the embedding `ζ_n ↦ exp(2πik/n)`.
pub fn sign_at_embedding(a: &CycloNumber, k: u64) -> Ordering {
    if let Some(r) = a.as_rational() {
        return r.cmp(&Q::zero());
    }
    let n = a.conductor();
    let mut prec = 64u32;
    loop {
        let (val, err) = real_part_fixed(a, k, n, prec);
        if val.abs() > err {
            return if val.is_positive() { Ordering::Greater } else { Ordering::Less };
        }
        if prec > 4096 {
            return Ordering::Equal;
        }
        prec *= 2;
    }
}

/// Fixed-point value (scale `2^p`) of `Re σ_k(a)` and an error bound in ulps.
fn real_part_fixed(a: &CycloNumber, k: u64, n: u64, p: u32) -> (BigInt, BigInt) {
    let (pi, pi_err) = pi_fixed(p);
    let mut val = BigInt::zero();
    let mut err = BigInt::zero();
    for (j, c) in a.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (cv, ce) = cos_2pi_fixed((j as u64 * k % n) as i64, n as i64, &pi, &pi_err, p);
        let num = c.numer() * &cv;
        val += num.div_floor(c.denom());
        err += (c.abs().ceil().to_integer()) * ce + 1;
    }
    (val, err)
}

fn pi_fixed(p: u32) -> (BigInt, BigInt) {
    // Machin: π = 16 atan(1/5) - 4 atan(1/239)
    let (a, ea) = atan_inv_fixed(5, p);
    let (b, eb) = atan_inv_fixed(239, p);
    (a * 16 - b * 4, ea * 16 + eb * 4)
}

fn atan_inv_fixed(x: u64, p: u32) -> (BigInt, BigInt) {
    let one = BigInt::one() << p;
    let x2 = BigInt::from(x * x);
    let mut pow = &one / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    let mut terms = 0u64;
    while !pow.is_zero() {
        let t = &pow / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += t;
        } else {
            sum -= t;
        }
        pow = &pow / &x2;
        k += 1;
        terms += 1;
    }
    (sum, BigInt::from(2 * terms + 2))
}

/// `cos(2π j/n)` in fixed point after reducing the angle into `[0, π/4]`.
fn cos_2pi_fixed(j: i64, n: i64, pi: &BigInt, pi_err: &BigInt, p: u32) -> (BigInt, BigInt) {
    // r = j/n mod 1, use cos(2πr) = cos(2π(1-r)), cos(2πr) = -cos(2π(1/2-r)), cos(2πr) = sin(2π(1/4-r))
    let mut r = Q::new(BigInt::from(j.rem_euclid(n)), BigInt::from(n));
    let half = Q::new(1.into(), 2.into());
    let quarter = Q::new(1.into(), 4.into());
    let eighth = Q::new(1.into(), 8.into());
    if r > half {
        r = Q::one() - r;
    }
    let mut sign = 1;
    if r > quarter {
        r = &half - r;
        sign = -1;
    }
    let use_sin = r > eighth;
    if use_sin {
        r = quarter - r;
    }
    let two_r = r * Q::from_integer(2.into());
    let x = (pi * two_r.numer()).div_floor(two_r.denom());
    let x_err = (pi_err * two_r.numer()).div_ceil(two_r.denom()) + 1;
    let (v, e) = taylor(&x, p, use_sin);
    (v * sign, e + x_err * 2)
}

fn taylor(x: &BigInt, p: u32, sin: bool) -> (BigInt, BigInt) {
    let one = BigInt::one() << p;
    let x2 = (x * x) >> p;
    let mut term = if sin { x.clone() } else { one };
    let mut sum = BigInt::zero();
    let mut k: u64 = if sin { 1 } else { 0 };
    let mut steps = 0u64;
    let mut s = 1;
    while !term.is_zero() {
        if s > 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        term = ((&term * &x2) >> p) / BigInt::from((k + 1) * (k + 2));
        k += 2;
        s = -s;
        steps += 1;
    }
    (sum, BigInt::from(3 * steps + 4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qq;

    #[test]
    fn small_cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn field_ops() {
        let z = CycloNumber::zeta(7, 1);
        assert_eq!(z.pow(7), CycloNumber::one(7));
        let s: CycloNumber = (0..7).fold(CycloNumber::zero(7), |a, j| a.add(&CycloNumber::zeta(7, j)));
        assert!(s.is_zero());
        let a = CycloNumber::rational(7, q(2)).add(&z);
        assert_eq!(a.mul(&a.inverse().unwrap()), CycloNumber::one(7));
        assert_eq!(CycloNumber::zeta(4, 1).lift(28), CycloNumber::zeta(28, 7));
        assert!(matches!(z.galois(7), Err(Error::NotUnit { .. })));
        assert_eq!(CycloNumber::zeta(5, 1).trace(), q(-1));
    }

    #[test]
    fn square_roots() {
        for d in [-1, 2, -2, 3, -3, 5, -7, 6, -15, 21] {
            let s = sqrt_rational(d);
            assert_eq!(s.mul(&s), CycloNumber::rational(1, q(d)), "d = {d}");
        }
        let f = fixed_field(7, &[2]);
        assert_eq!(quadratic_discriminant_of(&f), Some(-7));
        assert_eq!(f.describe(), "Q(sqrt(-7))");
    }

    #[test]
    fn hilbert_symbols() {
        assert_eq!(hilbert_symbol_rational(&q(-1), &q(-1), Place::Prime(2)).unwrap(), -1);
        assert_eq!(hilbert_symbol_rational(&q(-1), &q(-1), Place::Infinite).unwrap(), -1);
        assert_eq!(hilbert_symbol_rational(&q(-1), &q(-1), Place::Prime(3)).unwrap(), 1);
        assert_eq!(hilbert_symbol_rational(&q(-1), &q(-8), Place::Prime(2)).unwrap(), -1);
        assert_eq!(hilbert_symbol_rational(&q(5), &q(-25), Place::Prime(5)).unwrap(), 1);
        assert_eq!(hilbert_symbol_rational(&q(2), &q(3), Place::Prime(3)).unwrap(), -1);
        assert_eq!(hilbert_symbol_rational(&qq(1, 3), &q(2), Place::Prime(3)).unwrap(), -1);
        assert_eq!(quadratic_splitting(-7, Place::Prime(2)), Splitting::Split);
        assert_eq!(quadratic_splitting(-7, Place::Prime(7)), Splitting::Ramified);
        assert_eq!(quadratic_splitting(-7, Place::Prime(3)), Splitting::Inert);
    }

    #[test]
    fn norms() {
        let e = FixedFieldSpec::full(5);
        let f = fixed_field(5, &[2]);
        assert_eq!(relative_norm(&CycloNumber::zeta(5, 1), &e, &f).unwrap(), CycloNumber::one(5));
        let t = CycloNumber::rational(5, q(5));
        let r = norm_witness_search(&t, &e, &f, 4, 2, 1_000_000).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(relative_norm(&w, &e, &f).unwrap(), t);
        assert!(matches!(relative_norm(&CycloNumber::zeta(4, 1), &fixed_field(4, &[3]), &fixed_field(4, &[3])), Err(Error::NotInField(_))));
    }

    #[test]
    fn signs() {
        let c = CycloNumber::zeta(7, 1).add(&CycloNumber::zeta(7, 6));
        // 2cos(2π/7) > 0, 2cos(4π/7) < 0, 2cos(6π/7) < 0
        assert_eq!(sign_at_embedding(&c, 1), Ordering::Greater);
        assert_eq!(sign_at_embedding(&c, 2), Ordering::Less);
        assert_eq!(sign_at_embedding(&c, 3), Ordering::Less);
        let s2 = sqrt_rational(2).sub(&CycloNumber::rational(8, qq(141, 100)));
        assert_eq!(sign_at_embedding(&s2, 1), Ordering::Greater);
        assert_eq!(sign_at_embedding(&s2, 3), Ordering::Less);
    }

    #[test]
    fn json_round_trip() {
        let a = CycloNumber::new(5, vec![qq(1, 2), q(0), q(-3), q(1)]).unwrap();
        let s = a.to_json();
        assert_eq!(s, r#"{"conductor":5,"coeffs":["1/2","0","-3","1"]}"#);
        assert_eq!(CycloNumber::from_json(&s).unwrap(), a);
        assert!(CycloNumber::from_json(r#"{"conductor":5,"coeffs":["1"]}"#).is_err());
        assert!(CycloNumber::from_json(r#"{"conductor":5,"coeffs":["1/0","0","0","0"]}"#).is_err());
        let f = fixed_field(12, &[5]);
        assert_eq!(FixedFieldSpec::from_json(&f.to_json()).unwrap(), f);
        assert!(FixedFieldSpec::from_json(r#"{"conductor":12,"fixing":[1,5,7]}"#).is_err());
    }
}
