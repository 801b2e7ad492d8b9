//! Finite groups as flat Cayley tables, subgroups as sorted member lists with bitmasks.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_ORDER: usize = 10_000;
pub const SUBGROUP_LATTICE_BOUND: usize = 2000;

/// Finite group with identity at index 0. Elements are numbered in breadth-first
/// discovery order from the generators, so generator `i` gets index `i + 1`
/// unless it repeats an earlier element.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    n: usize,
    table: Vec<u32>,
    inv: Vec<u32>,
    gens: Vec<usize>,
    gen_labels: Vec<String>,
    words: Vec<Vec<(usize, u32)>>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table && self.gens == other.gens
    }
}

impl FiniteGroup {
    /// Breadth-first closure of `gens` under right multiplication.
    pub fn from_closure<T, F>(
        identity: T,
        gens: &[T],
        labels: &[String],
        mul: F,
        max_order: usize,
    ) -> Result<Self>
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
    {
        if labels.len() != gens.len() {
            return Err(Error::InvalidSpec("label count differs from generator count".into()));
        }
        let mut seen = HashSet::new();
        for l in labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidSpec(format!("duplicate generator label {l}")));
            }
            if !valid_label(l) {
                return Err(Error::InvalidSpec(format!("bad generator label {l:?}")));
            }
        }
        let mut elems: Vec<T> = vec![identity];
        let mut index: HashMap<T, u32> = HashMap::new();
        index.insert(elems[0].clone(), 0);
        let mut words: Vec<Vec<(usize, u32)>> = vec![vec![]];
        let mut i = 0;
        while i < elems.len() {
            for (gi, g) in gens.iter().enumerate() {
                let p = mul(&elems[i], g);
                if !index.contains_key(&p) {
                    if elems.len() >= max_order {
                        return Err(Error::OrderBoundExceeded(max_order));
                    }
                    index.insert(p.clone(), elems.len() as u32);
                    let mut w = words[i].clone();
                    match w.last_mut() {
                        Some((lg, e)) if *lg == gi => *e += 1,
                        _ => w.push((gi, 1)),
                    }
                    words.push(w);
                    elems.push(p);
                }
            }
            i += 1;
        }
        let n = elems.len();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let p = mul(&elems[a], &elems[b]);
                table[a * n + b] = *index
                    .get(&p)
                    .ok_or_else(|| Error::InvalidSpec("multiplication not closed".into()))?;
            }
        }
        let gen_idx = gens.iter().map(|g| index[g] as usize).collect();
        Self::finish(n, table, gen_idx, labels.to_vec(), words)
    }

    fn finish(
        n: usize,
        table: Vec<u32>,
        gens: Vec<usize>,
        gen_labels: Vec<String>,
        words: Vec<Vec<(usize, u32)>>,
    ) -> Result<Self> {
        let mut inv = vec![u32::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if table[a * n + b] == 0 {
                    inv[a] = b as u32;
                    break;
                }
            }
            if inv[a] == u32::MAX {
                return Err(Error::InvalidSpec("element without inverse".into()));
            }
        }
        Ok(FiniteGroup { n, table, inv, gens, gen_labels, words })
    }

    /// Build from a Cayley table, checking the group axioms. Row/column 0 must be the identity.
    pub fn from_table(table: Vec<Vec<usize>>, gens: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidSpec("malformed Cayley table".into()));
        }
        for a in 0..n {
            if table[0][a] != a || table[a][0] != a {
                return Err(Error::InvalidSpec("index 0 is not the identity".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidSpec("not associative".into()));
                    }
                }
            }
        }
        let flat: Vec<u32> = table.iter().flatten().map(|&x| x as u32).collect();
        let words = (0..n).map(|i| if i == 0 { vec![] } else { vec![(usize::MAX, i as u32)] }).collect();
        Self::finish(n, flat, gens, labels, words)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        let mut e = k.unsigned_abs();
        let (mut r, mut b) = (0usize, base);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn elem_order(&self, a: usize) -> usize {
        let (mut x, mut k) = (a, 1);
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// `g^-1 a g`
    #[inline]
    pub fn conj(&self, a: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), a), g)
    }

    /// `a^-1 b^-1 a b`
    pub fn comm(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn gens(&self) -> &[usize] {
        &self.gens
    }

    pub fn gen_labels(&self) -> &[String] {
        &self.gen_labels
    }

    pub fn is_abelian(&self) -> bool {
        self.gens.iter().all(|&a| self.gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Shortlex-style word for an element, e.g. `x^2*y`.
    pub fn label(&self, a: usize) -> String {
        let w = &self.words[a];
        if w.is_empty() {
            return "e".into();
        }
        w.iter()
            .map(|&(g, e)| {
                let l = if g == usize::MAX { format!("g{e}") } else { self.gen_labels[g].clone() };
                if e == 1 || g == usize::MAX {
                    l
                } else {
                    format!("{l}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Parse a word such as `x*y^-1*b^2`; `e` and `1` denote the identity.
    pub fn parse_word(&self, s: &str) -> Result<usize> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty word".into()));
        }
        let mut acc = 0usize;
        for tok in s.split(|c: char| c == '*' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let (name, exp) = match tok.split_once('^') {
                Some((a, b)) => {
                    let e: i64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?;
                    (a.trim(), e)
                }
                None => (tok, 1),
            };
            let base = if name == "e" || name == "1" {
                0
            } else {
                let gi = self
                    .gen_labels
                    .iter()
                    .position(|l| l == name)
                    .ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))?;
                self.gens[gi]
            };
            acc = self.mul(acc, self.pow(base, exp));
        }
        Ok(acc)
    }

    /// Image of every element under the homomorphism fixed by generator images.
    /// Errors with the first pair where the extension fails to be multiplicative.
    pub fn extend_hom(&self, images: &[usize], target: &FiniteGroup) -> Result<Vec<usize>> {
        let mut img = vec![usize::MAX; self.n];
        img[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for (gi, &g) in self.gens.iter().enumerate() {
                let p = self.mul(a, g);
                let v = target.mul(img[a], images[gi]);
                if img[p] == usize::MAX {
                    img[p] = v;
                    queue.push_back(p);
                } else if img[p] != v {
                    return Err(Error::NotAutomorphism(a, g));
                }
            }
        }
        for a in 0..self.n {
            for b in 0..self.n {
                if img[self.mul(a, b)] != target.mul(img[a], img[b]) {
                    return Err(Error::NotAutomorphism(a, b));
                }
            }
        }
        Ok(img)
    }
}

fn valid_label(l: &str) -> bool {
    !l.is_empty()
        && l != "e"
        && l.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Permutations given as image lists over `0..degree`.
pub fn build_from_permutations(gens: &[Vec<usize>], labels: &[String], max_order: usize) -> Result<FiniteGroup> {
    let d = gens.first().map_or(0, |g| g.len());
    for g in gens {
        let mut seen = vec![false; d];
        if g.len() != d || g.iter().any(|&x| x >= d || std::mem::replace(&mut seen[x], true)) {
            return Err(Error::InvalidSpec("generator is not a permutation of the common degree".into()));
        }
    }
    let id: Vec<u16> = (0..d as u16).collect();
    let g16: Vec<Vec<u16>> = gens.iter().map(|g| g.iter().map(|&x| x as u16).collect()).collect();
    // (p*q)(i) = q(p(i)): apply p first.
    FiniteGroup::from_closure(id, &g16, labels, |p, q| p.iter().map(|&i| q[i as usize]).collect(), max_order)
}

pub fn build_cyclic(n: usize, label: &str) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::InvalidSpec("cyclic group of order 0".into()));
    }
    FiniteGroup::from_closure(0usize, &[1 % n], &[label.to_string()], |a, b| (a + b) % n, n.max(1))
}

pub fn build_direct(factors: &[FiniteGroup], max_order: usize) -> Result<FiniteGroup> {
    let k = factors.len();
    let mut gens = Vec::new();
    let mut labels = Vec::new();
    for (fi, f) in factors.iter().enumerate() {
        for (g, l) in f.gens().iter().zip(f.gen_labels()) {
            let mut v = vec![0usize; k];
            v[fi] = *g;
            gens.push(v);
            labels.push(l.clone());
        }
    }
    FiniteGroup::from_closure(
        vec![0usize; k],
        &gens,
        &labels,
        |a, b| a.iter().zip(b).zip(factors).map(|((x, y), f)| f.mul(*x, *y)).collect(),
        max_order,
    )
}

/// `N ⋊ C_m` with `(n1,i)(n2,j) = (n1·θ^i(n2), i+j mod m)`; `theta` is a table on `N`.
pub fn build_semidirect(nrm: &FiniteGroup, m: usize, theta: &[usize], label: &str, max_order: usize) -> Result<FiniteGroup> {
    let n = nrm.order();
    if theta.len() != n || m == 0 {
        return Err(Error::InvalidSpec("theta must be a table on N and m positive".into()));
    }
    let mut seen = vec![false; n];
    for &t in theta {
        if t >= n || std::mem::replace(&mut seen[t], true) {
            return Err(Error::InvalidSpec("theta is not a bijection".into()));
        }
    }
    for a in 0..n {
        for b in 0..n {
            if theta[nrm.mul(a, b)] != nrm.mul(theta[a], theta[b]) {
                return Err(Error::NotAutomorphism(a, b));
            }
        }
    }
    let mut powers = vec![(0..n).collect::<Vec<_>>()];
    for i in 1..=m {
        let prev: &Vec<usize> = &powers[i - 1];
        powers.push(prev.iter().map(|&x| theta[x]).collect());
    }
    if powers[m].iter().enumerate().any(|(i, &x)| i != x) {
        return Err(Error::InvalidSpec(format!("theta^{m} is not the identity")));
    }
    let mut gens: Vec<(usize, usize)> = nrm.gens().iter().map(|&g| (g, 0)).collect();
    gens.push((0, 1 % m));
    let mut labels = nrm.gen_labels().to_vec();
    labels.push(label.to_string());
    FiniteGroup::from_closure(
        (0usize, 0usize),
        &gens,
        &labels,
        |&(n1, i), &(n2, j)| (nrm.mul(n1, powers[i][n2]), (i + j) % m),
        max_order,
    )
}

/// Semidirect product from conjugation images `w^-1 g w` of the generators of `N`.
pub fn build_semidirect_from_action(nrm: &FiniteGroup, m: usize, images: &[usize], label: &str, max_order: usize) -> Result<FiniteGroup> {
    let phi = nrm.extend_hom(images, nrm)?;
    let mut theta = vec![usize::MAX; phi.len()];
    for (a, &b) in phi.iter().enumerate() {
        if b >= theta.len() || theta[b] != usize::MAX {
            return Err(Error::InvalidSpec("action is not bijective".into()));
        }
        theta[b] = a;
    }
    build_semidirect(nrm, m, &theta, label, max_order)
}

/// Heisenberg group of order `p^3` with `x` central and `yz = zyx`.
pub fn build_heisenberg(p: usize) -> Result<FiniteGroup> {
    if !(2..=13).contains(&p) || !is_prime(p as u64) {
        return Err(Error::InvalidSpec(format!("heisenberg needs a prime p <= 13, got {p}")));
    }
    let p = p as i64;
    let labels = ["x", "y", "z"].map(String::from);
    FiniteGroup::from_closure(
        (0i64, 0i64, 0i64),
        &[(1, 0, 0), (0, 1, 0), (0, 0, 1)],
        &labels,
        |&(a, b, c), &(a2, b2, c2)| ((a + a2 - c * b2).rem_euclid(p), (b + b2) % p, (c + c2) % p),
        (p * p * p) as usize,
    )
}

pub fn build_quaternion8() -> Result<FiniteGroup> {
    // (sign, unit) with unit 0..4 = 1,i,j,k
    fn m(a: &(bool, u8), b: &(bool, u8)) -> (bool, u8) {
        const T: [[(bool, u8); 4]; 4] = [
            [(false, 0), (false, 1), (false, 2), (false, 3)],
            [(false, 1), (true, 0), (false, 3), (true, 2)],
            [(false, 2), (true, 3), (true, 0), (false, 1)],
            [(false, 3), (false, 2), (true, 1), (true, 0)],
        ];
        let (s, u) = T[a.1 as usize][b.1 as usize];
        (a.0 ^ b.0 ^ s, u)
    }
    FiniteGroup::from_closure((false, 0u8), &[(false, 1), (false, 2)], &["x".into(), "y".into()], m, 8)
}

pub fn build_dihedral(n: usize) -> Result<FiniteGroup> {
    let r: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let s: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
    build_from_permutations(&[r, s], &["r".into(), "s".into()], 2 * n)
}

pub fn build_symmetric3() -> Result<FiniteGroup> {
    build_from_permutations(&[vec![1, 2, 0], vec![1, 0, 2]], &["a".into(), "b".into()], 6)
}

/// `C_7 ⋊ C_3` with `a^-1 b a = b^2`.
pub fn build_frobenius21() -> Result<FiniteGroup> {
    let c7 = build_cyclic(7, "b")?;
    let img = c7.pow(c7.gens()[0], 2);
    build_semidirect_from_action(&c7, 3, &[img], "a", DEFAULT_MAX_ORDER)
}

/// `(Q8 × C7) ⋊ C3` with `a^-1 x a = y`, `a^-1 y a = xy`, `a^-1 b a = b^2`.
pub fn build_order168() -> Result<FiniteGroup> {
    let n = build_direct(&[build_quaternion8()?, build_cyclic(7, "b")?], DEFAULT_MAX_ORDER)?;
    let imgs = ["y", "x*y", "b^2"].iter().map(|w| n.parse_word(w)).collect::<Result<Vec<_>>>()?;
    build_semidirect_from_action(&n, 3, &imgs, "a", DEFAULT_MAX_ORDER)
}

/// Parameters `(n, t, r, k, q)` of the family of order `p^3 2^n`:
/// `p - 1 = 2^(n-1) t` with `t` odd, `r` the least primitive root, `k = 1`, `q ≡ -r^t`.
pub fn gp3_2n_params(p: u64) -> Result<(u32, u64, u64, u64, u64)> {
    if !is_prime(p) || p % 4 != 1 || p > 13 {
        return Err(Error::InvalidSpec(format!("need a prime p ≡ 1 mod 4 with p <= 13, got {p}")));
    }
    let mut t = p - 1;
    let mut e = 0;
    while t.is_multiple_of(2) {
        t /= 2;
        e += 1;
    }
    let n = e + 1;
    let r = (2..p).find(|&r| (1..p - 1).all(|j| modpow(r, j, p) != 1)).expect("primitive root");
    let k = 1;
    let q = (p - modpow(r, t, p)) % p;
    Ok((n, t, r, k, q))
}

/// `Heis(p) ⋊ C_{2^n}` with `w^-1 x w = x^(r^t)`, `w^-1 y w = z^k`, `w^-1 z w = y^q`.
pub fn build_gp3_2n(p: u64) -> Result<FiniteGroup> {
    let (n, t, r, k, q) = gp3_2n_params(p)?;
    let h = build_heisenberg(p as usize)?;
    let imgs = [
        format!("x^{}", modpow(r, t, p)),
        format!("z^{k}"),
        format!("y^{q}"),
    ];
    let imgs = imgs.iter().map(|w| h.parse_word(w)).collect::<Result<Vec<_>>>()?;
    build_semidirect_from_action(&h, 1 << n, &imgs, "w", DEFAULT_MAX_ORDER)
}

pub(crate) fn modpow(b: u64, mut e: u64, m: u64) -> u64 {
    let (mut r, mut b) = (1 % m, b % m);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSet(Vec<u64>);

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64)])
    }
    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.0[i >> 6] >> (i & 63) & 1 == 1
    }
    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        let had = self.contains(i);
        self.0[i >> 6] |= 1 << (i & 63);
        !had
    }
    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

/// Subgroup of a fixed ambient group: sorted members, membership mask, and a generating set.
#[derive(Clone, Debug)]
pub struct Subgroup {
    members: Vec<usize>,
    mask: BitSet,
    gens: Vec<usize>,
}

impl PartialEq for Subgroup {
    fn eq(&self, o: &Self) -> bool {
        self.members == o.members
    }
}
impl Eq for Subgroup {}
impl Hash for Subgroup {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.members.hash(h)
    }
}
impl PartialOrd for Subgroup {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Subgroup {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        (self.order(), &self.members).cmp(&(o.order(), &o.members))
    }
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }
    pub fn members(&self) -> &[usize] {
        &self.members
    }
    pub fn gens(&self) -> &[usize] {
        &self.gens
    }
    pub fn mask(&self) -> &BitSet {
        &self.mask
    }
    #[inline]
    pub fn contains(&self, g: usize) -> bool {
        self.mask.contains(g)
    }
    pub fn is_subgroup_of(&self, o: &Subgroup) -> bool {
        self.order() <= o.order() && self.mask.is_subset(&o.mask)
    }
    pub fn whole(g: &FiniteGroup) -> Self {
        subgroup_generated(g, g.gens())
    }
    pub fn trivial(g: &FiniteGroup) -> Self {
        subgroup_generated(g, &[])
    }
    /// Generator labels, e.g. `<x, y*z>`.
    pub fn describe(&self, g: &FiniteGroup) -> String {
        format!("<{}>", self.gens.iter().map(|&x| g.label(x)).collect::<Vec<_>>().join(", "))
    }
}

fn close(g: &FiniteGroup, mut members: Vec<usize>, mut mask: BitSet, mut gens: Vec<usize>, extra: &[usize]) -> Subgroup {
    for &s in extra {
        if mask.contains(s) {
            continue;
        }
        gens.push(s);
        let mut i = 0;
        while i < members.len() {
            let a = members[i];
            for &t in &gens {
                let p = g.mul(a, t);
                if mask.insert(p) {
                    members.push(p);
                }
            }
            i += 1;
        }
    }
    members.sort_unstable();
    Subgroup { members, mask, gens }
}

pub fn subgroup_generated(g: &FiniteGroup, seeds: &[usize]) -> Subgroup {
    let mut mask = BitSet::new(g.order());
    mask.insert(0);
    close(g, vec![0], mask, vec![], seeds)
}

/// Subgroup containing `s` and `extra`.
pub fn join(g: &FiniteGroup, s: &Subgroup, extra: &[usize]) -> Subgroup {
    close(g, s.members.clone(), s.mask.clone(), s.gens.clone(), extra)
}

pub fn intersection(g: &FiniteGroup, a: &Subgroup, b: &Subgroup) -> Subgroup {
    let m: Vec<usize> = a.members.iter().copied().filter(|&x| b.contains(x)).collect();
    from_members(g, m)
}

/// Subgroup from a list of elements already known to form a subgroup.
pub fn from_members(g: &FiniteGroup, mut m: Vec<usize>) -> Subgroup {
    m.sort_unstable();
    m.dedup();
    let mut mask = BitSet::new(g.order());
    for &x in &m {
        mask.insert(x);
    }
    let gens = greedy_gens(g, &m);
    Subgroup { members: m, mask, gens }
}

fn greedy_gens(g: &FiniteGroup, m: &[usize]) -> Vec<usize> {
    let mut cur = subgroup_generated(g, &[]);
    for &x in m {
        if cur.order() == m.len() {
            break;
        }
        if !cur.contains(x) {
            cur = join(g, &cur, &[x]);
        }
    }
    cur.gens
}

pub fn conjugate_subgroup(g: &FiniteGroup, s: &Subgroup, x: usize) -> Subgroup {
    from_members(g, s.members.iter().map(|&a| g.conj(a, x)).collect())
}

/// Whether `s` is normalized by every element of `within`.
pub fn is_normal(g: &FiniteGroup, s: &Subgroup, within: &Subgroup) -> bool {
    within.gens.iter().all(|&x| s.gens.iter().all(|&a| s.contains(g.conj(a, x))))
}

pub fn normalizer(g: &FiniteGroup, s: &Subgroup, within: &Subgroup) -> Subgroup {
    let m = within
        .members
        .iter()
        .copied()
        .filter(|&x| s.gens.iter().all(|&a| s.contains(g.conj(a, x))))
        .collect();
    from_members(g, m)
}

pub fn centralizer_set(g: &FiniteGroup, set: &[usize], within: &Subgroup) -> Subgroup {
    let m = within
        .members
        .iter()
        .copied()
        .filter(|&x| set.iter().all(|&a| g.mul(a, x) == g.mul(x, a)))
        .collect();
    from_members(g, m)
}

/// `[H, x]`, generated by `x^-1 h^-1 x h` for `h` in `H`.
pub fn commutator_subgroup_with(g: &FiniteGroup, h: &Subgroup, x: usize) -> Subgroup {
    let seeds: Vec<usize> = h.members.iter().map(|&a| g.comm(x, a)).collect();
    subgroup_generated(g, &seeds)
}

pub fn derived_subgroup(g: &FiniteGroup, h: &Subgroup) -> Subgroup {
    let mut seeds = Vec::new();
    for &a in &h.gens {
        for &b in &h.gens {
            seeds.push(g.comm(a, b));
        }
    }
    normal_closure(g, &subgroup_generated(g, &seeds), h)
}

pub fn normal_closure(g: &FiniteGroup, s: &Subgroup, within: &Subgroup) -> Subgroup {
    let mut cur = s.clone();
    loop {
        let extra: Vec<usize> = within
            .gens
            .iter()
            .flat_map(|&x| cur.gens.iter().map(move |&a| (a, x)))
            .map(|(a, x)| g.conj(a, x))
            .filter(|&c| !cur.contains(c))
            .collect();
        if extra.is_empty() {
            return cur;
        }
        cur = join(g, &cur, &extra);
    }
}

/// Least-index generator of `H/K` and the quotient order, or `None` if `H/K` is not cyclic.
pub fn cyclic_quotient_data(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Result<Option<(usize, usize)>> {
    if !k.is_subgroup_of(h) || !is_normal(g, k, h) {
        return Err(Error::NotNormal);
    }
    let o = h.order() / k.order();
    for &x in &h.members {
        let (mut y, mut j) = (x, 1);
        while !k.contains(y) {
            y = g.mul(y, x);
            j += 1;
        }
        if j == o {
            return Ok(Some((x, o)));
        }
    }
    Ok(None)
}

/// Left transversal of `s` in `within`: each representative is the least index of its coset `tS`.
pub fn left_transversal(g: &FiniteGroup, s: &Subgroup, within: &Subgroup) -> Vec<usize> {
    let mut covered = BitSet::new(g.order());
    let mut reps = Vec::new();
    for &t in &within.members {
        if covered.contains(t) {
            continue;
        }
        reps.push(t);
        for &x in &s.members {
            covered.insert(g.mul(t, x));
        }
    }
    reps
}

/// Every subgroup, sorted by `(order, members)`, as the join-closure of the cyclic subgroups.
pub fn all_subgroups(g: &FiniteGroup, bound: usize) -> Result<Vec<Subgroup>> {
    if g.order() > bound {
        return Err(Error::SubgroupBound { order: g.order(), bound });
    }
    let mut cyclic: Vec<Subgroup> = Vec::new();
    let mut seen: HashSet<BitSet> = HashSet::new();
    for x in 0..g.order() {
        let c = subgroup_generated(g, &[x]);
        if seen.insert(c.mask.clone()) {
            cyclic.push(c);
        }
    }
    cyclic.sort();
    let mut all = cyclic.clone();
    let mut i = 0;
    while i < all.len() {
        for c in &cyclic {
            if c.gens.is_empty() || all[i].contains(c.gens[0]) {
                continue;
            }
            let j = join(g, &all[i], &c.gens);
            if seen.insert(j.mask.clone()) {
                all.push(j);
            }
        }
        i += 1;
    }
    for s in &mut all {
        s.gens = greedy_gens(g, &s.members);
    }
    all.sort();
    Ok(all)
}

/// Whether index 0 is an identity, inverses exist, and the table is associative on generators.
pub fn check_axioms(g: &FiniteGroup) -> bool {
    let n = g.order();
    (0..n).all(|a| g.mul(0, a) == a && g.mul(a, 0) == a && g.mul(a, g.inv(a)) == 0)
        && (0..n).all(|a| {
            (0..n).all(|b| g.gens().iter().all(|&c| g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c))))
        })
}
