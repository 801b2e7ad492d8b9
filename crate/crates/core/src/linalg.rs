//! Exact rational row reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::Q;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut Vec<Vec<Q>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let piv = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&piv) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{v : rows·v = 0}`, one vector per free column in increasing order.
pub fn nullspace(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut basis = Vec::new();
    for f in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); ncols];
        v[f] = Q::one();
        for (row, &p) in m.iter().zip(&pivots) {
            v[p] = -row[f].clone();
        }
        basis.push(v);
    }
    basis
}

const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b);
        }
        b = mulmod(b, b);
        e >>= 1;
    }
    r
}

fn to_mod(x: &Q) -> Option<u64> {
    let p = BigInt::from(P);
    let d = x.denom().mod_floor(&p).to_u64()?;
    if d == 0 {
        return None;
    }
    let n = x.numer().mod_floor(&p).to_u64()?;
    Some(mulmod(n, powmod(d, P - 2)))
}

/// Indices of a maximal set of rows independent modulo a large prime, or `None` when some
/// denominator vanishes there. Rows independent modulo the prime are independent over `Q`.
pub fn independent_rows_mod_p(rows: &[Vec<Q>], ncols: usize) -> Option<Vec<usize>> {
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if basis.len() == ncols {
            break;
        }
        let mut v = Vec::with_capacity(ncols);
        for x in row {
            v.push(if x.is_zero() { 0 } else { to_mod(x)? });
        }
        for (pc, b) in &basis {
            let f = v[*pc];
            if f != 0 {
                for (x, y) in v.iter_mut().zip(b) {
                    if *y != 0 {
                        *x = (*x + P - mulmod(f, *y)) % P;
                    }
                }
            }
        }
        if let Some(pc) = v.iter().position(|&x| x != 0) {
            let inv = powmod(v[pc], P - 2);
            for x in v.iter_mut() {
                *x = mulmod(*x, inv);
            }
            basis.push((pc, v));
            chosen.push(i);
        }
    }
    Some(chosen)
}

/// Nullspace computed exactly on a row subset chosen modulo a prime. The subset spans the full
/// row space whenever the rank modulo the prime equals the rank over `Q`; callers verify.
pub fn nullspace_selected(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    match independent_rows_mod_p(rows, ncols) {
        Some(idx) => {
            let sub: Vec<Vec<Q>> = idx.into_iter().map(|i| rows[i].clone()).collect();
            nullspace(&sub, ncols)
        }
        None => nullspace(rows, ncols),
    }
}

/// Rank over `Q`.
pub fn rank(rows: &[Vec<Q>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn max_abs(v: &[Q]) -> Q {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
}
