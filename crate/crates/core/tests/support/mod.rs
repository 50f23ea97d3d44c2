//! Brute-force oracles shared by the integration suites. Everything here is
//! computed from scratch with plain rational Gaussian elimination and
//! subset enumeration, independent of the library's algorithms.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn to_q(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Row echelon form in place; returns pivot columns.
pub fn echelon(rows: &mut Vec<Vec<Q>>) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(vs: &[Vec<Q>]) -> usize {
    let mut m = vs.to_vec();
    echelon(&mut m).len()
}

/// Basis of `{x : M x = 0}` for an `r × c` matrix given by rows.
pub fn nullspace(rows: &[Vec<Q>], c: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = echelon(&mut m);
    let free: Vec<usize> = (0..c).filter(|j| !pivots.contains(j)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Q::zero(); c];
            x[f] = q(1);
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -m[i][f].clone();
            }
            x
        })
        .collect()
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Face structure of `Cone(gens)` found by enumerating all `(r−1)`-subsets
/// of generators, `r` the rank, as candidate facet spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleCone {
    pub dim: usize,
    pub pointed: bool,
    pub faces: BTreeSet<BTreeSet<usize>>,
    pub extreme: Vec<usize>,
    pub f_vector: Vec<usize>,
}

pub fn cone_oracle(gens: &[Vec<i64>]) -> OracleCone {
    let g: Vec<Vec<Q>> = gens.iter().map(|v| to_q(v)).collect();
    let r = rank(&g);
    let mut span = Vec::new();
    for v in &g {
        let mut t = span.clone();
        t.push(v.clone());
        if rank(&t) > span.len() {
            span = t;
        }
    }
    let mut tight_sets: Vec<BTreeSet<usize>> = Vec::new();
    let mut normals: Vec<Vec<Q>> = Vec::new();
    for t in subsets(g.len(), r.saturating_sub(1)) {
        let tv: Vec<Vec<Q>> = t.iter().map(|&i| g[i].clone()).collect();
        if rank(&tv) + 1 != r {
            continue;
        }
        // y = Σ c_j span_j with y ⊥ t
        let eqs: Vec<Vec<Q>> = tv.iter().map(|w| span.iter().map(|b| dot(b, w)).collect()).collect();
        let c = nullspace(&eqs, r).remove(0);
        let dim = g[0].len();
        let mut y = vec![Q::zero(); dim];
        for (cj, b) in c.iter().zip(&span) {
            for (yi, bi) in y.iter_mut().zip(b) {
                *yi += cj * bi;
            }
        }
        let vals: Vec<Q> = g.iter().map(|v| dot(&y, v)).collect();
        if vals.iter().all(|x| !x.is_negative()) || vals.iter().all(|x| !x.is_positive()) {
            tight_sets.push((0..g.len()).filter(|&i| vals[i].is_zero()).collect());
            normals.push(y);
        }
    }
    let pointed = rank(&normals) == r;
    let mut faces = BTreeSet::new();
    let mut extreme = Vec::new();
    let mut f_vector = Vec::new();
    if pointed {
        let mut todo = vec![(0..g.len()).collect::<BTreeSet<usize>>()];
        while let Some(f) = todo.pop() {
            if faces.insert(f.clone()) {
                for t in &tight_sets {
                    todo.push(f.intersection(t).copied().collect());
                }
            }
        }
        f_vector = vec![0; r + 1];
        for f in &faces {
            let fv: Vec<Vec<Q>> = f.iter().map(|&i| g[i].clone()).collect();
            let k = rank(&fv);
            f_vector[k] += 1;
            if k == 1 {
                extreme.push(*f.iter().next().unwrap());
            }
        }
        extreme.sort();
    }
    OracleCone {
        dim: r,
        pointed,
        faces,
        extreme,
        f_vector,
    }
}

/// Nonzero integer vectors with entries in `[-bound, bound]`.
pub fn random_generators(rng: &mut impl Rng, dim: usize, count: usize, bound: i64) -> Vec<Vec<i64>> {
    (0..count)
        .map(|_| loop {
            let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-bound..=bound)).collect();
            if v.iter().any(|&x| x != 0) {
                break v;
            }
        })
        .collect()
}

/// Columns of a random `d × d` integer matrix with determinant ±1, as a
/// product of elementary operations.
pub fn random_unimodular(rng: &mut impl Rng, d: usize, steps: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
    if d < 2 {
        if rng.gen_bool(0.5) {
            m[0][0] = -1;
        }
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..d);
        let mut j = rng.gen_range(0..d - 1);
        if j >= i {
            j += 1;
        }
        let k = rng.gen_range(-2..=2);
        for row in m.iter_mut() {
            row[i] += k * row[j];
        }
        if rng.gen_bool(0.2) {
            for row in m.iter_mut() {
                row.swap(i, j);
            }
        }
    }
    m
}

pub fn int_det(m: &[Vec<i64>]) -> Q {
    let mut rows: Vec<Vec<Q>> = m.iter().map(|r| to_q(r)).collect();
    let n = rows.len();
    let mut det = q(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !rows[i][c].is_zero()) else { return Q::zero() };
        if p != c {
            rows.swap(p, c);
            det = -det;
        }
        det *= rows[c][c].clone();
        for i in c + 1..n {
            let f = &rows[i][c] / &rows[c][c];
            let pr = rows[c].clone();
            for (x, y) in rows[i].iter_mut().zip(&pr) {
                *x = &*x - &f * y;
            }
        }
    }
    det
}
