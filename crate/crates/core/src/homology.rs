//! Exact ranks of sparse integer matrices and first Betti numbers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

type Row = BTreeMap<usize, BigInt>;

fn normalize(row: &mut Row) {
    let mut g = BigInt::zero();
    for v in row.values() {
        g = num_integer_gcd(&g, v);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for v in row.values_mut() {
            *v /= &g;
        }
    }
}

fn num_integer_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (a.abs(), b.abs());
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// Rank over the rationals of a sparse integer matrix given as rows of
/// `(column, value)` pairs. Fraction-free elimination, exact.
pub fn rank(rows: &[Vec<(usize, i64)>]) -> usize {
    let mut pivots: BTreeMap<usize, Row> = BTreeMap::new();
    for r in rows {
        let mut row: Row = BTreeMap::new();
        for &(c, v) in r {
            *row.entry(c).or_insert_with(BigInt::zero) += v;
        }
        row.retain(|_, v| !v.is_zero());
        while let Some((&lead, lv)) = row.iter().next() {
            let Some(p) = pivots.get(&lead) else {
                normalize(&mut row);
                pivots.insert(lead, row);
                break;
            };
            let pv = p[&lead].clone();
            let lv = lv.clone();
            // row <- row * pv - p * lv, which kills the leading entry
            for v in row.values_mut() {
                *v *= &pv;
            }
            for (c, x) in p {
                let e = row.entry(*c).or_insert_with(BigInt::zero);
                *e -= x * &lv;
            }
            row.retain(|_, v| !v.is_zero());
            normalize(&mut row);
        }
    }
    pivots.len()
}

/// Number of connected components of a graph on `n` vertices.
pub fn graph_components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut uf = UnionFind::new(n);
    for &(a, b) in edges {
        uf.union(a, b);
    }
    (0..n).filter(|&v| uf.find(v) == v).count()
}

/// First Betti number of a 2-dimensional cell complex with `n` vertices,
/// the given (oriented) edges, and 2-cells whose boundaries are signed
/// edge sums.
pub fn betti1(n: usize, edges: &[(usize, usize)], cells: &[Vec<(usize, i64)>]) -> usize {
    let c = graph_components(n, edges);
    let cycles = edges.len() + c - n;
    cycles - rank(cells)
}

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    /// Merges the classes; the smaller root survives.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Union-find carrying a parity bit relative to the root.
#[derive(Debug, Clone)]
pub struct ParityUnionFind {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl ParityUnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), parity: vec![false; n] }
    }

    /// Root of `x` and the parity of `x` relative to it.
    pub fn find(&mut self, x: usize) -> (usize, bool) {
        if self.parent[x] == x {
            return (x, false);
        }
        let p = self.parent[x];
        let (r, pp) = self.find(p);
        self.parent[x] = r;
        self.parity[x] ^= pp;
        (r, self.parity[x])
    }

    /// Records `parity(a) xor parity(b) = rel`. Returns false on conflict.
    pub fn relate(&mut self, a: usize, b: usize, rel: bool) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == rel;
        }
        self.parent[rb] = ra;
        self.parity[rb] = pa ^ pb ^ rel;
        true
    }
}
