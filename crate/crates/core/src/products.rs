//! Join subgraphs of triangle-free graphs and maximal pairs of disjoint
//! standard subgraphs.

use std::collections::{BTreeSet, HashSet};

use serde_json::json;

use crate::cactus::CactusAnalysis;
use crate::error::{Error, Result};
use crate::graph::{find_triangle, SimplicialGraph, Subgraph, Vertex};

pub const DEFAULT_CAP: usize = 24;

/// Cap for exponential enumerations: `SQCI_CAP` if set, else the default.
pub fn enumeration_cap() -> usize {
    std::env::var("SQCI_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

/// A complete bipartite subgraph `side_a * side_b`. `side_a` is the side whose
/// sorted vertex list is lexicographically smaller.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JoinSubgraph {
    pub side_a: BTreeSet<Vertex>,
    pub side_b: BTreeSet<Vertex>,
}

impl JoinSubgraph {
    pub fn new(x: BTreeSet<Vertex>, y: BTreeSet<Vertex>) -> Self {
        if x <= y {
            Self { side_a: x, side_b: y }
        } else {
            Self { side_a: y, side_b: x }
        }
    }

    pub fn ranks(&self) -> (usize, usize) {
        (self.side_a.len(), self.side_b.len())
    }

    pub fn support(&self) -> BTreeSet<Vertex> {
        self.side_a.union(&self.side_b).copied().collect()
    }

    /// Intersection of the edge sets, if it is again a nonempty biclique.
    /// The flag reports whether the sides of the result sit in swapped
    /// positions relative to `self` (side_a of the result lies in side_b of
    /// `self`).
    pub fn meet(&self, other: &JoinSubgraph) -> Option<(JoinSubgraph, bool)> {
        let straight = (
            &self.side_a & &other.side_a,
            &self.side_b & &other.side_b,
        );
        let crossed = (
            &self.side_a & &other.side_b,
            &self.side_b & &other.side_a,
        );
        let nonempty = |p: &(BTreeSet<Vertex>, BTreeSet<Vertex>)| !p.0.is_empty() && !p.1.is_empty();
        // in a triangle-free graph the edge intersection of two bicliques is
        // a single biclique, so at most one of these is nonempty
        let (x, y) = if nonempty(&straight) {
            straight
        } else if nonempty(&crossed) {
            crossed
        } else {
            return None;
        };
        let j = JoinSubgraph::new(x, y);
        let flipped = !j.side_a.is_subset(&self.side_a);
        Some((j, flipped))
    }

    /// Coordinatewise containment up to swapping the sides of `self`.
    /// Returns `Some(flipped)` when `self` sits inside `outer`.
    pub fn inside(&self, outer: &JoinSubgraph) -> Option<bool> {
        if self.side_a.is_subset(&outer.side_a) && self.side_b.is_subset(&outer.side_b) {
            Some(false)
        } else if self.side_a.is_subset(&outer.side_b) && self.side_b.is_subset(&outer.side_a) {
            Some(true)
        } else {
            None
        }
    }

    pub fn display(&self, g: &SimplicialGraph) -> String {
        let side = |s: &BTreeSet<Vertex>| {
            s.iter().map(|&v| g.name(v)).collect::<Vec<_>>().join(",")
        };
        format!("<{}>x<{}>", side(&self.side_a), side(&self.side_b))
    }

    pub fn to_json(&self, g: &SimplicialGraph) -> serde_json::Value {
        let side = |s: &BTreeSet<Vertex>| s.iter().map(|&v| g.name(v)).collect::<Vec<_>>();
        json!({ "side_a": side(&self.side_a), "side_b": side(&self.side_b) })
    }
}

fn check_raag_graph(g: &SimplicialGraph) -> Result<()> {
    if let Some((a, b, c)) = find_triangle(g) {
        return Err(Error::Triangle(g.name(a).into(), g.name(b).into(), g.name(c).into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.edge_count() == 0 {
        return Err(Error::Precondition("graph has no edges".into()));
    }
    Ok(())
}

/// All maximal complete bipartite subgraphs of a triangle-free graph, sorted.
pub fn maximal_join_subgraphs(g: &SimplicialGraph) -> Result<Vec<JoinSubgraph>> {
    check_raag_graph(g)?;
    // closed sides are exactly the nonempty intersections of neighbourhoods
    let mut closed: BTreeSet<BTreeSet<Vertex>> = BTreeSet::new();
    let mut frontier: Vec<BTreeSet<Vertex>> = g
        .vertices()
        .map(|v| g.neighbors(v).clone())
        .filter(|s| !s.is_empty())
        .collect();
    let generators = frontier.clone();
    while let Some(s) = frontier.pop() {
        if !closed.insert(s.clone()) {
            continue;
        }
        for n in &generators {
            let t: BTreeSet<Vertex> = s.intersection(n).copied().collect();
            if !t.is_empty() && !closed.contains(&t) {
                frontier.push(t);
            }
        }
    }
    let common = |s: &BTreeSet<Vertex>| -> BTreeSet<Vertex> {
        g.vertices().filter(|&v| s.iter().all(|&u| g.has_edge(u, v))).collect()
    };
    let out: BTreeSet<JoinSubgraph> = closed
        .into_iter()
        .map(|b| JoinSubgraph::new(common(&b), b))
        .collect();
    Ok(out.into_iter().collect())
}

/// An ordered pair of vertex-disjoint standard subgraphs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductPair {
    pub first: Subgraph,
    pub second: Subgraph,
}

impl ProductPair {
    pub fn new(first: Subgraph, second: Subgraph) -> Self {
        Self { first, second }
    }

    pub fn swap(&self) -> Self {
        Self { first: self.second.clone(), second: self.first.clone() }
    }

    pub fn contains(&self, other: &ProductPair) -> bool {
        self.first.contains(&other.first) && self.second.contains(&other.second)
    }

    /// Free ranks of the two factors.
    pub fn ranks(&self, g: &SimplicialGraph) -> (usize, usize) {
        (self.first.cycle_rank(g), self.second.cycle_rank(g))
    }

    pub fn display(&self, g: &SimplicialGraph) -> String {
        let side = |s: &Subgraph| s.vertex_names(g).join(",");
        format!("{{{}}}x{{{}}}", side(&self.first), side(&self.second))
    }

    /// Names coordinates by the cycles of a cactus they contain.
    pub fn cycle_display(&self, a: &CactusAnalysis) -> String {
        let side = |s: &Subgraph| {
            a.cycles
                .iter()
                .enumerate()
                .filter(|(_, c)| s.contains(c))
                .map(|(i, _)| a.cycle_name(i))
                .collect::<Vec<_>>()
                .join(",")
        };
        format!("{{{}}}x{{{}}}", side(&self.first), side(&self.second))
    }

    pub fn to_json(&self, g: &SimplicialGraph) -> serde_json::Value {
        let side = |s: &Subgraph| json!({ "vertices": s.vertex_names(g), "edges": s.edge_names(g) });
        json!({ "first": side(&self.first), "second": side(&self.second) })
    }
}

/// Maximal products of a special cactus. Minimal edge cuts of a cactus are
/// single bridges (one per spine edge, whose two subtrees pull back to the
/// sides) and pairs of edges on one cycle (which split that cycle into two
/// arcs). Each cut whose two sides both carry a cycle gives a candidate; the
/// maximal candidates are kept. Cuts through a cycle only survive when the
/// cycle carries at least four branches.
pub fn maximal_products_cactus(a: &CactusAnalysis) -> Result<Vec<ProductPair>> {
    if !a.is_special {
        return Err(Error::Precondition("graph is not a special cactus".into()));
    }
    if a.cycles.len() < 2 {
        return Ok(Vec::new());
    }
    let spine = a.spine.as_ref().expect("special cacti have a spine");
    let mut out = BTreeSet::new();
    for (s, t) in spine.edges() {
        let side = |root: Vertex, cut: Vertex| {
            let mut seen = BTreeSet::from([root]);
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                for &w in spine.neighbors(u) {
                    if w != cut && seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            let edges = spine
                .edges()
                .filter(|(x, y)| seen.contains(x) && seen.contains(y))
                .collect();
            a.pullback(&seen, &edges).core()
        };
        let (x, y) = (side(s, t), side(t, s));
        if x.is_empty() || y.is_empty() {
            continue;
        }
        out.insert(ProductPair::new(x.clone(), y.clone()));
        out.insert(ProductPair::new(y, x));
    }
    let g = &a.graph;
    for order in &a.cycle_orders {
        let m = order.len();
        for i in 0..m {
            for j in i + 1..m {
                // arcs order[i+1..=j] and the rest, after cutting the edges
                // leaving order[i] and order[j] forwards
                let arc: BTreeSet<Vertex> = order[i + 1..=j].iter().copied().collect();
                let rest: BTreeSet<Vertex> = order.iter().copied().filter(|v| !arc.contains(v)).collect();
                let grow = |seed: &BTreeSet<Vertex>, avoid: &BTreeSet<Vertex>| {
                    let mut seen = seed.clone();
                    let mut stack: Vec<Vertex> = seed.iter().copied().collect();
                    while let Some(u) = stack.pop() {
                        for &w in g.neighbors(u) {
                            if !avoid.contains(&w) && seen.insert(w) {
                                stack.push(w);
                            }
                        }
                    }
                    Subgraph::induced(g, &seen).core()
                };
                let (x, y) = (grow(&arc, &rest), grow(&rest, &arc));
                if x.is_empty() || y.is_empty() {
                    continue;
                }
                out.insert(ProductPair::new(x.clone(), y.clone()));
                out.insert(ProductPair::new(y, x));
            }
        }
    }
    let all: Vec<ProductPair> = out.into_iter().collect();
    Ok(all
        .iter()
        .filter(|p| !all.iter().any(|q| q != *p && q.contains(p)))
        .cloned()
        .collect())
}

/// Vertex sets (as bitmasks) of connected induced subgraphs with minimum
/// valency two, i.e. the distinct nonempty cores of connected vertex sets.
pub fn standard_vertex_sets(g: &SimplicialGraph, cap: usize) -> Result<Vec<u64>> {
    let n = g.n();
    if n > cap || n > 64 {
        return Err(Error::CapExceeded { size: n, cap: cap.min(64) });
    }
    let nbr: Vec<u64> = g
        .vertices()
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w))
        .collect();
    let mut found = HashSet::new();
    for v in 0..n {
        let below = (1u64 << v) - 1;
        grow(&nbr, 1 << v, nbr[v] & !below, below | 1 << v, &mut found);
    }
    let mut out: Vec<u64> = found.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

fn grow(nbr: &[u64], cur: u64, cand: u64, forbid: u64, found: &mut HashSet<u64>) {
    let leafless = bits(cur).all(|u| (nbr[u] & cur).count_ones() >= 2);
    if leafless {
        found.insert(cur);
    }
    let mut cand = cand;
    let mut forbid = forbid;
    while cand != 0 {
        let w = cand.trailing_zeros() as usize;
        cand &= !(1 << w);
        forbid |= 1 << w;
        let next = (cand | nbr[w]) & !forbid & !cur;
        grow(nbr, cur | 1 << w, next, forbid, found);
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

fn mask_subgraph(g: &SimplicialGraph, m: u64) -> Subgraph {
    Subgraph::induced(g, &bits(m).collect())
}

/// Exhaustive enumeration of maximal pairs of disjoint standard subgraphs.
pub fn maximal_products_bruteforce(g: &SimplicialGraph, cap: usize) -> Result<Vec<ProductPair>> {
    let cores = standard_vertex_sets(g, cap)?;
    let supersets: Vec<Vec<u64>> = cores
        .iter()
        .map(|&a| cores.iter().copied().filter(|&b| b != a && b & a == a).collect())
        .collect();
    let mut out = Vec::new();
    for (i, &a) in cores.iter().enumerate() {
        for (j, &b) in cores.iter().enumerate() {
            if a & b != 0 {
                continue;
            }
            let a_max = supersets[i].iter().all(|&s| s & b != 0);
            let b_max = supersets[j].iter().all(|&s| s & a != 0);
            if a_max && b_max {
                out.push(ProductPair::new(mask_subgraph(g, a), mask_subgraph(g, b)));
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// The maximal standard products inside the intersection of the given
/// products: cored components of each coordinate intersection, all
/// combinations.
pub fn intersect_products(g: &SimplicialGraph, ps: &[ProductPair]) -> Vec<ProductPair> {
    let Some((head, rest)) = ps.split_first() else {
        return Vec::new();
    };
    let mut w1 = head.first.clone();
    let mut w2 = head.second.clone();
    for p in rest {
        w1 = w1.intersection(&p.first);
        w2 = w2.intersection(&p.second);
    }
    let pieces = |w: &Subgraph| -> Vec<Subgraph> {
        w.components(g)
            .into_iter()
            .map(|c| c.core())
            .filter(|c| !c.is_empty())
            .collect()
    };
    let (c1, c2) = (pieces(&w1), pieces(&w2));
    let mut out = Vec::new();
    for x in &c1 {
        for y in &c2 {
            out.push(ProductPair::new(x.clone(), y.clone()));
        }
    }
    out.sort();
    out
}
