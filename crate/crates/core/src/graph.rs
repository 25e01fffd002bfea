//! Finite simplicial graphs and their subgraphs.
//!
//! Vertices are user strings, stored by index in declaration order. Every
//! canonical ordering in the crate is by that index.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type Edge = (Vertex, Vertex);

/// Normalizes an unordered pair so the smaller index comes first.
pub fn edge(a: Vertex, b: Vertex) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SimplicialGraph {
    names: Vec<String>,
    index: HashMap<String, Vertex>,
    adj: Vec<BTreeSet<Vertex>>,
    edges: BTreeSet<Edge>,
}

impl PartialEq for SimplicialGraph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}

impl Eq for SimplicialGraph {}

impl SimplicialGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from names and edges given by name. Panics on bad input;
    /// meant for fixtures.
    pub fn from_edges(vertices: &[&str], edges: &[(&str, &str)]) -> Self {
        let mut g = Self::new();
        for v in vertices {
            g.add_vertex(v).expect("duplicate vertex");
        }
        for (a, b) in edges {
            let (a, b) = (g.vertex(a).expect("unknown"), g.vertex(b).expect("unknown"));
            g.add_edge(a, b).expect("bad edge");
        }
        g
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<Vertex> {
        if self.index.contains_key(name) {
            return Err(Error::Precondition(format!("duplicate vertex `{name}`")));
        }
        let v = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), v);
        self.adj.push(BTreeSet::new());
        Ok(v)
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<()> {
        if a == b {
            return Err(Error::Precondition("loop edge".into()));
        }
        if a >= self.n() || b >= self.n() {
            return Err(Error::Precondition("edge endpoint out of range".into()));
        }
        if !self.edges.insert(edge(a, b)) {
            return Err(Error::Precondition(format!(
                "multi-edge {} {}",
                self.names[a], self.names[b]
            )));
        }
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<Vertex> {
        self.index.get(name).copied()
    }

    pub fn vertex_or_err(&self, name: &str) -> Result<Vertex> {
        self.vertex(name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn neighbors(&self, v: Vertex) -> &BTreeSet<Vertex> {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        a != b && self.edges.contains(&edge(a, b))
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.n()
    }

    /// Link of `v`: its neighbours.
    pub fn link(&self, v: Vertex) -> BTreeSet<Vertex> {
        self.adj[v].clone()
    }

    /// Closed star of `v`: `v` together with its neighbours.
    pub fn star(&self, v: Vertex) -> BTreeSet<Vertex> {
        let mut s = self.adj[v].clone();
        s.insert(v);
        s
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && Subgraph::full(self).is_connected(self)
    }

    /// Connected components as vertex sets, ordered by least member.
    pub fn components(&self) -> Vec<BTreeSet<Vertex>> {
        Subgraph::full(self)
            .components(self)
            .into_iter()
            .map(|c| c.vertices)
            .collect()
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edge_count() + 1 == self.n()
    }

    /// Largest graph distance between two vertices of a connected graph.
    pub fn diameter(&self) -> Option<usize> {
        if !self.is_connected() {
            return None;
        }
        let mut best = 0;
        for s in self.vertices() {
            let d = self.bfs_distances(s);
            best = best.max(d.iter().filter_map(|x| *x).max().unwrap_or(0));
        }
        Some(best)
    }

    pub fn bfs_distances(&self, s: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Induced subgraph on `keep`, as a standalone graph (declaration order kept).
    pub fn induced(&self, keep: &BTreeSet<Vertex>) -> SimplicialGraph {
        let mut g = SimplicialGraph::new();
        let mut map = HashMap::new();
        for &v in keep {
            map.insert(v, g.add_vertex(&self.names[v]).unwrap());
        }
        for (a, b) in self.edges() {
            if let (Some(&x), Some(&y)) = (map.get(&a), map.get(&b)) {
                g.add_edge(x, y).unwrap();
            }
        }
        g
    }

    /// Same graph with vertices renamed through `f`.
    pub fn renamed(&self, f: impl Fn(&str) -> String) -> SimplicialGraph {
        let mut g = SimplicialGraph::new();
        for n in &self.names {
            g.add_vertex(&f(n)).expect("renaming must stay injective");
        }
        for (a, b) in self.edges() {
            g.add_edge(a, b).unwrap();
        }
        g
    }

    /// Same graph with vertices declared in the order given by `perm`
    /// (`perm[i]` is the old index placed at position `i`).
    pub fn permuted(&self, perm: &[Vertex]) -> SimplicialGraph {
        let mut g = SimplicialGraph::new();
        let mut pos = vec![0; self.n()];
        for (i, &old) in perm.iter().enumerate() {
            g.add_vertex(&self.names[old]).unwrap();
            pos[old] = i;
        }
        for (a, b) in self.edges() {
            g.add_edge(pos[a], pos[b]).unwrap();
        }
        g
    }

    /// Disjoint union; names of `other` must not clash.
    pub fn disjoint_union(&self, other: &SimplicialGraph) -> Result<SimplicialGraph> {
        let mut g = self.clone();
        let off = g.n();
        for n in &other.names {
            g.add_vertex(n)?;
        }
        for (a, b) in other.edges() {
            g.add_edge(a + off, b + off)?;
        }
        Ok(g)
    }
}

/// Parses the line format: `# comment`, `v <name>`, `e <a> <b>`.
pub fn parse_graph(text: &str) -> Result<SimplicialGraph> {
    let mut g = SimplicialGraph::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| Error::Parse { line, msg };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        match toks.as_slice() {
            ["v", name] => {
                g.add_vertex(name)
                    .map_err(|_| err(format!("duplicate vertex `{name}`")))?;
            }
            ["e", a, b] => {
                let x = g
                    .vertex(a)
                    .ok_or_else(|| err(format!("unknown endpoint `{a}`")))?;
                let y = g
                    .vertex(b)
                    .ok_or_else(|| err(format!("unknown endpoint `{b}`")))?;
                if x == y {
                    return Err(err("loop edge".into()));
                }
                if g.has_edge(x, y) {
                    return Err(err(format!("multi-edge {a} {b}")));
                }
                g.add_edge(x, y).map_err(|e| err(e.to_string()))?;
            }
            _ => return Err(err(format!("unrecognized line `{body}`"))),
        }
    }
    Ok(g)
}

/// Canonical text form: vertices in declared order, then edges sorted.
pub fn serialize_graph(g: &SimplicialGraph) -> String {
    let mut s = String::new();
    for n in g.names() {
        writeln!(s, "v {n}").unwrap();
    }
    for (a, b) in g.edges() {
        writeln!(s, "e {} {}", g.name(a), g.name(b)).unwrap();
    }
    s
}

/// A subgraph of some parent graph, compared by vertex and edge sets.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subgraph {
    pub vertices: BTreeSet<Vertex>,
    pub edges: BTreeSet<Edge>,
}

impl Subgraph {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full(g: &SimplicialGraph) -> Self {
        Self {
            vertices: g.vertices().collect(),
            edges: g.edges().collect(),
        }
    }

    pub fn induced(g: &SimplicialGraph, vs: &BTreeSet<Vertex>) -> Self {
        let edges = g
            .edges()
            .filter(|(a, b)| vs.contains(a) && vs.contains(b))
            .collect();
        Self {
            vertices: vs.clone(),
            edges,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn adjacency(&self) -> HashMap<Vertex, Vec<Vertex>> {
        let mut adj: HashMap<Vertex, Vec<Vertex>> =
            self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for &(a, b) in &self.edges {
            adj.get_mut(&a).unwrap().push(b);
            adj.get_mut(&b).unwrap().push(a);
        }
        adj
    }

    pub fn degree_in(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Connected components, ordered by least vertex.
    pub fn components(&self, _g: &SimplicialGraph) -> Vec<Subgraph> {
        let adj = self.adjacency();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &s in &self.vertices {
            if seen.contains(&s) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![s];
            seen.insert(s);
            while let Some(u) = stack.pop() {
                comp.insert(u);
                for &w in &adj[&u] {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            let edges = self
                .edges
                .iter()
                .filter(|(a, _)| comp.contains(a))
                .copied()
                .collect();
            out.push(Subgraph {
                vertices: comp,
                edges,
            });
        }
        out
    }

    pub fn is_connected(&self, g: &SimplicialGraph) -> bool {
        self.components(g).len() == 1
    }

    /// Iteratively deletes vertices of valency at most one.
    pub fn core(&self) -> Subgraph {
        let mut adj = self.adjacency();
        let mut deg: HashMap<Vertex, usize> = adj.iter().map(|(&v, n)| (v, n.len())).collect();
        let mut removed = BTreeSet::new();
        let mut stack: Vec<Vertex> = deg.iter().filter(|(_, &d)| d <= 1).map(|(&v, _)| v).collect();
        while let Some(v) = stack.pop() {
            if !removed.insert(v) {
                continue;
            }
            for w in adj.remove(&v).unwrap_or_default() {
                if removed.contains(&w) {
                    continue;
                }
                let d = deg.get_mut(&w).unwrap();
                *d -= 1;
                if *d <= 1 {
                    stack.push(w);
                }
            }
        }
        let vertices: BTreeSet<Vertex> = self.vertices.difference(&removed).copied().collect();
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| vertices.contains(a) && vertices.contains(b))
            .copied()
            .collect();
        Subgraph { vertices, edges }
    }

    /// First Betti number `|E| - |V| + components`.
    pub fn cycle_rank(&self, g: &SimplicialGraph) -> usize {
        let c = self.components(g).len();
        self.edges.len() + c - self.vertices.len()
    }

    /// Connected, leafless and containing a cycle.
    pub fn is_standard(&self, g: &SimplicialGraph) -> bool {
        !self.is_empty()
            && self.is_connected(g)
            && self.vertices.iter().all(|&v| self.degree_in(v) >= 2)
    }

    pub fn contains(&self, other: &Subgraph) -> bool {
        other.vertices.is_subset(&self.vertices) && other.edges.is_subset(&self.edges)
    }

    pub fn intersection(&self, other: &Subgraph) -> Subgraph {
        Subgraph {
            vertices: self.vertices.intersection(&other.vertices).copied().collect(),
            edges: self.edges.intersection(&other.edges).copied().collect(),
        }
    }

    pub fn is_disjoint(&self, other: &Subgraph) -> bool {
        self.vertices.is_disjoint(&other.vertices)
    }

    pub fn vertex_names(&self, g: &SimplicialGraph) -> Vec<String> {
        self.vertices.iter().map(|&v| g.name(v).to_string()).collect()
    }

    pub fn edge_names(&self, g: &SimplicialGraph) -> Vec<[String; 2]> {
        self.edges
            .iter()
            .map(|&(a, b)| [g.name(a).to_string(), g.name(b).to_string()])
            .collect()
    }
}

/// Core of a subgraph (alias kept for the public operation name).
pub fn core(s: &Subgraph) -> Subgraph {
    s.core()
}

pub fn is_triangle_free(g: &SimplicialGraph) -> bool {
    find_triangle(g).is_none()
}

pub fn find_triangle(g: &SimplicialGraph) -> Option<(Vertex, Vertex, Vertex)> {
    for (a, b) in g.edges() {
        if let Some(&c) = g.neighbors(a).intersection(g.neighbors(b)).find(|&&c| c > b) {
            return Some((a, b, c));
        }
    }
    None
}

/// All induced `n`-cycles, each rotated to start at its least vertex with
/// the lesser neighbour second.
pub fn detect_induced_cycles(g: &SimplicialGraph, n: usize) -> Vec<Vec<Vertex>> {
    assert!(n >= 3, "cycle length must be at least 3");
    let mut out = Vec::new();
    for s in g.vertices() {
        let mut path = vec![s];
        extend_cycle(g, n, &mut path, &mut out);
    }
    out.sort();
    out
}

fn extend_cycle(g: &SimplicialGraph, n: usize, path: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
    let s = path[0];
    let last = *path.last().unwrap();
    if path.len() == n {
        if g.has_edge(last, s) && path[1] < path[n - 1] {
            out.push(path.clone());
        }
        return;
    }
    for &w in g.neighbors(last) {
        if w <= s || path.contains(&w) {
            continue;
        }
        // chordless: w may touch only `last`, and `s` only when closing
        let closing = path.len() + 1 == n;
        let ok = path[..path.len() - 1]
            .iter()
            .enumerate()
            .all(|(i, &p)| !g.has_edge(p, w) || (i == 0 && closing));
        if ok {
            path.push(w);
            extend_cycle(g, n, path, out);
            path.pop();
        }
    }
}

/// One isomorphism `g1 -> g2` as a vector indexed by `g1` vertices.
pub fn graph_isomorphic(g1: &SimplicialGraph, g2: &SimplicialGraph) -> Option<Vec<Vertex>> {
    if g1.n() != g2.n() || g1.edge_count() != g2.edge_count() {
        return None;
    }
    let c1 = refine_colors(g1);
    let c2 = refine_colors(g2);
    let mut h1: Vec<u64> = c1.clone();
    let mut h2: Vec<u64> = c2.clone();
    h1.sort_unstable();
    h2.sort_unstable();
    if h1 != h2 {
        return None;
    }
    // BFS order from the rarest color keeps the search connected
    let order = search_order(g1, &c1);
    let mut map = vec![usize::MAX; g1.n()];
    let mut used = vec![false; g2.n()];
    if iso_extend(g1, g2, &c1, &c2, &order, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

/// Color refinement (1-dimensional Weisfeiler-Leman) seeded by degree.
pub fn refine_colors(g: &SimplicialGraph) -> Vec<u64> {
    use std::collections::hash_map::DefaultHasher;
    use std::hash::{Hash, Hasher};
    let mut col: Vec<u64> = g.vertices().map(|v| g.degree(v) as u64).collect();
    for _ in 0..g.n().max(1) {
        let next: Vec<u64> = g
            .vertices()
            .map(|v| {
                let mut ns: Vec<u64> = g.neighbors(v).iter().map(|&w| col[w]).collect();
                ns.sort_unstable();
                let mut h = DefaultHasher::new();
                col[v].hash(&mut h);
                ns.hash(&mut h);
                h.finish()
            })
            .collect();
        let classes = |c: &[u64]| c.iter().collect::<BTreeSet<_>>().len();
        let stable = classes(&next) == classes(&col);
        col = next;
        if stable {
            break;
        }
    }
    col
}

fn search_order(g: &SimplicialGraph, col: &[u64]) -> Vec<Vertex> {
    let mut freq: HashMap<u64, usize> = HashMap::new();
    for &c in col {
        *freq.entry(c).or_default() += 1;
    }
    let mut seen = vec![false; g.n()];
    let mut order = Vec::with_capacity(g.n());
    while order.len() < g.n() {
        let start = g
            .vertices()
            .filter(|&v| !seen[v])
            .min_by_key(|&v| (freq[&col[v]], v))
            .unwrap();
        seen[start] = true;
        let mut q = VecDeque::from([start]);
        while let Some(u) = q.pop_front() {
            order.push(u);
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
    }
    order
}

#[allow(clippy::too_many_arguments)]
fn iso_extend(
    g1: &SimplicialGraph,
    g2: &SimplicialGraph,
    c1: &[u64],
    c2: &[u64],
    order: &[Vertex],
    k: usize,
    map: &mut Vec<Vertex>,
    used: &mut Vec<bool>,
) -> bool {
    if k == order.len() {
        return true;
    }
    let v = order[k];
    for w in g2.vertices() {
        if used[w] || c1[v] != c2[w] {
            continue;
        }
        let consistent = order[..k]
            .iter()
            .all(|&u| g1.has_edge(u, v) == g2.has_edge(map[u], w));
        if !consistent {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if iso_extend(g1, g2, c1, c2, order, k + 1, map, used) {
            return true;
        }
        used[w] = false;
        map[v] = usize::MAX;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn parses_smallest_graph() {
        let g = parse_graph("v a\nv b\ne a b").unwrap();
        assert_eq!((g.n(), g.edge_count()), (2, 1));
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = parse_graph("v a\ne a a").unwrap_err();
        assert_eq!(e, Error::Parse { line: 2, msg: "loop edge".into() });
        assert!(matches!(parse_graph("v a\nv a"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("v a\ne a b"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(
            parse_graph("v a\nv b\ne a b\ne b a"),
            Err(Error::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_graph("# path\n\nv a  # first\nv b\ne a b\n").unwrap();
        assert_eq!(g.n(), 2);
    }

    #[test]
    fn path_cores_to_nothing() {
        let p4 = corpus::path(4);
        assert_eq!((p4.n(), p4.edge_count()), (4, 3));
        assert!(Subgraph::full(&p4).core().is_empty());
    }

    #[test]
    fn triangle_with_pendant() {
        let g = SimplicialGraph::from_edges(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")],
        );
        let c = Subgraph::full(&g).core();
        assert_eq!(c.vertices, [0, 1, 2].into_iter().collect());
        assert_eq!(c.edges.len(), 3);
    }

    #[test]
    fn hull_of_two_triangles_in_o3_is_leafless() {
        let g = corpus::o_k(3);
        let keep: BTreeSet<Vertex> = ["x", "a2_0", "a2_1", "a2_2", "a3_0", "a3_1", "a3_2"]
            .iter()
            .map(|n| g.vertex(n).unwrap())
            .collect();
        let hull = Subgraph::induced(&g, &keep);
        assert_eq!(hull.core(), hull);
    }

    #[test]
    fn induced_cycles() {
        assert_eq!(detect_induced_cycles(&corpus::cycle(5), 5).len(), 1);
        assert!(detect_induced_cycles(&corpus::cycle(5), 4).is_empty());
        assert_eq!(detect_induced_cycles(&corpus::cycle(6), 6), vec![vec![0, 1, 2, 3, 4, 5]]);
        assert!(detect_induced_cycles(&corpus::cycle(6), 4).is_empty());
        // K4 has four triangles and no induced 4-cycle
        let k4 = corpus::complete(4);
        assert_eq!(detect_induced_cycles(&k4, 3).len(), 4);
        assert!(detect_induced_cycles(&k4, 4).is_empty());
        // C4 plus a chord: two triangles, no induced 4-cycle
        let mut g = corpus::cycle(4);
        g.add_edge(0, 2).unwrap();
        assert_eq!(detect_induced_cycles(&g, 3).len(), 2);
        assert!(detect_induced_cycles(&g, 4).is_empty());
    }

    #[test]
    fn exhaustive_four_subset_check_on_c6() {
        // independent oracle: a 4-subset spans an induced 4-cycle iff its
        // induced graph is 2-regular with 4 edges
        let g = corpus::cycle(6);
        let mut count = 0;
        for mask in 0u32..64 {
            if mask.count_ones() != 4 {
                continue;
            }
            let vs: BTreeSet<Vertex> = (0..6).filter(|i| mask >> i & 1 == 1).collect();
            let s = Subgraph::induced(&g, &vs);
            if s.edges.len() == 4 && vs.iter().all(|&v| s.degree_in(v) == 2) {
                count += 1;
            }
        }
        assert_eq!(count, 0);
    }

    #[test]
    fn isomorphism_examples() {
        let c5 = corpus::cycle(5);
        let relabelled = c5.permuted(&[3, 0, 4, 1, 2]).renamed(|s| format!("{s}'"));
        let m = graph_isomorphic(&c5, &relabelled).unwrap();
        for (a, b) in c5.edges() {
            assert!(relabelled.has_edge(m[a], m[b]));
        }
        assert!(graph_isomorphic(&c5, &corpus::cycle(6)).is_none());
        assert!(graph_isomorphic(&corpus::path(4), &corpus::star(3)).is_none());
        let p = corpus::petersen();
        assert!(graph_isomorphic(&p, &p.permuted(&[9, 8, 7, 6, 5, 4, 3, 2, 1, 0])).is_some());
        assert!(graph_isomorphic(&p, &corpus::cycle(10)).is_none());
    }

    #[test]
    fn triangle_freeness() {
        assert!(is_triangle_free(&corpus::cycle(5)));
        assert!(!is_triangle_free(&corpus::cycle(3)));
        assert!(is_triangle_free(&corpus::petersen()));
    }

    #[test]
    fn exhaustive_triple_scan_on_petersen() {
        let g = corpus::petersen();
        let n = g.n();
        let mut triangles = 0;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                        triangles += 1;
                    }
                }
            }
        }
        assert_eq!(triangles, 0);
    }

    #[test]
    fn diameter_and_trees() {
        assert_eq!(corpus::path(4).diameter(), Some(3));
        assert!(corpus::path(6).is_tree());
        assert!(!corpus::cycle(5).is_tree());
        assert_eq!(corpus::star(3).diameter(), Some(2));
    }
}
