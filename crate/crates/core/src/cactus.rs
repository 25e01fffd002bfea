//! Cactus recognition and the spine tree.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{edge, Edge, SimplicialGraph, Subgraph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CactusType {
    S,
    M,
    NotApplicable,
}

#[derive(Debug, Clone)]
pub struct CactusAnalysis {
    pub graph: SimplicialGraph,
    pub is_cactus: bool,
    pub is_special: bool,
    /// Boundary cycles as subgraphs, ordered by least vertex.
    pub cycles: Vec<Subgraph>,
    /// Cyclic vertex order of each cycle.
    pub cycle_orders: Vec<Vec<Vertex>>,
    /// Spine tree; `None` when the graph is not a cactus.
    pub spine: Option<SimplicialGraph>,
    /// Spine vertex of each cycle.
    pub joints: Vec<Vertex>,
    /// Spine vertex of each graph vertex (the map Psi on vertices).
    pub psi: Vec<Vertex>,
    pub cactus_type: CactusType,
    /// Valency-2 vertices on no cycle. Accepted, but reported.
    pub redundant: Vec<Vertex>,
}

impl CactusAnalysis {
    pub fn joint_of_spine_vertex(&self, s: Vertex) -> Option<usize> {
        self.joints.iter().position(|&j| j == s)
    }

    /// At least two cycles and no leaves: the range where the braid complex
    /// is modelled on `D2` of the spine.
    pub fn is_braid_regular(&self) -> bool {
        self.is_special && self.cycles.len() >= 2 && self.graph.vertices().all(|v| self.graph.degree(v) != 1)
    }

    /// Short display name of a cycle: the common prefix before `_` of its
    /// vertex names, or the sorted names joined by commas.
    pub fn cycle_name(&self, c: usize) -> String {
        cycle_display_name(&self.graph, &self.cycles[c])
    }

    /// Index of the cycle whose vertex set equals `vs`, if any.
    pub fn cycle_index(&self, s: &Subgraph) -> Option<usize> {
        self.cycles.iter().position(|c| c == s)
    }

    /// Pullback of a set of spine vertices: full cycles for joints, non-joint
    /// vertices verbatim, and every graph edge mapping inside the set (edges
    /// crossing spine edges are kept only if that spine edge is kept).
    pub fn pullback(&self, spine_vertices: &BTreeSet<Vertex>, spine_edges: &BTreeSet<Edge>) -> Subgraph {
        let vertices: BTreeSet<Vertex> = self
            .graph
            .vertices()
            .filter(|&v| spine_vertices.contains(&self.psi[v]))
            .collect();
        let edges = self
            .graph
            .edges()
            .filter(|&(a, b)| {
                let (pa, pb) = (self.psi[a], self.psi[b]);
                if !vertices.contains(&a) || !vertices.contains(&b) {
                    return false;
                }
                pa == pb || spine_edges.contains(&edge(pa, pb))
            })
            .collect();
        Subgraph { vertices, edges }
    }
}

pub fn cycle_display_name(g: &SimplicialGraph, s: &Subgraph) -> String {
    let names: Vec<&str> = s.vertices.iter().map(|&v| g.name(v)).collect();
    let prefix = |n: &str| n.split_once('_').map(|(p, _)| p.to_string());
    if let Some(p) = names.first().and_then(|n| prefix(n)) {
        if names.iter().all(|n| prefix(n).as_deref() == Some(p.as_str())) {
            return p;
        }
    }
    names.join(",")
}

/// Edge-biconnected blocks via Tarjan's lowpoint algorithm. Returns the edge
/// set of each block.
pub fn biconnected_blocks(g: &SimplicialGraph) -> Vec<BTreeSet<Edge>> {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut stack: Vec<Edge> = Vec::new();
    let mut blocks = Vec::new();
    for root in g.vertices() {
        if disc[root] != usize::MAX {
            continue;
        }
        // iterative DFS: (vertex, parent, neighbour list, position)
        let mut frames: Vec<(Vertex, Option<Vertex>, Vec<Vertex>, usize)> =
            vec![(root, None, g.neighbors(root).iter().copied().collect(), 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(frame) = frames.last_mut() {
            let (u, parent) = (frame.0, frame.1);
            if frame.3 < frame.2.len() {
                let w = frame.2[frame.3];
                frame.3 += 1;
                if Some(w) == parent {
                    continue;
                }
                if disc[w] == usize::MAX {
                    stack.push(edge(u, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    frames.push((w, Some(u), g.neighbors(w).iter().copied().collect(), 0));
                } else if disc[w] < disc[u] {
                    stack.push(edge(u, w));
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                frames.pop();
                if let Some(p) = parent {
                    low[p] = low[p].min(low[u]);
                    if low[u] >= disc[p] {
                        let mut block = BTreeSet::new();
                        let target = edge(p, u);
                        while let Some(e) = stack.pop() {
                            block.insert(e);
                            if e == target {
                                break;
                            }
                        }
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks
}

fn cyclic_order(vs: &BTreeSet<Vertex>, es: &BTreeSet<Edge>) -> Vec<Vertex> {
    let start = *vs.iter().next().unwrap();
    let nbrs = |v: Vertex| -> Vec<Vertex> {
        let mut n: Vec<Vertex> = es
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect();
        n.sort_unstable();
        n
    };
    let mut order = vec![start];
    let mut prev = start;
    let mut cur = nbrs(start)[0];
    while cur != start {
        order.push(cur);
        let next = nbrs(cur).into_iter().find(|&w| w != prev).unwrap();
        prev = cur;
        cur = next;
    }
    order
}

/// Recognizes cacti, extracts their cycles and contracts each cycle to a
/// joint of the spine.
pub fn analyze_cactus(g: &SimplicialGraph) -> Result<CactusAnalysis> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut cycles = Vec::new();
    let mut is_cactus = true;
    for block in biconnected_blocks(g) {
        if block.len() == 1 {
            continue;
        }
        let vs: BTreeSet<Vertex> = block.iter().flat_map(|&(a, b)| [a, b]).collect();
        let sub = Subgraph { vertices: vs, edges: block };
        let two_regular = sub.vertices.iter().all(|&v| sub.degree_in(v) == 2);
        if !(two_regular && sub.edges.len() == sub.vertices.len()) {
            is_cactus = false;
        }
        cycles.push(sub);
    }
    let mut a = CactusAnalysis {
        graph: g.clone(),
        is_cactus,
        is_special: false,
        cycles: Vec::new(),
        cycle_orders: Vec::new(),
        spine: None,
        joints: Vec::new(),
        psi: Vec::new(),
        cactus_type: CactusType::NotApplicable,
        redundant: Vec::new(),
    };
    if !is_cactus {
        return Ok(a);
    }
    cycles.sort_by_key(|c| *c.vertices.iter().next().unwrap());
    let mut on_cycles: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
    for (i, c) in cycles.iter().enumerate() {
        for &v in &c.vertices {
            on_cycles.entry(v).or_default().push(i);
        }
    }
    a.is_special = on_cycles.values().all(|cs| cs.len() == 1);
    a.cycle_orders = cycles.iter().map(|c| cyclic_order(&c.vertices, &c.edges)).collect();
    a.redundant = g
        .vertices()
        .filter(|&v| g.degree(v) == 2 && !on_cycles.contains_key(&v))
        .collect();

    // spine: one joint per cycle; vertices on one cycle collapse into it,
    // vertices on several cycles (non-special case) stay and touch each joint
    let mut spine = SimplicialGraph::new();
    let mut psi = vec![usize::MAX; g.n()];
    let mut joints = vec![usize::MAX; cycles.len()];
    for v in g.vertices() {
        match on_cycles.get(&v).map(|c| c.as_slice()) {
            None => psi[v] = spine.add_vertex(g.name(v))?,
            Some([c]) => {
                if joints[*c] == usize::MAX {
                    let name = format!("<{}>", cycle_display_name(g, &cycles[*c]));
                    joints[*c] = spine.add_vertex(&name)?;
                }
                psi[v] = joints[*c];
            }
            Some(_) => psi[v] = spine.add_vertex(g.name(v))?,
        }
    }
    for (c, j) in joints.iter_mut().enumerate() {
        if *j == usize::MAX {
            *j = spine.add_vertex(&format!("<{}>", cycle_display_name(g, &cycles[c])))?;
        }
    }
    for (x, y) in g.edges() {
        let shared = |v: Vertex| on_cycles.get(&v).is_some_and(|c| c.len() > 1);
        if on_cycles.contains_key(&x) && on_cycles.contains_key(&y) {
            let cx = &on_cycles[&x];
            if on_cycles[&y].iter().any(|c| cx.contains(c)) {
                // cycle edge
                if shared(x) || shared(y) {
                    let c = *on_cycles[&y].iter().find(|c| cx.contains(c)).unwrap();
                    for v in [x, y] {
                        if shared(v) && !spine.has_edge(psi[v], joints[c]) {
                            spine.add_edge(psi[v], joints[c])?;
                        }
                    }
                }
                continue;
            }
        }
        if psi[x] != psi[y] && !spine.has_edge(psi[x], psi[y]) {
            spine.add_edge(psi[x], psi[y])?;
        }
    }
    a.cactus_type = if a.is_special { spine_type(&spine, &joints) } else { CactusType::NotApplicable };
    a.cycles = cycles;
    a.spine = Some(spine);
    a.joints = joints;
    a.psi = psi;
    Ok(a)
}

/// Type S iff the spine, with valency-2 non-joint vertices suppressed, is a
/// path whose end vertices are joints.
fn spine_type(spine: &SimplicialGraph, joints: &[Vertex]) -> CactusType {
    let is_joint = |v: Vertex| joints.contains(&v);
    if spine.vertices().any(|v| spine.degree(v) > 2) {
        return CactusType::M;
    }
    let leaves: Vec<Vertex> = spine.vertices().filter(|&v| spine.degree(v) <= 1).collect();
    if leaves.iter().all(|&v| is_joint(v)) {
        CactusType::S
    } else {
        CactusType::M
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use proptest::prelude::*;

    #[test]
    fn o3_is_special_type_m() {
        let a = analyze_cactus(&corpus::o_k(3)).unwrap();
        assert!(a.is_cactus && a.is_special);
        assert_eq!(a.cycles.len(), 3);
        assert_eq!(a.cactus_type, CactusType::M);
        let spine = a.spine.as_ref().unwrap();
        assert!(spine.is_tree());
        assert_eq!(spine.n(), 4);
        let x = spine.vertex("x").unwrap();
        assert_eq!(spine.degree(x), 3);
        assert!(a.joints.iter().all(|&j| spine.degree(j) == 1));
        assert_eq!(a.cycle_name(0), "a1");
    }

    #[test]
    fn two_triangle_chain_is_type_s() {
        let a = analyze_cactus(&corpus::triangle_chain(2)).unwrap();
        assert!(a.is_special);
        assert_eq!(a.cactus_type, CactusType::S);
        assert_eq!(a.spine.unwrap().edge_count(), 1);
    }

    #[test]
    fn k4_is_not_a_cactus() {
        let a = analyze_cactus(&corpus::complete(4)).unwrap();
        assert!(!a.is_cactus);
        assert!(a.spine.is_none());
        assert_eq!(a.cactus_type, CactusType::NotApplicable);
        assert!(!analyze_cactus(&corpus::nested_squares()).unwrap().is_cactus);
    }

    #[test]
    fn bowtie_is_cactus_but_not_special() {
        let g = SimplicialGraph::from_edges(
            &["a", "b", "c", "d", "e"],
            &[("a", "b"), ("b", "c"), ("c", "a"), ("c", "d"), ("d", "e"), ("e", "c")],
        );
        let a = analyze_cactus(&g).unwrap();
        assert!(a.is_cactus && !a.is_special);
        assert!(a.spine.as_ref().unwrap().is_tree());
        assert_eq!(a.cactus_type, CactusType::NotApplicable);
    }

    #[test]
    fn redundant_vertices_are_flagged() {
        let g = corpus::chain_with_redundant();
        let a = analyze_cactus(&g).unwrap();
        assert_eq!(a.redundant, vec![g.vertex("r").unwrap()]);
        assert_eq!(a.cactus_type, CactusType::S);
    }

    #[test]
    fn o4_prime_spine_has_non_joint_edge() {
        let a = analyze_cactus(&corpus::o_prime(0)).unwrap();
        let s = a.spine.as_ref().unwrap();
        let (x, y) = (s.vertex("x1").unwrap(), s.vertex("y1").unwrap());
        assert!(s.has_edge(x, y));
        assert_eq!(a.cactus_type, CactusType::M);
    }

    #[test]
    fn disconnected_input_is_rejected() {
        let g = corpus::cycle(3).disjoint_union(&corpus::cycle(3).renamed(|s| s.to_uppercase())).unwrap();
        assert_eq!(analyze_cactus(&g).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn edge_count_identity_on_corpus() {
        for (name, g) in corpus::special_cacti() {
            let a = analyze_cactus(&g).unwrap();
            assert!(a.is_special, "{name}");
            let spine = a.spine.as_ref().unwrap();
            assert!(spine.is_tree(), "{name}");
            let contracted: usize = a.cycles.iter().map(|c| c.edges.len()).sum();
            assert_eq!(contracted + spine.edge_count(), g.edge_count(), "{name}");
        }
    }

    proptest! {
        #[test]
        fn random_special_cacti_satisfy_spine_invariants(
            lens in proptest::collection::vec(3usize..6, 1..6),
            attach in proptest::collection::vec(0usize..100, 6),
        ) {
            // random tree of cycles: cycle i hangs off some earlier cycle
            let mut b = corpus::CactusBuilder::new();
            let mut sizes = Vec::new();
            for (k, &m) in lens.iter().enumerate() {
                let i = b.cycle(m);
                sizes.push(m);
                if k > 0 {
                    let p = attach[k] % k;
                    // use vertex 1 of parent when free, else a new bridge vertex
                    let hub = format!("h{i}");
                    b.vertex(&hub);
                    b.edge(&format!("a{}_{}", p + 1, attach[k] % sizes[p]), &hub);
                    b.edge(&hub, &format!("a{i}_0"));
                }
            }
            let g = b.finish();
            let a = analyze_cactus(&g).unwrap();
            prop_assert!(a.is_special);
            let spine = a.spine.as_ref().unwrap();
            prop_assert!(spine.is_tree());
            let contracted: usize = a.cycles.iter().map(|c| c.edges.len()).sum();
            prop_assert_eq!(contracted + spine.edge_count(), g.edge_count());
            prop_assert_eq!(a.cycles.len(), lens.len());
        }
    }
}
