//! Finite truncations of developments: balls of the intersection complex of
//! the universal cover of a Salvetti complex, and truncated Bass-Serre trees
//! of one-dimensional braid complexes of groups.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde_json::json;

use crate::cactus::analyze_cactus;
use crate::error::{Error, Result};
use crate::graph::{SimplicialGraph, Vertex};
use crate::homology::{self, UnionFind};
use crate::join::{build_ri_raag, vertex_classification, JoinComplex, Kind, Label, VertexType};
use crate::words::{ball, coset_key, max_right_divisor, normal_form, FactorLength, Letter, NormalForm};

/// Default limit on the number of group elements or tree vertices.
pub const DEFAULT_ELEMENT_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DevVertex {
    /// Coset key (Salvetti) or tree address (graph of groups).
    pub key: String,
    /// Base vertex under the quotient map.
    pub base: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DevSimplex {
    pub verts: Vec<usize>,
    pub base: usize,
    /// Codimension-one faces, as indices into `simplices`; empty for edges.
    pub faces: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct DevelopmentBall {
    pub base: JoinComplex,
    pub radius: usize,
    pub word_bound: usize,
    pub vertices: Vec<DevVertex>,
    /// Simplices of dimension at least one.
    pub simplices: Vec<DevSimplex>,
    /// Vertices whose neighbourhoods are known to be incomplete.
    pub boundary: BTreeSet<usize>,
    /// Group elements (Salvetti) or tree vertices generated.
    pub elements: usize,
}

impl DevelopmentBall {
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.simplices.iter().filter(|s| s.verts.len() == 2).map(|s| (s.verts[0], s.verts[1])).collect()
    }

    pub fn neighbors(&self, x: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for (a, b) in self.edges() {
            if a == x {
                out.insert(b);
            } else if b == x {
                out.insert(a);
            }
        }
        out
    }

    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(|x| !self.boundary.contains(x))
    }

    pub fn components(&self) -> usize {
        homology::graph_components(self.vertices.len(), &self.edges())
    }

    pub fn betti1(&self) -> usize {
        let mut edge_index = HashMap::new();
        let mut edges = Vec::new();
        for (i, s) in self.simplices.iter().enumerate() {
            if s.verts.len() == 2 {
                edge_index.insert(i, edges.len());
                edges.push((s.verts[0], s.verts[1]));
            }
        }
        let cells: Vec<Vec<(usize, i64)>> = self
            .simplices
            .iter()
            .filter(|s| s.verts.len() == 3)
            .map(|s| {
                s.faces
                    .iter()
                    .map(|&f| {
                        let fv = &self.simplices[f].verts;
                        let k = s.verts.iter().position(|x| !fv.contains(x)).unwrap();
                        (edge_index[&f], if k % 2 == 0 { 1 } else { -1 })
                    })
                    .collect()
            })
            .collect();
        homology::betti1(self.vertices.len(), &edges, &cells)
    }

    /// Whether deleting `x` increases the number of components.
    pub fn is_cut_vertex(&self, x: usize) -> bool {
        let edges = self.edges();
        let n = self.vertices.len();
        let before = homology::graph_components(n, &edges);
        let mut uf = UnionFind::new(n);
        for &(a, b) in &edges {
            if a != x && b != x {
                uf.union(a, b);
            }
        }
        let after = (0..n).filter(|&u| u != x && uf.find(u) == u).count();
        after > before
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vertices: Vec<_> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| {
                json!({
                    "id": i,
                    "key": v.key,
                    "rho": v.base,
                    "label": self.base.simplices[v.base].name,
                    "boundary": self.boundary.contains(&i),
                })
            })
            .collect();
        let simplices: Vec<_> =
            self.simplices.iter().map(|s| json!({"verts": s.verts, "rho": s.base})).collect();
        json!({
            "kind": match self.base.kind { Kind::Raag => "raag", Kind::Braid => "braid" },
            "radius": self.radius,
            "word_bound": self.word_bound,
            "elements": self.elements,
            "betti1": self.betti1(),
            "vertices": vertices,
            "simplices": simplices,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph development {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(
                s,
                "  {i} [label=\"{}\\nrho:{}\", boundary={}];",
                self.base.simplices[v.base].name.replace('"', "'"),
                v.base,
                self.boundary.contains(&i)
            );
        }
        for (a, b) in self.edges() {
            let _ = writeln!(s, "  {a} -- {b};");
        }
        s.push_str("}\n");
        s
    }
}

fn support(label: &Label) -> BTreeSet<Vertex> {
    let (a, b) = label.coords();
    a.union(&b).copied().collect()
}

/// Upper bound on the number of reduced words of length at most `k` over
/// `n` generators.
fn ball_bound(n: usize, k: usize) -> usize {
    let mut total: usize = 1;
    let mut layer: usize = 2 * n;
    for _ in 0..k {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul((2 * n).saturating_sub(1).max(1));
    }
    total
}

pub fn ball_raag(g: &SimplicialGraph, radius: usize, word_bound: usize) -> Result<DevelopmentBall> {
    ball_raag_capped(g, radius, word_bound, DEFAULT_ELEMENT_CAP)
}

/// Copies of the reduced intersection complex, one per element of join
/// length at most `radius` and word length at most `word_bound`, glued along
/// equal cosets.
pub fn ball_raag_capped(g: &SimplicialGraph, radius: usize, word_bound: usize, cap: usize) -> Result<DevelopmentBall> {
    let base = build_ri_raag(g)?;
    let estimate = ball_bound(g.n(), word_bound);
    if estimate > cap {
        return Err(Error::CapExceeded { size: estimate, cap });
    }
    let mut lengths = FactorLength::joins(g)?;
    let elements: Vec<NormalForm> =
        ball(g, word_bound).into_iter().filter(|w| lengths.length(w).length <= radius).collect();
    let supports: Vec<BTreeSet<Vertex>> = base.simplices.iter().map(|s| support(&s.label)).collect();

    let mut vertex_ids: HashMap<(NormalForm, usize), usize> = HashMap::new();
    let mut simplex_ids: HashMap<(NormalForm, usize), usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut simplices: Vec<DevSimplex> = Vec::new();
    let mut keys: Vec<NormalForm> = Vec::new();
    for e in &elements {
        for (sid, s) in base.simplices.iter().enumerate() {
            let key = coset_key(g, e, &supports[sid]);
            if s.verts.len() == 1 {
                vertex_ids.entry((key.clone(), sid)).or_insert_with(|| {
                    vertices.push(DevVertex { key: key.display(g), base: sid });
                    keys.push(key);
                    vertices.len() - 1
                });
                continue;
            }
            if simplex_ids.contains_key(&(key.clone(), sid)) {
                continue;
            }
            let verts: Vec<usize> = s
                .verts
                .iter()
                .map(|&v| {
                    let k = coset_key(g, &key, &supports[v]);
                    *vertex_ids.entry((k.clone(), v)).or_insert_with(|| {
                        vertices.push(DevVertex { key: k.display(g), base: v });
                        keys.push(k);
                        vertices.len() - 1
                    })
                })
                .collect();
            let faces = if s.verts.len() > 2 {
                base.faces_of(sid)
                    .iter()
                    .map(|f| simplex_ids[&(coset_key(g, &key, &supports[f.face]), f.face)])
                    .collect()
            } else {
                Vec::new()
            };
            simplex_ids.insert((key, sid), simplices.len());
            simplices.push(DevSimplex { verts, base: sid, faces });
        }
    }
    let boundary = keys
        .iter()
        .enumerate()
        .filter(|(_, k)| k.len() + 1 > word_bound || lengths.length(k).length + 1 > radius)
        .map(|(i, _)| i)
        .collect();
    Ok(DevelopmentBall { base, radius, word_bound, vertices, simplices, boundary, elements: elements.len() })
}

/// Reduced free words over `alphabet` of length at most `k` whose last
/// letter is outside `strip` (minimal coset representatives).
fn free_coset_reps(alphabet: &[Vertex], strip: &BTreeSet<Vertex>, k: usize) -> Vec<Vec<Letter>> {
    let mut all = vec![Vec::new()];
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for w in &layer {
            for &a in alphabet {
                for inv in [false, true] {
                    let l = Letter::new(a, inv);
                    if w.last() == Some(&l.inverse()) {
                        continue;
                    }
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all.retain(|w| w.last().is_none_or(|l| !strip.contains(&l.gen)));
    all
}

/// Truncated Bass-Serre tree of a one-dimensional braid complex of groups
/// whose vertex groups are products of free groups on cycle alphabets.
pub fn development_gog(jc: &JoinComplex, depth: usize, word_bound: usize) -> Result<DevelopmentBall> {
    development_gog_capped(jc, depth, word_bound, DEFAULT_ELEMENT_CAP)
}

pub fn development_gog_capped(jc: &JoinComplex, depth: usize, word_bound: usize, cap: usize) -> Result<DevelopmentBall> {
    if jc.kind != Kind::Braid {
        return Err(Error::Precondition("graph-of-groups development needs a braid complex".into()));
    }
    if jc.dim() > 1 {
        return Err(Error::Precondition(
            "complex has 2-simplices; only one-dimensional complexes of groups are developed".into(),
        ));
    }
    if !jc.from_special_cactus {
        return Err(Error::Precondition("cycle alphabets need a special cactus".into()));
    }
    let a = analyze_cactus(&jc.graph)?;
    let mut alpha = SimplicialGraph::new();
    for c in 0..a.cycles.len() {
        alpha.add_vertex(&a.cycle_name(c))?;
    }
    let cycles_in = |sub: &crate::graph::Subgraph| -> BTreeSet<Vertex> {
        (0..a.cycles.len()).filter(|&c| a.cycles[c].edges.is_subset(&sub.edges)).collect()
    };
    let alphabets = |s: usize| -> (BTreeSet<Vertex>, BTreeSet<Vertex>) {
        match &jc.simplices[s].label {
            Label::Pair(p) => (cycles_in(&p.first), cycles_in(&p.second)),
            Label::Join(_) => unreachable!(),
        }
    };

    // coset representatives of each edge group in each endpoint group
    let edges: Vec<usize> = jc.simplices_of_dim(1).collect();
    let mut reps: HashMap<(usize, usize), Vec<String>> = HashMap::new();
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); jc.n_vertices];
    for &e in &edges {
        let (e1, e2) = alphabets(e);
        for (i, &v) in jc.simplices[e].verts.iter().enumerate() {
            let w = jc.simplices[e].verts[1 - i];
            incident[v].push((e, w));
            let (v1, v2) = alphabets(v);
            let (a1, a2): (Vec<Vertex>, Vec<Vertex>) = (v1.into_iter().collect(), v2.into_iter().collect());
            let r1 = free_coset_reps(&a1, &e1, word_bound);
            let r2 = free_coset_reps(&a2, &e2, word_bound);
            let mut list = Vec::new();
            for u1 in &r1 {
                for u2 in &r2 {
                    if u1.len() + u2.len() <= word_bound {
                        let (n1, n2) = (normal_form(&alpha, u1), normal_form(&alpha, u2));
                        debug_assert_eq!(max_right_divisor(&alpha, &n1, &e1).1, NormalForm::identity());
                        list.push(format!("({};{})", n1.display(&alpha), n2.display(&alpha)));
                    }
                }
            }
            reps.insert((e, v), list);
        }
    }

    let identity = format!("({};{})", "1", "1");
    let mut vertices = vec![DevVertex { key: String::new(), base: 0 }];
    let mut parent_edge: Vec<Option<usize>> = vec![None];
    let mut level = vec![0usize];
    let mut simplices = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        if level[x] == depth {
            continue;
        }
        let v = vertices[x].base;
        for &(e, w) in &incident[v] {
            for rep in &reps[&(e, v)] {
                if parent_edge[x] == Some(e) && *rep == identity {
                    continue;
                }
                if vertices.len() >= cap {
                    return Err(Error::CapExceeded { size: vertices.len() + 1, cap });
                }
                let key = format!("{}/{}{}", vertices[x].key, e, rep);
                vertices.push(DevVertex { key, base: w });
                parent_edge.push(Some(e));
                level.push(level[x] + 1);
                let y = vertices.len() - 1;
                simplices.push(DevSimplex { verts: vec![x, y], base: e, faces: Vec::new() });
                queue.push_back(y);
            }
        }
    }
    let boundary = (0..vertices.len()).filter(|&x| level[x] == depth).collect();
    let elements = vertices.len();
    Ok(DevelopmentBall { base: jc.clone(), radius: depth, word_bound, vertices, simplices, boundary, elements })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct LocalPatternReport {
    pub checked: usize,
    /// Interior vertices whose cut-vertex status disagrees with the type of
    /// their base vertex.
    pub cut_mismatches: Vec<usize>,
    /// Simplices whose vertices do not project onto the base simplex.
    pub projection_mismatches: Vec<usize>,
    /// Interior vertices with an edge whose coordinates are not exchanged
    /// between cyclic and non-cyclic factors.
    pub alternation_failures: Vec<usize>,
}

impl LocalPatternReport {
    pub fn ok(&self) -> bool {
        self.cut_mismatches.is_empty() && self.projection_mismatches.is_empty()
    }

    pub fn alternating(&self) -> bool {
        self.alternation_failures.is_empty()
    }
}

/// Maps each coordinate of `edge` to the rank of the factor of `vertex` it
/// lies in.
fn coordinate_ranks(base: &JoinComplex, edge: usize, vertex: usize) -> Option<[usize; 2]> {
    let flipped = base.simplices[edge].label.inside(&base.simplices[vertex].label)?;
    let (r1, r2) = base.ranks(vertex);
    Some(if flipped { [r2, r1] } else { [r1, r2] })
}

pub fn check_local_pattern(b: &DevelopmentBall) -> LocalPatternReport {
    let base = &b.base;
    let expect_cut: Vec<bool> = match base.kind {
        Kind::Raag => vertex_classification(base).iter().map(|c| c.vertex_type == VertexType::Type2).collect(),
        // every vertex of a tree of infinite valence separates
        Kind::Braid => vec![true; base.n_vertices],
    };
    let mut report = LocalPatternReport {
        checked: 0,
        cut_mismatches: Vec::new(),
        projection_mismatches: Vec::new(),
        alternation_failures: Vec::new(),
    };
    for (i, s) in b.simplices.iter().enumerate() {
        let mut down: Vec<usize> = s.verts.iter().map(|&x| b.vertices[x].base).collect();
        down.sort_unstable();
        if down != base.simplices[s.base].verts {
            report.projection_mismatches.push(i);
        }
    }
    let interior: Vec<usize> = b.interior().collect();
    for &x in &interior {
        report.checked += 1;
        if b.is_cut_vertex(x) != expect_cut[b.vertices[x].base] {
            report.cut_mismatches.push(x);
        }
    }
    let mut failing = BTreeSet::new();
    for s in b.simplices.iter().filter(|s| s.verts.len() == 2) {
        let (x, y) = (s.verts[0], s.verts[1]);
        let rx = coordinate_ranks(base, s.base, b.vertices[x].base);
        let ry = coordinate_ranks(base, s.base, b.vertices[y].base);
        let good = match (rx, ry) {
            (Some(rx), Some(ry)) => (0..2).all(|c| (rx[c] == 1) != (ry[c] == 1)),
            _ => false,
        };
        if !good {
            failing.insert(x);
            failing.insert(y);
        }
    }
    report.alternation_failures = interior.into_iter().filter(|x| failing.contains(x)).collect();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::join::build_ri_braid;
    use crate::words::{multiply, parse_word};

    fn hexagon() -> JoinComplex {
        build_ri_braid(&analyze_cactus(&corpus::o_k(3)).unwrap()).unwrap()
    }

    #[test]
    fn p4_radius_zero_is_one_copy() {
        let b = ball_raag(&corpus::path(4), 0, 3).unwrap();
        assert_eq!(b.vertices.len(), 2);
        assert_eq!(b.simplices.len(), 1);
        assert_eq!(b.elements, 1);
    }

    #[test]
    fn p4_ball_is_a_tree_with_alternation() {
        let b = ball_raag(&corpus::path(4), 1, 2).unwrap();
        assert_eq!(b.betti1(), 0);
        assert_eq!(b.components(), 1);
        let r = check_local_pattern(&b);
        assert!(r.checked > 0);
        assert!(r.ok(), "{r:?}");
        assert!(r.alternating(), "{r:?}");
        for x in b.interior() {
            assert!(b.is_cut_vertex(x));
        }
    }

    #[test]
    fn c4_ball_is_one_vertex() {
        for radius in 0..3 {
            let b = ball_raag(&corpus::cycle(4), radius, 2).unwrap();
            assert_eq!(b.vertices.len(), 1);
            assert!(b.simplices.is_empty());
        }
    }

    #[test]
    fn c5_ball_has_no_interior_cut_vertices() {
        let b = ball_raag(&corpus::cycle(5), 1, 2).unwrap();
        let r = check_local_pattern(&b);
        assert!(r.checked > 0);
        assert!(r.ok(), "{r:?}");
        assert!(r.alternating());
    }

    #[test]
    fn radius_balls_are_monotone() {
        let g = corpus::path(4);
        let small = ball_raag(&g, 1, 3).unwrap();
        let big = ball_raag(&g, 2, 3).unwrap();
        let keys: BTreeSet<(String, usize)> = big.vertices.iter().map(|v| (v.key.clone(), v.base)).collect();
        for v in &small.vertices {
            assert!(keys.contains(&(v.key.clone(), v.base)));
        }
        let edges: BTreeSet<(String, String)> = big
            .edges()
            .iter()
            .map(|&(a, b)| (big.vertices[a].key.clone(), big.vertices[b].key.clone()))
            .collect();
        for (a, b) in small.edges() {
            assert!(edges.contains(&(small.vertices[a].key.clone(), small.vertices[b].key.clone())));
        }
    }

    #[test]
    fn gluing_is_independent_of_the_representative() {
        let g = corpus::path(4);
        let s: BTreeSet<Vertex> = ["a", "b", "c"].iter().map(|n| g.vertex(n).unwrap()).collect();
        let x = normal_form(&g, &parse_word(&g, "d a").unwrap());
        for h in ["a", "b c^-1", "c a b"] {
            let y = normal_form(&g, &parse_word(&g, h).unwrap());
            assert_eq!(coset_key(&g, &multiply(&g, &x, &y), &s), coset_key(&g, &x, &s));
        }
    }

    #[test]
    fn refuses_large_balls() {
        assert!(matches!(
            ball_raag_capped(&corpus::cycle(5), 3, 8, 1000),
            Err(Error::CapExceeded { cap: 1000, .. })
        ));
    }

    #[test]
    fn hexagon_development() {
        let jc = hexagon();
        let d0 = development_gog(&jc, 0, 2).unwrap();
        assert_eq!(d0.vertices.len(), 1);
        let d = development_gog(&jc, 3, 2).unwrap();
        assert_eq!(d.betti1(), 0);
        assert_eq!(d.components(), 1);
        let name = |s: usize| jc.simplices[s].name.clone();
        let a = analyze_cactus(&corpus::o_k(3)).unwrap();
        let label = |s: usize| match &jc.simplices[s].label {
            Label::Pair(p) => p.cycle_display(&a),
            Label::Join(_) => unreachable!(),
        };
        let u4 = (0..jc.n_vertices).find(|&v| label(v) == "{a1,a3}x{a2}").unwrap();
        let allowed: BTreeSet<String> = ["{a1}x{a2,a3}", "{a3}x{a1,a2}"].iter().map(|s| s.to_string()).collect();
        let mut seen = 0;
        for x in d.interior().filter(|&x| d.vertices[x].base == u4) {
            seen += 1;
            let over: BTreeSet<String> = d.neighbors(x).iter().map(|&y| label(d.vertices[y].base)).collect();
            assert_eq!(over, allowed, "{}", name(u4));
        }
        assert!(seen > 0);
        let r = check_local_pattern(&d);
        assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn gog_refuses_two_dimensional_complexes() {
        let jc = build_ri_braid(&analyze_cactus(&corpus::o_prime(0)).unwrap()).unwrap();
        assert!(jc.dim() >= 2);
        assert!(matches!(development_gog(&jc, 1, 1), Err(Error::Precondition(_))));
        let raag = build_ri_raag(&corpus::path(4)).unwrap();
        assert!(matches!(development_gog(&raag, 1, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn exports() {
        let b = ball_raag(&corpus::path(4), 1, 1).unwrap();
        let j = b.to_json();
        assert_eq!(j["vertices"].as_array().unwrap().len(), b.vertices.len());
        assert!(j["vertices"][0].get("boundary").is_some());
        assert!(b.to_dot().contains("rho:"));
    }
}
