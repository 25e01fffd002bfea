//! Quasi-isometry verdicts for RAAGs and pure 2-braid groups of graphs.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::{json, Value};

use crate::cactus::{analyze_cactus, CactusAnalysis, CactusType};
use crate::error::{Error, Result};
use crate::graph::{find_triangle, graph_isomorphic, SimplicialGraph, Vertex};
use crate::homology::UnionFind;
use crate::join::{build_ri_d2, build_ri_raag, JoinComplex, Kind, QiType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Raag,
    Pb2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Relation {
    #[serde(rename = "QI")]
    Qi,
    #[serde(rename = "NOT_QI")]
    NotQi,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Qi => "QI",
            Relation::NotQi => "NOT_QI",
            Relation::Unknown => "UNKNOWN",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub relation: Relation,
    pub rule: String,
    pub evidence: Value,
}

impl Verdict {
    fn new(relation: Relation, rule: &str, evidence: Value) -> Self {
        Self { relation, rule: rule.to_string(), evidence }
    }

    pub fn unknown() -> Self {
        Self::new(Relation::Unknown, "", json!({}))
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap()
    }

    pub fn report(&self) -> String {
        let why = match self.rule.as_str() {
            "identical" => "the defining graphs are isomorphic, so the groups are isomorphic",
            "flat-rank" => "the dimensions of top-rank flats differ",
            "trees" => "RAAGs of trees of diameter at least 3 form one quasi-isometry class, which contains no other 2-dimensional RAAG",
            "finite-out" => "for triangle-free graphs with finite Out, the RAAGs are quasi-isometric exactly when the graphs are isomorphic",
            "star-of-triangles" => "PB2 of a star of triangles is quasi-isometric to A(T)*Z for a tree T of diameter at least 3",
            "obstruction" => "the intersection complex has an alternating maximal-edge/maximal-simplex line through separating vertices, which no RAAG admits",
            "ends" => "the numbers of ends differ",
            "blocks" => "the sets of isometry classes of blocks differ",
            "ri-profile" => "the sets of (dimension, qi type) pairs of the reduced intersection complexes differ",
            _ => "no applicable rule",
        };
        format!("{} [{}]: {}\n{}", self.relation.as_str(), self.rule, why, serde_json::to_string_pretty(&self.evidence).unwrap())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutFiniteReport {
    pub finite: bool,
    /// `(w, v)` with `lk(w)` inside `st(v)`.
    pub transvection: Option<(Vertex, Vertex)>,
    /// A vertex whose closed star separates.
    pub separating_star: Option<Vertex>,
}

/// Finiteness of `Out(A(g))`: no transvections and no partial conjugations.
pub fn out_finite(g: &SimplicialGraph) -> OutFiniteReport {
    for w in g.vertices() {
        let lk = g.link(w);
        for v in g.vertices() {
            if v != w && lk.is_subset(&g.star(v)) {
                return OutFiniteReport { finite: false, transvection: Some((w, v)), separating_star: None };
            }
        }
    }
    for v in g.vertices() {
        let rest: BTreeSet<Vertex> = g.vertices().filter(|u| !g.star(v).contains(u)).collect();
        if g.induced(&rest).components().len() >= 2 {
            return OutFiniteReport { finite: false, transvection: None, separating_star: Some(v) };
        }
    }
    OutFiniteReport { finite: true, transvection: None, separating_star: None }
}

/// Compares block decompositions: blocks are vertex sets inducing
/// finite-Out subgraphs that meet pairwise in at most one vertex, never three
/// at once, and close no cycle through shared vertices.
pub fn block_compare(
    g1: &SimplicialGraph,
    g2: &SimplicialGraph,
    blocks1: &[BTreeSet<Vertex>],
    blocks2: &[BTreeSet<Vertex>],
) -> Result<Verdict> {
    let classes1 = block_classes(g1, blocks1)?;
    let classes2 = block_classes(g2, blocks2)?;
    let mut reps: Vec<SimplicialGraph> = Vec::new();
    let mut ids = |gs: Vec<SimplicialGraph>| -> BTreeSet<usize> {
        gs.into_iter()
            .map(|b| match reps.iter().position(|r| graph_isomorphic(r, &b).is_some()) {
                Some(i) => i,
                None => {
                    reps.push(b);
                    reps.len() - 1
                }
            })
            .collect()
    };
    let (s1, s2) = (ids(classes1), ids(classes2));
    let evidence = json!({"classes_first": s1, "classes_second": s2});
    Ok(if s1 != s2 {
        Verdict::new(Relation::NotQi, "blocks", evidence)
    } else {
        Verdict::new(Relation::Unknown, "", evidence)
    })
}

fn block_classes(g: &SimplicialGraph, blocks: &[BTreeSet<Vertex>]) -> Result<Vec<SimplicialGraph>> {
    if let Some((a, b, c)) = find_triangle(g) {
        return Err(Error::Triangle(g.name(a).into(), g.name(b).into(), g.name(c).into()));
    }
    let fail = |m: String| Err(Error::Precondition(m));
    let mut covered: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    for (i, b) in blocks.iter().enumerate() {
        let h = g.induced(b);
        if !h.is_connected() || !out_finite(&h).finite {
            return fail(format!("block {i} does not induce a connected graph with finite Out"));
        }
        for (x, y) in g.edges() {
            if b.contains(&x) && b.contains(&y) {
                covered.insert((x, y));
            }
        }
    }
    if covered.len() != g.edge_count() || blocks.iter().flatten().collect::<BTreeSet<_>>().len() != g.n() {
        return fail("blocks do not cover the graph".into());
    }
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            if blocks[i].intersection(&blocks[j]).count() > 1 {
                return fail(format!("blocks {i} and {j} share more than one vertex"));
            }
            for k in j + 1..blocks.len() {
                if blocks[i].iter().any(|v| blocks[j].contains(v) && blocks[k].contains(v)) {
                    return fail(format!("blocks {i}, {j} and {k} share a vertex"));
                }
            }
        }
    }
    // incidence graph of blocks and shared vertices must be a forest
    let mut uf = UnionFind::new(blocks.len() + g.n());
    for v in g.vertices() {
        let holders: Vec<usize> = (0..blocks.len()).filter(|&i| blocks[i].contains(&v)).collect();
        if holders.len() < 2 {
            continue;
        }
        for i in holders {
            if !uf.union(i, blocks.len() + v) {
                return fail(format!("block {i} lies on a cycle of blocks"));
            }
        }
    }
    Ok(blocks.iter().map(|b| g.induced(b)).collect())
}

/// Spine adjacency with valency-2 non-joint vertices suppressed.
fn reduced_spine(a: &CactusAnalysis) -> Option<(BTreeMap<Vertex, BTreeSet<Vertex>>, BTreeSet<Vertex>)> {
    let spine = a.spine.as_ref()?;
    let joints: BTreeSet<Vertex> = a.joints.iter().copied().collect();
    let mut adj: BTreeMap<Vertex, BTreeSet<Vertex>> =
        spine.vertices().map(|v| (v, spine.neighbors(v).iter().copied().collect())).collect();
    loop {
        let Some(v) = adj.iter().find(|(v, n)| n.len() == 2 && !joints.contains(v)).map(|(v, _)| *v) else {
            break;
        };
        let n: Vec<Vertex> = adj.remove(&v).unwrap().into_iter().collect();
        for &x in &n {
            adj.get_mut(&x).unwrap().remove(&v);
        }
        adj.get_mut(&n[0]).unwrap().insert(n[1]);
        adj.get_mut(&n[1]).unwrap().insert(n[0]);
    }
    Some((adj, joints))
}

/// `Some(k)` when the cactus is a star of `k >= 3` triangles-or-cycles: its
/// spine is a star whose centre is not a joint and whose leaves are joints.
pub fn recognize_o_k(a: &CactusAnalysis) -> Option<usize> {
    if !a.is_special {
        return None;
    }
    let (adj, joints) = reduced_spine(a)?;
    let centre = adj.iter().find(|(_, n)| n.len() >= 3).map(|(v, _)| *v)?;
    let k = adj[&centre].len();
    let ok = !joints.contains(&centre)
        && adj.len() == k + 1
        && adj.iter().all(|(v, n)| *v == centre || (n.len() == 1 && joints.contains(v)));
    ok.then_some(k)
}

/// `Some(n)` when the spine, after removing its leaves, is a path whose two
/// ends are non-joints each carrying two leaf joints, and whose `n` interior
/// vertices each carry exactly one cycle (as a joint on the path or as a
/// single leaf joint).
pub fn recognize_o_prime(a: &CactusAnalysis) -> Option<usize> {
    if !a.is_special || a.cactus_type != CactusType::M {
        return None;
    }
    let (adj, joints) = reduced_spine(a)?;
    let leaves: BTreeSet<Vertex> = adj.iter().filter(|(_, n)| n.len() == 1).map(|(v, _)| *v).collect();
    if !leaves.iter().all(|v| joints.contains(v)) {
        return None;
    }
    let core: BTreeSet<Vertex> = adj.keys().filter(|v| !leaves.contains(v)).copied().collect();
    let core_deg = |v: Vertex| adj[&v].iter().filter(|u| core.contains(u)).count();
    let leaf_deg = |v: Vertex| adj[&v].iter().filter(|u| leaves.contains(u)).count();
    if core.len() < 2 || core.iter().any(|&v| core_deg(v) > 2) {
        return None;
    }
    let ends: Vec<Vertex> = core.iter().copied().filter(|&v| core_deg(v) == 1).collect();
    if ends.len() != 2 {
        return None;
    }
    for &v in &core {
        let ok = if ends.contains(&v) {
            !joints.contains(&v) && leaf_deg(v) == 2
        } else if joints.contains(&v) {
            leaf_deg(v) == 0
        } else {
            leaf_deg(v) == 1
        };
        if !ok {
            return None;
        }
    }
    Some(core.len() - 2)
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionReport {
    pub found: bool,
    /// Labels of `(E1, T1, E2, T2)` for the first pattern found.
    pub witness: Option<Vec<String>>,
    /// Every pattern found, as simplex ids `(E1, T1, E2, T2)`.
    pub patterns: Vec<[usize; 4]>,
}

/// Link of `v` in the complex: component id of each neighbour.
fn link_components(jc: &JoinComplex, v: usize) -> BTreeMap<usize, usize> {
    let nbrs: Vec<usize> = jc.neighbors(v).into_iter().collect();
    let by_verts = jc.by_verts();
    let mut uf = UnionFind::new(nbrs.len());
    for i in 0..nbrs.len() {
        for j in i + 1..nbrs.len() {
            let mut t = vec![v, nbrs[i], nbrs[j]];
            t.sort_unstable();
            if by_verts.contains_key(&t) {
                uf.union(i, j);
            }
        }
    }
    (0..nbrs.len()).map(|i| (nbrs[i], uf.find(i))).collect()
}

/// Searches for a 4-cycle `(E1, T1, E2, T2)` of maximal edges and maximal
/// simplices of dimension at least 2, consecutive ones meeting in single
/// distinct vertices, where every meeting vertex separates, within its link,
/// each maximal edge through it from each maximal higher simplex through it.
pub fn detect_obstruction_pattern(jc: &JoinComplex) -> ObstructionReport {
    let mut report = ObstructionReport { found: false, witness: None, patterns: Vec::new() };
    if jc.kind != Kind::Braid {
        return report;
    }
    let max_edges: Vec<usize> = jc.simplices_of_dim(1).filter(|&s| jc.is_maximal(s)).collect();
    let max_high: Vec<usize> =
        (0..jc.simplices.len()).filter(|&s| jc.simplices[s].dim() >= 2 && jc.is_maximal(s)).collect();
    let mut separating: BTreeMap<usize, bool> = BTreeMap::new();
    let mut is_sep = |v: usize| -> bool {
        *separating.entry(v).or_insert_with(|| {
            let comp = link_components(jc, v);
            let es = max_edges.iter().filter(|&&e| jc.simplices[e].verts.contains(&v));
            let ts: Vec<usize> = max_high.iter().copied().filter(|&t| jc.simplices[t].verts.contains(&v)).collect();
            es.into_iter().all(|&e| {
                let x = *jc.simplices[e].verts.iter().find(|&&x| x != v).unwrap();
                ts.iter().all(|&t| jc.simplices[t].verts.iter().all(|&y| y == v || comp[&y] != comp[&x]))
            })
        })
    };
    let meet = |a: usize, b: usize| -> Option<usize> {
        let common: Vec<usize> =
            jc.simplices[a].verts.iter().copied().filter(|x| jc.simplices[b].verts.contains(x)).collect();
        (common.len() == 1).then(|| common[0])
    };
    for &e1 in &max_edges {
        for &t1 in &max_high {
            let Some(v1) = meet(e1, t1) else { continue };
            for &e2 in &max_edges {
                if e2 == e1 {
                    continue;
                }
                let Some(w1) = meet(t1, e2) else { continue };
                if w1 == v1 {
                    continue;
                }
                for &t2 in &max_high {
                    if t2 == t1 {
                        continue;
                    }
                    let (Some(v2), Some(w2)) = (meet(e2, t2), meet(t2, e1)) else { continue };
                    let pts = BTreeSet::from([v1, w1, v2, w2]);
                    if pts.len() == 4 && pts.iter().all(|&p| is_sep(p)) {
                        report.patterns.push([e1, t1, e2, t2]);
                    }
                }
            }
        }
    }
    if let Some(p) = report.patterns.first() {
        report.found = true;
        report.witness = Some(p.iter().map(|&s| jc.simplices[s].name.clone()).collect());
    }
    report
}

/// Whether the cyclic pattern `(E1, T1, E2, T2)` with the given labels is
/// among those found, up to the symmetries of the 4-cycle.
pub fn has_pattern(jc: &JoinComplex, report: &ObstructionReport, labels: [&str; 4]) -> bool {
    let rots = [[0, 1, 2, 3], [2, 3, 0, 1], [0, 3, 2, 1], [2, 1, 0, 3]];
    report.patterns.iter().any(|p| {
        rots.iter().any(|r| (0..4).all(|i| jc.simplices[p[r[i]]].name == labels[i]))
    })
}

/// Number of ends of the group, when known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Ends {
    Zero,
    One,
    Two,
    Infinite,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct GroupDescriptor {
    pub family: Family,
    pub graph: SimplicialGraph,
    pub ri: Option<JoinComplex>,
    /// Why the reduced intersection complex is missing, if it is.
    pub ri_note: Option<String>,
    pub cactus: Option<CactusAnalysis>,
    pub out: Option<OutFiniteReport>,
}

impl GroupDescriptor {
    pub fn raag(g: SimplicialGraph) -> Self {
        let (ri, ri_note) = match build_ri_raag(&g) {
            Ok(jc) => (Some(jc), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let out = (find_triangle(&g).is_none() && g.is_connected()).then(|| out_finite(&g));
        Self { family: Family::Raag, graph: g, ri, ri_note, cactus: None, out }
    }

    /// `g` must be connected.
    pub fn pb2(g: SimplicialGraph, cap: usize) -> Result<Self> {
        let cactus = analyze_cactus(&g)?;
        let (ri, ri_note) = match build_ri_d2(&g, cap) {
            Ok(jc) => (Some(jc), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Ok(Self { family: Family::Pb2, graph: g, ri, ri_note, cactus: Some(cactus), out: None })
    }

    fn has_products(&self) -> Option<bool> {
        self.ri.as_ref().map(|jc| jc.n_vertices > 0)
    }

    /// Bounds on the dimension of top-rank flats.
    pub fn flat_rank(&self) -> (usize, usize) {
        let g = &self.graph;
        match self.family {
            Family::Raag => {
                if g.edge_count() == 0 {
                    (g.n().min(1), g.n().min(1))
                } else if find_triangle(g).is_none() {
                    (2, 2)
                } else {
                    (3, usize::MAX)
                }
            }
            Family::Pb2 => match self.has_products() {
                Some(true) => (2, 2),
                _ => (0, 2),
            },
        }
    }

    pub fn ends(&self) -> Ends {
        let g = &self.graph;
        match self.family {
            Family::Raag => match (g.n(), g.components().len()) {
                (0, _) => Ends::Zero,
                (1, _) => Ends::Two,
                (_, 1) => Ends::One,
                _ => Ends::Infinite,
            },
            Family::Pb2 => {
                // PB2 of a special cactus is quasi-isometric to SPB2 * Z, and
                // SPB2 contains Z^2 as soon as there is a product
                let special = self.cactus.as_ref().is_some_and(|a| a.is_special);
                if special && self.has_products() == Some(true) {
                    Ends::Infinite
                } else {
                    Ends::Unknown
                }
            }
        }
    }

    fn o_k(&self) -> Option<usize> {
        (self.family == Family::Pb2).then(|| self.cactus.as_ref().and_then(recognize_o_k)).flatten()
    }

    fn obstruction(&self) -> Option<(ObstructionReport, Option<usize>)> {
        if self.family != Family::Pb2 {
            return None;
        }
        let a = self.cactus.as_ref()?;
        if !a.is_special || a.cactus_type != CactusType::M {
            return None;
        }
        let r = detect_obstruction_pattern(self.ri.as_ref()?);
        r.found.then(|| (r, recognize_o_prime(a)))
    }

    /// `A(g)` is a free product of RAAGs of trees of diameter at least 3 and
    /// copies of Z, with at least one tree and at least two factors.
    fn tree_free_product(&self) -> bool {
        if self.family != Family::Raag {
            return false;
        }
        let comps = self.graph.components();
        let mut trees = 0;
        for c in &comps {
            let h = self.graph.induced(c);
            if h.n() == 1 {
                continue;
            }
            if h.is_tree() && h.diameter().unwrap() >= 3 {
                trees += 1;
            } else {
                return false;
            }
        }
        trees >= 1 && comps.len() >= 2
    }

    fn tree3(&self) -> bool {
        self.family == Family::Raag && self.graph.is_tree() && self.graph.diameter().unwrap() >= 3
    }

    fn two_dim_raag(&self) -> bool {
        self.family == Family::Raag && self.graph.edge_count() > 0 && find_triangle(&self.graph).is_none()
    }

    fn profile(&self) -> Option<BTreeSet<(usize, QiType)>> {
        let jc = self.ri.as_ref()?;
        Some((0..jc.simplices.len()).map(|s| (jc.simplices[s].dim(), jc.qi_type(s))).collect())
    }
}

type Rule = fn(&GroupDescriptor, &GroupDescriptor) -> Option<Verdict>;

fn rule_identical(d1: &GroupDescriptor, d2: &GroupDescriptor) -> Option<Verdict> {
    (d1.family == d2.family && graph_isomorphic(&d1.graph, &d2.graph).is_some())
        .then(|| Verdict::new(Relation::Qi, "identical", json!({"isomorphic_graphs": true})))
}

fn rule_flat_rank(d1: &GroupDescriptor, d2: &GroupDescriptor) -> Option<Verdict> {
    let (r1, r2) = (d1.flat_rank(), d2.flat_rank());
    let show = |r: (usize, usize)| if r.1 == usize::MAX { json!([r.0, null]) } else { json!([r.0, r.1]) };
    (r1.1 < r2.0 || r2.1 < r1.0)
        .then(|| Verdict::new(Relation::NotQi, "flat-rank", json!({"ranks": [show(r1), show(r2)]})))
}

fn rule_trees(d1: &GroupDescriptor, d2: &GroupDescriptor) -> Option<Verdict> {
    let (t1, t2) = (d1.tree3(), d2.tree3());
    if t1 && t2 {
        return Some(Verdict::new(Relation::Qi, "trees", json!({"trees_of_diameter_3": [true, true]})));
    }
    if (t1 && d2.two_dim_raag()) || (t2 && d1.two_dim_raag()) {
        return Some(Verdict::new(Relation::NotQi, "trees", json!({"trees_of_diameter_3": [t1, t2]})));
    }
    None
}

fn rule_finite_out(d1: &GroupDescriptor, d2: &GroupDescriptor) -> Option<Verdict> {
    let both = |d: &GroupDescriptor| d.family == Family::Raag && d.out.as_ref().is_some_and(|o| o.finite);
    if !(both(d1) && both(d2)) {
        return None;
    }
    let iso = graph_isomorphic(&d1.graph, &d2.graph);
    let evidence = json!({
        "out_finite": [true, true],
        "isomorphism": iso.as_ref().map(|m| m.iter().enumerate()
            .map(|(i, &j)| (d1.graph.name(i).to_string(), d2.graph.name(j).to_string()))
            .collect::<BTreeMap<_, _>>()),
    });
    Some(Verdict::new(if iso.is_some() { Relation::Qi } else { Relation::NotQi }, "finite-out", evidence))
}

fn rule_star_of_triangles(d1: &GroupDescriptor, d2: &GroupDescriptor) -> Option<Verdict> {
    let (k1, k2) = (d1.o_k(), d2.o_k());
    let qi = match (k1, k2) {
        (Some(_), Some(_)) => true,
        (Some(_), None) => d2.tree_free_product(),
        (None, Some(_)) => d1.tree_free_product(),
        _ => false,
    };
    qi.then(|| Verdict::new(Relation::Qi, "star-of-triangles", json!({"star_sizes": [k1, k2]})))
}

fn rule_obstruction(d1: &GroupDescriptor, d2: &GroupDescriptor) -> Option<Verdict> {
    for (a, b) in [(d1, d2), (d2, d1)] {
        let Some((r, family)) = a.obstruction() else { continue };
        // the other side is a RAAG, or quasi-isometric to one
        if b.family == Family::Raag || b.o_k().is_some() {
            return Some(Verdict::new(
                Relation::NotQi,
                "obstruction",
                json!({
                    "witness": r.witness,
                    "patterns": r.patterns.len(),
                    "recognized_family_n": family,
                    "scope": if family.is_some() { "proven family" } else { "pattern outside the proven family" },
                }),
            ));
        }
    }
    None
}

fn rule_ends(d1: &GroupDescriptor, d2: &GroupDescriptor) -> Option<Verdict> {
    let (e1, e2) = (d1.ends(), d2.ends());
    (e1 != Ends::Unknown && e2 != Ends::Unknown && e1 != e2)
        .then(|| Verdict::new(Relation::NotQi, "ends", json!({"ends": [e1, e2]})))
}

fn rule_profile(d1: &GroupDescriptor, d2: &GroupDescriptor) -> Option<Verdict> {
    let (p1, p2) = (d1.profile()?, d2.profile()?);
    let show = |p: &BTreeSet<(usize, QiType)>| p.iter().map(|(d, q)| format!("{d}:{}", q.as_str())).collect::<Vec<_>>();
    (p1 != p2).then(|| Verdict::new(Relation::NotQi, "ri-profile", json!({"profiles": [show(&p1), show(&p2)]})))
}

const RULES: [Rule; 8] = [
    rule_identical,
    rule_flat_rank,
    rule_trees,
    rule_finite_out,
    rule_star_of_triangles,
    rule_obstruction,
    rule_ends,
    rule_profile,
];

/// Every rule that fires, in order.
pub fn all_rule_verdicts(d1: &GroupDescriptor, d2: &GroupDescriptor) -> Vec<Verdict> {
    RULES.iter().filter_map(|r| r(d1, d2)).collect()
}

pub fn classify_qi(d1: &GroupDescriptor, d2: &GroupDescriptor) -> Verdict {
    RULES.iter().find_map(|r| r(d1, d2)).unwrap_or_else(Verdict::unknown)
}
