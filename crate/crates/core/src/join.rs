//! Finite complexes of join groups and the reduced intersection complexes of
//! Salvetti complexes and of `D2`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;

use crate::cactus::{analyze_cactus, CactusAnalysis};
use crate::error::{Error, Result};
use crate::graph::{detect_induced_cycles, SimplicialGraph, Subgraph, Vertex};
use crate::homology::{self, UnionFind};
use crate::square;
use crate::products::{
    intersect_products, maximal_join_subgraphs, maximal_products_bruteforce,
    maximal_products_cactus, JoinSubgraph, ProductPair,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Kind {
    Raag,
    Braid,
}

/// Quasi-isometry type of a join group `F_r x F_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum QiType {
    #[serde(rename = "ZxZ")]
    ZZ,
    #[serde(rename = "ZxF")]
    ZF,
    #[serde(rename = "FxF")]
    FF,
}

impl QiType {
    pub fn of(ranks: (usize, usize)) -> Self {
        match (ranks.0 > 1, ranks.1 > 1) {
            (false, false) => QiType::ZZ,
            (true, true) => QiType::FF,
            _ => QiType::ZF,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            QiType::ZZ => "ZxZ",
            QiType::ZF => "ZxF",
            QiType::FF => "FxF",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Join(JoinSubgraph),
    Pair(ProductPair),
}

impl Label {
    /// Vertex supports of the two coordinates.
    pub fn coords(&self) -> (BTreeSet<Vertex>, BTreeSet<Vertex>) {
        match self {
            Label::Join(j) => (j.side_a.clone(), j.side_b.clone()),
            Label::Pair(p) => (p.first.vertices.clone(), p.second.vertices.clone()),
        }
    }

    pub fn ranks(&self, g: &SimplicialGraph) -> (usize, usize) {
        match self {
            Label::Join(j) => j.ranks(),
            Label::Pair(p) => p.ranks(g),
        }
    }

    /// `Some(flipped)` when `self` lies coordinatewise in `outer`, reading
    /// the coordinates of `self` swapped when `flipped`.
    pub fn inside(&self, outer: &Label) -> Option<bool> {
        match (self, outer) {
            (Label::Join(a), Label::Join(b)) => a.inside(b),
            (Label::Pair(a), Label::Pair(b)) => b.contains(a).then_some(false),
            _ => None,
        }
    }

    /// Equality of each coordinate of `self` with the matching coordinate
    /// of `outer`, under the given alignment.
    fn eq_pattern(&self, outer: &Label, flipped: bool) -> (bool, bool) {
        match (self, outer) {
            (Label::Join(a), Label::Join(b)) => {
                let (x, y) = if flipped { (&b.side_b, &b.side_a) } else { (&b.side_a, &b.side_b) };
                (a.side_a == *x, a.side_b == *y)
            }
            (Label::Pair(a), Label::Pair(b)) => (a.first == b.first, a.second == b.second),
            _ => (false, false),
        }
    }

    /// Some generator lies in both coordinates.
    pub fn overlapping(&self) -> bool {
        let (a, b) = self.coords();
        !a.is_disjoint(&b)
    }
}

#[derive(Debug, Clone)]
pub struct Simplex {
    /// Sorted vertex ids.
    pub verts: Vec<usize>,
    pub label: Label,
    pub name: String,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.verts.len() - 1
    }
}

/// A codimension-one face relation with its inclusion signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceRel {
    pub simplex: usize,
    pub face: usize,
    pub eq_first: bool,
    pub eq_second: bool,
    /// The coordinates of the simplex sit swapped inside the face.
    pub flipped: bool,
}

/// A finite complex of join groups. Simplices `0..n_vertices` are the
/// vertices, in order; higher simplices follow, sorted by dimension.
#[derive(Debug, Clone)]
pub struct JoinComplex {
    pub kind: Kind,
    pub graph: SimplicialGraph,
    pub n_vertices: usize,
    pub simplices: Vec<Simplex>,
    pub faces: Vec<FaceRel>,
    /// Set when the defining graph is itself a join (a single vertex).
    pub trivial: bool,
    /// The products come from a special cactus.
    pub from_special_cactus: bool,
}

impl JoinComplex {
    pub fn ranks(&self, s: usize) -> (usize, usize) {
        self.simplices[s].label.ranks(&self.graph)
    }

    pub fn qi_type(&self, s: usize) -> QiType {
        QiType::of(self.ranks(s))
    }

    pub fn dim(&self) -> usize {
        self.simplices.iter().map(|s| s.dim()).max().unwrap_or(0)
    }

    pub fn simplices_of_dim(&self, d: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.simplices.len()).filter(move |&i| self.simplices[i].dim() == d)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.simplices_of_dim(1)
            .map(|i| (self.simplices[i].verts[0], self.simplices[i].verts[1]))
            .collect()
    }

    /// Vertex adjacency of the 1-skeleton (multi-edges collapsed).
    pub fn neighbors(&self, v: usize) -> BTreeSet<usize> {
        self.edges()
            .into_iter()
            .filter_map(|(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect()
    }

    /// Simplex ids grouped by vertex set.
    pub fn by_verts(&self) -> HashMap<Vec<usize>, Vec<usize>> {
        let mut m: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (i, s) in self.simplices.iter().enumerate() {
            m.entry(s.verts.clone()).or_default().push(i);
        }
        m
    }

    /// Codimension-one faces of a simplex, as recorded in the face map.
    pub fn faces_of(&self, s: usize) -> Vec<&FaceRel> {
        self.faces.iter().filter(|f| f.simplex == s).collect()
    }

    /// Simplices having `s` as a codimension-one face.
    pub fn cofaces_of(&self, s: usize) -> Vec<&FaceRel> {
        self.faces.iter().filter(|f| f.face == s).collect()
    }

    /// A simplex is maximal when it is no proper face of another.
    pub fn is_maximal(&self, s: usize) -> bool {
        !self.faces.iter().any(|f| f.face == s)
    }

    /// Connected components of the underlying complex, as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.n_vertices);
        for (a, b) in self.edges() {
            uf.union(a, b);
        }
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.n_vertices {
            comps.entry(uf.find(v)).or_default().push(v);
        }
        comps.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Recomputes face relations from labels: the face of `(S, K)` at
    /// `S - v` is the unique simplex on `S - v` whose label contains `K`.
    pub fn wire_faces(&mut self) -> Result<()> {
        let index = self.by_verts();
        let mut faces = Vec::new();
        for (i, s) in self.simplices.iter().enumerate() {
            if s.verts.len() < 2 {
                continue;
            }
            for k in 0..s.verts.len() {
                let mut sub = s.verts.clone();
                sub.remove(k);
                let hits: Vec<(usize, bool)> = index
                    .get(&sub)
                    .into_iter()
                    .flatten()
                    .filter_map(|&j| s.label.inside(&self.simplices[j].label).map(|f| (j, f)))
                    .collect();
                let [(j, flipped)] = hits[..] else {
                    return Err(Error::Precondition(format!(
                        "simplex {} has {} candidate faces on {:?}",
                        s.name,
                        hits.len(),
                        sub
                    )));
                };
                let (eq_first, eq_second) = s.label.eq_pattern(&self.simplices[j].label, flipped);
                faces.push(FaceRel { simplex: i, face: j, eq_first, eq_second, flipped });
            }
        }
        self.faces = faces;
        Ok(())
    }

    /// First Betti number of the underlying complex (all components).
    pub fn betti1(&self) -> usize {
        let mut edge_index = HashMap::new();
        let mut edges = Vec::new();
        for i in self.simplices_of_dim(1) {
            edge_index.insert(i, edges.len());
            let v = &self.simplices[i].verts;
            edges.push((v[0], v[1]));
        }
        let mut cells = Vec::new();
        for i in self.simplices_of_dim(2) {
            let v = &self.simplices[i].verts;
            let mut chain = Vec::new();
            for f in self.faces_of(i) {
                let fv = &self.simplices[f.face].verts;
                // the face missing v[k] carries sign (-1)^k
                let k = v.iter().position(|x| !fv.contains(x)).unwrap();
                chain.push((edge_index[&f.face], if k % 2 == 0 { 1 } else { -1 }));
            }
            cells.push(chain);
        }
        homology::betti1(self.n_vertices, &edges, &cells)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vertices: Vec<_> = (0..self.n_vertices)
            .map(|i| {
                json!({
                    "id": i,
                    "label": self.simplices[i].name,
                    "ranks": self.ranks(i),
                    "qi_type": self.qi_type(i).as_str(),
                })
            })
            .collect();
        let simplices: Vec<_> = (0..self.simplices.len())
            .map(|i| {
                json!({
                    "verts": self.simplices[i].verts,
                    "label": self.simplices[i].name,
                    "ranks": self.ranks(i),
                })
            })
            .collect();
        let faces: Vec<_> = self
            .faces
            .iter()
            .map(|f| {
                json!({
                    "simplex": f.simplex,
                    "face": f.face,
                    "sig": [f.eq_first, f.eq_second],
                    "align": if f.flipped { "flipped" } else { "aligned" },
                })
            })
            .collect();
        json!({
            "kind": self.kind,
            "trivial": self.trivial,
            "vertices": vertices,
            "simplices": simplices,
            "faces": faces,
        })
    }

    pub fn to_dot(&self) -> String {
        let color = |q: QiType| match q {
            QiType::ZZ => "lightblue",
            QiType::ZF => "palegreen",
            QiType::FF => "salmon",
        };
        let mut s = String::from("graph ri {\n  node [style=filled];\n");
        for i in 0..self.n_vertices {
            writeln!(
                s,
                "  u{i} [label=\"{}\", fillcolor={}];",
                self.simplices[i].name,
                color(self.qi_type(i))
            )
            .unwrap();
        }
        for i in self.simplices_of_dim(1) {
            let v = &self.simplices[i].verts;
            writeln!(s, "  u{} -- u{} [label=\"{}\"];", v[0], v[1], self.simplices[i].name).unwrap();
        }
        s.push_str("}\n");
        s
    }
}

fn assemble(
    kind: Kind,
    g: &SimplicialGraph,
    mut simplices: Vec<Simplex>,
    from_special_cactus: bool,
) -> Result<JoinComplex> {
    simplices.sort_by(|a, b| {
        (a.verts.len(), &a.verts, &a.label).cmp(&(b.verts.len(), &b.verts, &b.label))
    });
    let n_vertices = simplices.iter().filter(|s| s.verts.len() == 1).count();
    let mut jc = JoinComplex {
        kind,
        graph: g.clone(),
        n_vertices,
        simplices,
        faces: Vec::new(),
        trivial: n_vertices == 1,
        from_special_cactus,
    };
    jc.wire_faces()?;
    Ok(jc)
}

/// Reduced intersection complex of the Salvetti complex of a connected
/// triangle-free graph.
pub fn build_ri_raag(g: &SimplicialGraph) -> Result<JoinComplex> {
    let js = maximal_join_subgraphs(g)?;
    let mut simplices = Vec::new();
    for (i, j) in js.iter().enumerate() {
        simplices.push(Simplex { verts: vec![i], label: Label::Join(j.clone()), name: j.display(g) });
    }
    fn extend(
        g: &SimplicialGraph,
        js: &[JoinSubgraph],
        verts: &mut Vec<usize>,
        label: &JoinSubgraph,
        out: &mut Vec<Simplex>,
    ) {
        let last = *verts.last().unwrap();
        for k in last + 1..js.len() {
            if let Some((m, _)) = label.meet(&js[k]) {
                verts.push(k);
                out.push(Simplex { verts: verts.clone(), label: Label::Join(m.clone()), name: m.display(g) });
                extend(g, js, verts, &m, out);
                verts.pop();
            }
        }
    }
    for (i, j) in js.iter().enumerate() {
        extend(g, &js, &mut vec![i], j, &mut simplices);
    }
    assemble(Kind::Raag, g, simplices, false)
}

/// Reduced intersection complex of `D2(g)` whose vertices are the given
/// maximal products. `namer` renders labels.
pub fn build_ri_from_products(
    g: &SimplicialGraph,
    products: &[ProductPair],
    namer: &dyn Fn(&ProductPair) -> String,
    from_special_cactus: bool,
) -> Result<JoinComplex> {
    let mut simplices = Vec::new();
    for (i, p) in products.iter().enumerate() {
        simplices.push(Simplex { verts: vec![i], label: Label::Pair(p.clone()), name: namer(p) });
    }
    // depth-first over increasing vertex subsets; an empty intersection
    // stays empty for every superset
    let mut stack: Vec<Vec<usize>> = (0..products.len()).map(|i| vec![i]).collect();
    while let Some(verts) = stack.pop() {
        let last = *verts.last().unwrap();
        for k in last + 1..products.len() {
            let mut next = verts.clone();
            next.push(k);
            let labels: Vec<ProductPair> = next.iter().map(|&i| products[i].clone()).collect();
            let hits = intersect_products(g, &labels);
            if hits.is_empty() {
                continue;
            }
            for p in hits {
                simplices.push(Simplex { verts: next.clone(), name: namer(&p), label: Label::Pair(p) });
            }
            stack.push(next);
        }
    }
    assemble(Kind::Braid, g, simplices, from_special_cactus)
}

/// Reduced intersection complex of `D2` of a special cactus.
pub fn build_ri_braid(a: &CactusAnalysis) -> Result<JoinComplex> {
    let ps = maximal_products_cactus(a)?;
    build_ri_from_products(&a.graph, &ps, &|p| p.cycle_display(a), true)
}

/// First Betti number of `D2` of the spine tree. When the spine is a path,
/// `D2` has two homeomorphic components and one of them is measured.
pub fn spine_d2_betti1(a: &CactusAnalysis) -> Result<usize> {
    let spine = a
        .spine
        .as_ref()
        .ok_or_else(|| Error::Precondition("not a cactus".into()))?;
    if spine.n() < 2 {
        return Ok(0);
    }
    Ok(square::betti1(&square::build_d2(spine)?.complex).b1)
}

/// Reduced intersection complex of `D2(g)`: read off the spine for special
/// cacti, otherwise from the exhaustive product enumeration.
pub fn build_ri_d2(g: &SimplicialGraph, cap: usize) -> Result<JoinComplex> {
    let a = analyze_cactus(g)?;
    if a.is_special {
        return build_ri_braid(&a);
    }
    let ps = maximal_products_bruteforce(g, cap)?;
    build_ri_from_products(g, &ps, &|p| p.display(g), false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ComponentKind {
    /// Closed under the coordinate switch.
    M,
    /// Switched onto the component with the given index.
    S(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub components: Vec<Vec<usize>>,
    pub kinds: Vec<ComponentKind>,
    /// Vertex switch map.
    pub switch: Vec<usize>,
}

impl ComponentReport {
    pub fn count(&self, m: bool) -> usize {
        self.kinds.iter().filter(|k| matches!(k, ComponentKind::M) == m).count()
    }
}

/// Components of a braid complex, with the switch map and M/S types.
pub fn components_and_switch(jc: &JoinComplex) -> Result<ComponentReport> {
    if jc.kind != Kind::Braid {
        return Err(Error::Precondition("components_and_switch needs a braid complex".into()));
    }
    let index: HashMap<&Label, usize> =
        (0..jc.n_vertices).map(|i| (&jc.simplices[i].label, i)).collect();
    let mut switch = Vec::with_capacity(jc.n_vertices);
    for i in 0..jc.n_vertices {
        let Label::Pair(p) = &jc.simplices[i].label else { unreachable!() };
        let j = index
            .get(&Label::Pair(p.swap()))
            .ok_or_else(|| Error::Precondition(format!("{} has no switched twin", jc.simplices[i].name)))?;
        switch.push(*j);
    }
    let components = jc.components();
    let comp_of: HashMap<usize, usize> = components
        .iter()
        .enumerate()
        .flat_map(|(c, vs)| vs.iter().map(move |&v| (v, c)))
        .collect();
    let kinds = components
        .iter()
        .enumerate()
        .map(|(c, vs)| {
            let t = comp_of[&switch[vs[0]]];
            if t == c { ComponentKind::M } else { ComponentKind::S(t) }
        })
        .collect();
    Ok(ComponentReport { components, kinds, switch })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VertexType {
    Type1,
    Type2,
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexClass {
    pub separating: bool,
    pub vertex_type: VertexType,
    /// Generators lying in no neighbouring label.
    pub private: Vec<Vertex>,
}

/// Separating vertices and type-1/type-2 vertices of a Salvetti complex RI.
pub fn vertex_classification(jc: &JoinComplex) -> Vec<VertexClass> {
    let base = jc.components().len();
    let edges = jc.edges();
    (0..jc.n_vertices)
        .map(|v| {
            let rest: Vec<(usize, usize)> =
                edges.iter().copied().filter(|&(a, b)| a != v && b != v).collect();
            let mut uf = UnionFind::new(jc.n_vertices);
            for &(a, b) in &rest {
                uf.union(a, b);
            }
            let after = (0..jc.n_vertices).filter(|&u| u != v && uf.find(u) == u).count();
            let separating = after > base;
            let (a, b) = jc.simplices[v].label.coords();
            let mut covered = BTreeSet::new();
            for u in jc.neighbors(v) {
                let (x, y) = jc.simplices[u].label.coords();
                covered.extend(x);
                covered.extend(y);
            }
            let private: Vec<Vertex> = a.union(&b).filter(|x| !covered.contains(x)).copied().collect();
            let vertex_type = if !separating && private.is_empty() { VertexType::Type1 } else { VertexType::Type2 };
            VertexClass { separating, vertex_type, private }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub property: &'static str,
    pub message: String,
    /// Reported as a warning rather than a failure.
    pub warning: bool,
}

/// Label-level checks of the defining properties of a complex of join groups.
pub fn validate_cjoin(jc: &JoinComplex) -> Vec<Violation> {
    let mut out = Vec::new();
    let name = |i: usize| jc.simplices[i].name.clone();
    let soft = jc.kind == Kind::Braid && !jc.from_special_cactus;

    // (i) face containment
    for f in &jc.faces {
        if jc.simplices[f.simplex].label.inside(&jc.simplices[f.face].label).is_none() {
            out.push(Violation {
                property: "i",
                message: format!("label of {} not inside face {}", name(f.simplex), name(f.face)),
                warning: false,
            });
        }
    }

    // (iii) distinct maximal simplices sharing a face strictly inside it
    let closure = face_closure(jc);
    let maximal: Vec<usize> = (0..jc.simplices.len()).filter(|&s| jc.is_maximal(s)).collect();
    for (x, &s1) in maximal.iter().enumerate() {
        for &s2 in &maximal[x + 1..] {
            for t in closure[s1].intersection(&closure[s2]) {
                for s in [s1, s2] {
                    if jc.simplices[s].label == jc.simplices[*t].label {
                        out.push(Violation {
                            property: "iii",
                            message: format!("{} and {} share face {} with an equal label", name(s1), name(s2), name(*t)),
                            warning: false,
                        });
                    }
                }
            }
        }
    }

    // (ii) labels meeting in a join label span a simplex with that label
    let index = jc.by_verts();
    for s1 in 0..jc.simplices.len() {
        for s2 in s1 + 1..jc.simplices.len() {
            if closure[s1].contains(&s2) || closure[s2].contains(&s1) {
                continue;
            }
            let Some(meet) = label_meet(jc, s1, s2) else { continue };
            let union: BTreeSet<usize> =
                jc.simplices[s1].verts.iter().chain(&jc.simplices[s2].verts).copied().collect();
            let union: Vec<usize> = union.into_iter().collect();
            let ok = index
                .get(&union)
                .is_some_and(|ids| ids.iter().any(|&i| jc.simplices[i].label == meet));
            if !ok {
                out.push(Violation {
                    property: "ii",
                    message: format!("{} and {} meet in a join label but span no simplex", name(s1), name(s2)),
                    warning: soft,
                });
            }
        }
    }

    // (iv) no generator on both sides
    for i in 0..jc.simplices.len() {
        if jc.simplices[i].label.overlapping() {
            out.push(Violation {
                property: "iv",
                message: format!("label of {} has a generator in both coordinates", name(i)),
                warning: false,
            });
        }
    }

    // (v) simplices sharing a generator form a connected union inside a star
    for (gen, members) in generator_classes(jc) {
        if members.len() < 2 {
            continue;
        }
        let verts: BTreeSet<usize> =
            members.iter().flat_map(|&s| jc.simplices[s].verts.iter().copied()).collect();
        // connectivity of the full subcomplex spanned by these vertices
        let mut uf = UnionFind::new(jc.n_vertices);
        for (a, b) in jc.edges() {
            if verts.contains(&a) && verts.contains(&b) {
                uf.union(a, b);
            }
        }
        let roots: BTreeSet<usize> = verts.iter().map(|&v| uf.find(v)).collect();
        let in_star = (0..jc.n_vertices).any(|c| {
            members.iter().all(|&s| {
                let mut vs = jc.simplices[s].verts.clone();
                if !vs.contains(&c) {
                    vs.push(c);
                    vs.sort_unstable();
                }
                index.contains_key(&vs)
            })
        });
        if roots.len() > 1 || !in_star {
            out.push(Violation {
                property: "v",
                message: format!("simplices through {gen} are not connected inside one star"),
                warning: soft,
            });
        }
    }
    out
}

/// All faces (of every codimension, including itself) of each simplex.
fn face_closure(jc: &JoinComplex) -> Vec<BTreeSet<usize>> {
    let mut closure: Vec<BTreeSet<usize>> = (0..jc.simplices.len()).map(|i| BTreeSet::from([i])).collect();
    // simplices are sorted by dimension, so faces are finished first
    for i in 0..jc.simplices.len() {
        let direct: Vec<usize> = jc.faces_of(i).iter().map(|f| f.face).collect();
        for f in direct {
            let sub = closure[f].clone();
            closure[i].extend(sub);
        }
    }
    closure
}

fn label_meet(jc: &JoinComplex, s1: usize, s2: usize) -> Option<Label> {
    match (&jc.simplices[s1].label, &jc.simplices[s2].label) {
        (Label::Join(a), Label::Join(b)) => a.meet(b).map(|(m, _)| Label::Join(m)),
        (Label::Pair(a), Label::Pair(b)) => {
            let m = intersect_products(&jc.graph, &[a.clone(), b.clone()]);
            match &m[..] {
                [p] => Some(Label::Pair(p.clone())),
                _ => None,
            }
        }
        _ => None,
    }
}

/// For each generator, the simplices whose assigned group contains it.
/// Salvetti generators are graph vertices. On the braid side a nontrivial
/// element needs a cycle in one coordinate and a point in the other, so the
/// key is a coordinate, an induced cycle in it, and a vertex of the other.
fn generator_classes(jc: &JoinComplex) -> BTreeMap<String, Vec<usize>> {
    let mut out: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let g = &jc.graph;
    match jc.kind {
        Kind::Raag => {
            for (i, s) in jc.simplices.iter().enumerate() {
                let (a, b) = s.label.coords();
                for v in a.union(&b) {
                    out.entry(g.name(*v).to_string()).or_default().push(i);
                }
            }
        }
        Kind::Braid => {
            let cycles: Vec<Subgraph> = (3..=g.n())
                .flat_map(|n| detect_induced_cycles(g, n))
                .map(|c| {
                    let vs: BTreeSet<Vertex> = c.into_iter().collect();
                    Subgraph::induced(g, &vs)
                })
                .collect();
            for (i, s) in jc.simplices.iter().enumerate() {
                let Label::Pair(p) = &s.label else { continue };
                for (k, c) in cycles.iter().enumerate() {
                    for (coord, this, other) in [(1, &p.first, &p.second), (2, &p.second, &p.first)] {
                        if this.contains(c) {
                            for &v in &other.vertices {
                                out.entry(format!("{coord}:{k}:{}", g.name(v))).or_default().push(i);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn ring_order(jc: &JoinComplex) -> Option<Vec<usize>> {
        // the vertex order around a cycle graph, starting at 0
        let mut order = vec![0];
        let mut prev = usize::MAX;
        let mut cur = 0;
        loop {
            let nb = jc.neighbors(cur);
            if nb.len() != 2 {
                return None;
            }
            let next = *nb.iter().find(|&&w| w != prev).unwrap();
            if next == 0 {
                break;
            }
            order.push(next);
            prev = cur;
            cur = next;
        }
        (order.len() == jc.n_vertices).then_some(order)
    }

    /// Cycle vertices carrying a branch, maximized over cycles.
    fn max_branch_points(a: &CactusAnalysis) -> usize {
        a.cycle_orders
            .iter()
            .map(|o| o.iter().filter(|&&v| a.graph.degree(v) > 2).count())
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn ri_homology_matches_spine_configurations() {
        for (name, g) in corpus::special_cacti() {
            let a = analyze_cactus(&g).unwrap();
            if !a.is_braid_regular() {
                continue;
            }
            let ri = build_ri_braid(&a).unwrap().betti1();
            let sp = spine_d2_betti1(&a).unwrap();
            if max_branch_points(&a) >= 4 {
                // a cycle cut into two arcs gives products the spine misses
                assert_ne!(ri, sp, "{name}");
                continue;
            }
            assert_eq!(ri, sp, "{name}");
            if a.cactus_type == crate::cactus::CactusType::S {
                assert_eq!(ri, 0, "{name}");
            }
        }
    }

    #[test]
    fn hub_cycle_with_four_branches() {
        let g = corpus::special_cacti().into_iter().find(|(n, _)| n == "square_hub").unwrap().1;
        let a = analyze_cactus(&g).unwrap();
        let jc = build_ri_braid(&a).unwrap();
        assert_eq!(jc.n_vertices, 12);
        assert_eq!(jc.betti1(), 1);
        assert_eq!(spine_d2_betti1(&a).unwrap(), 5);
        let names: BTreeSet<&str> = (0..12).map(|i| jc.simplices[i].name.as_str()).collect();
        assert!(names.contains("{a2,a3}x{a4,a5}"), "{names:?}");
    }

    #[test]
    fn ri_of_p4() {
        let jc = build_ri_raag(&corpus::path(4)).unwrap();
        assert_eq!(jc.n_vertices, 2);
        assert_eq!(jc.simplices.len(), 3);
        assert_eq!(jc.simplices[0].name, "<a,c>x<b>");
        assert_eq!(jc.simplices[1].name, "<b,d>x<c>");
        assert_eq!(jc.simplices[2].name, "<b>x<c>");
        assert_eq!(jc.ranks(2), (1, 1));
        let classes = vertex_classification(&jc);
        assert!(classes.iter().all(|c| c.vertex_type == VertexType::Type2 && !c.separating));
        let names: Vec<&str> = classes.iter().map(|c| jc.graph.name(c.private[0])).collect();
        assert_eq!(names, ["a", "d"]);
        assert!(validate_cjoin(&jc).is_empty());
    }

    #[test]
    fn ri_of_cycles() {
        for n in [5, 6] {
            let jc = build_ri_raag(&corpus::cycle(n)).unwrap();
            assert_eq!(jc.n_vertices, n);
            assert_eq!(jc.simplices.len(), 2 * n);
            assert!(ring_order(&jc).is_some());
            for v in 0..n {
                assert_eq!(jc.qi_type(v), QiType::ZF);
            }
            for e in jc.simplices_of_dim(1) {
                assert_eq!(jc.ranks(e), (1, 1));
            }
            assert!(vertex_classification(&jc).iter().all(|c| c.vertex_type == VertexType::Type1));
            assert!(validate_cjoin(&jc).is_empty());
            assert_eq!(jc.betti1(), 1);
        }
        let jc = build_ri_raag(&corpus::cycle(4)).unwrap();
        assert!(jc.trivial);
        assert_eq!(jc.simplices.len(), 1);
    }

    #[test]
    fn ri_of_o3_is_a_hexagon() {
        let a = analyze_cactus(&corpus::o_k(3)).unwrap();
        let jc = build_ri_braid(&a).unwrap();
        assert_eq!(jc.n_vertices, 6);
        assert_eq!(jc.simplices_of_dim(1).count(), 6);
        assert_eq!(jc.dim(), 1);
        let order = ring_order(&jc).unwrap();
        let names: Vec<&str> = order.iter().map(|&i| jc.simplices[i].name.as_str()).collect();
        let want = ["{a2,a3}x{a1}", "{a2}x{a1,a3}", "{a1,a2}x{a3}", "{a1}x{a2,a3}", "{a1,a3}x{a2}", "{a3}x{a1,a2}"];
        let start = want.iter().position(|w| *w == names[0]).unwrap();
        let fwd: Vec<&str> = (0..6).map(|k| want[(start + k) % 6]).collect();
        let bwd: Vec<&str> = (0..6).map(|k| want[(start + 6 - k) % 6]).collect();
        assert!(names == fwd || names == bwd, "{names:?}");
        let rep = components_and_switch(&jc).unwrap();
        assert_eq!(rep.kinds, vec![ComponentKind::M]);
        // the switch is antipodal
        for k in 0..6 {
            assert_eq!(rep.switch[order[k]], order[(k + 3) % 6]);
        }
        assert!(validate_cjoin(&jc).is_empty(), "{:?}", validate_cjoin(&jc));
        assert_eq!(jc.betti1(), 1);
    }

    #[test]
    fn ri_of_o4() {
        let a = analyze_cactus(&corpus::o_k(4)).unwrap();
        let jc = build_ri_braid(&a).unwrap();
        assert_eq!(jc.n_vertices, 8);
        assert_eq!(jc.simplices_of_dim(1).count(), 12);
        assert!((0..8).all(|v| jc.neighbors(v).len() == 3));
        assert!(validate_cjoin(&jc).is_empty());
    }

    #[test]
    fn type_s_chains_are_two_simplices() {
        for n in 2..=6 {
            let a = analyze_cactus(&corpus::triangle_chain(n)).unwrap();
            let jc = build_ri_braid(&a).unwrap();
            let rep = components_and_switch(&jc).unwrap();
            assert_eq!(rep.components.len(), 2, "n={n}");
            assert_eq!(rep.kinds, vec![ComponentKind::S(1), ComponentKind::S(0)]);
            for comp in &rep.components {
                assert_eq!(comp.len(), n - 1);
                assert!(jc.by_verts().contains_key(comp));
            }
            assert_eq!(jc.betti1(), 0);
            assert!(validate_cjoin(&jc).is_empty());
        }
    }

    #[test]
    fn nested_squares_give_six_s_components() {
        let jc = build_ri_d2(&corpus::nested_squares(), 24).unwrap();
        let rep = components_and_switch(&jc).unwrap();
        assert_eq!(rep.components.len(), 6);
        assert_eq!(rep.count(true), 0);
    }

    #[test]
    fn injected_violations_are_caught() {
        let base = build_ri_raag(&corpus::path(4)).unwrap();
        // property (iii): a second maximal edge at vertex 0 with the vertex label
        let g = corpus::path(5);
        let mut jc = build_ri_raag(&g).unwrap();
        assert!(validate_cjoin(&jc).is_empty());
        let e = jc.simplices_of_dim(1).next().unwrap();
        let shared = jc.simplices[e].verts[1];
        jc.simplices[e].label = jc.simplices[shared].label.clone();
        assert!(validate_cjoin(&jc).iter().any(|v| v.property == "iii"));
        // property (iv): a label with a generator on both sides
        let mut jc = base.clone();
        if let Label::Join(j) = &mut jc.simplices[0].label {
            j.side_b.insert(0);
        }
        assert!(validate_cjoin(&jc).iter().any(|v| v.property == "iv"));
    }

    #[test]
    fn builders_validate_on_the_corpus() {
        for (name, g) in corpus::special_cacti() {
            let a = analyze_cactus(&g).unwrap();
            let jc = build_ri_braid(&a).unwrap();
            let bad: Vec<_> = validate_cjoin(&jc).into_iter().filter(|v| !v.warning).collect();
            assert!(bad.is_empty(), "{name}: {bad:?}");
        }
        for (name, g) in corpus::raags().into_iter().chain(corpus::finite_out()) {
            if !g.is_connected() {
                continue;
            }
            let jc = build_ri_raag(&g).unwrap();
            assert!(jc.is_connected(), "{name}");
            assert!(validate_cjoin(&jc).is_empty(), "{name}");
        }
    }
}
