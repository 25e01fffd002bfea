//! Combinatorial square complexes and the ordered 2-point configuration
//! space `D2` of a graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, SimplicialGraph, Vertex};
use crate::homology::{self, ParityUnionFind, UnionFind};

/// A square given by its boundary walk: step `i` traverses `edges[i]`, in its
/// own direction when `forward[i]` holds. Corner `i` is where step `i` starts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Square {
    pub edges: [usize; 4],
    pub forward: [bool; 4],
}

#[derive(Debug, Clone, Default)]
pub struct SquareComplex {
    pub vertices: Vec<String>,
    /// Oriented edges `(tail, head)`; the edge id is the index.
    pub edges: Vec<(usize, usize)>,
    pub squares: Vec<Square>,
}

/// An end of an edge: `(edge id, false)` is the tail, `(edge id, true)` the head.
pub type EdgeEnd = (usize, bool);

impl SquareComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> usize {
        self.vertices.push(name.into());
        self.vertices.len() - 1
    }

    pub fn add_edge(&mut self, tail: usize, head: usize) -> usize {
        self.edges.push((tail, head));
        self.edges.len() - 1
    }

    pub fn add_square_oriented(&mut self, sq: Square) -> Result<usize> {
        self.check_walk(&sq)?;
        self.squares.push(sq);
        Ok(self.squares.len() - 1)
    }

    /// Adds a square from four edge ids in cyclic order. Directions of
    /// non-loop edges are forced by the walk; a loop is read forward unless
    /// it already occurs at the opposite position, in which case it is read
    /// backward (an orientation-preserving identification).
    pub fn add_square(&mut self, edges: [usize; 4]) -> Result<usize> {
        for first in [true, false] {
            let mut forward = [true; 4];
            forward[0] = first;
            let (t, h) = self.edges[edges[0]];
            let start = if first { t } else { h };
            let mut cur = if first { h } else { t };
            let mut ok = true;
            for i in 1..4 {
                let (t, h) = self.edges[edges[i]];
                let f = if t == h {
                    if i >= 2 && edges[i - 2] == edges[i] { !forward[i - 2] } else { true }
                } else if t == cur {
                    true
                } else if h == cur {
                    false
                } else {
                    ok = false;
                    break;
                };
                forward[i] = f;
                cur = if f { h } else { t };
            }
            if ok && cur == start {
                return self.add_square_oriented(Square { edges, forward });
            }
        }
        Err(Error::Precondition(format!("edges {edges:?} do not bound a square")))
    }

    fn check_walk(&self, sq: &Square) -> Result<()> {
        let corners = self.corners(sq);
        for i in 0..4 {
            let (t, h) = self.edges[sq.edges[i]];
            let (a, b) = if sq.forward[i] { (t, h) } else { (h, t) };
            if a != corners[i] || b != corners[(i + 1) % 4] {
                return Err(Error::Precondition("square boundary is not a closed walk".into()));
            }
        }
        Ok(())
    }

    /// Corner vertices of a square in walk order.
    pub fn corners(&self, sq: &Square) -> [usize; 4] {
        let mut c = [0; 4];
        for i in 0..4 {
            let (t, h) = self.edges[sq.edges[i]];
            c[i] = if sq.forward[i] { t } else { h };
        }
        c
    }

    /// The two edge ends meeting at corner `i` of a square.
    pub fn corner_ends(&self, sq: &Square, i: usize) -> (EdgeEnd, EdgeEnd) {
        let out = (sq.edges[i], !sq.forward[i]);
        let p = (i + 3) % 4;
        let inc = (sq.edges[p], sq.forward[p]);
        (out, inc)
    }

    pub fn end_vertex(&self, end: EdgeEnd) -> usize {
        let (t, h) = self.edges[end.0];
        if end.1 { h } else { t }
    }

    /// Link of vertex `v`: edge ends at `v` and square corners at `v`.
    pub fn link(&self, v: usize) -> Link {
        let mut ends = BTreeSet::new();
        for (id, &(t, h)) in self.edges.iter().enumerate() {
            if t == v {
                ends.insert((id, false));
            }
            if h == v {
                ends.insert((id, true));
            }
        }
        let mut arcs = Vec::new();
        for sq in &self.squares {
            let c = self.corners(sq);
            for i in 0..4 {
                if c[i] == v {
                    arcs.push(self.corner_ends(sq, i));
                }
            }
        }
        Link { ends, arcs }
    }

    pub fn is_connected(&self) -> bool {
        homology::graph_components(self.vertices.len(), &self.edges) <= 1
    }

    /// 2-cell boundaries as signed edge sums.
    fn square_chains(&self) -> Vec<Vec<(usize, i64)>> {
        self.squares
            .iter()
            .map(|sq| {
                (0..4)
                    .map(|i| (sq.edges[i], if sq.forward[i] { 1 } else { -1 }))
                    .collect()
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.vertices,
            "edges": self.edges.iter().enumerate()
                .map(|(id, &(t, h))| serde_json::json!([self.vertices[t], self.vertices[h], id]))
                .collect::<Vec<_>>(),
            "squares": self.squares.iter().map(|s| s.edges.to_vec()).collect::<Vec<_>>(),
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph square_complex {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(s, "  n{i} [label=\"{v}\"];").unwrap();
        }
        for (id, &(t, h)) in self.edges.iter().enumerate() {
            writeln!(s, "  n{t} -- n{h} [label=\"{id}\"];").unwrap();
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone)]
pub struct Link {
    pub ends: BTreeSet<EdgeEnd>,
    pub arcs: Vec<(EdgeEnd, EdgeEnd)>,
}

/// A cell of a graph: a vertex or an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Cell {
    V(Vertex),
    E(Edge),
}

impl Cell {
    fn touches(&self, other: &Cell) -> bool {
        let ends = |c: &Cell| match *c {
            Cell::V(v) => vec![v],
            Cell::E((a, b)) => vec![a, b],
        };
        let (x, y) = (ends(self), ends(other));
        x.iter().any(|v| y.contains(v))
    }
}

/// `D2(g)` with its projection labellings and the coordinate swap.
#[derive(Debug, Clone)]
pub struct D2 {
    pub complex: SquareComplex,
    pub vertex_cells: Vec<(Vertex, Vertex)>,
    pub edge_cells: Vec<(Cell, Cell)>,
    pub square_cells: Vec<(Edge, Edge)>,
    /// Coordinate swap on vertices, edges and squares.
    pub swap_vertex: Vec<usize>,
    pub swap_edge: Vec<usize>,
    pub swap_square: Vec<usize>,
}

/// Ordered discrete configuration space of two points.
pub fn build_d2(g: &SimplicialGraph) -> Result<D2> {
    if g.n() < 2 {
        return Err(Error::Precondition("D2 needs at least two vertices".into()));
    }
    let mut c = SquareComplex::new();
    let mut vid = HashMap::new();
    let mut vertex_cells = Vec::new();
    for v in g.vertices() {
        for w in g.vertices() {
            if v != w {
                vid.insert((v, w), c.add_vertex(format!("({},{})", g.name(v), g.name(w))));
                vertex_cells.push((v, w));
            }
        }
    }
    let mut eid = HashMap::new();
    let mut edge_cells = Vec::new();
    // edges: one coordinate moves along an edge, the other sits at a vertex
    for (a, b) in g.edges() {
        for w in g.vertices() {
            if w == a || w == b {
                continue;
            }
            let e = c.add_edge(vid[&(a, w)], vid[&(b, w)]);
            eid.insert((Cell::E((a, b)), Cell::V(w)), e);
            edge_cells.push((Cell::E((a, b)), Cell::V(w)));
            let e = c.add_edge(vid[&(w, a)], vid[&(w, b)]);
            eid.insert((Cell::V(w), Cell::E((a, b))), e);
            edge_cells.push((Cell::V(w), Cell::E((a, b))));
        }
    }
    let mut square_cells = Vec::new();
    let edges: Vec<Edge> = g.edges().collect();
    for &(a, b) in &edges {
        for &(cc, d) in &edges {
            if Cell::E((a, b)).touches(&Cell::E((cc, d))) {
                continue;
            }
            let e1 = Cell::E((a, b));
            let e2 = Cell::E((cc, d));
            let sq = Square {
                edges: [
                    eid[&(e1, Cell::V(cc))],
                    eid[&(Cell::V(b), e2)],
                    eid[&(e1, Cell::V(d))],
                    eid[&(Cell::V(a), e2)],
                ],
                forward: [true, true, false, false],
            };
            c.add_square_oriented(canonical_square(&c, sq))?;
            square_cells.push(((a, b), (cc, d)));
        }
    }
    let swap_vertex = vertex_cells.iter().map(|&(v, w)| vid[&(w, v)]).collect();
    let swap_edge = edge_cells.iter().map(|&(x, y)| eid[&(y, x)]).collect();
    let sq_index: HashMap<(Edge, Edge), usize> =
        square_cells.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let swap_square = square_cells.iter().map(|&(x, y)| sq_index[&(y, x)]).collect();
    Ok(D2 { complex: c, vertex_cells, edge_cells, square_cells, swap_vertex, swap_edge, swap_square })
}

/// Rotates/reflects a square walk to start at its least corner, heading
/// toward the smaller of the two adjacent corners.
pub fn canonical_square(c: &SquareComplex, sq: Square) -> Square {
    let mut best: Option<(Vec<usize>, Square)> = None;
    for rev in [false, true] {
        let base = if rev { reverse_walk(&sq) } else { sq.clone() };
        for r in 0..4 {
            let rot = Square {
                edges: std::array::from_fn(|i| base.edges[(i + r) % 4]),
                forward: std::array::from_fn(|i| base.forward[(i + r) % 4]),
            };
            let key: Vec<usize> = c.corners(&rot).to_vec();
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, rot));
            }
        }
    }
    best.unwrap().1
}

fn reverse_walk(sq: &Square) -> Square {
    Square {
        edges: [sq.edges[3], sq.edges[2], sq.edges[1], sq.edges[0]],
        forward: [!sq.forward[3], !sq.forward[2], !sq.forward[1], !sq.forward[0]],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum NpcViolationKind {
    LoopInLink,
    DoubleArc,
    Triangle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NpcViolation {
    pub vertex: usize,
    pub kind: NpcViolationKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct NpcReport {
    pub violations: Vec<NpcViolation>,
}

impl NpcReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Gromov's link condition in dimension two: every vertex link is a
/// simplicial graph without triangles.
pub fn npc_check(c: &SquareComplex) -> NpcReport {
    let mut violations = Vec::new();
    for v in 0..c.vertices.len() {
        let link = c.link(v);
        let mut seen = BTreeSet::new();
        let mut adj: BTreeMap<EdgeEnd, BTreeSet<EdgeEnd>> = BTreeMap::new();
        for &(x, y) in &link.arcs {
            if x == y {
                violations.push(NpcViolation { vertex: v, kind: NpcViolationKind::LoopInLink });
                continue;
            }
            let key = if x < y { (x, y) } else { (y, x) };
            if !seen.insert(key) {
                violations.push(NpcViolation { vertex: v, kind: NpcViolationKind::DoubleArc });
            }
            adj.entry(x).or_default().insert(y);
            adj.entry(y).or_default().insert(x);
        }
        let has_triangle = seen.iter().any(|(x, y)| {
            adj[x].intersection(&adj[y]).next().is_some()
        });
        if has_triangle {
            violations.push(NpcViolation { vertex: v, kind: NpcViolationKind::Triangle });
        }
    }
    NpcReport { violations }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hyperplane {
    pub edge_class: BTreeSet<usize>,
    pub self_intersecting: bool,
    pub self_osculating: bool,
    pub one_sided: bool,
}

/// Hyperplanes as classes of edges under the opposite-sides relation.
pub fn hyperplanes(c: &SquareComplex) -> Vec<Hyperplane> {
    let m = c.edges.len();
    let mut uf = UnionFind::new(m);
    let mut side = ParityUnionFind::new(m);
    let mut twisted = BTreeSet::new();
    for sq in &c.squares {
        for (i, j) in [(0, 2), (1, 3)] {
            uf.union(sq.edges[i], sq.edges[j]);
            // opposite sides point the same way across the square iff the
            // walk reads them in opposite directions
            let flip = sq.forward[i] == sq.forward[j];
            if !side.relate(sq.edges[i], sq.edges[j], flip) {
                twisted.insert(uf.find(sq.edges[i]));
            }
        }
    }
    let mut classes: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for e in 0..m {
        classes.entry(uf.find(e)).or_default().insert(e);
    }
    let class_of: Vec<usize> = (0..m).map(|e| uf.find(e)).collect();
    let mut crossing = BTreeSet::new();
    for sq in &c.squares {
        if class_of[sq.edges[0]] == class_of[sq.edges[1]] {
            crossing.insert(class_of[sq.edges[0]]);
        }
    }
    // osculation: two distinct ends of one class at a vertex, not a corner
    let mut osculating = BTreeSet::new();
    for v in 0..c.vertices.len() {
        let link = c.link(v);
        let corners: BTreeSet<(EdgeEnd, EdgeEnd)> = link
            .arcs
            .iter()
            .flat_map(|&(x, y)| [(x, y), (y, x)])
            .collect();
        let ends: Vec<EdgeEnd> = link.ends.iter().copied().collect();
        for (i, &x) in ends.iter().enumerate() {
            for &y in &ends[i + 1..] {
                if class_of[x.0] == class_of[y.0] && !corners.contains(&(x, y)) {
                    osculating.insert(class_of[x.0]);
                }
            }
        }
    }
    let mut out: Vec<Hyperplane> = classes
        .into_iter()
        .map(|(root, edge_class)| Hyperplane {
            edge_class,
            self_intersecting: crossing.contains(&root),
            self_osculating: osculating.contains(&root),
            one_sided: twisted.contains(&root),
        })
        .collect();
    out.sort_by(|a, b| a.edge_class.cmp(&b.edge_class));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Betti1 {
    pub b1: usize,
    pub components: usize,
    /// True when the complex was disconnected and only its largest
    /// component was measured.
    pub restricted: bool,
}

/// First Betti number over the rationals, over the largest component when
/// the complex is disconnected.
pub fn betti1(c: &SquareComplex) -> Betti1 {
    let n = c.vertices.len();
    let mut uf = UnionFind::new(n);
    for &(a, b) in &c.edges {
        uf.union(a, b);
    }
    let mut size: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..n {
        *size.entry(uf.find(v)).or_default() += 1;
    }
    let components = size.len();
    if components <= 1 {
        let b1 = homology::betti1(n, &c.edges, &c.square_chains());
        return Betti1 { b1, components, restricted: false };
    }
    let (&root, _) = size.iter().max_by_key(|(r, s)| (**s, std::cmp::Reverse(**r))).unwrap();
    let keep: Vec<usize> = (0..n).filter(|&v| uf.find(v) == root).collect();
    let vmap: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut emap = HashMap::new();
    let mut edges = Vec::new();
    for (id, &(a, b)) in c.edges.iter().enumerate() {
        if let (Some(&x), Some(&y)) = (vmap.get(&a), vmap.get(&b)) {
            emap.insert(id, edges.len());
            edges.push((x, y));
        }
    }
    let cells: Vec<Vec<(usize, i64)>> = c
        .square_chains()
        .into_iter()
        .filter(|ch| emap.contains_key(&ch[0].0))
        .map(|ch| ch.into_iter().map(|(e, s)| (emap[&e], s)).collect())
        .collect();
    Betti1 { b1: homology::betti1(keep.len(), &edges, &cells), components, restricted: true }
}
