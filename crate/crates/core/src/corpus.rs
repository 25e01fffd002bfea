//! Named fixture graphs used by tests, the acceptance suite and `corpus/`.

use crate::graph::SimplicialGraph;

fn letter_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if n <= 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("v{i}")
            }
        })
        .collect()
}

fn build(names: &[String], edges: &[(usize, usize)]) -> SimplicialGraph {
    let mut g = SimplicialGraph::new();
    for n in names {
        g.add_vertex(n).unwrap();
    }
    for &(a, b) in edges {
        g.add_edge(a, b).unwrap();
    }
    g
}

/// Path on `n` vertices named `a, b, c, ...`.
pub fn path(n: usize) -> SimplicialGraph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    build(&letter_names(n), &edges)
}

/// Cycle on `n` vertices named `a, b, c, ...`.
pub fn cycle(n: usize) -> SimplicialGraph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    build(&letter_names(n), &edges)
}

pub fn complete(n: usize) -> SimplicialGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j));
        }
    }
    build(&letter_names(n), &edges)
}

/// Star with centre `v` and leaves `a, b, c, ...`.
pub fn star(k: usize) -> SimplicialGraph {
    let mut names = vec!["v".to_string()];
    names.extend(letter_names(k));
    let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
    build(&names, &edges)
}

pub fn petersen() -> SimplicialGraph {
    let mut names: Vec<String> = (0..5).map(|i| format!("u{i}")).collect();
    names.extend((0..5).map(|i| format!("w{i}")));
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    build(&names, &edges)
}

/// Bipartite double cover `g x K2`.
pub fn bipartite_double(g: &SimplicialGraph) -> SimplicialGraph {
    let mut names: Vec<String> = g.names().iter().map(|n| format!("{n}+")).collect();
    names.extend(g.names().iter().map(|n| format!("{n}-")));
    let n = g.n();
    let mut edges = Vec::new();
    for (a, b) in g.edges() {
        edges.push((a, b + n));
        edges.push((b, a + n));
    }
    build(&names, &edges)
}

/// The Desargues graph, the bipartite double cover of the Petersen graph.
pub fn desargues() -> SimplicialGraph {
    bipartite_double(&petersen())
}

/// The 3-cube graph: two nested squares `p1..p4`, `q1..q4` and four rungs.
pub fn nested_squares() -> SimplicialGraph {
    let names: Vec<String> = (1..=4)
        .map(|i| format!("p{i}"))
        .chain((1..=4).map(|i| format!("q{i}")))
        .collect();
    let mut edges = Vec::new();
    for i in 0..4 {
        edges.push((i, (i + 1) % 4));
        edges.push((4 + i, 4 + (i + 1) % 4));
        edges.push((i, i + 4));
    }
    build(&names, &edges)
}

/// Incremental builder for cacti whose cycles are named `a1, a2, ...`; the
/// vertices of cycle `ai` of length `m` are `ai_0 .. ai_{m-1}`.
#[derive(Default)]
pub struct CactusBuilder {
    g: SimplicialGraph,
    cycles: usize,
}

impl CactusBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a new cycle of length `m`; returns its index (1-based).
    pub fn cycle(&mut self, m: usize) -> usize {
        self.cycles += 1;
        let i = self.cycles;
        let first = self.g.n();
        for j in 0..m {
            self.g.add_vertex(&format!("a{i}_{j}")).unwrap();
        }
        for j in 0..m {
            self.g.add_edge(first + j, first + (j + 1) % m).unwrap();
        }
        i
    }

    pub fn vertex(&mut self, name: &str) -> &mut Self {
        self.g.add_vertex(name).unwrap();
        self
    }

    pub fn edge(&mut self, a: &str, b: &str) -> &mut Self {
        let (x, y) = (self.g.vertex(a).unwrap(), self.g.vertex(b).unwrap());
        self.g.add_edge(x, y).unwrap();
        self
    }

    pub fn finish(self) -> SimplicialGraph {
        self.g
    }
}

/// Star with `k` leaves, a triangle attached at each leaf. Centre `x`.
pub fn o_k(k: usize) -> SimplicialGraph {
    let mut b = CactusBuilder::new();
    b.vertex("x");
    for _ in 0..k {
        let i = b.cycle(3);
        b.edge("x", &format!("a{i}_0"));
    }
    b.finish()
}

/// `x1` carries triangles `a1, a2`, `y1` carries `a3, a4`; the `x1 - y1` edge
/// is subdivided by `n` vertices `z1..zn`, each carrying a triangle
/// `a5, a6, ...`. With `n = 0` the two centres are adjacent.
pub fn o_prime(n: usize) -> SimplicialGraph {
    let mut b = CactusBuilder::new();
    b.vertex("x1").vertex("y1");
    for i in 1..=4 {
        b.cycle(3);
        let hub = if i <= 2 { "x1" } else { "y1" };
        b.edge(hub, &format!("a{i}_0"));
    }
    let mut prev = "x1".to_string();
    for j in 1..=n {
        let z = format!("z{j}");
        b.vertex(&z);
        b.edge(&prev, &z);
        let i = b.cycle(3);
        b.edge(&z, &format!("a{i}_0"));
        prev = z;
    }
    b.edge(&prev, "y1");
    b.finish()
}

/// Chain of cycles of the given lengths; consecutive cycles joined by one edge.
pub fn chain(lengths: &[usize]) -> SimplicialGraph {
    let mut b = CactusBuilder::new();
    for (k, &m) in lengths.iter().enumerate() {
        let i = b.cycle(m);
        if k > 0 {
            b.edge(&format!("a{}_1", i - 1), &format!("a{i}_0"));
        }
    }
    b.finish()
}

/// Chain of `n` triangles.
pub fn triangle_chain(n: usize) -> SimplicialGraph {
    chain(&vec![3; n])
}

fn joint_star() -> SimplicialGraph {
    // central triangle, one triangle hanging off each of its vertices
    let mut b = CactusBuilder::new();
    b.cycle(3);
    for j in 0..3 {
        let i = b.cycle(3);
        b.edge(&format!("a1_{j}"), &format!("a{i}_0"));
    }
    b.finish()
}

fn square_hub() -> SimplicialGraph {
    let mut b = CactusBuilder::new();
    b.cycle(4);
    for j in 0..4 {
        let i = b.cycle(3);
        b.edge(&format!("a1_{j}"), &format!("a{i}_0"));
    }
    b.finish()
}

fn two_hubs_mixed() -> SimplicialGraph {
    let mut b = CactusBuilder::new();
    b.vertex("x").vertex("y");
    b.edge("x", "y");
    for (hub, m) in [("x", 3), ("x", 3), ("y", 4), ("y", 4)] {
        let i = b.cycle(m);
        b.edge(hub, &format!("a{i}_0"));
    }
    b.finish()
}

fn pentagon_star() -> SimplicialGraph {
    let mut b = CactusBuilder::new();
    b.vertex("x");
    for _ in 0..3 {
        let i = b.cycle(5);
        b.edge("x", &format!("a{i}_0"));
    }
    b.finish()
}

fn hub_with_tail() -> SimplicialGraph {
    // x carries a1, a2 and a3; a3 continues as a chain a3 - a4 - a5
    let mut b = CactusBuilder::new();
    b.vertex("x");
    for _ in 0..3 {
        let i = b.cycle(3);
        b.edge("x", &format!("a{i}_0"));
    }
    let i = b.cycle(3);
    b.edge("a3_1", &format!("a{i}_0"));
    let j = b.cycle(3);
    b.edge(&format!("a{i}_1"), &format!("a{j}_0"));
    b.finish()
}

fn triangle_tree() -> SimplicialGraph {
    let mut b = CactusBuilder::new();
    b.cycle(3);
    for j in 0..3 {
        let i = b.cycle(3);
        b.edge(&format!("a1_{j}"), &format!("a{i}_0"));
    }
    let i = b.cycle(3);
    b.edge("a2_1", &format!("a{i}_0"));
    b.finish()
}

/// Two triangles joined by a path of length two; the middle vertex is
/// redundant (valency two, on no cycle).
pub fn chain_with_redundant() -> SimplicialGraph {
    let mut b = CactusBuilder::new();
    b.cycle(3);
    b.cycle(3);
    b.vertex("r");
    b.edge("a1_1", "r").edge("r", "a2_0");
    b.finish()
}

/// Special cacti used by the oracle and homotopy checks.
pub fn special_cacti() -> Vec<(String, SimplicialGraph)> {
    let mut v: Vec<(String, SimplicialGraph)> = Vec::new();
    for n in 2..=6 {
        v.push((format!("chain{n}"), triangle_chain(n)));
    }
    for k in 3..=6 {
        v.push((format!("o{k}"), o_k(k)));
    }
    v.push(("o4prime".into(), o_prime(0)));
    v.push(("o4prime_1".into(), o_prime(1)));
    v.push(("o4prime_2".into(), o_prime(2)));
    v.push(("joint_star".into(), joint_star()));
    v.push(("square_hub".into(), square_hub()));
    v.push(("two_hubs_mixed".into(), two_hubs_mixed()));
    v.push(("pentagon_star".into(), pentagon_star()));
    v.push(("hub_with_tail".into(), hub_with_tail()));
    v.push(("triangle_tree".into(), triangle_tree()));
    v.push(("chain_mixed".into(), chain(&[4, 5, 3])));
    v.push(("chain_hexagons".into(), chain(&[6, 6])));
    v.push(("chain_redundant".into(), chain_with_redundant()));
    v
}

/// Triangle-free graphs used as RAAG defining graphs.
pub fn raags() -> Vec<(String, SimplicialGraph)> {
    let mut p4_plus = path(4);
    p4_plus.add_vertex("z").unwrap();
    let mut c5_pendant = cycle(5);
    let z = c5_pendant.add_vertex("z").unwrap();
    c5_pendant.add_edge(0, z).unwrap();
    vec![
        ("p4".into(), path(4)),
        ("p5".into(), path(5)),
        ("p6".into(), path(6)),
        ("c4".into(), cycle(4)),
        ("c5".into(), cycle(5)),
        ("c6".into(), cycle(6)),
        ("k13".into(), star(3)),
        ("petersen".into(), petersen()),
        ("p4_plus_point".into(), p4_plus),
        ("c5_pendant".into(), c5_pendant),
    ]
}

/// Triangle-free graphs whose RAAGs have finite outer automorphism group.
pub fn finite_out() -> Vec<(String, SimplicialGraph)> {
    let p = petersen();
    let shuffled = p.permuted(&[7, 2, 9, 0, 5, 1, 8, 3, 6, 4]).renamed(|s| format!("{s}'"));
    vec![
        ("c5".into(), cycle(5)),
        ("c6".into(), cycle(6)),
        ("c7".into(), cycle(7)),
        ("petersen".into(), p),
        ("petersen_shuffled".into(), shuffled),
        ("desargues".into(), desargues()),
        ("c10".into(), bipartite_double(&cycle(5))),
    ]
}

/// Every named graph that is written to the `corpus/` directory.
pub fn all() -> Vec<(String, SimplicialGraph)> {
    let mut v = special_cacti();
    v.extend(raags().into_iter().map(|(n, g)| (format!("raag_{n}"), g)));
    v.extend(
        finite_out()
            .into_iter()
            .filter(|(n, _)| !["c5", "c6", "petersen"].contains(&n.as_str()))
            .map(|(n, g)| (format!("raag_{n}"), g)),
    );
    v.push(("tripod".into(), star(3)));
    v.push(("k3".into(), complete(3)));
    v.push(("nested_squares".into(), nested_squares()));
    v
}
