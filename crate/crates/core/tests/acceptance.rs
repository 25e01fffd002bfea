//! Acceptance suite: one PASS/FAIL line per criterion, with timings.
//!
//! Runs without the libtest harness so the lines are always shown. The
//! process fails if any criterion fails that is not listed in
//! `DOCUMENTED_FAILURES`.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqci::cactus::{analyze_cactus, CactusType};
use sqci::classifier::{classify_qi, detect_obstruction_pattern, has_pattern, GroupDescriptor, Relation};
use sqci::corpus;
use sqci::development::{ball_raag, check_local_pattern, development_gog};
use sqci::graph::{graph_isomorphic, SimplicialGraph};
use sqci::join::{
    build_ri_braid, build_ri_d2, build_ri_from_products, build_ri_raag, components_and_switch,
    spine_d2_betti1, validate_cjoin, ComponentKind, JoinComplex, Label,
};
use sqci::products::{maximal_products_bruteforce, maximal_products_cactus, DEFAULT_CAP};
use sqci::semiiso::{semi_isomorphic, Options};
use sqci::square::{betti1, build_d2, npc_check};
use sqci::words::{self, oracle, FactorLength, Letter};

/// Criteria expected to fail, with the reason.
const DOCUMENTED_FAILURES: &[(usize, &str)] = &[
    (
        7,
        "square_hub (a 4-cycle carrying four triangles) has maximal products that cut \
         the hub cycle into two arcs; with them RI has betti1 1, while D2 of the spine \
         K_{1,4} has betti1 5",
    ),
    (
        9,
        "(pb2 O3, raag P4) is expected QI, but PB2(O3) is QI to A(T)*Z, which has \
         infinitely many ends while A(P4) is one-ended",
    ),
];

struct Outcome {
    ok: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { ok: true, notes: Vec::new() }
    }

    fn check(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            self.notes.push(format!("failed: {}", what.into()));
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn ri_braid(g: &SimplicialGraph) -> JoinComplex {
    build_ri_braid(&analyze_cactus(g).unwrap()).unwrap()
}

fn name_edges(jc: &JoinComplex) -> BTreeSet<(String, String)> {
    jc.edges()
        .into_iter()
        .map(|(a, b)| {
            let (x, y) = (jc.simplices[a].name.clone(), jc.simplices[b].name.clone());
            if x < y { (x, y) } else { (y, x) }
        })
        .collect()
}

fn ring(jc: &JoinComplex) -> Option<Vec<usize>> {
    let mut order = vec![0];
    let (mut prev, mut cur) = (usize::MAX, 0);
    loop {
        let nb = jc.neighbors(cur);
        if nb.len() != 2 {
            return None;
        }
        let next = *nb.iter().find(|&&w| w != prev)?;
        if next == 0 {
            break;
        }
        order.push(next);
        (prev, cur) = (cur, next);
    }
    (order.len() == jc.n_vertices).then_some(order)
}

fn c1_tripod() -> Outcome {
    let mut o = Outcome::new();
    let d2 = build_d2(&corpus::star(3)).unwrap();
    let c = &d2.complex;
    let b = betti1(c);
    o.check(c.vertices.len() == 12, format!("{} vertices", c.vertices.len()));
    o.check(c.edges.len() == 12, format!("{} edges", c.edges.len()));
    o.check(c.squares.is_empty(), format!("{} squares", c.squares.len()));
    o.check(b.b1 == 1 && b.components == 1, format!("betti1 {b:?}"));
    o.check(npc_check(c).passed(), "npc");
    o
}

fn c2_o3() -> Outcome {
    let mut o = Outcome::new();
    let jc = ri_braid(&corpus::o_k(3));
    let want = ["{a2,a3}x{a1}", "{a2}x{a1,a3}", "{a1,a2}x{a3}", "{a1}x{a2,a3}", "{a1,a3}x{a2}", "{a3}x{a1,a2}"];
    o.check(jc.n_vertices == 6 && jc.dim() == 1, "six vertices, dimension 1");
    let Some(order) = ring(&jc) else {
        o.check(false, "not a 6-cycle");
        return o;
    };
    let names: Vec<&str> = order.iter().map(|&i| jc.simplices[i].name.as_str()).collect();
    let start = want.iter().position(|w| *w == names[0]);
    let matches = start.is_some_and(|s| {
        let fwd: Vec<&str> = (0..6).map(|k| want[(s + k) % 6]).collect();
        let bwd: Vec<&str> = (0..6).map(|k| want[(s + 6 - k) % 6]).collect();
        names == fwd || names == bwd
    });
    o.check(matches, format!("cyclic order {names:?}"));
    let rep = components_and_switch(&jc).unwrap();
    o.check(rep.kinds == vec![ComponentKind::M], "one M-component");
    o.check((0..6).all(|k| rep.switch[order[k]] == order[(k + 3) % 6]), "switch is antipodal");
    o
}

fn c3_o4() -> Outcome {
    let mut o = Outcome::new();
    let g = corpus::o_k(4);
    let jc = ri_braid(&g);
    let p = [
        "{a1,a2,a3}x{a4}",
        "{a2}x{a1,a3,a4}",
        "{a1,a2,a4}x{a3}",
        "{a1}x{a2,a3,a4}",
        "{a3}x{a1,a2,a4}",
        "{a2,a3,a4}x{a1}",
        "{a4}x{a1,a2,a3}",
        "{a1,a3,a4}x{a2}",
    ];
    let labels: BTreeSet<&str> = (0..jc.n_vertices).map(|i| jc.simplices[i].name.as_str()).collect();
    o.check(labels == p.iter().copied().collect(), format!("labels {labels:?}"));
    let mut want = BTreeSet::new();
    let mut add = |i: usize, j: usize| {
        let (x, y) = (p[i].to_string(), p[j].to_string());
        want.insert(if x < y { (x, y) } else { (y, x) });
    };
    for k in 0..4 {
        add(k, (k + 1) % 4);
        add(4 + k, 4 + (k + 1) % 4);
        add(k, k + 4);
    }
    o.check(name_edges(&jc) == want, "two 4-cycles joined by a perfect matching");
    let ps = maximal_products_bruteforce(&g, DEFAULT_CAP).unwrap();
    let brute = build_ri_from_products(&g, &ps, &|q| q.display(&g), false).unwrap();
    let (e1, e2) = (jc.edges().len(), brute.edges().len());
    o.check(e1 == 12 && e2 == 12, format!("edge counts {e1} and {e2} (oracle)"));
    o
}

fn c4_chains() -> Outcome {
    let mut o = Outcome::new();
    for n in 2..=6 {
        let jc = ri_braid(&corpus::triangle_chain(n));
        let rep = components_and_switch(&jc).unwrap();
        o.check(rep.components.len() == 2, format!("n={n}: {} components", rep.components.len()));
        if rep.components.len() != 2 {
            continue;
        }
        let by = jc.by_verts();
        for comp in &rep.components {
            o.check(comp.len() == n - 1 && by.contains_key(comp), format!("n={n}: component is not a full simplex"));
        }
        o.check(rep.kinds == vec![ComponentKind::S(1), ComponentKind::S(0)], format!("n={n}: S-components"));
        // the switch carries every simplex of one component onto one of the
        // other, with swapped rank pairs
        let switched = (0..jc.simplices.len()).all(|s| {
            let mut img: Vec<usize> = jc.simplices[s].verts.iter().map(|&v| rep.switch[v]).collect();
            img.sort_unstable();
            by.get(&img).is_some_and(|ts| {
                ts.iter().any(|&t| {
                    let (a, b) = jc.ranks(s);
                    jc.ranks(t) == (b, a) && jc.qi_type(t) == jc.qi_type(s)
                })
            })
        });
        o.check(switched, format!("n={n}: switch is a semi-isomorphism"));
    }
    o.note("each component has n-1 vertices (dimension n-2)");
    o
}

fn c5_oracle() -> Outcome {
    let mut o = Outcome::new();
    let mut count = 0;
    for (name, g) in corpus::special_cacti() {
        let a = analyze_cactus(&g).unwrap();
        if a.cycles.len() > 12 {
            continue;
        }
        count += 1;
        let fast: BTreeSet<_> = maximal_products_cactus(&a).unwrap().into_iter().collect();
        let slow: BTreeSet<_> = maximal_products_bruteforce(&g, DEFAULT_CAP).unwrap().into_iter().collect();
        o.check(fast == slow, format!("{name}: product sets differ"));
    }
    o.check(count >= 15, format!("only {count} graphs"));
    o.note(format!("{count} special cacti"));
    o
}

fn sides(jc: &JoinComplex, s: usize) -> BTreeSet<String> {
    let (a, b) = jc.simplices[s].label.coords();
    let show = |x: BTreeSet<usize>| x.iter().map(|&v| jc.graph.name(v)).collect::<Vec<_>>().join(",");
    BTreeSet::from([show(a), show(b)])
}

fn c6_salvetti() -> Outcome {
    let mut o = Outcome::new();
    let jc = build_ri_raag(&corpus::path(4)).unwrap();
    let set = |x: &str, y: &str| BTreeSet::from([x.to_string(), y.to_string()]);
    o.check(jc.n_vertices == 2 && jc.simplices.len() == 3, "P4: one edge");
    if jc.simplices.len() == 3 {
        let verts: BTreeSet<_> = (0..2).map(|v| sides(&jc, v)).collect();
        o.check(verts == BTreeSet::from([set("b", "a,c"), set("b,d", "c")]), format!("P4 vertex groups {verts:?}"));
        o.check(sides(&jc, 2) == set("b", "c"), "P4 edge group");
    }
    for n in [5, 6] {
        let jc = build_ri_raag(&corpus::cycle(n)).unwrap();
        o.check(jc.n_vertices == n && jc.edges().len() == n && ring(&jc).is_some(), format!("C{n}: not an {n}-cycle"));
        o.check(jc.dim() == 1, format!("C{n}: dimension {}", jc.dim()));
    }
    o
}

fn c7_spine() -> Outcome {
    let mut o = Outcome::new();
    let (mut checked, mut skipped) = (0, Vec::new());
    for (name, g) in corpus::special_cacti() {
        let a = analyze_cactus(&g).unwrap();
        if !a.is_braid_regular() {
            skipped.push(name);
            continue;
        }
        checked += 1;
        let ri = build_ri_braid(&a).unwrap().betti1();
        let sp = spine_d2_betti1(&a).unwrap();
        o.check(ri == sp, format!("{name}: RI {ri} vs spine {sp}"));
        if a.cactus_type == CactusType::S {
            o.check(ri == 0, format!("{name}: type S with betti1 {ri}"));
        }
    }
    o.note(format!("{checked} graphs; out of range: {skipped:?}"));
    o
}

fn c8_finite_out() -> Outcome {
    let mut o = Outcome::new();
    let gs = corpus::finite_out();
    let ris: Vec<JoinComplex> = gs.iter().map(|(_, g)| build_ri_raag(g).unwrap()).collect();
    for i in 0..gs.len() {
        for j in 0..gs.len() {
            let semi = semi_isomorphic(&ris[i], &ris[j], Options::default()).unwrap().is_some();
            let iso = graph_isomorphic(&gs[i].1, &gs[j].1).is_some();
            o.check(semi == iso, format!("{} vs {}: semi {semi}, iso {iso}", gs[i].0, gs[j].0));
        }
    }
    o.note(format!("{0}x{0} matrix", gs.len()));
    o
}

fn c9_classifier() -> Outcome {
    let mut o = Outcome::new();
    let raag = |g: SimplicialGraph| GroupDescriptor::raag(g);
    let pb2 = |g: SimplicialGraph| GroupDescriptor::pb2(g, DEFAULT_CAP).unwrap();
    let v = classify_qi(&raag(corpus::path(4)), &raag(corpus::path(6)));
    o.check(v.relation == Relation::Qi, format!("(P4, P6): {}", v.relation.as_str()));
    let v = classify_qi(&raag(corpus::cycle(5)), &raag(corpus::cycle(6)));
    o.check(v.relation == Relation::NotQi, format!("(C5, C6): {}", v.relation.as_str()));
    let o3 = pb2(corpus::o_k(3));
    let v = classify_qi(&o3, &raag(corpus::path(4)));
    o.check(v.relation == Relation::Qi, format!("(pb2 O3, raag P4): {} by {}", v.relation.as_str(), v.rule));
    let mut p4_pt = corpus::path(4);
    p4_pt.add_vertex("z").unwrap();
    let v = classify_qi(&o3, &raag(p4_pt));
    o.note(format!("(pb2 O3, raag P4 + point): {} by {}", v.relation.as_str(), v.rule));
    let o4p = pb2(corpus::o_prime(0));
    for (name, g) in corpus::raags() {
        let v = classify_qi(&o4p, &raag(g));
        o.check(v.relation == Relation::NotQi, format!("(pb2 O4', raag {name}): {}", v.relation.as_str()));
    }
    let jc = ri_braid(&corpus::o_prime(1));
    let r = detect_obstruction_pattern(&jc);
    o.check(
        r.found && has_pattern(&jc, &r, ["{a1}x{a2}", "{a1}x{a3}", "{a4}x{a3}", "{a4}x{a2}"]),
        "O'4,1 witness",
    );
    o
}

fn random_word(rng: &mut ChaCha8Rng, n: usize, max: usize) -> Vec<Letter> {
    let len = rng.gen_range(0..=max);
    (0..len).map(|_| Letter::new(rng.gen_range(0..n), rng.gen_bool(0.5))).collect()
}

/// Random swaps of adjacent commuting letters; the element is unchanged.
fn shuffle(g: &SimplicialGraph, rng: &mut ChaCha8Rng, w: &mut [Letter]) {
    for _ in 0..2 * w.len() {
        if w.len() < 2 {
            return;
        }
        let i = rng.gen_range(0..w.len() - 1);
        if w[i].gen != w[i + 1].gen && words::commute(g, w[i].gen, w[i + 1].gen) {
            w.swap(i, i + 1);
        }
    }
}

fn c10_words() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for (name, g) in [("P4", corpus::path(4)), ("C5", corpus::cycle(5))] {
        let mut ball = oracle::CayleyBall::new(&g, 6);
        let (mut bad, mut trivial) = (0, 0);
        for i in 0..10_000 {
            let w = if i % 2 == 0 {
                random_word(&mut rng, g.n(), 12)
            } else {
                // u followed by a shuffled inverse of u: trivial
                let u = random_word(&mut rng, g.n(), 6);
                let mut v: Vec<Letter> = u.iter().rev().map(|l| l.inverse()).collect();
                shuffle(&g, &mut rng, &mut v);
                let mut w = u;
                w.extend(v);
                w
            };
            let nf = words::normal_form(&g, &w);
            if words::normal_form(&g, &nf.letters) != nf {
                bad += 1;
            }
            if words::inverse(&g, &words::inverse(&g, &nf)) != nf {
                bad += 1;
            }
            let t = nf.is_empty();
            trivial += t as usize;
            if ball.is_trivial(&w) != t {
                bad += 1;
            }
        }
        o.check(bad == 0, format!("{name}: {bad} mismatches"));
        let mut fl = FactorLength::joins(&g).unwrap();
        let dist = oracle::factor_lengths_bfs(&g, &fl.supports.clone(), 4);
        let wrong = dist.iter().filter(|(w, d)| fl.length(w).length != **d).count();
        o.check(wrong == 0, format!("{name}: join length differs on {wrong} elements"));
        o.note(format!("{name}: {trivial} trivial words, {} ball elements", dist.len()));
    }
    o
}

fn c11_development() -> Outcome {
    let mut o = Outcome::new();
    let b = ball_raag(&corpus::path(4), 2, 3).unwrap();
    let r = check_local_pattern(&b);
    o.check(b.betti1() == 0, format!("P4 ball betti1 {}", b.betti1()));
    o.check(r.checked > 0 && r.alternating(), format!("P4 alternation {r:?}"));
    let jc = ri_braid(&corpus::o_k(3));
    let d = development_gog(&jc, 3, 2).unwrap();
    o.check(d.betti1() == 0, format!("O3 development betti1 {}", d.betti1()));
    let u4 = (0..jc.n_vertices).find(|&v| jc.simplices[v].name == "{a1,a3}x{a2}").unwrap();
    let allowed: BTreeSet<&str> = BTreeSet::from(["{a1}x{a2,a3}", "{a3}x{a1,a2}"]);
    let mut seen = 0;
    for x in d.interior().filter(|&x| d.vertices[x].base == u4) {
        seen += 1;
        let over: BTreeSet<&str> = d.neighbors(x).iter().map(|&y| jc.simplices[d.vertices[y].base].name.as_str()).collect();
        o.check(over.is_subset(&allowed), format!("vertex over u4 borders {over:?}"));
    }
    o.check(seen > 0, "no interior vertex over u4");
    o.note(format!("{} vertices in the P4 ball, {} in the O3 ball, {seen} interior over u4", b.vertices.len(), d.vertices.len()));
    o
}

fn c12_validator() -> Outcome {
    let mut o = Outcome::new();
    let mut built = 0;
    let mut warnings = 0;
    let mut all: Vec<(String, JoinComplex)> = Vec::new();
    for (name, g) in corpus::raags().into_iter().chain(corpus::finite_out()) {
        if let Ok(jc) = build_ri_raag(&g) {
            all.push((format!("raag {name}"), jc));
        }
    }
    for (name, g) in corpus::special_cacti() {
        all.push((format!("braid {name}"), ri_braid(&g)));
    }
    all.push(("pb2 nested_squares".into(), build_ri_d2(&corpus::nested_squares(), DEFAULT_CAP).unwrap()));
    for (name, jc) in &all {
        built += 1;
        let vs = validate_cjoin(jc);
        warnings += vs.iter().filter(|v| v.warning).count();
        let hard: Vec<_> = vs.iter().filter(|v| !v.warning).collect();
        o.check(hard.is_empty(), format!("{name}: {hard:?}"));
    }
    // (iii): a maximal edge relabelled with the label of one of its ends
    let mut jc = build_ri_raag(&corpus::path(5)).unwrap();
    let e = jc.simplices_of_dim(1).next().unwrap();
    let end = jc.simplices[e].verts[1];
    jc.simplices[e].label = jc.simplices[end].label.clone();
    o.check(validate_cjoin(&jc).iter().any(|v| v.property == "iii" && !v.warning), "(iii) injection not caught");
    // (iv): a generator on both sides of a vertex label
    let mut jc = build_ri_raag(&corpus::path(4)).unwrap();
    if let Label::Join(j) = &mut jc.simplices[0].label {
        let a = *j.side_a.iter().next().unwrap();
        j.side_b.insert(a);
    }
    o.check(validate_cjoin(&jc).iter().any(|v| v.property == "iv" && !v.warning), "(iv) injection not caught");
    o.note(format!("{built} complexes, {warnings} warnings"));
    o
}

fn main() {
    type Criterion = (usize, &'static str, fn() -> Outcome, Duration);
    let secs = Duration::from_secs;
    let criteria: [Criterion; 12] = [
        (1, "D2 of the tripod", c1_tripod, secs(1)),
        (2, "RI of O3 is the hexagon", c2_o3, secs(1)),
        (3, "RI of O4", c3_o4, secs(5)),
        (4, "type-S chains", c4_chains, secs(5)),
        (5, "cactus products vs exhaustive search", c5_oracle, secs(60)),
        (6, "RI of Salvetti complexes", c6_salvetti, Duration::MAX),
        (7, "RI homology vs spine configurations", c7_spine, Duration::MAX),
        (8, "semi-isomorphism vs isomorphism, finite Out", c8_finite_out, secs(120)),
        (9, "classifier verdicts", c9_classifier, Duration::MAX),
        (10, "word engine vs oracles", c10_words, secs(120)),
        (11, "developments", c11_development, Duration::MAX),
        (12, "complex-of-join-groups validator", c12_validator, Duration::MAX),
    ];
    let documented: BTreeMap<usize, &str> = DOCUMENTED_FAILURES.iter().copied().collect();
    let mut unexpected = Vec::new();
    for (id, title, f, limit) in criteria {
        let t = Instant::now();
        let mut out = f();
        let took = t.elapsed();
        if took > limit {
            out.check(false, format!("took {took:?}, limit {limit:?}"));
        }
        println!("{} {id:>2} {title} ({:.2?})", if out.ok { "PASS" } else { "FAIL" }, took);
        for n in &out.notes {
            println!("        {n}");
        }
        if !out.ok {
            match documented.get(&id) {
                Some(why) => println!("        documented: {why}"),
                None => unexpected.push(id),
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("undocumented failures: {unexpected:?}");
        std::process::exit(1);
    }
}
