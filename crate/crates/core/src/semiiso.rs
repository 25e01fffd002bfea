//! Semi-isomorphisms between finite complexes of join groups.

use std::collections::{BTreeMap, HashMap};

use serde_json::json;

use crate::error::{Error, Result};
use crate::homology::ParityUnionFind;
use crate::join::{JoinComplex, QiType};

/// A witness: vertex and simplex bijections plus, per simplex, whether its
/// coordinates are read swapped in the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiIso {
    pub vertex_map: Vec<usize>,
    pub simplex_map: Vec<usize>,
    pub flips: Vec<bool>,
}

impl SemiIso {
    pub fn to_json(&self, from: &JoinComplex, to: &JoinComplex) -> serde_json::Value {
        let pairs: BTreeMap<String, String> = self
            .vertex_map
            .iter()
            .enumerate()
            .map(|(i, &j)| (from.simplices[i].name.clone(), to.simplices[j].name.clone()))
            .collect();
        json!({ "vertex_map": pairs, "flips": self.flips })
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    /// Also preserve rank pairs (up to order), not just qi types.
    pub strict_ranks: bool,
}

struct Prepared<'a> {
    jc: &'a JoinComplex,
    key: Vec<(QiType, (usize, usize))>,
    index: HashMap<Vec<usize>, Vec<usize>>,
    /// Face relations of each simplex: (face, eq_first, eq_second, flipped).
    faces: Vec<Vec<(usize, bool, bool, bool)>>,
    vertex_inv: Vec<Vec<usize>>,
    adj: Vec<Vec<usize>>,
}

impl<'a> Prepared<'a> {
    fn new(jc: &'a JoinComplex, opts: Options) -> Self {
        let key = (0..jc.simplices.len())
            .map(|i| {
                let (r, s) = jc.ranks(i);
                let ranks = if opts.strict_ranks { (r.min(s), r.max(s)) } else { (0, 0) };
                (jc.qi_type(i), ranks)
            })
            .collect();
        let mut faces = vec![Vec::new(); jc.simplices.len()];
        for f in &jc.faces {
            faces[f.simplex].push((f.face, f.eq_first, f.eq_second, f.flipped));
        }
        let n = jc.n_vertices;
        let dmax = jc.dim();
        let mut vertex_inv = vec![vec![0; dmax + 4]; n];
        let mut adj = vec![Vec::new(); n];
        for (i, s) in jc.simplices.iter().enumerate() {
            for &v in &s.verts {
                vertex_inv[v][s.dim()] += 1;
                vertex_inv[v][dmax + 1 + jc.qi_type(i) as usize] += 1;
            }
            if s.dim() == 1 {
                adj[s.verts[0]].push(s.verts[1]);
                adj[s.verts[1]].push(s.verts[0]);
            }
        }
        Self { jc, key, index: jc.by_verts(), faces, vertex_inv, adj }
    }

    fn multiplicity(&self, verts: &[usize]) -> usize {
        self.index.get(verts).map_or(0, |v| v.len())
    }
}

fn profile(p: &Prepared) -> Vec<((QiType, (usize, usize)), usize)> {
    let mut m: BTreeMap<((QiType, (usize, usize)), usize), usize> = BTreeMap::new();
    for (i, s) in p.jc.simplices.iter().enumerate() {
        *m.entry((p.key[i], s.dim())).or_default() += 1;
    }
    m.into_iter().map(|((k, d), c)| (k, d * 1000 + c)).collect()
}

/// Search state shared by the finder and the counter.
struct Search<'a> {
    a: Prepared<'a>,
    b: Prepared<'a>,
    order: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
    stop_at_first: bool,
    found: Vec<SemiIso>,
    count: usize,
}

impl<'a> Search<'a> {
    fn vertex_ok(&self, v: usize, w: usize, depth: usize) -> bool {
        if self.used[w] || self.a.vertex_inv[v] != self.b.vertex_inv[w] || self.a.key[v] != self.b.key[w] {
            return false;
        }
        for &u in &self.order[..depth] {
            let (x, y) = (u.min(v), u.max(v));
            let (mu, mw) = (self.map[u], w);
            let (p, q) = (mu.min(mw), mu.max(mw));
            if self.a.multiplicity(&[x, y]) != self.b.multiplicity(&[p, q]) {
                return false;
            }
        }
        true
    }

    fn run(&mut self, depth: usize) -> Result<bool> {
        if depth == self.order.len() {
            return self.leaf();
        }
        let v = self.order[depth];
        for w in 0..self.b.jc.n_vertices {
            if !self.vertex_ok(v, w, depth) {
                continue;
            }
            self.map[v] = w;
            self.used[w] = true;
            let done = self.run(depth + 1)?;
            self.used[w] = false;
            if done {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn leaf(&mut self) -> Result<bool> {
        // every simplex vertex set must map onto one with equal multiplicity
        for (verts, ids) in &self.a.index {
            let mut img: Vec<usize> = verts.iter().map(|&v| self.map[v]).collect();
            img.sort_unstable();
            if self.b.multiplicity(&img) != ids.len() {
                return Ok(false);
            }
        }
        let n = self.a.jc.simplices.len();
        let mut smap = vec![usize::MAX; n];
        let mut sused = vec![false; self.b.jc.simplices.len()];
        for v in 0..self.a.jc.n_vertices {
            smap[v] = self.map[v];
            sused[self.map[v]] = true;
        }
        let mut face_hit: Option<SemiIso> = None;
        let mut chain_hit = false;
        self.match_simplices(self.a.jc.n_vertices, &mut smap, &mut sused, &mut face_hit, &mut chain_hit);
        if face_hit.is_some() != chain_hit {
            return Err(Error::Artifact(format!(
                "face-level and chain-level checks disagree on vertex map {:?}",
                self.map
            )));
        }
        match face_hit {
            Some(w) => {
                self.count += 1;
                if self.found.is_empty() {
                    self.found.push(w);
                }
                Ok(self.stop_at_first)
            }
            None => Ok(false),
        }
    }

    /// Matches higher simplices in index order (faces come first), trying
    /// every choice among multi-simplices.
    fn match_simplices(
        &self,
        i: usize,
        smap: &mut Vec<usize>,
        sused: &mut Vec<bool>,
        face_hit: &mut Option<SemiIso>,
        chain_hit: &mut bool,
    ) {
        if face_hit.is_some() && *chain_hit {
            return;
        }
        let jc = self.a.jc;
        if i == jc.simplices.len() {
            if face_hit.is_none() {
                if let Some(flips) = flip_assignment(&self.a, &self.b, smap) {
                    *face_hit = Some(SemiIso { vertex_map: self.map.clone(), simplex_map: smap.clone(), flips });
                }
            }
            if !*chain_hit {
                *chain_hit = chains_agree(&self.a, &self.b, smap);
            }
            return;
        }
        let mut img: Vec<usize> = jc.simplices[i].verts.iter().map(|&v| self.map[v]).collect();
        img.sort_unstable();
        let candidates = self.b.index.get(&img).cloned().unwrap_or_default();
        for t in candidates {
            if sused[t] || self.a.key[i] != self.b.key[t] {
                continue;
            }
            // faces must go to the matching faces of the target
            let ok = self.a.faces[i].iter().all(|&(f, ..)| {
                self.b.faces[t].iter().any(|&(g, ..)| g == smap[f])
            });
            if !ok {
                continue;
            }
            smap[i] = t;
            sused[t] = true;
            self.match_simplices(i + 1, smap, sused, face_hit, chain_hit);
            sused[t] = false;
            smap[i] = usize::MAX;
        }
    }
}

/// Image relation of `(s, f)`: the target's face record of `(smap[s], smap[f])`.
fn image_rel(b: &Prepared, t: usize, g: usize) -> (bool, bool, bool) {
    let &(_, e1, e2, fl) = b.faces[t].iter().find(|r| r.0 == g).expect("matched face");
    (e1, e2, fl)
}

fn swap_if(p: (bool, bool), s: bool) -> (bool, bool) {
    if s { (p.1, p.0) } else { p }
}

/// Per-simplex flips making every face relation's equality pattern agree
/// with its image, or `None`.
fn flip_assignment(a: &Prepared, b: &Prepared, smap: &[usize]) -> Option<Vec<bool>> {
    let n = a.jc.simplices.len();
    let mut uf = ParityUnionFind::new(n);
    for (s, rels) in a.faces.iter().enumerate() {
        for &(f, _, _, fl) in rels {
            let (_, _, fl2) = image_rel(b, smap[s], smap[f]);
            if !uf.relate(s, f, fl ^ fl2) {
                return None;
            }
        }
    }
    let mut root_bit: HashMap<usize, bool> = HashMap::new();
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for s in 0..n {
        by_root.entry(uf.find(s).0).or_default().push(s);
    }
    for (&root, members) in &by_root {
        let fits = |bit: bool, uf: &mut ParityUnionFind| {
            members.iter().all(|&s| {
                let own = bit ^ uf.find(s).1;
                a.faces[s].iter().all(|&(f, e1, e2, _)| {
                    let (g1, g2, _) = image_rel(b, smap[s], smap[f]);
                    (e1, e2) == swap_if((g1, g2), own)
                })
            })
        };
        if fits(false, &mut uf) {
            root_bit.insert(root, false);
        } else if fits(true, &mut uf) {
            root_bit.insert(root, true);
        } else {
            return None;
        }
    }
    Some((0..n).map(|s| {
        let (r, p) = uf.find(s);
        root_bit[&r] ^ p
    }).collect())
}

/// The chain formulation: along every maximal chain, with coordinates fixed
/// by the inclusions, one global swap makes the equality patterns agree.
fn chains_agree(a: &Prepared, b: &Prepared, smap: &[usize]) -> bool {
    let jc = a.jc;
    let mut ok = true;
    for top in (0..jc.simplices.len()).filter(|&s| jc.is_maximal(s)) {
        walk_chains(a, top, &mut Vec::new(), &mut |chain: &[(usize, usize)]| {
            let mut ca = false;
            let mut cb = false;
            let mut pa = Vec::new();
            let mut pb = Vec::new();
            for &(s, f) in chain {
                let &(_, e1, e2, fl) = a.faces[s].iter().find(|r| r.0 == f).unwrap();
                let (g1, g2, fl2) = image_rel(b, smap[s], smap[f]);
                pa.push(swap_if((e1, e2), ca));
                pb.push(swap_if((g1, g2), cb));
                ca ^= fl;
                cb ^= fl2;
            }
            let fits = |s: bool| pa.iter().zip(&pb).all(|(x, y)| *x == swap_if(*y, s));
            if !(fits(false) || fits(true)) {
                ok = false;
            }
        });
        if !ok {
            return false;
        }
    }
    ok
}

fn walk_chains(a: &Prepared, s: usize, chain: &mut Vec<(usize, usize)>, visit: &mut dyn FnMut(&[(usize, usize)])) {
    if a.faces[s].is_empty() {
        visit(chain);
        return;
    }
    for &(f, ..) in &a.faces[s] {
        chain.push((s, f));
        walk_chains(a, f, chain, visit);
        chain.pop();
    }
}

fn search_order(p: &Prepared) -> Vec<usize> {
    // breadth-first from the vertex with the rarest invariant
    let n = p.jc.n_vertices;
    let mut freq: HashMap<&Vec<usize>, usize> = HashMap::new();
    for v in 0..n {
        *freq.entry(&p.vertex_inv[v]).or_default() += 1;
    }
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let start = (0..n).filter(|&v| !seen[v]).min_by_key(|&v| (freq[&p.vertex_inv[v]], v)).unwrap();
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in &p.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

fn search<'a>(jc1: &'a JoinComplex, jc2: &'a JoinComplex, opts: Options, first: bool) -> Result<Option<Search<'a>>> {
    let a = Prepared::new(jc1, opts);
    let b = Prepared::new(jc2, opts);
    if jc1.n_vertices != jc2.n_vertices
        || jc1.simplices.len() != jc2.simplices.len()
        || profile(&a) != profile(&b)
    {
        return Ok(None);
    }
    let order = search_order(&a);
    let n = jc1.n_vertices;
    let mut s = Search {
        a,
        b,
        order,
        map: vec![usize::MAX; n],
        used: vec![false; n],
        stop_at_first: first,
        found: Vec::new(),
        count: 0,
    };
    s.run(0)?;
    Ok(Some(s))
}

/// Finds a semi-isomorphism, if one exists. An error means the face-level and
/// chain-level formulations disagreed on some candidate.
pub fn semi_isomorphic(jc1: &JoinComplex, jc2: &JoinComplex, opts: Options) -> Result<Option<SemiIso>> {
    Ok(search(jc1, jc2, opts, true)?.and_then(|mut s| s.found.pop()))
}

/// Number of vertex bijections that extend to a semi-isomorphism.
pub fn semi_iso_count(jc1: &JoinComplex, jc2: &JoinComplex, opts: Options) -> Result<usize> {
    Ok(search(jc1, jc2, opts, false)?.map_or(0, |s| s.count))
}

/// Checks a witness independently of the search.
pub fn verify(jc1: &JoinComplex, jc2: &JoinComplex, w: &SemiIso) -> bool {
    let a = Prepared::new(jc1, Options::default());
    let b = Prepared::new(jc2, Options::default());
    let n = jc1.simplices.len();
    if w.simplex_map.len() != n || jc2.simplices.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for (s, &t) in w.simplex_map.iter().enumerate() {
        if t >= n || seen[t] || a.key[s] != b.key[t] {
            return false;
        }
        seen[t] = true;
        let mut img: Vec<usize> = jc1.simplices[s].verts.iter().map(|&v| w.vertex_map[v]).collect();
        img.sort_unstable();
        if img != jc2.simplices[t].verts {
            return false;
        }
    }
    a.faces.iter().enumerate().all(|(s, rels)| {
        rels.iter().all(|&(f, e1, e2, fl)| {
            let Some(&(_, g1, g2, fl2)) = b.faces[w.simplex_map[s]].iter().find(|r| r.0 == w.simplex_map[f]) else {
                return false;
            };
            (w.flips[s] ^ w.flips[f]) == (fl ^ fl2) && (e1, e2) == swap_if((g1, g2), w.flips[s])
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cactus::analyze_cactus;
    use crate::corpus;
    use crate::graph::graph_isomorphic;
    use crate::join::{build_ri_braid, build_ri_raag, components_and_switch, build_ri_from_products};
    use crate::products::ProductPair;

    const D: Options = Options { strict_ranks: false };

    #[test]
    fn cycles() {
        let c5 = build_ri_raag(&corpus::cycle(5)).unwrap();
        let relabelled = build_ri_raag(&corpus::cycle(5).permuted(&[2, 4, 1, 3, 0])).unwrap();
        let w = semi_isomorphic(&c5, &relabelled, D).unwrap().unwrap();
        assert!(verify(&c5, &relabelled, &w));
        let c6 = build_ri_raag(&corpus::cycle(6)).unwrap();
        assert!(semi_isomorphic(&c5, &c6, D).unwrap().is_none());
        assert_eq!(semi_iso_count(&c5, &c5, D).unwrap(), 10);
    }

    #[test]
    fn hexagon_has_twelve_symmetries() {
        let a = analyze_cactus(&corpus::o_k(3)).unwrap();
        let jc = build_ri_braid(&a).unwrap();
        assert_eq!(semi_iso_count(&jc, &jc, D).unwrap(), 12);
    }

    #[test]
    fn trivial_and_mismatched_sizes() {
        let c4 = build_ri_raag(&corpus::cycle(4)).unwrap();
        let k22 = build_ri_raag(&corpus::cycle(4).permuted(&[1, 0, 3, 2])).unwrap();
        assert_eq!(semi_iso_count(&c4, &k22, D).unwrap(), 1);
        let p4 = build_ri_raag(&corpus::path(4)).unwrap();
        let c5 = build_ri_raag(&corpus::cycle(5)).unwrap();
        assert_eq!(semi_iso_count(&p4, &c5, D).unwrap(), 0);
    }

    fn component(jc: &JoinComplex, verts: &[usize]) -> JoinComplex {
        let g = &jc.graph;
        let ps: Vec<ProductPair> = verts
            .iter()
            .map(|&v| match &jc.simplices[v].label {
                crate::join::Label::Pair(p) => p.clone(),
                _ => unreachable!(),
            })
            .collect();
        let names: HashMap<ProductPair, String> = jc
            .simplices
            .iter()
            .filter_map(|s| match &s.label {
                crate::join::Label::Pair(p) => Some((p.clone(), s.name.clone())),
                _ => None,
            })
            .collect();
        build_ri_from_products(g, &ps, &|p| names.get(p).cloned().unwrap_or_default(), true).unwrap()
    }

    #[test]
    fn type_s_components_are_semi_isomorphic() {
        for n in 2..=5 {
            let a = analyze_cactus(&corpus::triangle_chain(n)).unwrap();
            let jc = build_ri_braid(&a).unwrap();
            let rep = components_and_switch(&jc).unwrap();
            let x = component(&jc, &rep.components[0]);
            let y = component(&jc, &rep.components[1]);
            let w = semi_isomorphic(&x, &y, D).unwrap().expect("switch is a semi-isomorphism");
            assert!(verify(&x, &y, &w));
        }
    }

    #[test]
    fn finite_out_matrix_matches_isomorphism() {
        let graphs = corpus::finite_out();
        let ris: Vec<JoinComplex> = graphs.iter().map(|(_, g)| build_ri_raag(g).unwrap()).collect();
        for i in 0..graphs.len() {
            for j in 0..graphs.len() {
                let iso = graph_isomorphic(&graphs[i].1, &graphs[j].1).is_some();
                let semi = semi_isomorphic(&ris[i], &ris[j], D).unwrap();
                assert_eq!(semi.is_some(), iso, "{} {}", graphs[i].0, graphs[j].0);
                if let Some(w) = semi {
                    assert!(verify(&ris[i], &ris[j], &w));
                }
            }
        }
    }

    #[test]
    fn strict_mode_separates_rank_pairs() {
        // P4 and P5 complexes differ in size; compare RI(S(K_{1,3})) with
        // RI(S(K_{1,2})): one vertex each, ranks (1,3) vs (1,2)
        let a = build_ri_raag(&corpus::star(3)).unwrap();
        let b = build_ri_raag(&corpus::star(2)).unwrap();
        assert!(semi_isomorphic(&a, &b, D).unwrap().is_some());
        assert!(semi_isomorphic(&a, &b, Options { strict_ranks: true }).unwrap().is_none());
    }

    #[test]
    fn qi_profile_is_necessary() {
        let a = build_ri_raag(&corpus::path(4)).unwrap();
        let b = build_ri_raag(&corpus::path(5)).unwrap();
        assert!(semi_isomorphic(&a, &b, D).unwrap().is_none());
    }

    #[test]
    fn symmetric_on_the_corpus() {
        let mut cs: Vec<JoinComplex> = Vec::new();
        for (_, g) in corpus::special_cacti().into_iter().take(10) {
            cs.push(build_ri_braid(&analyze_cactus(&g).unwrap()).unwrap());
        }
        for (_, g) in corpus::raags() {
            if g.is_connected() {
                cs.push(build_ri_raag(&g).unwrap());
            }
        }
        for x in &cs {
            assert!(semi_isomorphic(x, x, D).unwrap().is_some());
        }
        for x in &cs {
            for y in &cs {
                let f = semi_isomorphic(x, y, D).unwrap().is_some();
                let b = semi_isomorphic(y, x, D).unwrap().is_some();
                assert_eq!(f, b);
            }
        }
    }
}
