//! Words in right-angled Artin groups: reduction, lexicographic normal
//! forms, divisors, coset keys and join length.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{SimplicialGraph, Vertex};
use crate::products::maximal_join_subgraphs;

/// A generator or its inverse. Ordered by generator, then `+` before `-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: Vertex,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: Vertex, inv: bool) -> Self {
        Self { gen, inv }
    }

    pub fn inverse(self) -> Self {
        Self { gen: self.gen, inv: !self.inv }
    }
}

/// The canonical representative of a group element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NormalForm {
    pub letters: Vec<Letter>,
}

impl NormalForm {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn support(&self) -> BTreeSet<Vertex> {
        self.letters.iter().map(|l| l.gen).collect()
    }

    pub fn display(&self, g: &SimplicialGraph) -> String {
        if self.letters.is_empty() {
            return "1".into();
        }
        self.letters
            .iter()
            .map(|l| if l.inv { format!("{}^-1", g.name(l.gen)) } else { g.name(l.gen).to_string() })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| if l.inv { format!("{}^-1", l.gen) } else { l.gen.to_string() })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Distinct generators that commute.
pub fn commute(g: &SimplicialGraph, x: Vertex, y: Vertex) -> bool {
    x != y && g.has_edge(x, y)
}

/// Parses whitespace-separated tokens `a` and `a^-1`.
pub fn parse_word(g: &SimplicialGraph, text: &str) -> Result<Vec<Letter>> {
    text.split_whitespace()
        .map(|tok| {
            let (name, inv) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            g.vertex(name)
                .map(|v| Letter::new(v, inv))
                .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
        })
        .collect()
}

/// Free partially commutative reduction: each letter cancels against the
/// nearest earlier inverse it can commute back to.
pub fn reduce(g: &SimplicialGraph, w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &x in w {
        let mut cancelled = false;
        for j in (0..out.len()).rev() {
            let y = out[j];
            if y == x.inverse() {
                out.remove(j);
                cancelled = true;
                break;
            }
            if !commute(g, x.gen, y.gen) {
                break;
            }
        }
        if !cancelled {
            out.push(x);
        }
    }
    out
}

/// Lexicographically least commutation-equivalent word: repeatedly take the
/// least letter that commutes past everything before it.
pub fn lex_least(g: &SimplicialGraph, w: &[Letter]) -> Vec<Letter> {
    let mut rest: Vec<Letter> = w.to_vec();
    let mut out = Vec::with_capacity(w.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for i in 0..rest.len() {
            if rest[..i].iter().all(|y| commute(g, y.gen, rest[i].gen))
                && best.is_none_or(|b| rest[i] < rest[b])
            {
                best = Some(i);
            }
        }
        out.push(rest.remove(best.unwrap()));
    }
    out
}

pub fn normal_form(g: &SimplicialGraph, w: &[Letter]) -> NormalForm {
    NormalForm { letters: lex_least(g, &reduce(g, w)) }
}

pub fn multiply(g: &SimplicialGraph, u: &NormalForm, v: &NormalForm) -> NormalForm {
    let mut w = u.letters.clone();
    w.extend_from_slice(&v.letters);
    normal_form(g, &w)
}

pub fn inverse(g: &SimplicialGraph, u: &NormalForm) -> NormalForm {
    let w: Vec<Letter> = u.letters.iter().rev().map(|l| l.inverse()).collect();
    normal_form(g, &w)
}

/// Membership in the special subgroup generated by `s`.
pub fn special_membership(nf: &NormalForm, s: &BTreeSet<Vertex>) -> bool {
    nf.letters.iter().all(|l| s.contains(&l.gen))
}

/// Splits `nf = prefix * rest` with `prefix` the maximal left divisor lying
/// in the special subgroup on `s`.
pub fn max_left_divisor(g: &SimplicialGraph, nf: &NormalForm, s: &BTreeSet<Vertex>) -> (NormalForm, NormalForm) {
    let mut prefix = Vec::new();
    let mut rest: Vec<Letter> = Vec::new();
    for &x in &nf.letters {
        if s.contains(&x.gen) && rest.iter().all(|y| commute(g, x.gen, y.gen)) {
            prefix.push(x);
        } else {
            rest.push(x);
        }
    }
    (normal_form(g, &prefix), normal_form(g, &rest))
}

/// Splits `nf = rest * suffix` with `suffix` the maximal right divisor lying
/// in the special subgroup on `s`.
pub fn max_right_divisor(g: &SimplicialGraph, nf: &NormalForm, s: &BTreeSet<Vertex>) -> (NormalForm, NormalForm) {
    let mut suffix = Vec::new();
    let mut rest: Vec<Letter> = Vec::new();
    for &x in nf.letters.iter().rev() {
        if s.contains(&x.gen) && rest.iter().all(|y| commute(g, x.gen, y.gen)) {
            suffix.push(x);
        } else {
            rest.push(x);
        }
    }
    rest.reverse();
    suffix.reverse();
    (normal_form(g, &rest), normal_form(g, &suffix))
}

/// Key of the left coset `g<s>`: `g` with its maximal right divisor in `<s>`
/// removed.
pub fn coset_key(g: &SimplicialGraph, nf: &NormalForm, s: &BTreeSet<Vertex>) -> NormalForm {
    max_right_divisor(g, nf, s).0
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinLengthResult {
    pub length: usize,
    /// Factors in order, each with the index of the subgroup support used.
    pub factorization: Vec<(NormalForm, usize)>,
}

/// Least number of factors from the special subgroups on the given
/// supports, searching over maximal-prefix factorizations.
pub struct FactorLength<'a> {
    g: &'a SimplicialGraph,
    pub supports: Vec<BTreeSet<Vertex>>,
    memo: HashMap<NormalForm, (usize, usize)>,
}

impl<'a> FactorLength<'a> {
    pub fn new(g: &'a SimplicialGraph, supports: Vec<BTreeSet<Vertex>>) -> Self {
        Self { g, supports, memo: HashMap::new() }
    }

    /// Supports of the maximal join subgraphs.
    pub fn joins(g: &'a SimplicialGraph) -> Result<Self> {
        let supports = maximal_join_subgraphs(g)?.iter().map(|j| j.support()).collect();
        Ok(Self::new(g, supports))
    }

    /// Supports of the vertex stars.
    pub fn stars(g: &'a SimplicialGraph) -> Self {
        Self::new(g, g.vertices().map(|v| g.star(v)).collect())
    }

    fn best(&mut self, w: &NormalForm) -> (usize, usize) {
        if w.is_empty() {
            return (0, usize::MAX);
        }
        if let Some(&r) = self.memo.get(w) {
            return r;
        }
        let mut best = (usize::MAX, usize::MAX);
        for k in 0..self.supports.len() {
            let s = self.supports[k].clone();
            let (prefix, rest) = max_left_divisor(self.g, w, &s);
            if prefix.is_empty() {
                continue;
            }
            let (l, _) = self.best(&rest);
            if l + 1 < best.0 {
                best = (l + 1, k);
            }
        }
        self.memo.insert(w.clone(), best);
        best
    }

    pub fn length(&mut self, w: &NormalForm) -> JoinLengthResult {
        let (length, _) = self.best(w);
        let mut factorization = Vec::new();
        let mut cur = w.clone();
        while !cur.is_empty() {
            let (_, k) = self.best(&cur);
            let s = self.supports[k].clone();
            let (prefix, rest) = max_left_divisor(self.g, &cur, &s);
            factorization.push((prefix, k));
            cur = rest;
        }
        JoinLengthResult { length, factorization }
    }
}

pub fn join_length(g: &SimplicialGraph, nf: &NormalForm) -> Result<JoinLengthResult> {
    Ok(FactorLength::joins(g)?.length(nf))
}

pub fn star_length(g: &SimplicialGraph, nf: &NormalForm) -> JoinLengthResult {
    FactorLength::stars(g).length(nf)
}

/// All normal forms of word length at most `radius`, in breadth-first order.
pub fn ball(g: &SimplicialGraph, radius: usize) -> Vec<NormalForm> {
    let letters: Vec<Letter> = g.vertices().flat_map(|v| [Letter::new(v, false), Letter::new(v, true)]).collect();
    let mut seen: BTreeSet<NormalForm> = BTreeSet::from([NormalForm::identity()]);
    let mut layer = vec![NormalForm::identity()];
    let mut out = layer.clone();
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &layer {
            for &x in &letters {
                let mut v = w.letters.clone();
                v.push(x);
                let nf = normal_form(g, &v);
                if nf.len() == w.len() + 1 && seen.insert(nf.clone()) {
                    next.push(nf);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Brute-force references that do not use the reduction above.
pub mod oracle {
    use super::*;
    use std::collections::VecDeque;

    /// Least word of minimal length reachable by swapping adjacent commuting
    /// letters and deleting adjacent inverse pairs.
    pub fn orbit_key(g: &SimplicialGraph, w: &[Letter]) -> Vec<Letter> {
        let mut seen: BTreeSet<Vec<Letter>> = BTreeSet::from([w.to_vec()]);
        let mut queue = VecDeque::from([w.to_vec()]);
        let mut best = w.to_vec();
        while let Some(u) = queue.pop_front() {
            if u.len() < best.len() || (u.len() == best.len() && u < best) {
                best = u.clone();
            }
            for i in 0..u.len().saturating_sub(1) {
                let (x, y) = (u[i], u[i + 1]);
                let mut next = None;
                if x == y.inverse() {
                    let mut v = u.clone();
                    v.drain(i..i + 2);
                    next = Some(v);
                } else if commute(g, x.gen, y.gen) {
                    let mut v = u.clone();
                    v.swap(i, i + 1);
                    next = Some(v);
                }
                if let Some(v) = next {
                    if seen.insert(v.clone()) {
                        queue.push_back(v);
                    }
                }
            }
        }
        best
    }

    /// Cayley ball keyed by orbit keys.
    pub struct CayleyBall<'a> {
        g: &'a SimplicialGraph,
        pub radius: usize,
        keys: HashMap<Vec<Letter>, Vec<Letter>>,
    }

    impl<'a> CayleyBall<'a> {
        pub fn new(g: &'a SimplicialGraph, radius: usize) -> Self {
            Self { g, radius, keys: HashMap::new() }
        }

        pub fn key(&mut self, w: &[Letter]) -> Vec<Letter> {
            assert!(w.len() <= self.radius, "word outside the ball");
            if let Some(k) = self.keys.get(w) {
                return k.clone();
            }
            let k = orbit_key(self.g, w);
            self.keys.insert(w.to_vec(), k.clone());
            k
        }

        /// Triviality of a word of length at most twice the radius: split it
        /// as `u v` and compare `u` with `v^-1`.
        pub fn is_trivial(&mut self, w: &[Letter]) -> bool {
            assert!(w.len() <= 2 * self.radius);
            let cut = w.len().min(self.radius);
            let (u, v) = w.split_at(cut);
            if v.len() > self.radius {
                return false;
            }
            let vinv: Vec<Letter> = v.iter().rev().map(|l| l.inverse()).collect();
            self.key(u) == self.key(&vinv)
        }
    }

    /// Exact factor lengths over the ball of the given radius by
    /// breadth-first search, multiplying by subgroup elements of length at
    /// most `radius`.
    pub fn factor_lengths_bfs(
        g: &SimplicialGraph,
        supports: &[BTreeSet<Vertex>],
        radius: usize,
    ) -> HashMap<NormalForm, usize> {
        let elements = ball(g, radius);
        let in_ball: BTreeSet<&NormalForm> = elements.iter().collect();
        let pieces: Vec<NormalForm> = {
            let mut s: BTreeSet<NormalForm> = BTreeSet::new();
            for sup in supports {
                for e in &elements {
                    if !e.is_empty() && special_membership(e, sup) {
                        s.insert(e.clone());
                    }
                }
            }
            s.into_iter().collect()
        };
        let mut dist: HashMap<NormalForm, usize> = HashMap::from([(NormalForm::identity(), 0)]);
        let mut layer = vec![NormalForm::identity()];
        let mut d = 0;
        while !layer.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for x in &layer {
                for h in &pieces {
                    let y = multiply(g, x, h);
                    if in_ball.contains(&y) && !dist.contains_key(&y) {
                        dist.insert(y.clone(), d);
                        next.push(y);
                    }
                }
            }
            layer = next;
        }
        dist
    }
}
