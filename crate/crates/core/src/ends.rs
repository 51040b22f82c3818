//! End probes for locally finite graphs.
//!
//! A graph is given lazily by a root and a neighbour function. Ends are never
//! computed, only probed: remove the ball `B_r` and count the components of
//! `B_R \ B_r` that reach the sphere of radius `R`. A one-end certificate means
//! no evidence of a second end at the tested scales.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::hash::Hash;

use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flag_system::FlagSystem;
use crate::minimal_cover::CoverPatch;
use crate::monodromy::{Monodromy, MonodromyElement};
use crate::periodic_map::{PeriodicFlag, PeriodicMap};

/// Probe windows `(r, R)` used unless configured otherwise.
pub const DEFAULT_SCHEDULE: [(u32, u32); 4] = [(2, 6), (4, 10), (6, 14), (8, 18)];

pub const DEFAULT_MAX_NODES: usize = 5_000_000;

pub trait GraphGen {
    type Node: Clone + Eq + Hash + fmt::Debug;

    fn root(&self) -> Self::Node;

    /// Neighbours with edge labels.
    fn labeled_neighbors(&self, node: &Self::Node) -> Vec<(u8, Self::Node)>;

    fn neighbors(&self, node: &Self::Node) -> Vec<Self::Node> {
        self.labeled_neighbors(node).into_iter().map(|(_, n)| n).collect()
    }
}

impl<G: GraphGen + ?Sized> GraphGen for &G {
    type Node = G::Node;

    fn root(&self) -> Self::Node {
        (**self).root()
    }

    fn labeled_neighbors(&self, node: &Self::Node) -> Vec<(u8, Self::Node)> {
        (**self).labeled_neighbors(node)
    }
}

/// Distance-labelled ball, nodes in breadth-first order.
#[derive(Clone, Debug)]
pub struct Ball<N> {
    pub radius: u32,
    pub nodes: IndexMap<N, u32>,
}

impl<N: Clone + Eq + Hash> Ball<N> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius as usize + 1];
        for &d in self.nodes.values() {
            out[d as usize] += 1;
        }
        out
    }
}

pub fn ball<G: GraphGen>(g: &G, r: u32, cap: usize) -> Result<Ball<G::Node>> {
    let mut nodes = IndexMap::new();
    nodes.insert(g.root(), 0u32);
    let mut next = 0;
    while next < nodes.len() {
        let (node, &d) = nodes.get_index(next).unwrap();
        if d < r {
            let node = node.clone();
            for nb in g.neighbors(&node) {
                if !nodes.contains_key(&nb) {
                    nodes.insert(nb, d + 1);
                    if nodes.len() > cap {
                        return Err(Error::CapExceeded { what: "ball nodes", cap });
                    }
                }
            }
        }
        next += 1;
    }
    Ok(Ball { radius: r, nodes })
}

/// Graphviz rendering of a ball with edge labels.
pub fn ball_to_dot<G: GraphGen>(g: &G, r: u32, cap: usize) -> Result<String> {
    let b = ball(g, r, cap)?;
    let mut out = String::from("graph ball {\n");
    for (i, (node, d)) in b.nodes.iter().enumerate() {
        writeln!(out, "  n{} [label=\"{}\"];", i, d).unwrap();
        for (l, nb) in g.labeled_neighbors(node) {
            if let Some(j) = b.nodes.get_index_of(&nb) {
                if i < j {
                    writeln!(out, "  n{} -- n{} [label=\"{}\"];", i, j, l).unwrap();
                }
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EndsProbeResult {
    pub r: u32,
    #[serde(rename = "R")]
    pub big_r: u32,
    pub components: usize,
    pub ball_size: usize,
}

impl EndsProbeResult {
    pub const HEADER: &'static str = "r,R,components,ball_size";
}

impl fmt::Display for EndsProbeResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.r, self.big_r, self.components, self.ball_size)
    }
}

fn find(parent: &mut [u32], mut x: usize) -> usize {
    while parent[x] as usize != x {
        let p = parent[x] as usize;
        parent[x] = parent[p];
        x = p;
    }
    x
}

/// Components of `B_R \ B_r` containing a node at distance exactly `R`.
pub fn ends_probe<G: GraphGen>(g: &G, r: u32, big_r: u32, cap: usize) -> Result<EndsProbeResult> {
    if big_r <= r {
        return Err(Error::InvalidParameter(format!("need R > r, got r={} R={}", r, big_r)));
    }
    let b = ball(g, big_r, cap)?;
    let mut parent: Vec<u32> = (0..b.len() as u32).collect();
    for (i, (node, &d)) in b.nodes.iter().enumerate() {
        if d <= r {
            continue;
        }
        for nb in g.neighbors(node) {
            if let Some((j, _, &dj)) = b.nodes.get_full(&nb) {
                if dj > r {
                    let (a, c) = (find(&mut parent, i), find(&mut parent, j));
                    if a != c {
                        parent[a.max(c)] = a.min(c) as u32;
                    }
                }
            }
        }
    }
    let mut roots: Vec<usize> = b
        .nodes
        .values()
        .enumerate()
        .filter(|(_, &d)| d == big_r)
        .map(|(i, _)| i)
        .collect();
    for x in roots.iter_mut() {
        *x = find(&mut parent, *x);
    }
    roots.sort_unstable();
    roots.dedup();
    Ok(EndsProbeResult {
        r,
        big_r,
        components: roots.len(),
        ball_size: b.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OneEndReport {
    pub probes: Vec<EndsProbeResult>,
    pub pass: bool,
}

impl OneEndReport {
    pub fn summary(&self) -> String {
        let sched: Vec<String> = self.probes.iter().map(|p| format!("({},{})", p.r, p.big_r)).collect();
        if self.pass {
            format!(
                "one component at every probe {}: no evidence of a second end at these scales",
                sched.join(" ")
            )
        } else {
            let counts: Vec<String> = self.probes.iter().map(|p| p.components.to_string()).collect();
            format!("component counts {} on {}: not one-ended at these scales", counts.join(","), sched.join(" "))
        }
    }
}

pub fn one_end_certificate<G: GraphGen>(g: &G, schedule: &[(u32, u32)], cap: usize) -> Result<OneEndReport> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty probe schedule".into()));
    }
    let probes = schedule
        .iter()
        .map(|&(r, big_r)| ends_probe(g, r, big_r, cap))
        .collect::<Result<Vec<_>>>()?;
    let pass = probes.iter().all(|p| p.components == 1);
    Ok(OneEndReport { probes, pass })
}

/// Cayley graph of the integers.
#[derive(Clone, Copy, Debug, Default)]
pub struct LineGraph;

impl GraphGen for LineGraph {
    type Node = i64;

    fn root(&self) -> i64 {
        0
    }

    fn labeled_neighbors(&self, &n: &i64) -> Vec<(u8, i64)> {
        vec![(0, n - 1), (1, n + 1)]
    }
}

/// Cayley graph of `Z^2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Grid2;

impl GraphGen for Grid2 {
    type Node = [i64; 2];

    fn root(&self) -> [i64; 2] {
        [0, 0]
    }

    fn labeled_neighbors(&self, &[x, y]: &[i64; 2]) -> Vec<(u8, [i64; 2])> {
        vec![(0, [x - 1, y]), (1, [x + 1, y]), (2, [x, y - 1]), (3, [x, y + 1])]
    }
}

/// The `d`-regular tree, as the Cayley graph of a free product of `d`
/// copies of `Z/2`; nodes are reduced words.
#[derive(Clone, Copy, Debug)]
pub struct Tree {
    degree: u8,
}

impl Tree {
    pub fn new(degree: u8) -> Result<Self> {
        if degree < 3 {
            return Err(Error::InvalidParameter(format!("tree degree {} < 3", degree)));
        }
        Ok(Tree { degree })
    }
}

impl GraphGen for Tree {
    type Node = Vec<u8>;

    fn root(&self) -> Vec<u8> {
        Vec::new()
    }

    fn labeled_neighbors(&self, w: &Vec<u8>) -> Vec<(u8, Vec<u8>)> {
        (0..self.degree)
            .map(|a| {
                let mut v = w.clone();
                if v.last() == Some(&a) {
                    v.pop();
                } else {
                    v.push(a);
                }
                (a, v)
            })
            .collect()
    }
}

/// Cayley graph of `H = <a, b, c | a^2, b^2, c^2, (abc)^2>`: the hexagonal
/// lattice with edges labelled `a = 0`, `b = 1`, `c = 2` by direction.
/// A node `(s, i, j)` lies on sublattice `s`.
#[derive(Clone, Copy, Debug, Default)]
pub struct HexCayleyH;

impl GraphGen for HexCayleyH {
    type Node = (bool, i64, i64);

    fn root(&self) -> Self::Node {
        (false, 0, 0)
    }

    fn labeled_neighbors(&self, &(s, i, j): &Self::Node) -> Vec<(u8, Self::Node)> {
        if !s {
            vec![(0, (true, i, j)), (1, (true, i - 1, j)), (2, (true, i, j - 1))]
        } else {
            vec![(0, (false, i, j)), (1, (false, i + 1, j)), (2, (false, i, j + 1))]
        }
    }
}

/// Cayley graph of a direct product. Labels `l` of the first factor become
/// `2l + 1`, those of the second `2l + 2`, so with two copies of `H` the
/// colours are `1, 3, 5` and `2, 4, 6`.
#[derive(Clone, Copy, Debug)]
pub struct ProductGraph<A, B> {
    pub first: A,
    pub second: B,
}

pub fn product_graph<A: GraphGen, B: GraphGen>(first: A, second: B) -> ProductGraph<A, B> {
    ProductGraph { first, second }
}

impl<A: GraphGen, B: GraphGen> GraphGen for ProductGraph<A, B> {
    type Node = (A::Node, B::Node);

    fn root(&self) -> Self::Node {
        (self.first.root(), self.second.root())
    }

    fn labeled_neighbors(&self, (x, y): &Self::Node) -> Vec<(u8, Self::Node)> {
        let mut out: Vec<(u8, Self::Node)> = self
            .first
            .labeled_neighbors(x)
            .into_iter()
            .map(|(l, n)| (2 * l + 1, (n, y.clone())))
            .collect();
        out.extend(
            self.second
                .labeled_neighbors(y)
                .into_iter()
                .map(|(l, n)| (2 * l + 2, (x.clone(), n))),
        );
        out
    }
}

/// Flag graph of a periodic map, rooted at `(0, 0)`.
#[derive(Clone, Debug)]
pub struct PeriodicFlagGraph<'a>(pub &'a PeriodicMap);

impl GraphGen for PeriodicFlagGraph<'_> {
    type Node = PeriodicFlag;

    fn root(&self) -> PeriodicFlag {
        PeriodicFlag::new(0, [0, 0])
    }

    fn labeled_neighbors(&self, f: &PeriodicFlag) -> Vec<(u8, PeriodicFlag)> {
        (0..3).map(|i| (i, self.0.step(*f, i))).collect()
    }
}

/// Flag graph of a finite map, rooted at flag 0.
#[derive(Clone, Debug)]
pub struct FiniteFlagGraph<'a>(pub &'a FlagSystem);

impl GraphGen for FiniteFlagGraph<'_> {
    type Node = u32;

    fn root(&self) -> u32 {
        0
    }

    fn labeled_neighbors(&self, &f: &u32) -> Vec<(u8, u32)> {
        (0..3).map(|i| (i, self.0.step(f as usize, i) as u32)).collect()
    }
}

pub fn flag_graph_of_periodic(pm: &PeriodicMap) -> PeriodicFlagGraph<'_> {
    PeriodicFlagGraph(pm)
}

pub fn flag_graph_of_finite(fs: &FlagSystem) -> FiniteFlagGraph<'_> {
    FiniteFlagGraph(fs)
}

/// Dual graph of a cover patch: faces are the `<r0, r1>`-classes of patch
/// elements, adjacent across `r2`. Faces cut by the boundary are kept and
/// marked incomplete.
#[derive(Clone, Debug)]
pub struct PatchDualGraph {
    face_of: Vec<u32>,
    /// Per face: `(neighbour face, flag of this face on the shared edge)`.
    adj: Vec<Vec<(u32, u32)>>,
    complete: Vec<bool>,
    labels: Option<Vec<u8>>,
}

pub fn dual_graph_of(cp: &CoverPatch) -> PatchDualGraph {
    let n = cp.len();
    let mut face_of = vec![u32::MAX; n];
    let mut complete = Vec::new();
    for start in 0..n {
        if face_of[start] != u32::MAX {
            continue;
        }
        let id = complete.len() as u32;
        let mut whole = true;
        face_of[start] = id;
        let mut stack = vec![start];
        while let Some(g) = stack.pop() {
            for i in 0..3 {
                match cp.neighbour(g, i) {
                    Some(h) if i < 2 && face_of[h] == u32::MAX => {
                        face_of[h] = id;
                        stack.push(h);
                    }
                    Some(_) => {}
                    None => whole = false,
                }
            }
        }
        complete.push(whole);
    }
    let mut adj = vec![Vec::new(); complete.len()];
    for g in 0..n {
        // One flag per edge: r0 pairs the two flags of a face along an edge.
        let partner = cp.neighbour(g, 0);
        if partner.is_some_and(|p| p < g) {
            continue;
        }
        if let Some(h) = cp.neighbour(g, 2).or_else(|| partner.and_then(|p| cp.neighbour(p, 2))) {
            adj[face_of[g] as usize].push((face_of[h], g as u32));
        }
    }
    PatchDualGraph {
        face_of,
        adj,
        complete,
        labels: None,
    }
}

impl PatchDualGraph {
    pub fn num_faces(&self) -> usize {
        self.adj.len()
    }

    pub fn face_of(&self, element: usize) -> u32 {
        self.face_of[element]
    }

    /// All flags of the face and all their neighbours lie in the patch.
    pub fn is_complete(&self, face: u32) -> bool {
        self.complete[face as usize]
    }

    /// `(neighbour, flag)` pairs of a face.
    pub fn edges(&self, face: u32) -> &[(u32, u32)] {
        &self.adj[face as usize]
    }

    /// Labels dual edges by a per-flag label of the crossing flag.
    pub fn with_labels(mut self, label_of_flag: Vec<u8>) -> Self {
        self.labels = Some(label_of_flag);
        self
    }
}

impl GraphGen for PatchDualGraph {
    type Node = u32;

    fn root(&self) -> u32 {
        self.face_of[0]
    }

    fn labeled_neighbors(&self, &f: &u32) -> Vec<(u8, u32)> {
        self.adj[f as usize]
            .iter()
            .map(|&(h, g)| (self.labels.as_ref().map_or(0, |l| l[g as usize]), h))
            .collect()
    }
}

/// Dual graph of the whole minimal regular cover, generated lazily. A face is
/// named by the least element of its `<r0, r1>`-coset.
#[derive(Clone, Debug)]
pub struct CoverDualGraph<'a> {
    mon: &'a Monodromy,
}

pub fn cover_dual_graph(mon: &Monodromy) -> CoverDualGraph<'_> {
    CoverDualGraph { mon }
}

impl CoverDualGraph<'_> {
    /// The face around `g`, one flag per edge, in walking order.
    pub fn face_flags(&self, g: &MonodromyElement) -> Vec<MonodromyElement> {
        let mut out = vec![g.clone()];
        let mut cur: Box<[PeriodicFlag]> = g.images().into();
        loop {
            self.mon.step_images(&mut cur, 0);
            self.mon.step_images(&mut cur, 1);
            if *cur == *g.images() {
                return out;
            }
            out.push(MonodromyElement::from_images(cur.clone()));
        }
    }

    /// Least element of the `<r0, r1>`-coset of the element with `images`.
    fn canonical(&self, images: &[PeriodicFlag]) -> MonodromyElement {
        let mut best: Box<[PeriodicFlag]> = images.into();
        let mut cur = best.clone();
        let mut k = 0u8;
        loop {
            self.mon.step_images(&mut cur, k % 2);
            k = k.wrapping_add(1);
            if k.is_multiple_of(2) && *cur == *images {
                return MonodromyElement::from_images(best);
            }
            if *cur < *best {
                best.copy_from_slice(&cur);
            }
        }
    }

    pub fn face_of(&self, g: &MonodromyElement) -> MonodromyElement {
        self.canonical(g.images())
    }
}

impl GraphGen for CoverDualGraph<'_> {
    type Node = MonodromyElement;

    fn root(&self) -> MonodromyElement {
        self.face_of(&self.mon.identity())
    }

    fn labeled_neighbors(&self, face: &MonodromyElement) -> Vec<(u8, MonodromyElement)> {
        let mut out = Vec::new();
        let mut cur: Box<[PeriodicFlag]> = face.images().into();
        let mut across = cur.clone();
        loop {
            across.copy_from_slice(&cur);
            self.mon.step_images(&mut across, 2);
            out.push((0, self.canonical(&across)));
            self.mon.step_images(&mut cur, 0);
            self.mon.step_images(&mut cur, 1);
            if *cur == *face.images() {
                return out;
            }
        }
    }
}

/// Cayley graph of the Coxeter group `[p, q]` (the flag graph of `{p, q}`),
/// built layer by layer up to a fixed word length.
#[derive(Clone, Debug)]
pub struct CoxeterFlagGraph {
    p: u32,
    q: u32,
    layers: u32,
    layer: Vec<u32>,
    nbr: Vec<[u32; 3]>,
}

const NONE: u32 = u32::MAX;

/// Flag graph of the hyperbolic tiling `{p, q}`, `1/p + 1/q < 1/2`.
pub fn hyperbolic_flag_graph(p: u32, q: u32, layers: u32) -> Result<CoxeterFlagGraph> {
    if p < 3 || q < 3 || 2 * (p + q) >= p * q {
        return Err(Error::InvalidParameter(format!("{{{},{}}} is not hyperbolic", p, q)));
    }
    Ok(CoxeterFlagGraph::build(p, q, layers))
}

impl CoxeterFlagGraph {
    /// Builds any `[p, q]` with `p, q >= 3`, including the Euclidean ones.
    pub fn build(p: u32, q: u32, layers: u32) -> Self {
        let mut g = CoxeterFlagGraph {
            p,
            q,
            layers,
            layer: vec![0],
            nbr: vec![[NONE; 3]],
        };
        let mut start = 0;
        for n in 0..layers {
            let end = g.layer.len();
            let mut keys: HashMap<(u32, u8, u8), u32> = HashMap::new();
            for x in start..end {
                for s in 0..3u8 {
                    if g.nbr[x][s as usize] != NONE {
                        continue;
                    }
                    let key = g.key(x as u32, s);
                    let id = *keys.entry(key).or_insert_with(|| {
                        g.layer.push(n + 1);
                        g.nbr.push([NONE; 3]);
                        (g.layer.len() - 1) as u32
                    });
                    g.nbr[x][s as usize] = id;
                    g.nbr[id as usize][s as usize] = x as u32;
                }
            }
            start = end;
        }
        g
    }

    fn m(&self, s: u8, t: u8) -> u32 {
        match (s.min(t), s.max(t)) {
            (0, 1) => self.p,
            (1, 2) => self.q,
            _ => 2,
        }
    }

    /// Canonical name of `x·s` one layer up: `(u, s, t)` when it has a second
    /// descent `t` and equals `u` times the longest element of `<s, t>`,
    /// otherwise `(x, s, s)`.
    fn key(&self, x: u32, s: u8) -> (u32, u8, u8) {
        for t in (0..3u8).filter(|&t| t != s) {
            let mut cur = x;
            let mut ok = true;
            for step in 0..self.m(s, t) - 1 {
                let l = if step % 2 == 0 { t } else { s };
                let next = self.nbr[cur as usize][l as usize];
                if next == NONE || self.layer[next as usize] + 1 != self.layer[cur as usize] {
                    ok = false;
                    break;
                }
                cur = next;
            }
            if ok {
                return (cur, s.min(t), s.max(t));
            }
        }
        (x, s, s)
    }

    pub fn len(&self) -> usize {
        self.layer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layer.is_empty()
    }

    pub fn layers(&self) -> u32 {
        self.layers
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.layers as usize + 1];
        for &l in &self.layer {
            out[l as usize] += 1;
        }
        out
    }
}

impl GraphGen for CoxeterFlagGraph {
    type Node = u32;

    fn root(&self) -> u32 {
        0
    }

    /// Nodes in the outermost layer are missing their upward edges.
    fn labeled_neighbors(&self, &x: &u32) -> Vec<(u8, u32)> {
        (0..3u8)
            .filter_map(|i| {
                let y = self.nbr[x as usize][i as usize];
                (y != NONE).then_some((i, y))
            })
            .collect()
    }
}

/// Named graphs for the command line.
pub const GRAPH_NAMES: [&str; 6] = ["line", "grid", "tree4", "hex", "hxh", "hyperbolic64"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_sizes() {
        assert_eq!(ball(&LineGraph, 3, 100).unwrap().len(), 7);
        assert_eq!(ball(&Grid2, 2, 100).unwrap().len(), 13);
        assert_eq!(ball(&Tree::new(4).unwrap(), 2, 100).unwrap().len(), 17);
        assert!(Tree::new(2).is_err());
    }

    #[test]
    fn probes() {
        assert_eq!(ends_probe(&LineGraph, 3, 10, 1000).unwrap().components, 2);
        assert_eq!(ends_probe(&Grid2, 3, 10, 1000).unwrap().components, 1);
        assert_eq!(ends_probe(&Tree::new(4).unwrap(), 2, 8, 100_000).unwrap().components, 36);
        assert!(ends_probe(&Grid2, 3, 3, 1000).is_err());
    }

    #[test]
    fn hex_relations() {
        let h = HexCayleyH;
        let root = h.root();
        let step = |n: &(bool, i64, i64), l: u8| h.labeled_neighbors(n)[l as usize].1;
        let mut n = root;
        for _ in 0..2 {
            for l in 0..3 {
                n = step(&n, l);
            }
        }
        assert_eq!(n, root);
        for l in 0..3 {
            assert_eq!(step(&step(&root, l), l), root);
        }
    }

    #[test]
    fn hyperbolic_parameters() {
        assert!(hyperbolic_flag_graph(4, 4, 3).is_err());
        assert!(hyperbolic_flag_graph(3, 6, 3).is_err());
        assert!(hyperbolic_flag_graph(6, 4, 3).is_ok());
    }
}
