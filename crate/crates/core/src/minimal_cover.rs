//! Minimal regular covers.
//!
//! For a finite map the cover is built outright from `Mon(M)`. For a periodic
//! map only balls of the cover are available: the flags of the cover are the
//! elements of `Mon(M)`, each one a triangle, and triangles `g` and `g·r_i` are
//! glued along their side `i`. A ball of radius `r` around the identity is a
//! bordered triangulated surface whose genus can be read off exactly.

use std::fmt;

use indexmap::IndexSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flag_system::FlagSystem;
use crate::monodromy::{mon_enumerate, Monodromy, MonodromyElement};
use crate::periodic_map::{PeriodicFlag, PeriodicMap};

/// Default element cap for covers and patches.
pub const DEFAULT_MAX_ELEMENTS: usize = 5_000_000;

/// Radii used for genus tables unless configured otherwise.
pub const DEFAULT_RADII: [u32; 5] = [4, 6, 8, 10, 12];

#[derive(Clone, Debug)]
pub struct FiniteCover {
    pub cover: FlagSystem,
    /// `π(g) = base·g` with base flag 0.
    pub projection: Vec<u32>,
}

/// The minimal regular cover of a finite map.
pub fn finite_cover(fs: &FlagSystem, cap: usize) -> Result<FiniteCover> {
    let elements = mon_enumerate(fs, cap)?;
    let index: IndexSet<&[u32]> = elements.iter().map(|g| g.as_slice()).collect();
    let mut adj: [Vec<u32>; 3] = Default::default();
    for (i, slot) in adj.iter_mut().enumerate() {
        let gen = fs.generator(i as u8);
        *slot = elements
            .iter()
            .map(|g| {
                let h: Vec<u32> = g.iter().map(|&x| gen[x as usize]).collect();
                index.get_index_of(h.as_slice()).expect("closed under generators") as u32
            })
            .collect();
    }
    let cover = FlagSystem::from_adjacency(adj)?;
    if !cover.is_regular() {
        return Err(Error::Inconsistent("monodromy cover is not regular".into()));
    }
    let projection = elements.iter().map(|g| g[0]).collect();
    Ok(FiniteCover { cover, projection })
}

/// A ball in the Cayley graph of `Mon(M)` around the identity.
#[derive(Clone, Debug)]
pub struct CoverPatch {
    elements: IndexSet<MonodromyElement>,
    /// Neighbour `g·r_i` of each element, or `None` on the boundary.
    edges: Vec<[Option<u32>; 3]>,
    dist: Vec<u32>,
    radius: u32,
}

impl CoverPatch {
    pub fn build(mon: &Monodromy, radius: u32, cap: usize) -> Result<CoverPatch> {
        let mut elements: IndexSet<MonodromyElement> = IndexSet::new();
        let mut dist = vec![0u32];
        let mut edges: Vec<[Option<u32>; 3]> = Vec::new();
        elements.insert(mon.identity());
        let mut next = 0;
        while next < elements.len() {
            let d = dist[next];
            let mut row = [None; 3];
            for (i, slot) in row.iter_mut().enumerate() {
                let h = mon.times_letter(&elements[next], i as u8);
                if d < radius {
                    let (idx, fresh) = elements.insert_full(h);
                    if fresh {
                        if elements.len() > cap {
                            return Err(Error::CapExceeded {
                                what: "patch elements",
                                cap,
                            });
                        }
                        dist.push(d + 1);
                    }
                    *slot = Some(idx as u32);
                } else {
                    *slot = elements.get_index_of(&h).map(|x| x as u32);
                }
            }
            edges.push(row);
            next += 1;
        }
        Ok(CoverPatch {
            elements,
            edges,
            dist,
            radius,
        })
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, idx: usize) -> &MonodromyElement {
        &self.elements[idx]
    }

    pub fn elements(&self) -> impl Iterator<Item = &MonodromyElement> {
        self.elements.iter()
    }

    pub fn index_of(&self, g: &MonodromyElement) -> Option<usize> {
        self.elements.get_index_of(g)
    }

    pub fn edges(&self) -> &[[Option<u32>; 3]] {
        &self.edges
    }

    pub fn neighbour(&self, idx: usize, i: u8) -> Option<usize> {
        self.edges[idx][i as usize].map(|x| x as usize)
    }

    pub fn distance(&self, idx: usize) -> u32 {
        self.dist[idx]
    }

    /// Number of elements within distance `r` (they form a prefix).
    pub fn ball_len(&self, r: u32) -> usize {
        self.dist.partition_point(|&d| d <= r)
    }

    /// The covering projection: the image of the base flag.
    pub fn project(&self, idx: usize) -> PeriodicFlag {
        self.elements[idx].images()[0]
    }

    /// Follows `word` from element `start` inside the patch; `None` if the
    /// walk leaves it.
    pub fn walk(&self, start: usize, word: &crate::word::Word) -> Option<usize> {
        word.letters()
            .iter()
            .try_fold(start, |g, &l| self.neighbour(g, l))
    }

    /// Statistics of the full patch.
    pub fn stats(&self) -> PatchStats {
        self.stats_at(self.radius)
    }

    /// Statistics of the sub-ball of radius `r`.
    pub fn stats_at(&self, r: u32) -> PatchStats {
        let n = self.ball_len(r.min(self.radius));
        let edge = |g: usize, i: usize| self.edges[g][i].filter(|&h| (h as usize) < n);
        patch_stats_from(n, edge)
    }

    /// One CSV row per radius in `radii`.
    pub fn table(&self, radii: &[u32]) -> Vec<PatchRow> {
        radii
            .iter()
            .filter(|&&r| r <= self.radius)
            .map(|&r| PatchRow::new(r, self.ball_len(r), &self.stats_at(r)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PatchStats {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub chi: i64,
    pub boundary_cycles: usize,
    pub orientable: bool,
    /// Orientable genus `1 - (chi + q)/2`.
    pub genus: Option<i64>,
    /// Number of crosscaps `2 - chi - q` for non-orientable patches.
    pub nonorientable_genus: Option<i64>,
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n as u32).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] as usize != x {
            let p = self.0[x] as usize;
            self.0[x] = self.0[p];
            x = p;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b) as u32;
        }
    }
}

/// Triangle `g` has corners of type 0 (vertex), 1 (edge) and 2 (face); its
/// side `i` is glued to `g·r_i` and carries the two corners of type `!= i`.
fn patch_stats_from(n: usize, edge: impl Fn(usize, usize) -> Option<u32>) -> PatchStats {
    let corner = |g: usize, j: usize| 3 * g + j;
    let mut uf = UnionFind::new(3 * n);
    let mut glued = 0;
    let mut boundary = 0;
    for g in 0..n {
        for i in 0..3 {
            match edge(g, i) {
                Some(h) => {
                    glued += 1;
                    for j in (0..3).filter(|&j| j != i) {
                        uf.union(corner(g, j), corner(h as usize, j));
                    }
                }
                None => boundary += 1,
            }
        }
    }
    let v = (0..3 * n).filter(|&c| uf.find(c) == c).count();
    let e = glued / 2 + boundary;
    let chi = v as i64 - e as i64 + n as i64;

    // Boundary cycles: corner classes joined by boundary sides.
    let mut reps: Vec<usize> = Vec::new();
    let mut sides: Vec<(usize, usize)> = Vec::new();
    for g in 0..n {
        for i in 0..3 {
            if edge(g, i).is_none() {
                let ends: Vec<usize> = (0..3).filter(|&j| j != i).map(|j| uf.find(corner(g, j))).collect();
                sides.push((ends[0], ends[1]));
                reps.extend_from_slice(&ends);
            }
        }
    }
    reps.sort_unstable();
    reps.dedup();
    let pos = |c: usize| reps.binary_search(&c).unwrap();
    let mut buf = UnionFind::new(reps.len());
    for &(a, b) in &sides {
        buf.union(pos(a), pos(b));
    }
    let q = (0..reps.len()).filter(|&c| buf.find(c) == c).count();

    let mut colour = vec![u8::MAX; n];
    let mut orientable = true;
    if n > 0 {
        colour[0] = 0;
        let mut stack = vec![0usize];
        while let Some(g) = stack.pop() {
            for i in 0..3 {
                if let Some(h) = edge(g, i) {
                    let h = h as usize;
                    if colour[h] == u8::MAX {
                        colour[h] = 1 - colour[g];
                        stack.push(h);
                    } else if colour[h] == colour[g] {
                        orientable = false;
                    }
                }
            }
        }
    }
    let twice = 2 - chi - q as i64;
    PatchStats {
        v,
        e,
        f: n,
        chi,
        boundary_cycles: q,
        orientable,
        genus: orientable.then_some(twice / 2),
        nonorientable_genus: (!orientable).then_some(twice),
    }
}

/// CSV row `r,elements,chi,boundary,genus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatchRow {
    pub r: u32,
    pub elements: usize,
    pub chi: i64,
    pub boundary: usize,
    pub genus: String,
}

impl PatchRow {
    pub const HEADER: &'static str = "r,elements,chi,boundary,genus";

    pub fn new(r: u32, elements: usize, s: &PatchStats) -> Self {
        let genus = match (s.genus, s.nonorientable_genus) {
            (Some(g), _) => g.to_string(),
            (None, Some(c)) => format!("N{}", c),
            (None, None) => unreachable!(),
        };
        PatchRow {
            r,
            elements,
            chi: s.chi,
            boundary: s.boundary_cycles,
            genus,
        }
    }
}

impl fmt::Display for PatchRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{},{}", self.r, self.elements, self.chi, self.boundary, self.genus)
    }
}

/// Ramification of one face or vertex class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassBranch {
    pub cells: Vec<u32>,
    /// Number of edges of the face, or degree of the vertex.
    pub size: usize,
    pub index: usize,
}

impl ClassBranch {
    pub fn is_branch_point(&self) -> bool {
        self.index > 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchReport {
    pub p: usize,
    pub q: usize,
    pub faces: Vec<ClassBranch>,
    pub vertices: Vec<ClassBranch>,
}

impl BranchReport {
    pub fn has_face_branch_point(&self) -> bool {
        self.faces.iter().any(ClassBranch::is_branch_point)
    }

    pub fn has_vertex_branch_point(&self) -> bool {
        self.vertices.iter().any(ClassBranch::is_branch_point)
    }
}

pub fn pq_type(pm: &PeriodicMap) -> (usize, usize) {
    pm.pq_type()
}

pub fn branch_orders(pm: &PeriodicMap) -> BranchReport {
    let (p, q) = pm.pq_type();
    let classes = |list: Vec<(Vec<u32>, usize)>, l: usize| {
        list.into_iter()
            .map(|(cells, size)| ClassBranch {
                cells,
                size,
                index: l / size,
            })
            .collect()
    };
    BranchReport {
        p,
        q,
        faces: classes(pm.face_classes(), p),
        vertices: classes(pm.vertex_classes(), q),
    }
}
