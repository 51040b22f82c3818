//! Lattice-periodic planar maps.
//!
//! A flag of the infinite map is a pair `(cell, t)` where `cell` indexes the
//! flag classes modulo the translation lattice and `t` is an integer lattice
//! vector. Each generator is stored per cell as `(cell', dt)`, meaning
//! `adj_i(cell, t) = (cell', t + dt)`.
//!
//! Automorphisms are affine in this encoding: `phi(c, t) = (perm[c], M t + o[c])`
//! with `M` unimodular. [`PeriodicMap::automorphism_from`] solves for `perm`,
//! `o` and `M` from the image of one flag and checks every generator relation
//! on the fundamental cell; by periodicity that check covers the whole plane.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flag_system::{Axiom, FlagSystem, Partition, ValidationReport};
use crate::word::Word;

pub type Offset = [i32; 2];

#[inline]
fn add(a: Offset, b: Offset) -> Offset {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
fn sub(a: Offset, b: Offset) -> Offset {
    [a[0] - b[0], a[1] - b[1]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PeriodicFlag {
    pub cell: u32,
    pub t: Offset,
}

impl PeriodicFlag {
    pub fn new(cell: u32, t: Offset) -> Self {
        PeriodicFlag { cell, t }
    }

    pub fn translated(self, v: Offset) -> Self {
        PeriodicFlag {
            cell: self.cell,
            t: add(self.t, v),
        }
    }
}

impl fmt::Display for PeriodicFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, [{}, {}])", self.cell, self.t[0], self.t[1])
    }
}

/// The eleven vertex-transitive tilings of the plane by regular polygons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tiling {
    Snub333336,
    ElongatedTriangular33344,
    SnubSquare33434,
    Trihexagonal3636,
    TruncatedHexagonal31212,
    TruncatedTrihexagonal4612,
    TruncatedSquare488,
    Rhombitrihexagonal3464,
    Square4444,
    Triangular333333,
    Hexagonal666,
}

impl Tiling {
    pub const ALL: [Tiling; 11] = [
        Tiling::Snub333336,
        Tiling::ElongatedTriangular33344,
        Tiling::SnubSquare33434,
        Tiling::Trihexagonal3636,
        Tiling::TruncatedHexagonal31212,
        Tiling::TruncatedTrihexagonal4612,
        Tiling::TruncatedSquare488,
        Tiling::Rhombitrihexagonal3464,
        Tiling::Square4444,
        Tiling::Triangular333333,
        Tiling::Hexagonal666,
    ];

    pub const ARCHIMEDEAN: [Tiling; 8] = [
        Tiling::Snub333336,
        Tiling::ElongatedTriangular33344,
        Tiling::SnubSquare33434,
        Tiling::Trihexagonal3636,
        Tiling::TruncatedHexagonal31212,
        Tiling::TruncatedTrihexagonal4612,
        Tiling::TruncatedSquare488,
        Tiling::Rhombitrihexagonal3464,
    ];

    pub const REGULAR: [Tiling; 3] = [
        Tiling::Square4444,
        Tiling::Triangular333333,
        Tiling::Hexagonal666,
    ];

    /// Vertex configuration, e.g. `"3.6.3.6"`.
    pub fn name(self) -> &'static str {
        match self {
            Tiling::Snub333336 => "3.3.3.3.6",
            Tiling::ElongatedTriangular33344 => "3.3.3.4.4",
            Tiling::SnubSquare33434 => "3.3.4.3.4",
            Tiling::Trihexagonal3636 => "3.6.3.6",
            Tiling::TruncatedHexagonal31212 => "3.12.12",
            Tiling::TruncatedTrihexagonal4612 => "4.6.12",
            Tiling::TruncatedSquare488 => "4.8.8",
            Tiling::Rhombitrihexagonal3464 => "3.4.6.4",
            Tiling::Square4444 => "4.4.4.4",
            Tiling::Triangular333333 => "3.3.3.3.3.3",
            Tiling::Hexagonal666 => "6.6.6",
        }
    }

    /// Face sizes around a vertex in cyclic order.
    pub fn vertex_configuration(self) -> Vec<usize> {
        self.name().split('.').map(|s| s.parse().unwrap()).collect()
    }

    fn fixture(self) -> &'static str {
        match self {
            Tiling::Snub333336 => include_str!("../fixtures/3.3.3.3.6.json"),
            Tiling::ElongatedTriangular33344 => include_str!("../fixtures/3.3.3.4.4.json"),
            Tiling::SnubSquare33434 => include_str!("../fixtures/3.3.4.3.4.json"),
            Tiling::Trihexagonal3636 => include_str!("../fixtures/3.6.3.6.json"),
            Tiling::TruncatedHexagonal31212 => include_str!("../fixtures/3.12.12.json"),
            Tiling::TruncatedTrihexagonal4612 => include_str!("../fixtures/4.6.12.json"),
            Tiling::TruncatedSquare488 => include_str!("../fixtures/4.8.8.json"),
            Tiling::Rhombitrihexagonal3464 => include_str!("../fixtures/3.4.6.4.json"),
            Tiling::Square4444 => include_str!("../fixtures/4.4.4.4.json"),
            Tiling::Triangular333333 => include_str!("../fixtures/3.3.3.3.3.3.json"),
            Tiling::Hexagonal666 => include_str!("../fixtures/6.6.6.json"),
        }
    }
}

impl fmt::Display for Tiling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tiling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tiling::ALL
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| Error::UnknownTiling(s.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct PeriodicMapFile {
    m: usize,
    padj: Vec<Vec<[i64; 3]>>,
    name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicMap {
    name: String,
    steps: [Vec<(u32, Offset)>; 3],
}

impl PeriodicMap {
    pub fn from_steps(name: impl Into<String>, steps: [Vec<(u32, Offset)>; 3]) -> Result<Self> {
        let m = steps[0].len();
        if steps.iter().any(|s| s.len() != m) {
            return Err(Error::InvalidMap("generator tables differ in length".into()));
        }
        if let Some(&(c, _)) = steps.iter().flatten().find(|(c, _)| *c as usize >= m) {
            return Err(Error::FlagOutOfRange {
                flag: c as usize,
                size: m,
            });
        }
        Ok(PeriodicMap {
            name: name.into(),
            steps,
        })
    }

    /// One of the built-in tilings, loaded from its generated fixture.
    pub fn tiling(tiling: Tiling) -> Self {
        PeriodicMap::from_json(tiling.fixture()).expect("built-in fixture parses")
    }

    pub fn by_name(name: &str) -> Result<Self> {
        Ok(PeriodicMap::tiling(name.parse()?))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Flags per fundamental cell.
    pub fn m(&self) -> usize {
        self.steps[0].len()
    }

    pub fn raw_step(&self, cell: u32, i: u8) -> (u32, Offset) {
        self.steps[i as usize][cell as usize]
    }

    #[inline]
    pub fn step(&self, flag: PeriodicFlag, i: u8) -> PeriodicFlag {
        let (c, dt) = self.steps[i as usize][flag.cell as usize];
        PeriodicFlag {
            cell: c,
            t: add(flag.t, dt),
        }
    }

    pub fn padjacent(&self, flag: PeriodicFlag, word: &Word) -> Result<PeriodicFlag> {
        if flag.cell as usize >= self.m() {
            return Err(Error::FlagOutOfRange {
                flag: flag.cell as usize,
                size: self.m(),
            });
        }
        Ok(word.letters().iter().fold(flag, |f, &l| self.step(f, l)))
    }

    pub fn validate(&self) -> ValidationReport {
        let m = self.m() as u32;
        for c in 0..m {
            let f = PeriodicFlag::new(c, [0, 0]);
            for i in 0..3u8 {
                let g = self.step(f, i);
                if g == f {
                    return ValidationReport::Fail {
                        axiom: Axiom::FixedPointFree(i),
                        flag: c as usize,
                    };
                }
                if self.step(g, i) != f {
                    return ValidationReport::Fail {
                        axiom: Axiom::Involution(i),
                        flag: c as usize,
                    };
                }
            }
            if self.step(self.step(f, 0), 2) != self.step(self.step(f, 2), 0) {
                return ValidationReport::Fail {
                    axiom: Axiom::Commutation,
                    flag: c as usize,
                };
            }
            for i in 0..3u8 {
                for j in 0..3u8 {
                    if i != j && self.step(self.step(f, j), i) == f {
                        return ValidationReport::Fail {
                            axiom: Axiom::ProductFixedPointFree(i, j),
                            flag: c as usize,
                        };
                    }
                }
            }
        }
        if !self.is_connected() {
            return ValidationReport::Fail {
                axiom: Axiom::Connected,
                flag: 0,
            };
        }
        ValidationReport::Pass
    }

    /// Exact connectivity of the infinite flag graph: the quotient graph on
    /// cells is connected and its cycle offsets generate the whole lattice.
    pub fn is_connected(&self) -> bool {
        let (tree, cycles) = self.spanning_offsets();
        if tree.iter().any(|t| t.is_none()) {
            return false;
        }
        lattice_index(&cycles) == Some(1)
    }

    /// BFS tree offsets from cell 0, and the offset of every non-tree cycle.
    fn spanning_offsets(&self) -> (Vec<Option<Offset>>, Vec<Offset>) {
        let m = self.m();
        let mut tree: Vec<Option<Offset>> = vec![None; m];
        let mut cycles = Vec::new();
        if m == 0 {
            return (tree, cycles);
        }
        tree[0] = Some([0, 0]);
        let mut queue = VecDeque::from([0u32]);
        while let Some(c) = queue.pop_front() {
            let t = tree[c as usize].unwrap();
            for i in 0..3u8 {
                let g = self.step(PeriodicFlag::new(c, t), i);
                match tree[g.cell as usize] {
                    None => {
                        tree[g.cell as usize] = Some(g.t);
                        queue.push_back(g.cell);
                    }
                    Some(known) => {
                        let d = sub(g.t, known);
                        if d != [0, 0] {
                            cycles.push(d);
                        }
                    }
                }
            }
        }
        (tree, cycles)
    }

    /// Orbits of the generator subset on cells, ignoring lattice offsets.
    pub fn cell_partition(&self, gens: &[u8]) -> Partition {
        let m = self.m();
        let mut class_of = vec![usize::MAX; m];
        let mut next = 0;
        for start in 0..m {
            if class_of[start] != usize::MAX {
                continue;
            }
            class_of[start] = next;
            let mut stack = vec![start as u32];
            while let Some(c) = stack.pop() {
                for &i in gens {
                    let (d, _) = self.raw_step(c, i);
                    if class_of[d as usize] == usize::MAX {
                        class_of[d as usize] = next;
                        stack.push(d);
                    }
                }
            }
            next += 1;
        }
        Partition::from_class_map(class_of)
    }

    /// Length of the alternating walk `a b a b ...` from `flag` back to itself.
    fn alternating_period(&self, flag: PeriodicFlag, a: u8, b: u8) -> usize {
        let mut f = flag;
        let mut k = 0;
        loop {
            f = self.step(f, if k % 2 == 0 { a } else { b });
            k += 1;
            if f == flag && k % 2 == 0 {
                return k;
            }
        }
    }

    /// Number of edges of the face containing `(cell, 0)`.
    pub fn face_size(&self, cell: u32) -> usize {
        self.alternating_period(PeriodicFlag::new(cell, [0, 0]), 0, 1) / 2
    }

    /// Degree of the vertex of `(cell, 0)`.
    pub fn vertex_degree(&self, cell: u32) -> usize {
        self.alternating_period(PeriodicFlag::new(cell, [0, 0]), 1, 2) / 2
    }

    /// Face classes modulo translation with their sizes.
    pub fn face_classes(&self) -> Vec<(Vec<u32>, usize)> {
        self.classes_with(&[0, 1], |c| self.face_size(c))
    }

    /// Vertex classes modulo translation with their degrees.
    pub fn vertex_classes(&self) -> Vec<(Vec<u32>, usize)> {
        self.classes_with(&[1, 2], |c| self.vertex_degree(c))
    }

    fn classes_with(&self, gens: &[u8], size: impl Fn(u32) -> usize) -> Vec<(Vec<u32>, usize)> {
        self.cell_partition(gens)
            .classes()
            .into_iter()
            .map(|cls| {
                let cells: Vec<u32> = cls.into_iter().map(|c| c as u32).collect();
                let s = size(cells[0]);
                (cells, s)
            })
            .collect()
    }

    /// Vertices, edges and faces per fundamental cell.
    pub fn cell_counts(&self) -> (usize, usize, usize) {
        (
            self.cell_partition(&[1, 2]).num_classes(),
            self.cell_partition(&[0, 2]).num_classes(),
            self.cell_partition(&[0, 1]).num_classes(),
        )
    }

    /// Cyclic sequence of face sizes around the vertex of `(cell, 0)`.
    pub fn vertex_figure(&self, cell: u32) -> Vec<usize> {
        let start = PeriodicFlag::new(cell, [0, 0]);
        let mut out = Vec::new();
        let mut f = start;
        loop {
            out.push(self.face_size(f.cell));
            f = self.step(self.step(f, 1), 2);
            if f == start {
                return out;
            }
        }
    }

    /// Quotient by the sublattice `a Z x b Z`, as a finite flag system.
    pub fn torus_quotient(&self, a: usize, b: usize) -> Result<FlagSystem> {
        if a == 0 || b == 0 {
            return Err(Error::InvalidParameter("torus dimensions must be positive".into()));
        }
        let m = self.m();
        let n = m * a * b;
        let index = |c: u32, t: Offset| -> u32 {
            let x = t[0].rem_euclid(a as i32) as usize;
            let y = t[1].rem_euclid(b as i32) as usize;
            (c as usize + m * (x + a * y)) as u32
        };
        let mut adj = [vec![0u32; n], vec![0u32; n], vec![0u32; n]];
        for y in 0..b {
            for x in 0..a {
                for c in 0..m as u32 {
                    let f = PeriodicFlag::new(c, [x as i32, y as i32]);
                    let idx = index(c, f.t) as usize;
                    for i in 0..3u8 {
                        let g = self.step(f, i);
                        adj[i as usize][idx] = index(g.cell, g.t);
                    }
                }
            }
        }
        FlagSystem::from_adjacency(adj)
    }

    /// Shortest word taking `src` to `dst`, searching at most `max_nodes` flags.
    pub fn word_between(
        &self,
        src: PeriodicFlag,
        dst: PeriodicFlag,
        max_nodes: usize,
    ) -> Option<Word> {
        let mut parent: HashMap<PeriodicFlag, (PeriodicFlag, u8)> = HashMap::new();
        let mut queue = VecDeque::from([src]);
        let mut seen = std::collections::HashSet::from([src]);
        while let Some(f) = queue.pop_front() {
            if f == dst {
                let mut letters = Vec::new();
                let mut cur = f;
                while cur != src {
                    let (p, l) = parent[&cur];
                    letters.push(l);
                    cur = p;
                }
                letters.reverse();
                return Word::from_letters(letters).ok();
            }
            if seen.len() > max_nodes {
                return None;
            }
            for i in 0..3u8 {
                let g = self.step(f, i);
                if seen.insert(g) {
                    parent.insert(g, (f, i));
                    queue.push_back(g);
                }
            }
        }
        None
    }

    /// The unique automorphism mapping `src` to `dst`, if there is one.
    pub fn automorphism_from(&self, src: PeriodicFlag, dst: PeriodicFlag) -> Option<Automorphism> {
        let m = self.m();
        if src.cell as usize >= m || dst.cell as usize >= m {
            return None;
        }
        // Walk the same generators from src and dst over a spanning tree of cells.
        let mut tau: Vec<Option<Offset>> = vec![None; m];
        let mut img: Vec<Option<PeriodicFlag>> = vec![None; m];
        let mut used = vec![false; m];
        tau[src.cell as usize] = Some(src.t);
        img[src.cell as usize] = Some(dst);
        used[dst.cell as usize] = true;
        let mut constraints: Vec<(Offset, Offset)> = Vec::new();
        let mut queue = VecDeque::from([src.cell]);
        while let Some(c) = queue.pop_front() {
            let here = PeriodicFlag::new(c, tau[c as usize].unwrap());
            let there = img[c as usize].unwrap();
            for i in 0..3u8 {
                let g = self.step(here, i);
                let h = self.step(there, i);
                match (tau[g.cell as usize], img[g.cell as usize]) {
                    (None, _) => {
                        if used[h.cell as usize] {
                            return None;
                        }
                        used[h.cell as usize] = true;
                        tau[g.cell as usize] = Some(g.t);
                        img[g.cell as usize] = Some(h);
                        queue.push_back(g.cell);
                    }
                    (Some(known_t), Some(known_img)) => {
                        if h.cell != known_img.cell {
                            return None;
                        }
                        constraints.push((sub(g.t, known_t), sub(h.t, known_img.t)));
                    }
                    (Some(_), None) => unreachable!(),
                }
            }
        }
        if tau.iter().any(|t| t.is_none()) {
            return None;
        }
        let matrix = solve_linear_part(&constraints)?;
        let perm: Vec<u32> = img.iter().map(|f| f.unwrap().cell).collect();
        let offsets: Vec<Offset> = (0..m)
            .map(|c| sub(img[c].unwrap().t, mat_vec(&matrix, tau[c].unwrap())))
            .collect();
        Some(Automorphism {
            base: src,
            image: dst,
            perm,
            offsets,
            matrix,
        })
    }

    pub fn identity_automorphism(&self) -> Automorphism {
        let f = PeriodicFlag::new(0, [0, 0]);
        self.automorphism_from(f, f).expect("identity is an automorphism")
    }

    pub fn translation(&self, v: Offset) -> Automorphism {
        let f = PeriodicFlag::new(0, [0, 0]);
        self.automorphism_from(f, f.translated(v))
            .expect("lattice translations are automorphisms")
    }

    /// Partition of the cells into Aut-orbits with canonical representatives.
    pub fn aut_orbits(&self) -> AutOrbits {
        let m = self.m();
        let mut class_of = vec![usize::MAX; m];
        let mut reps = Vec::new();
        let mut to_cell: Vec<Option<Automorphism>> = vec![None; m];
        for c in 0..m as u32 {
            if class_of[c as usize] != usize::MAX {
                continue;
            }
            let orbit = reps.len();
            reps.push(c);
            let rep = PeriodicFlag::new(c, [0, 0]);
            for d in c..m as u32 {
                if class_of[d as usize] != usize::MAX {
                    continue;
                }
                if let Some(a) = self.automorphism_from(rep, PeriodicFlag::new(d, [0, 0])) {
                    class_of[d as usize] = orbit;
                    to_cell[d as usize] = Some(a);
                }
            }
        }
        AutOrbits {
            partition: Partition::from_class_map(class_of),
            reps,
            to_cell: to_cell.into_iter().map(|a| a.unwrap()).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let padj = self
            .steps
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&(c, t)| [c as i64, t[0] as i64, t[1] as i64])
                    .collect()
            })
            .collect();
        let file = PeriodicMapFile {
            m: self.m(),
            padj,
            name: self.name.clone(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PeriodicMapFile = serde_json::from_str(text)?;
        if file.padj.len() != 3 {
            return Err(Error::InvalidMap("padj must list three generators".into()));
        }
        let mut steps: [Vec<(u32, Offset)>; 3] = Default::default();
        for (i, table) in file.padj.iter().enumerate() {
            if table.len() != file.m {
                return Err(Error::InvalidMap(format!(
                    "generator {} lists {} cells, expected {}",
                    i,
                    table.len(),
                    file.m
                )));
            }
            for &[c, dx, dy] in table {
                let conv = |x: i64| {
                    i32::try_from(x).map_err(|_| Error::InvalidMap("offset out of range".into()))
                };
                let c = u32::try_from(c).map_err(|_| Error::InvalidMap("negative cell".into()))?;
                steps[i].push((c, [conv(dx)?, conv(dy)?]));
            }
        }
        PeriodicMap::from_steps(file.name, steps)
    }

    /// Lowest common multiple of the face sizes and of the vertex degrees.
    pub fn pq_type(&self) -> (usize, usize) {
        let p = self
            .face_classes()
            .iter()
            .fold(1, |acc, (_, s)| acc.lcm(s));
        let q = self
            .vertex_classes()
            .iter()
            .fold(1, |acc, (_, s)| acc.lcm(s));
        (p, q)
    }
}

fn mat_vec(m: &[[i32; 2]; 2], v: Offset) -> Offset {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

fn det(a: Offset, b: Offset) -> i64 {
    a[0] as i64 * b[1] as i64 - a[1] as i64 * b[0] as i64
}

/// Index of the sublattice generated by `vectors` in Z^2 (`None` if rank < 2).
fn lattice_index(vectors: &[Offset]) -> Option<i64> {
    let mut g = 0i64;
    for (i, &a) in vectors.iter().enumerate() {
        for &b in &vectors[i + 1..] {
            g = g.gcd(&det(a, b));
            if g == 1 {
                return Some(1);
            }
        }
    }
    (g != 0).then_some(g)
}

/// Finds the unimodular integer matrix `M` with `M d = e` for all pairs.
fn solve_linear_part(pairs: &[(Offset, Offset)]) -> Option<[[i32; 2]; 2]> {
    let (d1, e1, d2, e2) = pairs.iter().enumerate().find_map(|(i, &(d1, e1))| {
        pairs[i + 1..]
            .iter()
            .find(|(d2, _)| det(d1, *d2) != 0)
            .map(|&(d2, e2)| (d1, e1, d2, e2))
    })?;
    // M [d1 d2] = [e1 e2]  =>  M = [e1 e2] adj([d1 d2]) / det
    let dt = det(d1, d2);
    let adj = [[d2[1] as i64, -(d2[0] as i64)], [-(d1[1] as i64), d1[0] as i64]];
    let e = [[e1[0] as i64, e2[0] as i64], [e1[1] as i64, e2[1] as i64]];
    let mut m = [[0i32; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let num = e[r][0] * adj[0][c] + e[r][1] * adj[1][c];
            if num % dt != 0 {
                return None;
            }
            m[r][c] = i32::try_from(num / dt).ok()?;
        }
    }
    let dm = m[0][0] as i64 * m[1][1] as i64 - m[0][1] as i64 * m[1][0] as i64;
    if dm.abs() != 1 {
        return None;
    }
    pairs
        .iter()
        .all(|&(d, e)| mat_vec(&m, d) == e)
        .then_some(m)
}

/// A map automorphism, fixed by the image of one flag.
#[derive(Clone, Debug)]
pub struct Automorphism {
    base: PeriodicFlag,
    image: PeriodicFlag,
    perm: Vec<u32>,
    offsets: Vec<Offset>,
    matrix: [[i32; 2]; 2],
}

impl PartialEq for Automorphism {
    fn eq(&self, other: &Self) -> bool {
        self.apply(other.base) == other.image && self.perm.len() == other.perm.len()
    }
}

impl Eq for Automorphism {}

impl Automorphism {
    pub fn base(&self) -> PeriodicFlag {
        self.base
    }

    pub fn image(&self) -> PeriodicFlag {
        self.image
    }

    /// Linear part acting on lattice vectors.
    pub fn linear_part(&self) -> [[i32; 2]; 2] {
        self.matrix
    }

    #[inline]
    pub fn apply(&self, f: PeriodicFlag) -> PeriodicFlag {
        let c = f.cell as usize;
        PeriodicFlag {
            cell: self.perm[c],
            t: add(mat_vec(&self.matrix, f.t), self.offsets[c]),
        }
    }

    /// `self` after `other`: `x -> self(other(x))`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        let m = self.perm.len();
        let perm = (0..m).map(|c| self.perm[other.perm[c] as usize]).collect();
        let offsets = (0..m)
            .map(|c| {
                add(
                    mat_vec(&self.matrix, other.offsets[c]),
                    self.offsets[other.perm[c] as usize],
                )
            })
            .collect();
        let a = &self.matrix;
        let b = &other.matrix;
        let matrix = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        Automorphism {
            base: other.base,
            image: self.apply(other.image),
            perm,
            offsets,
            matrix,
        }
    }

    pub fn inverse(&self) -> Automorphism {
        let m = self.perm.len();
        let a = &self.matrix;
        let d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let inv = [[a[1][1] * d, -a[0][1] * d], [-a[1][0] * d, a[0][0] * d]];
        let mut perm = vec![0u32; m];
        let mut offsets = vec![[0, 0]; m];
        for c in 0..m {
            let pc = self.perm[c] as usize;
            perm[pc] = c as u32;
            let o = mat_vec(&inv, self.offsets[c]);
            offsets[pc] = [-o[0], -o[1]];
        }
        let mut out = Automorphism {
            base: self.image,
            image: self.base,
            perm,
            offsets,
            matrix: inv,
        };
        out.image = out.apply(out.base);
        out
    }

    /// True iff this is a lattice translation (including the identity).
    pub fn is_translation(&self) -> bool {
        self.matrix == [[1, 0], [0, 1]]
            && self.perm.iter().enumerate().all(|(c, &p)| p as usize == c)
            && self.offsets.windows(2).all(|w| w[0] == w[1])
    }

    /// The translation vector, if this is a translation.
    pub fn translation_vector(&self) -> Option<Offset> {
        self.is_translation().then(|| self.offsets[0])
    }
}

/// Aut-orbits of flags, given on cells (the lattice is already quotiented).
#[derive(Clone, Debug)]
pub struct AutOrbits {
    partition: Partition,
    reps: Vec<u32>,
    to_cell: Vec<Automorphism>,
}

impl AutOrbits {
    pub fn k(&self) -> usize {
        self.reps.len()
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn orbit_of(&self, cell: u32) -> usize {
        self.partition.class_of(cell as usize)
    }

    /// Canonical representative cell per orbit (lowest index, offset zero).
    pub fn rep_cells(&self) -> &[u32] {
        &self.reps
    }

    pub fn rep(&self, orbit: usize) -> PeriodicFlag {
        PeriodicFlag::new(self.reps[orbit], [0, 0])
    }

    /// The automorphism taking the representative of `cell`'s orbit to `(cell, 0)`.
    pub fn to_cell(&self, cell: u32) -> &Automorphism {
        &self.to_cell[cell as usize]
    }

    /// Applies the automorphism sending `rep(orbit(target.cell))` to `target`.
    #[inline]
    pub fn transport(&self, target: PeriodicFlag, f: PeriodicFlag) -> PeriodicFlag {
        self.to_cell[target.cell as usize].apply(f).translated(target.t)
    }
}
