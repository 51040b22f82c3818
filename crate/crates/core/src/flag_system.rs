//! Finite flag systems: a set of flags with three fixed-point-free involutions.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::Word;

/// Which rank a label or orbit refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlagLabel {
    pub vertex: usize,
    pub edge: usize,
    pub face: usize,
}

/// A closed map given by its flags and the three adjacency involutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagSystem {
    adj: [Vec<u32>; 3],
    labels: Option<Vec<FlagLabel>>,
}

/// The axiom families checked by [`FlagSystem::validate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    /// `adj[i]` is a permutation of the flag set.
    Permutation(u8),
    Involution(u8),
    FixedPointFree(u8),
    /// `r0 r2 = r2 r0`.
    Commutation,
    /// `adj[i][adj[j][f]] != f` for distinct `i`, `j`.
    ProductFixedPointFree(u8, u8),
    Connected,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Permutation(i) => write!(f, "r{} not a permutation", i),
            Axiom::Involution(i) => write!(f, "r{} not an involution", i),
            Axiom::FixedPointFree(i) => write!(f, "r{} not fixed-point-free", i),
            Axiom::Commutation => write!(f, "r0r2 \u{2260} r2r0"),
            Axiom::ProductFixedPointFree(i, j) => write!(f, "r{}r{} has a fixed point", i, j),
            Axiom::Connected => write!(f, "flag graph not connected"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationReport {
    Pass,
    Fail { axiom: Axiom, flag: usize },
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        matches!(self, ValidationReport::Pass)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationReport::Pass => write!(f, "pass"),
            ValidationReport::Fail { axiom, flag } => {
                write!(f, "fail: {} (witness flag {})", axiom, flag)
            }
        }
    }
}

/// A partition of `0..n` into classes numbered by first occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<usize>,
    num_classes: usize,
}

impl Partition {
    pub fn from_class_map(class_of: Vec<usize>) -> Self {
        let mut renumber = HashMap::new();
        let class_of: Vec<usize> = class_of
            .into_iter()
            .map(|c| {
                let next = renumber.len();
                *renumber.entry(c).or_insert(next)
            })
            .collect();
        Partition {
            num_classes: renumber.len(),
            class_of,
        }
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes];
        for (x, &c) in self.class_of.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.num_classes];
        for &c in &self.class_of {
            out[c] += 1;
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct FlagSystemFile {
    n: usize,
    adj0: Vec<u32>,
    adj1: Vec<u32>,
    adj2: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<FlagLabel>>,
}

impl FlagSystem {
    /// Builds a flag system without checking the map axioms. Arrays must have
    /// equal length and entries in range.
    pub fn from_adjacency(adj: [Vec<u32>; 3]) -> Result<Self> {
        let n = adj[0].len();
        if adj.iter().any(|a| a.len() != n) {
            return Err(Error::InvalidMap("adjacency arrays differ in length".into()));
        }
        if let Some(&bad) = adj.iter().flatten().find(|&&x| x as usize >= n) {
            return Err(Error::FlagOutOfRange {
                flag: bad as usize,
                size: n,
            });
        }
        Ok(FlagSystem { adj, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<FlagLabel>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::InvalidMap("label count differs from flag count".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.adj[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> Option<&[FlagLabel]> {
        self.labels.as_deref()
    }

    /// The `i`-adjacent flag.
    #[inline]
    pub fn step(&self, flag: usize, i: u8) -> usize {
        self.adj[i as usize][flag] as usize
    }

    pub fn generator(&self, i: u8) -> &[u32] {
        &self.adj[i as usize]
    }

    pub fn adjacent(&self, flag: usize, word: &Word) -> Result<usize> {
        if flag >= self.len() {
            return Err(Error::FlagOutOfRange {
                flag,
                size: self.len(),
            });
        }
        Ok(word.letters().iter().fold(flag, |f, &l| self.step(f, l)))
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.len();
        for i in 0..3u8 {
            let a = &self.adj[i as usize];
            let mut seen = vec![false; n];
            for (f, &g) in a.iter().enumerate() {
                if g as usize >= n || seen[g as usize] {
                    return ValidationReport::Fail {
                        axiom: Axiom::Permutation(i),
                        flag: f,
                    };
                }
                seen[g as usize] = true;
            }
            for f in 0..n {
                if a[f] as usize == f {
                    return ValidationReport::Fail {
                        axiom: Axiom::FixedPointFree(i),
                        flag: f,
                    };
                }
                if a[a[f] as usize] as usize != f {
                    return ValidationReport::Fail {
                        axiom: Axiom::Involution(i),
                        flag: f,
                    };
                }
            }
        }
        for f in 0..n {
            if self.step(self.step(f, 2), 0) != self.step(self.step(f, 0), 2) {
                return ValidationReport::Fail {
                    axiom: Axiom::Commutation,
                    flag: f,
                };
            }
        }
        for i in 0..3u8 {
            for j in 0..3u8 {
                if i == j {
                    continue;
                }
                for f in 0..n {
                    if self.step(self.step(f, j), i) == f {
                        return ValidationReport::Fail {
                            axiom: Axiom::ProductFixedPointFree(i, j),
                            flag: f,
                        };
                    }
                }
            }
        }
        if n > 0 {
            let orbit = self.cell_orbits(&[0, 1, 2]);
            if orbit.num_classes() != 1 {
                let witness = (0..n).find(|&f| orbit.class_of(f) != 0).unwrap();
                return ValidationReport::Fail {
                    axiom: Axiom::Connected,
                    flag: witness,
                };
            }
        }
        ValidationReport::Pass
    }

    /// Orbits of the subgroup generated by `gens`. With `{0,1}` these are the
    /// faces, `{1,2}` the vertices and `{0,2}` the edges.
    pub fn cell_orbits(&self, gens: &[u8]) -> Partition {
        let n = self.len();
        let mut class_of = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if class_of[start] != usize::MAX {
                continue;
            }
            class_of[start] = next;
            queue.push_back(start);
            while let Some(f) = queue.pop_front() {
                for &g in gens {
                    let h = self.step(f, g);
                    if class_of[h] == usize::MAX {
                        class_of[h] = next;
                        queue.push_back(h);
                    }
                }
            }
            next += 1;
        }
        Partition {
            class_of,
            num_classes: next,
        }
    }

    /// `(V, E, F)` counted as orbits.
    pub fn cell_counts(&self) -> (usize, usize, usize) {
        (
            self.cell_orbits(&[1, 2]).num_classes(),
            self.cell_orbits(&[0, 2]).num_classes(),
            self.cell_orbits(&[0, 1]).num_classes(),
        )
    }

    pub fn euler_characteristic(&self) -> i64 {
        let (v, e, f) = self.cell_counts();
        v as i64 - e as i64 + f as i64
    }

    /// True iff the flag graph is bipartite.
    pub fn is_orientable(&self) -> bool {
        let n = self.len();
        let mut color = vec![u8::MAX; n];
        let mut queue = VecDeque::new();
        for start in 0..n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            queue.push_back(start);
            while let Some(f) = queue.pop_front() {
                for i in 0..3 {
                    let g = self.step(f, i);
                    if color[g] == u8::MAX {
                        color[g] = color[f] ^ 1;
                        queue.push_back(g);
                    } else if color[g] == color[f] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Genus of a closed orientable system, `None` if non-orientable.
    pub fn genus(&self) -> Option<i64> {
        self.is_orientable()
            .then(|| 1 - self.euler_characteristic() / 2)
    }

    /// Conjugates by a flag permutation: flag `f` becomes `perm[f]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<FlagSystem> {
        let n = self.len();
        if perm.len() != n {
            return Err(Error::InvalidParameter("permutation length".into()));
        }
        let mut adj = [vec![0u32; n], vec![0u32; n], vec![0u32; n]];
        for i in 0..3 {
            for f in 0..n {
                adj[i][perm[f]] = perm[self.adj[i][f] as usize] as u32;
            }
        }
        let labels = self.labels.as_ref().map(|ls| {
            let mut out = ls.clone();
            for f in 0..n {
                out[perm[f]] = ls[f];
            }
            out
        });
        Ok(FlagSystem { adj, labels })
    }

    /// The adjacency-preserving bijection sending `from` to `to` in `other`,
    /// if one exists. Both systems must be connected.
    pub fn transport(&self, from: usize, other: &FlagSystem, to: usize) -> Option<Vec<u32>> {
        let n = self.len();
        if n != other.len() {
            return None;
        }
        let mut image = vec![u32::MAX; n];
        let mut used = vec![false; n];
        image[from] = to as u32;
        used[to] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(f) = queue.pop_front() {
            let g = image[f] as usize;
            for i in 0..3 {
                let fi = self.step(f, i);
                let gi = other.step(g, i);
                if image[fi] == u32::MAX {
                    if used[gi] {
                        return None;
                    }
                    image[fi] = gi as u32;
                    used[gi] = true;
                    queue.push_back(fi);
                } else if image[fi] as usize != gi {
                    return None;
                }
            }
        }
        image.iter().all(|&x| x != u32::MAX).then_some(image)
    }

    /// Isomorphism of connected flag systems: try every target for flag 0.
    pub fn is_isomorphic(&self, other: &FlagSystem) -> bool {
        if self.len() != other.len() {
            return false;
        }
        if self.is_empty() {
            return true;
        }
        (0..other.len()).any(|t| self.transport(0, other, t).is_some())
    }

    /// True iff the automorphism group is transitive on flags.
    pub fn is_regular(&self) -> bool {
        (0..self.len()).all(|t| self.transport(0, self, t).is_some())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = FlagSystemFile {
            n: self.len(),
            adj0: self.adj[0].clone(),
            adj1: self.adj[1].clone(),
            adj2: self.adj[2].clone(),
            labels: self.labels.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FlagSystemFile = serde_json::from_str(text)?;
        if file.adj0.len() != file.n {
            return Err(Error::InvalidMap(format!(
                "n = {} but adj0 has {} entries",
                file.n,
                file.adj0.len()
            )));
        }
        let fs = FlagSystem::from_adjacency([file.adj0, file.adj1, file.adj2])?;
        match file.labels {
            Some(l) => fs.with_labels(l),
            None => Ok(fs),
        }
    }

    /// Graphviz rendering of the flag graph, one edge per adjacent pair.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph flags {\n");
        for i in 0..3u8 {
            for f in 0..self.len() {
                let g = self.step(f, i);
                if f < g {
                    let _ = writeln!(out, "  {} -- {} [label=\"{}\"];", f, g, i);
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// Builds the flag system of a polygonal surface given as vertex cycles.
    /// Every edge (unordered vertex pair) must lie on exactly two faces.
    pub fn from_polygons(faces: &[Vec<usize>]) -> Result<Self> {
        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edge_faces: Vec<Vec<usize>> = Vec::new();
        for (fi, face) in faces.iter().enumerate() {
            if face.len() < 3 {
                return Err(Error::InvalidMap(format!("face {} has fewer than 3 sides", fi)));
            }
            for k in 0..face.len() {
                let (a, b) = (face[k], face[(k + 1) % face.len()]);
                if a == b {
                    return Err(Error::InvalidMap(format!("loop at vertex {}", a)));
                }
                let key = (a.min(b), a.max(b));
                let next = edge_ids.len();
                let e = *edge_ids.entry(key).or_insert(next);
                if e == edge_faces.len() {
                    edge_faces.push(Vec::new());
                }
                edge_faces[e].push(fi);
            }
        }
        if let Some((e, fs)) = edge_faces.iter().enumerate().find(|(_, fs)| fs.len() != 2) {
            return Err(Error::InvalidMap(format!(
                "edge {} lies on {} faces",
                e,
                fs.len()
            )));
        }
        // Flags are (vertex, edge, face) triples; the two per (edge, face)
        // side are numbered consecutively.
        let mut labels = Vec::new();
        let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
        let mut ends = vec![(0usize, 0usize); edge_faces.len()];
        for &(a, b) in edge_ids.keys() {
            ends[edge_ids[&(a, b)]] = (a, b);
        }
        for (fi, face) in faces.iter().enumerate() {
            for k in 0..face.len() {
                let (a, b) = (face[k], face[(k + 1) % face.len()]);
                let e = edge_ids[&(a.min(b), a.max(b))];
                for v in [a, b] {
                    index.insert((v, e, fi), labels.len());
                    labels.push(FlagLabel {
                        vertex: v,
                        edge: e,
                        face: fi,
                    });
                }
            }
        }
        let n = labels.len();
        let mut adj = [vec![0u32; n], vec![0u32; n], vec![0u32; n]];
        for (f, l) in labels.iter().enumerate() {
            let (a, b) = ends[l.edge];
            let other_end = if l.vertex == a { b } else { a };
            adj[0][f] = index[&(other_end, l.edge, l.face)] as u32;

            let face = &faces[l.face];
            let pos = face.iter().position(|&v| v == l.vertex).unwrap();
            let prev = face[(pos + face.len() - 1) % face.len()];
            let next = face[(pos + 1) % face.len()];
            let e_prev = edge_ids[&(prev.min(l.vertex), prev.max(l.vertex))];
            let e_next = edge_ids[&(next.min(l.vertex), next.max(l.vertex))];
            let other_edge = if l.edge == e_prev { e_next } else { e_prev };
            adj[1][f] = index[&(l.vertex, other_edge, l.face)] as u32;

            let fs = &edge_faces[l.edge];
            let other_face = if fs[0] == l.face { fs[1] } else { fs[0] };
            adj[2][f] = index[&(l.vertex, l.edge, other_face)] as u32;
        }
        FlagSystem::from_adjacency(adj)?.with_labels(labels)
    }

    /// The cube: 8 vertices, 12 edges, 6 square faces, 48 flags.
    pub fn cube() -> Self {
        // vertex id = x + 2y + 4z
        let faces = vec![
            vec![0, 1, 3, 2],
            vec![4, 6, 7, 5],
            vec![0, 4, 5, 1],
            vec![2, 3, 7, 6],
            vec![0, 2, 6, 4],
            vec![1, 5, 7, 3],
        ];
        FlagSystem::from_polygons(&faces).expect("cube faces are a valid surface")
    }

    /// The triangular prism: two triangles and three squares, 36 flags.
    pub fn triangular_prism() -> Self {
        let faces = vec![
            vec![0, 1, 2],
            vec![3, 5, 4],
            vec![0, 3, 4, 1],
            vec![1, 4, 5, 2],
            vec![2, 5, 3, 0],
        ];
        FlagSystem::from_polygons(&faces).expect("prism faces are a valid surface")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn cube_is_valid_sphere() {
        let cube = FlagSystem::cube();
        assert_eq!(cube.len(), 48);
        assert_eq!(cube.validate(), ValidationReport::Pass);
        assert_eq!(cube.euler_characteristic(), 2);
        assert!(cube.is_orientable());
        assert_eq!(cube.genus(), Some(0));
        assert!(cube.is_regular());
    }

    #[test]
    fn cube_orbits() {
        let cube = FlagSystem::cube();
        let faces = cube.cell_orbits(&[0, 1]);
        assert_eq!(faces.num_classes(), 6);
        assert!(faces.sizes().iter().all(|&s| s == 8));
        let edges = cube.cell_orbits(&[0, 2]);
        assert_eq!(edges.num_classes(), 12);
        assert!(edges.sizes().iter().all(|&s| s == 4));
        let verts = cube.cell_orbits(&[1, 2]);
        assert_eq!(verts.num_classes(), 8);
        assert!(verts.sizes().iter().all(|&s| s == 6));
    }

    #[test]
    fn adjacency_words() {
        let cube = FlagSystem::cube();
        for f in 0..cube.len() {
            assert_eq!(cube.adjacent(f, &word("00")).unwrap(), f);
            assert_eq!(
                cube.adjacent(f, &word("02")).unwrap(),
                cube.adjacent(f, &word("20")).unwrap()
            );
        }
        // "01" walks around a square face: period 4 in letters pairs, 8 flags.
        let mut f = 0;
        let mut seen = vec![f];
        for k in 0.. {
            f = cube.step(f, (k % 2) as u8);
            if f == 0 {
                break;
            }
            seen.push(f);
        }
        assert_eq!(seen.len(), 8);
        assert!(cube.adjacent(99, &word("0")).is_err());
    }

    #[test]
    fn detects_fixed_point() {
        let cube = FlagSystem::cube();
        let mut adj = [
            cube.generator(0).to_vec(),
            cube.generator(1).to_vec(),
            cube.generator(2).to_vec(),
        ];
        let partner = adj[0][5] as usize;
        adj[0][5] = 5;
        adj[0][partner] = partner as u32;
        let bad = FlagSystem::from_adjacency(adj).unwrap();
        match bad.validate() {
            ValidationReport::Fail { axiom, .. } => {
                assert_eq!(axiom, Axiom::FixedPointFree(0));
                assert_eq!(axiom.to_string(), "r0 not fixed-point-free");
            }
            ValidationReport::Pass => panic!("expected failure"),
        }
    }

    #[test]
    fn detects_non_commuting() {
        let cube = FlagSystem::cube();
        let mut adj = [
            cube.generator(0).to_vec(),
            cube.generator(1).to_vec(),
            cube.generator(2).to_vec(),
        ];
        // Re-pair four flags under r0 so that r0 and r2 stop commuting.
        let a = 0usize;
        let b = adj[0][a] as usize;
        let c = (0..48)
            .find(|&x| x != a && x != b && x != adj[2][a] as usize && x != adj[2][b] as usize)
            .unwrap();
        let d = adj[0][c] as usize;
        adj[0][a] = c as u32;
        adj[0][c] = a as u32;
        adj[0][b] = d as u32;
        adj[0][d] = b as u32;
        let bad = FlagSystem::from_adjacency(adj).unwrap();
        match bad.validate() {
            ValidationReport::Fail { axiom, .. } => {
                assert_eq!(axiom, Axiom::Commutation);
                assert_eq!(axiom.to_string(), "r0r2 \u{2260} r2r0");
            }
            ValidationReport::Pass => panic!("expected failure"),
        }
    }

    #[test]
    fn prism_counts() {
        let p = FlagSystem::triangular_prism();
        assert_eq!(p.len(), 36);
        assert!(p.validate().is_pass());
        assert_eq!(p.cell_counts(), (6, 9, 5));
        assert!(!p.is_regular());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let cube = FlagSystem::cube();
        let text = cube.to_json().unwrap();
        assert_eq!(FlagSystem::from_json(&text).unwrap(), cube);
        assert!(FlagSystem::from_json(r#"{"n":2,"adj0":[1,0],"adj1":[1],"adj2":[1,0]}"#).is_err());
        assert!(FlagSystem::from_json(r#"{"n":2,"adj0":[1,5],"adj1":[1,0],"adj2":[1,0]}"#).is_err());
    }

    #[test]
    fn polygon_builder_rejects_open_surfaces() {
        assert!(FlagSystem::from_polygons(&[vec![0, 1, 2]]).is_err());
        assert!(FlagSystem::from_polygons(&[vec![0, 1]]).is_err());
    }

    #[test]
    fn dot_has_one_line_per_edge() {
        let cube = FlagSystem::cube();
        let dot = cube.to_dot();
        assert_eq!(dot.lines().filter(|l| l.contains("--")).count(), 72);
    }
}
