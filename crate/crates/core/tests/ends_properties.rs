//! Graph generators and the ends probe against independent constructions.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

use lochness_core::ends::{
    ball, cover_dual_graph, ends_probe, flag_graph_of_periodic, hyperbolic_flag_graph, one_end_certificate,
    CoxeterFlagGraph, GraphGen, Grid2, HexCayleyH, LineGraph, Tree,
};
use lochness_core::monodromy::Monodromy;
use lochness_core::periodic_map::{PeriodicMap, Tiling};

fn sphere_sizes<G: GraphGen>(g: &G, r: u32) -> Vec<usize> {
    ball(g, r, 10_000_000).unwrap().sphere_sizes()
}

fn assert_symmetric<G: GraphGen>(g: &G, r: u32, degree: usize) {
    let b = ball(g, r, 10_000_000).unwrap();
    for (x, &d) in &b.nodes {
        if d == r {
            continue;
        }
        let nbrs = g.neighbors(x);
        assert_eq!(nbrs.len(), degree, "{:?}", x);
        assert_eq!(nbrs.iter().collect::<HashSet<_>>().len(), degree, "{:?}", x);
        for y in &nbrs {
            assert!(g.neighbors(y).contains(x));
        }
    }
}

#[test]
fn tree_balls_by_counting() {
    for d in 3u8..=5 {
        let tree = Tree::new(d).unwrap();
        let sizes = sphere_sizes(&tree, 4);
        let d = d as usize;
        let expected: Vec<usize> = (0..=4u32).map(|r| if r == 0 { 1 } else { d * (d - 1).pow(r - 1) }).collect();
        assert_eq!(sizes, expected);
        assert_symmetric(&tree, 4, d);
        // Each node at distance r + 1 roots its own branch.
        let p = ends_probe(&tree, 2, 5, 1_000_000).unwrap();
        assert_eq!(p.components, d * (d - 1) * (d - 1));
    }
}

#[test]
fn lattice_sizes() {
    assert_eq!(sphere_sizes(&LineGraph, 5), vec![1, 2, 2, 2, 2, 2]);
    assert_eq!(sphere_sizes(&Grid2, 5), vec![1, 4, 8, 12, 16, 20]);
    assert_symmetric(&Grid2, 4, 4);
    assert_symmetric(&HexCayleyH, 6, 3);
    // Hexagonal lattice spheres grow by 3 per step.
    assert_eq!(sphere_sizes(&HexCayleyH, 5), vec![1, 3, 6, 9, 12, 15]);
}

#[test]
fn flag_graphs_are_cubic_and_symmetric() {
    for t in Tiling::ALL {
        assert_symmetric(&flag_graph_of_periodic(&PeriodicMap::tiling(t)), 8, 3);
    }
}

#[test]
fn euclidean_coxeter_graphs_match_regular_tilings() {
    for (p, q, t) in [
        (4, 4, Tiling::Square4444),
        (3, 6, Tiling::Triangular333333),
        (6, 3, Tiling::Hexagonal666),
    ] {
        let cox = CoxeterFlagGraph::build(p, q, 14);
        let flags = sphere_sizes(&flag_graph_of_periodic(&PeriodicMap::tiling(t)), 14);
        assert_eq!(cox.layer_sizes(), flags, "[{},{}]", p, q);
    }
}

#[test]
fn cover_dual_faces_have_p_neighbours() {
    for t in [Tiling::Trihexagonal3636, Tiling::TruncatedSquare488, Tiling::Square4444] {
        let pm = PeriodicMap::tiling(t);
        let mon = Monodromy::new(&pm);
        let (p, _) = pm.pq_type();
        assert_symmetric(&cover_dual_graph(&mon), 3, p);
    }
}

/// Reflection group of the hyperbolic triangle with angles `pi/p`, `pi/q`,
/// `pi/2`, in the basis of simple roots. Elements are told apart by the image
/// of a generic vector.
struct Reflections {
    gens: [[[f64; 3]; 3]; 3],
}

impl Reflections {
    fn new(p: u32, q: u32) -> Self {
        let m = |i: usize, j: usize| match (i.min(j), i.max(j)) {
            (0, 1) => p as f64,
            (1, 2) => q as f64,
            _ => 2.0,
        };
        let gram = |i: usize, j: usize| if i == j { 1.0 } else { -(PI / m(i, j)).cos() };
        // s_i(e_j) = e_j - 2 B(e_i, e_j) e_i, stored by columns.
        let entry = |i: usize, k: usize, j: usize| {
            let id = if k == j { 1.0 } else { 0.0 };
            id - if k == i { 2.0 * gram(i, j) } else { 0.0 }
        };
        let gens = [0, 1, 2].map(|i| [0, 1, 2].map(|k| [0, 1, 2].map(|j| entry(i, k, j))));
        Reflections { gens }
    }

    fn apply(&self, i: usize, v: [f64; 3]) -> [f64; 3] {
        let g = &self.gens[i];
        [0, 1, 2].map(|k| g[k][0] * v[0] + g[k][1] * v[1] + g[k][2] * v[2])
    }
}

fn key(v: [f64; 3]) -> [i64; 3] {
    v.map(|x| (x * 1e6).round() as i64)
}

/// Breadth-first orbit of a generic vector; returns layer of each node and
/// its three neighbours (right multiplication by generators).
fn reflection_graph(p: u32, q: u32, layers: u32) -> (Vec<u32>, Vec<[usize; 3]>) {
    let refl = Reflections::new(p, q);
    let v0 = [0.3, 0.17, 0.05];
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    let mut layer = vec![0u32];
    let mut index: HashMap<[i64; 3], usize> = HashMap::from([(key(v0), 0)]);
    let image = |w: &[usize]| w.iter().rev().fold(v0, |v, &i| refl.apply(i, v));
    let mut nbr: Vec<[usize; 3]> = Vec::new();
    let mut x = 0;
    while x < words.len() {
        let mut row = [usize::MAX; 3];
        for (i, slot) in row.iter_mut().enumerate() {
            let mut w = words[x].clone();
            w.push(i);
            let k = key(image(&w));
            if let Some(&y) = index.get(&k) {
                *slot = y;
            } else if layer[x] < layers {
                index.insert(k, words.len());
                *slot = words.len();
                layer.push(layer[x] + 1);
                words.push(w);
            }
        }
        nbr.push(row);
        x += 1;
    }
    (layer, nbr)
}

struct Explicit(Vec<[usize; 3]>);

impl GraphGen for Explicit {
    type Node = usize;

    fn root(&self) -> usize {
        0
    }

    fn labeled_neighbors(&self, &x: &usize) -> Vec<(u8, usize)> {
        (0..3u8)
            .filter(|&i| self.0[x][i as usize] != usize::MAX)
            .map(|i| (i, self.0[x][i as usize]))
            .collect()
    }
}

#[test]
fn hyperbolic_graph_matches_reflection_group() {
    for (p, q) in [(6, 4), (4, 5), (7, 3)] {
        let layers = 9;
        let (layer, nbr) = reflection_graph(p, q, layers);
        let mut oracle_sizes = vec![0; layers as usize + 1];
        for &l in &layer {
            oracle_sizes[l as usize] += 1;
        }
        let g = hyperbolic_flag_graph(p, q, layers).unwrap();
        assert_eq!(g.layer_sizes(), oracle_sizes, "{{{},{}}}", p, q);
        let oracle = Explicit(nbr);
        for (r, big_r) in [(2, 6), (3, 8)] {
            assert_eq!(
                ends_probe(&g, r, big_r, 1_000_000).unwrap().components,
                ends_probe(&oracle, r, big_r, 1_000_000).unwrap().components,
                "{{{},{}}} ({},{})",
                p,
                q,
                r,
                big_r
            );
        }
    }
    assert!(hyperbolic_flag_graph(4, 4, 3).is_err());
    assert!(hyperbolic_flag_graph(3, 6, 3).is_err());
}

#[test]
fn one_end_certificates_of_flat_graphs() {
    let sched = [(2, 6), (4, 10), (6, 14)];
    assert!(one_end_certificate(&Grid2, &sched, 1_000_000).unwrap().pass);
    assert!(one_end_certificate(&HexCayleyH, &sched, 1_000_000).unwrap().pass);
    let line = one_end_certificate(&LineGraph, &sched, 1_000_000).unwrap();
    assert!(!line.pass);
    assert!(line.probes.iter().all(|p| p.components == 2));
    assert!(one_end_certificate(&Grid2, &[], 10).is_err());
}
