//! Brute-force geometric constructor for the eleven vertex-transitive tilings.
//!
//! Vertices of a fundamental cell are placed with floating-point coordinates,
//! edges are the unit-distance pairs, rotations come from sorting neighbours
//! by angle, and flags are (vertex, neighbour, side) triples. The resulting
//! adjacency tables are the fixtures shipped with the library.

use std::f64::consts::PI;

use lochness_core::periodic_map::{Offset, PeriodicMap, Tiling};

const EPS: f64 = 1e-6;

pub struct Geometry {
    pub a1: [f64; 2],
    pub a2: [f64; 2],
    pub points: Vec<[f64; 2]>,
}

fn polygon(center: [f64; 2], radius: f64, start_deg: f64, sides: usize) -> Vec<[f64; 2]> {
    (0..sides)
        .map(|k| {
            let a = (start_deg + 360.0 * k as f64 / sides as f64).to_radians();
            [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
        })
        .collect()
}

pub fn geometry(t: Tiling) -> Geometry {
    let s3 = 3f64.sqrt();
    let s2 = 2f64.sqrt();
    let hex_lattice = |l: f64| ([l, 0.0], [l / 2.0, l * s3 / 2.0]);
    match t {
        Tiling::Square4444 => Geometry {
            a1: [1.0, 0.0],
            a2: [0.0, 1.0],
            points: vec![[0.0, 0.0]],
        },
        Tiling::Triangular333333 => Geometry {
            a1: [1.0, 0.0],
            a2: [0.5, s3 / 2.0],
            points: vec![[0.0, 0.0]],
        },
        Tiling::Hexagonal666 => Geometry {
            a1: [s3, 0.0],
            a2: [s3 / 2.0, 1.5],
            points: vec![[0.0, 0.0], [0.0, 1.0]],
        },
        Tiling::Trihexagonal3636 => Geometry {
            a1: [2.0, 0.0],
            a2: [1.0, s3],
            points: vec![[0.0, 0.0], [1.0, 0.0], [0.5, s3 / 2.0]],
        },
        Tiling::ElongatedTriangular33344 => Geometry {
            a1: [1.0, 0.0],
            a2: [0.5, 1.0 + s3 / 2.0],
            points: vec![[0.0, 0.0], [0.0, 1.0]],
        },
        Tiling::SnubSquare33434 => {
            let s = (2.0 + s3).sqrt();
            let r = 1.0 / s2;
            let mut points = polygon([0.0, 0.0], r, 60.0, 4);
            points.extend(polygon([s / 2.0, s / 2.0], r, 30.0, 4));
            Geometry {
                a1: [s, 0.0],
                a2: [0.0, s],
                points,
            }
        }
        Tiling::Rhombitrihexagonal3464 => {
            let (a1, a2) = hex_lattice(1.0 + s3);
            Geometry {
                a1,
                a2,
                points: polygon([0.0, 0.0], 1.0, 30.0, 6),
            }
        }
        Tiling::TruncatedTrihexagonal4612 => {
            let (a1, a2) = hex_lattice(3.0 + s3);
            let r = 1.0 / (2.0 * (PI / 12.0).sin());
            Geometry {
                a1,
                a2,
                points: polygon([0.0, 0.0], r, 15.0, 12),
            }
        }
        Tiling::TruncatedHexagonal31212 => {
            let (a1, a2) = hex_lattice(2.0 + s3);
            let r = 1.0 / (2.0 * (PI / 12.0).sin());
            Geometry {
                a1,
                a2,
                points: polygon([0.0, 0.0], r, 15.0, 12),
            }
        }
        Tiling::TruncatedSquare488 => {
            let l = 1.0 + s2;
            let r = 1.0 / (2.0 * (PI / 8.0).sin());
            Geometry {
                a1: [l, 0.0],
                a2: [0.0, l],
                points: polygon([0.0, 0.0], r, 22.5, 8),
            }
        }
        Tiling::Snub333336 => {
            // Triangular lattice with the index-7 sublattice of hexagon
            // centres removed.
            let e1 = [1.0, 0.0];
            let e2 = [0.5, s3 / 2.0];
            let a1 = [2.0 * e1[0] + e2[0], 2.0 * e1[1] + e2[1]];
            let a2 = [-e1[0] + 3.0 * e2[0], -e1[1] + 3.0 * e2[1]];
            let mut points = Vec::new();
            for i in 0..7 {
                for j in 0..7 {
                    points.push([i as f64 * e1[0] + j as f64 * e2[0], i as f64 * e1[1] + j as f64 * e2[1]]);
                }
            }
            let g = Geometry { a1, a2, points };
            let kept = g
                .points
                .iter()
                .copied()
                .filter(|&p| {
                    let (u, v) = g.lattice_coords(p);
                    !(is_int(u) && is_int(v))
                })
                .collect();
            Geometry { points: kept, ..g }
        }
    }
}

fn is_int(x: f64) -> bool {
    (x - x.round()).abs() < EPS
}

fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f > 1.0 - EPS {
        0.0
    } else {
        f
    }
}

fn key(x: f64) -> i64 {
    (x * 1e6).round() as i64
}

impl Geometry {
    fn lattice_coords(&self, p: [f64; 2]) -> (f64, f64) {
        let [a, c] = self.a1;
        let [b, d] = self.a2;
        let det = a * d - b * c;
        ((d * p[0] - b * p[1]) / det, (-c * p[0] + a * p[1]) / det)
    }

    fn at(&self, uv: (f64, f64), t: Offset) -> [f64; 2] {
        let u = uv.0 + t[0] as f64;
        let v = uv.1 + t[1] as f64;
        [u * self.a1[0] + v * self.a2[0], u * self.a1[1] + v * self.a2[1]]
    }

    /// Cell representatives in lattice coordinates `[0,1)^2`, deduplicated and sorted.
    fn cell_points(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for &p in &self.points {
            let (u, v) = self.lattice_coords(p);
            let q = (frac(u), frac(v));
            if !out
                .iter()
                .any(|o| (o.0 - q.0).abs() < EPS && (o.1 - q.1).abs() < EPS)
            {
                out.push(q);
            }
        }
        out.sort_by_key(|&(u, v)| (key(v), key(u)));
        out
    }
}

struct Neighbour {
    vertex: usize,
    t: Offset,
}

pub struct Built {
    pub map: PeriodicMap,
    /// Position of the vertex of each flag cell at offset zero.
    pub cell_vertex: Vec<usize>,
    pub vertex_positions: Vec<(f64, f64)>,
}

/// Builds the periodic map and checks every face is a regular polygon
/// of the expected radius.
pub fn build(t: Tiling) -> Built {
    let g = geometry(t);
    let verts = g.cell_points();
    let mut nbrs: Vec<Vec<Neighbour>> = Vec::new();
    for &p in &verts {
        let here = g.at(p, [0, 0]);
        let mut list: Vec<(i64, Neighbour)> = Vec::new();
        for (k, &q) in verts.iter().enumerate() {
            for tx in -3..=3 {
                for ty in -3..=3 {
                    let there = g.at(q, [tx, ty]);
                    let dx = there[0] - here[0];
                    let dy = there[1] - here[1];
                    if ((dx * dx + dy * dy).sqrt() - 1.0).abs() < EPS {
                        let mut ang = dy.atan2(dx);
                        if ang < -EPS {
                            ang += 2.0 * PI;
                        }
                        list.push((key(ang.max(0.0)), Neighbour { vertex: k, t: [tx, ty] }));
                    }
                }
            }
        }
        list.sort_by_key(|(a, _)| *a);
        nbrs.push(list.into_iter().map(|(_, n)| n).collect());
    }

    // Flag index of (vertex j, neighbour slot n, side s) with s = 0 for the
    // face counter-clockwise of the edge and s = 1 for the clockwise one.
    let mut base = vec![0usize; verts.len()];
    let mut m = 0;
    for (j, list) in nbrs.iter().enumerate() {
        base[j] = m;
        m += 2 * list.len();
    }
    let idx = |j: usize, n: usize, s: usize| (base[j] + 2 * n + s) as u32;

    let mut steps: [Vec<(u32, Offset)>; 3] = [vec![(0, [0, 0]); m], vec![(0, [0, 0]); m], vec![(0, [0, 0]); m]];
    let mut cell_vertex = vec![0usize; m];
    for (j, list) in nbrs.iter().enumerate() {
        let deg = list.len();
        for (n, nb) in list.iter().enumerate() {
            let back = nbrs[nb.vertex]
                .iter()
                .position(|x| x.vertex == j && x.t == [-nb.t[0], -nb.t[1]])
                .expect("unit-distance relation is symmetric");
            for s in 0..2 {
                let f = idx(j, n, s) as usize;
                cell_vertex[f] = j;
                steps[0][f] = (idx(nb.vertex, back, 1 - s), nb.t);
                steps[2][f] = (idx(j, n, 1 - s), [0, 0]);
                steps[1][f] = if s == 0 {
                    (idx(j, (n + 1) % deg, 1), [0, 0])
                } else {
                    (idx(j, (n + deg - 1) % deg, 0), [0, 0])
                };
            }
        }
    }
    let map = PeriodicMap::from_steps(t.name(), steps).expect("well-formed tables");

    let built = Built {
        map,
        cell_vertex,
        vertex_positions: verts,
    };
    check_faces(t, &g, &built);
    built
}

fn check_faces(t: Tiling, g: &Geometry, b: &Built) {
    use lochness_core::periodic_map::PeriodicFlag;
    let pm = &b.map;
    for c in 0..pm.m() as u32 {
        // Walk the face with alternating r0 r1, collecting vertex positions.
        let start = PeriodicFlag::new(c, [0, 0]);
        let mut f = start;
        let mut pts = Vec::new();
        let mut k = 0;
        loop {
            if k % 2 == 0 {
                pts.push(g.at(b.vertex_positions[b.cell_vertex[f.cell as usize]], f.t));
            }
            f = pm.step(f, (k % 2) as u8);
            k += 1;
            if f == start && k % 2 == 0 {
                break;
            }
        }
        let sides = pts.len();
        let cx = pts.iter().map(|p| p[0]).sum::<f64>() / pts.len() as f64;
        let cy = pts.iter().map(|p| p[1]).sum::<f64>() / pts.len() as f64;
        let r0 = ((pts[0][0] - cx).powi(2) + (pts[0][1] - cy).powi(2)).sqrt();
        let expected_r = 1.0 / (2.0 * (PI / sides as f64).sin());
        for p in &pts {
            let r = ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt();
            assert!((r - r0).abs() < 1e-5, "{}: face of cell {} not regular", t, c);
        }
        assert!((r0 - expected_r).abs() < 1e-5, "{}: face of cell {} has wrong radius", t, c);
    }
}
