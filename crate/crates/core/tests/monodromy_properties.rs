//! Monodromy elements against brute-force oracles on the periodic maps.

use std::collections::{HashMap, HashSet};

use lochness_core::flag_system::FlagSystem;
use lochness_core::monodromy::{mon_enumerate, Monodromy, MonodromyElement};
use lochness_core::periodic_map::{PeriodicFlag, PeriodicMap, Tiling};
use lochness_core::word::Word;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_word(rng: &mut impl Rng, max: usize) -> Word {
    let len = rng.gen_range(0..=max);
    Word::from_letters((0..len).map(|_| rng.gen_range(0..3)).collect()).unwrap()
}

fn window(pm: &PeriodicMap) -> Vec<PeriodicFlag> {
    let mut out = Vec::new();
    for x in -1..=1 {
        for y in -1..=1 {
            out.extend((0..pm.m() as u32).map(|c| PeriodicFlag::new(c, [x, y])));
        }
    }
    out
}

fn window_identity(pm: &PeriodicMap, w: &Word) -> bool {
    window(pm).into_iter().all(|f| pm.padjacent(f, w).unwrap() == f)
}

#[test]
fn evaluation_is_a_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for t in Tiling::ALL {
        let mon = Monodromy::new(&PeriodicMap::tiling(t));
        for _ in 0..200 {
            let u = random_word(&mut rng, 16);
            let v = random_word(&mut rng, 16);
            let lhs = mon.evaluate(&u.concat(&v));
            let rhs = mon.compose(&mon.evaluate(&u), &mon.evaluate(&v)).unwrap();
            assert_eq!(lhs, rhs, "{} {} {}", t, u, v);
            assert_eq!(mon.evaluate_expr(&u.concat(&v).to_expr()), lhs);
        }
        for i in 0..3 {
            let g = mon.generator(i);
            assert!(mon.is_identity(&mon.compose(&g, &g).unwrap()));
        }
    }
}

/// Words conjugate to a face, vertex or edge relator fix every flag; plain
/// random words almost never do.
fn mixed_words(rng: &mut impl Rng, pm: &PeriodicMap, n: usize) -> Vec<Word> {
    let (p, q) = pm.pq_type();
    let relators: Vec<Word> = vec![
        "0202".parse().unwrap(),
        "01".parse::<Word>().unwrap().pow(p),
        "12".parse::<Word>().unwrap().pow(q),
    ];
    (0..n)
        .map(|i| {
            if i % 2 == 0 {
                random_word(rng, 12)
            } else {
                let u = random_word(rng, 4);
                let r = &relators[rng.gen_range(0..relators.len())];
                u.concat(r).concat(&u.inverse())
            }
        })
        .collect()
}

#[test]
fn identity_agrees_with_window_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for t in Tiling::ALL {
        let pm = PeriodicMap::tiling(t);
        let mon = Monodromy::new(&pm);
        for w in mixed_words(&mut rng, &pm, 100) {
            assert_eq!(mon.is_identity(&mon.evaluate(&w)), window_identity(&pm, &w), "{} {}", t, w);
        }
    }
}

#[test]
fn automorphisms_commute_with_adjacency() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in Tiling::ALL {
        let pm = PeriodicMap::tiling(t);
        let orbits = pm.aut_orbits();
        for _ in 0..50 {
            let c = rng.gen_range(0..pm.m() as u32);
            let same: Vec<u32> = (0..pm.m() as u32).filter(|&d| orbits.orbit_of(d) == orbits.orbit_of(c)).collect();
            let d = same[rng.gen_range(0..same.len())];
            let dst = PeriodicFlag::new(d, [rng.gen_range(-3..=3), rng.gen_range(-3..=3)]);
            let a = pm.automorphism_from(PeriodicFlag::new(c, [0, 0]), dst).expect("same orbit");
            let f = PeriodicFlag::new(rng.gen_range(0..pm.m() as u32), [rng.gen_range(-2..=2), rng.gen_range(-2..=2)]);
            let w = random_word(&mut rng, 12);
            assert_eq!(a.apply(pm.padjacent(f, &w).unwrap()), pm.padjacent(a.apply(f), &w).unwrap());
            assert_eq!(a.inverse().apply(a.apply(f)), f);
        }
    }
}

/// Grows the correspondence `f.w -> g.w` breadth-first to `depth` and reports
/// whether it stays a well-defined bijection.
fn locally_equivalent(pm: &PeriodicMap, f: PeriodicFlag, g: PeriodicFlag, depth: usize) -> bool {
    let mut fwd: HashMap<PeriodicFlag, PeriodicFlag> = HashMap::from([(f, g)]);
    let mut back: HashMap<PeriodicFlag, PeriodicFlag> = HashMap::from([(g, f)]);
    let mut frontier = vec![(f, g)];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (x, y) in frontier {
            for i in 0..3u8 {
                let (x2, y2) = (pm.step(x, i), pm.step(y, i));
                match (fwd.get(&x2), back.get(&y2)) {
                    (None, None) => {
                        fwd.insert(x2, y2);
                        back.insert(y2, x2);
                        next.push((x2, y2));
                    }
                    (Some(&a), Some(&b)) if a == y2 && b == x2 => {}
                    _ => return false,
                }
            }
        }
        frontier = next;
    }
    true
}

#[test]
fn aut_orbits_match_pair_search() {
    let expected_k = HashMap::from([
        (Tiling::Square4444, 1),
        (Tiling::Triangular333333, 1),
        (Tiling::Hexagonal666, 1),
        (Tiling::Trihexagonal3636, 2),
        (Tiling::Snub333336, 10),
    ]);
    for t in Tiling::ALL {
        let pm = PeriodicMap::tiling(t);
        let orbits = pm.aut_orbits();
        for a in 0..pm.m() as u32 {
            for b in 0..pm.m() as u32 {
                let same_orbit = orbits.orbit_of(a) == orbits.orbit_of(b);
                let (fa, fb) = (PeriodicFlag::new(a, [0, 0]), PeriodicFlag::new(b, [0, 0]));
                assert_eq!(same_orbit, locally_equivalent(&pm, fa, fb, 40), "{} cells {} {}", t, a, b);
            }
        }
        if let Some(&k) = expected_k.get(&t) {
            assert_eq!(orbits.k(), k, "{}", t);
        }
        if Tiling::REGULAR.contains(&t) {
            assert_eq!(orbits.k(), 1);
        } else {
            assert!(orbits.k() >= 2);
        }
    }
}

#[test]
fn aut_orbits_invariant_under_cell_relabelling() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for t in Tiling::ALL {
        let pm = PeriodicMap::tiling(t);
        let m = pm.m();
        let mut perm: Vec<u32> = (0..m as u32).collect();
        for i in (1..m).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let mut steps: [Vec<(u32, [i32; 2])>; 3] = [vec![(0, [0, 0]); m], vec![(0, [0, 0]); m], vec![(0, [0, 0]); m]];
        for i in 0..3u8 {
            for c in 0..m as u32 {
                let (d, dt) = pm.raw_step(c, i);
                steps[i as usize][perm[c as usize] as usize] = (perm[d as usize], dt);
            }
        }
        let relabelled = PeriodicMap::from_steps(t.name(), steps).unwrap();
        let (a, b) = (pm.aut_orbits(), relabelled.aut_orbits());
        assert_eq!(a.k(), b.k());
        for x in 0..m as u32 {
            for y in 0..m as u32 {
                assert_eq!(
                    a.orbit_of(x) == a.orbit_of(y),
                    b.orbit_of(perm[x as usize]) == b.orbit_of(perm[y as usize])
                );
            }
        }
    }
}

#[test]
fn kernel_elements_are_determined_by_their_automorphisms() {
    let mon = Monodromy::new(&PeriodicMap::tiling(Tiling::Trihexagonal3636));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen: HashMap<Vec<String>, MonodromyElement> = HashMap::new();
    for _ in 0..400 {
        let e = mon.evaluate(&random_word(&mut rng, 20));
        if mon.sigma(&e).iter().enumerate().all(|(i, &s)| i == s) {
            let key: Vec<String> = mon.alphas(&e).iter().map(|a| format!("{:?}{:?}", a.image(), a.linear_part())).collect();
            if let Some(prev) = seen.insert(key, e.clone()) {
                assert_eq!(prev, e);
            }
        }
    }
    assert!(seen.len() > 10);
}

#[test]
fn translation_words_on_the_square_tiling() {
    let pm = PeriodicMap::tiling(Tiling::Square4444);
    let mon = Monodromy::new(&pm);
    let base = mon.reps()[0];
    for v in [[1, 0], [0, 1], [2, -1]] {
        let w = pm.word_between(base, base.translated(v), 10_000).unwrap();
        let tp = mon.translation_power(&w.to_expr(), None).unwrap();
        assert_eq!(tp.power, 1);
        assert_eq!(tp.vectors, vec![v]);
        assert!(!tp.trivial);
    }
    let kw = mon.kernel_rank_witness().unwrap();
    assert_eq!(kw.vectors, [vec![[1, 0]], vec![[0, 1]]]);
    assert!(kw.commute);
}

#[test]
fn witnesses_on_all_tilings() {
    for t in Tiling::ALL {
        let mon = Monodromy::new(&PeriodicMap::tiling(t));
        let kw = mon.kernel_rank_witness().unwrap();
        assert!(kw.is_valid(), "{}", t);
        for e in &kw.elements {
            assert!(mon.sigma(e).iter().enumerate().all(|(i, &s)| i == s));
            assert!(mon.alphas(e).iter().all(|a| a.is_translation()));
        }
    }
}

/// Closure by multiplying every pair of known elements until nothing new appears.
fn naive_closure(fs: &FlagSystem) -> usize {
    let gens: Vec<Vec<u32>> = (0..3).map(|i| fs.generator(i).to_vec()).collect();
    let mut set: HashSet<Vec<u32>> = gens.iter().cloned().collect();
    loop {
        let items: Vec<Vec<u32>> = set.iter().cloned().collect();
        let mut grew = false;
        for a in &items {
            for b in &items {
                let ab: Vec<u32> = a.iter().map(|&x| b[x as usize]).collect();
                grew |= set.insert(ab);
            }
        }
        if !grew {
            return set.len();
        }
    }
}

#[test]
fn monodromy_orders_match_naive_closure() {
    let mut corpus = vec![FlagSystem::cube(), FlagSystem::triangular_prism()];
    for t in Tiling::REGULAR {
        corpus.push(PeriodicMap::tiling(t).torus_quotient(1, 1).unwrap());
        corpus.push(PeriodicMap::tiling(t).torus_quotient(2, 2).unwrap());
    }
    for fs in corpus {
        let elements = mon_enumerate(&fs, 100_000).unwrap();
        assert_eq!(elements.len(), naive_closure(&fs));
        if fs.is_regular() {
            assert_eq!(elements.len(), fs.len());
        }
    }
    assert_eq!(mon_enumerate(&FlagSystem::cube(), 1000).unwrap().len(), 48);
}
