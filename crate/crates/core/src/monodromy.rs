//! Exact monodromy elements of periodic maps.
//!
//! An element `w` of `Mon(M)` is determined by where it sends one flag of each
//! Aut-orbit: if `Φ_i` is the representative of orbit `i`, then
//! `Φ_i·w = α_i(Φ_σ(i))` for a permutation `σ` of the orbits and automorphisms
//! `α_i`. Since an automorphism is fixed by the image of a single flag, the
//! element is stored as the list of images `Φ_i·w`; `σ` and `α_i` are read
//! back from it on demand.

use std::collections::HashSet;
use std::fmt;

use indexmap::IndexSet;

use crate::error::{Error, Result};
use crate::flag_system::FlagSystem;
use crate::periodic_map::{AutOrbits, Automorphism, Offset, PeriodicFlag, PeriodicMap};
use crate::word::{Word, WordAction, WordExpr};

/// Default bound factor on translation powers: point groups of wallpaper
/// groups have exponent dividing 12.
pub const POINT_GROUP_BOUND: u64 = 12;

/// Flags searched when looking for a word between two flags.
const WORD_SEARCH_NODES: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonodromyElement {
    images: Box<[PeriodicFlag]>,
}

impl MonodromyElement {
    /// `Φ_i·w` for each orbit representative `Φ_i`.
    pub fn images(&self) -> &[PeriodicFlag] {
        &self.images
    }

    pub fn k(&self) -> usize {
        self.images.len()
    }

    pub(crate) fn from_images(images: Box<[PeriodicFlag]>) -> Self {
        MonodromyElement { images }
    }
}

impl fmt::Display for MonodromyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", x)?;
        }
        write!(f, "]")
    }
}

/// The monodromy group of a periodic map with fixed orbit representatives.
#[derive(Clone, Debug)]
pub struct Monodromy {
    pm: PeriodicMap,
    orbits: AutOrbits,
    reps: Box<[PeriodicFlag]>,
}

#[derive(Clone, Debug)]
pub struct TranslationPower {
    pub power: u64,
    pub element: MonodromyElement,
    /// Translation applied on each orbit.
    pub vectors: Vec<Offset>,
    /// The power is the identity element.
    pub trivial: bool,
}

#[derive(Clone, Debug)]
pub struct KernelWitness {
    pub words: [Word; 2],
    pub powers: [u64; 2],
    pub elements: [MonodromyElement; 2],
    pub vectors: [Vec<Offset>; 2],
    pub commute: bool,
}

impl KernelWitness {
    /// Determinant of the two translation vectors on orbit 0.
    pub fn determinant(&self) -> i64 {
        let a = self.vectors[0][0];
        let b = self.vectors[1][0];
        a[0] as i64 * b[1] as i64 - a[1] as i64 * b[0] as i64
    }

    pub fn is_valid(&self) -> bool {
        self.commute && self.determinant() != 0
    }
}

impl Monodromy {
    pub fn new(pm: &PeriodicMap) -> Self {
        let orbits = pm.aut_orbits();
        let reps = (0..orbits.k()).map(|i| orbits.rep(i)).collect();
        Monodromy {
            pm: pm.clone(),
            orbits,
            reps,
        }
    }

    pub fn map(&self) -> &PeriodicMap {
        &self.pm
    }

    pub fn orbits(&self) -> &AutOrbits {
        &self.orbits
    }

    pub fn k(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[PeriodicFlag] {
        &self.reps
    }

    pub fn identity(&self) -> MonodromyElement {
        MonodromyElement {
            images: self.reps.clone(),
        }
    }

    pub fn generator(&self, i: u8) -> MonodromyElement {
        self.times_letter(&self.identity(), i)
    }

    pub fn is_identity(&self, a: &MonodromyElement) -> bool {
        *a.images == *self.reps
    }

    /// `a·r_i`.
    pub fn times_letter(&self, a: &MonodromyElement, i: u8) -> MonodromyElement {
        MonodromyElement {
            images: a.images.iter().map(|&f| self.pm.step(f, i)).collect(),
        }
    }

    /// Right-multiplies the element with these images by `r_i` in place.
    pub fn step_images(&self, images: &mut [PeriodicFlag], i: u8) {
        for f in images.iter_mut() {
            *f = self.pm.step(*f, i);
        }
    }

    fn check(&self, a: &MonodromyElement) -> Result<()> {
        let m = self.pm.m() as u32;
        if a.k() != self.k() || a.images.iter().any(|f| f.cell >= m) {
            return Err(Error::MismatchedMaps);
        }
        Ok(())
    }

    /// Orbit permutation `σ` with `Φ_i·a` in orbit `σ(i)`.
    pub fn sigma(&self, a: &MonodromyElement) -> Vec<usize> {
        a.images.iter().map(|f| self.orbits.orbit_of(f.cell)).collect()
    }

    /// `α_i`, the automorphism taking `Φ_σ(i)` to `Φ_i·a`.
    pub fn alphas(&self, a: &MonodromyElement) -> Vec<Automorphism> {
        self.sigma(a)
            .into_iter()
            .zip(a.images.iter())
            .map(|(s, &img)| {
                self.pm
                    .automorphism_from(self.reps[s], img)
                    .expect("image lies in the orbit of its representative")
            })
            .collect()
    }

    /// `a` followed by `b` (the product `ab` under the right action).
    pub fn compose(&self, a: &MonodromyElement, b: &MonodromyElement) -> Result<MonodromyElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.compose_unchecked(a, b))
    }

    fn compose_unchecked(&self, a: &MonodromyElement, b: &MonodromyElement) -> MonodromyElement {
        // Φ_i·ab = α_{a,i}(Φ_σa(i)·b)
        let images = a
            .images
            .iter()
            .map(|&img| {
                let s = self.orbits.orbit_of(img.cell);
                self.orbits.transport(img, b.images[s])
            })
            .collect();
        MonodromyElement { images }
    }

    pub fn inverse(&self, a: &MonodromyElement) -> Result<MonodromyElement> {
        self.check(a)?;
        // Φ_σ(i)·a⁻¹ = α_i⁻¹(Φ_i)
        let mut images = self.reps.clone();
        for (i, &img) in a.images.iter().enumerate() {
            let s = self.orbits.orbit_of(img.cell);
            let back = self
                .pm
                .automorphism_from(img, self.reps[s])
                .expect("image lies in the orbit of its representative");
            images[s] = back.apply(self.reps[i]);
        }
        Ok(MonodromyElement { images })
    }

    pub fn pow(&self, a: &MonodromyElement, exp: u64) -> MonodromyElement {
        self.power(a, exp)
    }

    pub fn evaluate(&self, w: &Word) -> MonodromyElement {
        let mut images = self.reps.clone();
        for f in images.iter_mut() {
            for &l in w.letters() {
                *f = self.pm.step(*f, l);
            }
        }
        MonodromyElement { images }
    }

    /// Evaluates a word with powers by repeated squaring.
    pub fn evaluate_expr(&self, w: &WordExpr) -> MonodromyElement {
        w.evaluate(self)
    }

    pub fn fixes_all_flags(&self, w: &WordExpr) -> bool {
        self.is_identity(&self.evaluate_expr(w))
    }

    /// Order of the orbit permutation of `a`.
    pub fn sigma_order(&self, a: &MonodromyElement) -> u64 {
        let sigma = self.sigma(a);
        let mut seen = vec![false; sigma.len()];
        let mut order = 1u64;
        for start in 0..sigma.len() {
            let mut len = 0u64;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = sigma[i];
                len += 1;
            }
            if len > 0 {
                order = num_integer::lcm(order, len);
            }
        }
        order
    }

    /// `k!·12`, saturating.
    pub fn default_power_bound(&self) -> u64 {
        (1..=self.k() as u64).fold(POINT_GROUP_BOUND, |acc, x| acc.saturating_mul(x))
    }

    /// Smallest power of `w` fixing every orbit and acting on each one by a
    /// lattice translation.
    pub fn translation_power(&self, w: &WordExpr, bound: Option<u64>) -> Result<TranslationPower> {
        let bound = bound.unwrap_or_else(|| self.default_power_bound());
        let e = self.evaluate_expr(w);
        let step = self.sigma_order(&e);
        let base = self.power(&e, step);
        let mut cur = base.clone();
        let mut power = step;
        while power <= bound {
            if cur.images.iter().zip(self.reps.iter()).all(|(f, r)| f.cell == r.cell) {
                let vectors = cur.images.iter().map(|f| f.t).collect();
                return Ok(TranslationPower {
                    power,
                    trivial: self.is_identity(&cur),
                    element: cur,
                    vectors,
                });
            }
            cur = self.compose_unchecked(&cur, &base);
            power += step;
        }
        Err(Error::SearchExhausted(format!(
            "no translation power of {} up to {}",
            w, bound
        )))
    }

    /// Evaluates `w2^-l w1^-k w2^l w1^k`.
    pub fn commutator(&self, w1: &WordExpr, k: u64, w2: &WordExpr, l: u64) -> MonodromyElement {
        let a = self.power(&self.evaluate_expr(w1), k);
        let b = self.power(&self.evaluate_expr(w2), l);
        let ai = self.inverse(&a).expect("same map");
        let bi = self.inverse(&b).expect("same map");
        [ai, b, a].iter().fold(bi, |acc, x| self.compose_unchecked(&acc, x))
    }

    pub fn commutator_is_trivial(&self, w1: &WordExpr, k: u64, w2: &WordExpr, l: u64) -> bool {
        self.is_identity(&self.commutator(w1, k, w2, l))
    }

    /// Two commuting kernel elements translating along independent vectors.
    pub fn kernel_rank_witness(&self) -> Result<KernelWitness> {
        let base = self.reps[0];
        let find = |v: Offset| {
            self.pm
                .word_between(base, base.translated(v), WORD_SEARCH_NODES)
                .ok_or_else(|| Error::SearchExhausted(format!("no word from {} to its {:?} translate", base, v)))
        };
        let u1 = find([1, 0])?;
        let u2 = find([0, 1])?;
        let t1 = self.translation_power(&u1.to_expr(), None)?;
        let t2 = self.translation_power(&u2.to_expr(), None)?;
        let e1 = u1.to_expr().pow(t1.power);
        let e2 = u2.to_expr().pow(t2.power);
        let commute = self.commutator_is_trivial(&e1, 1, &e2, 1);
        let witness = KernelWitness {
            words: [u1, u2],
            powers: [t1.power, t2.power],
            elements: [t1.element, t2.element],
            vectors: [t1.vectors, t2.vectors],
            commute,
        };
        if witness.determinant() == 0 {
            return Err(Error::Inconsistent("witness translations are parallel".into()));
        }
        Ok(witness)
    }
}

impl WordAction for Monodromy {
    type Value = MonodromyElement;

    fn identity(&self) -> MonodromyElement {
        Monodromy::identity(self)
    }

    fn letter(&self, letter: u8) -> MonodromyElement {
        self.generator(letter)
    }

    fn then(&self, first: &MonodromyElement, second: &MonodromyElement) -> MonodromyElement {
        self.compose_unchecked(first, second)
    }
}

/// All elements of the monodromy group of a finite map, as flag
/// permutations `f ↦ f·g`, in breadth-first order from the identity.
pub fn mon_enumerate(fs: &FlagSystem, cap: usize) -> Result<Vec<Vec<u32>>> {
    let n = fs.len() as u32;
    let mut elements: IndexSet<Vec<u32>> = IndexSet::new();
    elements.insert((0..n).collect());
    let mut next = 0;
    while next < elements.len() {
        for i in 0..3u8 {
            let gen = fs.generator(i);
            let g: Vec<u32> = elements[next].iter().map(|&x| gen[x as usize]).collect();
            if elements.insert(g) && elements.len() > cap {
                return Err(Error::CapExceeded {
                    what: "monodromy elements",
                    cap,
                });
            }
        }
        next += 1;
    }
    Ok(elements.into_iter().collect())
}

/// Order of `Mon(M)` for a finite map.
pub fn mon_order(fs: &FlagSystem, cap: usize) -> Result<usize> {
    mon_enumerate(fs, cap).map(|v| v.len())
}

/// Distinct elements among `xs` under the canonical encoding.
pub fn distinct(xs: &[MonodromyElement]) -> usize {
    xs.iter().collect::<HashSet<_>>().len()
}
