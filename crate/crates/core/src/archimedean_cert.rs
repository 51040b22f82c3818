//! Certificate pipelines.
//!
//! For 3.6.3.6: the identification words, the six-colouring of the dual graph
//! of the cover, its local identification with the Cayley graph of `H x H`,
//! and the Euler characteristic contradiction for a planar cover. For any
//! tiling: hypothesis checks, branch points, one-end probes and genus growth.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Sub};

use num_rational::Ratio;
use serde::Serialize;

use crate::ends::{
    cover_dual_graph, dual_graph_of, one_end_certificate, product_graph, GraphGen, HexCayleyH, OneEndReport,
    PatchDualGraph, DEFAULT_SCHEDULE,
};
use crate::error::{Error, Result};
use crate::minimal_cover::{branch_orders, BranchReport, CoverPatch, PatchRow, DEFAULT_MAX_ELEMENTS};
use crate::monodromy::Monodromy;
use crate::periodic_map::{PeriodicMap, Tiling};
use crate::word::{parse_word, Word, WordExpr};

/// Repeated blocks of the two identification words of 3.6.3.6.
pub const BLOCK_A: &str = "(10)^2 12";
pub const BLOCK_B: &str = "(10)^2 2";
pub const EXPONENT_A: u64 = 4;
pub const EXPONENT_B: u64 = 6;

/// Patch radius on which identification words are lifted.
pub const LIFT_RADIUS: u32 = 40;

/// Genus radii for the Loch Ness certificate: the desk-scale schedule
/// followed by coarser steps out to 28.
pub const CERTIFICATE_RADII: [u32; 9] = [4, 6, 8, 10, 12, 16, 20, 24, 28];

#[derive(Clone, Debug, Serialize)]
pub struct IdentificationCheck {
    pub name: &'static str,
    pub word: String,
    pub exponent: u64,
    pub fixes_all_flags: bool,
    /// Proper powers `block^j`, `j < exponent`, that fix every flag.
    pub proper_powers_fixing: Vec<u64>,
    pub lift_radius: u32,
    /// Start points tried: all patch elements far enough from the boundary.
    pub lift_starts: usize,
    pub lifts_closed: bool,
}

impl IdentificationCheck {
    pub fn pass(&self) -> bool {
        self.fixes_all_flags && self.proper_powers_fixing.is_empty() && self.lifts_closed
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentificationReport {
    pub checks: Vec<IdentificationCheck>,
}

impl IdentificationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(IdentificationCheck::pass)
    }
}

impl fmt::Display for IdentificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} = {}: fixes all flags {}; proper powers fixing all flags {:?}; closed lift from {} starts in radius-{} patch {}",
                c.name, c.word, c.fixes_all_flags, c.proper_powers_fixing, c.lift_starts, c.lift_radius, c.lifts_closed
            )?;
        }
        write!(f, "verdict: {}", if self.pass() { "pass" } else { "fail" })
    }
}

fn block_power(block: &str, j: u64) -> WordExpr {
    parse_word(block).expect("static word").pow(j)
}

/// Checks both identification words on 3.6.3.6.
pub fn certify_identifications_363636(cap: usize) -> Result<IdentificationReport> {
    let mon = Monodromy::new(&PeriodicMap::tiling(Tiling::Trihexagonal3636));
    let patch = CoverPatch::build(&mon, LIFT_RADIUS, cap)?;
    let checks = [("A", BLOCK_A, EXPONENT_A), ("B", BLOCK_B, EXPONENT_B)]
        .into_iter()
        .map(|(name, block, exponent)| {
            let expr = block_power(block, exponent);
            let word: Word = expr.expand(u128::MAX).expect("short word");
            let reach = LIFT_RADIUS.saturating_sub(word.len() as u32);
            let starts = patch.ball_len(reach);
            let lifts_closed = (0..starts).all(|g| patch.walk(g, &word) == Some(g));
            IdentificationCheck {
                name,
                word: format!("({})^{}", block, exponent),
                exponent,
                fixes_all_flags: mon.fixes_all_flags(&expr),
                proper_powers_fixing: (1..exponent)
                    .filter(|&j| mon.fixes_all_flags(&block_power(block, j)))
                    .collect(),
                lift_radius: LIFT_RADIUS,
                lift_starts: starts,
                lifts_closed,
            }
        })
        .collect();
    Ok(IdentificationReport { checks })
}

/// Colour state of a flag of the cover: the colour `c` of its edge and the
/// sense `s` in which colours increase around its face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ColourState {
    pub c: u8,
    pub s: i8,
}

impl ColourState {
    pub const START: ColourState = ColourState { c: 0, s: 1 };

    pub fn step(self, i: u8) -> ColourState {
        let shift = |c: u8, d: i8| (c as i8 + d).rem_euclid(6) as u8;
        match i {
            0 => ColourState { c: self.c, s: -self.s },
            1 => ColourState {
                c: shift(self.c, self.s),
                s: -self.s,
            },
            _ => self,
        }
    }

    pub fn apply(self, w: &Word) -> ColourState {
        w.letters().iter().fold(self, |st, &l| st.step(l))
    }

    /// Colour in `1..=6`.
    pub fn colour(self) -> u8 {
        self.c + 1
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ColouringReport {
    #[serde(skip)]
    pub states: Vec<ColourState>,
    /// Edges of the patch whose two ends disagree with the colouring rule.
    pub conflicts: usize,
    /// A second propagation order produced the same colouring.
    pub order_independent: bool,
    /// Complete faces checked, and those with six distinct colours.
    pub faces_checked: usize,
    pub faces_proper: usize,
    /// Flags whose opposite edge `g·r1r2r1` is in the patch, and those where
    /// it carries the same colour.
    pub opposite_checked: usize,
    pub opposite_equal: usize,
    /// Complete vertices checked, and those coloured `x y x y` around.
    pub vertices_checked: usize,
    pub vertices_paired: usize,
    /// Colours of the base face in walking order.
    pub base_face: Vec<u8>,
    /// Words A and B act trivially on every colour state.
    pub identifications_consistent: bool,
}

impl ColouringReport {
    pub fn pass(&self) -> bool {
        self.conflicts == 0
            && self.order_independent
            && self.faces_checked > 0
            && self.faces_proper == self.faces_checked
            && self.opposite_equal == self.opposite_checked
            && self.vertices_paired == self.vertices_checked
            && self.identifications_consistent
    }

    pub fn colours(&self) -> Vec<u8> {
        self.states.iter().map(|s| s.colour()).collect()
    }
}

fn propagate(cp: &CoverPatch, order: [u8; 3], depth_first: bool) -> (Vec<ColourState>, usize) {
    let n = cp.len();
    let mut st: Vec<Option<ColourState>> = vec![None; n];
    st[0] = Some(ColourState::START);
    let mut work = VecDeque::from([0usize]);
    let mut conflicts = 0;
    while let Some(g) = if depth_first { work.pop_back() } else { work.pop_front() } {
        let here = st[g].unwrap();
        for &i in &order {
            if let Some(h) = cp.neighbour(g, i) {
                let want = here.step(i);
                match st[h] {
                    None => {
                        st[h] = Some(want);
                        work.push_back(h);
                    }
                    Some(x) if x != want => conflicts += 1,
                    Some(_) => {}
                }
            }
        }
    }
    (st.into_iter().map(|x| x.expect("patch is connected")).collect(), conflicts)
}

/// Orbit of `g` under the alternating walk `a b a b ...`, or `None` if it
/// leaves the patch.
fn alternating_orbit(cp: &CoverPatch, g: usize, a: u8, b: u8) -> Option<Vec<usize>> {
    let mut out = vec![g];
    let mut cur = g;
    let mut k = 0;
    loop {
        cur = cp.neighbour(cur, if k % 2 == 0 { a } else { b })?;
        k += 1;
        if cur == g && k % 2 == 0 {
            return Some(out);
        }
        out.push(cur);
    }
}

/// Six-colouring of the edges of the cover of 3.6.3.6 on a patch.
pub fn color_dual_edges(cp: &CoverPatch) -> Result<ColouringReport> {
    let (states, conflicts) = propagate(cp, [0, 1, 2], false);
    let (again, _) = propagate(cp, [2, 1, 0], true);
    let colour = |g: usize| states[g].colour();

    let mut faces_checked = 0;
    let mut faces_proper = 0;
    let mut base_face = Vec::new();
    let mut seen = vec![false; cp.len()];
    for g in 0..cp.len() {
        if seen[g] {
            continue;
        }
        if let Some(face) = alternating_orbit(cp, g, 0, 1) {
            face.iter().for_each(|&x| seen[x] = true);
            if face.len() != 12 {
                return Err(Error::InvalidParameter(format!(
                    "face with {} edges; the colouring needs hexagons",
                    face.len() / 2
                )));
            }
            let mut cols: Vec<u8> = face.iter().step_by(2).map(|&x| colour(x)).collect();
            if g == 0 {
                base_face = cols.clone();
            }
            cols.sort_unstable();
            cols.dedup();
            faces_checked += 1;
            faces_proper += usize::from(cols.len() == 6);
        }
    }

    let word = |s: &str| -> Word { s.parse().expect("static word") };
    let opposite = word("121");
    let mut opposite_checked = 0;
    let mut opposite_equal = 0;
    for g in 0..cp.len() {
        if let Some(h) = cp.walk(g, &opposite) {
            opposite_checked += 1;
            opposite_equal += usize::from(colour(g) == colour(h));
        }
    }

    let mut vertices_checked = 0;
    let mut vertices_paired = 0;
    let mut seen = vec![false; cp.len()];
    for g in 0..cp.len() {
        if seen[g] {
            continue;
        }
        if let Some(fan) = alternating_orbit(cp, g, 1, 2) {
            fan.iter().for_each(|&x| seen[x] = true);
            // Consecutive edges around the vertex are two steps apart.
            let edges: Vec<u8> = fan.iter().step_by(2).map(|&x| colour(x)).collect();
            let d = edges.len();
            vertices_checked += 1;
            let paired = d == 4 && (0..d).all(|i| edges[i] == edges[(i + 2) % d] && edges[i] != edges[(i + 1) % d]);
            vertices_paired += usize::from(paired);
        }
    }

    let a = word(&format!("({})^{}", BLOCK_A, EXPONENT_A));
    let b = word(&format!("({})^{}", BLOCK_B, EXPONENT_B));
    let identifications_consistent = (0..6u8)
        .flat_map(|c| [1i8, -1].map(|s| ColourState { c, s }))
        .all(|st| st.apply(&a) == st && st.apply(&b) == st);

    Ok(ColouringReport {
        order_independent: states == again,
        states,
        conflicts,
        faces_checked,
        faces_proper,
        opposite_checked,
        opposite_equal,
        vertices_checked,
        vertices_paired,
        base_face,
        identifications_consistent,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalIsoReport {
    pub rho: u32,
    pub dual_ball: usize,
    pub cayley_ball: usize,
    /// Cayley generator label `1..=6` assigned to each colour `1..=6`.
    pub bijection: Option<[u8; 6]>,
    /// `a_i a_j = a_j a_i` closes at the root for every odd `i`, even `j`.
    pub squares_close: bool,
    /// `(a1 a3 a5)^2` and `(a2 a4 a6)^2` close at the root.
    pub hexagons_close: bool,
}

impl LocalIsoReport {
    pub fn pass(&self) -> bool {
        self.bijection.is_some()
            && (self.rho < 2 || self.squares_close)
            && (self.rho < 3 || self.hexagons_close)
    }
}

fn permutations3() -> Vec<[u8; 3]> {
    vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

/// Colour-to-generator bijections that keep or swap the parity classes.
fn parity_bijections() -> Vec<[u8; 6]> {
    let mut out = Vec::new();
    for swap in [false, true] {
        for po in permutations3() {
            for pe in permutations3() {
                let mut beta = [0u8; 6];
                for k in 0..3 {
                    // Colour 2k+1 (odd) and 2k+2 (even).
                    let (odd, even) = if swap { (2 * pe[k] + 2, 2 * po[k] + 1) } else { (2 * po[k] + 1, 2 * pe[k] + 2) };
                    beta[2 * k] = odd;
                    beta[2 * k + 1] = even;
                }
                out.push(beta);
            }
        }
    }
    out
}

fn labelled_step<G: GraphGen>(g: &G, node: &G::Node, label: u8) -> Option<G::Node> {
    g.labeled_neighbors(node).into_iter().find(|(l, _)| *l == label).map(|(_, n)| n)
}

/// Tries to extend the root correspondence to the two radius-`rho` balls.
fn match_balls<A: GraphGen, B: GraphGen>(a: &A, b: &B, rho: u32, beta: &[u8; 6]) -> bool {
    let map_label = |l: u8| beta[(l - 1) as usize];
    let mut phi: HashMap<A::Node, (B::Node, u32)> = HashMap::new();
    let mut used: HashMap<B::Node, A::Node> = HashMap::new();
    let mut order = vec![a.root()];
    phi.insert(a.root(), (b.root(), 0));
    used.insert(b.root(), a.root());
    let mut next = 0;
    while next < order.len() {
        let u = order[next].clone();
        let (fu, d) = phi[&u].clone();
        let nbrs = a.labeled_neighbors(&u);
        let mut labels: Vec<u8> = nbrs.iter().map(|(l, _)| *l).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != nbrs.len() || labels.len() != 6 {
            return false;
        }
        for (l, v) in nbrs {
            let Some(w) = labelled_step(b, &fu, map_label(l)) else {
                return false;
            };
            match phi.get(&v) {
                Some((fv, _)) => {
                    if *fv != w {
                        return false;
                    }
                }
                None if d < rho => {
                    if used.contains_key(&w) {
                        return false;
                    }
                    phi.insert(v.clone(), (w.clone(), d + 1));
                    used.insert(w, v.clone());
                    order.push(v);
                }
                None => {
                    // Leaves the ball on one side; it must leave on the other.
                    if used.contains_key(&w) {
                        return false;
                    }
                }
            }
        }
        next += 1;
    }
    true
}

fn walk_colours<G: GraphGen>(g: &G, colours: &[u8]) -> bool {
    let root = g.root();
    let mut cur = root.clone();
    for &c in colours {
        match labelled_step(g, &cur, c) {
            Some(n) => cur = n,
            None => return false,
        }
    }
    cur == root
}

/// Compares the colour-labelled ball of radius `rho` in the dual graph of a
/// 3.6.3.6 cover patch with the ball of the Cayley graph of `H x H`.
pub fn cayley_hxh_local_iso(cp: &CoverPatch, rho: u32) -> Result<LocalIsoReport> {
    let colouring = color_dual_edges(cp)?;
    let dual: PatchDualGraph = dual_graph_of(cp).with_labels(colouring.colours());
    let dual_ball = crate::ends::ball(&dual, rho + 1, usize::MAX)?;
    if dual_ball.nodes.keys().any(|&f| !dual.is_complete(f)) {
        return Err(Error::InvalidParameter(format!(
            "patch of radius {} too small for rho = {}",
            cp.radius(),
            rho
        )));
    }
    let cayley = product_graph(HexCayleyH, HexCayleyH);
    let cayley_ball = crate::ends::ball(&cayley, rho, usize::MAX)?.len();
    let dual_len = dual_ball.nodes.values().filter(|&&d| d <= rho).count();
    let bijection = if dual_len == cayley_ball {
        parity_bijections().into_iter().find(|beta| match_balls(&dual, &cayley, rho, beta))
    } else {
        None
    };
    let (squares_close, hexagons_close) = match bijection {
        Some(beta) => {
            let mut inv = [0u8; 6];
            for (c, &g) in beta.iter().enumerate() {
                inv[(g - 1) as usize] = c as u8 + 1;
            }
            let col = |gen: u8| inv[(gen - 1) as usize];
            let squares = [1u8, 3, 5]
                .iter()
                .all(|&i| [2u8, 4, 6].iter().all(|&j| walk_colours(&dual, &[col(i), col(j), col(i), col(j)])));
            let hexagons = [[1u8, 3, 5], [2, 4, 6]].iter().all(|t| {
                let w: Vec<u8> = t.iter().chain(t.iter()).map(|&g| col(g)).collect();
                walk_colours(&dual, &w)
            });
            (squares, hexagons)
        }
        None => (false, false),
    };
    Ok(LocalIsoReport {
        rho,
        dual_ball: dual_len,
        cayley_ball,
        bijection,
        squares_close,
        hexagons_close,
    })
}

/// `a·v + b` over the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Linear {
    pub a: Ratio<i64>,
    pub b: Ratio<i64>,
}

impl Linear {
    pub fn new(a: Ratio<i64>, b: Ratio<i64>) -> Self {
        Linear { a, b }
    }

    pub fn constant(b: i64) -> Self {
        Linear::new(Ratio::from_integer(0), Ratio::from_integer(b))
    }

    pub fn v() -> Self {
        Linear::new(Ratio::from_integer(1), Ratio::from_integer(0))
    }

    pub fn scale(self, k: Ratio<i64>) -> Linear {
        Linear::new(self.a * k, self.b * k)
    }

    pub fn at(self, v: i64) -> Ratio<i64> {
        self.a * v + self.b
    }
}

impl Add for Linear {
    type Output = Linear;

    fn add(self, o: Linear) -> Linear {
        Linear::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for Linear {
    type Output = Linear;

    fn sub(self, o: Linear) -> Linear {
        Linear::new(self.a - o.a, self.b - o.b)
    }
}

impl fmt::Display for Linear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*v + {}", self.a, self.b)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EulerReport {
    pub hexagons: String,
    pub chi: String,
    /// `6h + 8 = 4v + 20` holds identically once `h` is solved for.
    pub edge_identity: bool,
    pub chi_formula_matches: bool,
    pub chi_at_0: String,
    pub chi_at_3: String,
    /// The unique rational root of `chi(v) = 2`.
    pub root: String,
    /// Admissible `v >= 0` with `chi(v) = 2`.
    pub solutions: Vec<i64>,
}

impl EulerReport {
    pub fn pass(&self) -> bool {
        self.edge_identity && self.chi_formula_matches && self.solutions.is_empty()
    }
}

impl fmt::Display for EulerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "h = {}", self.hexagons)?;
        writeln!(f, "6h + 8 = 4v + 20: {}", self.edge_identity)?;
        writeln!(f, "chi = V - E + F = {}", self.chi)?;
        writeln!(f, "chi(0) = {}, chi(3) = {}", self.chi_at_0, self.chi_at_3)?;
        writeln!(f, "chi(v) = 2 only at v = {}", self.root)?;
        write!(f, "solutions with v >= 0: {:?}", self.solutions)
    }
}

/// Planar region bounded by the four hexagons of identification A: four
/// vertices of degree 3, four of degree 2, `v` of degree 4, one outer
/// octagon and `h` hexagons.
pub fn euler_contradiction_check() -> EulerReport {
    let r = |n: i64, d: i64| Ratio::new(n, d);
    let v = Linear::v();
    // Double count of edges: 6h + 8 = 4v + 3*4 + 2*4.
    let degree_sum = v.scale(r(4, 1)) + Linear::constant(12 + 8);
    let h = (degree_sum - Linear::constant(8)).scale(r(1, 6));
    let edge_identity = h.scale(r(6, 1)) + Linear::constant(8) == v.scale(r(4, 1)) + Linear::constant(20);
    let vertices = v + Linear::constant(8);
    let edges = degree_sum.scale(r(1, 2));
    let faces = h + Linear::constant(1);
    let chi = vertices - edges + faces;
    let chi_formula_matches = chi == Linear::new(r(-1, 3), r(1, 1));
    let root = (r(2, 1) - chi.b) / chi.a;
    let solutions = if root.is_integer() && root >= r(0, 1) {
        vec![root.to_integer()]
    } else {
        Vec::new()
    };
    EulerReport {
        hexagons: h.to_string(),
        chi: chi.to_string(),
        edge_identity,
        chi_formula_matches,
        chi_at_0: chi.at(0).to_string(),
        chi_at_3: chi.at(3).to_string(),
        root: root.to_string(),
        solutions,
    }
}

#[derive(Clone, Debug)]
pub struct LochNessOptions {
    pub radii: Vec<u32>,
    pub schedule: Vec<(u32, u32)>,
    pub dual_hypothesis: bool,
    pub cap: usize,
}

impl Default for LochNessOptions {
    fn default() -> Self {
        LochNessOptions {
            radii: CERTIFICATE_RADII.to_vec(),
            schedule: DEFAULT_SCHEDULE.to_vec(),
            dual_hypothesis: false,
            cap: DEFAULT_MAX_ELEMENTS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Consistent,
    HypothesesNotMet,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent with Loch Ness monster",
            Verdict::HypothesesNotMet => "hypotheses not met",
            Verdict::Inconclusive => "inconclusive at the tested scales",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LochNessReport {
    pub tiling: String,
    pub dual_hypothesis: bool,
    /// Faces are convex polygons; assumed for the built tilings.
    pub convex_faces: bool,
    /// Face sizes (vertex degrees with the dual hypothesis) that occur.
    pub distinct_sizes: Vec<usize>,
    pub translations_witnessed: bool,
    pub branch: BranchReport,
    pub branch_points: bool,
    pub one_end: Option<OneEndReport>,
    pub one_end_error: Option<String>,
    pub genus_table: Vec<PatchRow>,
    pub genus_error: Option<String>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl LochNessReport {
    pub fn hypotheses_met(&self) -> bool {
        self.convex_faces && self.distinct_sizes.len() >= 2 && self.translations_witnessed
    }

    pub fn genus_nondecreasing(&self) -> bool {
        let g: Vec<Option<i64>> = self.genus_table.iter().map(|r| r.genus.parse().ok()).collect();
        g.iter().all(Option::is_some) && g.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn final_genus(&self) -> Option<i64> {
        self.genus_table.last().and_then(|r| r.genus.parse().ok())
    }

    pub fn cap_exceeded(&self) -> bool {
        self.one_end_error.is_some() || self.genus_error.is_some()
    }
}

impl fmt::Display for LochNessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tiling: {}", self.tiling)?;
        let side = if self.dual_hypothesis { "vertex degrees" } else { "face sizes" };
        writeln!(f, "hypothesis: convex faces (assumed): {}", self.convex_faces)?;
        writeln!(f, "hypothesis: distinct {} {:?}: {}", side, self.distinct_sizes, self.distinct_sizes.len() >= 2)?;
        writeln!(f, "hypothesis: two independent translations witnessed: {}", self.translations_witnessed)?;
        writeln!(f, "(p,q) = ({},{})", self.branch.p, self.branch.q)?;
        for c in &self.branch.faces {
            writeln!(f, "face class of size {}: index {}", c.size, c.index)?;
        }
        for c in &self.branch.vertices {
            writeln!(f, "vertex class of degree {}: index {}", c.size, c.index)?;
        }
        writeln!(f, "branch points: {}", self.branch_points)?;
        match (&self.one_end, &self.one_end_error) {
            (Some(r), _) => {
                writeln!(f, "one-end probes on the cover dual graph ({}):", crate::ends::EndsProbeResult::HEADER)?;
                for p in &r.probes {
                    writeln!(f, "{}", p)?;
                }
                writeln!(f, "{}", r.summary())?;
            }
            (None, Some(e)) => writeln!(f, "one-end probes: {}", e)?,
            (None, None) => writeln!(f, "one-end probes: skipped")?,
        }
        writeln!(f, "genus table ({}):", PatchRow::HEADER)?;
        for row in &self.genus_table {
            writeln!(f, "{}", row)?;
        }
        if let Some(e) = &self.genus_error {
            writeln!(f, "genus table: {}", e)?;
        }
        for n in &self.notes {
            writeln!(f, "note: {}", n)?;
        }
        write!(f, "verdict: {}", self.verdict)
    }
}

pub fn loch_ness_certify(pm: &PeriodicMap, opts: &LochNessOptions) -> Result<LochNessReport> {
    if opts.radii.is_empty() || opts.radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("radii must be nonempty and strictly increasing".into()));
    }
    let mon = Monodromy::new(pm);
    let branch = branch_orders(pm);
    let classes = if opts.dual_hypothesis { &branch.vertices } else { &branch.faces };
    let mut distinct_sizes: Vec<usize> = classes.iter().map(|c| c.size).collect();
    distinct_sizes.sort_unstable();
    distinct_sizes.dedup();
    let branch_points = if opts.dual_hypothesis {
        branch.has_vertex_branch_point()
    } else {
        branch.has_face_branch_point()
    };
    let translations_witnessed = mon.kernel_rank_witness().map(|w| w.is_valid()).unwrap_or(false);

    let mut report = LochNessReport {
        tiling: pm.name().to_string(),
        dual_hypothesis: opts.dual_hypothesis,
        convex_faces: true,
        distinct_sizes,
        translations_witnessed,
        branch,
        branch_points,
        one_end: None,
        one_end_error: None,
        genus_table: Vec::new(),
        genus_error: None,
        verdict: Verdict::HypothesesNotMet,
        notes: vec![
            "one end is probed, not proven; the homeomorphism type follows from the classification of surfaces"
                .into(),
        ],
    };
    if !report.hypotheses_met() {
        return Ok(report);
    }

    match CoverPatch::build(&mon, *opts.radii.last().unwrap(), opts.cap) {
        Ok(patch) => report.genus_table = patch.table(&opts.radii),
        Err(e @ Error::CapExceeded { .. }) => report.genus_error = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    match one_end_certificate(&cover_dual_graph(&mon), &opts.schedule, opts.cap) {
        Ok(r) => report.one_end = Some(r),
        Err(e @ Error::CapExceeded { .. }) => report.one_end_error = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    let one_end = report.one_end.as_ref().is_some_and(|r| r.pass);
    let genus = report.genus_error.is_none() && report.genus_nondecreasing() && report.final_genus() >= Some(1);
    if !branch_points {
        report.notes.push("no branch points found".into());
    }
    report.verdict = if one_end && genus && branch_points {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    };
    Ok(report)
}
