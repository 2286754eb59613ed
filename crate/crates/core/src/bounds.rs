//! Red/blue cones, the cone route to `M_{l,k}`, the neighborhood probe and
//! stochastic search for balanced colorings avoiding a pattern.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cgr::{read_cgr, write_cgr, CgrError};
use crate::drc::{derive_seed, greedy_homogeneous};
use crate::graph::{binomial2, Color, ColoredCompleteGraph, BLUE, RED};
use crate::pattern::{m_pattern, verify_embedding, Embedding, Pattern};
use crate::rational::Rational;
use crate::search::{count_embeddings, count_embeddings_through, find_color_consistent, SearchOutcome};
use crate::vertex_set::VertexSet;

/// Largest `C(n, l)²` the exact cone-set search accepts.
pub const EXACT_CONE_LIMIT: u128 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("expected a 2-colored host, got {0} colors")]
    NotTwoColors(usize),
    #[error("need at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("eps = {0} outside (0, 1/2]")]
    EpsOutOfRange(Rational),
    #[error("exact search over C({n}, {l})^2 pairs of sets exceeds the limit")]
    ExactTooLarge { n: usize, l: usize },
    #[error("no cone sets with |A| = |B| = {0}")]
    NoCone(usize),
    #[error("cone of size {cone} holds no monochromatic {k}-clique (largest greedy clique {clique})")]
    CliqueTooSmall { cone: usize, clique: usize, k: usize },
}

fn check_two_colors(g: &ColoredCompleteGraph) -> Result<(), BoundsError> {
    if g.r() != 2 {
        return Err(BoundsError::NotTwoColors(g.r()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeWitness {
    pub x: usize,
    pub y: usize,
    pub s: Vec<usize>,
}

impl ConeWitness {
    pub fn verify(&self, g: &ColoredCompleteGraph) -> bool {
        self.x != self.y
            && self
                .s
                .iter()
                .all(|&v| v != self.x && v != self.y && g.color(v, self.x) == RED && g.color(v, self.y) == BLUE)
    }
}

/// `S = N_red(x) ∩ N_blue(y)` maximized over ordered pairs `x ≠ y`; ties go
/// to the smallest `(x, y)`.
pub fn best_red_blue_cone(g: &ColoredCompleteGraph) -> Result<ConeWitness, BoundsError> {
    check_two_colors(g)?;
    if g.n() < 2 {
        return Err(BoundsError::TooFewVertices(g.n()));
    }
    let mut best = (0usize, 0usize, 1usize);
    let mut best_len = None;
    for x in 0..g.n() {
        for y in 0..g.n() {
            if x == y {
                continue;
            }
            let len = g.neighbors(x, RED).intersection_len(g.neighbors(y, BLUE));
            if best_len.map_or(true, |b| len > b) {
                best_len = Some(len);
                best = (len, x, y);
            }
        }
    }
    let (_, x, y) = best;
    let s = g.neighbors(x, RED).intersection(g.neighbors(y, BLUE)).to_vec();
    let w = ConeWitness { x, y, s };
    assert!(w.verify(g), "cone witness failed its own check");
    Ok(w)
}

/// `√(1−eps) − (1−eps)`, for display only.
pub fn cone_constant(eps: &Rational) -> Result<f64, BoundsError> {
    if !eps.is_positive() || eps > &Rational::new(1, 2).unwrap() {
        return Err(BoundsError::EpsOutOfRange(eps.clone()));
    }
    let a = 1.0 - eps.to_f64();
    Ok(a.sqrt() - a)
}

/// `⌊(√(1−eps) − (1−eps))·n⌋`, exactly, for `0 ≤ eps ≤ 1`.
pub fn lemma_bound_floor(eps: &Rational, n: usize) -> i64 {
    assert!(!(eps < &Rational::zero()) && !(eps > &Rational::one()), "eps outside [0, 1]");
    let a = &Rational::one() - eps;
    let n_r = Rational::from(n as u64);
    // j ≤ n(√a − a)  ⇔  (j/n + a)² ≤ a, both sides being nonnegative
    let holds = |j: i64| {
        let lhs = &(&Rational::from_integer(j) / &n_r) + &a;
        &lhs * &lhs <= a
    };
    if n == 0 {
        return 0;
    }
    let mut j = 0;
    while holds(j + 1) {
        j += 1;
    }
    j
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeSetsWitness {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub s: Vec<usize>,
}

impl ConeSetsWitness {
    pub fn verify(&self, g: &ColoredCompleteGraph) -> bool {
        let mut seen = vec![false; g.n()];
        for &v in self.a.iter().chain(&self.b).chain(&self.s) {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        self.s
            .iter()
            .all(|&v| self.a.iter().all(|&x| g.color(v, x) == RED) && self.b.iter().all(|&y| g.color(v, y) == BLUE))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeMode {
    Exact,
    Heuristic,
}

fn common(g: &ColoredCompleteGraph, vs: &[usize], c: Color) -> VertexSet {
    let mut out = g.vertices();
    for &v in vs {
        out.intersect_with(g.neighbors(v, c));
    }
    out
}

fn cone_from(g: &ColoredCompleteGraph, a: Vec<usize>, b: Vec<usize>) -> ConeSetsWitness {
    let mut s = common(g, &a, RED);
    s.intersect_with(&common(g, &b, BLUE));
    for &v in a.iter().chain(&b) {
        s.remove(v);
    }
    ConeSetsWitness { a, b, s: s.to_vec() }
}

fn subsets(items: &[usize], l: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(items: &[usize], start: usize, l: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == l {
            f(cur);
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, i + 1, l, cur, f);
            cur.pop();
        }
    }
    rec(items, 0, l, &mut Vec::with_capacity(l), f);
}

/// Disjoint `A`, `B` of size `l` and `S` red-complete to `A`, blue-complete
/// to `B`, with `|S|` as large as the mode can find. Exact mode tries every
/// pair `(A, B)`; heuristic mode takes the top-degree sets and, for every
/// vertex `v`, greedy sets inside its red and blue neighborhoods.
pub fn best_cone_sets(g: &ColoredCompleteGraph, l: usize, mode: ConeMode) -> Result<Option<ConeSetsWitness>, BoundsError> {
    check_two_colors(g)?;
    let n = g.n();
    if 2 * l > n {
        return Ok(None);
    }
    let best = match mode {
        ConeMode::Exact => {
            let c = crate::drc::binomial(n, l);
            if c.saturating_mul(c) > EXACT_CONE_LIMIT {
                return Err(BoundsError::ExactTooLarge { n, l });
            }
            let all: Vec<usize> = (0..n).collect();
            let mut best: Option<ConeSetsWitness> = None;
            subsets(&all, l, &mut |a| {
                let red = common(g, a, RED);
                let rest: Vec<usize> = all.iter().copied().filter(|v| !a.contains(v)).collect();
                subsets(&rest, l, &mut |b| {
                    let mut s = red.intersection(&common(g, b, BLUE));
                    for &v in a.iter().chain(b) {
                        s.remove(v);
                    }
                    if best.as_ref().map_or(true, |w| s.len() > w.s.len()) {
                        best = Some(ConeSetsWitness {
                            a: a.to_vec(),
                            b: b.to_vec(),
                            s: s.to_vec(),
                        });
                    }
                });
            });
            best
        }
        ConeMode::Heuristic => heuristic_cone_sets(g, l),
    };
    if let Some(w) = &best {
        assert!(w.verify(g), "cone sets failed their own check");
    }
    Ok(best)
}

fn top_by_degree(g: &ColoredCompleteGraph, c: Color, l: usize, exclude: &[usize]) -> Vec<usize> {
    let mut vs: Vec<usize> = (0..g.n()).filter(|v| !exclude.contains(v)).collect();
    vs.sort_by(|&x, &y| g.degree(y, c).cmp(&g.degree(x, c)).then(x.cmp(&y)));
    vs.truncate(l);
    vs
}

fn heuristic_cone_sets(g: &ColoredCompleteGraph, l: usize) -> Option<ConeSetsWitness> {
    let a = top_by_degree(g, RED, l, &[]);
    let b = top_by_degree(g, BLUE, l, &a);
    let mut best = (a.len() == l && b.len() == l).then(|| cone_from(g, a, b));
    for v in 0..g.n() {
        let mut cur = g.vertices();
        cur.remove(v);
        let mut picked = Vec::with_capacity(2 * l);
        let mut sides = [Vec::new(), Vec::new()];
        for (side, c) in [(0, RED), (1, BLUE)] {
            for _ in 0..l {
                let pick = g
                    .neighbors(v, c)
                    .iter()
                    .filter(|u| !picked.contains(u))
                    .max_by_key(|&u| (cur.intersection_len(g.neighbors(u, c)), std::cmp::Reverse(u)));
                let Some(u) = pick else { break };
                cur.intersect_with(g.neighbors(u, c));
                picked.push(u);
                sides[side].push(u);
            }
        }
        if sides[0].len() < l || sides[1].len() < l {
            continue;
        }
        let [a, b] = sides;
        let w = cone_from(g, a, b);
        if best.as_ref().map_or(true, |x| w.s.len() > x.s.len()) {
            best = Some(w);
        }
    }
    best
}

/// `R(k)` for `k ≤ 4`, else the bound `4^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RamseyBound {
    pub value: u64,
    pub exact: bool,
}

pub fn ramsey_upper(k: u32) -> RamseyBound {
    assert!(k >= 1, "k must be positive");
    match k {
        1 => RamseyBound { value: 1, exact: true },
        2 => RamseyBound { value: 2, exact: true },
        3 => RamseyBound { value: 6, exact: true },
        4 => RamseyBound { value: 18, exact: true },
        _ => RamseyBound {
            value: 4u64.saturating_pow(k),
            exact: false,
        },
    }
}

/// Monochromatic `k`-clique in color `c` inside `within`, by depth-first
/// search. Vertices of `prefer` are tried first.
fn find_clique(
    g: &ColoredCompleteGraph,
    within: &VertexSet,
    prefer: &VertexSet,
    c: Color,
    k: usize,
) -> Option<Vec<usize>> {
    fn rec(g: &ColoredCompleteGraph, order: &[usize], cand: &VertexSet, c: Color, k: usize, cur: &mut Vec<usize>) -> bool {
        if cur.len() == k {
            return true;
        }
        for &v in order {
            if !cand.contains(v) {
                continue;
            }
            if cand.len() < k - cur.len() {
                return false;
            }
            cur.push(v);
            let mut next = cand.intersection(g.neighbors(v, c));
            // only later vertices in `order`, to avoid revisiting sets
            for &u in order.iter().take_while(|&&u| u != v) {
                next.remove(u);
            }
            if rec(g, order, &next, c, k, cur) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut order: Vec<usize> = within.intersection(prefer).to_vec();
    order.extend(within.difference(prefer).iter());
    let mut cur = Vec::with_capacity(k);
    rec(g, &order, within, c, k, &mut cur).then_some(cur)
}

/// `M_{l,k}` through cone sets: with `A` red-complete and `B` blue-complete
/// to `S`, a red `k`-clique in `S` and `L = B` give a copy, and so does a
/// blue `k`-clique with `L = A` after swapping the colors. The greedy clique
/// in `S` is tried first, then an exact clique search among the common blue
/// neighbors of `B` (red case) and common red neighbors of `A` (blue case).
pub fn find_m_via_cone(g: &ColoredCompleteGraph, l: usize, k: usize) -> Result<Embedding, BoundsError> {
    check_two_colors(g)?;
    assert!(k >= 1, "k must be positive");
    let c = crate::drc::binomial(g.n(), l);
    let mode = if c.saturating_mul(c) <= EXACT_CONE_LIMIT {
        ConeMode::Exact
    } else {
        ConeMode::Heuristic
    };
    let cone = best_cone_sets(g, l, mode)?.ok_or(BoundsError::NoCone(l))?;
    let s = VertexSet::from_iter_with_capacity(g.n(), cone.s.iter().copied());
    let trace = greedy_homogeneous(g, &s);
    let pattern = m_pattern(l, k);
    let build = |r_part: &[usize], clique_color: Color| {
        let l_part = if clique_color == RED { &cone.b } else { &cone.a };
        let other = if clique_color == RED { BLUE } else { RED };
        let vertex_map = l_part.iter().chain(r_part).copied().collect();
        let color_map = if l == 0 {
            vec![Some(clique_color), None]
        } else {
            vec![Some(clique_color), Some(other)]
        };
        Embedding { vertex_map, color_map }
    };
    let mut attempt = None;
    if trace.clique.len() >= k {
        let color = trace.color.unwrap_or(RED);
        attempt = Some(build(&trace.clique.take_first(k).to_vec(), color));
    }
    if attempt.is_none() {
        let mut red_zone = common(g, &cone.b, BLUE);
        let mut blue_zone = common(g, &cone.a, RED);
        for &v in cone.a.iter().chain(&cone.b) {
            red_zone.remove(v);
            blue_zone.remove(v);
        }
        if let Some(r) = find_clique(g, &red_zone, &s, RED, k) {
            attempt = Some(build(&r, RED));
        } else if let Some(r) = find_clique(g, &blue_zone, &s, BLUE, k) {
            attempt = Some(build(&r, BLUE));
        }
    }
    match attempt {
        Some(e) => {
            assert!(verify_embedding(g, &pattern, &e), "cone route built an invalid embedding");
            Ok(e)
        }
        None => Err(BoundsError::CliqueTooSmall {
            cone: cone.s.len(),
            clique: trace.clique.len(),
            k,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeResult {
    pub x: usize,
    pub y: usize,
    pub size: usize,
    /// `⌊ε(1−ε)n⌋` for the edge fraction `ε` of the red class.
    pub target: u64,
    pub edge_fraction: Rational,
}

/// Largest `|N(x) ∖ N(y) ∖ {x, y}|` for the graph formed by the red class.
pub fn conjecture_probe(g: &ColoredCompleteGraph) -> Result<ProbeResult, BoundsError> {
    let cone = best_red_blue_cone(g)?;
    let total = binomial2(g.n());
    let red = g.color_counts()[0];
    let eps = Rational::new(red as i64, total.max(1) as i64).expect("positive total");
    let target = (&(&eps * &(&Rational::one() - &eps)) * &Rational::from(g.n() as u64))
        .floor()
        .try_into()
        .expect("target fits");
    Ok(ProbeResult {
        x: cone.x,
        y: cone.y,
        size: cone.s.len(),
        target,
        edge_fraction: eps,
    })
}

#[derive(Debug, Clone)]
pub struct HuntOptions {
    /// Recoloring moves per restart.
    pub moves: u64,
    pub restarts: usize,
    /// Weight of one missing edge in the balance penalty; `None` means `n`.
    pub penalty_weight: Option<u64>,
    /// Budget of the exhaustive check run on every candidate.
    pub verify_budget: u64,
    pub start_temperature: f64,
}

impl Default for HuntOptions {
    fn default() -> Self {
        Self {
            moves: 200_000,
            restarts: 4,
            penalty_weight: None,
            verify_budget: crate::search::DEFAULT_BUDGET,
            start_temperature: 2.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HuntOutcome {
    pub graph: Option<ColoredCompleteGraph>,
    /// Index of the restart that produced `graph`.
    pub restart: Option<usize>,
    /// Smallest objective seen by each restart that ran.
    pub best_objective: Vec<u64>,
}

const EMBED_CAP: u64 = 1 << 40;

/// Simulated annealing over single-pair recolorings of `K_n` toward an
/// `eps`-balanced coloring with no copy of `pattern`. The objective is the
/// number of embeddings plus a weighted shortfall below `eps·C(n,2)` per
/// color. A candidate with objective 0 is returned only after exhaustive
/// search and an exact balance check. Restarts run concurrently; the
/// lowest-index success wins, so the result depends only on the seed.
pub fn lower_bound_hunt(pattern: &Pattern, eps: &Rational, n: usize, opts: &HuntOptions, seed: u64) -> HuntOutcome {
    let r = pattern.palette();
    assert!(r >= 2, "pattern palette must have at least two colors");
    let total = binomial2(n);
    let need = (eps * &Rational::from(total)).ceil().try_into().unwrap_or(u64::MAX);
    let weight = opts.penalty_weight.unwrap_or(n as u64);
    let winner = AtomicUsize::new(usize::MAX);

    let results: Vec<(Option<ColoredCompleteGraph>, u64)> = (0..opts.restarts)
        .into_par_iter()
        .map(|i| {
            if winner.load(Ordering::Relaxed) < i {
                return (None, u64::MAX);
            }
            let out = anneal(pattern, eps, n, r, need, weight, opts, derive_seed(seed, i as u64), || {
                winner.load(Ordering::Relaxed) < i
            });
            if out.0.is_some() {
                winner.fetch_min(i, Ordering::Relaxed);
            }
            out
        })
        .collect();
    let restart = results.iter().position(|(g, _)| g.is_some());
    HuntOutcome {
        graph: restart.and_then(|i| results[i].0.clone()),
        restart,
        best_objective: results.iter().map(|(_, b)| *b).collect(),
    }
}

#[allow(clippy::too_many_arguments)]
fn anneal(
    pattern: &Pattern,
    eps: &Rational,
    n: usize,
    r: usize,
    need: u64,
    weight: u64,
    opts: &HuntOptions,
    seed: u64,
    cancelled: impl Fn() -> bool,
) -> (Option<ColoredCompleteGraph>, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n < 2 {
        let g = ColoredCompleteGraph::from_fn(n.max(1), r, |_, _| 1).expect("valid dims");
        return (accept(g, pattern, eps, opts), 0);
    }
    let mut g = ColoredCompleteGraph::from_fn(n, r, |_, _| rng.gen_range(1..=r) as Color).expect("valid dims");
    let mut counts = g.color_counts();
    let shortfall = |counts: &[u64]| counts.iter().map(|&c| need.saturating_sub(c)).sum::<u64>();
    let mut emb = count_embeddings(&g, pattern, EMBED_CAP);
    let mut obj = emb + weight * shortfall(&counts);
    let mut best = obj;
    for step in 0..opts.moves {
        if obj == 0 {
            if let Some(found) = accept(g.clone(), pattern, eps, opts) {
                return (Some(found), 0);
            }
        }
        if step % 1024 == 0 && cancelled() {
            break;
        }
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        let old = g.color(u, v);
        let mut new = rng.gen_range(1..r) as Color;
        if new >= old {
            new += 1;
        }
        let before = count_embeddings_through(&g, pattern, u, v, EMBED_CAP);
        g.recolor(u, v, new);
        let after = count_embeddings_through(&g, pattern, u, v, EMBED_CAP);
        counts[old as usize - 1] -= 1;
        counts[new as usize - 1] += 1;
        let new_emb = emb + after - before;
        let new_obj = new_emb + weight * shortfall(&counts);
        let temp = opts.start_temperature * (1.0 - step as f64 / opts.moves as f64) + 1e-3;
        let delta = new_obj as f64 - obj as f64;
        if delta <= 0.0 || rng.gen::<f64>() < (-delta / temp).exp() {
            emb = new_emb;
            obj = new_obj;
            best = best.min(obj);
        } else {
            g.recolor(u, v, old);
            counts[old as usize - 1] += 1;
            counts[new as usize - 1] -= 1;
        }
    }
    if obj == 0 {
        if let Some(found) = accept(g, pattern, eps, opts) {
            return (Some(found), 0);
        }
    }
    (None, best)
}

fn accept(g: ColoredCompleteGraph, pattern: &Pattern, eps: &Rational, opts: &HuntOptions) -> Option<ColoredCompleteGraph> {
    let clean = matches!(find_color_consistent(&g, pattern, opts.verify_budget), Ok(SearchOutcome::Exhausted));
    (clean && g.is_eps_balanced(eps)).then_some(g)
}

/// Sidecar of a hunt certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub pattern: Pattern,
    pub eps: Rational,
    pub n: usize,
    pub seed: u64,
    pub verified: bool,
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Cgr(#[from] CgrError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("certificate does not hold: {0}")]
    Invalid(String),
}

/// Writes `<stem>.cgr` and `<stem>.json` into `dir`.
pub fn write_certificate(
    dir: &Path,
    stem: &str,
    g: &ColoredCompleteGraph,
    cert: &Certificate,
) -> Result<(PathBuf, PathBuf), CertificateError> {
    std::fs::create_dir_all(dir)?;
    let cgr = dir.join(format!("{stem}.cgr"));
    let json = dir.join(format!("{stem}.json"));
    std::fs::write(&cgr, write_cgr(g))?;
    std::fs::write(&json, serde_json::to_string_pretty(cert)? + "\n")?;
    Ok((cgr, json))
}

/// Re-reads a certificate and re-runs the exhaustive search and the balance
/// check.
pub fn check_certificate(cgr: &Path, json: &Path, budget: u64) -> Result<Certificate, CertificateError> {
    let g = read_cgr(&std::fs::read_to_string(cgr)?)?;
    let cert: Certificate = serde_json::from_str(&std::fs::read_to_string(json)?)?;
    if g.n() != cert.n {
        return Err(CertificateError::Invalid(format!("graph has {} vertices, sidecar says {}", g.n(), cert.n)));
    }
    if !g.is_eps_balanced(&cert.eps) {
        return Err(CertificateError::Invalid("coloring is not eps-balanced".into()));
    }
    match find_color_consistent(&g, &cert.pattern, budget) {
        Ok(SearchOutcome::Exhausted) => Ok(cert),
        Ok(SearchOutcome::Found(_)) => Err(CertificateError::Invalid("pattern embeds".into())),
        Err(e) => Err(CertificateError::Invalid(e.to_string())),
    }
}
