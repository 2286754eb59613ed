//! Dependent random choice and the multipartite extraction pipeline.
//!
//! [`drc_select`] is the bipartite selection step: sample a few vertices of
//! `B`, keep their common neighborhood in `A`, and delete one vertex from
//! every `k0`-subset whose common neighborhood in `B` is too small. Every set
//! it returns has been checked exactly. [`multipartite_drc`] nests it, and
//! [`pipeline::extract_all_colors_witness`] strings everything together.

mod homogeneous;
pub mod pipeline;
mod witness;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Color, ColoredCompleteGraph};
use crate::rational::Rational;
use crate::vertex_set::VertexSet;

pub use homogeneous::{
    find_mono_biclique, greedy_homogeneous, greedy_round_bound, homogeneous_grid, homogeneous_grid_with,
    refine_by_color_vector, GreedyTrace, GridOptions, DEFAULT_BICLIQUE_FANOUT, DEFAULT_GRID_BUDGET,
};
pub use pipeline::{extract_all_colors_witness, PipelineConfig, PipelineError, PipelineRun};
pub use witness::{witness_to_family_element, MultipartiteWitness, WitnessError};

/// Largest `t` tried by [`drc_feasible`].
pub const MAX_T: u32 = 64;
/// Above this many `k0`-subsets of `U`, bad subsets are found by sampling.
pub const ENUMERATE_LIMIT: u128 = 1_000_000;
/// Number of sampled `k0`-subsets when enumeration is too large.
pub const SAMPLE_SUBSETS: usize = 100_000;
/// Largest number of `k0`-subsets of `W` the final check will enumerate.
pub const VERIFY_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DrcParams {
    pub w: usize,
    pub k0: usize,
    pub beta: Rational,
    pub t: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DrcError {
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("no t <= {MAX_T} satisfies the selection inequality at stage {stage}")]
    Infeasible { stage: usize },
    #[error("no verified set after {attempts} attempts")]
    RetriesExhausted { attempts: u32 },
    #[error("exact check of C({w}, {k0}) subsets exceeds the verification limit")]
    Refused { w: usize, k0: usize },
    #[error("grid search exhausted without a solution")]
    GridExhausted,
    #[error("grid search budget of {0} nodes exhausted")]
    GridBudget(u64),
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent stream seed for a stage tag.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag))
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

/// `⌊√n⌋`.
pub fn isqrt(n: usize) -> usize {
    let mut x = (n as f64).sqrt() as usize;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// `⌊n^(2^-i)⌋`, by repeated integer square roots.
pub fn iterated_root(n: usize, i: u32) -> usize {
    (0..i).fold(n, |acc, _| isqrt(acc))
}

/// `⌊log_b n⌋` for a real base `b = 1/x` with `0 < x < 1`, exactly: the
/// largest `j` with `x^-j ≤ n`. Returns 0 when `x` is outside `(0, 1)`.
pub fn floor_log_inv(x: &Rational, n: usize) -> u32 {
    if !x.in_open_unit() {
        return 0;
    }
    let n = BigInt::from(n);
    let (p, q) = (x.numer().clone(), x.denom().clone());
    let (mut num, mut den) = (BigInt::from(1), BigInt::from(1));
    let mut j = 0;
    loop {
        num *= &q;
        den *= &p;
        if num > &n * &den {
            return j;
        }
        j += 1;
    }
}

/// `⌊log_r n⌋` for an integer base `r ≥ 2`.
pub fn floor_log(r: usize, n: usize) -> u32 {
    assert!(r >= 2);
    let mut j = 0;
    let mut acc = r as u128;
    while acc <= n as u128 {
        j += 1;
        acc *= r as u128;
    }
    j
}

/// Smallest `t ∈ 1..=64` with `m·eps^t − m^k0·beta^t ≥ w`, exactly.
pub fn drc_feasible(m: usize, eps: &Rational, k0: usize, beta: &Rational, w: usize) -> Option<u32> {
    let m_r = Rational::from(m as u64);
    let mk0 = m_r.pow(k0 as u32);
    let w_r = Rational::from(w as u64);
    (1..=MAX_T).find(|&t| {
        let lhs = &(&m_r * &eps.pow(t)) - &(&mk0 * &beta.pow(t));
        lhs >= w_r
    })
}

/// Smallest integer `x` with `x ≥ beta·size`.
fn needed(beta: &Rational, size: usize) -> usize {
    (beta * &Rational::from(size as u64))
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
}

/// Visits every `k`-subset of `items` in lexicographic order together with
/// the common `c`-neighborhood of the subset inside `b`. The visitor returns
/// false to stop early; `skip` filters out items.
fn for_each_subset<F, S>(
    host: &ColoredCompleteGraph,
    items: &[usize],
    k: usize,
    c: Color,
    b: &VertexSet,
    skip: &S,
    visit: &mut F,
) -> bool
where
    F: FnMut(&[usize], &VertexSet) -> bool,
    S: Fn(usize) -> bool,
{
    fn rec<F, S>(
        host: &ColoredCompleteGraph,
        items: &[usize],
        start: usize,
        k: usize,
        c: Color,
        common: &VertexSet,
        chosen: &mut Vec<usize>,
        skip: &S,
        visit: &mut F,
    ) -> bool
    where
        F: FnMut(&[usize], &VertexSet) -> bool,
        S: Fn(usize) -> bool,
    {
        if chosen.len() == k {
            return visit(chosen, common);
        }
        for idx in start..items.len() {
            if items.len() - idx < k - chosen.len() {
                break;
            }
            let v = items[idx];
            if skip(v) {
                continue;
            }
            let next = common.intersection(host.neighbors(v, c));
            chosen.push(v);
            let go_on = rec(host, items, idx + 1, k, c, &next, chosen, skip, visit);
            chosen.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
    let mut chosen = Vec::with_capacity(k);
    rec(host, items, 0, k, c, b, &mut chosen, skip, visit)
}

/// Does every `k0`-subset of `w` have at least `beta·|b|` common
/// `c`-neighbors in `b`? Exact; a prefix whose common neighborhood is
/// already too small rejects at once.
pub fn verify_drc_set(
    host: &ColoredCompleteGraph,
    w: &VertexSet,
    b: &VertexSet,
    c: Color,
    k0: usize,
    beta: &Rational,
) -> bool {
    let need = needed(beta, b.len());
    let items = w.to_vec();
    if items.len() < k0 {
        return true;
    }
    fn rec(
        host: &ColoredCompleteGraph,
        items: &[usize],
        start: usize,
        left: usize,
        c: Color,
        common: &VertexSet,
        need: usize,
    ) -> bool {
        if common.len() < need {
            return false;
        }
        if left == 0 {
            return true;
        }
        for idx in start..=items.len() - left {
            let next = common.intersection(host.neighbors(items[idx], c));
            if !rec(host, items, idx + 1, left - 1, c, &next, need) {
                return false;
            }
        }
        true
    }
    rec(host, &items, 0, k0, c, b, need)
}

/// Selects `W ⊆ a` of size `params.w` such that every `k0`-subset of `W` has
/// at least `beta·|b|` common `c`-neighbors in `b`.
///
/// Each attempt draws its own stream from `seed`. An attempt fails when the
/// surviving set is too small or, after sampled pruning, the exact check
/// finds a violation.
pub fn drc_select(
    host: &ColoredCompleteGraph,
    a: &VertexSet,
    b: &VertexSet,
    c: Color,
    params: &DrcParams,
    seed: u64,
    max_retries: u32,
) -> Result<VertexSet, DrcError> {
    let DrcParams { w, k0, ref beta, t } = *params;
    if k0 == 0 || w < k0 || t == 0 {
        return Err(DrcError::BadParams(format!("need w >= k0 >= 1 and t >= 1, got w={w} k0={k0} t={t}")));
    }
    if c == 0 || c as usize > host.r() {
        return Err(DrcError::BadParams(format!("color {c} outside the palette")));
    }
    if binomial(w, k0) > VERIFY_LIMIT {
        return Err(DrcError::Refused { w, k0 });
    }
    let b_list = b.to_vec();
    if b_list.is_empty() {
        return Err(DrcError::BadParams("B is empty".into()));
    }
    let need = needed(beta, b.len());
    for attempt in 0..max_retries {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, attempt as u64));
        let mut u = a.clone();
        for _ in 0..t {
            let x = b_list[rng.gen_range(0..b_list.len())];
            u.intersect_with(host.neighbors(x, c));
        }
        if u.len() < w {
            continue;
        }
        let u_list = u.to_vec();
        let mut deleted = host.empty_set();
        if binomial(u_list.len(), k0) <= ENUMERATE_LIMIT {
            let mut bad = Vec::new();
            for_each_subset(host, &u_list, k0, c, b, &|_| false, &mut |sub, common| {
                if common.len() < need {
                    bad.push(sub.to_vec());
                }
                true
            });
            for sub in bad {
                if sub.iter().all(|&v| !deleted.contains(v)) {
                    deleted.insert(*sub.last().unwrap());
                }
            }
        } else {
            for _ in 0..SAMPLE_SUBSETS {
                let sub: Vec<usize> = u_list.choose_multiple(&mut rng, k0).copied().collect();
                if sub.iter().any(|&v| deleted.contains(v)) {
                    continue;
                }
                let mut common = b.clone();
                for &v in &sub {
                    common.intersect_with(host.neighbors(v, c));
                }
                if common.len() < need {
                    deleted.insert(sub[rng.gen_range(0..k0)]);
                }
            }
        }
        u.difference_with(&deleted);
        if u.len() < w {
            continue;
        }
        let chosen = u.take_first(w);
        if verify_drc_set(host, &chosen, b, c, k0, beta) {
            return Ok(chosen);
        }
    }
    Err(DrcError::RetriesExhausted { attempts: max_retries })
}

/// How strictly [`multipartite_drc`] follows the inequality for `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrcMode {
    /// `t` must come from [`drc_feasible`]; otherwise the stage is infeasible.
    Strict,
    /// Falls back to `t = ⌊2^-(i-1)·log_r n / 3⌋` (at least 1) when no
    /// feasible `t` exists, and `k0` is at least 2. The exact check of the
    /// selected set is still mandatory.
    Desk,
}

/// Most frequent color between `a` and `b` (smallest color on ties).
pub fn most_common_color(host: &ColoredCompleteGraph, a: &VertexSet, b: &VertexSet) -> Color {
    (1..=host.r() as Color)
        .map(|c| (a.iter().map(|v| host.neighbors(v, c).intersection_len(b)).sum::<usize>(), c))
        .max_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)))
        .map(|(_, c)| c)
        .expect("palette is nonempty")
}

/// Nested selection `a = A_0 ⊇ A_1 ⊇ ... ⊇ A_y = W` against `bs[0..y]`.
/// Stage `i` uses the most common color `c_i` between `A_{i-1}` and `B_i`,
/// `w = ⌊n^(2^-i)⌋`, `k0 = ⌊log_r n / 8⌋`, `beta = 1/⌊√n⌋` and the smallest
/// feasible `t` for density `1/r`.
pub fn multipartite_drc(
    host: &ColoredCompleteGraph,
    a: &VertexSet,
    bs: &[VertexSet],
    r: usize,
    seed: u64,
    mode: DrcMode,
) -> Result<(VertexSet, Vec<Color>), DrcError> {
    let n = a.len();
    if n == 0 || bs.iter().any(|b| b.is_empty()) {
        return Err(DrcError::BadParams("empty vertex set".into()));
    }
    if r < 2 {
        return Err(DrcError::BadParams("need at least two colors".into()));
    }
    let log = floor_log(r, n) as usize;
    let k0 = match mode {
        DrcMode::Strict => (log / 8).max(1),
        DrcMode::Desk => (log / 8).max(2),
    };
    let root = isqrt(n).max(1);
    let beta = Rational::new(1, root as i64).expect("positive root");
    let eps = Rational::new(1, r as i64).expect("r >= 2");
    let mut current = a.clone();
    let mut colors = Vec::with_capacity(bs.len());
    for (i, b) in bs.iter().enumerate() {
        let stage = i + 1;
        let c = most_common_color(host, &current, b);
        let m = current.len();
        let w = iterated_root(n, stage as u32).max(k0);
        let t = match (drc_feasible(m, &eps, k0, &beta, w), mode) {
            (Some(t), _) => t,
            (None, DrcMode::Strict) => return Err(DrcError::Infeasible { stage }),
            (None, DrcMode::Desk) => ((log >> (stage - 1)) / 3).max(1) as u32,
        };
        let params = DrcParams {
            w,
            k0,
            beta: beta.clone(),
            t,
        };
        current = drc_select(host, &current, b, c, &params, derive_seed(seed, stage as u64), 10)?;
        colors.push(c);
    }
    // probe: random k0-subsets of W against every B_i
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX));
    let w_list = current.to_vec();
    for _ in 0..256.min(binomial(w_list.len(), k0) as usize) {
        let sub: Vec<usize> = w_list.choose_multiple(&mut rng, k0).copied().collect();
        for (b, &c) in bs.iter().zip(&colors) {
            let mut common = b.clone();
            for &v in &sub {
                common.intersect_with(host.neighbors(v, c));
            }
            assert!(common.len() >= needed(&beta, b.len()), "probe contradicts exact check");
        }
    }
    Ok((current, colors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{monochromatic, random_coloring, BLUE, RED};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn feasibility_examples() {
        assert_eq!(drc_feasible(1024, &q("1/2"), 2, &q("1/32"), 4), Some(3));
        // t=3 gives 128 - 32 = 96, and larger t only shrinks the left side
        assert_eq!(drc_feasible(1024, &q("1/2"), 2, &q("1/32"), 96), Some(3));
        assert_eq!(drc_feasible(1024, &q("1/2"), 2, &q("1/32"), 97), None);
        assert_eq!(drc_feasible(100, &q("1"), 1, &q("1/2"), 50), Some(1));
        for beta in ["1/10", "1/2", "9/10"] {
            assert_eq!(drc_feasible(10, &q("1/10"), 5, &q(beta), 10), None);
        }
    }

    #[test]
    fn logs_are_exact() {
        assert_eq!(floor_log(2, 1024), 10);
        assert_eq!(floor_log(2, 1023), 9);
        assert_eq!(floor_log(3, 3000), 7);
        assert_eq!(floor_log_inv(&q("1/2"), 2000), 10);
        assert_eq!(floor_log_inv(&q("1/3"), 3000), 7);
        assert_eq!(floor_log_inv(&q("2/3"), 10), 5);
        assert_eq!(floor_log_inv(&q("1"), 10), 0);
        assert_eq!(isqrt(2000), 44);
        assert_eq!(isqrt(49), 7);
        assert_eq!(iterated_root(4096, 2), 8);
    }

    #[test]
    fn complete_bipartite_selects_prefix() {
        let g = ColoredCompleteGraph::from_fn(20, 2, |u, v| if (u < 10) != (v < 10) { RED } else { BLUE }).unwrap();
        let a = VertexSet::from_iter_with_capacity(20, 0..10);
        let b = VertexSet::from_iter_with_capacity(20, 10..20);
        let p = DrcParams {
            w: 4,
            k0: 2,
            beta: q("1/2"),
            t: 2,
        };
        let w = drc_select(&g, &a, &b, RED, &p, 1, 3).unwrap();
        assert_eq!(w.to_vec(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn absent_color_exhausts_retries() {
        let g = monochromatic(30, 2, RED).unwrap();
        let a = VertexSet::from_iter_with_capacity(30, 0..15);
        let b = VertexSet::from_iter_with_capacity(30, 15..30);
        let p = DrcParams {
            w: 2,
            k0: 2,
            beta: q("1/4"),
            t: 1,
        };
        assert_eq!(
            drc_select(&g, &a, &b, BLUE, &p, 0, 5),
            Err(DrcError::RetriesExhausted { attempts: 5 })
        );
    }

    #[test]
    fn refuses_unverifiable_sizes() {
        let g = monochromatic(4, 1, 1).unwrap();
        let all = g.vertices();
        let p = DrcParams {
            w: 1000,
            k0: 5,
            beta: q("1/2"),
            t: 1,
        };
        assert_eq!(drc_select(&g, &all, &all, 1, &p, 0, 1), Err(DrcError::Refused { w: 1000, k0: 5 }));
    }

    #[test]
    fn selected_sets_verify() {
        let g = random_coloring(400, 2, &[q("1/2"), q("1/2")], 5).unwrap();
        let a = VertexSet::from_iter_with_capacity(400, 0..200);
        let b = VertexSet::from_iter_with_capacity(400, 200..400);
        let p = DrcParams {
            w: 6,
            k0: 2,
            beta: q("1/8"),
            t: 2,
        };
        let w = drc_select(&g, &a, &b, RED, &p, 9, 10).unwrap();
        assert_eq!(w.len(), 6);
        assert!(w.is_subset(&a));
        assert!(verify_drc_set(&g, &w, &b, RED, 2, &q("1/8")));
    }

    #[test]
    fn multipartite_single_stage() {
        let g = random_coloring(600, 2, &[q("1/2"), q("1/2")], 3).unwrap();
        let a = VertexSet::from_iter_with_capacity(600, 0..300);
        let b = VertexSet::from_iter_with_capacity(600, 300..600);
        let (w, colors) = multipartite_drc(&g, &a, &[b.clone()], 2, 11, DrcMode::Desk).unwrap();
        assert_eq!(colors.len(), 1);
        assert!(w.is_subset(&a));
        assert!(verify_drc_set(&g, &w, &b, colors[0], 2, &Rational::new(1, isqrt(300) as i64).unwrap()));
    }

    #[test]
    fn strict_mode_reports_infeasibility() {
        // n = 4: beta = eps = 1/2 and k0 = 1 make the left side zero
        let g = random_coloring(8, 2, &[q("1/2"), q("1/2")], 3).unwrap();
        let a = VertexSet::from_iter_with_capacity(8, 0..4);
        let b = VertexSet::from_iter_with_capacity(8, 4..8);
        assert_eq!(
            multipartite_drc(&g, &a, &[b], 2, 0, DrcMode::Strict),
            Err(DrcError::Infeasible { stage: 1 })
        );
    }
}
