//! Edge-colored complete graphs and their generators.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::rational::Rational;
use crate::vertex_set::VertexSet;

/// Colors are 1-based: a graph with `r` colors uses `1..=r`.
pub type Color = u8;

pub const MAX_COLORS: usize = 64;

/// Red and blue in the two-color generators.
pub const RED: Color = 1;
pub const BLUE: Color = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex count must be positive")]
    NoVertices,
    #[error("color count must be in 1..={MAX_COLORS}, got {0}")]
    BadColorCount(usize),
    #[error("pair ({u}, {v}) listed more than once")]
    DuplicatePair { u: usize, v: usize },
    #[error("pair ({u}, {v}) has no color")]
    MissingPair { u: usize, v: usize },
    #[error("pair ({u}, {v}) has color {color}, outside 1..={r}")]
    ColorOutOfRange { u: usize, v: usize, color: usize, r: usize },
    #[error("loop edge at vertex {0}")]
    LoopEdge(usize),
    #[error("vertex {v} out of range for n = {n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("{0} is not congruent to 1 mod 4")]
    NotOneModFour(u64),
    #[error("prime power {0} has exponent above 2; only p and p^2 are supported")]
    UnsupportedPrimePower(u64),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weight {0} is negative")]
    NegativeWeight(Rational),
    #[error("weights sum to {0}, not 1")]
    WeightSum(Rational),
    #[error("weight denominators too large for exact sampling")]
    WeightPrecision,
}

/// An `r`-edge-coloring of `K_n`, stored as one adjacency bitset per
/// (color, vertex). The masks of different colors are disjoint and together
/// cover every non-loop pair.
#[derive(Clone, PartialEq, Eq)]
pub struct ColoredCompleteGraph {
    n: usize,
    r: usize,
    adj: Vec<VertexSet>,
}

impl std::fmt::Debug for ColoredCompleteGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ColoredCompleteGraph(n={}, r={}", self.n, self.r)?;
        if self.n <= 12 {
            write!(f, ", pairs={:?}", self.pairs().collect::<Vec<_>>())?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalanceReport {
    pub per_color_counts: Vec<u64>,
    pub total: u64,
    pub epsilon_star: Rational,
}

pub fn binomial2(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

fn check_dims(n: usize, r: usize) -> Result<(), GraphError> {
    if n == 0 {
        return Err(GraphError::NoVertices);
    }
    if r == 0 || r > MAX_COLORS {
        return Err(GraphError::BadColorCount(r));
    }
    Ok(())
}

impl ColoredCompleteGraph {
    /// Builds a graph from an explicit list of `(u, v, color)` triples, one per
    /// unordered pair.
    pub fn new(n: usize, r: usize, pair_colors: &[(usize, usize, usize)]) -> Result<Self, GraphError> {
        check_dims(n, r)?;
        let mut seen = vec![false; n * n];
        let mut g = Self::blank(n, r);
        for &(u, v, c) in pair_colors {
            if u == v {
                return Err(GraphError::LoopEdge(u));
            }
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { v: x, n });
                }
            }
            if c == 0 || c > r {
                return Err(GraphError::ColorOutOfRange { u, v, color: c, r });
            }
            let (a, b) = (u.min(v), u.max(v));
            if seen[a * n + b] {
                return Err(GraphError::DuplicatePair { u: a, v: b });
            }
            seen[a * n + b] = true;
            g.set(a, b, c as Color);
        }
        for a in 0..n {
            for b in a + 1..n {
                if !seen[a * n + b] {
                    return Err(GraphError::MissingPair { u: a, v: b });
                }
            }
        }
        Ok(g)
    }

    /// Builds a graph by evaluating `color(u, v)` for every `u < v`.
    pub fn from_fn<F>(n: usize, r: usize, mut color: F) -> Result<Self, GraphError>
    where
        F: FnMut(usize, usize) -> Color,
    {
        check_dims(n, r)?;
        let mut g = Self::blank(n, r);
        // Rows are filled 64 at a time so that the mirrored bits of column v
        // land in one word of row v; `color` still sees pairs in order.
        const BLOCK: usize = 64;
        let mut buf = vec![0 as Color; BLOCK * n];
        for start in (0..n).step_by(BLOCK) {
            let end = (start + BLOCK).min(n);
            for u in start..end {
                let row = &mut buf[(u - start) * n..(u - start + 1) * n];
                for v in u + 1..n {
                    let c = color(u, v);
                    if c == 0 || c as usize > r {
                        return Err(GraphError::ColorOutOfRange { u, v, color: c as usize, r });
                    }
                    row[v] = c;
                    g.adj[(c as usize - 1) * n + u].insert(v);
                }
            }
            let mut masks = vec![0u64; r];
            for v in start + 1..n {
                masks.iter_mut().for_each(|m| *m = 0);
                for u in start..end.min(v) {
                    masks[buf[(u - start) * n + v] as usize - 1] |= 1 << (u - start);
                }
                for (c, &m) in masks.iter().enumerate() {
                    if m != 0 {
                        g.adj[c * n + v].or_word(start / BLOCK, m);
                    }
                }
            }
        }
        Ok(g)
    }

    fn blank(n: usize, r: usize) -> Self {
        Self {
            n,
            r,
            adj: vec![VertexSet::new(n); n * r],
        }
    }

    fn set(&mut self, u: usize, v: usize, c: Color) {
        let base = (c as usize - 1) * self.n;
        self.adj[base + u].insert(v);
        self.adj[base + v].insert(u);
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn empty_set(&self) -> VertexSet {
        VertexSet::new(self.n)
    }

    /// Color of the pair `{u, v}`. Panics on a loop.
    #[inline]
    pub fn color(&self, u: usize, v: usize) -> Color {
        assert_ne!(u, v, "loops have no color");
        for c in 0..self.r {
            if self.adj[c * self.n + u].contains(v) {
                return c as Color + 1;
            }
        }
        unreachable!("pair ({u}, {v}) uncolored")
    }

    /// Borrowed color-`c` neighborhood of `v`.
    #[inline]
    pub fn neighbors(&self, v: usize, c: Color) -> &VertexSet {
        &self.adj[(c as usize - 1) * self.n + v]
    }

    /// Vertices joined to `v` in color `c`; empty for colors outside `1..=r`.
    pub fn color_neighborhood(&self, v: usize, c: Color) -> VertexSet {
        if c == 0 || c as usize > self.r {
            return self.empty_set();
        }
        self.neighbors(v, c).clone()
    }

    pub fn degree(&self, v: usize, c: Color) -> usize {
        self.neighbors(v, c).len()
    }

    /// Common color-`c` neighbors of every vertex of `ys`, restricted to
    /// `within` and excluding `ys` itself.
    pub fn common_color_neighborhood(&self, ys: &VertexSet, c: Color, within: &VertexSet) -> VertexSet {
        let mut out = within.clone();
        if c == 0 || c as usize > self.r {
            return self.empty_set();
        }
        for y in ys {
            out.intersect_with(self.neighbors(y, c));
            if out.is_empty() {
                break;
            }
        }
        out.difference_with(ys);
        out
    }

    /// All pairs `(u, v, color)` with `u < v` in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, Color)> + '_ {
        (0..self.n).flat_map(move |u| (u + 1..self.n).map(move |v| (u, v, self.color(u, v))))
    }

    pub fn color_counts(&self) -> Vec<u64> {
        (1..=self.r as Color)
            .map(|c| (0..self.n).map(|v| self.degree(v, c) as u64).sum::<u64>() / 2)
            .collect()
    }

    pub fn balance_report(&self) -> BalanceReport {
        let counts = self.color_counts();
        let total = binomial2(self.n);
        let min = counts.iter().copied().min().unwrap_or(0);
        let epsilon_star = if total == 0 {
            Rational::zero()
        } else {
            Rational::new(min as i64, total as i64).expect("nonzero total")
        };
        BalanceReport {
            per_color_counts: counts,
            total,
            epsilon_star,
        }
    }

    /// Every color class has at least `eps · C(n, 2)` edges (exact).
    pub fn is_eps_balanced(&self, eps: &Rational) -> bool {
        let total = BigInt::from(binomial2(self.n));
        let need = eps.numer() * &total;
        self.color_counts()
            .into_iter()
            .all(|c| BigInt::from(c) * eps.denom() >= need)
    }

    /// Relabels vertices: old vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> ColoredCompleteGraph {
        assert_eq!(perm.len(), self.n);
        let mut inv = vec![0; self.n];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        Self::from_fn(self.n, self.r, |a, b| self.color(inv[a], inv[b])).expect("same dims")
    }

    /// Returns a copy with the pair `{u, v}` recolored.
    pub fn with_pair_color(&self, u: usize, v: usize, c: Color) -> ColoredCompleteGraph {
        let mut g = self.clone();
        g.recolor(u, v, c);
        g
    }

    /// In-place recolor used by local search.
    pub fn recolor(&mut self, u: usize, v: usize, c: Color) {
        assert!(c >= 1 && c as usize <= self.r);
        let old = self.color(u, v);
        let base = (old as usize - 1) * self.n;
        self.adj[base + u].remove(v);
        self.adj[base + v].remove(u);
        self.set(u, v, c);
    }
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

fn smallest_prime_factor(q: u64) -> u64 {
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return d;
        }
        d += 1;
    }
    q
}

/// Nonzero squares of GF(q) for q = p or p², with elements encoded as
/// `a + b·p` meaning `a + b·α` where α² is a fixed non-residue mod p.
struct FiniteField {
    p: u64,
    k: u32,
    nonres: u64,
}

impl FiniteField {
    fn new(q: u64) -> Result<Self, GraphError> {
        if q < 2 {
            return Err(GraphError::NotPrimePower(q));
        }
        let p = smallest_prime_factor(q);
        let mut k = 0;
        let mut rest = q;
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        if rest != 1 {
            return Err(GraphError::NotPrimePower(q));
        }
        if k > 2 {
            return Err(GraphError::UnsupportedPrimePower(q));
        }
        let nonres = if k == 2 {
            (2..p)
                .find(|&d| (1..p).all(|x| x * x % p != d))
                .expect("odd prime has a non-residue")
        } else {
            0
        };
        Ok(Self { p, k, nonres })
    }

    fn order(&self) -> u64 {
        self.p.pow(self.k)
    }

    fn split(&self, x: u64) -> (u64, u64) {
        (x % self.p, x / self.p)
    }

    fn join(&self, a: u64, b: u64) -> u64 {
        a % self.p + (b % self.p) * self.p
    }

    fn sub(&self, x: u64, y: u64) -> u64 {
        let (a, b) = self.split(x);
        let (c, d) = self.split(y);
        self.join(a + self.p - c, b + self.p - d)
    }

    fn mul(&self, x: u64, y: u64) -> u64 {
        let p = self.p;
        let (a, b) = self.split(x);
        let (c, d) = self.split(y);
        self.join(a * c + b * d % p * self.nonres, a * d + b * c)
    }

    fn square_table(&self) -> Vec<bool> {
        let q = self.order();
        let mut sq = vec![false; q as usize];
        for x in 1..q {
            sq[self.mul(x, x) as usize] = true;
        }
        sq
    }
}

/// Paley coloring of `K_q`: red where the difference is a nonzero square.
pub fn paley_graph(q: u64) -> Result<ColoredCompleteGraph, GraphError> {
    let field = FiniteField::new(q)?;
    if q % 4 != 1 {
        return Err(GraphError::NotOneModFour(q));
    }
    let squares = field.square_table();
    ColoredCompleteGraph::from_fn(q as usize, 2, |u, v| {
        if squares[field.sub(u as u64, v as u64) as usize] {
            RED
        } else {
            BLUE
        }
    })
}

/// Multiplication by a fixed non-square of GF(q), as a vertex permutation of
/// the Paley graph. It maps the red class onto the blue class.
pub fn paley_nonsquare_multiplier(q: u64) -> Result<Vec<usize>, GraphError> {
    let field = FiniteField::new(q)?;
    let squares = field.square_table();
    let g = (1..q).find(|&x| !squares[x as usize]).ok_or(GraphError::NotOneModFour(q))?;
    Ok((0..q).map(|x| field.mul(g, x) as usize).collect())
}

/// Two copies of `0..n`: the left copy (vertices `0..n`) is internally red,
/// the right copy (vertices `n..2n`, label `j = v - n`) internally blue, and
/// a cross pair (left `i`, right `j`) is blue iff `i < j`.
pub fn two_block_coloring(n: usize) -> Result<ColoredCompleteGraph, GraphError> {
    if n == 0 {
        return Err(GraphError::NoVertices);
    }
    ColoredCompleteGraph::from_fn(2 * n, 2, |u, v| match (u < n, v < n) {
        (true, true) => RED,
        (false, false) => BLUE,
        _ => {
            let (i, j) = if u < n { (u, v - n) } else { (v, u - n) };
            if i < j {
                BLUE
            } else {
                RED
            }
        }
    })
}

/// Independent coloring: each pair gets color `c` with probability
/// `weights[c - 1]`. Sampling is exact over the common denominator, so the
/// output depends only on `(n, r, weights, seed)`.
pub fn random_coloring(
    n: usize,
    r: usize,
    weights: &[Rational],
    seed: u64,
) -> Result<ColoredCompleteGraph, GraphError> {
    check_dims(n, r)?;
    if weights.len() != r {
        return Err(GraphError::WeightCount {
            expected: r,
            got: weights.len(),
        });
    }
    let mut sum = Rational::zero();
    let mut denom = BigInt::from(1);
    for w in weights {
        if w < &Rational::zero() {
            return Err(GraphError::NegativeWeight(w.clone()));
        }
        sum = &sum + w;
        denom = denom.lcm(w.denom());
    }
    if sum != 1u64 {
        return Err(GraphError::WeightSum(sum));
    }
    let scale = denom.to_u64().ok_or(GraphError::WeightPrecision)?;
    let mut cumulative = Vec::with_capacity(r);
    let mut acc = BigInt::zero();
    for w in weights {
        acc += w.numer() * (&denom / w.denom());
        cumulative.push(acc.to_u64().ok_or(GraphError::WeightPrecision)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ColoredCompleteGraph::from_fn(n, r, |_, _| {
        let x = rng.gen_range(0..scale);
        cumulative.iter().position(|&c| x < c).expect("cumulative ends at scale") as Color + 1
    })
}

/// Uniformly random coloring with class sizes as equal as possible: the
/// first `C(n,2) mod r` colors get one extra pair. Exactly `1/r`-balanced
/// when `r` divides `C(n,2)`.
pub fn random_balanced_coloring(n: usize, r: usize, seed: u64) -> Result<ColoredCompleteGraph, GraphError> {
    check_dims(n, r)?;
    let total = binomial2(n) as usize;
    let mut colors: Vec<Color> = (0..total).map(|i| (i % r) as Color + 1).collect();
    colors.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut it = colors.into_iter();
    ColoredCompleteGraph::from_fn(n, r, |_, _| it.next().expect("one color per pair"))
}

/// The skewed weight vector `(1 - (r-1)·eps, eps, ..., eps)`.
pub fn skewed_weights(r: usize, eps: &Rational) -> Vec<Rational> {
    let light = eps.clone();
    let heavy = &Rational::one() - &(&Rational::from(r as u64 - 1) * eps);
    std::iter::once(heavy)
        .chain(std::iter::repeat(light).take(r - 1))
        .collect()
}

/// Monochromatic `K_n` in color `c` of an `r`-color palette.
pub fn monochromatic(n: usize, r: usize, c: Color) -> Result<ColoredCompleteGraph, GraphError> {
    ColoredCompleteGraph::from_fn(n, r, |_, _| c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn balanced_random_counts() {
        let g = random_balanced_coloring(100, 2, 4).unwrap();
        assert_eq!(g.color_counts(), vec![2475, 2475]);
        assert!(g.is_eps_balanced(&q("1/2")));
        let g = random_balanced_coloring(7, 3, 4).unwrap();
        assert_eq!(g.color_counts(), vec![7, 7, 7]);
        let g = random_balanced_coloring(5, 3, 0).unwrap();
        assert_eq!(g.color_counts(), vec![4, 3, 3]);
        assert_eq!(random_balanced_coloring(30, 2, 9).unwrap(), random_balanced_coloring(30, 2, 9).unwrap());
    }

    #[test]
    fn smallest_complete_graph() {
        let g = ColoredCompleteGraph::new(2, 1, &[(0, 1, 1)]).unwrap();
        assert_eq!(g.color(0, 1), 1);
        assert_eq!(g.color_counts(), vec![1]);
    }

    #[test]
    fn construction_errors_are_distinct() {
        assert_eq!(
            ColoredCompleteGraph::new(3, 2, &[(0, 1, 1), (0, 2, 1)]),
            Err(GraphError::MissingPair { u: 1, v: 2 })
        );
        assert_eq!(
            ColoredCompleteGraph::new(2, 2, &[(0, 1, 1), (1, 0, 2)]),
            Err(GraphError::DuplicatePair { u: 0, v: 1 })
        );
        assert_eq!(
            ColoredCompleteGraph::new(2, 2, &[(0, 1, 3)]),
            Err(GraphError::ColorOutOfRange { u: 0, v: 1, color: 3, r: 2 })
        );
        assert_eq!(
            ColoredCompleteGraph::new(2, 2, &[(1, 1, 1)]),
            Err(GraphError::LoopEdge(1))
        );
        assert_eq!(ColoredCompleteGraph::new(0, 2, &[]), Err(GraphError::NoVertices));
        assert_eq!(
            ColoredCompleteGraph::new(2, 0, &[(0, 1, 1)]),
            Err(GraphError::BadColorCount(0))
        );
    }

    #[test]
    fn paley9_from_pair_list() {
        let p = paley_graph(9).unwrap();
        let pairs: Vec<_> = p.pairs().map(|(u, v, c)| (u, v, c as usize)).collect();
        let g = ColoredCompleteGraph::new(9, 2, &pairs).unwrap();
        assert_eq!(g.color_counts(), vec![18, 18]);
        assert_eq!(g, p);
    }

    #[test]
    fn balance_examples() {
        let k4 = monochromatic(4, 2, 1).unwrap();
        let rep = k4.balance_report();
        assert_eq!(rep.per_color_counts, vec![6, 0]);
        assert!(rep.epsilon_star.is_zero());

        let p9 = paley_graph(9).unwrap().balance_report();
        assert_eq!(p9.per_color_counts, vec![18, 18]);
        assert_eq!(p9.epsilon_star, q("1/2"));

        let tb = two_block_coloring(3).unwrap().balance_report();
        assert_eq!(tb.per_color_counts, vec![9, 6]);
        assert_eq!(tb.total, 15);
        assert_eq!(tb.epsilon_star, q("6/15"));
    }

    #[test]
    fn eps_balance_is_exact() {
        let p9 = paley_graph(9).unwrap();
        assert!(p9.is_eps_balanced(&q("1/2")));
        assert!(!p9.is_eps_balanced(&q("19/36")));
        // all counts equal and eps = 1/r
        let g = ColoredCompleteGraph::new(3, 3, &[(0, 1, 1), (0, 2, 2), (1, 2, 3)]).unwrap();
        assert!(g.is_eps_balanced(&q("1/3")));
    }

    #[test]
    fn paley_small_cases() {
        let p5 = paley_graph(5).unwrap();
        for v in 0..5 {
            assert_eq!(p5.degree(v, RED), 2);
        }
        assert_eq!(p5.color_neighborhood(0, RED).to_vec(), vec![1, 4]);
        assert_eq!(paley_graph(9).unwrap().color_counts()[0], 18);
        let p13 = paley_graph(13).unwrap();
        assert!((0..13).all(|v| p13.degree(v, RED) == 6));
        let p25 = paley_graph(25).unwrap();
        assert_eq!(p25.color_counts(), vec![150, 150]);
    }

    #[test]
    fn paley_rejections() {
        assert_eq!(paley_graph(7), Err(GraphError::NotOneModFour(7)));
        assert_eq!(paley_graph(21), Err(GraphError::NotPrimePower(21)));
        assert_eq!(paley_graph(81), Err(GraphError::UnsupportedPrimePower(81)));
        assert_eq!(paley_graph(1), Err(GraphError::NotPrimePower(1)));
    }

    #[test]
    fn paley_is_strongly_regular() {
        // (q, k, lambda, mu) for the red graph
        for (q, k, lam, mu) in [(5u64, 2, 0, 1), (9, 4, 1, 2), (13, 6, 2, 3), (17, 8, 3, 4), (25, 12, 5, 6)] {
            let g = paley_graph(q).unwrap();
            for u in 0..q as usize {
                assert_eq!(g.degree(u, RED), k);
                for v in u + 1..q as usize {
                    let common = g.neighbors(u, RED).intersection_len(g.neighbors(v, RED));
                    let want = if g.color(u, v) == RED { lam } else { mu };
                    assert_eq!(common, want, "q={q} pair ({u},{v})");
                }
            }
        }
    }

    #[test]
    fn paley_classes_swap_under_nonsquare() {
        for q in [5u64, 9, 13, 17, 25] {
            let g = paley_graph(q).unwrap();
            let m = paley_nonsquare_multiplier(q).unwrap();
            for (u, v, c) in g.pairs() {
                assert_ne!(g.color(m[u], m[v]), c);
            }
        }
    }

    #[test]
    fn two_block_rule() {
        let g1 = two_block_coloring(1).unwrap();
        assert_eq!(g1.n(), 2);
        assert_eq!(g1.color(0, 1), RED);

        let g2 = two_block_coloring(2).unwrap();
        // left i = vertex i, right j = vertex 2 + j
        assert_eq!(g2.color(0, 2), RED);
        assert_eq!(g2.color(0, 3), BLUE);
        assert_eq!(g2.color(1, 2), RED);
        assert_eq!(g2.color(1, 3), RED);

        // left i: red (n-1) + (i+1), blue n-1-i; right j: blue (n-1) + j, red n-j
        for n in 1..8 {
            let g = two_block_coloring(n).unwrap();
            for i in 0..n {
                assert_eq!(g.degree(i, RED), n + i);
                assert_eq!(g.degree(i, BLUE), n - 1 - i);
                assert_eq!(g.degree(n + i, BLUE), n - 1 + i);
                assert_eq!(g.degree(n + i, RED), n - i);
            }
        }
        let g3 = two_block_coloring(3).unwrap();
        assert_eq!(g3.degree(2, BLUE), 0);
    }

    #[test]
    fn two_block_right_vertex_sees_smaller_labels_in_blue() {
        for n in 1..12 {
            let g = two_block_coloring(n).unwrap();
            let left = VertexSet::from_iter_with_capacity(2 * n, 0..n);
            for j in 0..n {
                let blue_left = g.neighbors(n + j, BLUE).intersection(&left);
                assert_eq!(blue_left.to_vec(), (0..j).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn random_coloring_contracts() {
        let g = random_coloring(4, 2, &[q("1"), q("0")], 3).unwrap();
        assert_eq!(g.color_counts(), vec![6, 0]);

        let w = [q("1/3"), q("1/3"), q("1/3")];
        assert_eq!(random_coloring(10, 3, &w, 7).unwrap(), random_coloring(10, 3, &w, 7).unwrap());
        assert_ne!(random_coloring(10, 3, &w, 7).unwrap(), random_coloring(10, 3, &w, 8).unwrap());

        assert!(matches!(
            random_coloring(4, 2, &[q("1/2"), q("1/3")], 0),
            Err(GraphError::WeightSum(_))
        ));
        assert!(matches!(
            random_coloring(4, 2, &[q("1")], 0),
            Err(GraphError::WeightCount { .. })
        ));
        assert!(matches!(
            random_coloring(4, 2, &[q("3/2"), q("-1/2")], 0),
            Err(GraphError::NegativeWeight(_))
        ));
    }

    #[test]
    fn random_coloring_concentrates() {
        // Binomial(19900, 1/10): mean 1990, sd ~42.3
        let total = binomial2(200) as f64;
        let mean = total * 0.1;
        let sd = (total * 0.1 * 0.9).sqrt();
        for seed in 0..20 {
            let g = random_coloring(200, 2, &[q("9/10"), q("1/10")], seed).unwrap();
            let blue = g.color_counts()[1] as f64;
            assert!((blue - mean).abs() <= 5.0 * sd, "seed {seed}: {blue}");
        }
    }

    #[test]
    fn neighborhoods() {
        let k3 = monochromatic(3, 2, 1).unwrap();
        assert!(k3.color_neighborhood(0, 2).is_empty());

        let k5 = monochromatic(5, 2, 1).unwrap();
        let ys = VertexSet::from_iter_with_capacity(5, [0, 1]);
        assert_eq!(k5.common_color_neighborhood(&ys, 1, &k5.vertices()).to_vec(), vec![2, 3, 4]);

        let p9 = paley_graph(9).unwrap();
        let (u, v) = p9.pairs().find(|&(_, _, c)| c == RED).map(|(u, v, _)| (u, v)).unwrap();
        let ys = VertexSet::from_iter_with_capacity(9, [u, v]);
        assert_eq!(p9.common_color_neighborhood(&ys, RED, &p9.vertices()).len(), 1);

        let g = random_coloring(30, 3, &[q("1/3"), q("1/3"), q("1/3")], 1).unwrap();
        for v in 0..30 {
            let single = VertexSet::singleton(30, v);
            let mut all = g.empty_set();
            for c in 1..=3 {
                let nb = g.color_neighborhood(v, c);
                assert_eq!(g.common_color_neighborhood(&single, c, &g.vertices()), nb);
                all.union_with(&nb);
            }
            assert_eq!(all.len(), 29);
            assert!(!all.contains(v));
        }
    }

    #[test]
    fn skewed_weights_sum_to_one() {
        let w = skewed_weights(3, &q("1/10"));
        assert_eq!(w, vec![q("4/5"), q("1/10"), q("1/10")]);
    }
}
