//! Homogeneous sets, homogeneous grids, color-vector refinement and
//! monochromatic bicliques.

use std::collections::BTreeMap;

use crate::graph::{Color, ColoredCompleteGraph};
use crate::vertex_set::VertexSet;

use super::{derive_seed, multipartite_drc, DrcError, DrcMode};

pub const DEFAULT_GRID_BUDGET: u64 = 2_000_000;
pub const DEFAULT_BICLIQUE_FANOUT: usize = 32;
/// Candidate parts tried per grid node.
const PARTS_PER_NODE: usize = 4096;

/// Record of one run of the stepping argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyTrace {
    /// `(vertex, color)` per round; the last round has no color.
    pub rounds: Vec<(usize, Option<Color>)>,
    pub clique: VertexSet,
    pub color: Option<Color>,
}

impl GreedyTrace {
    /// `⌈s/r⌉` for `s` rounds.
    pub fn guaranteed_size(&self, r: usize) -> usize {
        self.rounds.len().div_ceil(r)
    }
}

/// Lower bound on the rounds of [`greedy_homogeneous`] from a live set of
/// size `n`: each round keeps at least `⌈(n-1)/r⌉` vertices.
pub fn greedy_round_bound(n: usize, r: usize) -> usize {
    let mut rounds = 0;
    let mut live = n;
    while live > 0 {
        rounds += 1;
        live = (live - 1).div_ceil(r);
    }
    rounds
}

/// Monochromatic clique by the stepping argument: take the smallest live
/// vertex, keep only its majority-color neighbors, repeat. The vertices
/// recorded with the most frequent color, plus the final vertex, form the
/// clique.
pub fn greedy_homogeneous(host: &ColoredCompleteGraph, within: &VertexSet) -> GreedyTrace {
    let mut live = within.clone();
    let mut rounds = Vec::new();
    while let Some(v) = live.first() {
        live.remove(v);
        if live.is_empty() {
            rounds.push((v, None));
            break;
        }
        let c = (1..=host.r() as Color)
            .max_by_key(|&c| (host.neighbors(v, c).intersection_len(&live), std::cmp::Reverse(c)))
            .expect("palette is nonempty");
        live.intersect_with(host.neighbors(v, c));
        rounds.push((v, Some(c)));
    }
    let mut counts = vec![0usize; host.r() + 1];
    for &(_, c) in &rounds {
        if let Some(c) = c {
            counts[c as usize] += 1;
        }
    }
    let best = (1..=host.r()).max_by_key(|&c| (counts[c], std::cmp::Reverse(c)));
    let color = best.filter(|&c| counts[c] > 0).map(|c| c as Color);
    let clique = VertexSet::from_iter_with_capacity(
        host.n(),
        rounds.iter().filter(|&&(_, c)| c.is_none() || c == color).map(|&(v, _)| v),
    );
    GreedyTrace { rounds, clique, color }
}

/// Partitions `u` by the colors each vertex sends to `anchors` (in index
/// order) and returns the largest class with its vector. Ties go to the
/// smallest vector.
pub fn refine_by_color_vector(host: &ColoredCompleteGraph, u: &VertexSet, anchors: &VertexSet) -> (VertexSet, Vec<Color>) {
    let mut classes: BTreeMap<Vec<Color>, VertexSet> = BTreeMap::new();
    for v in u {
        let key: Vec<Color> = anchors.iter().map(|a| host.color(v, a)).collect();
        classes.entry(key).or_insert_with(|| host.empty_set()).insert(v);
    }
    let mut best: Option<(Vec<Color>, VertexSet)> = None;
    for (key, set) in classes {
        if best.as_ref().map_or(true, |(_, b)| set.len() > b.len()) {
            best = Some((key, set));
        }
    }
    match best {
        Some((key, set)) => (set, key),
        None => (host.empty_set(), Vec::new()),
    }
}

/// `S1 ⊆ a`, `S2 ⊆ b`, both of size `s`, with every pair between them in
/// color `c`. Only `s`-subsets of the `fanout` vertices of `a` with the
/// largest `c`-degree into `b` are tried.
pub fn find_mono_biclique(
    host: &ColoredCompleteGraph,
    a: &VertexSet,
    b: &VertexSet,
    c: Color,
    s: usize,
    fanout: usize,
) -> Option<(VertexSet, VertexSet)> {
    if s == 0 || c == 0 || c as usize > host.r() {
        return None;
    }
    let mut ranked: Vec<(usize, usize)> = a.iter().map(|v| (host.neighbors(v, c).intersection_len(b), v)).collect();
    ranked.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    let top: Vec<usize> = ranked.into_iter().take(fanout).filter(|&(d, _)| d >= s).map(|(_, v)| v).collect();

    fn rec(
        host: &ColoredCompleteGraph,
        top: &[usize],
        start: usize,
        s: usize,
        c: Color,
        common: &VertexSet,
        chosen: &mut Vec<usize>,
    ) -> Option<VertexSet> {
        if chosen.len() == s {
            return Some(common.take_first(s));
        }
        for i in start..top.len() {
            let next = common.intersection(host.neighbors(top[i], c));
            if next.len() < s {
                continue;
            }
            chosen.push(top[i]);
            if let Some(found) = rec(host, top, i + 1, s, c, &next, chosen) {
                return Some(found);
            }
            chosen.pop();
        }
        None
    }
    let mut chosen = Vec::new();
    let s2 = rec(host, &top, 0, s, c, b, &mut chosen)?;
    let s1 = VertexSet::from_iter_with_capacity(host.n(), chosen);
    Some((s1, s2))
}

#[derive(Debug, Clone)]
pub struct GridOptions {
    /// Size of every part when there are at least two sets.
    pub part_size: usize,
    /// Search nodes (candidate parts tried) before giving up.
    pub budget: u64,
    /// Optional class label per host vertex; every part must then lie in a
    /// single class.
    pub classes: Option<Vec<u64>>,
    /// Order candidates by a dependent-random-choice selection first.
    pub use_drc: bool,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            part_size: 2,
            budget: DEFAULT_GRID_BUDGET,
            classes: None,
            use_drc: true,
        }
    }
}

/// Homogeneous grid with default options and parts of size 2.
pub fn homogeneous_grid(
    host: &ColoredCompleteGraph,
    sets: &[VertexSet],
    r: usize,
    seed: u64,
) -> Result<Vec<VertexSet>, DrcError> {
    homogeneous_grid_with(host, sets, r, seed, &GridOptions::default())
}

/// Parts `X_i ⊆ sets[i]`, each a monochromatic clique, with every `X_i`–`X_j`
/// bipartite graph monochromatic.
///
/// The last set is handled first: a homogeneous part `X_t` is chosen (inside
/// a multipartite selection against the other sets when one exists), each
/// other set shrinks to a common color-neighborhood of `X_t`, and the
/// remaining sets are solved recursively. Choices of parts and colors are
/// backtracked. A single set gets the plain greedy clique.
pub fn homogeneous_grid_with(
    host: &ColoredCompleteGraph,
    sets: &[VertexSet],
    r: usize,
    seed: u64,
    opts: &GridOptions,
) -> Result<Vec<VertexSet>, DrcError> {
    if sets.is_empty() || sets.iter().any(|s| s.is_empty()) {
        return Err(DrcError::BadParams("grid needs nonempty sets".into()));
    }
    if sets.len() == 1 && opts.classes.is_none() {
        return Ok(vec![greedy_homogeneous(host, &sets[0]).clique]);
    }
    let mut solver = Grid {
        host,
        r,
        seed,
        opts,
        nodes: 0,
        parts: vec![host.empty_set(); sets.len()],
    };
    match solver.solve(sets.len() - 1, sets.to_vec()) {
        Some(true) => {
            let parts = solver.parts;
            debug_assert!(verify_grid(host, &parts));
            Ok(parts)
        }
        Some(false) => Err(DrcError::GridExhausted),
        None => Err(DrcError::GridBudget(opts.budget)),
    }
}

/// Checks that each part is a monochromatic clique and each pair of parts is
/// joined in one color.
pub fn verify_grid(host: &ColoredCompleteGraph, parts: &[VertexSet]) -> bool {
    for p in parts {
        let vs = p.to_vec();
        if vs.len() >= 2 {
            let c = host.color(vs[0], vs[1]);
            for (i, &u) in vs.iter().enumerate() {
                if vs[i + 1..].iter().any(|&v| host.color(u, v) != c) {
                    return false;
                }
            }
        }
    }
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let (Some(a), Some(b)) = (parts[i].first(), parts[j].first()) else {
                continue;
            };
            let c = host.color(a, b);
            if parts[i].iter().any(|u| parts[j].iter().any(|v| host.color(u, v) != c)) {
                return false;
            }
        }
    }
    true
}

struct Grid<'a> {
    host: &'a ColoredCompleteGraph,
    r: usize,
    seed: u64,
    opts: &'a GridOptions,
    nodes: u64,
    parts: Vec<VertexSet>,
}

impl Grid<'_> {
    /// `Some(true)` on success, `Some(false)` when this branch is exhausted,
    /// `None` when the budget ran out.
    fn solve(&mut self, level: usize, cands: Vec<VertexSet>) -> Option<bool> {
        let here = &cands[level];
        let order = self.candidate_order(level, &cands);
        let s = self.opts.part_size;
        let mut parts_here = Vec::new();
        self.homogeneous_subsets(&order, here, s, &mut parts_here);
        for part in parts_here {
            self.nodes += 1;
            if self.nodes > self.opts.budget {
                return None;
            }
            if level == 0 {
                self.parts[0] = part;
                return Some(true);
            }
            // color options for every lower set, largest neighborhood first
            let mut options: Vec<Vec<(Color, VertexSet)>> = Vec::with_capacity(level);
            for cand in cands.iter().take(level) {
                let mut opts: Vec<(Color, VertexSet)> = (1..=self.host.r() as Color)
                    .map(|c| (c, self.host.common_color_neighborhood(&part, c, cand)))
                    .filter(|(_, nb)| nb.len() >= s)
                    .collect();
                opts.sort_by(|x, y| y.1.len().cmp(&x.1.len()).then(x.0.cmp(&y.0)));
                options.push(opts);
            }
            if options.iter().any(|o| o.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; level];
            loop {
                let next: Vec<VertexSet> = (0..level).map(|j| options[j][idx[j]].1.clone()).collect();
                match self.solve(level - 1, next) {
                    Some(true) => {
                        self.parts[level] = part;
                        return Some(true);
                    }
                    None => return None,
                    Some(false) => {}
                }
                // odometer over color choices
                let mut j = 0;
                while j < level {
                    idx[j] += 1;
                    if idx[j] < options[j].len() {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == level {
                    break;
                }
            }
        }
        Some(false)
    }

    /// Vertices of `cands[level]` in search order: a multipartite selection
    /// against the lower sets first, then the rest by index.
    fn candidate_order(&self, level: usize, cands: &[VertexSet]) -> Vec<usize> {
        let here = &cands[level];
        let mut first = Vec::new();
        if self.opts.use_drc && level > 0 && self.r >= 2 && here.len() >= 16 {
            let tag = (level as u64) << 32 | here.len() as u64;
            if let Ok((w, _)) = multipartite_drc(
                self.host,
                here,
                &cands[..level],
                self.r,
                derive_seed(self.seed, tag),
                DrcMode::Desk,
            ) {
                first = w.to_vec();
            }
        }
        let mut order = first.clone();
        let firsts = VertexSet::from_iter_with_capacity(self.host.n(), first);
        order.extend(here.iter().filter(|v| !firsts.contains(*v)));
        order
    }

    /// All monochromatic `s`-cliques over `order` (respecting classes), in
    /// lexicographic order of positions.
    fn homogeneous_subsets(&self, order: &[usize], here: &VertexSet, s: usize, out: &mut Vec<VertexSet>) {
        let class = |v: usize| self.opts.classes.as_ref().map(|c| c[v]);
        let cap = PARTS_PER_NODE;
        #[allow(clippy::too_many_arguments)]
        fn rec(
            host: &ColoredCompleteGraph,
            order: &[usize],
            start: usize,
            s: usize,
            color: Option<Color>,
            allowed: &VertexSet,
            chosen: &mut Vec<usize>,
            out: &mut Vec<VertexSet>,
            cap: usize,
            class: &dyn Fn(usize) -> Option<u64>,
        ) {
            if chosen.len() == s {
                out.push(VertexSet::from_iter_with_capacity(host.n(), chosen.iter().copied()));
                return;
            }
            for i in start..order.len() {
                if out.len() >= cap {
                    return;
                }
                let v = order[i];
                if !allowed.contains(v) {
                    continue;
                }
                if let Some(&first) = chosen.first() {
                    if class(first) != class(v) {
                        continue;
                    }
                }
                chosen.push(v);
                match (chosen.len(), color) {
                    (1, _) => rec(host, order, i + 1, s, None, allowed, chosen, out, cap, class),
                    (2, None) => {
                        let c = host.color(chosen[0], v);
                        let mut next = allowed.intersection(host.neighbors(chosen[0], c));
                        next.intersect_with(host.neighbors(v, c));
                        rec(host, order, i + 1, s, Some(c), &next, chosen, out, cap, class);
                    }
                    (_, Some(c)) => {
                        let next = allowed.intersection(host.neighbors(v, c));
                        rec(host, order, i + 1, s, Some(c), &next, chosen, out, cap, class);
                    }
                    _ => unreachable!(),
                }
                chosen.pop();
            }
        }
        let mut chosen = Vec::with_capacity(s);
        rec(self.host, order, 0, s.max(1), None, here, &mut chosen, out, cap, &class);
    }
}
