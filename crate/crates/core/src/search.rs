//! Color-consistent containment of patterns in colored complete graphs.
//!
//! The outer loop runs over injective maps from the pattern's colors to host
//! colors; for each map a bitset backtracking search places pattern vertices
//! one at a time, keeping candidates as intersections of host
//! color-neighborhoods.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::family::{blow_up, Family};
use crate::graph::{Color, ColoredCompleteGraph};
use crate::pattern::{verify_embedding, Embedding, Pattern};
use crate::vertex_set::VertexSet;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

const FLUSH_EVERY: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Embedding),
    /// The whole search space was explored without finding an embedding.
    Exhausted,
}

impl SearchOutcome {
    pub fn embedding(&self) -> Option<&Embedding> {
        match self {
            SearchOutcome::Found(e) => Some(e),
            SearchOutcome::Exhausted => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("search budget of {budget} extensions exhausted")]
    BudgetExhausted { budget: u64 },
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Maximum number of partial-assignment extensions.
    pub budget: u64,
    /// Explore different color maps on separate threads. The embedding
    /// returned may then differ from run to run.
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            parallel: false,
        }
    }
}

/// Placement order: start with the vertex of largest constraint degree, then
/// repeatedly take the vertex with the most constraints to already placed
/// vertices (ties: larger constraint degree, then smaller index).
pub fn placement_order(p: &Pattern) -> Vec<usize> {
    let m = p.m();
    let deg: Vec<usize> = (0..m).map(|a| p.constraint_degree(a)).collect();
    let mut placed = vec![false; m];
    let mut to_placed = vec![0usize; m];
    let mut order = Vec::with_capacity(m);
    for _ in 0..m {
        let next = (0..m)
            .filter(|&a| !placed[a])
            .max_by(|&a, &b| (to_placed[a], deg[a]).cmp(&(to_placed[b], deg[b])).then(b.cmp(&a)))
            .expect("unplaced vertex remains");
        placed[next] = true;
        order.push(next);
        for b in 0..m {
            if b != next && !placed[b] && p.label(next, b).is_some() {
                to_placed[b] += 1;
            }
        }
    }
    order
}

/// All injective maps from the colors `p` uses into `1..=r`, in
/// lexicographic order. Unused pattern colors map to `None`.
pub fn color_maps(p: &Pattern, r: usize) -> Vec<Vec<Option<Color>>> {
    let used: Vec<usize> = (0..p.palette()).filter(|&c| p.used_colors() >> c & 1 == 1).collect();
    let mut out = Vec::new();
    let mut current = vec![None; p.palette()];
    let mut taken = vec![false; r];
    fn rec(
        i: usize,
        used: &[usize],
        r: usize,
        current: &mut Vec<Option<Color>>,
        taken: &mut Vec<bool>,
        out: &mut Vec<Vec<Option<Color>>>,
    ) {
        if i == used.len() {
            out.push(current.clone());
            return;
        }
        for h in 0..r {
            if !taken[h] {
                taken[h] = true;
                current[used[i]] = Some(h as Color + 1);
                rec(i + 1, used, r, current, taken, out);
                taken[h] = false;
            }
        }
        current[used[i]] = None;
    }
    rec(0, &used, r, &mut current, &mut taken, &mut out);
    out
}

/// A compiled pattern: placement order and, for each position, the earlier
/// positions it is constrained to and with which pattern color.
struct Plan {
    order: Vec<usize>,
    back: Vec<Vec<(usize, Color)>>,
}

impl Plan {
    fn new(p: &Pattern, order: Vec<usize>) -> Self {
        let back = (0..order.len())
            .map(|i| {
                (0..i)
                    .filter_map(|j| p.label(order[i], order[j]).map(|c| (j, c)))
                    .collect()
            })
            .collect();
        Self { order, back }
    }
}

struct Budget<'a> {
    limit: u64,
    spent: &'a AtomicU64,
    local: u64,
    stop: &'a AtomicBool,
}

impl Budget<'_> {
    /// Counts one extension; false once the budget is gone or a sibling
    /// branch asked to stop.
    #[inline]
    fn tick(&mut self) -> bool {
        self.local += 1;
        if self.local >= FLUSH_EVERY {
            self.flush();
            if self.stop.load(Ordering::Relaxed) {
                return false;
            }
        }
        self.spent.load(Ordering::Relaxed) + self.local <= self.limit
    }

    fn flush(&mut self) {
        self.spent.fetch_add(self.local, Ordering::Relaxed);
        self.local = 0;
    }

    fn over(&self) -> bool {
        self.spent.load(Ordering::Relaxed) + self.local > self.limit
    }
}

enum Step {
    Done,
    Found,
    Stopped,
}

struct Backtrack<'a> {
    host: &'a ColoredCompleteGraph,
    plan: &'a Plan,
    cmap: &'a [Option<Color>],
    image: Vec<usize>,
    used: VertexSet,
}

impl<'a> Backtrack<'a> {
    fn new(host: &'a ColoredCompleteGraph, plan: &'a Plan, cmap: &'a [Option<Color>]) -> Self {
        Self {
            host,
            plan,
            cmap,
            image: Vec::with_capacity(plan.order.len()),
            used: host.empty_set(),
        }
    }

    fn candidates(&self, i: usize) -> VertexSet {
        let mut cands = self.host.vertices();
        for &(j, c) in &self.plan.back[i] {
            let hc = self.cmap[c as usize - 1].expect("used color is mapped");
            cands.intersect_with(self.host.neighbors(self.image[j], hc));
        }
        cands.difference_with(&self.used);
        cands
    }

    fn place(&mut self, v: usize) {
        self.image.push(v);
        self.used.insert(v);
    }

    fn unplace(&mut self) {
        let v = self.image.pop().expect("placed vertex");
        self.used.remove(v);
    }

    /// Depth-first search for one completion.
    fn find(&mut self, budget: &mut Budget) -> Step {
        let i = self.image.len();
        if i == self.plan.order.len() {
            return Step::Found;
        }
        for v in self.candidates(i).iter() {
            if !budget.tick() {
                return Step::Stopped;
            }
            self.place(v);
            match self.find(budget) {
                Step::Done => self.unplace(),
                other => return other,
            }
        }
        Step::Done
    }

    /// Counts completions, stopping early at `cap`.
    fn count(&mut self, cap: u64, acc: &mut u64) {
        let i = self.image.len();
        if i == self.plan.order.len() {
            *acc += 1;
            return;
        }
        for v in self.candidates(i).iter() {
            if *acc >= cap {
                return;
            }
            self.place(v);
            self.count(cap, acc);
            self.unplace();
        }
    }

    fn embedding(&self) -> Embedding {
        let mut vertex_map = vec![0; self.image.len()];
        for (pos, &a) in self.plan.order.iter().enumerate() {
            vertex_map[a] = self.image[pos];
        }
        Embedding {
            vertex_map,
            color_map: self.cmap.to_vec(),
        }
    }
}

/// Searches for a color-consistent copy of `p` in `host` with the default
/// single-threaded strategy.
pub fn find_color_consistent(
    host: &ColoredCompleteGraph,
    p: &Pattern,
    budget: u64,
) -> Result<SearchOutcome, SearchError> {
    find_color_consistent_with(
        host,
        p,
        &SearchOptions {
            budget,
            parallel: false,
        },
    )
}

pub fn find_color_consistent_with(
    host: &ColoredCompleteGraph,
    p: &Pattern,
    opts: &SearchOptions,
) -> Result<SearchOutcome, SearchError> {
    let spent = AtomicU64::new(0);
    search_counted(host, p, opts, &spent)
}

fn search_counted(
    host: &ColoredCompleteGraph,
    p: &Pattern,
    opts: &SearchOptions,
    spent: &AtomicU64,
) -> Result<SearchOutcome, SearchError> {
    if p.m() > host.n() {
        return Ok(SearchOutcome::Exhausted);
    }
    let plan = Plan::new(p, placement_order(p));
    let maps = color_maps(p, host.r());
    let stop = AtomicBool::new(false);
    let out_of_budget = AtomicBool::new(false);

    let run = |cmap: &Vec<Option<Color>>| -> Option<Embedding> {
        let mut budget = Budget {
            limit: opts.budget,
            spent,
            local: 0,
            stop: &stop,
        };
        let mut bt = Backtrack::new(host, &plan, cmap);
        let step = bt.find(&mut budget);
        budget.flush();
        match step {
            Step::Found => {
                stop.store(true, Ordering::Relaxed);
                Some(bt.embedding())
            }
            Step::Stopped => {
                if budget.over() {
                    out_of_budget.store(true, Ordering::Relaxed);
                    stop.store(true, Ordering::Relaxed);
                }
                None
            }
            Step::Done => None,
        }
    };

    let found = if opts.parallel && maps.len() > 1 {
        maps.par_iter().find_map_any(run)
    } else {
        let mut hit = None;
        for cmap in &maps {
            hit = run(cmap);
            if hit.is_some() || out_of_budget.load(Ordering::Relaxed) {
                break;
            }
        }
        hit
    };
    match found {
        Some(e) => {
            assert!(verify_embedding(host, p, &e), "search produced an invalid embedding");
            Ok(SearchOutcome::Found(e))
        }
        None if out_of_budget.load(Ordering::Relaxed) => Err(SearchError::BudgetExhausted { budget: opts.budget }),
        None => Ok(SearchOutcome::Exhausted),
    }
}

/// The first member (in family order) whose `t`-blow-up embeds in `host`.
/// The budget is shared across members.
pub fn find_family_blowup(
    host: &ColoredCompleteGraph,
    fam: &Family,
    t: usize,
    budget: u64,
) -> Result<Option<(usize, Embedding)>, SearchError> {
    let spent = AtomicU64::new(0);
    let opts = SearchOptions {
        budget,
        parallel: false,
    };
    for (i, f) in fam.members.iter().enumerate() {
        if let SearchOutcome::Found(e) = search_counted(host, &blow_up(f, t), &opts, &spent)? {
            return Ok(Some((i, e)));
        }
    }
    Ok(None)
}

/// Number of embeddings (vertex map and color map together) of `p` in
/// `host`, capped at `cap`.
pub fn count_embeddings(host: &ColoredCompleteGraph, p: &Pattern, cap: u64) -> u64 {
    if p.m() > host.n() {
        return 0;
    }
    let plan = Plan::new(p, placement_order(p));
    let mut acc = 0;
    for cmap in color_maps(p, host.r()) {
        let mut bt = Backtrack::new(host, &plan, &cmap);
        bt.count(cap, &mut acc);
        if acc >= cap {
            break;
        }
    }
    acc
}

/// Number of embeddings that send some constrained pattern pair onto the
/// host pair `{u, v}`, capped at `cap`. These are exactly the embeddings
/// whose validity depends on the color of `{u, v}`.
pub fn count_embeddings_through(host: &ColoredCompleteGraph, p: &Pattern, u: usize, v: usize, cap: u64) -> u64 {
    let m = p.m();
    if m > host.n() || m < 2 {
        return 0;
    }
    let maps = color_maps(p, host.r());
    let mut acc = 0;
    for a in 0..m {
        for b in 0..m {
            if a == b || p.label(a, b).is_none() {
                continue;
            }
            // place a, b first so that a -> u, b -> v is forced
            let mut order = vec![a, b];
            order.extend(placement_order(p).into_iter().filter(|&x| x != a && x != b));
            let plan = Plan::new(p, order);
            for cmap in &maps {
                let mut bt = Backtrack::new(host, &plan, cmap);
                let c = p.label(a, b).unwrap();
                if host.color(u, v) != cmap[c as usize - 1].unwrap() {
                    continue;
                }
                bt.place(u);
                bt.place(v);
                bt.count(cap, &mut acc);
                if acc >= cap {
                    return acc;
                }
            }
        }
    }
    acc
}
