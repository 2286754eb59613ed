//! End-to-end extraction of an all-colors multipartite witness.
//!
//! Stages, with their identifiers in errors and in the log:
//!
//! 1. `drc:color{i}`: a selection `W_i` for every color `i` (both sides are
//!    the whole vertex set), then disjoint `W'_i` made of the earliest
//!    unclaimed `⌊|W_i|/r⌋` vertices.
//! 2. `grid:first`: a homogeneous grid `X_i ⊆ W'_i`; `X'_i` keeps the first
//!    `k0` vertices.
//! 3. `neighborhood:color{i}`: `U_i`, the common color-`i` neighborhood of
//!    `X'_i`, made disjoint from the `X'` and from earlier `U`.
//! 4. `refine`: keep the vertices of `U_h` that send one color to each whole
//!    block `X'_j`, labeled by that color vector.
//! 5. `grid:second`: a homogeneous grid `X''_h` inside the refined sets, each
//!    part within one label class; `Y_j` is `X'_j` refined against
//!    representatives of the `X''`.
//!
//! The witness is `Y_1..Y_r, X''_1..X''_r`; `Y_i` meets `X''_i` in color `i`.
//!
//! Hosts too small for the schedule (`r·w > n`) go to a `direct` stage
//! instead: exhaustive search for the largest `t`-blow-up of a family member,
//! whose blown-up vertices become the parts.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::family::{enumerate_family, MAX_FAMILY_COLORS};
use crate::graph::{Color, ColoredCompleteGraph};
use crate::search::find_family_blowup;
use crate::rational::Rational;
use crate::vertex_set::VertexSet;

use super::homogeneous::{greedy_homogeneous, homogeneous_grid_with, refine_by_color_vector, GridOptions};
use super::witness::MultipartiteWitness;
use super::{derive_seed, drc_select, floor_log_inv, isqrt, DrcError, DrcParams};

/// Scaling knobs for the parameter schedule
/// `w = w_scale·√n`, `k0 = ⌊log_{1/eps} n / 8⌋`, `beta = beta_scale/√n`,
/// `t = ⌊log_{1/eps} n / 3⌋`, with `k0 ≥ k0_min` and `t ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineConfig {
    /// Declared balance; `None` uses the host's exact minimum color density.
    pub eps: Option<Rational>,
    pub w_scale: usize,
    pub beta_scale: usize,
    pub k0_min: usize,
    pub max_retries: u32,
    pub grid_budget: u64,
}

/// Default node budget of the second homogeneous grid.
pub const DEFAULT_PIPELINE_GRID_BUDGET: u64 = 200_000;

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            eps: None,
            w_scale: 4,
            beta_scale: 1,
            k0_min: 2,
            max_retries: 10,
            grid_budget: DEFAULT_PIPELINE_GRID_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineRun {
    pub witness: MultipartiteWitness,
    /// One `key=value` line per stage.
    pub log: Vec<String>,
}

#[derive(Debug, Error)]
#[error("stage {stage} failed: {message}")]
pub struct PipelineError {
    pub stage: String,
    pub message: String,
    pub log: Vec<String>,
}

struct Log {
    lines: Vec<String>,
}

impl Log {
    fn line(&mut self, stage: &str, fields: &[(&str, String)]) {
        let mut s = format!("stage={stage}");
        for (k, v) in fields {
            write!(s, " {k}={v}").unwrap();
        }
        self.lines.push(s);
    }

    fn fail(mut self, stage: &str, err: impl std::fmt::Display) -> PipelineError {
        self.line(stage, &[("status", "failed".into()), ("error", format!("{:?}", err.to_string()))]);
        PipelineError {
            stage: stage.to_string(),
            message: err.to_string(),
            log: self.lines,
        }
    }
}

/// Effective parameters for a host of `n` vertices.
pub fn schedule(n: usize, eps: &Rational, config: &PipelineConfig) -> DrcParams {
    let log = floor_log_inv(eps, n) as usize;
    let root = isqrt(n).max(1);
    let k0 = (log / 8).max(config.k0_min).max(1);
    DrcParams {
        w: (config.w_scale * root).max(k0),
        k0,
        beta: Rational::new(config.beta_scale as i64, root as i64).expect("positive root"),
        t: (log / 3).max(1) as u32,
    }
}

fn tag(stage: u64, i: usize) -> u64 {
    stage << 16 | i as u64
}

pub fn extract_all_colors_witness(
    host: &ColoredCompleteGraph,
    r: usize,
    config: &PipelineConfig,
    seed: u64,
) -> Result<PipelineRun, PipelineError> {
    let mut log = Log { lines: Vec::new() };
    let n = host.n();
    if r == 0 || r > host.r() {
        return Err(log.fail("setup", format!("r = {r} but the host has {} colors", host.r())));
    }
    if r == 1 {
        let clique = greedy_homogeneous(host, &host.vertices()).clique;
        log.line("greedy", &[("size", clique.len().to_string())]);
        let witness = MultipartiteWitness::from_parts(host, vec![clique.to_vec()]);
        return finish(host, r, witness, log);
    }
    let eps = config.eps.clone().unwrap_or_else(|| host.balance_report().epsilon_star);
    let params = schedule(n, &eps, config);
    let k0 = params.k0;
    log.line(
        "setup",
        &[
            ("n", n.to_string()),
            ("r", r.to_string()),
            ("eps", eps.to_string()),
            ("w", params.w.to_string()),
            ("k0", k0.to_string()),
            ("beta", params.beta.to_string()),
            ("t", params.t.to_string()),
            ("seed", seed.to_string()),
        ],
    );
    if params.w * r > n {
        return direct(host, r, log);
    }

    // 1. one selection per color, run concurrently with separate streams
    let all = host.vertices();
    let selections: Vec<Result<VertexSet, DrcError>> = (1..=r)
        .into_par_iter()
        .map(|i| {
            drc_select(
                host,
                &all,
                &all,
                i as Color,
                &params,
                derive_seed(seed, tag(1, i)),
                config.max_retries,
            )
        })
        .collect();
    let mut ws = Vec::with_capacity(r);
    for (i, sel) in selections.into_iter().enumerate() {
        let stage = format!("drc:color{}", i + 1);
        match sel {
            Ok(w) => {
                log.line(&stage, &[("size", w.len().to_string())]);
                ws.push(w);
            }
            Err(e) => return Err(log.fail(&stage, e)),
        }
    }
    let mut claimed = host.empty_set();
    let mut disjoint = Vec::with_capacity(r);
    for w in &ws {
        let part = w.difference(&claimed).take_first(w.len() / r);
        claimed.union_with(&part);
        disjoint.push(part);
    }
    log.line(
        "disjoint",
        &[("sizes", disjoint.iter().map(|w| w.len().to_string()).collect::<Vec<_>>().join(","))],
    );

    // 2. first grid
    let grid_opts = GridOptions {
        part_size: k0,
        budget: config.grid_budget,
        classes: None,
        use_drc: true,
    };
    let xs = homogeneous_grid_with(host, &disjoint, r, derive_seed(seed, tag(2, 0)), &grid_opts)
        .map_err(|e| std::mem::replace(&mut log, Log { lines: vec![] }).fail("grid:first", e))?;
    let xs: Vec<VertexSet> = xs.into_iter().map(|x| x.take_first(k0)).collect();
    log.line("grid:first", &[("sizes", sizes(&xs))]);

    // 3. common neighborhoods
    let mut used = host.empty_set();
    for x in &xs {
        used.union_with(x);
    }
    let mut us = Vec::with_capacity(r);
    for (i, x) in xs.iter().enumerate() {
        let stage = format!("neighborhood:color{}", i + 1);
        let u = host.common_color_neighborhood(x, i as Color + 1, &all.difference(&used));
        if u.len() < k0 {
            return Err(log.fail(&stage, format!("common neighborhood has {} vertices", u.len())));
        }
        used.union_with(&u);
        log.line(&stage, &[("size", u.len().to_string())]);
        us.push(u);
    }

    // 4. keep vertices constant on every block, labeled by their block colors
    let mut classes = vec![u64::MAX; n];
    let mut refined = Vec::with_capacity(r);
    for u in &us {
        let mut keep = host.empty_set();
        for v in u {
            let mut label = 0u64;
            let mut constant = true;
            for x in &xs {
                let mut it = x.iter().map(|a| host.color(v, a));
                let first = it.next().expect("blocks are nonempty");
                if it.any(|c| c != first) {
                    constant = false;
                    break;
                }
                label = label * 64 + (first as u64 - 1);
            }
            if constant {
                classes[v] = label;
                keep.insert(v);
            }
        }
        if keep.len() < k0 {
            return Err(log.fail("refine", format!("only {} block-constant vertices", keep.len())));
        }
        refined.push(keep);
    }
    log.line("refine", &[("sizes", sizes(&refined))]);

    // 5. second grid inside single classes, then Y against the X''
    let grid_opts = GridOptions {
        part_size: k0,
        budget: config.grid_budget,
        classes: Some(classes),
        use_drc: false,
    };
    let xpp = homogeneous_grid_with(host, &refined, r, derive_seed(seed, tag(5, 0)), &grid_opts)
        .map_err(|e| std::mem::replace(&mut log, Log { lines: vec![] }).fail("grid:second", e))?;
    log.line("grid:second", &[("sizes", sizes(&xpp))]);
    let reps = VertexSet::from_iter_with_capacity(n, xpp.iter().map(|x| x.first().expect("nonempty part")));
    let ys: Vec<VertexSet> = xs.iter().map(|x| refine_by_color_vector(host, x, &reps).0).collect();
    log.line("refine:y", &[("sizes", sizes(&ys))]);

    let parts: Vec<Vec<usize>> = ys.iter().chain(&xpp).map(VertexSet::to_vec).collect();
    let witness = MultipartiteWitness::from_parts(host, parts);
    finish(host, r, witness, log)
}

/// Per-search budget of the `direct` stage.
pub const DIRECT_BUDGET: u64 = 10_000_000;

fn direct(host: &ColoredCompleteGraph, r: usize, mut log: Log) -> Result<PipelineRun, PipelineError> {
    if r != host.r() || r > MAX_FAMILY_COLORS {
        return Err(log.fail("direct", format!("needs r = {} and at most {MAX_FAMILY_COLORS} colors", host.r())));
    }
    let fam = match enumerate_family(r) {
        Ok(f) => f,
        Err(e) => return Err(log.fail("direct", e)),
    };
    let smallest = fam.members.iter().map(|f| f.m()).min().unwrap_or(1);
    for t in (1..=host.n() / smallest).rev() {
        match find_family_blowup(host, &fam, t, DIRECT_BUDGET) {
            Ok(Some((idx, e))) => {
                log.line("direct", &[("member", idx.to_string()), ("t", t.to_string())]);
                let parts = e.vertex_map.chunks(t).map(<[usize]>::to_vec).collect();
                return finish(host, r, MultipartiteWitness::from_parts(host, parts), log);
            }
            Ok(None) => {}
            Err(e) => return Err(log.fail("direct", e)),
        }
    }
    Err(log.fail("direct", "no blow-up of any family member"))
}

fn sizes(sets: &[VertexSet]) -> String {
    sets.iter().map(|s| s.len().to_string()).collect::<Vec<_>>().join(",")
}

fn finish(
    host: &ColoredCompleteGraph,
    r: usize,
    witness: MultipartiteWitness,
    mut log: Log,
) -> Result<PipelineRun, PipelineError> {
    if let Err(e) = witness.verify(host) {
        return Err(log.fail("verify", e));
    }
    let covers = r == 1 || witness.covers_colors(r);
    if !covers {
        return Err(log.fail("verify", super::WitnessError::MissingColors(r)));
    }
    log.line(
        "done",
        &[("parts", witness.parts.len().to_string()), ("min_part", witness.min_part_size().to_string())],
    );
    Ok(PipelineRun {
        witness,
        log: log.lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{monochromatic, random_coloring};

    #[test]
    fn schedule_shapes() {
        let p = schedule(2000, &Rational::new(1, 2).unwrap(), &PipelineConfig::default());
        assert_eq!((p.w, p.k0, p.t), (176, 2, 3));
        assert_eq!(p.beta, Rational::new(1, 44).unwrap());
        let p = schedule(3000, &Rational::new(1, 3).unwrap(), &PipelineConfig::default());
        assert_eq!((p.w, p.k0, p.t), (216, 2, 2));
    }

    #[test]
    fn single_color_is_one_clique() {
        let g = monochromatic(6, 1, 1).unwrap();
        let run = extract_all_colors_witness(&g, 1, &PipelineConfig::default(), 0).unwrap();
        assert_eq!(run.witness.parts, vec![vec![0, 1, 2, 3, 4, 5]]);
    }

    #[test]
    fn missing_color_fails_at_its_stage() {
        let g = monochromatic(200, 2, 1).unwrap();
        let cfg = PipelineConfig {
            eps: Some(Rational::new(1, 2).unwrap()),
            ..PipelineConfig::default()
        };
        let err = extract_all_colors_witness(&g, 2, &cfg, 0).unwrap_err();
        assert_eq!(err.stage, "drc:color2");
        assert!(err.log.last().unwrap().starts_with("stage=drc:color2 status=failed"));
    }

    #[test]
    fn tiny_planted_host_goes_direct() {
        let fam = enumerate_family(2).unwrap();
        for f in &fam.members {
            let host = crate::family::blow_up(f, 4).to_host().unwrap();
            let run = extract_all_colors_witness(&host, 2, &PipelineConfig::default(), 0).unwrap();
            assert!(run.log.iter().any(|l| l.starts_with("stage=direct") && l.ends_with("t=4")));
            assert_eq!(run.witness.min_part_size(), 4);
        }
    }

    #[test]
    fn small_two_color_run() {
        let half = vec![Rational::new(1, 2).unwrap(); 2];
        let g = random_coloring(1000, 2, &half, 4).unwrap();
        let run = extract_all_colors_witness(&g, 2, &PipelineConfig::default(), 4).unwrap();
        run.witness.verify(&g).unwrap();
        assert!(run.witness.covers_colors(2));
        assert_eq!(run.witness.parts.len(), 4);
    }
}
