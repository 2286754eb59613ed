use std::path::{Path, PathBuf};

use brl_core::bounds::{lower_bound_hunt, write_certificate, Certificate, HuntOptions};
use brl_core::drc::{derive_seed, extract_all_colors_witness, witness_to_family_element, MultipartiteWitness, PipelineConfig};
use brl_core::family::MAX_FAMILY_COLORS;
use brl_core::graph::{paley_graph, random_balanced_coloring, random_coloring, two_block_coloring};
use brl_core::search::{find_color_consistent_with, find_family_blowup, SearchError, SearchOptions, SearchOutcome};
use brl_core::{enumerate_family, ColoredCompleteGraph, Rational};
use serde_json::{json, Value};

use crate::io::{read_host, read_pattern, run_config, write_host, write_json};
use crate::{
    CheckKind, ExtractArgs, GenKind, HuntArgs, Outcome, RunArgs, UsageError, EXIT_BUDGET, EXIT_HOLDS, EXIT_NOT,
};

fn code(holds: bool) -> u8 {
    if holds {
        EXIT_HOLDS
    } else {
        EXIT_NOT
    }
}

fn with_config(run: &RunArgs, extra: Value) -> Value {
    let mut cfg = run_config(run);
    if let (Some(base), Value::Object(more)) = (cfg.as_object_mut(), extra) {
        base.extend(more);
    }
    cfg
}

pub fn gen(run: &RunArgs, kind: &GenKind) -> Result<Outcome, UsageError> {
    let (g, stem, params, out) = match kind {
        GenKind::Paley { q, out } => (paley_graph(*q)?, format!("paley{q}"), json!({"kind": "paley", "q": q}), out),
        GenKind::TwoBlock { n, out } => (
            two_block_coloring(*n)?,
            format!("two-block{n}"),
            json!({"kind": "two-block", "n": n}),
            out,
        ),
        GenKind::Random {
            n,
            r,
            balanced: true,
            out,
            ..
        } => (
            random_balanced_coloring(*n, *r, run.seed)?,
            format!("random-n{n}-r{r}-s{}", run.seed),
            json!({"kind": "random", "n": n, "r": r, "balanced": true}),
            out,
        ),
        GenKind::Random { n, r, weights, out, .. } => {
            let weights: Vec<Rational> = match weights {
                Some(ws) => ws.iter().map(|w| w.trim().parse()).collect::<Result<_, _>>()?,
                None => vec![Rational::new(1, (*r).max(1) as i64)?; *r],
            };
            let g = random_coloring(*n, *r, &weights, run.seed)?;
            let shown: Vec<String> = weights.iter().map(ToString::to_string).collect();
            (
                g,
                format!("random-n{n}-r{r}-s{}", run.seed),
                json!({"kind": "random", "n": n, "r": r, "weights": shown}),
                out,
            )
        }
    };
    let path = out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{stem}.{}", run.format.name())));
    write_host(&g, &path, run.format)?;
    Ok(Outcome {
        code: EXIT_HOLDS,
        report: json!({
            "command": "gen",
            "config": with_config(run, params),
            "output": path.display().to_string(),
            "n": g.n(),
            "r": g.r(),
            "balance": g.balance_report(),
        }),
    })
}

pub fn check(run: &RunArgs, kind: &CheckKind) -> Result<Outcome, UsageError> {
    match kind {
        CheckKind::Balance { host } => {
            let eps = run.eps.as_ref().ok_or_else(|| UsageError("check balance needs --eps".into()))?;
            let g = read_host(host)?;
            let holds = g.is_eps_balanced(eps);
            Ok(Outcome {
                code: code(holds),
                report: json!({
                    "command": "check balance",
                    "config": with_config(run, json!({"host": host.display().to_string()})),
                    "balance": g.balance_report(),
                    "holds": holds,
                }),
            })
        }
        CheckKind::Pattern {
            host,
            pattern,
            parallel,
        } => {
            let g = read_host(host)?;
            let p = read_pattern(pattern)?;
            let opts = SearchOptions {
                budget: run.budget,
                parallel: *parallel,
            };
            let config = with_config(
                run,
                json!({"host": host.display().to_string(), "pattern": p, "parallel": parallel}),
            );
            let (code, verdict, embedding) = match find_color_consistent_with(&g, &p, &opts) {
                Ok(SearchOutcome::Found(e)) => (EXIT_HOLDS, "found", Some(e)),
                Ok(SearchOutcome::Exhausted) => (EXIT_NOT, "exhausted search space, no embedding", None),
                Err(SearchError::BudgetExhausted { .. }) => (EXIT_BUDGET, "budget exhausted, no verdict", None),
            };
            Ok(Outcome {
                code,
                report: json!({
                    "command": "check pattern",
                    "config": config,
                    "verdict": verdict,
                    "embedding": embedding,
                }),
            })
        }
        CheckKind::FamilyBlowup { host, t } => {
            let g = read_host(host)?;
            if g.r() > MAX_FAMILY_COLORS {
                return Err(UsageError(format!("family listings stop at {MAX_FAMILY_COLORS} colors")));
            }
            let fam = enumerate_family(g.r())?;
            let config = with_config(run, json!({"host": host.display().to_string(), "t": t}));
            let (code, verdict, found) = match find_family_blowup(&g, &fam, *t, run.budget) {
                Ok(Some((idx, e))) => (
                    EXIT_HOLDS,
                    "found",
                    json!({"index": idx, "member": fam.members[idx], "embedding": e}),
                ),
                Ok(None) => (EXIT_NOT, "exhausted search space, no embedding", Value::Null),
                Err(SearchError::BudgetExhausted { .. }) => (EXIT_BUDGET, "budget exhausted, no verdict", Value::Null),
            };
            Ok(Outcome {
                code,
                report: json!({
                    "command": "check family-blowup",
                    "config": config,
                    "verdict": verdict,
                    "found": found,
                }),
            })
        }
        CheckKind::Witness { host, witness } => {
            let g = read_host(host)?;
            let text = std::fs::read_to_string(witness).map_err(|e| UsageError(format!("{}: {e}", witness.display())))?;
            let w: MultipartiteWitness = serde_json::from_str(&text)?;
            let result = w.verify(&g);
            Ok(Outcome {
                code: code(result.is_ok()),
                report: json!({
                    "command": "check witness",
                    "config": with_config(run, json!({
                        "host": host.display().to_string(),
                        "witness": witness.display().to_string(),
                    })),
                    "valid": result.is_ok(),
                    "error": result.err().map(|e| e.to_string()),
                    "covers_all_colors": w.covers_colors(g.r()),
                    "min_part_size": w.min_part_size(),
                }),
            })
        }
    }
}

pub fn extract(run: &RunArgs, args: &ExtractArgs) -> Result<Outcome, UsageError> {
    let g = read_host(&args.host)?;
    let r = args.r.unwrap_or(g.r());
    if r == 0 || r > g.r() {
        return Err(UsageError(format!("--r must lie in 1..={}", g.r())));
    }
    let config = PipelineConfig {
        eps: run.eps.clone(),
        w_scale: args.w_scale,
        beta_scale: args.beta_scale,
        k0_min: args.k0_min,
        max_retries: args.max_retries,
        grid_budget: args.grid_budget,
    };
    let report_config = with_config(
        run,
        json!({
            "host": args.host.display().to_string(),
            "r": r,
            "pipeline": config,
            "out": args.out.display().to_string(),
        }),
    );
    let host_balanced = run.eps.as_ref().map(|e| g.is_eps_balanced(e));
    let result = extract_all_colors_witness(&g, r, &config, run.seed);
    let log = match &result {
        Ok(ok) => &ok.log,
        Err(e) => &e.log,
    };
    for line in log {
        eprintln!("{line}");
    }
    let pipeline_run = match result {
        Ok(ok) => ok,
        Err(e) => {
            return Ok(Outcome {
                code: EXIT_NOT,
                report: json!({
                    "command": "extract",
                    "config": report_config,
                    "host_balanced": host_balanced,
                    "status": "failed",
                    "stage": e.stage,
                    "error": e.message,
                }),
            })
        }
    };
    let w = pipeline_run.witness;
    write_json(&args.out, &w)?;
    let family = family_element(&w, r, args);
    Ok(Outcome {
        code: EXIT_HOLDS,
        report: json!({
            "command": "extract",
            "config": report_config,
            "host_balanced": host_balanced,
            "status": "ok",
            "witness": w,
            "family": family?,
        }),
    })
}

/// Matches the witness against the family and writes the member and
/// embedding; a `reason` is reported when that is impossible.
fn family_element(w: &MultipartiteWitness, r: usize, args: &ExtractArgs) -> Result<Value, UsageError> {
    let in_palette = w.part_colors.iter().chain(w.cross_colors.iter().map(|(_, _, c)| c)).all(|&c| c as usize <= r);
    if r > MAX_FAMILY_COLORS || !in_palette {
        return Ok(json!({"reason": format!("witness is not an {r}-colored object with a family listing")}));
    }
    let fam = enumerate_family(r)?;
    let k = w.min_part_size();
    match witness_to_family_element(w, &fam, k) {
        Ok((idx, e)) => {
            let path = args.family_out.clone().unwrap_or_else(|| sibling(&args.out, "family"));
            let element = json!({"r": r, "k": k, "index": idx, "member": fam.members[idx], "embedding": e});
            write_json(&path, &element)?;
            Ok(json!({"output": path.display().to_string(), "index": idx, "k": k}))
        }
        Err(e) => Ok(json!({"reason": e.to_string()})),
    }
}

fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}.json"))
}

pub fn family(run: &RunArgs, r: usize) -> Result<Outcome, UsageError> {
    let fam = enumerate_family(r)?;
    Ok(Outcome {
        code: EXIT_HOLDS,
        report: json!({
            "command": "family",
            "config": with_config(run, json!({"r": r})),
            "count": fam.len(),
            "members": fam.members,
        }),
    })
}

fn parse_range(s: &str) -> Result<(usize, usize), UsageError> {
    let bad = || UsageError(format!("--n expects `n` or `a..b`, got `{s}`"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn pattern_label(arg: &str) -> String {
    if arg.starts_with("M:") {
        arg.replace(':', "").replace(',', "-")
    } else {
        Path::new(arg)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "pattern".into())
    }
}

pub fn hunt(run: &RunArgs, args: &HuntArgs) -> Result<Outcome, UsageError> {
    let eps = run.eps.clone().ok_or_else(|| UsageError("hunt needs --eps".into()))?;
    let pattern = read_pattern(&args.pattern)?;
    if pattern.palette() < 2 {
        return Err(UsageError("hunt needs a pattern palette of at least 2 colors".into()));
    }
    if args.restarts == 0 {
        return Err(UsageError("--restarts must be positive".into()));
    }
    let (lo, hi) = parse_range(&args.n)?;
    let config = with_config(
        run,
        json!({
            "pattern": pattern,
            "n": args.n,
            "moves": args.moves,
            "restarts": args.restarts,
            "out": args.out.display().to_string(),
        }),
    );
    let mut rows: Vec<Value> = Vec::new();
    if let Some(cp) = args.checkpoint.as_deref().filter(|p| p.exists()) {
        let text = std::fs::read_to_string(cp)?;
        let saved: Value = serde_json::from_str(&text)?;
        if saved["config"] != config {
            return Err(UsageError(format!("{}: checkpoint was written for another configuration", cp.display())));
        }
        rows = saved["rows"].as_array().cloned().unwrap_or_default();
    }
    let opts = HuntOptions {
        moves: args.moves,
        restarts: args.restarts,
        verify_budget: run.budget,
        ..HuntOptions::default()
    };
    let label = pattern_label(&args.pattern);
    for n in lo..=hi {
        if rows.iter().any(|row| row["n"] == json!(n)) {
            continue;
        }
        let seed = derive_seed(run.seed, n as u64);
        let outcome = lower_bound_hunt(&pattern, &eps, n, &opts, seed);
        let best = outcome.best_objective.iter().min().copied();
        let row = match &outcome.graph {
            Some(g) => {
                let cert = Certificate {
                    pattern: pattern.clone(),
                    eps: eps.clone(),
                    n,
                    seed,
                    verified: true,
                };
                let (cgr, sidecar) = write_certificate(&args.out, &format!("{label}-n{n}"), g, &cert)?;
                found_row(n, seed, outcome.restart, g, &cgr, &sidecar)
            }
            None => json!({"n": n, "seed": seed, "found": false, "best_objective": best}),
        };
        rows.push(row);
        if let Some(cp) = &args.checkpoint {
            write_json(cp, &json!({"config": config, "rows": rows}))?;
        }
    }
    rows.sort_by_key(|row| row["n"].as_u64());
    rows.retain(|row| row["n"].as_u64().is_some_and(|n| (lo as u64..=hi as u64).contains(&n)));
    let any = rows.iter().any(|row| row["found"] == json!(true));
    Ok(Outcome {
        code: code(any),
        report: json!({"command": "hunt", "config": config, "rows": rows}),
    })
}

fn found_row(n: usize, seed: u64, restart: Option<usize>, g: &ColoredCompleteGraph, cgr: &Path, sidecar: &Path) -> Value {
    json!({
        "n": n,
        "seed": seed,
        "found": true,
        "restart": restart,
        "color_counts": g.color_counts(),
        "certificate": cgr.display().to_string(),
        "sidecar": sidecar.display().to_string(),
    })
}
