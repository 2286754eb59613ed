use std::path::Path;

use brl_core::cgr::{read_cgr, write_cgr};
use brl_core::{Color, ColoredCompleteGraph, Pattern};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{Format, RunArgs, UsageError};

/// JSON host: `rows[u]` lists the colors of `(u, v)` for `v > u`.
#[derive(Serialize, Deserialize)]
struct HostJson {
    n: usize,
    r: usize,
    rows: Vec<Vec<Color>>,
}

pub fn read_host(path: &Path) -> Result<ColoredCompleteGraph, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    let parsed = if text.trim_start().starts_with('{') {
        let h: HostJson = serde_json::from_str(&text)?;
        if h.rows.len() != h.n || h.rows.iter().enumerate().any(|(u, row)| row.len() != h.n - u - 1) {
            return Err(UsageError(format!("{}: rows do not match n = {}", path.display(), h.n)));
        }
        ColoredCompleteGraph::from_fn(h.n, h.r, |u, v| h.rows[u][v - u - 1])?
    } else {
        read_cgr(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?
    };
    Ok(parsed)
}

pub fn write_host(g: &ColoredCompleteGraph, path: &Path, format: Format) -> Result<(), UsageError> {
    let text = match format {
        Format::Cgr => write_cgr(g),
        Format::Json => {
            let rows = (0..g.n()).map(|u| (u + 1..g.n()).map(|v| g.color(u, v)).collect()).collect();
            serde_json::to_string(&HostJson { n: g.n(), r: g.r(), rows })? + "\n"
        }
    };
    std::fs::write(path, text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

/// `M:l,k` inline, anything else is a file holding either form.
pub fn read_pattern(arg: &str) -> Result<Pattern, UsageError> {
    if arg.starts_with("M:") {
        return Ok(Pattern::parse_spec(arg)?);
    }
    let text = std::fs::read_to_string(arg).map_err(|e| UsageError(format!("{arg}: {e}")))?;
    Ok(Pattern::parse(&text)?)
}

pub fn write_json(path: &Path, v: &impl Serialize) -> Result<(), UsageError> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    std::fs::write(path, text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

/// A closed stdout (say, piped into `head`) is not an error worth reporting.
pub fn print_report(v: &Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(v).expect("reports are plain JSON");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

/// The shared flags, as they were in effect for this run.
pub fn run_config(run: &RunArgs) -> Value {
    json!({
        "seed": run.seed,
        "budget": run.budget,
        "eps": run.eps.as_ref().map(|e| e.to_string()),
        "format": run.format.name(),
        "jobs": run.jobs,
    })
}
