//! Edge-colored patterns with wildcard pairs, and embeddings into hosts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fully_colored::tri_index;
use crate::graph::{Color, ColoredCompleteGraph, GraphError, BLUE, MAX_COLORS, RED};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("palette size must be in 1..={MAX_COLORS}, got {0}")]
    BadPalette(usize),
    #[error("expected {expected} pair labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("label {0} outside the palette")]
    LabelOutOfRange(Color),
    #[error("pattern on {0} vertices has only wildcard pairs")]
    AllWildcards(usize),
    #[error("pattern has wildcard pairs and cannot be a host")]
    NotComplete,
    #[error("cannot parse pattern {0:?}")]
    Spec(String),
}

/// A pattern on `m` vertices. Each unordered pair carries a color from
/// `1..=palette` or `None` (no constraint).
///
/// JSON form: `{"m": .., "palette": .., "labels": [..]}` with `null` for
/// wildcards, validated on load.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PatternRepr")]
pub struct Pattern {
    m: usize,
    palette: usize,
    labels: Vec<Option<Color>>,
}

#[derive(Deserialize)]
struct PatternRepr {
    m: usize,
    palette: usize,
    labels: Vec<Option<Color>>,
}

impl TryFrom<PatternRepr> for Pattern {
    type Error = PatternError;

    fn try_from(p: PatternRepr) -> Result<Self, PatternError> {
        Pattern::new(p.m, p.palette, p.labels)
    }
}

impl std::fmt::Debug for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Pattern(m={}, palette={}, labels=[", self.m, self.palette)?;
        for l in &self.labels {
            match l {
                Some(c) => write!(f, "{c}")?,
                None => write!(f, "*")?,
            }
        }
        write!(f, "])")
    }
}

impl Pattern {
    /// `labels` is flat upper-triangular, like [`crate::FullyColoredGraph`].
    pub fn new(m: usize, palette: usize, labels: Vec<Option<Color>>) -> Result<Self, PatternError> {
        if palette == 0 || palette > MAX_COLORS {
            return Err(PatternError::BadPalette(palette));
        }
        let expected = m * m.saturating_sub(1) / 2;
        if labels.len() != expected {
            return Err(PatternError::LabelCount {
                expected,
                got: labels.len(),
            });
        }
        if let Some(c) = labels.iter().flatten().find(|&&c| c == 0 || c as usize > palette) {
            return Err(PatternError::LabelOutOfRange(*c));
        }
        if m > 1 && labels.iter().all(Option::is_none) {
            return Err(PatternError::AllWildcards(m));
        }
        Ok(Self { m, palette, labels })
    }

    pub fn from_fn<F>(m: usize, palette: usize, mut label: F) -> Result<Self, PatternError>
    where
        F: FnMut(usize, usize) -> Option<Color>,
    {
        let mut labels = Vec::with_capacity(m * m.saturating_sub(1) / 2);
        for i in 0..m {
            for j in i + 1..m {
                labels.push(label(i, j));
            }
        }
        Self::new(m, palette, labels)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    pub fn label(&self, a: usize, b: usize) -> Option<Color> {
        assert_ne!(a, b);
        self.labels[tri_index(self.m, a.min(b), a.max(b))]
    }

    pub fn labels(&self) -> &[Option<Color>] {
        &self.labels
    }

    pub fn wildcard_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_none()).count()
    }

    /// Bitmask of palette colors that actually label some pair (bit `c - 1`).
    pub fn used_colors(&self) -> u64 {
        self.labels.iter().flatten().fold(0, |acc, &c| acc | 1 << (c - 1))
    }

    /// Number of non-wildcard pairs at `a`.
    pub fn constraint_degree(&self, a: usize) -> usize {
        (0..self.m).filter(|&b| b != a && self.label(a, b).is_some()).count()
    }

    /// Copy with one pair turned into a wildcard.
    pub fn relaxed(&self, a: usize, b: usize) -> Pattern {
        let mut p = self.clone();
        p.labels[tri_index(self.m, a.min(b), a.max(b))] = None;
        p
    }

    /// A wildcard-free pattern read as a host graph with `palette` colors.
    pub fn to_host(&self) -> Result<ColoredCompleteGraph, PatternError> {
        if self.labels.iter().any(Option::is_none) {
            return Err(PatternError::NotComplete);
        }
        ColoredCompleteGraph::from_fn(self.m, self.palette, |a, b| self.label(a, b).unwrap()).map_err(|e| match e {
            GraphError::BadColorCount(p) => PatternError::BadPalette(p),
            _ => PatternError::NotComplete,
        })
    }

    /// `M:l,k` shorthand or the JSON form.
    pub fn parse(text: &str) -> Result<Pattern, PatternError> {
        let text = text.trim();
        if text.starts_with("M:") {
            Self::parse_spec(text)
        } else {
            serde_json::from_str(text).map_err(|e| PatternError::Spec(e.to_string()))
        }
    }

    /// Parses the `M:l,k` shorthand.
    pub fn parse_spec(spec: &str) -> Result<Pattern, PatternError> {
        let bad = || PatternError::Spec(spec.to_string());
        let rest = spec.strip_prefix("M:").ok_or_else(bad)?;
        let (l, k) = rest.split_once(',').ok_or_else(bad)?;
        let l: usize = l.parse().map_err(|_| bad())?;
        let k: usize = k.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        Ok(m_pattern(l, k))
    }
}

/// `M_{l,k}`: vertices `0..l` form `L` (wildcards inside), vertices `l..l+k`
/// form a red clique `R`, and every `L`–`R` pair is blue.
pub fn m_pattern(l: usize, k: usize) -> Pattern {
    assert!(k >= 1, "M_{{l,k}} needs k >= 1");
    Pattern::from_fn(l + k, 2, |a, b| match (a < l, b < l) {
        (true, true) => None,
        (false, false) => Some(RED),
        _ => Some(BLUE),
    })
    .expect("M pattern is well formed")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    /// Pattern vertex `a` goes to host vertex `vertex_map[a]`.
    pub vertex_map: Vec<usize>,
    /// Pattern color `c` goes to `color_map[c - 1]`; `None` for palette
    /// colors the pattern never uses.
    pub color_map: Vec<Option<Color>>,
}

/// Checks injectivity of both maps and every non-wildcard constraint.
pub fn verify_embedding(host: &ColoredCompleteGraph, p: &Pattern, e: &Embedding) -> bool {
    if e.vertex_map.len() != p.m() || e.color_map.len() != p.palette() {
        return false;
    }
    let mut seen_v = vec![false; host.n()];
    for &v in &e.vertex_map {
        if v >= host.n() || seen_v[v] {
            return false;
        }
        seen_v[v] = true;
    }
    let used = p.used_colors();
    let mut seen_c = 0u64;
    for (i, c) in e.color_map.iter().enumerate() {
        match c {
            Some(c) => {
                if *c == 0 || *c as usize > host.r() || seen_c >> (c - 1) & 1 == 1 {
                    return false;
                }
                seen_c |= 1 << (c - 1);
            }
            None if used >> i & 1 == 1 => return false,
            None => {}
        }
    }
    for a in 0..p.m() {
        for b in a + 1..p.m() {
            if let Some(c) = p.label(a, b) {
                let want = e.color_map[c as usize - 1].expect("checked above");
                if host.color(e.vertex_map[a], e.vertex_map[b]) != want {
                    return false;
                }
            }
        }
    }
    true
}
