//! Complete graphs with colored vertices and colored edges.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Color, MAX_COLORS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FullyColoredError {
    #[error("color count must be in 1..={MAX_COLORS}, got {0}")]
    BadColorCount(usize),
    #[error("expected {expected} edge colors for {m} vertices, got {got}")]
    EdgeCount { m: usize, expected: usize, got: usize },
    #[error("color {0} outside the palette")]
    ColorOutOfRange(Color),
}

/// Index of the pair `i < j` in the flat upper-triangular order
/// `(0,1), (0,2), ..., (0,m-1), (1,2), ...`.
#[inline]
pub fn tri_index(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < m);
    i * (2 * m - i - 1) / 2 + (j - i - 1)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FullyColoredGraph {
    r: usize,
    vertex_colors: Vec<Color>,
    edge_colors: Vec<Color>,
}

impl std::fmt::Debug for FullyColoredGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F(r={}, v={:?}, e={:?})", self.r, self.vertex_colors, self.edge_rows())
    }
}

impl FullyColoredGraph {
    /// `edge_colors` is flat upper-triangular (see [`tri_index`]).
    pub fn new(r: usize, vertex_colors: Vec<Color>, edge_colors: Vec<Color>) -> Result<Self, FullyColoredError> {
        if r == 0 || r > MAX_COLORS {
            return Err(FullyColoredError::BadColorCount(r));
        }
        let m = vertex_colors.len();
        let expected = m * m.saturating_sub(1) / 2;
        if edge_colors.len() != expected {
            return Err(FullyColoredError::EdgeCount {
                m,
                expected,
                got: edge_colors.len(),
            });
        }
        if let Some(&c) = vertex_colors
            .iter()
            .chain(&edge_colors)
            .find(|&&c| c == 0 || c as usize > r)
        {
            return Err(FullyColoredError::ColorOutOfRange(c));
        }
        Ok(Self {
            r,
            vertex_colors,
            edge_colors,
        })
    }

    /// `rows[i]` holds the colors of `(i, j)` for `j > i`; the last row may be
    /// omitted.
    pub fn from_rows(r: usize, vertex_colors: Vec<Color>, rows: &[Vec<Color>]) -> Result<Self, FullyColoredError> {
        let flat: Vec<Color> = rows.iter().flatten().copied().collect();
        Self::new(r, vertex_colors, flat)
    }

    pub fn m(&self) -> usize {
        self.vertex_colors.len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn vertex_color(&self, v: usize) -> Color {
        self.vertex_colors[v]
    }

    pub fn vertex_colors(&self) -> &[Color] {
        &self.vertex_colors
    }

    pub fn edge_color(&self, u: usize, v: usize) -> Color {
        assert_ne!(u, v);
        let (i, j) = (u.min(v), u.max(v));
        self.edge_colors[tri_index(self.m(), i, j)]
    }

    pub fn edge_colors_flat(&self) -> &[Color] {
        &self.edge_colors
    }

    pub fn edge_rows(&self) -> Vec<Vec<Color>> {
        let m = self.m();
        (0..m.saturating_sub(1))
            .map(|i| (i + 1..m).map(|j| self.edge_color(i, j)).collect())
            .collect()
    }

    /// Bitmask of the colors appearing on vertices or edges (bit `c - 1`).
    pub fn color_mask(&self) -> u64 {
        self.vertex_colors
            .iter()
            .chain(&self.edge_colors)
            .fold(0u64, |acc, &c| acc | 1 << (c - 1))
    }

    /// Subgraph induced on `keep` (in the given order).
    pub fn induced(&self, keep: &[usize]) -> FullyColoredGraph {
        let vertex_colors = keep.iter().map(|&v| self.vertex_colors[v]).collect();
        let mut edge_colors = Vec::new();
        for (a, &u) in keep.iter().enumerate() {
            for &v in &keep[a + 1..] {
                edge_colors.push(self.edge_color(u, v));
            }
        }
        FullyColoredGraph {
            r: self.r,
            vertex_colors,
            edge_colors,
        }
    }

    /// Relabels vertices (`old v -> vperm[v]`) and colors (`c -> cperm[c - 1]`).
    pub fn permuted(&self, vperm: &[usize], cperm: &[Color]) -> FullyColoredGraph {
        let m = self.m();
        let mut inv = vec![0; m];
        for (old, &new) in vperm.iter().enumerate() {
            inv[new] = old;
        }
        let vertex_colors = (0..m).map(|v| cperm[self.vertex_colors[inv[v]] as usize - 1]).collect();
        let mut edge_colors = Vec::with_capacity(self.edge_colors.len());
        for i in 0..m {
            for j in i + 1..m {
                edge_colors.push(cperm[self.edge_color(inv[i], inv[j]) as usize - 1]);
            }
        }
        FullyColoredGraph {
            r: self.r,
            vertex_colors,
            edge_colors,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FullyColoredJson {
    vertex_colors: Vec<Color>,
    edge_colors: Vec<Vec<Color>>,
}

impl Serialize for FullyColoredGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FullyColoredJson {
            vertex_colors: self.vertex_colors.clone(),
            edge_colors: self.edge_rows(),
        }
        .serialize(s)
    }
}
