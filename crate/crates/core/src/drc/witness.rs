//! Fully-complete multipartite witnesses and their translation into
//! blow-up embeddings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{canonical_form, find_isomorphism, uses_all_colors, Family};
use crate::fully_colored::FullyColoredGraph;
use crate::graph::{Color, ColoredCompleteGraph};
use crate::pattern::Embedding;

/// Disjoint monochromatic cliques with monochromatic connections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultipartiteWitness {
    pub parts: Vec<Vec<usize>>,
    pub part_colors: Vec<Color>,
    /// `(i, j, c)` for every pair of parts `i < j`.
    pub cross_colors: Vec<(usize, usize, Color)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("witness has {parts} parts but {colors} part colors")]
    Shape { parts: usize, colors: usize },
    #[error("part {0} is empty")]
    EmptyPart(usize),
    #[error("vertex {0} is outside the host or used twice")]
    BadVertex(usize),
    #[error("part {part} is not a clique in color {color}")]
    PartNotMonochromatic { part: usize, color: Color },
    #[error("cross pair ({i}, {j}) missing, repeated or out of range")]
    CrossShape { i: usize, j: usize },
    #[error("parts {i} and {j} are not joined entirely in color {color}")]
    CrossNotMonochromatic { i: usize, j: usize, color: Color },
    #[error("witness does not use all {0} colors")]
    MissingColors(usize),
    #[error("witness parts are smaller than {0}")]
    PartsTooSmall(usize),
    #[error("no family member matches the contracted witness")]
    NoMember,
}

impl MultipartiteWitness {
    /// Reads colors straight from `host`; the result still has to pass
    /// [`MultipartiteWitness::verify`].
    pub fn from_parts(host: &ColoredCompleteGraph, parts: Vec<Vec<usize>>) -> Self {
        let part_colors = parts
            .iter()
            .map(|p| if p.len() >= 2 { host.color(p[0], p[1]) } else { 1 })
            .collect();
        let mut cross_colors = Vec::new();
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                cross_colors.push((i, j, host.color(parts[i][0], parts[j][0])));
            }
        }
        Self {
            parts,
            part_colors,
            cross_colors,
        }
    }

    /// Checks the witness against `host` using nothing but pair colors.
    pub fn verify(&self, host: &ColoredCompleteGraph) -> Result<(), WitnessError> {
        let p = self.parts.len();
        if self.part_colors.len() != p {
            return Err(WitnessError::Shape {
                parts: p,
                colors: self.part_colors.len(),
            });
        }
        let mut seen = vec![false; host.n()];
        for (i, part) in self.parts.iter().enumerate() {
            if part.is_empty() {
                return Err(WitnessError::EmptyPart(i));
            }
            for &v in part {
                if v >= host.n() || seen[v] {
                    return Err(WitnessError::BadVertex(v));
                }
                seen[v] = true;
            }
            let color = self.part_colors[i];
            for (a, &u) in part.iter().enumerate() {
                for &v in &part[a + 1..] {
                    if host.color(u, v) != color {
                        return Err(WitnessError::PartNotMonochromatic { part: i, color });
                    }
                }
            }
        }
        let mut covered = vec![false; p * p];
        for &(i, j, color) in &self.cross_colors {
            if i >= j || j >= p || covered[i * p + j] {
                return Err(WitnessError::CrossShape { i, j });
            }
            covered[i * p + j] = true;
            for &u in &self.parts[i] {
                for &v in &self.parts[j] {
                    if host.color(u, v) != color {
                        return Err(WitnessError::CrossNotMonochromatic { i, j, color });
                    }
                }
            }
        }
        for i in 0..p {
            for j in i + 1..p {
                if !covered[i * p + j] {
                    return Err(WitnessError::CrossShape { i, j });
                }
            }
        }
        Ok(())
    }

    /// Colors shown by the witness. Parts of one vertex show no color.
    pub fn colors_shown(&self) -> u64 {
        let mut mask = 0u64;
        for (part, &c) in self.parts.iter().zip(&self.part_colors) {
            if part.len() >= 2 {
                mask |= 1 << (c - 1);
            }
        }
        for &(_, _, c) in &self.cross_colors {
            mask |= 1 << (c - 1);
        }
        mask
    }

    pub fn covers_colors(&self, r: usize) -> bool {
        let full = if r == 64 { u64::MAX } else { (1u64 << r) - 1 };
        self.colors_shown() & full == full
    }

    pub fn min_part_size(&self) -> usize {
        self.parts.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// One vertex per part: part color on the vertex, cross color on edges.
    pub fn contract(&self, r: usize) -> FullyColoredGraph {
        let p = self.parts.len();
        let mut edge = vec![0 as Color; p * p];
        for &(i, j, c) in &self.cross_colors {
            edge[i * p + j] = c;
        }
        let mut flat = Vec::new();
        for i in 0..p {
            for j in i + 1..p {
                flat.push(edge[i * p + j]);
            }
        }
        FullyColoredGraph::new(r, self.part_colors.clone(), flat).expect("witness colors lie in the palette")
    }
}

/// Contracts the witness, deletes vertices greedily while all colors remain,
/// finds the matching family member and expands it back into an embedding of
/// the member's `k`-blow-up (each part truncated to `k` vertices).
pub fn witness_to_family_element(
    w: &MultipartiteWitness,
    fam: &Family,
    k: usize,
) -> Result<(usize, Embedding), WitnessError> {
    let r = fam.r;
    if w.min_part_size() < k.max(1) {
        return Err(WitnessError::PartsTooSmall(k));
    }
    let contracted = w.contract(r);
    if !uses_all_colors(&contracted) || (k >= 2 && !w.covers_colors(r)) {
        return Err(WitnessError::MissingColors(r));
    }
    let mut keep: Vec<usize> = (0..contracted.m()).collect();
    let mut i = 0;
    while i < keep.len() {
        let trial: Vec<usize> = keep.iter().copied().filter(|&x| x != keep[i]).collect();
        if !trial.is_empty() && uses_all_colors(&contracted.induced(&trial)) {
            keep = trial;
        } else {
            i += 1;
        }
    }
    let core = contracted.induced(&keep);
    let form = canonical_form(&core);
    let idx = fam
        .members
        .iter()
        .position(|m| canonical_form(m) == form)
        .ok_or(WitnessError::NoMember)?;
    let member = &fam.members[idx];
    let (vmap, cmap) = find_isomorphism(member, &core).ok_or(WitnessError::NoMember)?;
    let pattern = crate::family::blow_up(member, k);
    let used = pattern.used_colors();
    let vertex_map = (0..member.m() * k)
        .map(|a| w.parts[keep[vmap[a / k]]][a % k])
        .collect();
    let color_map = (0..r)
        .map(|c| (used >> c & 1 == 1).then_some(cmap[c]))
        .collect();
    Ok((idx, Embedding { vertex_map, color_map }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{blow_up, enumerate_family};
    use crate::graph::{BLUE, RED};
    use crate::pattern::verify_embedding;

    #[test]
    fn planted_blowup_round_trip() {
        let fam = enumerate_family(2).unwrap();
        for (i, f) in fam.members.iter().enumerate() {
            let host = blow_up(f, 3).to_host().unwrap();
            let parts: Vec<Vec<usize>> = (0..f.m()).map(|b| (b * 3..b * 3 + 3).collect()).collect();
            let w = MultipartiteWitness::from_parts(&host, parts);
            w.verify(&host).unwrap();
            let (idx, e) = witness_to_family_element(&w, &fam, 3).unwrap();
            assert_eq!(idx, i);
            assert!(verify_embedding(&host, &blow_up(&fam.members[idx], 3), &e));
        }
    }

    #[test]
    fn red_red_blue_cross_is_first_member() {
        let host = ColoredCompleteGraph::from_fn(4, 2, |u, v| if u / 2 == v / 2 { RED } else { BLUE }).unwrap();
        let w = MultipartiteWitness::from_parts(&host, vec![vec![0, 1], vec![2, 3]]);
        let fam = enumerate_family(2).unwrap();
        let (idx, _) = witness_to_family_element(&w, &fam, 2).unwrap();
        let m = &fam.members[idx];
        assert_eq!(m.vertex_color(0), m.vertex_color(1));
        assert_ne!(m.vertex_color(0), m.edge_color(0, 1));
    }

    #[test]
    fn verifier_rejects_bad_cross() {
        let host = ColoredCompleteGraph::from_fn(4, 2, |u, v| if u + v == 3 { BLUE } else { RED }).unwrap();
        let mut w = MultipartiteWitness::from_parts(&host, vec![vec![0, 1], vec![2, 3]]);
        assert!(matches!(w.verify(&host), Err(WitnessError::CrossNotMonochromatic { .. })));
        w.cross_colors.clear();
        assert!(matches!(w.verify(&host), Err(WitnessError::CrossShape { .. })));
    }

    #[test]
    fn json_shape() {
        let w = MultipartiteWitness {
            parts: vec![vec![0, 1], vec![2]],
            part_colors: vec![1, 2],
            cross_colors: vec![(0, 1, 2)],
        };
        assert_eq!(
            serde_json::to_string(&w).unwrap(),
            r#"{"parts":[[0,1],[2]],"part_colors":[1,2],"cross_colors":[[0,1,2]]}"#
        );
    }
}
