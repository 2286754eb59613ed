//! The family of vertex-critical, all-colors fully-colored complete graphs.
//!
//! Members are enumerated exhaustively on up to `2r - 2` vertices and
//! deduplicated by a canonical form that quotients out both vertex
//! permutations and color permutations.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fully_colored::FullyColoredGraph;
use crate::graph::Color;
use crate::pattern::Pattern;

pub const MAX_FAMILY_COLORS: usize = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("family enumeration supports 1 <= r <= {MAX_FAMILY_COLORS}, got {0}")]
    UnsupportedColorCount(usize),
    #[error("graph does not use all {0} colors")]
    NotAllColors(usize),
}

/// Does `f` show every color of its palette on some vertex or edge?
pub fn uses_all_colors(f: &FullyColoredGraph) -> bool {
    let full = if f.r() == 64 { u64::MAX } else { (1u64 << f.r()) - 1 };
    f.color_mask() == full
}

/// Removing any single vertex loses some color.
pub fn is_vertex_critical(f: &FullyColoredGraph) -> Result<bool, FamilyError> {
    if !uses_all_colors(f) {
        return Err(FamilyError::NotAllColors(f.r()));
    }
    let m = f.m();
    Ok((0..m).all(|v| {
        let keep: Vec<usize> = (0..m).filter(|&u| u != v).collect();
        !uses_all_colors(&f.induced(&keep))
    }))
}

/// Byte string naming the class of a fully-colored graph under vertex and
/// color permutations. Layout: `m`, then for each position `j` the vertex
/// color followed by the colors to positions `0..j`, all relabeled in order
/// of first appearance; the lexicographic minimum over vertex orders wins.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CanonicalForm(pub Vec<u8>);

/// Canonical form plus the witnessing relabeling: `order[j]` is the vertex at
/// position `j`, and `color_relabel[c - 1]` is the canonical label of color
/// `c` (0 if `c` is unused).
#[derive(Debug, Clone)]
pub struct CanonicalLabeling {
    pub form: CanonicalForm,
    pub order: Vec<usize>,
    pub color_relabel: Vec<Color>,
}

struct CanonSearch<'a> {
    f: &'a FullyColoredGraph,
    m: usize,
    best: Option<(Vec<u8>, Vec<usize>, Vec<Color>)>,
    seq: Vec<u8>,
    order: Vec<usize>,
    relabel: Vec<Color>,
    next_label: Color,
    used: u32,
}

impl CanonSearch<'_> {
    fn label(&mut self, c: Color, touched: &mut Vec<usize>) -> u8 {
        let slot = &mut self.relabel[c as usize - 1];
        if *slot == 0 {
            *slot = self.next_label;
            self.next_label += 1;
            touched.push(c as usize - 1);
        }
        *slot
    }

    fn go(&mut self) {
        let depth = self.order.len();
        if depth == self.m {
            let better = match &self.best {
                None => true,
                Some((b, _, _)) => self.seq < *b,
            };
            if better {
                self.best = Some((self.seq.clone(), self.order.clone(), self.relabel.clone()));
            }
            return;
        }
        for x in 0..self.m {
            if self.used >> x & 1 == 1 {
                continue;
            }
            let start = self.seq.len();
            let mut touched = Vec::new();
            let vc = self.f.vertex_color(x);
            let l = self.label(vc, &mut touched);
            self.seq.push(l);
            for p in 0..depth {
                let c = self.f.edge_color(self.order[p], x);
                let l = self.label(c, &mut touched);
                self.seq.push(l);
            }
            let keep = match &self.best {
                None => true,
                Some((b, _, _)) => self.seq[..] <= b[..self.seq.len()],
            };
            if keep {
                self.order.push(x);
                self.used |= 1 << x;
                self.go();
                self.used &= !(1 << x);
                self.order.pop();
            }
            self.seq.truncate(start);
            for c in touched {
                self.relabel[c] = 0;
                self.next_label -= 1;
            }
        }
    }
}

pub fn canonical_labeling(f: &FullyColoredGraph) -> CanonicalLabeling {
    let m = f.m();
    assert!(m <= 32, "canonical form is brute force; m = {m} is too large");
    let mut s = CanonSearch {
        f,
        m,
        best: None,
        seq: Vec::with_capacity(m * (m + 1) / 2),
        order: Vec::with_capacity(m),
        relabel: vec![0; f.r()],
        next_label: 1,
        used: 0,
    };
    s.go();
    let (seq, order, color_relabel) = s.best.unwrap_or_default();
    let mut bytes = Vec::with_capacity(seq.len() + 1);
    bytes.push(m as u8);
    bytes.extend(seq);
    CanonicalLabeling {
        form: CanonicalForm(bytes),
        order,
        color_relabel,
    }
}

pub fn canonical_form(f: &FullyColoredGraph) -> CanonicalForm {
    canonical_labeling(f).form
}

/// The canonical representative encoded by a form (palette size `r`).
pub fn decode_form(form: &CanonicalForm, r: usize) -> FullyColoredGraph {
    let m = form.0[0] as usize;
    let seq = &form.0[1..];
    let mut vertex_colors = vec![0; m];
    let mut rows = vec![vec![0; m]; m];
    let mut pos = 0;
    for j in 0..m {
        vertex_colors[j] = seq[pos];
        pos += 1;
        for row in rows.iter_mut().take(j) {
            row[j] = seq[pos];
            pos += 1;
        }
    }
    let flat: Vec<Color> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).map(|(i, j)| rows[i][j]).collect();
    FullyColoredGraph::new(r, vertex_colors, flat).expect("form decodes to a valid graph")
}

/// A vertex/color isomorphism from `a` onto `b`, if one exists:
/// `vmap[v]` is the image of vertex `v`, `cmap[c - 1]` the image of color `c`.
pub fn find_isomorphism(a: &FullyColoredGraph, b: &FullyColoredGraph) -> Option<(Vec<usize>, Vec<Color>)> {
    if a.m() != b.m() || a.r() != b.r() {
        return None;
    }
    let la = canonical_labeling(a);
    let lb = canonical_labeling(b);
    if la.form != lb.form {
        return None;
    }
    let mut vmap = vec![0; a.m()];
    for (j, &va) in la.order.iter().enumerate() {
        vmap[va] = lb.order[j];
    }
    let r = a.r();
    let mut cmap = vec![0 as Color; r];
    let mut taken = vec![false; r];
    for c in 0..r {
        let lab = la.color_relabel[c];
        if lab != 0 {
            let target = lb.color_relabel.iter().position(|&x| x == lab).expect("labels match");
            cmap[c] = target as Color + 1;
            taken[target] = true;
        }
    }
    // unused colors: any injective completion
    for c in 0..r {
        if cmap[c] == 0 {
            let t = taken.iter().position(|&x| !x).expect("palette sizes match");
            taken[t] = true;
            cmap[c] = t as Color + 1;
        }
    }
    Some((vmap, cmap))
}

#[derive(Debug, Clone, Serialize)]
pub struct Family {
    pub r: usize,
    pub members: Vec<FullyColoredGraph>,
}

impl Family {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index of the member color-consistent with `f`.
    pub fn position(&self, f: &FullyColoredGraph) -> Option<usize> {
        let form = canonical_form(f);
        self.members.iter().position(|m| canonical_form(m) == form)
    }
}

/// Exhaustive labeled search on `m` vertices. Colors are introduced in order
/// of first use, and a branch is cut once the colors still unused cannot
/// possibly make every vertex critical.
struct Enumerator {
    m: usize,
    r: usize,
    /// vertex-incidence mask of each slot, in canonical serialization order
    slots: Vec<u16>,
    /// `(is_vertex, a, b)` per slot
    slot_pos: Vec<(bool, usize, usize)>,
    found: BTreeSet<CanonicalForm>,
    assign: Vec<Color>,
}

impl Enumerator {
    fn new(m: usize, r: usize) -> Self {
        let mut slots = Vec::new();
        let mut slot_pos = Vec::new();
        for j in 0..m {
            slots.push(1u16 << j);
            slot_pos.push((true, j, j));
            for i in 0..j {
                slots.push(1u16 << i | 1 << j);
                slot_pos.push((false, i, j));
            }
        }
        let n = slots.len();
        Self {
            m,
            r,
            slots,
            slot_pos,
            found: BTreeSet::new(),
            assign: vec![0; n],
        }
    }

    fn run(mut self) -> BTreeSet<CanonicalForm> {
        let cores = vec![0u16; self.r];
        self.go(0, 0, cores);
        self.found
    }

    /// `cores[c]`: vertices touched by every slot of color `c + 1` so far.
    fn go(&mut self, idx: usize, used: usize, cores: Vec<u16>) {
        let all: u16 = ((1u32 << self.m) - 1) as u16;
        let remaining = self.slots.len() - idx;
        if self.r - used > remaining {
            return;
        }
        let covered = cores[..used].iter().fold(0u16, |a, &c| a | c);
        let uncovered = (all & !covered).count_ones() as usize;
        if uncovered > 2 * (self.r - used) {
            return;
        }
        if idx == self.slots.len() {
            if used == self.r && covered == all {
                self.emit();
            }
            return;
        }
        let mask = self.slots[idx];
        let top = (used + 1).min(self.r);
        for c in 0..top {
            let mut next = cores.clone();
            let nu = if c == used {
                next[c] = mask;
                used + 1
            } else {
                next[c] &= mask;
                used
            };
            self.assign[idx] = c as Color + 1;
            self.go(idx + 1, nu, next);
        }
    }

    fn emit(&mut self) {
        let mut vc = vec![0; self.m];
        let mut rows = vec![vec![0; self.m]; self.m];
        for (s, &(is_v, a, b)) in self.slot_pos.iter().enumerate() {
            if is_v {
                vc[a] = self.assign[s];
            } else {
                rows[a][b] = self.assign[s];
            }
        }
        let flat: Vec<Color> = (0..self.m)
            .flat_map(|i| (i + 1..self.m).map(move |j| (i, j)))
            .map(|(i, j)| rows[i][j])
            .collect();
        let f = FullyColoredGraph::new(self.r, vc, flat).expect("enumerated colors in range");
        debug_assert!(uses_all_colors(&f) && is_vertex_critical(&f).unwrap());
        self.found.insert(canonical_form(&f));
    }
}

/// Maximum vertex count of a member: `2r - 2`, or 1 when `r = 1`.
pub fn max_member_size(r: usize) -> usize {
    (2 * r).saturating_sub(2).max(1)
}

/// Every vertex-critical, all-colors fully-colored complete graph on at most
/// `2r - 2` vertices, one per color-consistency class, sorted by vertex count
/// and then by canonical form.
pub fn enumerate_family(r: usize) -> Result<Family, FamilyError> {
    if r == 0 || r > MAX_FAMILY_COLORS {
        return Err(FamilyError::UnsupportedColorCount(r));
    }
    let per_m: Vec<BTreeSet<CanonicalForm>> = (1..=max_member_size(r))
        .into_par_iter()
        .map(|m| Enumerator::new(m, r).run())
        .collect();
    let members = per_m
        .into_iter()
        .flatten()
        .map(|form| decode_form(&form, r))
        .collect();
    Ok(Family { r, members })
}

/// `t`-blow-up: vertex `i` of `f` becomes the block `i·t..(i+1)·t`, a clique
/// in `f`'s vertex color; pairs across blocks `i, j` take `f`'s edge color.
pub fn blow_up(f: &FullyColoredGraph, t: usize) -> Pattern {
    assert!(t >= 1, "blow-up factor must be positive");
    Pattern::from_fn(f.m() * t, f.r(), |a, b| {
        let (i, j) = (a / t, b / t);
        Some(if i == j { f.vertex_color(i) } else { f.edge_color(i, j) })
    })
    .expect("blow-up of a valid graph is a valid pattern")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{BLUE, RED};
    use proptest::prelude::*;

    fn fcg(r: usize, v: &[Color], rows: &[&[Color]]) -> FullyColoredGraph {
        let rows: Vec<Vec<Color>> = rows.iter().map(|r| r.to_vec()).collect();
        FullyColoredGraph::from_rows(r, v.to_vec(), &rows).unwrap()
    }

    #[test]
    fn all_colors_predicate() {
        assert!(uses_all_colors(&fcg(1, &[1], &[])));
        assert!(uses_all_colors(&fcg(2, &[RED, RED], &[&[BLUE]])));
        assert!(!uses_all_colors(&fcg(2, &[RED, RED], &[&[RED]])));
    }

    #[test]
    fn criticality_predicate() {
        assert_eq!(is_vertex_critical(&fcg(2, &[RED, RED], &[&[BLUE]])), Ok(true));
        assert_eq!(
            is_vertex_critical(&fcg(2, &[RED, RED, RED], &[&[BLUE, BLUE], &[BLUE]])),
            Ok(false)
        );
        assert_eq!(is_vertex_critical(&fcg(1, &[1], &[])), Ok(true));
        assert_eq!(
            is_vertex_critical(&fcg(2, &[RED, RED], &[&[RED]])),
            Err(FamilyError::NotAllColors(2))
        );
    }

    #[test]
    fn canonical_form_invariances() {
        let f = fcg(3, &[1, 2, 3], &[&[1, 2], &[3]]);
        let swapped = f.permuted(&[1, 0, 2], &[1, 2, 3]);
        let recolored = f.permuted(&[0, 1, 2], &[2, 1, 3]);
        assert_eq!(canonical_form(&f), canonical_form(&swapped));
        assert_eq!(canonical_form(&f), canonical_form(&recolored));
        let a = fcg(2, &[RED, RED], &[&[BLUE]]);
        let b = fcg(2, &[RED, BLUE], &[&[BLUE]]);
        assert_ne!(canonical_form(&a), canonical_form(&b));
    }

    #[test]
    fn decode_roundtrip() {
        let f = fcg(3, &[3, 1, 2, 2], &[&[1, 2, 3], &[3, 3], &[1]]);
        let form = canonical_form(&f);
        let g = decode_form(&form, 3);
        assert_eq!(canonical_form(&g), form);
        let (vmap, cmap) = find_isomorphism(&f, &g).unwrap();
        assert_eq!(f.permuted(&vmap, &cmap), g);
    }

    #[test]
    fn family_small_r() {
        let f1 = enumerate_family(1).unwrap();
        assert_eq!(f1.members, vec![fcg(1, &[1], &[])]);

        let f2 = enumerate_family(2).unwrap();
        assert_eq!(f2.len(), 2);
        let a = fcg(2, &[RED, RED], &[&[BLUE]]);
        let b = fcg(2, &[RED, BLUE], &[&[BLUE]]);
        assert!(f2.position(&a).is_some());
        assert!(f2.position(&b).is_some());
        assert_ne!(f2.position(&a), f2.position(&b));

        assert_eq!(enumerate_family(0).unwrap_err(), FamilyError::UnsupportedColorCount(0));
        assert_eq!(enumerate_family(6).unwrap_err(), FamilyError::UnsupportedColorCount(6));
    }

    #[test]
    fn members_satisfy_definition() {
        for r in 2..=4 {
            let fam = enumerate_family(r).unwrap();
            let forms: BTreeSet<_> = fam.members.iter().map(canonical_form).collect();
            assert_eq!(forms.len(), fam.len());
            for f in &fam.members {
                assert!(f.m() >= 1 && f.m() <= 2 * r - 2);
                assert!(uses_all_colors(f));
                assert!(is_vertex_critical(f).unwrap());
            }
        }
    }

    #[test]
    fn blow_up_shapes() {
        let a = fcg(2, &[RED, RED], &[&[BLUE]]);
        let p1 = blow_up(&a, 1);
        assert_eq!(p1.m(), 2);
        assert_eq!(p1.label(0, 1), Some(BLUE));

        let p2 = blow_up(&a, 2);
        assert_eq!(p2.m(), 4);
        assert_eq!(p2.label(0, 1), Some(RED));
        assert_eq!(p2.label(2, 3), Some(RED));
        for (x, y) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert_eq!(p2.label(x, y), Some(BLUE));
        }

        for f in enumerate_family(3).unwrap().members {
            let p = blow_up(&f, 3);
            let m = f.m();
            assert_eq!(p.labels().len(), (3 * m) * (3 * m - 1) / 2);
            let internal = (0..p.m())
                .flat_map(|a| (a + 1..p.m()).map(move |b| (a, b)))
                .filter(|&(a, b)| a / 3 == b / 3)
                .count();
            assert_eq!(internal, 3 * m);
        }
    }

    fn arb_fcg() -> impl Strategy<Value = FullyColoredGraph> {
        (1usize..=6, 1usize..=4).prop_flat_map(|(m, r)| {
            let e = m * (m - 1) / 2;
            (
                proptest::collection::vec(1..=r as Color, m),
                proptest::collection::vec(1..=r as Color, e),
            )
                .prop_map(move |(v, e)| FullyColoredGraph::new(r, v, e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn canonical_form_ignores_relabeling(
            f in arb_fcg(),
            vseed in any::<u64>(),
            cseed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(vseed);
            let mut vperm: Vec<usize> = (0..f.m()).collect();
            vperm.shuffle(&mut rng);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cseed);
            let mut cperm: Vec<Color> = (1..=f.r() as Color).collect();
            cperm.shuffle(&mut rng);
            let g = f.permuted(&vperm, &cperm);
            prop_assert_eq!(canonical_form(&f), canonical_form(&g));
            let (vm, cm) = find_isomorphism(&f, &g).unwrap();
            prop_assert_eq!(f.permuted(&vm, &cm), g);
        }
    }
}
