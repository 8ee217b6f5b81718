//! t-boundaried embeddings: embeddings with an injective partial labelling
//! of their vertices, and merges of two of them along equally labelled
//! vertices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::flag::{parse_pair_line, Embedding, Flag, FlagError};
use crate::nicify::{canonical_key, CanonicalKey};
use crate::ops::{self, Anchor, EmbedError, Position};

/// Labels are `1..=capacity`.
pub type Label = usize;

/// Per-side flag ceiling for the exhaustive merge helpers.
pub const MERGE_FLAG_CEILING: usize = 48;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundaryError {
    #[error("label {label} outside 1..={capacity}")]
    LabelOutOfRange { label: Label, capacity: usize },
    #[error("label {0} used on two vertices")]
    DuplicateLabel(Label),
    #[error("vertex through flag {0} labelled twice")]
    VertexLabelledTwice(Flag),
    #[error("label capacities differ ({0} vs {1})")]
    CapacityMismatch(usize, usize),
    #[error("label {0} is already in use")]
    LabelInUse(Label),
    #[error("embedding with {0} flags exceeds the merge enumeration ceiling")]
    TooLarge(usize),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Flag(#[from] FlagError),
    #[error("malformed boundaried embedding text: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundariedEmbedding {
    embedding: Embedding,
    capacity: usize,
    /// Label of the vertex each flag belongs to.
    flag_labels: Vec<Option<Label>>,
}

impl BoundariedEmbedding {
    /// `labels` maps any flag of a vertex to that vertex's label.
    pub fn new(
        embedding: Embedding,
        capacity: usize,
        labels: impl IntoIterator<Item = (Flag, Label)>,
    ) -> Result<Self, BoundaryError> {
        let verts = embedding.vertices();
        let mut flag_labels = vec![None; embedding.flag_count()];
        let mut used = BTreeSet::new();
        for (f, l) in labels {
            if f >= embedding.flag_count() {
                return Err(FlagError::OutOfRange {
                    flag: f,
                    universe: embedding.flag_count(),
                }
                .into());
            }
            if l == 0 || l > capacity {
                return Err(BoundaryError::LabelOutOfRange { label: l, capacity });
            }
            if !used.insert(l) {
                return Err(BoundaryError::DuplicateLabel(l));
            }
            for &g in verts.orbit_containing(f) {
                if flag_labels[g].is_some() {
                    return Err(BoundaryError::VertexLabelledTwice(f));
                }
                flag_labels[g] = Some(l);
            }
        }
        Ok(BoundariedEmbedding {
            embedding,
            capacity,
            flag_labels,
        })
    }

    pub fn unlabelled(embedding: Embedding, capacity: usize) -> Self {
        let n = embedding.flag_count();
        BoundariedEmbedding {
            embedding,
            capacity,
            flag_labels: vec![None; n],
        }
    }

    pub fn empty(capacity: usize) -> Self {
        BoundariedEmbedding::unlabelled(Embedding::empty(), capacity)
    }

    pub(crate) fn from_raw(
        embedding: Embedding,
        capacity: usize,
        flag_labels: Vec<Option<Label>>,
    ) -> Self {
        let b = BoundariedEmbedding {
            embedding,
            capacity,
            flag_labels,
        };
        debug_assert!(b.check_labels().is_ok(), "{:?}", b.check_labels());
        b
    }

    /// Labels constant on vertices, injective across vertices, in range.
    pub fn check_labels(&self) -> Result<(), BoundaryError> {
        let verts = self.embedding.vertices();
        let mut seen = BTreeMap::new();
        for (idx, orbit) in verts.iter().enumerate() {
            let l = self.flag_labels[orbit[0]];
            if orbit.iter().any(|&f| self.flag_labels[f] != l) {
                return Err(BoundaryError::VertexLabelledTwice(orbit[0]));
            }
            if let Some(l) = l {
                if l == 0 || l > self.capacity {
                    return Err(BoundaryError::LabelOutOfRange {
                        label: l,
                        capacity: self.capacity,
                    });
                }
                if seen.insert(l, idx).is_some() {
                    return Err(BoundaryError::DuplicateLabel(l));
                }
            }
        }
        Ok(())
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn flag_count(&self) -> usize {
        self.embedding.flag_count()
    }

    pub fn genus(&self) -> usize {
        self.embedding.euler_genus()
    }

    pub fn label_of(&self, f: Flag) -> Option<Label> {
        self.flag_labels[f]
    }

    pub fn flag_labels(&self) -> &[Option<Label>] {
        &self.flag_labels
    }

    /// Labelled vertices keyed by their least flag.
    pub fn labels(&self) -> BTreeMap<Flag, Label> {
        let mut out = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (f, l) in self.flag_labels.iter().enumerate() {
            if let Some(l) = l {
                if seen.insert(*l) {
                    out.insert(f, *l);
                }
            }
        }
        out
    }

    pub fn label_range(&self) -> BTreeSet<Label> {
        self.flag_labels.iter().flatten().copied().collect()
    }

    /// Least flag of the vertex carrying `label`.
    pub fn vertex_with_label(&self, label: Label) -> Option<Flag> {
        self.flag_labels.iter().position(|&l| l == Some(label))
    }

    pub fn forget_label(&self, label: Label) -> Self {
        let flag_labels = self
            .flag_labels
            .iter()
            .map(|&l| if l == Some(label) { None } else { l })
            .collect();
        BoundariedEmbedding {
            embedding: self.embedding.clone(),
            capacity: self.capacity,
            flag_labels,
        }
    }

    pub fn is_orientable(&self) -> bool {
        self.embedding.is_orientable()
    }
}

/// Deletes an edge, carrying labels along the vertex correspondence.
pub fn delete_edge_b(
    e: &BoundariedEmbedding,
    edge_flag: Flag,
) -> Result<BoundariedEmbedding, BoundaryError> {
    let d = ops::delete_edge(&e.embedding, edge_flag)?;
    let mut flag_labels = vec![None; d.embedding.flag_count()];
    for (old, new) in d.renaming.iter().enumerate() {
        if let Some(new) = new {
            flag_labels[*new] = e.flag_labels[old];
        }
    }
    Ok(BoundariedEmbedding::from_raw(
        d.embedding,
        e.capacity,
        flag_labels,
    ))
}

/// Draws an edge; fresh vertices created by `BottomLabelled(l)` receive `l`.
/// The new flags are `x = n`, `y = n + 1`, `y' = n + 2`, `x' = n + 3`.
pub fn draw_edge_b(
    e: &BoundariedEmbedding,
    pos: Position,
) -> Result<BoundariedEmbedding, BoundaryError> {
    let used = e.label_range();
    let mut fresh = Vec::new();
    for anchor in [pos.a, pos.b] {
        if let Anchor::BottomLabelled(l) = anchor {
            if l == 0 || l > e.capacity {
                return Err(BoundaryError::LabelOutOfRange {
                    label: l,
                    capacity: e.capacity,
                });
            }
            if used.contains(&l) || fresh.contains(&l) {
                return Err(BoundaryError::LabelInUse(l));
            }
            fresh.push(l);
        }
    }
    let (a, b) = ops::resolve_anchors(&e.embedding, pos)?;
    let drawn = ops::draw_resolved(&e.embedding, a, b);
    let n = e.flag_count();
    let mut flag_labels = e.flag_labels.clone();
    let a_label = match pos.a {
        Anchor::BottomLabelled(l) => Some(l),
        _ => None,
    };
    let b_label = match pos.b {
        Anchor::BottomLabelled(l) => Some(l),
        _ => None,
    };
    // x, y, y', x'
    flag_labels.extend_from_slice(&[a_label, b_label, b_label, a_label]);
    // New flags joining an existing vertex take that vertex's label.
    let verts = drawn.embedding.vertices();
    for orbit in verts.iter() {
        if !orbit.iter().any(|&f| f >= n) {
            continue;
        }
        let label = orbit.iter().find_map(|&f| flag_labels[f]);
        for &f in orbit {
            flag_labels[f] = label;
        }
    }
    Ok(BoundariedEmbedding::from_raw(
        drawn.embedding,
        e.capacity,
        flag_labels,
    ))
}

/// sigma-blocks `(in, out)` of the vertex through `start`, in cycle order.
fn vertex_blocks(e: &Embedding, start: Flag) -> Vec<(Flag, Flag)> {
    let mut blocks = Vec::new();
    let mut f = start;
    loop {
        let out = e.sg(f);
        blocks.push((f, out));
        f = e.ph(out);
        if f == start {
            break;
        }
    }
    blocks
}

/// All cyclic block sequences whose restrictions give `a` and `b` (the
/// latter in either direction), each returned as the list of new `phi`
/// pairs `(out_i, in_{i+1})`.
fn cycle_merges(a: &[(Flag, Flag)], b: &[(Flag, Flag)]) -> Vec<Vec<(Flag, Flag)>> {
    let m2 = b.len();
    let rest = a.len() - 1 + m2;
    let mut out = Vec::new();
    let reversed: Vec<(Flag, Flag)> = b.iter().rev().map(|&(i, o)| (o, i)).collect();
    for seq in [b, &reversed[..]] {
        for r in 0..m2 {
            let rotated: Vec<(Flag, Flag)> = (0..m2).map(|i| seq[(r + i) % m2]).collect();
            let mut slots = vec![false; rest];
            choose_slots(&mut slots, 0, m2, &mut |mask| {
                let mut order = Vec::with_capacity(rest + 1);
                order.push(a[0]);
                let (mut ia, mut ib) = (1, 0);
                for &take_b in mask {
                    if take_b {
                        order.push(rotated[ib]);
                        ib += 1;
                    } else {
                        order.push(a[ia]);
                        ia += 1;
                    }
                }
                let k = order.len();
                out.push((0..k).map(|i| (order[i].1, order[(i + 1) % k].0)).collect());
            });
        }
    }
    out
}

fn choose_slots(slots: &mut [bool], from: usize, left: usize, emit: &mut impl FnMut(&[bool])) {
    if left == 0 {
        emit(slots);
        return;
    }
    if slots.len() - from < left {
        return;
    }
    for i in from..slots.len() {
        if slots.len() - i < left {
            break;
        }
        slots[i] = true;
        choose_slots(slots, i + 1, left - 1, emit);
        slots[i] = false;
    }
}

/// Calls `visit` on every merge of `e1` and `e2` (flags of `e2` shifted by
/// `e1.flag_count()`), without deduplication.
pub fn for_each_merge(
    e1: &BoundariedEmbedding,
    e2: &BoundariedEmbedding,
    mut visit: impl FnMut(BoundariedEmbedding),
) -> Result<(), BoundaryError> {
    if e1.capacity != e2.capacity {
        return Err(BoundaryError::CapacityMismatch(e1.capacity, e2.capacity));
    }
    let union = e1.embedding.disjoint_union(&e2.embedding);
    let mut flag_labels = e1.flag_labels.clone();
    flag_labels.extend_from_slice(&e2.flag_labels);

    let off = e1.flag_count();
    let l2 = e2.labels();
    let mut per_label: Vec<Vec<Vec<(Flag, Flag)>>> = Vec::new();
    for (f1, l) in e1.labels() {
        if let Some((&f2, _)) = l2.iter().find(|(_, &m)| m == l) {
            let a = vertex_blocks(&union, f1);
            let b = vertex_blocks(&union, f2 + off);
            per_label.push(cycle_merges(&a, &b));
        }
    }

    let base_phi = union.phi().as_slice().to_vec();
    let theta = union.theta().as_slice().to_vec();
    let sigma = union.sigma().as_slice().to_vec();
    let mut choice = vec![0usize; per_label.len()];
    loop {
        let mut phi = base_phi.clone();
        for (options, &c) in per_label.iter().zip(&choice) {
            for &(p, q) in &options[c] {
                phi[p] = q;
                phi[q] = p;
            }
        }
        visit(BoundariedEmbedding::from_raw(
            Embedding::from_raw(theta.clone(), sigma.clone(), phi),
            e1.capacity,
            flag_labels.clone(),
        ));
        // odometer over per-label choices
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(());
            }
            choice[i] += 1;
            if choice[i] < per_label[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Every merge of `e1` and `e2`, deduplicated up to flag renaming and
/// ordered by canonical key.
pub fn merge_all(
    e1: &BoundariedEmbedding,
    e2: &BoundariedEmbedding,
) -> Result<Vec<BoundariedEmbedding>, BoundaryError> {
    let mut seen: BTreeMap<CanonicalKey, BoundariedEmbedding> = BTreeMap::new();
    for_each_merge(e1, e2, |m| {
        seen.entry(canonical_key(&m)).or_insert(m);
    })?;
    Ok(seen.into_values().collect())
}

/// Minimum Euler genus over all merges. Exponential; test scale only.
pub fn genus_min_merge(
    e1: &BoundariedEmbedding,
    e2: &BoundariedEmbedding,
) -> Result<usize, BoundaryError> {
    for e in [e1, e2] {
        if e.flag_count() > MERGE_FLAG_CEILING {
            return Err(BoundaryError::TooLarge(e.flag_count()));
        }
    }
    let mut best = usize::MAX;
    for_each_merge(e1, e2, |m| best = best.min(m.genus()))?;
    Ok(best)
}

impl fmt::Display for BoundariedEmbedding {
    /// The embedding's four lines, then the capacity, then
    /// `label least-flag` pairs.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.embedding)?;
        writeln!(f, "{}", self.capacity)?;
        let parts: Vec<String> = self
            .labels()
            .iter()
            .map(|(flag, l)| format!("{l} {flag}"))
            .collect();
        writeln!(f, "{}", parts.join(" "))
    }
}

impl FromStr for BoundariedEmbedding {
    type Err = BoundaryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lines: Vec<&str> = s.lines().collect();
        if lines.len() < 5 {
            return Err(BoundaryError::Parse("expected at least five lines".into()));
        }
        let embedding: Embedding = lines[..4].join("\n").parse()?;
        let capacity: usize = lines[4]
            .trim()
            .parse()
            .map_err(|_| BoundaryError::Parse("bad capacity".into()))?;
        let pairs = parse_pair_line(lines.get(5).copied().unwrap_or(""), "label")?;
        BoundariedEmbedding::new(embedding, capacity, pairs.into_iter().map(|(l, f)| (f, l)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::fixtures::*;

    fn labelled_edge(cap: usize, lx: Option<Label>, ly: Option<Label>) -> BoundariedEmbedding {
        let mut labels = Vec::new();
        if let Some(l) = lx {
            labels.push((0, l));
        }
        if let Some(l) = ly {
            labels.push((2, l));
        }
        BoundariedEmbedding::new(single_edge(), cap, labels).unwrap()
    }

    #[test]
    fn labels_validated() {
        assert!(BoundariedEmbedding::new(single_edge(), 2, [(0, 3)]).is_err());
        assert!(BoundariedEmbedding::new(single_edge(), 2, [(0, 1), (2, 1)]).is_err());
        assert!(BoundariedEmbedding::new(single_edge(), 2, [(0, 1), (1, 2)]).is_err());
        let e = labelled_edge(2, Some(2), Some(1));
        assert_eq!(e.labels(), BTreeMap::from([(0, 2), (2, 1)]));
    }

    #[test]
    fn disjoint_labels_single_merge() {
        let a = labelled_edge(3, Some(1), None);
        let b = BoundariedEmbedding::new(projective_loop(), 3, [(0, 2)]).unwrap();
        let all = merge_all(&a, &b).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].genus(), a.genus() + b.genus());
        assert_eq!(genus_min_merge(&a, &b).unwrap(), 1);
    }

    #[test]
    fn two_edges_sharing_one_label_make_a_path() {
        let a = labelled_edge(2, Some(1), None);
        let b = labelled_edge(2, Some(1), None);
        let all = merge_all(&a, &b).unwrap();
        assert_eq!(all.len(), 1);
        let m = &all[0];
        assert_eq!(m.genus(), 0);
        assert_eq!(m.embedding().vertices().len(), 3);
        assert_eq!(m.label_range(), BTreeSet::from([1]));
    }

    #[test]
    fn two_edges_sharing_both_labels() {
        let a = labelled_edge(2, Some(1), Some(2));
        let b = labelled_edge(2, Some(1), Some(2));
        let all = merge_all(&a, &b).unwrap();
        assert!(all.len() >= 2);
        assert_eq!(all.iter().map(|m| m.genus()).min(), Some(0));
        assert_eq!(genus_min_merge(&a, &b).unwrap(), 0);
        for m in &all {
            assert_eq!(m.embedding().vertices().len(), 2);
            assert_eq!(m.flag_count(), 8);
        }
    }

    #[test]
    fn merge_with_empty() {
        let a = BoundariedEmbedding::new(projective_loop(), 2, [(0, 1)]).unwrap();
        assert_eq!(
            genus_min_merge(&a, &BoundariedEmbedding::empty(2)).unwrap(),
            1
        );
        assert!(genus_min_merge(&a, &BoundariedEmbedding::empty(3)).is_err());
    }

    #[test]
    fn projective_loops_sharing_label() {
        let a = BoundariedEmbedding::new(projective_loop(), 1, [(0, 1)]).unwrap();
        let g = genus_min_merge(&a, &a).unwrap();
        // Interleaving the two twisted loops gives two one-sided curves
        // crossing once, which fits in the projective plane.
        let all = merge_all(&a, &a).unwrap();
        assert_eq!(g, all.iter().map(|m| m.genus()).min().unwrap());
        assert_eq!(g, 1);
        assert_eq!(all.iter().map(|m| m.genus()).max(), Some(2));
    }

    #[test]
    fn restriction_reproduces_sides() {
        let a = BoundariedEmbedding::new(sphere_loop(), 2, [(0, 1)]).unwrap();
        let b = labelled_edge(2, Some(1), Some(2));
        for_each_merge(&a, &b, |m| {
            let f = m.vertex_with_label(1).unwrap();
            let cyc = m
                .embedding()
                .object_cycle(crate::flag::ObjectKind::Vertex, f)
                .unwrap();
            let left = cyc.restrict(|g| g < 4).unwrap();
            let right = cyc.restrict(|g| g >= 4).unwrap();
            assert_eq!(
                left,
                a.embedding()
                    .object_cycle(crate::flag::ObjectKind::Vertex, 0)
                    .unwrap()
            );
            let expected = b
                .embedding()
                .object_cycle(crate::flag::ObjectKind::Vertex, 0)
                .unwrap();
            let shifted =
                crate::flag::Cycle::new(expected.elements().iter().map(|f| f + 4).collect());
            assert_eq!(right, shifted);
        })
        .unwrap();
    }

    #[test]
    fn delete_and_draw_labels() {
        let e = labelled_edge(2, Some(1), Some(2));
        let d = delete_edge_b(&e, 0).unwrap();
        assert_eq!(d.flag_count(), 0);
        assert!(d.label_range().is_empty());

        let drawn = draw_edge_b(
            &BoundariedEmbedding::empty(2),
            Position::new(Anchor::BottomLabelled(1), Anchor::BottomLabelled(2)),
        )
        .unwrap();
        assert_eq!(drawn.label_range(), BTreeSet::from([1, 2]));
        let plain = draw_edge_b(
            &BoundariedEmbedding::empty(2),
            Position::new(Anchor::Bottom, Anchor::Bottom),
        )
        .unwrap();
        assert!(plain.label_range().is_empty());
        assert_eq!(
            draw_edge_b(&e, Position::new(Anchor::BottomLabelled(1), Anchor::Bottom)).unwrap_err(),
            BoundaryError::LabelInUse(1)
        );
    }

    #[test]
    fn delete_in_labelled_path_keeps_labels() {
        // path 1 - u - 2
        let e = labelled_edge(2, Some(1), None);
        let path = draw_edge_b(
            &e,
            Position::new(Anchor::Flag(2), Anchor::BottomLabelled(2)),
        )
        .unwrap();
        assert_eq!(path.label_range(), BTreeSet::from([1, 2]));
        let d = delete_edge_b(&path, 0).unwrap();
        assert_eq!(d.label_range(), BTreeSet::from([2]));
        let d = delete_edge_b(&path, 4).unwrap();
        assert_eq!(d.label_range(), BTreeSet::from([1]));
    }

    #[test]
    fn text_round_trip() {
        let e = labelled_edge(3, Some(3), Some(1));
        let s = e.to_string();
        assert_eq!(s.parse::<BoundariedEmbedding>().unwrap(), e);
    }
}
