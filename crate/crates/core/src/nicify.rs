//! Nice boundaried embeddings: the predicate, the three simplifying
//! operations, the reducer built from them, canonical keys, and bounded
//! enumeration.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::boundaried::{draw_edge_b, BoundariedEmbedding, BoundaryError, Label};
use crate::flag::{Embedding, Flag};
use crate::ops::{self, Anchor, Position};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NiceError {
    #[error("operation not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("flag {0} out of range")]
    FlagOutOfRange(Flag),
    #[error("enumeration needs up to {needed} flags per embedding, ceiling is {ceiling}")]
    FlagCeiling { needed: usize, ceiling: usize },
    #[error("enumeration exceeded {0} intermediate maps")]
    CountCeiling(usize),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
}

/// Why an embedding is not nice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Unlabelled vertex of size 2 through this flag.
    SizeTwoVertex(Flag),
    /// Edge through `edge_flag` is incident to two faces and the face
    /// through `edge_flag` sees no labelled flag beyond the edge's corners.
    UnguardedEdge { edge_flag: Flag },
    /// Unlabelled, non-isolated vertex of size 4 through this flag.
    SizeFourVertex(Flag),
}

/// Largest flag count a nice embedding can have.
pub fn nice_flag_bound(capacity: usize, genus: usize) -> usize {
    48 * capacity + 24 * genus
}

struct Scan {
    vertex_size: Vec<usize>,
    face_of: Vec<usize>,
    face_sizes: Vec<usize>,
    comp_size: Vec<usize>,
}

fn scan(e: &Embedding) -> Scan {
    let n = e.flag_count();
    let verts = e.vertices();
    let faces = e.faces();
    let comps = e.components();
    let vertex_size = (0..n).map(|f| verts.orbit_containing(f).len()).collect();
    let face_of = (0..n).map(|f| faces.orbit_of(f)).collect();
    let face_sizes = faces.iter().map(|o| o.len()).collect();
    let comp_size = (0..n).map(|f| comps.orbit_containing(f).len()).collect();
    Scan {
        vertex_size,
        face_of,
        face_sizes,
        comp_size,
    }
}

/// Whether the edge through `x` is incident to two faces and the face of `x`
/// has no labelled flag outside `{x, y, phi(x), phi(y)}`.
fn unguarded(b: &BoundariedEmbedding, s: &Scan, x: Flag) -> bool {
    let e = b.embedding();
    if s.face_of[x] == s.face_of[e.sg(x)] {
        return false;
    }
    let y = e.th(x);
    let skip = [x, y, e.ph(x), e.ph(y)];
    let face = s.face_of[x];
    // walk the face of x
    let walk = e.orbit_walk(crate::flag::ObjectKind::Face, x);
    debug_assert_eq!(walk.len(), s.face_sizes[face]);
    !walk
        .iter()
        .any(|&z| !skip.contains(&z) && b.label_of(z).is_some())
}

fn first_violation(b: &BoundariedEmbedding, s: &Scan) -> Option<Violation> {
    let n = b.flag_count();
    if let Some(f) = (0..n).find(|&f| b.label_of(f).is_none() && s.vertex_size[f] == 2) {
        return Some(Violation::SizeTwoVertex(f));
    }
    if let Some(f) = (0..n).find(|&f| unguarded(b, s, f)) {
        return Some(Violation::UnguardedEdge { edge_flag: f });
    }
    (0..n)
        .find(|&f| b.label_of(f).is_none() && s.vertex_size[f] == 4 && s.comp_size[f] != 4)
        .map(Violation::SizeFourVertex)
}

pub fn nice_violation(b: &BoundariedEmbedding) -> Option<Violation> {
    first_violation(b, &scan(b.embedding()))
}

pub fn is_nice(b: &BoundariedEmbedding) -> bool {
    nice_violation(b).is_none()
}

fn check(b: &BoundariedEmbedding, f: Flag) -> Result<(), NiceError> {
    if f >= b.flag_count() {
        return Err(NiceError::FlagOutOfRange(f));
    }
    Ok(())
}

/// Deletes the edge through `edge_flag`, which must have an unlabelled
/// endpoint of size 2.
pub fn simplify_delete_size2(
    b: &BoundariedEmbedding,
    edge_flag: Flag,
) -> Result<BoundariedEmbedding, NiceError> {
    check(b, edge_flag)?;
    let e = b.embedding();
    let s = scan(e);
    let ok = [edge_flag, e.th(edge_flag)]
        .iter()
        .any(|&f| b.label_of(f).is_none() && s.vertex_size[f] == 2);
    if !ok {
        return Err(NiceError::NotApplicable("no unlabelled size-2 endpoint"));
    }
    Ok(crate::boundaried::delete_edge_b(b, edge_flag)?)
}

/// Deletes the edge through `edge_flag` when it is incident to two faces
/// and the face through `edge_flag` carries no other labelled flag.
pub fn simplify_delete_violating(
    b: &BoundariedEmbedding,
    edge_flag: Flag,
) -> Result<BoundariedEmbedding, NiceError> {
    check(b, edge_flag)?;
    if !unguarded(b, &scan(b.embedding()), edge_flag) {
        return Err(NiceError::NotApplicable("edge is guarded on this face"));
    }
    Ok(crate::boundaried::delete_edge_b(b, edge_flag)?)
}

/// Suppresses the unlabelled, non-isolated size-4 vertex through `vertex_flag`.
pub fn simplify_suppress4(
    b: &BoundariedEmbedding,
    vertex_flag: Flag,
) -> Result<BoundariedEmbedding, NiceError> {
    check(b, vertex_flag)?;
    let s = scan(b.embedding());
    if b.label_of(vertex_flag).is_some()
        || s.vertex_size[vertex_flag] != 4
        || s.comp_size[vertex_flag] == 4
    {
        return Err(NiceError::NotApplicable(
            "not an unlabelled non-isolated size-4 vertex",
        ));
    }
    Ok(suppress4(b, vertex_flag))
}

fn suppress4(b: &BoundariedEmbedding, x1: Flag) -> BoundariedEmbedding {
    let e = b.embedding();
    let x2 = e.ph(x1);
    let (y1, y2) = (e.th(x1), e.th(x2));
    let mut theta = e.theta().as_slice().to_vec();
    theta[y1] = y2;
    theta[y2] = y1;
    let (sy1, sy2) = (e.sg(y1), e.sg(y2));
    theta[sy1] = sy2;
    theta[sy2] = sy1;
    let mut drop = vec![false; e.flag_count()];
    for f in [x1, e.sg(x1), x2, e.sg(x2)] {
        drop[f] = true;
    }
    let (emb, renaming) =
        ops::remove_flags(&theta, e.sigma().as_slice(), e.phi().as_slice(), &drop);
    let labels = carry_labels(b.flag_labels(), &renaming, emb.flag_count());
    BoundariedEmbedding::from_raw(emb, b.capacity(), labels)
}

fn carry_labels(old: &[Option<Label>], renaming: &[Option<Flag>], n: usize) -> Vec<Option<Label>> {
    let mut out = vec![None; n];
    for (f, r) in renaming.iter().enumerate() {
        if let Some(r) = r {
            out[*r] = old[f];
        }
    }
    out
}

fn apply(b: &BoundariedEmbedding, v: Violation) -> BoundariedEmbedding {
    match v {
        Violation::SizeTwoVertex(f) | Violation::UnguardedEdge { edge_flag: f } => {
            crate::boundaried::delete_edge_b(b, f).expect("flag in range")
        }
        Violation::SizeFourVertex(f) => suppress4(b, f),
    }
}

/// Applies simplifying operations until the embedding is nice: size-2
/// deletions first, then unguarded-edge deletions, then suppressions, each
/// at the least applicable flag.
pub fn make_nice(b: &BoundariedEmbedding) -> BoundariedEmbedding {
    let mut cur = b.clone();
    loop {
        let s = scan(cur.embedding());
        match first_violation(&cur, &s) {
            None => break,
            Some(v) => {
                let next = apply(&cur, v);
                debug_assert!(next.flag_count() < cur.flag_count());
                cur = next;
            }
        }
    }
    debug_assert!(cur.flag_count() <= nice_flag_bound(cur.capacity(), cur.genus()));
    cur
}

/// Renaming-invariant encoding of a boundaried embedding.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u32>);

impl CanonicalKey {
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

struct Canon<'a> {
    e: &'a Embedding,
    labels: &'a [Option<Label>],
    num: Vec<u32>,
}

impl Canon<'_> {
    /// BFS code of the component from `start`, or `None` once it compares
    /// greater than `best`.
    fn code(&mut self, start: Flag, best: Option<&[u32]>) -> Option<(Vec<u32>, Vec<Flag>)> {
        let mut order = vec![start];
        self.num[start] = 0;
        let mut code = Vec::new();
        let mut less = best.is_none();
        let mut i = 0;
        let mut aborted = false;
        while i < order.len() {
            let f = order[i];
            for h in [self.e.th(f), self.e.sg(f), self.e.ph(f)] {
                if self.num[h] == u32::MAX {
                    self.num[h] = order.len() as u32;
                    order.push(h);
                }
                code.push(self.num[h]);
            }
            code.push(self.labels[f].map_or(0, |l| l as u32));
            if !less {
                let best = best.unwrap();
                let mine = &code[4 * i..4 * i + 4];
                let theirs = &best[4 * i..4 * i + 4];
                match mine.cmp(theirs) {
                    std::cmp::Ordering::Less => less = true,
                    std::cmp::Ordering::Greater => {
                        aborted = true;
                        break;
                    }
                    std::cmp::Ordering::Equal => {}
                }
            }
            i += 1;
        }
        for &f in &order {
            self.num[f] = u32::MAX;
        }
        if aborted {
            None
        } else {
            Some((code, order))
        }
    }
}

/// Per component: minimal code and the flags in code order. Components are
/// returned sorted by code.
fn component_codes(b: &BoundariedEmbedding) -> Vec<(Vec<u32>, Vec<Flag>)> {
    let e = b.embedding();
    let n = e.flag_count();
    let verts = e.vertices();
    let faces = e.faces();
    let invariant = |f: Flag| {
        (
            b.label_of(f).map_or(0, |l| l + 1),
            verts.orbit_containing(f).len(),
            faces.orbit_containing(f).len(),
        )
    };
    let mut canon = Canon {
        e,
        labels: b.flag_labels(),
        num: vec![u32::MAX; n],
    };
    let mut out = Vec::new();
    for comp in e.components().iter() {
        let min = comp.iter().map(|&f| invariant(f)).min().unwrap();
        let mut best: Option<(Vec<u32>, Vec<Flag>)> = None;
        for &s in comp.iter().filter(|&&f| invariant(f) == min) {
            if let Some(c) = canon.code(s, best.as_ref().map(|b| &b.0[..])) {
                best = Some(c);
            }
        }
        out.push(best.unwrap());
    }
    out.sort();
    out
}

fn key_from(b: &BoundariedEmbedding, comps: &[(Vec<u32>, Vec<Flag>)]) -> CanonicalKey {
    let mut key = Vec::with_capacity(2 + comps.len() + 4 * b.flag_count());
    key.push(b.capacity() as u32);
    key.push(b.flag_count() as u32);
    for (code, order) in comps {
        key.push(order.len() as u32);
        key.extend_from_slice(code);
    }
    CanonicalKey(key)
}

pub fn canonical_key(b: &BoundariedEmbedding) -> CanonicalKey {
    key_from(b, &component_codes(b))
}

pub fn canonical_key_plain(e: &Embedding) -> CanonicalKey {
    canonical_key(&BoundariedEmbedding::unlabelled(e.clone(), 0))
}

/// The key together with the embedding renamed into canonical flag order.
pub fn canonical_form(b: &BoundariedEmbedding) -> (CanonicalKey, BoundariedEmbedding) {
    let comps = component_codes(b);
    let key = key_from(b, &comps);
    let e = b.embedding();
    let n = e.flag_count();
    let mut new = vec![0; n];
    let mut next = 0;
    for (_, order) in &comps {
        for &f in order {
            new[f] = next;
            next += 1;
        }
    }
    let mut theta = vec![0; n];
    let mut sigma = vec![0; n];
    let mut phi = vec![0; n];
    let mut labels = vec![None; n];
    for f in 0..n {
        theta[new[f]] = new[e.th(f)];
        sigma[new[f]] = new[e.sg(f)];
        phi[new[f]] = new[e.ph(f)];
        labels[new[f]] = b.label_of(f);
    }
    let form =
        BoundariedEmbedding::from_raw(Embedding::from_raw(theta, sigma, phi), b.capacity(), labels);
    (key, form)
}

/// Resource ceilings for [`enumerate_nice`].
#[derive(Clone, Copy, Debug)]
pub struct EnumLimits {
    /// Refuse when the flag bound `48t + 24g` exceeds this.
    pub max_flags: usize,
    /// Refuse when more connected maps than this are generated.
    pub max_maps: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits {
            max_flags: 24,
            max_maps: 2_000_000,
        }
    }
}

/// Every nice `t`-boundaried embedding of Euler genus at most `g`, keyed by
/// canonical key.
///
/// Connected maps are grown edge by edge from the empty embedding (each new
/// edge touches the existing map), pruned by genus and, if asked, by
/// orientability; both only grow when edges are drawn. Nice connected maps
/// are then combined into label-disjoint unions within the genus budget.
pub fn enumerate_nice(
    t: usize,
    g: usize,
    orientable_only: bool,
    limits: EnumLimits,
) -> Result<BTreeMap<CanonicalKey, BoundariedEmbedding>, NiceError> {
    let bound = nice_flag_bound(t, g);
    if bound > limits.max_flags {
        return Err(NiceError::FlagCeiling {
            needed: bound,
            ceiling: limits.max_flags,
        });
    }
    let keep = |m: &BoundariedEmbedding| m.genus() <= g && (!orientable_only || m.is_orientable());

    let mut connected: BTreeMap<CanonicalKey, BoundariedEmbedding> = BTreeMap::new();
    let mut level: Vec<BoundariedEmbedding> = Vec::new();
    {
        let empty = BoundariedEmbedding::empty(t);
        let mut seen = BTreeMap::new();
        for pos in first_positions(t) {
            let m = draw_edge_b(&empty, pos)?;
            if keep(&m) {
                let (k, f) = canonical_form(&m);
                seen.entry(k).or_insert(f);
            }
        }
        level.extend(seen.values().cloned());
        connected.extend(seen);
    }
    let mut flags = 4;
    while flags + 4 <= bound && !level.is_empty() {
        let grown: Vec<Vec<(CanonicalKey, BoundariedEmbedding)>> = level
            .par_iter()
            .map(|m| {
                let mut out = Vec::new();
                for pos in extension_positions(m) {
                    let next = draw_edge_b(m, pos).expect("valid anchors");
                    if keep(&next) {
                        out.push(canonical_form(&next));
                    }
                }
                out
            })
            .collect();
        let mut seen = BTreeMap::new();
        for (k, f) in grown.into_iter().flatten() {
            seen.entry(k).or_insert(f);
        }
        level = seen.values().cloned().collect();
        connected.extend(seen);
        if connected.len() > limits.max_maps {
            return Err(NiceError::CountCeiling(limits.max_maps));
        }
        flags += 4;
    }

    let parts: Vec<(BoundariedEmbedding, usize, BTreeSet<Label>)> = connected
        .into_values()
        .filter(is_nice)
        .map(|m| {
            let genus = m.genus();
            let labels = m.label_range();
            (m, genus, labels)
        })
        .collect();
    let mut out = BTreeMap::new();
    let mut stack = Vec::new();
    combine(
        &parts,
        0,
        g,
        bound,
        &BTreeSet::new(),
        &mut stack,
        &mut |chosen| {
            let mut acc = BoundariedEmbedding::empty(t);
            for &i in chosen {
                acc = union(&acc, &parts[i].0);
            }
            let (k, f) = canonical_form(&acc);
            out.entry(k).or_insert(f);
        },
    );
    Ok(out)
}

fn union(a: &BoundariedEmbedding, b: &BoundariedEmbedding) -> BoundariedEmbedding {
    let e = a.embedding().disjoint_union(b.embedding());
    let mut labels = a.flag_labels().to_vec();
    labels.extend_from_slice(b.flag_labels());
    BoundariedEmbedding::from_raw(e, a.capacity(), labels)
}

fn combine(
    parts: &[(BoundariedEmbedding, usize, BTreeSet<Label>)],
    from: usize,
    genus_left: usize,
    flags_left: usize,
    used: &BTreeSet<Label>,
    chosen: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    emit(chosen);
    for i in from..parts.len() {
        let (m, genus, labels) = &parts[i];
        if *genus > genus_left || m.flag_count() > flags_left || !used.is_disjoint(labels) {
            continue;
        }
        // Unlabelled genus-0 parts would repeat forever; none are nice.
        debug_assert!(*genus > 0 || !labels.is_empty());
        let mut used2 = used.clone();
        used2.extend(labels.iter().copied());
        chosen.push(i);
        combine(
            parts,
            i,
            genus_left - genus,
            flags_left - m.flag_count(),
            &used2,
            chosen,
            emit,
        );
        chosen.pop();
    }
}

fn fresh_anchors(used: &BTreeSet<Label>, t: usize) -> Vec<Anchor> {
    let mut out = vec![Anchor::Bottom];
    out.extend(
        (1..=t)
            .filter(|l| !used.contains(l))
            .map(Anchor::BottomLabelled),
    );
    out
}

fn first_positions(t: usize) -> Vec<Position> {
    let none = BTreeSet::new();
    let mut out = Vec::new();
    for b in fresh_anchors(&none, t) {
        for a in fresh_anchors(&none, t)
            .into_iter()
            .chain([Anchor::Top, Anchor::TopPrime])
        {
            if let (Anchor::BottomLabelled(p), Anchor::BottomLabelled(q)) = (a, b) {
                if p == q {
                    continue;
                }
            }
            out.push(Position::new(a, b));
        }
    }
    out
}

/// Positions for a new edge with at least one end on an existing flag.
fn extension_positions(m: &BoundariedEmbedding) -> Vec<Position> {
    let used = m.label_range();
    let n = m.flag_count();
    let fresh = fresh_anchors(&used, m.capacity());
    let mut a_opts: Vec<Anchor> = (0..n).map(Anchor::Flag).collect();
    a_opts.extend(fresh.iter().copied());
    a_opts.extend([Anchor::Top, Anchor::TopPrime]);
    let mut b_opts: Vec<Anchor> = (0..n).map(Anchor::Flag).collect();
    b_opts.extend(fresh.iter().copied());
    let mut out = Vec::new();
    for &a in &a_opts {
        for &b in &b_opts {
            if a.flag().is_none() && b.flag().is_none() {
                continue;
            }
            if let (Anchor::BottomLabelled(p), Anchor::BottomLabelled(q)) = (a, b) {
                if p == q {
                    continue;
                }
            }
            out.push(Position::new(a, b));
        }
    }
    out
}
