#![allow(dead_code)]

use std::collections::BTreeSet;

use genus_vd::boundaried::BoundariedEmbedding;
use genus_vd::flag::Embedding;
use genus_vd::ops::{draw_edge, Anchor, Position};
use genus_vd::treedecomp::Graph;
use rand::Rng;

/// Random position on `e`; fresh vertices are likelier on small embeddings.
pub fn random_position<R: Rng>(rng: &mut R, e: &Embedding) -> Position {
    let n = e.flag_count();
    let a = if n == 0 {
        match rng.gen_range(0..3) {
            0 => Anchor::Bottom,
            1 => Anchor::Top,
            _ => Anchor::TopPrime,
        }
    } else {
        match rng.gen_range(0..10) {
            0 => Anchor::Bottom,
            1 => Anchor::Top,
            2 => Anchor::TopPrime,
            _ => Anchor::Flag(rng.gen_range(0..n)),
        }
    };
    let b = if n == 0 || rng.gen_range(0..6) == 0 {
        Anchor::Bottom
    } else {
        Anchor::Flag(rng.gen_range(0..n))
    };
    Position::new(a, b)
}

/// Embedding built by drawing up to `max_flags / 4` random edges.
pub fn random_embedding<R: Rng>(rng: &mut R, max_flags: usize) -> Embedding {
    let edges = rng.gen_range(0..=max_flags / 4);
    let mut e = Embedding::empty();
    for _ in 0..edges {
        let pos = random_position(rng, &e);
        e = draw_edge(&e, pos).expect("valid anchors").embedding;
    }
    e
}

/// Random embedding with up to `max_labels` of its vertices labelled from
/// `1..=capacity`.
pub fn random_boundaried<R: Rng>(
    rng: &mut R,
    max_flags: usize,
    capacity: usize,
    max_labels: usize,
) -> BoundariedEmbedding {
    let e = random_embedding(rng, max_flags);
    label_randomly(rng, e, capacity, max_labels)
}

pub fn label_randomly<R: Rng>(
    rng: &mut R,
    e: Embedding,
    capacity: usize,
    max_labels: usize,
) -> BoundariedEmbedding {
    let verts: Vec<usize> = e.vertices().iter().map(|o| o[0]).collect();
    let mut labels: Vec<usize> = (1..=capacity).collect();
    let mut pairs = Vec::new();
    let want = rng.gen_range(0..=max_labels.min(capacity));
    let mut order = verts.clone();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    for &v in order.iter().take(want) {
        let l = labels.swap_remove(rng.gen_range(0..labels.len()));
        pairs.push((v, l));
    }
    BoundariedEmbedding::new(e, capacity, pairs).expect("distinct labels on distinct vertices")
}

/// Every connected simple graph on `n` vertices, one per isomorphism class.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = Graph::new(n, edges.clone()).unwrap();
        if g.components().len() != 1 {
            continue;
        }
        let key = perms
            .iter()
            .map(|p| {
                let mut m: Vec<(usize, usize)> = edges
                    .iter()
                    .map(|&(u, v)| (p[u].min(p[v]), p[u].max(p[v])))
                    .collect();
                m.sort_unstable();
                m
            })
            .min()
            .unwrap();
        if seen.insert(key) {
            out.push(g);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}
