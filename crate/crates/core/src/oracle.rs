//! Exhaustive reference answers: minimum Euler genus over all rotation
//! systems with edge signs, and brute-force vertex deletion on top of it.
//!
//! Only [`Embedding::euler_genus`] is used from the flag calculus, so these
//! answers do not depend on deletion, drawing, merging or simplification.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::flag::{Embedding, Flag};
use crate::treedecomp::Graph;

/// Default cap on schemes examined per connected component.
pub const DEFAULT_MAX_SCHEMES: u128 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} embedding schemes exceed the ceiling of {1}")]
    TooManySchemes(u128, u128),
    #[error("rotation at vertex {0} is not a permutation of its edge ends")]
    BadRotation(usize),
    #[error("signature has {got} entries, expected {want}")]
    BadSignature { got: usize, want: usize },
    #[error("edge endpoint {0} out of range")]
    VertexOutOfRange(usize),
}

/// Rotation system plus edge signs. Edge ends are numbered `2e` (at the
/// first endpoint of edge `e`) and `2e + 1` (at the second).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingScheme {
    pub rotation: Vec<Vec<usize>>,
    /// `true` for a twisted (sign -1) edge.
    pub twisted: Vec<bool>,
}

fn end_vertex(edges: &[(usize, usize)], h: usize) -> usize {
    let (u, v) = edges[h / 2];
    if h.is_multiple_of(2) {
        u
    } else {
        v
    }
}

/// Flags `4e + 2 end + side`; `sigma` swaps sides, `theta` crosses the edge
/// (keeping the side for twisted edges), `phi` joins side 1 of each end to
/// side 0 of the next end in the rotation.
pub fn scheme_to_embedding(
    n: usize,
    edges: &[(usize, usize)],
    s: &EmbeddingScheme,
) -> Result<Embedding, OracleError> {
    let m = edges.len();
    if s.twisted.len() != m {
        return Err(OracleError::BadSignature {
            got: s.twisted.len(),
            want: m,
        });
    }
    if s.rotation.len() != n {
        return Err(OracleError::BadRotation(s.rotation.len()));
    }
    let mut seen = vec![false; 2 * m];
    for (v, rot) in s.rotation.iter().enumerate() {
        for &h in rot {
            if h >= 2 * m || seen[h] || end_vertex(edges, h) != v {
                return Err(OracleError::BadRotation(v));
            }
            seen[h] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(OracleError::BadRotation(n));
    }
    Ok(build(edges, &s.rotation, &s.twisted))
}

fn build(edges: &[(usize, usize)], rotation: &[Vec<usize>], twisted: &[bool]) -> Embedding {
    let m = edges.len();
    let flag = |h: usize, side: usize| -> Flag { 2 * h + side };
    let mut theta = vec![0; 4 * m];
    let mut sigma = vec![0; 4 * m];
    let mut phi = vec![0; 4 * m];
    for (e, &tw) in twisted.iter().enumerate().take(m) {
        for side in 0..2 {
            let a = flag(2 * e, side);
            let b = if tw {
                flag(2 * e + 1, side)
            } else {
                flag(2 * e + 1, 1 - side)
            };
            theta[a] = b;
            theta[b] = a;
        }
        for h in [2 * e, 2 * e + 1] {
            sigma[flag(h, 0)] = flag(h, 1);
            sigma[flag(h, 1)] = flag(h, 0);
        }
    }
    for rot in rotation {
        let d = rot.len();
        for i in 0..d {
            let a = flag(rot[i], 1);
            let b = flag(rot[(i + 1) % d], 0);
            phi[a] = b;
            phi[b] = a;
        }
    }
    Embedding::from_pairs(4 * m, &pairs(&theta), &pairs(&sigma), &pairs(&phi))
        .expect("scheme flags form a graph embedding")
}

fn pairs(v: &[Flag]) -> Vec<(Flag, Flag)> {
    (0..v.len())
        .filter(|&f| f < v[f])
        .map(|f| (f, v[f]))
        .collect()
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Connected multigraph prepared for scheme enumeration.
struct Component {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// edge ends at each vertex, first one fixed in every rotation
    ends: Vec<Vec<usize>>,
    /// edges whose sign is enumerated
    free_signs: Vec<usize>,
    rotations: u128,
}

impl Component {
    fn new(n: usize, edges: Vec<(usize, usize)>, orientable: bool) -> Self {
        let mut ends = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            ends[u].push(2 * e);
            ends[v].push(2 * e + 1);
        }
        // spanning tree edges keep sign +1
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut free_signs = Vec::new();
        for (e, &(u, v)) in edges.iter().enumerate() {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a == b {
                if !orientable {
                    free_signs.push(e);
                }
            } else {
                parent[a] = b;
            }
        }
        let rotations = ends
            .iter()
            .map(|e| factorial(e.len().saturating_sub(1)))
            .product();
        Component {
            n,
            edges,
            ends,
            free_signs,
            rotations,
        }
    }

    fn scheme_count(&self) -> u128 {
        self.rotations << self.free_signs.len()
    }

    /// Rotation number `idx` in mixed radix over the vertices, each digit a
    /// Lehmer code for the order of the non-fixed ends.
    fn rotation(&self, mut idx: u128) -> Vec<Vec<usize>> {
        self.ends
            .iter()
            .map(|ends| {
                if ends.len() <= 2 {
                    return ends.clone();
                }
                let k = ends.len() - 1;
                let radix = factorial(k);
                let mut code = idx % radix;
                idx /= radix;
                let mut pool: Vec<usize> = ends[1..].to_vec();
                let mut rot = vec![ends[0]];
                for i in (0..k).rev() {
                    let f = factorial(i);
                    let j = (code / f) as usize;
                    code %= f;
                    rot.push(pool.remove(j));
                }
                rot
            })
            .collect()
    }

    /// Genus lower bound from face lengths of at least three.
    fn lower_bound(&self, orientable: bool) -> usize {
        let simple = {
            let mut seen = std::collections::BTreeSet::new();
            self.edges
                .iter()
                .all(|&(u, v)| u != v && seen.insert((u.min(v), u.max(v))))
        };
        if !simple || self.n < 3 {
            return 0;
        }
        let (e, v) = (self.edges.len() as i64, self.n as i64);
        // E - V - F + 2 with F <= 2E/3
        let lb = (e - 3 * v + 6 + 2) / 3; // ceil((e - 3v + 6) / 3)
        let lb = lb.max(0) as usize;
        if orientable {
            lb + lb % 2
        } else {
            lb
        }
    }

    fn min_genus(&self, orientable: bool, stop_at: usize) -> usize {
        if self.edges.is_empty() {
            return 0;
        }
        let lb = self.lower_bound(orientable).max(stop_at);
        let best = AtomicUsize::new(usize::MAX);
        let signs = 1u64 << self.free_signs.len();
        let chunk = 64u128;
        let chunks = self.rotations.div_ceil(chunk);
        (0..chunks as u64).into_par_iter().for_each(|c| {
            let lo = c as u128 * chunk;
            let hi = (lo + chunk).min(self.rotations);
            let mut twisted = vec![false; self.edges.len()];
            for r in lo..hi {
                if best.load(Ordering::Relaxed) <= lb {
                    return;
                }
                let rot = self.rotation(r);
                for mask in 0..signs {
                    for (i, &e) in self.free_signs.iter().enumerate() {
                        twisted[e] = mask >> i & 1 == 1;
                    }
                    let g = build(&self.edges, &rot, &twisted).euler_genus();
                    best.fetch_min(g, Ordering::Relaxed);
                }
            }
        });
        best.load(Ordering::Relaxed)
    }
}

/// Connected components of an edge list (loops and parallel edges
/// allowed), each renumbered from zero. Isolated vertices are dropped.
/// Vertex count and renumbered edges of one component.
type Part = (usize, Vec<(usize, usize)>);

fn split(n: usize, edges: &[(usize, usize)]) -> Result<Vec<Part>, OracleError> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(u, v) in edges {
        if u >= n {
            return Err(OracleError::VertexOutOfRange(u));
        }
        if v >= n {
            return Err(OracleError::VertexOutOfRange(v));
        }
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    let mut comp_of = std::collections::BTreeMap::new();
    let mut local = vec![0; n];
    let mut out: Vec<Part> = Vec::new();
    let mut touched = vec![false; n];
    for &(u, v) in edges {
        touched[u] = true;
        touched[v] = true;
    }
    for v in 0..n {
        if !touched[v] {
            continue;
        }
        let r = find(&mut parent, v);
        let c = *comp_of.entry(r).or_insert_with(|| {
            out.push((0, Vec::new()));
            out.len() - 1
        });
        local[v] = out[c].0;
        out[c].0 += 1;
    }
    for &(u, v) in edges {
        let c = comp_of[&find(&mut parent, u)];
        out[c].1.push((local[u], local[v]));
    }
    Ok(out)
}

/// Minimum Euler genus of an edge list over all schemes (summed over
/// components), or over sign-free schemes when `orientable`.
pub fn exact_genus_edges(
    n: usize,
    edges: &[(usize, usize)],
    orientable: bool,
    max_schemes: u128,
) -> Result<usize, OracleError> {
    let comps: Vec<Component> = split(n, edges)?
        .into_iter()
        .map(|(cn, ce)| Component::new(cn, ce, orientable))
        .collect();
    for c in &comps {
        if c.scheme_count() > max_schemes {
            return Err(OracleError::TooManySchemes(c.scheme_count(), max_schemes));
        }
    }
    Ok(comps.iter().map(|c| c.min_genus(orientable, 0)).sum())
}

pub fn exact_genus(g: &Graph, orientable: bool) -> Result<usize, OracleError> {
    exact_genus_edges(g.n(), g.edges(), orientable, DEFAULT_MAX_SCHEMES)
}

/// Whether the Euler genus is at most `bound`; stops a component's search
/// as soon as the remaining budget is met.
pub fn genus_at_most(
    g: &Graph,
    bound: usize,
    orientable: bool,
    max_schemes: u128,
) -> Result<bool, OracleError> {
    let comps: Vec<Component> = split(g.n(), g.edges())?
        .into_iter()
        .map(|(cn, ce)| Component::new(cn, ce, orientable))
        .collect();
    let lbs: Vec<usize> = comps.iter().map(|c| c.lower_bound(orientable)).collect();
    let mut lb_sum: usize = lbs.iter().sum();
    if lb_sum > bound {
        return Ok(false);
    }
    for c in &comps {
        if c.scheme_count() > max_schemes {
            return Err(OracleError::TooManySchemes(c.scheme_count(), max_schemes));
        }
    }
    let mut total = 0;
    for (c, lb) in comps.iter().zip(lbs) {
        lb_sum -= lb;
        // this component may use whatever the others cannot
        let room = bound - total - lb_sum;
        let gc = c.min_genus(orientable, room);
        if gc > room {
            return Ok(false);
        }
        total += gc;
    }
    Ok(true)
}

/// Advances to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    for i in (0..k).rev() {
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Smallest deletion set of size at most `budget` leaving Euler genus at
/// most `genus_bound`, searching sets in order of size then lexicographic.
pub fn brute_force_gvd_witness(
    g: &Graph,
    genus_bound: usize,
    budget: usize,
    orientable: bool,
    max_schemes: u128,
) -> Result<Option<Vec<usize>>, OracleError> {
    let n = g.n();
    for size in 0..=budget.min(n) {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            let (h, _) = g.without(&subset);
            if genus_at_most(&h, genus_bound, orientable, max_schemes)? {
                return Ok(Some(subset));
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
    }
    Ok(None)
}

pub fn brute_force_gvd(
    g: &Graph,
    genus_bound: usize,
    budget: usize,
    orientable: bool,
) -> Result<Option<usize>, OracleError> {
    Ok(
        brute_force_gvd_witness(g, genus_bound, budget, orientable, DEFAULT_MAX_SCHEMES)?
            .map(|y| y.len()),
    )
}

/// Number of schemes the oracle would examine for the largest component.
pub fn scheme_count(g: &Graph, orientable: bool) -> u128 {
    split(g.n(), g.edges())
        .expect("graph edges in range")
        .into_iter()
        .map(|(cn, ce)| Component::new(cn, ce, orientable).scheme_count())
        .max()
        .unwrap_or(1)
}
