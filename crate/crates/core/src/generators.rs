//! Graph families used as fixtures.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::treedecomp::{Graph, TreeDecomposition};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("no connected simple graph has {n} vertices and {m} edges")]
    Infeasible { n: usize, m: usize },
    #[error("parameter must be at least 1")]
    TooSmall,
}

pub fn complete(n: usize) -> Graph {
    let mut e = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            e.push((i, j));
        }
    }
    Graph::new(n, e).expect("simple")
}

/// Sides `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let mut e = Vec::new();
    for i in 0..a {
        for j in 0..b {
            e.push((i, a + j));
        }
    }
    Graph::new(a + b, e).expect("simple")
}

/// `r` by `c` grid, vertex `(i, j)` is `i * c + j`.
pub fn grid(r: usize, c: usize) -> Graph {
    let mut e = Vec::new();
    for i in 0..r {
        for j in 0..c {
            if j + 1 < c {
                e.push((i * c + j, i * c + j + 1));
            }
            if i + 1 < r {
                e.push((i * c + j, (i + 1) * c + j));
            }
        }
    }
    Graph::new(r * c, e).expect("simple")
}

/// Wall of side length `s`: rows `0..=s` of `2s + 2` vertices joined as
/// paths, rung `(i, j)-(i+1, j)` whenever `i + j` is even, then vertices of
/// degree one stripped repeatedly.
pub fn wall(s: usize) -> Result<Graph, GenError> {
    if s == 0 {
        return Err(GenError::TooSmall);
    }
    let (rows, cols) = (s + 1, 2 * s + 2);
    let id = |i: usize, j: usize| i * cols + j;
    let mut edges = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if j + 1 < cols {
                edges.push((id(i, j), id(i, j + 1)));
            }
            if i + 1 < rows && (i + j) % 2 == 0 {
                edges.push((id(i, j), id(i + 1, j)));
            }
        }
    }
    let n = rows * cols;
    let mut alive = vec![true; n];
    loop {
        let mut deg = vec![0; n];
        for &(u, v) in &edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let leaves: Vec<usize> = (0..n).filter(|&v| alive[v] && deg[v] <= 1).collect();
        if leaves.is_empty() {
            break;
        }
        for v in leaves {
            alive[v] = false;
        }
        edges.retain(|&(u, v)| alive[u] && alive[v]);
    }
    let keep: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let mut new_of = vec![0; n];
    for (i, &v) in keep.iter().enumerate() {
        new_of[v] = i;
    }
    Ok(Graph::new(
        keep.len(),
        edges.iter().map(|&(u, v)| (new_of[u], new_of[v])),
    )
    .expect("simple"))
}

/// `l` copies of K5 minus the edge `v_i w_i`, plus `v` adjacent to every
/// `v_i` and `w` adjacent to every `w_i`. Copy `i` occupies `5i..5i+5` with
/// `v_i = 5i`, `w_i = 5i + 1`; then `v = 5l`, `w = 5l + 1`.
pub fn b_ell(l: usize) -> Result<Graph, GenError> {
    if l == 0 {
        return Err(GenError::TooSmall);
    }
    let (v, w) = (5 * l, 5 * l + 1);
    let mut e = Vec::new();
    for i in 0..l {
        let base = 5 * i;
        for a in 0..5 {
            for b in a + 1..5 {
                if (a, b) != (0, 1) {
                    e.push((base + a, base + b));
                }
            }
        }
        e.push((base, v));
        e.push((base + 1, w));
    }
    Ok(Graph::new(5 * l + 2, e).expect("simple"))
}

/// Width-4 decomposition of [`b_ell`]: a hub bag `{v, w}`, one bag
/// `{v, w, a, b, c}` per copy, and below it `{v, a, b, c, v_i}` and
/// `{w, a, b, c, w_i}`.
pub fn b_ell_decomposition(l: usize) -> TreeDecomposition {
    let (v, w) = (5 * l, 5 * l + 1);
    let mut bags = vec![vec![v, w]];
    let mut tree = Vec::new();
    for i in 0..l {
        let base = 5 * i;
        let core = [base + 2, base + 3, base + 4];
        let mid = bags.len();
        bags.push(vec![v, w, core[0], core[1], core[2]]);
        tree.push((0, mid));
        bags.push(vec![v, core[0], core[1], core[2], base]);
        tree.push((mid, mid + 1));
        bags.push(vec![w, core[0], core[1], core[2], base + 1]);
        tree.push((mid, mid + 2));
    }
    TreeDecomposition::new(bags, tree)
}

/// Seeded connected simple graph: a random spanning tree plus uniformly
/// chosen extra edges.
pub fn random_connected(n: usize, m: usize, seed: u64) -> Result<Graph, GenError> {
    let max = n * n.saturating_sub(1) / 2;
    if n == 0 || m + 1 < n || m > max {
        return Err(GenError::Infeasible { n, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::with_capacity(m);
    let mut present = std::collections::BTreeSet::new();
    for i in 1..n {
        let u = order[i];
        let v = order[rng.gen_range(0..i)];
        let e = (u.min(v), u.max(v));
        present.insert(e);
        edges.push(e);
    }
    let mut rest: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|e| !present.contains(e))
        .collect();
    rest.shuffle(&mut rng);
    edges.extend(rest.into_iter().take(m + 1 - n));
    edges.sort_unstable();
    Ok(Graph::new(n, edges).expect("simple"))
}
