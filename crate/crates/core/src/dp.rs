//! Dynamic program over a refined decomposition. A cell at node `t` is
//! indexed by a deleted bag subset `X` and a nice boundaried embedding (by
//! canonical key) and holds the fewest deletions below `t` seen for it.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::boundaried::{for_each_merge, BoundariedEmbedding};
use crate::flag::Embedding;
use crate::nicify::{canonical_form, make_nice, CanonicalKey};
use crate::oracle::{self, OracleError};
use crate::treedecomp::{
    edge_leaf_multiplicity, labels_injective, prepare, Graph, NodeKind, RefinedDecomposition,
    TreeDecomposition,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DpError {
    #[error("decomposition does not match the graph: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Where a cell's current value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Base,
    /// Cell of the only child, relabelled or copied.
    Child(usize),
    /// Cell of the only child with the forgotten vertex deleted.
    Deleted(usize),
    /// Cells of the two children that were merged.
    Join(usize, usize),
}

#[derive(Clone, Debug)]
pub struct Cell {
    /// Deleted bag vertices, sorted.
    pub x: Vec<usize>,
    pub key: CanonicalKey,
    pub embedding: BoundariedEmbedding,
    pub value: usize,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub cells: Vec<Cell>,
    index: HashMap<(Vec<usize>, CanonicalKey), usize>,
}

impl Table {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, x: &[usize], key: &CanonicalKey) -> Option<&Cell> {
        self.index
            .get(&(x.to_vec(), key.clone()))
            .map(|&i| &self.cells[i])
    }

    /// Lowers the stored value to `value` if smaller (absent cells count as
    /// infinite). Returns whether anything changed.
    pub fn update(
        &mut self,
        x: Vec<usize>,
        key: CanonicalKey,
        embedding: BoundariedEmbedding,
        value: usize,
        provenance: Provenance,
    ) -> bool {
        match self.index.get(&(x.clone(), key.clone())) {
            Some(&i) => {
                let cell = &mut self.cells[i];
                if value < cell.value {
                    cell.value = value;
                    cell.provenance = provenance;
                    true
                } else {
                    false
                }
            }
            None => {
                self.index
                    .insert((x.clone(), key.clone()), self.cells.len());
                self.cells.push(Cell {
                    x,
                    key,
                    embedding,
                    value,
                    provenance,
                });
                true
            }
        }
    }

    fn by_x(&self) -> HashMap<&[usize], Vec<usize>> {
        let mut out: HashMap<&[usize], Vec<usize>> = HashMap::new();
        for (i, c) in self.cells.iter().enumerate() {
            out.entry(&c.x[..]).or_default().push(i);
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DpOptions {
    pub genus: usize,
    pub orientable: bool,
    /// Drop cells whose value exceeds this; off by default.
    pub prune_above: Option<usize>,
}

impl DpOptions {
    pub fn new(genus: usize, orientable: bool) -> Self {
        DpOptions {
            genus,
            orientable,
            prune_above: None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct DpStats {
    pub table_sizes: Vec<usize>,
    pub elapsed: Duration,
}

impl DpStats {
    pub fn max_table(&self) -> usize {
        self.table_sizes.iter().copied().max().unwrap_or(0)
    }

    pub fn total_cells(&self) -> usize {
        self.table_sizes.iter().sum()
    }
}

#[derive(Clone, Debug)]
pub struct DpRun {
    pub tables: Vec<Table>,
    /// Fewest deletions over root cells, if any cell survived.
    pub min: Option<usize>,
    /// Deleted vertices along the provenance of a minimum root cell.
    pub witness: Option<Vec<usize>>,
    pub stats: DpStats,
}

fn subsets(bag: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0u64..1 << bag.len()).map(move |mask| {
        bag.iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    })
}

fn admissible(opts: &DpOptions, e: &Embedding) -> bool {
    e.euler_genus() <= opts.genus && (!opts.orientable || e.is_orientable())
}

fn within_budget(opts: &DpOptions, value: usize) -> bool {
    opts.prune_above.is_none_or(|k| value <= k)
}

/// Builds the table of node `t` from its children's tables.
pub fn process_node(
    r: &RefinedDecomposition,
    t: usize,
    tables: &[Table],
    opts: &DpOptions,
) -> Table {
    let node = &r.nodes[t];
    let cap = r.capacity;
    let mut table = Table::default();
    match node.kind {
        NodeKind::Leaf => {
            let e = BoundariedEmbedding::empty(cap);
            let (k, f) = canonical_form(&e);
            table.update(vec![], k, f, 0, Provenance::Base);
        }
        NodeKind::EdgeLeaf(u, v) => {
            let edge = BoundariedEmbedding::new(
                crate::flag::fixtures::single_edge(),
                cap,
                [(0, r.labels[u]), (2, r.labels[v])],
            )
            .expect("labels injective on the bag");
            let (ek, ef) = canonical_form(&edge);
            let (zk, zf) = canonical_form(&BoundariedEmbedding::empty(cap));
            for x in subsets(&node.bag) {
                if x.contains(&u) || x.contains(&v) {
                    table.update(x, zk.clone(), zf.clone(), 0, Provenance::Base);
                } else {
                    table.update(x, ek.clone(), ef.clone(), 0, Provenance::Base);
                }
            }
        }
        NodeKind::Introduce(v) => {
            let child = &tables[node.children[0]];
            for (i, c) in child.cells.iter().enumerate() {
                table.update(
                    c.x.clone(),
                    c.key.clone(),
                    c.embedding.clone(),
                    c.value,
                    Provenance::Child(i),
                );
                let mut x = c.x.clone();
                x.push(v);
                x.sort_unstable();
                table.update(
                    x,
                    c.key.clone(),
                    c.embedding.clone(),
                    c.value,
                    Provenance::Child(i),
                );
            }
        }
        NodeKind::Forget(v) => {
            let child = &tables[node.children[0]];
            let label = r.labels[v];
            for (i, c) in child.cells.iter().enumerate() {
                if c.x.contains(&v) {
                    let x: Vec<usize> = c.x.iter().copied().filter(|&u| u != v).collect();
                    if within_budget(opts, c.value + 1) {
                        table.update(
                            x,
                            c.key.clone(),
                            c.embedding.clone(),
                            c.value + 1,
                            Provenance::Deleted(i),
                        );
                    }
                } else {
                    let nice = make_nice(&c.embedding.forget_label(label));
                    let (k, f) = canonical_form(&nice);
                    table.update(c.x.clone(), k, f, c.value, Provenance::Child(i));
                }
            }
        }
        NodeKind::Join => {
            let (a, b) = (&tables[node.children[0]], &tables[node.children[1]]);
            let groups_b = b.by_x();
            let mut work = Vec::new();
            for (i, c) in a.cells.iter().enumerate() {
                if let Some(js) = groups_b.get(&c.x[..]) {
                    for &j in js {
                        if within_budget(opts, c.value + b.cells[j].value) {
                            work.push((i, j));
                        }
                    }
                }
            }
            let results: Vec<Vec<(CanonicalKey, BoundariedEmbedding)>> = work
                .par_iter()
                .map(|&(i, j)| {
                    let mut seen: HashMap<CanonicalKey, BoundariedEmbedding> = HashMap::new();
                    for_each_merge(&a.cells[i].embedding, &b.cells[j].embedding, |m| {
                        if !admissible(opts, m.embedding()) {
                            return;
                        }
                        let (k, f) = canonical_form(&make_nice(&m));
                        seen.entry(k).or_insert(f);
                    })
                    .expect("equal label capacities");
                    let mut out: Vec<_> = seen.into_iter().collect();
                    out.sort_by(|p, q| p.0.cmp(&q.0));
                    out
                })
                .collect();
            for (&(i, j), res) in work.iter().zip(results) {
                let value = a.cells[i].value + b.cells[j].value;
                for (k, f) in res {
                    table.update(a.cells[i].x.clone(), k, f, value, Provenance::Join(i, j));
                }
            }
        }
    }
    debug_assert!(table.cells.iter().all(|c| {
        let allowed: Vec<usize> = node
            .bag
            .iter()
            .filter(|v| !c.x.contains(v))
            .map(|&v| r.labels[v])
            .collect();
        c.embedding
            .label_range()
            .iter()
            .all(|l| allowed.contains(l))
    }));
    table
}

fn check(g: &Graph, r: &RefinedDecomposition) -> Result<(), DpError> {
    if r.labels.len() != g.n() {
        return Err(DpError::Mismatch(format!(
            "{} labels for {} vertices",
            r.labels.len(),
            g.n()
        )));
    }
    if !labels_injective(r) {
        return Err(DpError::Mismatch("labelling not injective on a bag".into()));
    }
    let mult = edge_leaf_multiplicity(r);
    for &e in g.edges() {
        match mult.get(&e) {
            Some(1) => {}
            _ => {
                return Err(DpError::Mismatch(format!(
                    "edge {}-{} is not carried by exactly one edge leaf",
                    e.0 + 1,
                    e.1 + 1
                )))
            }
        }
    }
    if mult.len() != g.m() {
        return Err(DpError::Mismatch("edge leaf carries a non-edge".into()));
    }
    if !r.nodes[r.root()].bag.is_empty() {
        return Err(DpError::Mismatch("root bag not empty".into()));
    }
    Ok(())
}

/// Runs the table computation bottom-up and extracts the optimum.
pub fn run(g: &Graph, r: &RefinedDecomposition, opts: &DpOptions) -> Result<DpRun, DpError> {
    check(g, r)?;
    let start = Instant::now();
    let mut tables: Vec<Table> = Vec::with_capacity(r.nodes.len());
    for t in 0..r.nodes.len() {
        let table = process_node(r, t, &tables, opts);
        tables.push(table);
    }
    let root = r.root();
    let best = tables[root]
        .cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.x.is_empty())
        .min_by_key(|(i, c)| (c.value, *i))
        .map(|(i, c)| (i, c.value));
    let witness = best.map(|(i, _)| reconstruct(r, &tables, root, i));
    let stats = DpStats {
        table_sizes: tables.iter().map(|t| t.len()).collect(),
        elapsed: start.elapsed(),
    };
    Ok(DpRun {
        min: best.map(|b| b.1),
        witness,
        tables,
        stats,
    })
}

/// Deleted vertices along the provenance chain of a cell.
fn reconstruct(r: &RefinedDecomposition, tables: &[Table], t: usize, i: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![(t, i)];
    while let Some((t, i)) = stack.pop() {
        let node = &r.nodes[t];
        match tables[t].cells[i].provenance {
            Provenance::Base => {}
            Provenance::Child(j) => stack.push((node.children[0], j)),
            Provenance::Deleted(j) => {
                if let NodeKind::Forget(v) = node.kind {
                    out.push(v);
                }
                stack.push((node.children[0], j));
            }
            Provenance::Join(a, b) => {
                stack.push((node.children[0], a));
                stack.push((node.children[1], b));
            }
        }
    }
    out.sort_unstable();
    out
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub yes: bool,
    pub min: Option<usize>,
    pub witness: Option<Vec<usize>>,
    pub stats: DpStats,
}

/// Decides whether at most `budget` deletions leave Euler genus at most
/// `opts.genus`. The budget is only compared at the root unless
/// `opts.prune_above` is set.
pub fn solve(
    g: &Graph,
    r: &RefinedDecomposition,
    budget: usize,
    opts: &DpOptions,
) -> Result<Verdict, DpError> {
    let out = run(g, r, opts)?;
    let yes = out.min.is_some_and(|m| m <= budget);
    Ok(Verdict {
        yes,
        min: out.min,
        witness: out.witness,
        stats: out.stats,
    })
}

/// [`solve`] restricted to orientable embeddings.
pub fn solve_orientable(
    g: &Graph,
    r: &RefinedDecomposition,
    genus: usize,
    budget: usize,
) -> Result<Verdict, DpError> {
    solve(g, r, budget, &DpOptions::new(genus, true))
}

/// Builds the refined decomposition (heuristic when `td` is `None`) and
/// solves.
pub fn solve_graph(
    g: &Graph,
    td: Option<&TreeDecomposition>,
    budget: usize,
    opts: &DpOptions,
) -> Result<Verdict, DpError> {
    if let Some(td) = td {
        td.validate(g)
            .map_err(|e| DpError::Mismatch(e.to_string()))?;
    }
    let r = prepare(g, td);
    solve(g, &r, budget, opts)
}

/// Checks that `G - witness` has Euler genus at most `genus`: by the oracle
/// when its scheme count fits under `max_schemes`, otherwise by a fresh
/// run of the table computation with no deletions allowed.
pub fn verify_witness(
    g: &Graph,
    witness: &[usize],
    genus: usize,
    orientable: bool,
    max_schemes: u128,
) -> Result<bool, DpError> {
    let (h, _) = g.without(witness);
    if oracle::scheme_count(&h, orientable) <= max_schemes {
        return Ok(oracle::genus_at_most(&h, genus, orientable, max_schemes)?);
    }
    let mut opts = DpOptions::new(genus, orientable);
    opts.prune_above = Some(0);
    Ok(solve_graph(&h, None, 0, &opts)?.yes)
}
