//! Graphs, tree decompositions in the PACE text formats, conversion to nice
//! form, and the refinement that routes every edge through its own leaf.
//!
//! Vertices are `0..n` internally and `1..=n` in text.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::boundaried::Label;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TdError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("parallel edge {0}-{1}")]
    ParallelEdge(usize, usize),
    #[error("edge {0}-{1} is not covered by any bag")]
    UncoveredEdge(usize, usize),
    #[error("bags containing vertex {0} are not connected")]
    DisconnectedVertex(usize),
    #[error("decomposition edges do not form a tree")]
    NotATree,
    #[error("decomposition is for {got} vertices, graph has {want}")]
    VertexCount { got: usize, want: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Simple graph on `0..n`; edges are normalised to `(min, max)`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, TdError> {
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n {
                return Err(TdError::VertexOutOfRange(u));
            }
            if v >= n {
                return Err(TdError::VertexOutOfRange(v));
            }
            if u == v {
                return Err(TdError::Loop(u));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(TdError::ParallelEdge(e.0, e.1));
            }
            adj[u].push(v);
            adj[v].push(u);
            list.push(e);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: list,
            adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// `G - removed`, with the surviving vertices renumbered in order.
    /// Returns the graph and the old index of each new vertex.
    pub fn without(&self, removed: &[usize]) -> (Graph, Vec<usize>) {
        let gone: BTreeSet<usize> = removed.iter().copied().collect();
        let keep: Vec<usize> = (0..self.n).filter(|v| !gone.contains(v)).collect();
        let mut new_of = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            new_of[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|(u, v)| !gone.contains(u) && !gone.contains(v))
            .map(|&(u, v)| (new_of[u], new_of[v]));
        (
            Graph::new(keep.len(), edges).expect("subgraph of a simple graph"),
            keep,
        )
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            let mut members = Vec::new();
            comp[s] = id;
            while let Some(v) = stack.pop() {
                members.push(v);
                for &w in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// PACE `.gr` text.
    pub fn to_gr(&self) -> String {
        let mut s = format!("p tw {} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "{} {}", u + 1, v + 1);
        }
        s
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.is_empty() || toks[0] == "c" {
            None
        } else {
            Some((i + 1, toks))
        }
    })
}

fn num(tok: &str, line: usize) -> Result<usize, TdError> {
    tok.parse().map_err(|_| TdError::Parse {
        line,
        msg: format!("expected a number, got {tok:?}"),
    })
}

fn vertex(tok: &str, line: usize, n: usize) -> Result<usize, TdError> {
    let v = num(tok, line)?;
    if v == 0 || v > n {
        return Err(TdError::VertexOutOfRange(v));
    }
    Ok(v - 1)
}

pub fn parse_graph(text: &str) -> Result<Graph, TdError> {
    let mut lines = data_lines(text);
    let (hl, header) = lines.next().ok_or(TdError::Parse {
        line: 0,
        msg: "missing header".into(),
    })?;
    if header.len() != 4 || header[0] != "p" || header[1] != "tw" {
        return Err(TdError::Parse {
            line: hl,
            msg: "expected `p tw <n> <m>`".into(),
        });
    }
    let n = num(header[2], hl)?;
    let m = num(header[3], hl)?;
    let mut edges = Vec::with_capacity(m);
    for (line, toks) in lines {
        if toks.len() != 2 {
            return Err(TdError::Parse {
                line,
                msg: "expected `<u> <v>`".into(),
            });
        }
        edges.push((vertex(toks[0], line, n)?, vertex(toks[1], line, n)?));
    }
    if edges.len() != m {
        return Err(TdError::Parse {
            line: hl,
            msg: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    Graph::new(n, edges)
}

/// Bags plus tree edges between bag indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub tree: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(mut bags: Vec<Vec<usize>>, tree: Vec<(usize, usize)>) -> Self {
        for b in &mut bags {
            b.sort_unstable();
            b.dedup();
        }
        TreeDecomposition { bags, tree }
    }

    /// Largest bag size minus one (0 when there are no bags).
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(1).max(1) - 1
    }

    fn tree_adjacency(&self) -> Result<Vec<Vec<usize>>, TdError> {
        let k = self.bags.len();
        let mut adj = vec![Vec::new(); k];
        for &(a, b) in &self.tree {
            if a >= k || b >= k || a == b {
                return Err(TdError::NotATree);
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        if k > 0 && self.tree.len() != k - 1 {
            return Err(TdError::NotATree);
        }
        // connected
        let mut seen = vec![false; k];
        let mut stack = Vec::new();
        if k > 0 {
            seen[0] = true;
            stack.push(0);
        }
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(TdError::NotATree);
        }
        Ok(adj)
    }

    /// Checks the tree shape, edge coverage and connectivity of occurrence
    /// sets. Vertices in no bag are allowed only if isolated.
    pub fn validate(&self, g: &Graph) -> Result<(), TdError> {
        let adj = self.tree_adjacency()?;
        for b in &self.bags {
            if let Some(&v) = b.iter().find(|&&v| v >= g.n()) {
                return Err(TdError::VertexOutOfRange(v + 1));
            }
        }
        for &(u, v) in g.edges() {
            if !self
                .bags
                .iter()
                .any(|b| b.binary_search(&u).is_ok() && b.binary_search(&v).is_ok())
            {
                return Err(TdError::UncoveredEdge(u + 1, v + 1));
            }
        }
        for v in 0..g.n() {
            let holders: Vec<usize> = (0..self.bags.len())
                .filter(|&i| self.bags[i].binary_search(&v).is_ok())
                .collect();
            let Some(&start) = holders.first() else {
                continue;
            };
            let mut seen = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if self.bags[y].binary_search(&v).is_ok() && seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            if seen.len() != holders.len() {
                return Err(TdError::DisconnectedVertex(v + 1));
            }
        }
        Ok(())
    }

    /// PACE `.td` text for a graph on `n` vertices.
    pub fn to_td(&self, n: usize) -> String {
        let mut s = format!("s td {} {} {}\n", self.bags.len(), self.width() + 1, n);
        for (i, b) in self.bags.iter().enumerate() {
            let _ = write!(s, "b {}", i + 1);
            for v in b {
                let _ = write!(s, " {}", v + 1);
            }
            s.push('\n');
        }
        for &(a, b) in &self.tree {
            let _ = writeln!(s, "{} {}", a + 1, b + 1);
        }
        s
    }
}

/// Parses a `.td` file and validates it against `g`.
pub fn parse_td(text: &str, g: &Graph) -> Result<TreeDecomposition, TdError> {
    let mut lines = data_lines(text);
    let (hl, header) = lines.next().ok_or(TdError::Parse {
        line: 0,
        msg: "missing header".into(),
    })?;
    if header.len() != 5 || header[0] != "s" || header[1] != "td" {
        return Err(TdError::Parse {
            line: hl,
            msg: "expected `s td <bags> <width+1> <n>`".into(),
        });
    }
    let k = num(header[2], hl)?;
    let n = num(header[4], hl)?;
    if n != g.n() {
        return Err(TdError::VertexCount {
            got: n,
            want: g.n(),
        });
    }
    let mut bags: Vec<Option<Vec<usize>>> = vec![None; k];
    let mut tree = Vec::new();
    for (line, toks) in lines {
        if toks[0] == "b" {
            if toks.len() < 2 {
                return Err(TdError::Parse {
                    line,
                    msg: "bag line without id".into(),
                });
            }
            let id = num(toks[1], line)?;
            if id == 0 || id > k {
                return Err(TdError::Parse {
                    line,
                    msg: format!("bag id {id} out of range"),
                });
            }
            let verts = toks[2..]
                .iter()
                .map(|t| vertex(t, line, n))
                .collect::<Result<Vec<_>, _>>()?;
            if bags[id - 1].replace(verts).is_some() {
                return Err(TdError::Parse {
                    line,
                    msg: format!("bag {id} given twice"),
                });
            }
        } else {
            if toks.len() != 2 {
                return Err(TdError::Parse {
                    line,
                    msg: "expected a tree edge `<a> <b>`".into(),
                });
            }
            let a = num(toks[0], line)?;
            let b = num(toks[1], line)?;
            if a == 0 || b == 0 || a > k || b > k {
                return Err(TdError::Parse {
                    line,
                    msg: "tree edge references an unknown bag".into(),
                });
            }
            tree.push((a - 1, b - 1));
        }
    }
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            b.ok_or(TdError::Parse {
                line: hl,
                msg: format!("bag {} missing", i + 1),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let td = TreeDecomposition::new(bags, tree);
    td.validate(g)?;
    Ok(td)
}

/// Decomposition from a min-fill elimination ordering (ties broken by
/// degree, then vertex index). Components are chained into one tree.
pub fn heuristic_td(g: &Graph) -> TreeDecomposition {
    let n = g.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| g.neighbours(v).iter().copied().collect())
        .collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let mut bags = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| {
                let nb: Vec<usize> = adj[v].iter().copied().collect();
                let mut fill = 0;
                for i in 0..nb.len() {
                    for j in i + 1..nb.len() {
                        if !adj[nb[i]].contains(&nb[j]) {
                            fill += 1;
                        }
                    }
                }
                (fill, nb.len(), v)
            })
            .unwrap();
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &nb {
            for &b in &nb {
                if a != b {
                    adj[a].insert(b);
                }
            }
            adj[a].remove(&v);
        }
        alive[v] = false;
        let mut bag = nb.clone();
        bag.push(v);
        bags.push(bag);
        order.push(v);
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut tree = Vec::new();
    let mut roots = Vec::new();
    for i in 0..n {
        let parent = bags[i]
            .iter()
            .filter(|&&u| u != order[i])
            .map(|&u| pos[u])
            .min();
        match parent {
            Some(p) => tree.push((i, p)),
            None => roots.push(i),
        }
    }
    for w in roots.windows(2) {
        tree.push((w[0], w[1]));
    }
    TreeDecomposition::new(bags, tree)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NiceKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Nice decomposition; children always precede their parent and the root
/// is the last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceDecomposition {
    pub nodes: Vec<NiceNode>,
}

impl NiceDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.bag.len())
            .max()
            .unwrap_or(1)
            .max(1)
            - 1
    }

    /// Node typing rules and an empty root bag.
    pub fn check_nice(&self) -> Result<(), String> {
        let root = &self.nodes[self.root()];
        if !root.bag.is_empty() {
            return Err("root bag is not empty".into());
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.children.iter().any(|&c| c >= i) {
                return Err(format!("node {i} has a child after it"));
            }
            let child_bag = |k: usize| &self.nodes[node.children[k]].bag;
            let ok = match node.kind {
                NiceKind::Leaf => node.children.is_empty() && node.bag.is_empty(),
                NiceKind::Introduce(v) => {
                    node.children.len() == 1 && {
                        let mut b = child_bag(0).clone();
                        b.push(v);
                        b.sort_unstable();
                        !child_bag(0).contains(&v) && b == node.bag
                    }
                }
                NiceKind::Forget(v) => {
                    node.children.len() == 1 && {
                        let mut b = node.bag.clone();
                        b.push(v);
                        b.sort_unstable();
                        !node.bag.contains(&v) && &b == child_bag(0)
                    }
                }
                NiceKind::Join => {
                    node.children.len() == 2
                        && child_bag(0) == &node.bag
                        && child_bag(1) == &node.bag
                }
            };
            if !ok {
                return Err(format!("node {i} violates its {:?} typing", node.kind));
            }
        }
        Ok(())
    }

    /// As a plain decomposition (one bag per node).
    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|n| n.bag.clone()).collect();
        let tree = self
            .nodes
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.children.iter().map(move |&c| (c, i)))
            .collect();
        TreeDecomposition::new(bags, tree)
    }
}

struct NiceBuilder<'a> {
    td: &'a TreeDecomposition,
    adj: Vec<Vec<usize>>,
    nodes: Vec<NiceNode>,
}

impl NiceBuilder<'_> {
    fn push(&mut self, kind: NiceKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode {
            kind,
            bag,
            children,
        });
        self.nodes.len() - 1
    }

    /// Moves from `from`'s bag to `target`: forgets first, then introduces.
    fn chain(&mut self, mut from: usize, target: &[usize]) -> usize {
        let bag = self.nodes[from].bag.clone();
        for &v in bag.iter().filter(|v| !target.contains(v)) {
            let mut b = self.nodes[from].bag.clone();
            b.retain(|&u| u != v);
            from = self.push(NiceKind::Forget(v), b, vec![from]);
        }
        for &v in target {
            if self.nodes[from].bag.contains(&v) {
                continue;
            }
            let mut b = self.nodes[from].bag.clone();
            b.push(v);
            b.sort_unstable();
            from = self.push(NiceKind::Introduce(v), b, vec![from]);
        }
        from
    }

    fn build(&mut self, t: usize, parent: Option<usize>) -> usize {
        let bag = self.td.bags[t].clone();
        let kids: Vec<usize> = self.adj[t]
            .iter()
            .copied()
            .filter(|&c| Some(c) != parent)
            .collect();
        let mut tops = Vec::new();
        for c in kids {
            let sub = self.build(c, Some(t));
            tops.push(self.chain(sub, &bag));
        }
        if tops.is_empty() {
            let leaf = self.push(NiceKind::Leaf, Vec::new(), Vec::new());
            tops.push(self.chain(leaf, &bag));
        }
        let mut cur = tops[0];
        for &other in &tops[1..] {
            cur = self.push(NiceKind::Join, bag.clone(), vec![cur, other]);
        }
        cur
    }
}

/// Nice form of a valid decomposition, same width, rooted at bag 0.
pub fn make_nice_td(td: &TreeDecomposition) -> NiceDecomposition {
    let mut adj = vec![Vec::new(); td.bags.len()];
    for &(a, b) in &td.tree {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut nb = NiceBuilder {
        td,
        adj,
        nodes: Vec::new(),
    };
    if td.bags.is_empty() {
        nb.push(NiceKind::Leaf, Vec::new(), Vec::new());
    } else {
        let top = nb.build(0, None);
        nb.chain(top, &[]);
    }
    NiceDecomposition { nodes: nb.nodes }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
    /// Carries the single edge `(u, v)`.
    EdgeLeaf(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinedNode {
    pub kind: NodeKind,
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
    /// Edges of the node's graph with both ends in the bag.
    pub bag_edges: Vec<(usize, usize)>,
}

/// Nice decomposition with edge leaves and a bag-injective labelling.
/// Children precede parents; the root is the last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinedDecomposition {
    pub nodes: Vec<RefinedNode>,
    /// `labels[v]` in `1..=capacity`.
    pub labels: Vec<Label>,
    pub capacity: usize,
}

impl RefinedDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.capacity.max(1) - 1
    }

    /// Edges carried by edge leaves in the subtree of each node.
    pub fn subtree_edges(&self) -> Vec<BTreeSet<(usize, usize)>> {
        let mut out: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); self.nodes.len()];
        for i in 0..self.nodes.len() {
            let mut s = BTreeSet::new();
            if let NodeKind::EdgeLeaf(u, v) = self.nodes[i].kind {
                s.insert((u, v));
            }
            for &c in &self.nodes[i].children {
                s.extend(out[c].iter().copied());
            }
            out[i] = s;
        }
        out
    }
}

/// Inserts, under every forget node of `v`, one join per edge from `v` to
/// the remaining bag, each with an edge-leaf child; then assigns labels top
/// down, reusing the smallest label free in the bag.
pub fn refine(nice: &NiceDecomposition, g: &Graph) -> RefinedDecomposition {
    let mut nodes: Vec<RefinedNode> = Vec::new();
    let mut map = vec![usize::MAX; nice.nodes.len()];
    let edges_in = |bag: &[usize], extra: &BTreeSet<(usize, usize)>| -> Vec<(usize, usize)> {
        extra
            .iter()
            .copied()
            .filter(|(u, v)| bag.binary_search(u).is_ok() && bag.binary_search(v).is_ok())
            .collect()
    };
    // edges present below each refined node, restricted later to the bag
    let mut below: Vec<BTreeSet<(usize, usize)>> = Vec::new();
    for (i, node) in nice.nodes.iter().enumerate() {
        let kids: Vec<usize> = node.children.iter().map(|&c| map[c]).collect();
        let mut acc: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &k in &kids {
            acc.extend(below[k].iter().copied());
        }
        let mut child = kids.first().copied();
        if let NiceKind::Forget(v) = node.kind {
            let c = child.unwrap();
            let child_bag = nodes[c].bag.clone();
            let es: Vec<(usize, usize)> = node
                .bag
                .iter()
                .filter(|&&u| g.has_edge(u, v))
                .map(|&u| (u.min(v), u.max(v)))
                .collect();
            // t_l sits directly above the old child, t_1 just below the forget
            let mut cur = c;
            for &e in es.iter().rev() {
                let leaf_edges = BTreeSet::from([e]);
                nodes.push(RefinedNode {
                    kind: NodeKind::EdgeLeaf(e.0, e.1),
                    bag: child_bag.clone(),
                    children: vec![],
                    bag_edges: vec![e],
                });
                below.push(leaf_edges);
                let s = nodes.len() - 1;
                acc.insert(e);
                nodes.push(RefinedNode {
                    kind: NodeKind::Join,
                    bag: child_bag.clone(),
                    children: vec![cur, s],
                    bag_edges: edges_in(&child_bag, &acc),
                });
                below.push(acc.clone());
                cur = nodes.len() - 1;
            }
            child = Some(cur);
        }
        let kind = match node.kind {
            NiceKind::Leaf => NodeKind::Leaf,
            NiceKind::Introduce(v) => NodeKind::Introduce(v),
            NiceKind::Forget(v) => NodeKind::Forget(v),
            NiceKind::Join => NodeKind::Join,
        };
        let children = match node.kind {
            NiceKind::Join => kids,
            NiceKind::Leaf => vec![],
            _ => vec![child.unwrap()],
        };
        nodes.push(RefinedNode {
            kind,
            bag: node.bag.clone(),
            children,
            bag_edges: edges_in(&node.bag, &acc),
        });
        below.push(acc);
        map[i] = nodes.len() - 1;
    }

    let capacity = nice.width() + 1;
    let mut labels = vec![0; g.n()];
    for node in nodes.iter().rev() {
        let used: BTreeSet<Label> = node
            .bag
            .iter()
            .map(|&v| labels[v])
            .filter(|&l| l != 0)
            .collect();
        let mut free = (1..=capacity).filter(|l| !used.contains(l));
        for &v in &node.bag {
            if labels[v] == 0 {
                labels[v] = free.next().expect("bag larger than label capacity");
            }
        }
    }
    // vertices in no bag are isolated; give them a label anyway
    for l in labels.iter_mut().filter(|l| **l == 0) {
        *l = 1;
    }
    RefinedDecomposition {
        nodes,
        labels,
        capacity,
    }
}

/// Heuristic decomposition, nice form and refinement in one go.
pub fn prepare(g: &Graph, td: Option<&TreeDecomposition>) -> RefinedDecomposition {
    let owned;
    let td = match td {
        Some(td) => td,
        None => {
            owned = heuristic_td(g);
            &owned
        }
    };
    refine(&make_nice_td(td), g)
}

/// Per-vertex label check: injective on every bag.
pub fn labels_injective(r: &RefinedDecomposition) -> bool {
    r.nodes.iter().all(|n| {
        let ls: BTreeSet<Label> = n.bag.iter().map(|&v| r.labels[v]).collect();
        ls.len() == n.bag.len() && ls.iter().all(|&l| l >= 1 && l <= r.capacity)
    })
}

/// Number of edge-leaf and inserted join nodes.
pub fn inserted_count(r: &RefinedDecomposition) -> usize {
    let leaves = r
        .nodes
        .iter()
        .filter(|n| matches!(n.kind, NodeKind::EdgeLeaf(..)))
        .count();
    2 * leaves
}

/// Occurrence count of each edge among edge leaves.
pub fn edge_leaf_multiplicity(r: &RefinedDecomposition) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for n in &r.nodes {
        if let NodeKind::EdgeLeaf(u, v) = n.kind {
            *out.entry((u, v)).or_insert(0) += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        parse_graph("p tw 3 2\n1 2\n2 3\n").unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        Graph::new(n, e).unwrap()
    }

    #[test]
    fn parse_examples() {
        let g = path3();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert!(matches!(
            parse_graph("p tw 2 1\n1 1\n"),
            Err(TdError::Loop(0))
        ));
        assert!(matches!(
            parse_graph("p tw 2 2\n1 2\n2 1\n"),
            Err(TdError::ParallelEdge(0, 1))
        ));
        assert_eq!(
            parse_td("s td 2 2 3\nb 1 1 2\nb 2 3\n1 2\n", &g).unwrap_err(),
            TdError::UncoveredEdge(2, 3)
        );
        assert_eq!(
            parse_td("s td 3 2 3\nb 1 1 2\nb 2 2 3\nb 3 1\n1 2\n2 3\n", &g).unwrap_err(),
            TdError::DisconnectedVertex(1)
        );
        let td = parse_td("c ok\ns td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n", &g).unwrap();
        assert_eq!(td.width(), 1);
        assert_eq!(parse_td(&td.to_td(3), &g).unwrap(), td);
        assert_eq!(parse_graph(&g.to_gr()).unwrap(), g);
    }

    #[test]
    fn heuristic_widths() {
        let g = path3();
        assert_eq!(heuristic_td(&g).width(), 1);
        let k5 = complete(5);
        let td = heuristic_td(&k5);
        assert_eq!(td.width(), 4);
        td.validate(&k5).unwrap();
        let empty = Graph::new(3, []).unwrap();
        heuristic_td(&empty).validate(&empty).unwrap();
    }

    #[test]
    fn nice_single_bag_k3() {
        let k3 = complete(3);
        let td = TreeDecomposition::new(vec![vec![0, 1, 2]], vec![]);
        let nice = make_nice_td(&td);
        nice.check_nice().unwrap();
        assert_eq!(nice.width(), 2);
        assert_eq!(nice.nodes.len(), 7);
        nice.to_tree_decomposition().validate(&k3).unwrap();
    }

    #[test]
    fn refine_counts() {
        let k4 = complete(4);
        let r = prepare(&k4, None);
        assert_eq!(inserted_count(&r), 2 * k4.m());
        assert!(edge_leaf_multiplicity(&r).values().all(|&c| c == 1));
        assert_eq!(edge_leaf_multiplicity(&r).len(), k4.m());
        assert!(labels_injective(&r));
        assert!(r.nodes[r.root()].bag.is_empty());
        // join nodes split edges disjointly
        let sub = r.subtree_edges();
        for n in &r.nodes {
            if n.kind == NodeKind::Join {
                let (a, b) = (&sub[n.children[0]], &sub[n.children[1]]);
                assert!(a.is_disjoint(b));
            }
        }
        assert_eq!(sub[r.root()].len(), k4.m());
    }

    #[test]
    fn forget_with_two_edges() {
        // path 1-2-3 in one bag: each forget carries one edge
        let g = path3();
        let td = TreeDecomposition::new(vec![vec![0, 1, 2]], vec![]);
        let r = refine(&make_nice_td(&td), &g);
        let joins = r.nodes.iter().filter(|n| n.kind == NodeKind::Join).count();
        assert_eq!(joins, 2);
    }
}
