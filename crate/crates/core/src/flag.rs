//! Flag systems: embeddings encoded as three fixed-point-free involutions.
//!
//! An [`Embedding`] is a flag count plus the involutions `theta` (same side
//! of an edge), `sigma` (same endpoint of an edge) and `phi` (consecutive
//! flags around a vertex). Vertices, edges, faces and connected components
//! are orbits of the subgroups `<sigma, phi>`, `<theta, sigma>`,
//! `<theta, phi>` and `<theta, sigma, phi>`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Flags are dense indices `0..flag_count`.
pub type Flag = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlagError {
    #[error("flag {flag} out of range for a universe of {universe} flags")]
    OutOfRange { flag: Flag, universe: usize },
    #[error("flag {0} is a fixed point")]
    FixedPoint(Flag),
    #[error("map is not an involution at flag {0}")]
    NotInvolution(Flag),
    #[error("flag count {0} is odd")]
    OddFlagCount(usize),
    #[error("generators act on universes of different sizes ({0} vs {1})")]
    UniverseMismatch(usize, usize),
    #[error("edge through flag {0} does not consist of exactly four flags")]
    BadEdge(Flag),
    #[error("flag {0} appears in more than one pair")]
    DuplicateFlag(Flag),
    #[error("malformed embedding text: {0}")]
    Parse(String),
}

/// A fixed-point-free involution stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Involution {
    image: Vec<Flag>,
}

impl Involution {
    pub fn new(image: Vec<Flag>) -> Result<Self, FlagError> {
        let n = image.len();
        for (i, &j) in image.iter().enumerate() {
            if j >= n {
                return Err(FlagError::OutOfRange {
                    flag: j,
                    universe: n,
                });
            }
            if j == i {
                return Err(FlagError::FixedPoint(i));
            }
            if image[j] != i {
                return Err(FlagError::NotInvolution(i));
            }
        }
        Ok(Involution { image })
    }

    /// Builds the involution from its list of unordered pairs.
    pub fn from_pairs(universe: usize, pairs: &[(Flag, Flag)]) -> Result<Self, FlagError> {
        let mut image = vec![usize::MAX; universe];
        for &(a, b) in pairs {
            for f in [a, b] {
                if f >= universe {
                    return Err(FlagError::OutOfRange { flag: f, universe });
                }
                if image[f] != usize::MAX {
                    return Err(FlagError::DuplicateFlag(f));
                }
            }
            if a == b {
                return Err(FlagError::FixedPoint(a));
            }
            image[a] = b;
            image[b] = a;
        }
        if let Some(f) = image.iter().position(|&x| x == usize::MAX) {
            return Err(FlagError::NotInvolution(f));
        }
        Ok(Involution { image })
    }

    pub(crate) fn from_raw(image: Vec<Flag>) -> Self {
        debug_assert!(Involution::new(image.clone()).is_ok());
        Involution { image }
    }

    #[inline]
    pub fn apply(&self, f: Flag) -> Flag {
        self.image[f]
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn as_slice(&self) -> &[Flag] {
        &self.image
    }

    /// Pairs `(a, b)` with `a < b`, in increasing order of `a`.
    pub fn pairs(&self) -> impl Iterator<Item = (Flag, Flag)> + '_ {
        self.image
            .iter()
            .enumerate()
            .filter(|(i, &j)| *i < j)
            .map(|(i, &j)| (i, j))
    }
}

/// Partition of a flag universe into orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitFamily {
    orbit_of: Vec<usize>,
    orbits: Vec<Vec<Flag>>,
}

impl OrbitFamily {
    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    /// Index of the orbit containing `f`.
    pub fn orbit_of(&self, f: Flag) -> usize {
        self.orbit_of[f]
    }

    pub fn orbit(&self, idx: usize) -> &[Flag] {
        &self.orbits[idx]
    }

    pub fn orbit_containing(&self, f: Flag) -> &[Flag] {
        &self.orbits[self.orbit_of[f]]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Flag]> {
        self.orbits.iter().map(|o| o.as_slice())
    }
}

/// Orbits of the group generated by `generators` on `0..universe`.
///
/// Orbits are listed by increasing least flag; each orbit is sorted.
pub fn orbits(generators: &[&Involution], universe: usize) -> Result<OrbitFamily, FlagError> {
    for g in generators {
        if g.len() != universe {
            return Err(FlagError::UniverseMismatch(g.len(), universe));
        }
    }
    Ok(orbits_unchecked(generators, universe))
}

fn orbits_unchecked(generators: &[&Involution], universe: usize) -> OrbitFamily {
    let mut orbit_of = vec![usize::MAX; universe];
    let mut orbits = Vec::new();
    let mut stack = Vec::new();
    for start in 0..universe {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let idx = orbits.len();
        let mut members = vec![start];
        orbit_of[start] = idx;
        stack.push(start);
        while let Some(f) = stack.pop() {
            for g in generators {
                let h = g.apply(f);
                if orbit_of[h] == usize::MAX {
                    orbit_of[h] = idx;
                    members.push(h);
                    stack.push(h);
                }
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    OrbitFamily { orbit_of, orbits }
}

/// Number of orbits of `<a, b>` for two fixed-point-free involutions.
fn count_alternating_orbits(a: &Involution, b: &Involution, seen: &mut Vec<bool>) -> usize {
    let n = a.len();
    seen.clear();
    seen.resize(n, false);
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut f = start;
        loop {
            seen[f] = true;
            let g = a.apply(f);
            seen[g] = true;
            f = b.apply(g);
            if f == start {
                break;
            }
        }
    }
    count
}

/// The three object types an orbit of two generators may describe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectKind {
    Vertex,
    Edge,
    Face,
}

/// A cyclic sequence identified with its reversal and all its rotations.
///
/// Stored in canonical form: the lexicographically least rotation over both
/// reading directions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    elems: Vec<Flag>,
}

impl Cycle {
    pub fn new(elems: Vec<Flag>) -> Self {
        Cycle {
            elems: canonical_rotation(elems),
        }
    }

    pub fn elements(&self) -> &[Flag] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Crosses out elements outside `keep`. Returns `None` (the identity)
    /// when at most one element survives.
    pub fn restrict(&self, keep: impl Fn(Flag) -> bool) -> Option<Cycle> {
        let kept: Vec<Flag> = self.elems.iter().copied().filter(|&f| keep(f)).collect();
        if kept.len() <= 1 {
            None
        } else {
            Some(Cycle::new(kept))
        }
    }
}

/// Restricts `c` to the flags in `subset`; `None` stands for the identity.
pub fn restrict_cycle(c: &Cycle, subset: &[Flag]) -> Option<Cycle> {
    c.restrict(|f| subset.contains(&f))
}

fn canonical_rotation(elems: Vec<Flag>) -> Vec<Flag> {
    let n = elems.len();
    if n <= 1 {
        return elems;
    }
    let mut best: Option<Vec<Flag>> = None;
    let rev: Vec<Flag> = elems.iter().rev().copied().collect();
    for seq in [&elems, &rev] {
        for r in 0..n {
            let cand: Vec<Flag> = (0..n).map(|i| seq[(r + i) % n]).collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap()
}

/// A hypergraph embedding; [`Embedding::validate_graph`] checks the stronger
/// graph-embedding condition (every edge has exactly four flags).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Embedding {
    theta: Involution,
    sigma: Involution,
    phi: Involution,
}

impl Embedding {
    /// Checks the hypergraph conditions only.
    pub fn new_hypergraph(
        theta: Involution,
        sigma: Involution,
        phi: Involution,
    ) -> Result<Self, FlagError> {
        let n = theta.len();
        if sigma.len() != n {
            return Err(FlagError::UniverseMismatch(n, sigma.len()));
        }
        if phi.len() != n {
            return Err(FlagError::UniverseMismatch(n, phi.len()));
        }
        if n % 2 == 1 {
            return Err(FlagError::OddFlagCount(n));
        }
        Ok(Embedding { theta, sigma, phi })
    }

    /// Checks the graph-embedding conditions.
    pub fn new(theta: Involution, sigma: Involution, phi: Involution) -> Result<Self, FlagError> {
        let e = Embedding::new_hypergraph(theta, sigma, phi)?;
        e.validate_graph()?;
        Ok(e)
    }

    pub fn from_pairs(
        flag_count: usize,
        theta: &[(Flag, Flag)],
        sigma: &[(Flag, Flag)],
        phi: &[(Flag, Flag)],
    ) -> Result<Self, FlagError> {
        Embedding::new(
            Involution::from_pairs(flag_count, theta)?,
            Involution::from_pairs(flag_count, sigma)?,
            Involution::from_pairs(flag_count, phi)?,
        )
    }

    pub(crate) fn from_raw(theta: Vec<Flag>, sigma: Vec<Flag>, phi: Vec<Flag>) -> Self {
        let e = Embedding {
            theta: Involution::from_raw(theta),
            sigma: Involution::from_raw(sigma),
            phi: Involution::from_raw(phi),
        };
        debug_assert!(e.validate_graph().is_ok());
        e
    }

    pub fn empty() -> Self {
        Embedding::from_raw(Vec::new(), Vec::new(), Vec::new())
    }

    /// Every `<theta, sigma>` orbit has exactly four flags.
    pub fn validate_graph(&self) -> Result<(), FlagError> {
        for f in 0..self.flag_count() {
            let t = self.theta.apply(f);
            let s = self.sigma.apply(f);
            if t == s || self.theta.apply(s) != self.sigma.apply(t) {
                return Err(FlagError::BadEdge(f));
            }
        }
        Ok(())
    }

    pub fn flag_count(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self) -> &Involution {
        &self.theta
    }

    pub fn sigma(&self) -> &Involution {
        &self.sigma
    }

    pub fn phi(&self) -> &Involution {
        &self.phi
    }

    #[inline]
    pub fn th(&self, f: Flag) -> Flag {
        self.theta.apply(f)
    }

    #[inline]
    pub fn sg(&self, f: Flag) -> Flag {
        self.sigma.apply(f)
    }

    #[inline]
    pub fn ph(&self, f: Flag) -> Flag {
        self.phi.apply(f)
    }

    fn generators(&self, kind: ObjectKind) -> (&Involution, &Involution) {
        match kind {
            ObjectKind::Vertex => (&self.sigma, &self.phi),
            ObjectKind::Edge => (&self.theta, &self.sigma),
            ObjectKind::Face => (&self.theta, &self.phi),
        }
    }

    pub fn vertices(&self) -> OrbitFamily {
        orbits_unchecked(&[&self.sigma, &self.phi], self.flag_count())
    }

    pub fn edges(&self) -> OrbitFamily {
        orbits_unchecked(&[&self.theta, &self.sigma], self.flag_count())
    }

    pub fn faces(&self) -> OrbitFamily {
        orbits_unchecked(&[&self.theta, &self.phi], self.flag_count())
    }

    pub fn components(&self) -> OrbitFamily {
        orbits_unchecked(&[&self.theta, &self.sigma, &self.phi], self.flag_count())
    }

    pub fn objects(&self, kind: ObjectKind) -> OrbitFamily {
        let (a, b) = self.generators(kind);
        orbits_unchecked(&[a, b], self.flag_count())
    }

    /// The flags of the orbit through `seed`, in alternating order
    /// `seed, a(seed), b(a(seed)), ...` for the kind's generator pair.
    pub fn orbit_walk(&self, kind: ObjectKind, seed: Flag) -> Vec<Flag> {
        let (a, b) = self.generators(kind);
        let mut out = Vec::new();
        let mut f = seed;
        loop {
            out.push(f);
            let g = a.apply(f);
            out.push(g);
            f = b.apply(g);
            if f == seed {
                break;
            }
        }
        out
    }

    pub fn object_cycle(&self, kind: ObjectKind, seed: Flag) -> Result<Cycle, FlagError> {
        if seed >= self.flag_count() {
            return Err(FlagError::OutOfRange {
                flag: seed,
                universe: self.flag_count(),
            });
        }
        Ok(Cycle::new(self.orbit_walk(kind, seed)))
    }

    /// `|F|/2 - |V| - |E| - |Faces| + 2|cc|`, valid for hypergraph embeddings.
    pub fn hypergraph_genus(&self) -> i64 {
        let mut seen = Vec::new();
        let v = count_alternating_orbits(&self.sigma, &self.phi, &mut seen) as i64;
        let e = count_alternating_orbits(&self.theta, &self.sigma, &mut seen) as i64;
        let f = count_alternating_orbits(&self.theta, &self.phi, &mut seen) as i64;
        let cc = self.components().len() as i64;
        self.flag_count() as i64 / 2 - v - e - f + 2 * cc
    }

    /// Euler genus `|E| - |V| - |Faces| + 2|cc|`.
    pub fn euler_genus(&self) -> usize {
        let mut seen = Vec::new();
        let v = count_alternating_orbits(&self.sigma, &self.phi, &mut seen);
        let f = count_alternating_orbits(&self.theta, &self.phi, &mut seen);
        let cc = self.components().len();
        let e = self.flag_count() / 4;
        let g = (e + 2 * cc) as i64 - (v + f) as i64;
        debug_assert!(g >= 0, "negative Euler genus");
        g as usize
    }

    /// Two-colouring of the flags in which every orbit of each involution is
    /// bichromatic.
    pub fn is_orientable(&self) -> bool {
        let n = self.flag_count();
        let mut colour = vec![u8::MAX; n];
        let mut stack = Vec::new();
        for start in 0..n {
            if colour[start] != u8::MAX {
                continue;
            }
            colour[start] = 0;
            stack.push(start);
            while let Some(f) = stack.pop() {
                for g in [&self.theta, &self.sigma, &self.phi] {
                    let h = g.apply(f);
                    if colour[h] == u8::MAX {
                        colour[h] = 1 - colour[f];
                        stack.push(h);
                    } else if colour[h] == colour[f] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Disjoint union; flags of `other` are shifted by `self.flag_count()`.
    pub fn disjoint_union(&self, other: &Embedding) -> Embedding {
        let off = self.flag_count();
        let shift = |inv: &Involution, mine: &Involution| -> Vec<Flag> {
            mine.as_slice()
                .iter()
                .copied()
                .chain(inv.as_slice().iter().map(|&f| f + off))
                .collect()
        };
        Embedding::from_raw(
            shift(&other.theta, &self.theta),
            shift(&other.sigma, &self.sigma),
            shift(&other.phi, &self.phi),
        )
    }
}

/// Euler genus of a valid graph embedding.
pub fn euler_genus(e: &Embedding) -> usize {
    e.euler_genus()
}

pub fn check_orientable(e: &Embedding) -> bool {
    e.is_orientable()
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.flag_count())?;
        for inv in [&self.theta, &self.sigma, &self.phi] {
            let parts: Vec<String> = inv.pairs().map(|(a, b)| format!("{a} {b}")).collect();
            writeln!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}

pub(crate) fn parse_pair_line(line: &str, what: &str) -> Result<Vec<(Flag, Flag)>, FlagError> {
    let nums: Vec<Flag> = line
        .split_whitespace()
        .map(|t| {
            t.parse::<Flag>()
                .map_err(|_| FlagError::Parse(format!("bad flag `{t}` in {what} line")))
        })
        .collect::<Result<_, _>>()?;
    if !nums.len().is_multiple_of(2) {
        return Err(FlagError::Parse(format!(
            "odd number of flags in {what} line"
        )));
    }
    Ok(nums.chunks(2).map(|c| (c[0], c[1])).collect())
}

impl FromStr for Embedding {
    type Err = FlagError;

    /// Line 1: flag count; lines 2-4: pairs of theta, sigma, phi.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines();
        let count: usize = lines
            .next()
            .ok_or_else(|| FlagError::Parse("missing flag count".into()))?
            .trim()
            .parse()
            .map_err(|_| FlagError::Parse("bad flag count".into()))?;
        let mut invs = Vec::with_capacity(3);
        for what in ["theta", "sigma", "phi"] {
            let line = lines.next().unwrap_or("");
            let pairs = parse_pair_line(line, what)?;
            invs.push(Involution::from_pairs(count, &pairs)?);
        }
        let phi = invs.pop().unwrap();
        let sigma = invs.pop().unwrap();
        let theta = invs.pop().unwrap();
        Embedding::new(theta, sigma, phi)
    }
}

/// Small named embeddings used throughout the tests and docs.
pub mod fixtures {
    use super::Embedding;

    // Flags: x = 0, x' = 1, y = 2, y' = 3.
    const THETA: [(usize, usize); 2] = [(0, 2), (1, 3)];
    const SIGMA: [(usize, usize); 2] = [(0, 1), (2, 3)];

    /// One edge between two size-2 vertices on the sphere (`phi = sigma`).
    pub fn single_edge() -> Embedding {
        Embedding::from_pairs(4, &THETA, &SIGMA, &SIGMA).unwrap()
    }

    /// A loop with two size-2 faces (`phi = theta`).
    pub fn sphere_loop() -> Embedding {
        Embedding::from_pairs(4, &THETA, &SIGMA, &THETA).unwrap()
    }

    /// A one-sided loop (`phi = {x, y'}, {x', y}`).
    pub fn projective_loop() -> Embedding {
        Embedding::from_pairs(4, &THETA, &SIGMA, &[(0, 3), (1, 2)]).unwrap()
    }
}
