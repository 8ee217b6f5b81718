//! Deleting an edge, drawing a new edge, and the position bookkeeping that
//! makes the two mutually inverse.

use thiserror::Error;

use crate::boundaried::Label;
use crate::flag::{Embedding, Flag, ObjectKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedError {
    #[error("flag {flag} out of range for an embedding with {count} flags")]
    FlagOutOfRange { flag: Flag, count: usize },
    #[error("anchor b may not be TOP or TOP-PRIME")]
    InvalidBAnchor,
    #[error("labelled anchors are only meaningful on boundaried embeddings")]
    LabelledAnchor,
}

/// Where one end of a new edge is attached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Anchor {
    Flag(Flag),
    /// A fresh vertex (`a = x'` or `b = y'`).
    Bottom,
    /// `a = y`.
    Top,
    /// `a = y'`.
    TopPrime,
    /// A fresh vertex carrying the given label.
    BottomLabelled(Label),
}

impl Anchor {
    pub fn flag(self) -> Option<Flag> {
        match self {
            Anchor::Flag(f) => Some(f),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Position {
    pub a: Anchor,
    pub b: Anchor,
}

impl Position {
    pub fn new(a: Anchor, b: Anchor) -> Self {
        Position { a, b }
    }

    /// Translates concrete anchors through a flag renaming. Flags mapped to
    /// `None` must not occur.
    pub fn renamed(self, renaming: &[Option<Flag>]) -> Position {
        let tr = |a: Anchor| match a {
            Anchor::Flag(f) => Anchor::Flag(renaming[f].expect("anchor flag was deleted")),
            other => other,
        };
        Position {
            a: tr(self.a),
            b: tr(self.b),
        }
    }
}

/// Result of [`delete_edge`]: the smaller embedding plus the old-to-new flag
/// renaming (`None` for the four deleted flags).
#[derive(Clone, Debug)]
pub struct Deletion {
    pub embedding: Embedding,
    pub renaming: Vec<Option<Flag>>,
}

/// The four flags of the edge through `f`, as `[x, x', y, y']` with
/// `x = f`, `x' = sigma(x)`, `y = theta(x)`, `y' = sigma(y)`.
pub fn edge_flags(e: &Embedding, x: Flag) -> [Flag; 4] {
    let xp = e.sg(x);
    let y = e.th(x);
    let yp = e.sg(y);
    [x, xp, y, yp]
}

fn check_flag(e: &Embedding, f: Flag) -> Result<(), EmbedError> {
    if f >= e.flag_count() {
        return Err(EmbedError::FlagOutOfRange {
            flag: f,
            count: e.flag_count(),
        });
    }
    Ok(())
}

/// Removes `drop` flags (all orbits closed under every involution) and
/// compacts the remaining indices, preserving their relative order.
pub(crate) fn remove_flags(
    theta: &[Flag],
    sigma: &[Flag],
    phi: &[Flag],
    drop: &[bool],
) -> (Embedding, Vec<Option<Flag>>) {
    let mut renaming = vec![None; theta.len()];
    let mut next = 0;
    for (f, slot) in renaming.iter_mut().enumerate() {
        if !drop[f] {
            *slot = Some(next);
            next += 1;
        }
    }
    let map = |inv: &[Flag]| -> Vec<Flag> {
        (0..inv.len())
            .filter(|&f| !drop[f])
            .map(|f| renaming[inv[f]].expect("involution leaves kept flags"))
            .collect()
    };
    (
        Embedding::from_raw(map(theta), map(sigma), map(phi)),
        renaming,
    )
}

/// Deletes the edge containing `edge_flag`.
///
/// First `phi` is rerouted so that `{x, x'}` and then `{y, y'}` become
/// `phi`-orbits; then the four flags are dropped.
pub fn delete_edge(e: &Embedding, edge_flag: Flag) -> Result<Deletion, EmbedError> {
    check_flag(e, edge_flag)?;
    let [x, xp, y, yp] = edge_flags(e, edge_flag);
    let mut phi = e.phi().as_slice().to_vec();
    detach(&mut phi, x, xp);
    detach(&mut phi, y, yp);
    let mut drop = vec![false; e.flag_count()];
    for f in [x, xp, y, yp] {
        drop[f] = true;
    }
    let (embedding, renaming) =
        remove_flags(e.theta().as_slice(), e.sigma().as_slice(), &phi, &drop);
    Ok(Deletion {
        embedding,
        renaming,
    })
}

/// Makes `{p, q}` an orbit of `phi`, pairing their former partners.
fn detach(phi: &mut [Flag], p: Flag, q: Flag) {
    if phi[p] == q {
        return;
    }
    let a = phi[p];
    let ap = phi[q];
    phi[p] = q;
    phi[q] = p;
    phi[a] = ap;
    phi[ap] = a;
}

/// The position of flag `x`: the anchors at which drawing the edge of `x`
/// onto `E - e` reproduces `E`.
pub fn position(e: &Embedding, x: Flag) -> Result<Position, EmbedError> {
    check_flag(e, x)?;
    let [x, xp, y, yp] = edge_flags(e, x);
    let a = e.ph(x);
    let b = if e.ph(y) != x && e.ph(y) != xp {
        e.ph(y)
    } else {
        e.ph(e.sg(e.ph(y)))
    };
    let a = if a == xp {
        Anchor::Bottom
    } else if a == y {
        Anchor::Top
    } else if a == yp {
        Anchor::TopPrime
    } else {
        Anchor::Flag(a)
    };
    let b = if b == yp {
        Anchor::Bottom
    } else {
        Anchor::Flag(b)
    };
    Ok(Position { a, b })
}

/// Result of [`draw_edge`]: the new embedding and the new edge's flags as
/// `[x, y, y', x']`.
#[derive(Clone, Debug)]
pub struct Drawn {
    pub embedding: Embedding,
    pub new_edge: [Flag; 4],
}

/// Draws a new edge `(x, y, y', x')` at `pos`. The new flags are appended as
/// `x = n`, `y = n + 1`, `y' = n + 2`, `x' = n + 3`.
pub fn draw_edge(e: &Embedding, pos: Position) -> Result<Drawn, EmbedError> {
    if matches!(pos.a, Anchor::BottomLabelled(_)) || matches!(pos.b, Anchor::BottomLabelled(_)) {
        return Err(EmbedError::LabelledAnchor);
    }
    let (a, b) = resolve_anchors(e, pos)?;
    Ok(draw_resolved(e, a, b))
}

pub(crate) fn resolve_anchors(
    e: &Embedding,
    pos: Position,
) -> Result<(Option<Flag>, Option<Flag>), EmbedError> {
    let n = e.flag_count();
    let (y, yp) = (n + 1, n + 2);
    let a = match pos.a {
        Anchor::Flag(f) => {
            check_flag(e, f)?;
            Some(f)
        }
        Anchor::Bottom | Anchor::BottomLabelled(_) => None,
        Anchor::Top => Some(y),
        Anchor::TopPrime => Some(yp),
    };
    let b = match pos.b {
        Anchor::Flag(f) => {
            check_flag(e, f)?;
            Some(f)
        }
        Anchor::Bottom | Anchor::BottomLabelled(_) => None,
        Anchor::Top | Anchor::TopPrime => return Err(EmbedError::InvalidBAnchor),
    };
    Ok((a, b))
}

/// `None` stands for `x'` (for `a`) or `y'` (for `b`).
pub(crate) fn draw_resolved(e: &Embedding, a: Option<Flag>, b: Option<Flag>) -> Drawn {
    let n = e.flag_count();
    let (x, y, yp, xp) = (n, n + 1, n + 2, n + 3);
    let mut theta = e.theta().as_slice().to_vec();
    let mut sigma = e.sigma().as_slice().to_vec();
    let mut phi = e.phi().as_slice().to_vec();
    theta.extend_from_slice(&[y, x, xp, yp]);
    sigma.extend_from_slice(&[xp, yp, y, x]);
    phi.extend_from_slice(&[xp, yp, y, x]);
    if let Some(b) = b {
        if b != yp {
            let bp = phi[b];
            phi[y] = b;
            phi[b] = y;
            phi[yp] = bp;
            phi[bp] = yp;
        }
    }
    if let Some(a) = a {
        if a != xp {
            let ap = phi[a];
            phi[x] = a;
            phi[a] = x;
            phi[xp] = ap;
            phi[ap] = xp;
        }
    }
    Drawn {
        embedding: Embedding::from_raw(theta, sigma, phi),
        new_edge: [x, y, yp, xp],
    }
}

/// Whether an edge drawn at `pos` runs along a face boundary: `a` and `b`
/// lie on one face whose cycle reads `phi(a), a, P, b, phi(b), P'`
/// (`b = phi(a)` allowed).
pub fn is_drawn_along_boundary(e: &Embedding, pos: Position) -> bool {
    let (Some(a), Some(b)) = (pos.a.flag(), pos.b.flag()) else {
        return false;
    };
    if a == b || a >= e.flag_count() || b >= e.flag_count() {
        return false;
    }
    // Walk a, theta(a), phi(theta(a)), ...: flags at odd positions are
    // followed by their phi-partner.
    let walk = e.orbit_walk(ObjectKind::Face, a);
    walk.iter()
        .position(|&f| f == b)
        .is_some_and(|i| i % 2 == 1)
}
