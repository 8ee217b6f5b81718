//! Genus vertex deletion: decide whether deleting at most `k` vertices from
//! a graph leaves one that embeds in a surface of Euler genus at most `g`,
//! by dynamic programming over a tree decomposition.
//!
//! Embeddings are flag systems ([`flag::Embedding`]): three fixed-point-free
//! involutions on a set of flags.

pub mod boundaried;
pub mod cli;
pub mod dp;
pub mod flag;
pub mod generators;
pub mod nicify;
pub mod ops;
pub mod oracle;
pub mod treedecomp;
