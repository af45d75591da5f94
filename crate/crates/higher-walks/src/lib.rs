//! Higher walks on ordinals.
//!
//! The crate is organised bottom-up:
//!
//! * [`ordinal`]: Cantor normal form ordinals below ε₀.
//! * [`ladder`]: ladder systems, compounded views and internality.
//! * [`walks`]: classical, internal and higher walks.
//! * [`chain`]: finite integer chains and their boundaries.
//! * [`basis`]: the distinguished generator sets `B_n`, decomposition and
//!   the section `s`.
//! * [`fsys`]: coefficient oracles for the coherent systems `f_n`.
//! * [`coherence`]: checkers for the two notions of n-coherence.
//! * [`simplicial`]: finite simplicial complexes and exact homology.

pub mod ordinal;
pub mod ladder;
pub mod walks;
pub mod chain;
pub mod basis;
pub mod fsys;
pub mod sample;
pub mod coherence;
pub mod simplicial;

pub use ladder::{Context, LadderKind, LadderSystem};
pub use ordinal::{CofRank, Ordinal};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
pub mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/ordinals.md")]
pub mod book_ordinals {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/ladders.md")]
pub mod book_ladders {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/walks.md")]
pub mod book_walks {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/bases.md")]
pub mod book_bases {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/fsystems.md")]
pub mod book_fsystems {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/coherence.md")]
pub mod book_coherence {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/homology.md")]
pub mod book_homology {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub mod book_cli {}
#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub mod readme {}
