//! Numerical laboratory for collapsing Kähler-Einstein metrics on toroidal
//! degenerations.
//!
//! The crate is organised bottom-up:
//!
//! * [`toric`]: exact lattice and simplicial cone combinatorics.
//! * [`ma`]: the real Monge-Ampère problem `det D²φ = κ e^{2φ}` on a simplex
//!   with boundary blow-up.
//! * [`semiflat`]: the semi-flat model metric built from a Monge-Ampère
//!   potential, with collapse and special Lagrangian diagnostics.
//! * [`tropical`]: tropicalization, corner loci and sampled amoebas.
//! * [`degeneration`]: Mumford degenerations and their dual intersection
//!   complexes.
//!
//! [`acceptance`] bundles the end-to-end checks used by the test suite and
//! the command-line `accept` subcommand.

pub mod acceptance;
pub mod degeneration;
pub mod exec;
pub mod io;
pub mod ma;
pub mod pipeline;
pub mod semiflat;
pub mod toric;
pub mod tropical;

pub use exec::Exec;
