#![cfg_attr(not(test), no_std)]

//! Graph-state merging and composable verification machinery.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`gf2`]: packed GF(2) vectors and matrices, the Gaussian pivot
//!   decomposition `Γ = V·[[I_r, R], [0, 0]]·U` and CNOT/SWAP synthesis.
//! * [`graphs`]: graphs, honest/malicious partitions, their block
//!   decomposition, graph-state stabilizers and the correction validator.
//! * [`sim`]: a stabilizer tableau back-end and a dense state-vector oracle
//!   behind one [`sim::Backend`] trait, plus measurement-branch enumeration.
//! * [`merge`]: fusing two copies of a graph state into one with
//!   measurements on the middle registers and Pauli corrections.
//! * [`resources`]: executable ideal resources, the stabilizer twirl and the
//!   simulator's correction-completion identity.
//! * [`ghzverify`]: a Monte-Carlo simulator of the GHZ verification protocol.
//! * [`bounds`]: closed-form security bound calculators.

extern crate alloc;

pub mod bounds;
mod error;
pub mod gf2;
pub mod ghzverify;
pub mod graphs;
pub mod merge;
pub mod resources;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
pub use gf2::{BitMat, BitVec};
pub use graphs::{Graph, Partition, PauliCorrection};
