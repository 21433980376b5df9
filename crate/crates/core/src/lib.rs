// SPDX-License-Identifier: Apache-2.0

//! Exact evaluation and verification of six-vertex wavefunctions with
//! triangular boundaries and their symmetric-function representations.

pub mod cli;
pub mod lattice;
pub mod scalar;
pub mod symfun;
pub mod verify;
pub mod weights;

pub use lattice::{FockVector, LatticeError, OrdinaryModel, SpinConfig, TriangularModel};
pub use scalar::{Scalar, ScalarError};
pub use symfun::{Partition, SymfunError};
pub use weights::{KParams, LSiteParams, RParams, Spin, WeightError};
