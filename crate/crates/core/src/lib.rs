//! Bounds, simulation and exact scalar evaluation for the vector
//! Witsenhausen counterexample `W(m, k², σ0²)`.
//!
//! Costs are per dimension with unit observation-noise variance.

pub mod bounds;
pub mod error;
pub mod lattice;
pub mod optimize;
pub mod quadrature;
pub mod scalar_exact;
pub mod sim;
pub mod specfn;
pub mod sweep;
pub mod verify;

pub use bounds::{BoundResult, Branch, LChoice, LinearCosts, ProblemParams, FiniteOptions};
pub use error::{Error, Result};
pub use lattice::{Lattice, LatticeKind};
pub use scalar_exact::{Decoder, ExactCost, Family, ScalarOptimum, ScalarStrategy};
pub use sim::{CostEstimate, FirstStage, SecondStage, StrategyConfig};
pub use sweep::{SweepGrid, SweepMode, SweepRecord};
pub use verify::{Suite, SuiteReport, VerifyOptions};
