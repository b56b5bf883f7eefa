//! Graph pebbling workbench: exact pebbling numbers by exhaustive search,
//! and upper bounds from weighted tree strategies and their linear
//! relaxation.

pub mod bounds;
pub mod error;
pub mod families;
pub mod graph;
pub mod lp;
pub mod solver;
pub mod strategy;
pub mod treepi;
pub mod verify;

pub use bounds::{BoundMethod, BoundReport, GraphBounds};
pub use error::{Error, Result};
pub use families::FamilySpec;
pub use graph::{Configuration, Graph};
pub use lp::{LinearProgram, LpSolution, LpStatus, Rational};
pub use solver::{Move, MoveSequence, PiResult, SolveResult, SolverOptions};
pub use strategy::{GenerationMethod, Strategy, StrategySet};
pub use treepi::PathPartition;
