//! Builds SAT to weighted crossing number reduction instances, draws and
//! audits them, checks the staircase cost algebra and emits certified path
//! and tree decompositions.

pub mod cnf;
pub mod drawing;
pub mod analysis;
pub mod graph;
pub mod reduction;
pub mod weights;
pub mod widths;
