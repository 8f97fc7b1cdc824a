//! Noisy enhanced-sampling circuits, randomized compiling and robust amplitude
//! estimation on a dense density-matrix simulator.

pub mod ansatz;
pub mod circuit;
pub mod error;
pub mod harness;
pub mod inference;
pub mod linalg;
pub mod noise;
pub mod pauli;
pub mod seeding;
pub mod sim;
pub mod twirl;

pub use error::{Error, Result};
