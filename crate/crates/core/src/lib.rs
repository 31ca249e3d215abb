//! Coarse geometry of spinning-family quotients on finite graphs.
//!
//! The crate measures hyperbolicity and projection constants of finite
//! graphs, evaluates the constants ledger, builds cone-offs and projection
//! complexes, runs random walks on free groups, and checks quotients by
//! spinning families together with their hierarchy structures.

pub mod cli;
pub mod coning;
pub mod constants;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod groups;
pub mod hhs;
pub mod lemmas;
pub mod projcplx;
pub mod randwalk;
pub mod spinning;

pub use error::{Error, Result};
