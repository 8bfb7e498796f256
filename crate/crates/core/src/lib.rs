//! Mealy automaton groups: the transducer algebra, class membership tests,
//! infinite-order certificates, orbit signalizers, class-uniform sampling
//! and the probability experiments built on top of them.

pub mod automaton;
pub mod classify;
pub mod element;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod order;
pub mod sample;
pub mod stats;

pub use automaton::MealyAutomaton;
pub use element::{Element, Generator, IdentityVerdict};
pub use error::{Error, Result};
