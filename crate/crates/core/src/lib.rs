//! Complete reachability of finite automata: subset reachability, transition
//! monoids, the defect-1 graph and its certificates, the two-letter
//! algorithm, respectful trees and their automata, and coloring searches.

pub mod binary;
pub mod coloring;
pub mod dfa;
pub mod error;
pub mod families;
pub mod gamma1;
pub mod limits;
pub mod monoid;
pub mod reach;
pub mod state;
pub mod t2a;
pub mod transform;
pub mod trees;

pub use dfa::{Dfa, Letter, Word};
pub use error::{Error, Result};
pub use limits::Limits;
pub use state::{StateId, StateSet};
pub use transform::Transformation;
