//! Character sums, Paley graph matrices, pseudomoments and sum-of-squares
//! relaxations of the clique number of Paley graphs.

pub mod blockcirc;
pub mod charsums;
pub mod error;
pub mod field;
pub mod graphmx;
pub mod harness;
pub mod linalg;
pub mod paley;
pub mod pseudomoments;
pub mod sdp;

pub use error::{Error, Result};
pub use field::PrimeContext;
pub use paley::PaleyGraph;
