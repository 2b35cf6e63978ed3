pub mod census;
pub mod cliques;
pub mod combin;
pub mod constructions;
pub mod error;
pub mod lab;
pub mod matching;
pub mod patterns;
pub mod sampler;

pub use error::{Error, Result};
pub use matching::{OrderedMatching, Trace, Vertex};
pub use patterns::{classify_pair, pattern_of_pair, PairClass, Pattern, PatternSet};
