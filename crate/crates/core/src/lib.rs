pub mod coeff;
pub mod comb;
pub mod error;
pub mod experiment;
pub mod mixing;
pub mod return_time;
pub mod sampler;
pub mod trie;
pub mod verify;
pub mod series;
pub mod word;

pub use coeff::Coeff;
pub use comb::{Comb, CombKind, CombNumbers, Prob, Scalar};
pub use error::{Error, Result};
pub use word::Word;
