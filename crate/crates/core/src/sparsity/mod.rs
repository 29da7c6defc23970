//! Sparsity patterns, approximate detection, greedy coloring and compressed
//! Jacobian assembly.

mod coloring;
mod compressed;
mod csc;
mod detect;
mod pattern;

pub use coloring::{color_greedy, ColorAxis, Coloring};
pub use compressed::compressed_jacobian;
pub use csc::CscMatrix;
pub use detect::{detect_pattern_approx, DEFAULT_DETECT_SAMPLES};
pub use pattern::SparsityPattern;
