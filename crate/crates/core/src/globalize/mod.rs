//! Line search and trust-region globalization.

mod linesearch;
mod trust_region;

pub use linesearch::{
    backtracking_search, wolfe_conditions, BacktrackingParams, MeritEvaluation, WolfeReport,
};
pub use trust_region::{tr_ratio, tr_update, RadiusScheme, TrustConfig, TrustState};
