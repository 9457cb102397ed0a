//! Finite-system simulation.
//!
//! For a unit vector `v` drawn isotropically, `v^† Λ v` has the law of
//! `sum lambda_i Y_i / sum Y_i` with `Y_i ~ Exp(1)`, so the random-codebook
//! minimum over `2^R` codewords is governed by the conditional CDF
//! `mu(x | lambda) = P(sum (lambda_i - x) Y_i <= 0)`. The estimators here
//! either enumerate codewords directly or work through that CDF.

pub mod cdf;
pub mod codebook;
pub mod estimate;
pub mod ldp;
pub mod simulate;
pub mod tilted;

use serde::{Deserialize, Serialize};

pub use cdf::{c_rand_via_cdf, quantile_x_n, quantile_x_n_log, uniform_codebook_bound};
pub use codebook::{design_codebook, min_chordal_distance, random_codebook, Codebook, CodebookKind};
pub use estimate::Estimate;
pub use ldp::{ldp_rate_estimate, LdpPoint};
pub use simulate::{simulate_c_cdf, simulate_c_direct, simulate_c_spectral, CodebookSource, SimConfig};
pub use tilted::{conditional_cdf_mc, conditional_cdf_tilted, TiltOptions, TiltedCdfResult};

/// Which extreme of the codebook is selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Min,
    Max,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Min => "min",
            Mode::Max => "max",
        }
    }
}

/// Stream labels keep consumers of one seed apart.
pub(crate) mod labels {
    pub const CODEBOOK: u64 = 1;
    pub const DESIGN: u64 = 2;
    pub const TRIAL: u64 = 3;
    pub const SPECTRUM: u64 = 4;
    pub const TILT: u64 = 5;
    pub const PLAIN: u64 = 6;
}
