//! Exact asymptotic limits of finite-rate feedback codebook selection, and
//! the Monte Carlo machinery used to check them on finite systems.
//!
//! The same problem covers CDMA signature optimization (pick the codeword
//! least matched to the interference, `c_min`) and MIMO beamforming vector
//! selection (pick the codeword best matched to the channel, `c_max`). With
//! `n/m -> beta` and `R_fb/n -> r`, both converge to constants that are given
//! by a large-deviation rate function of the Marchenko-Pastur law.
//!
//! Layout:
//!
//! * [`spectra`]: the limiting law of `(1/m) H H^†`, quadrature against it,
//!   and finite-n Wishart spectra.
//! * [`ratefn`]: the log-moment generating function `psi_x`, its Legendre
//!   transform and closed-form integrals of the law.
//! * [`limits`]: the thresholds `r_min`/`r_max`, the limits `x_r^-`/`x_r^+`
//!   and throughput.
//! * [`montecarlo`]: codebooks, direct and spectral estimators, exponentially
//!   tilted tail probabilities, quantiles and codebook-independent bounds.

pub mod error;
pub mod limits;
pub mod montecarlo;
pub mod ratefn;
pub mod rng;
pub mod roots;
pub mod spectra;

pub use error::{Error, Result};
pub use limits::{asymptotic_limits, thresholds, throughput, AsymptoticResult, Branch, ThroughputMode};
pub use montecarlo::{Codebook, CodebookKind, CodebookSource, Estimate, Mode, SimConfig, TiltedCdfResult};
pub use ratefn::{LegendrePoint, RateContext};
pub use spectra::{mp_law, MpLaw, QuadratureConfig, SpectrumSample};
