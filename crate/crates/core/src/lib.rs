//! Physical-layer secrecy of a two-way link through a wirelessly powered,
//! untrusted amplify-and-forward relay, optionally assisted by a friendly
//! jammer that is itself powered by the sources.
//!
//! The crate is organized bottom-up:
//!
//! - [`params`]: operating point, topology and unit conversion;
//! - [`channel`]: fading samples and the densities behind the closed forms;
//! - [`protocol`]: per-realization powers, SNRs and secrecy rate;
//! - [`analytics`]: outage probabilities and the closed-form ESSR;
//! - [`montecarlo`]: the simulation oracle;
//! - [`experiments`]: sweeps, the time-switching optimizer and validation.
//!
//! ```
//! use relaysec::{analytics, params::Setup};
//!
//! let setup = Setup::reference();
//! let report = analytics::essr_lower_bound(&setup.params, &setup.gains());
//! assert!(report.r_lb > 0.0);
//! ```

pub mod analytics;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiments;
pub mod montecarlo;
pub mod numerics;
pub mod params;
pub mod protocol;

pub use error::{Error, Result};

/// Relative tolerance below which two means are treated as equal and the
/// equal-means branch of a closed form is used.
pub const EQUAL_MEANS_RTOL: f64 = 1e-9;

// Each guide chapter is compiled as a doctest module so its snippets stay
// in sync with the code.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/protocol.md")]
    mod protocol {}
    #[doc = include_str!("../../../book/src/outage.md")]
    mod outage {}
    #[doc = include_str!("../../../book/src/closed-form.md")]
    mod closed_form {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
