//! System parameters, node topology and unit conversion.
//!
//! Everything inside the crate is computed in linear watts. Decibel
//! quantities only appear at the configuration boundary (see
//! [`crate::config`]), always with an explicit unit suffix.
//!
//! The block duration is normalized to one: it cancels out of the relay and
//! jammer transmit powers and appears nowhere else.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Converts a decibel ratio to a linear ratio.
///
/// ```
/// use relaysec::params::db_to_linear;
/// assert_eq!(db_to_linear(0.0).unwrap(), 1.0);
/// assert!((db_to_linear(10.0).unwrap() - 10.0).abs() < 1e-12);
/// ```
pub fn db_to_linear(value_db: f64) -> Result<f64> {
    if !value_db.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "decibel value must be finite, got {value_db}"
        )));
    }
    Ok(10f64.powf(value_db / 10.0))
}

/// dBW to watts.
pub fn dbw_to_watts(value_dbw: f64) -> Result<f64> {
    db_to_linear(value_dbw)
}

/// dBm to watts (dBW = dBm - 30).
pub fn dbm_to_watts(value_dbm: f64) -> Result<f64> {
    db_to_linear(value_dbm - 30.0)
}

pub fn watts_to_dbw(watts: f64) -> f64 {
    10.0 * watts.log10()
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    watts_to_dbw(watts) + 30.0
}

/// Powers, efficiencies, time-switching ratio and scenario switches for one
/// operating point of the three-phase protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Transmit power of source 1, W.
    pub p_s1: f64,
    /// Transmit power of source 2, W.
    pub p_s2: f64,
    /// Energy conversion efficiency at the relay.
    pub eta_r: f64,
    /// Energy conversion efficiency at the jammer.
    pub eta_j: f64,
    /// Fraction of the block spent harvesting.
    pub alpha: f64,
    /// Receiver noise power, W.
    pub n0: f64,
    /// Harvesting activation threshold at the relay, W.
    pub theta_r: f64,
    /// Harvesting activation threshold at the jammer, W.
    pub theta_j: f64,
    /// Friendly jammer active (WFJ) or absent (WoFJ).
    pub jamming: bool,
    /// Drop the noise-product term of the end-to-end SNR.
    pub high_snr: bool,
}

impl SystemParams {
    /// Operating point used throughout the numerical study: 10 dBW sources,
    /// 70 % conversion efficiency, 0 dBm activation threshold and -10 dBm
    /// noise. `alpha` defaults to 0.5 and the jammer is enabled.
    pub fn reference() -> Self {
        SystemParams {
            p_s1: 10.0,
            p_s2: 10.0,
            eta_r: 0.7,
            eta_j: 0.7,
            alpha: 0.5,
            n0: 1e-4,
            theta_r: 1e-3,
            theta_j: 1e-3,
            jamming: true,
            high_snr: false,
        }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        SystemParams { alpha, ..self }
    }

    pub fn with_jamming(self, jamming: bool) -> Self {
        SystemParams { jamming, ..self }
    }

    pub fn with_high_snr(self, high_snr: bool) -> Self {
        SystemParams { high_snr, ..self }
    }

    /// Sets both source powers to `snr_db` above the noise floor.
    pub fn with_transmit_snr_db(self, snr_db: f64) -> Result<Self> {
        let p = self.n0 * db_to_linear(snr_db)?;
        Ok(SystemParams {
            p_s1: p,
            p_s2: p,
            ..self
        })
    }

    /// Checks every invariant. An efficiency of exactly 1 is accepted as the
    /// lossless limit.
    pub fn validate(&self) -> Result<()> {
        let positive = [("p_s1", self.p_s1), ("p_s2", self.p_s2), ("n0", self.n0)];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and strictly positive",
                });
            }
        }
        for (name, value) in [("eta_r", self.eta_r), ("eta_j", self.eta_j)] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must lie in (0, 1]",
                });
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                reason: "must lie in (0, 1)",
            });
        }
        for (name, value) in [("theta_r", self.theta_r), ("theta_j", self.theta_j)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and non-negative",
                });
            }
        }
        Ok(())
    }

    /// Pre-log factor (1 - alpha) / 2 shared by every rate.
    pub fn prelog(&self) -> f64 {
        (1.0 - self.alpha) / 2.0
    }

    /// Harvest-to-transmit power ratio 2 alpha / (1 - alpha) for unit efficiency.
    pub(crate) fn harvest_gain(&self) -> f64 {
        2.0 * self.alpha / (1.0 - self.alpha)
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// Node distances (m) and path-loss exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub d_s1r: f64,
    pub d_s2r: f64,
    pub d_s1j: f64,
    pub d_s2j: f64,
    pub d_rj: f64,
    pub rho: f64,
}

impl Topology {
    /// Sources 3 m from both helpers, relay and jammer 1.5 m apart, rho = 2.7.
    pub fn reference() -> Self {
        Topology {
            d_s1r: 3.0,
            d_s2r: 3.0,
            d_s1j: 3.0,
            d_s2j: 3.0,
            d_rj: 1.5,
            rho: 2.7,
        }
    }

    /// Every source-helper distance equal to `d` and the relay-jammer
    /// distance equal to `d * rj_ratio`.
    pub fn equidistant(d: f64, rj_ratio: f64, rho: f64) -> Self {
        Topology {
            d_s1r: d,
            d_s2r: d,
            d_s1j: d,
            d_s2j: d,
            d_rj: d * rj_ratio,
            rho,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("d_s1r", self.d_s1r),
            ("d_s2r", self.d_s2r),
            ("d_s1j", self.d_s1j),
            ("d_s2j", self.d_s2j),
            ("d_rj", self.d_rj),
            ("rho", self.rho),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and strictly positive",
                });
            }
        }
        Ok(())
    }
}

impl Default for Topology {
    fn default() -> Self {
        Self::reference()
    }
}

/// Means of the five exponential channel power gains. Channels are
/// reciprocal, so `mu_rj` serves both relay-to-jammer and jammer-to-relay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanGains {
    pub mu_s1r: f64,
    pub mu_s2r: f64,
    pub mu_s1j: f64,
    pub mu_s2j: f64,
    pub mu_rj: f64,
}

impl MeanGains {
    /// All five means equal to `mu`.
    pub fn uniform(mu: f64) -> Self {
        MeanGains {
            mu_s1r: mu,
            mu_s2r: mu,
            mu_s1j: mu,
            mu_s2j: mu,
            mu_rj: mu,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mu_s1r", self.mu_s1r),
            ("mu_s2r", self.mu_s2r),
            ("mu_s1j", self.mu_s1j),
            ("mu_s2j", self.mu_s2j),
            ("mu_rj", self.mu_rj),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and strictly positive",
                });
            }
        }
        Ok(())
    }
}

/// Path-loss model: each mean gain is `d^-rho`.
pub fn mean_gains(top: &Topology) -> MeanGains {
    let mu = |d: f64| d.powf(-top.rho);
    MeanGains {
        mu_s1r: mu(top.d_s1r),
        mu_s2r: mu(top.d_s2r),
        mu_s1j: mu(top.d_s1j),
        mu_s2j: mu(top.d_s2j),
        mu_rj: mu(top.d_rj),
    }
}

/// A fully resolved operating point: parameters plus topology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Setup {
    pub params: SystemParams,
    pub topology: Topology,
}

impl Setup {
    pub fn reference() -> Self {
        Setup {
            params: SystemParams::reference(),
            topology: Topology::reference(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.topology.validate()
    }

    pub fn gains(&self) -> MeanGains {
        mean_gains(&self.topology)
    }
}

impl Default for Setup {
    fn default() -> Self {
        Self::reference()
    }
}

/// Equality test shared by every two-branch closed form: relative
/// difference below 1e-9 selects the equal-means branch.
pub(crate) fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= crate::EQUAL_MEANS_RTOL * a.abs().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn decibel_examples() {
        assert_eq!(db_to_linear(0.0).unwrap(), 1.0);
        assert!(rel(dbw_to_watts(10.0).unwrap(), 10.0) < 1e-15);
        assert!(rel(dbm_to_watts(-10.0).unwrap(), 1e-4) < 1e-14);
        assert!(rel(dbm_to_watts(0.0).unwrap(), 1e-3) < 1e-14);
        assert!(db_to_linear(f64::NAN).is_err());
        assert!(db_to_linear(f64::INFINITY).is_err());
    }

    #[test]
    fn reference_matches_numerical_study() {
        let p = SystemParams::reference();
        assert_eq!(p.p_s1, dbw_to_watts(10.0).unwrap());
        assert!(rel(p.n0, dbm_to_watts(-10.0).unwrap()) < 1e-14);
        assert!(rel(p.theta_r, dbm_to_watts(0.0).unwrap()) < 1e-14);
        p.validate().unwrap();
    }

    #[test]
    fn mean_gain_examples() {
        let g = mean_gains(&Topology::equidistant(1.0, 1.0, 2.7));
        assert_eq!(g.mu_s1r, 1.0);
        let g = mean_gains(&Topology::reference());
        assert!(rel(g.mu_s1r, 3f64.powf(-2.7)) < 1e-15);
        assert!(rel(g.mu_s2j, 3f64.powf(-2.7)) < 1e-15);
        assert!(rel(g.mu_rj, 1.5f64.powf(-2.7)) < 1e-15);
    }

    #[test]
    fn rejects_out_of_range() {
        let base = SystemParams::reference();
        assert!(base.with_alpha(0.0).validate().is_err());
        assert!(base.with_alpha(1.0).validate().is_err());
        assert!(SystemParams {
            eta_r: -0.5,
            ..base
        }
        .validate()
        .is_err());
        assert!(SystemParams { eta_j: 1.0, ..base }.validate().is_ok());
        assert!(SystemParams {
            theta_r: 0.0,
            ..base
        }
        .validate()
        .is_ok());
        assert!(SystemParams { n0: 0.0, ..base }.validate().is_err());
        let top = Topology {
            d_rj: 0.0,
            ..Topology::reference()
        };
        assert!(top.validate().is_err());
    }

    #[test]
    fn transmit_snr_sets_both_sources() {
        let p = SystemParams::reference()
            .with_transmit_snr_db(50.0)
            .unwrap();
        assert!(rel(p.p_s1, 10.0) < 1e-12);
        assert_eq!(p.p_s1, p.p_s2);
    }

    proptest! {
        #[test]
        fn decibels_add_multiplicatively(a in -200.0f64..200.0, b in -200.0f64..200.0) {
            let lhs = db_to_linear(a + b).unwrap();
            let rhs = db_to_linear(a).unwrap() * db_to_linear(b).unwrap();
            prop_assert!(rel(lhs, rhs) < 1e-12);
        }

        #[test]
        fn mean_gain_decreasing_in_distance(d1 in 0.01f64..100.0, k in 1.0001f64..10.0, rho in 0.5f64..6.0) {
            let near = mean_gains(&Topology::equidistant(d1, 1.0, rho));
            let far = mean_gains(&Topology::equidistant(d1 * k, 1.0, rho));
            prop_assert!(near.mu_s1r > far.mu_s1r);
            prop_assert!(near.mu_rj > far.mu_rj);
        }
    }
}
