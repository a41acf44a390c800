//! Flat `key = value` configuration files (TOML syntax).
//!
//! Powers are given in dBW/dBm, distances in metres. Keys that are absent
//! fall back to the reference operating point; command-line flags with the
//! same key name override the file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{dbm_to_watts, dbw_to_watts, Setup, SystemParams, Topology};

/// A configuration in boundary units. Every field is optional so that a
/// file, and later the command line, can fill in only what it changes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub p_s1_dbw: Option<f64>,
    pub p_s2_dbw: Option<f64>,
    pub eta_r: Option<f64>,
    pub eta_j: Option<f64>,
    pub alpha: Option<f64>,
    pub n0_dbm: Option<f64>,
    pub theta_r_dbm: Option<f64>,
    pub theta_j_dbm: Option<f64>,
    pub jamming: Option<bool>,
    pub high_snr: Option<bool>,
    pub d_s1r_m: Option<f64>,
    pub d_s2r_m: Option<f64>,
    pub d_s1j_m: Option<f64>,
    pub d_s2j_m: Option<f64>,
    pub d_rj_m: Option<f64>,
    pub rho: Option<f64>,
}

impl ConfigOverrides {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Fields set in `other` win.
    pub fn merged_with(&self, other: &ConfigOverrides) -> ConfigOverrides {
        macro_rules! pick {
            ($($f:ident),*) => {
                ConfigOverrides { $($f: other.$f.or(self.$f)),* }
            };
        }
        pick!(
            p_s1_dbw,
            p_s2_dbw,
            eta_r,
            eta_j,
            alpha,
            n0_dbm,
            theta_r_dbm,
            theta_j_dbm,
            jamming,
            high_snr,
            d_s1r_m,
            d_s2r_m,
            d_s1j_m,
            d_s2j_m,
            d_rj_m,
            rho
        )
    }

    /// Fills missing keys from the reference operating point.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let d = ResolvedConfig::reference();
        let theta_r_dbm = self.theta_r_dbm.unwrap_or(d.theta_r_dbm);
        let resolved = ResolvedConfig {
            p_s1_dbw: self.p_s1_dbw.unwrap_or(d.p_s1_dbw),
            p_s2_dbw: self.p_s2_dbw.unwrap_or(d.p_s2_dbw),
            eta_r: self.eta_r.unwrap_or(d.eta_r),
            eta_j: self.eta_j.unwrap_or(d.eta_j),
            alpha: self.alpha.unwrap_or(d.alpha),
            n0_dbm: self.n0_dbm.unwrap_or(d.n0_dbm),
            theta_r_dbm,
            // the jammer threshold follows the relay threshold unless set
            theta_j_dbm: self.theta_j_dbm.unwrap_or(theta_r_dbm),
            jamming: self.jamming.unwrap_or(d.jamming),
            high_snr: self.high_snr.unwrap_or(d.high_snr),
            d_s1r_m: self.d_s1r_m.unwrap_or(d.d_s1r_m),
            d_s2r_m: self.d_s2r_m.unwrap_or(d.d_s2r_m),
            d_s1j_m: self.d_s1j_m.unwrap_or(d.d_s1j_m),
            d_s2j_m: self.d_s2j_m.unwrap_or(d.d_s2j_m),
            d_rj_m: self.d_rj_m.unwrap_or(d.d_rj_m),
            rho: self.rho.unwrap_or(d.rho),
        };
        resolved.setup()?;
        Ok(resolved)
    }
}

/// Every configuration key with a value; echoed verbatim in JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub p_s1_dbw: f64,
    pub p_s2_dbw: f64,
    pub eta_r: f64,
    pub eta_j: f64,
    pub alpha: f64,
    pub n0_dbm: f64,
    pub theta_r_dbm: f64,
    pub theta_j_dbm: f64,
    pub jamming: bool,
    pub high_snr: bool,
    pub d_s1r_m: f64,
    pub d_s2r_m: f64,
    pub d_s1j_m: f64,
    pub d_s2j_m: f64,
    pub d_rj_m: f64,
    pub rho: f64,
}

impl ResolvedConfig {
    pub fn reference() -> Self {
        ResolvedConfig {
            p_s1_dbw: 10.0,
            p_s2_dbw: 10.0,
            eta_r: 0.7,
            eta_j: 0.7,
            alpha: 0.5,
            n0_dbm: -10.0,
            theta_r_dbm: 0.0,
            theta_j_dbm: 0.0,
            jamming: true,
            high_snr: false,
            d_s1r_m: 3.0,
            d_s2r_m: 3.0,
            d_s1j_m: 3.0,
            d_s2j_m: 3.0,
            d_rj_m: 1.5,
            rho: 2.7,
        }
    }

    /// Converts to linear units and validates.
    pub fn setup(&self) -> Result<Setup> {
        let params = SystemParams {
            p_s1: dbw_to_watts(self.p_s1_dbw)?,
            p_s2: dbw_to_watts(self.p_s2_dbw)?,
            eta_r: self.eta_r,
            eta_j: self.eta_j,
            alpha: self.alpha,
            n0: dbm_to_watts(self.n0_dbm)?,
            theta_r: threshold_watts(self.theta_r_dbm)?,
            theta_j: threshold_watts(self.theta_j_dbm)?,
            jamming: self.jamming,
            high_snr: self.high_snr,
        };
        let topology = Topology {
            d_s1r: self.d_s1r_m,
            d_s2r: self.d_s2r_m,
            d_s1j: self.d_s1j_m,
            d_s2j: self.d_s2j_m,
            d_rj: self.d_rj_m,
            rho: self.rho,
        };
        let setup = Setup { params, topology };
        setup.validate()?;
        Ok(setup)
    }
}

// A threshold of -inf dBm is a legitimate way to write "no threshold".
fn threshold_watts(dbm: f64) -> Result<f64> {
    if dbm == f64::NEG_INFINITY {
        Ok(0.0)
    } else {
        dbm_to_watts(dbm)
    }
}
