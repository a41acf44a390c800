//! Golden-section search for the time-switching ratio.
//!
//! The ESSR is quasi-concave in alpha for the deployments of interest, so a
//! bracketing search is enough. A coarse pre-scan and a bracket check during
//! the search detect objectives that are flat or multi-peaked; those fall
//! back to a plain grid scan.

use serde::Serialize;

use super::sweep::{essr_point, Method, Scenario};
use crate::error::{Error, Result};
use crate::montecarlo::McConfig;
use crate::params::Setup;

pub const ALPHA_SEARCH_RANGE: (f64, f64) = (0.01, 0.99);

const PRESCAN_POINTS: usize = 21;
const FALLBACK_POINTS: usize = 99;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaOptimum {
    pub alpha: f64,
    pub essr: f64,
    /// True when the grid-scan fallback produced the result.
    pub fallback: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GoldenOutcome {
    Converged {
        x: f64,
        fx: f64,
        evaluations: usize,
    },
    /// An interior probe fell below both bracket ends.
    BracketViolation {
        evaluations: usize,
    },
}

/// Non-decreasing then non-increasing, up to a relative slack of 1e-12.
pub fn is_unimodal(values: &[f64]) -> bool {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let slack = 1e-12 * scale;
    let mut descending = false;
    for w in values.windows(2) {
        if w[1] < w[0] - slack {
            descending = true;
        } else if w[1] > w[0] + slack && descending {
            return false;
        }
    }
    true
}

/// Maximizes `f` on `[lo, hi]` until the bracket is narrower than `tol`.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> GoldenOutcome
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut evaluations = 4;
    while b - a > tol {
        if fc.min(fd) < fa.min(fb) {
            return GoldenOutcome::BracketViolation { evaluations };
        }
        if fc >= fd {
            b = d;
            fb = fd;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            fa = fc;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
    }
    let (x, fx) = if fc >= fd { (c, fc) } else { (d, fd) };
    GoldenOutcome::Converged { x, fx, evaluations }
}

/// Best of `points` evenly spaced evaluations; the first maximum wins.
pub fn grid_scan_max<F>(mut f: F, lo: f64, hi: f64, points: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let mut best = (lo, f64::NEG_INFINITY);
    for x in super::linspace(lo, hi, points) {
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Time-switching ratio that maximizes the ESSR of `scenario`, searched over
/// [`ALPHA_SEARCH_RANGE`]. The Monte Carlo objective reuses the same seed at
/// every alpha (common random numbers), which makes it deterministic.
pub fn optimize_alpha(
    setup: &Setup,
    scenario: Scenario,
    method: Method,
    tolerance: f64,
    mc: &McConfig,
) -> Result<AlphaOptimum> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    setup.validate()?;
    let mut failure = None;
    let mut evaluations = 0usize;
    let mut objective = |alpha: f64| {
        evaluations += 1;
        let s = Setup {
            params: setup.params.with_alpha(alpha),
            ..*setup
        };
        match essr_point(&s, scenario, method, mc) {
            Ok(e) => e.essr,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let (lo, hi) = ALPHA_SEARCH_RANGE;

    let prescan: Vec<f64> = super::linspace(lo, hi, PRESCAN_POINTS)
        .into_iter()
        .map(&mut objective)
        .collect();
    let flat = prescan.iter().all(|&v| v <= 0.0);
    let result = if flat || !is_unimodal(&prescan) {
        log::warn!(
            "ESSR is {} in alpha for {}; using a grid scan",
            if flat {
                "identically zero"
            } else {
                "not unimodal"
            },
            scenario.as_str()
        );
        None
    } else {
        match golden_section_max(&mut objective, lo, hi, tolerance) {
            GoldenOutcome::Converged { x, fx, .. } => Some((x, fx)),
            GoldenOutcome::BracketViolation { .. } => {
                log::warn!("golden-section bracket violated; using a grid scan");
                None
            }
        }
    };
    let (alpha, essr, fallback) = match result {
        Some((x, fx)) => (x, fx, false),
        None => {
            let (x, fx) = grid_scan_max(&mut objective, lo, hi, FALLBACK_POINTS);
            (x, fx, true)
        }
    };
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(AlphaOptimum {
        alpha,
        essr,
        fallback,
        evaluations,
    })
}
