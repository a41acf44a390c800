//! Closed-form power outage probabilities, `E{1/(P_S1 X + P_S2 Y)}` and the
//! closed-form approximation of the ergodic secrecy sum rate.
//!
//! The ESSR expression replaces each `E{ln(1 + A/B)}` with
//! `ln(1 + E{A}/E{B})`. That step is not one-sided, so although the result
//! is usually called a lower bound, it sits above the exact ESSR for the
//! reference deployment (by roughly `2 gamma_E` nats per source term at high
//! SNR). See the guide chapter on the closed form for measurements.

use std::f64::consts::LN_2;

use crate::params::{nearly_equal, MeanGains, SystemParams};

/// Rates of the two exponential received-power components (W^-1) and the
/// activation threshold (W).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageInputs {
    pub m_x: f64,
    pub m_y: f64,
    pub theta: f64,
}

impl OutageInputs {
    /// Outage at the relay: components `P_S1 X` and `P_S2 Y`.
    pub fn relay(p: &SystemParams, g: &MeanGains) -> Self {
        OutageInputs {
            m_x: 1.0 / (p.p_s1 * g.mu_s1r),
            m_y: 1.0 / (p.p_s2 * g.mu_s2r),
            theta: p.theta_r,
        }
    }

    /// Outage at the jammer: same form with the source-jammer means.
    pub fn jammer(p: &SystemParams, g: &MeanGains) -> Self {
        OutageInputs {
            m_x: 1.0 / (p.p_s1 * g.mu_s1j),
            m_y: 1.0 / (p.p_s2 * g.mu_s2j),
            theta: p.theta_j,
        }
    }
}

/// Every intermediate of the closed-form ESSR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundReport {
    /// Source-2 term, nats.
    pub t1: f64,
    /// Source-1 term, nats.
    pub t2: f64,
    /// Relay leakage term, nats.
    pub t3: f64,
    /// `E{H}`, W^-1.
    pub e_h: f64,
    pub p_por: f64,
    /// Jammer outage; zero without a jammer.
    pub p_poj: f64,
    /// bits/s/Hz
    pub r_lb: f64,
}

/// `Upsilon(2, x) = integral_0^x t e^-t dt = 1 - e^-x (1 + x)`.
///
/// Since `Gamma(2) = 1` this is also the regularized form, i.e. the
/// Erlang-2 CDF with unit rate.
pub fn lower_incomplete_gamma_2(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < 0.5 {
        // sum_{k>=0} (-1)^k x^{k+2} / (k! (k+2)), avoids cancellation near 0
        let mut term = x * x; // (-1)^k x^{k+2} / k!
        let mut sum = 0.0_f64;
        let mut k = 0.0_f64;
        while term.abs() > 1e-18 * sum.abs() || k < 2.0 {
            sum += term / (k + 2.0);
            k += 1.0;
            term *= -x / k;
        }
        return sum;
    }
    -(-x).exp_m1() - x * (-x).exp()
}

/// `t - 1 + e^-t`, accurate for small `t`.
fn exp_remainder(t: f64) -> f64 {
    if t < 0.5 {
        // sum_{k>=2} (-t)^k / k!
        let mut term = 0.5 * t * t;
        let mut sum = 0.0_f64;
        let mut k = 2.0_f64;
        while term.abs() > 1e-18 * sum.abs() || k < 4.0 {
            sum += term;
            k += 1.0;
            term *= -t / k;
        }
        return sum;
    }
    t + (-t).exp_m1()
}

/// Probability that the received harvesting power falls below the threshold.
///
/// With means `a = 1/m_x`, `b = 1/m_y` and `q(m) = 1 - exp(-theta/m)` the
/// unequal-means CDF is `(b q(b) - a q(a)) / (b - a)`. For small
/// `theta/m` both products are close to `theta`, so the difference is taken
/// of `m (theta/m - q(m))` instead, which drops the common `theta`. Either
/// way tiny outage probabilities keep their relative precision.
pub fn power_outage(inp: &OutageInputs) -> f64 {
    let theta = inp.theta;
    if theta <= 0.0 {
        return 0.0;
    }
    let a = 1.0 / inp.m_x;
    let b = 1.0 / inp.m_y;
    let p = if nearly_equal(a, b) {
        let mean = 0.5 * (a + b);
        lower_incomplete_gamma_2(theta / mean)
    } else if theta < a.max(b) {
        let chi = |m: f64| m * exp_remainder(theta / m);
        (chi(a) - chi(b)) / (b - a)
    } else {
        let q = |m: f64| -(-theta / m).exp_m1();
        (b * q(b) - a * q(a)) / (b - a)
    };
    p.clamp(0.0, 1.0)
}

/// `E{1/(R + S)}` for independent exponentials with means `mu_r`, `mu_s`.
pub fn expected_inverse_sum(mu_r: f64, mu_s: f64) -> f64 {
    if nearly_equal(mu_r, mu_s) {
        return 2.0 / (mu_r + mu_s);
    }
    // ln(mu_r/mu_s) / (mu_r - mu_s), written with ln_1p for near-equal means
    ((mu_r - mu_s) / mu_s).ln_1p() / (mu_r - mu_s)
}

pub fn relay_outage(p: &SystemParams, g: &MeanGains) -> f64 {
    power_outage(&OutageInputs::relay(p, g))
}

/// Zero when the jammer is disabled.
pub fn jammer_outage(p: &SystemParams, g: &MeanGains) -> f64 {
    if p.jamming {
        power_outage(&OutageInputs::jammer(p, g))
    } else {
        0.0
    }
}

/// Closed-form ESSR. Without a jammer this is the `eta_J -> 0` limit with
/// the jammer-outage factor dropped.
pub fn essr_lower_bound(p: &SystemParams, g: &MeanGains) -> LowerBoundReport {
    let eta_j = if p.jamming { p.eta_j } else { 0.0 };
    let alpha = p.alpha;
    let one_minus = 1.0 - alpha;
    let n0 = p.n0;

    let e_h = expected_inverse_sum(p.p_s1 * g.mu_s1r, p.p_s2 * g.mu_s2r);
    let mean_p_j = p.p_s1 * g.mu_s1j + p.p_s2 * g.mu_s2j;
    let forwarded_jamming = 2.0 * n0 * eta_j * alpha * g.mu_rj * mean_p_j * e_h;
    let harvest = 2.0 * p.eta_r * alpha;
    let cross = g.mu_s1r * g.mu_s2r;

    let t1 = (harvest * p.p_s1 * cross
        / (harvest * g.mu_s2r * n0 + n0 * one_minus + forwarded_jamming))
        .ln_1p();
    let t2 = (harvest * p.p_s2 * cross
        / (harvest * g.mu_s1r * n0 + n0 * one_minus + forwarded_jamming))
        .ln_1p();
    let t3 = ((p.p_s1 * g.mu_s1r + p.p_s2 * g.mu_s2r)
        / (2.0 * eta_j * alpha / one_minus * mean_p_j * g.mu_rj + n0))
        .ln_1p();

    let p_por = relay_outage(p, g);
    let p_poj = jammer_outage(p, g);
    let bracket = (t1 + t2 - t3).max(0.0);
    let r_lb = (1.0 - p_poj) * (1.0 - p_por) * one_minus / (2.0 * LN_2) * bracket;
    LowerBoundReport {
        t1,
        t2,
        t3,
        e_h,
        p_por,
        p_poj,
        r_lb,
    }
}
