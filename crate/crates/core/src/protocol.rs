//! Per-realization physics of the three-phase time-switching protocol.
//!
//! Phase one (duration `alpha`) charges the relay and the jammer from both
//! sources, phase two (duration `(1 - alpha)/2`) carries the uplink while the
//! jammer transmits, and phase three (same duration) is the relay broadcast.
//! Both sources cancel their own signal and the known jamming signal, so
//! every rate below depends on SNRs only.

use crate::channel::FadingRealization;
use crate::params::SystemParams;

/// Received, harvested and transmit powers for one realization (block
/// duration normalized to one).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePowers {
    /// Power received at the relay during harvesting.
    pub p_r: f64,
    /// Power received at the jammer during harvesting.
    pub p_j: f64,
    pub e_hr: f64,
    pub e_hj: f64,
    /// Relay broadcast power.
    pub p_tr: f64,
    /// Jamming power; zero without a jammer.
    pub p_tj: f64,
}

/// SINRs, rates (bits/s/Hz) and the clamped secrecy sum rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub gamma_r: f64,
    pub gamma_s1: f64,
    pub gamma_s2: f64,
    pub i_s1: f64,
    pub i_s2: f64,
    pub i_r: f64,
    pub r_sec: f64,
}

pub fn phase_powers(p: &SystemParams, f: &FadingRealization) -> PhasePowers {
    let p_r = p.p_s1 * f.x + p.p_s2 * f.y;
    let p_j = p.p_s1 * f.z + p.p_s2 * f.w;
    let e_hr = p.eta_r * p.alpha * p_r;
    let e_hj = p.eta_j * p.alpha * p_j;
    let slot = (1.0 - p.alpha) / 2.0;
    PhasePowers {
        p_r,
        p_j,
        e_hr,
        e_hj,
        p_tr: e_hr / slot,
        p_tj: if p.jamming { e_hj / slot } else { 0.0 },
    }
}

/// Jamming power expanded in closed form, `2 eta_J alpha P_J / (1 - alpha)`.
#[inline]
fn jamming_power(p: &SystemParams, f: &FadingRealization) -> f64 {
    if p.jamming {
        p.eta_j * p.harvest_gain() * (p.p_s1 * f.z + p.p_s2 * f.w)
    } else {
        0.0
    }
}

/// SINR of the superimposed uplink at the relay, with the jamming signal
/// as interference.
pub fn relay_sinr(p: &SystemParams, f: &FadingRealization) -> f64 {
    let p_r = p.p_s1 * f.x + p.p_s2 * f.y;
    p_r / (jamming_power(p, f) * f.u + p.n0)
}

/// Relay scaling factor that spends exactly the harvested power on the
/// broadcast.
pub fn amplification_factor(p: &SystemParams, f: &FadingRealization) -> f64 {
    let p_r = p.p_s1 * f.x + p.p_s2 * f.y;
    let p_tr = p.eta_r * p.harvest_gain() * p_r;
    (p_tr / (p_r + jamming_power(p, f) * f.u + p.n0)).sqrt()
}

/// End-to-end SNR at the receiving source after self-interference and
/// jamming cancellation. `p_tx`/`g_tx` describe the far source and its relay
/// link, `g_rx` the receiving source's relay link.
#[inline]
fn end_to_end_snr(
    p: &SystemParams,
    p_tx: f64,
    g_tx: f64,
    g_rx: f64,
    p_r: f64,
    jam_at_relay: f64,
) -> f64 {
    let one_minus = 1.0 - p.alpha;
    let harvest = 2.0 * p.eta_r * p.alpha;
    let epsilon = if p.high_snr {
        0.0
    } else {
        p.n0 * p.n0 * one_minus / p_r
    };
    let num = harvest * p_tx * g_tx * g_rx;
    let den =
        harvest * g_rx * p.n0 + p.n0 * jam_at_relay * one_minus / p_r + p.n0 * one_minus + epsilon;
    num / den
}

/// Returns `(gamma_s1, gamma_s2)`. A realization with no power at the
/// relay (`x = y = 0`) gives zero for both.
pub fn source_snrs(p: &SystemParams, f: &FadingRealization) -> (f64, f64) {
    let p_r = p.p_s1 * f.x + p.p_s2 * f.y;
    if p_r <= 0.0 {
        return (0.0, 0.0);
    }
    let jam = jamming_power(p, f) * f.u;
    let gamma_s2 = end_to_end_snr(p, p.p_s1, f.x, f.y, p_r, jam);
    let gamma_s1 = end_to_end_snr(p, p.p_s2, f.y, f.x, p_r, jam);
    (gamma_s1, gamma_s2)
}

/// Rate of one link over the information part of the block.
#[inline]
pub fn link_rate(p: &SystemParams, gamma: f64) -> f64 {
    p.prelog() * gamma.ln_1p() / std::f64::consts::LN_2
}

pub fn secrecy_rate(p: &SystemParams, f: &FadingRealization) -> RatePoint {
    let gamma_r = relay_sinr(p, f);
    let (gamma_s1, gamma_s2) = source_snrs(p, f);
    let i_s1 = link_rate(p, gamma_s1);
    let i_s2 = link_rate(p, gamma_s2);
    let i_r = link_rate(p, gamma_r);
    RatePoint {
        gamma_r,
        gamma_s1,
        gamma_s2,
        i_s1,
        i_s2,
        i_r,
        r_sec: (i_s1 + i_s2 - i_r).max(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit(jamming: bool, high_snr: bool) -> SystemParams {
        SystemParams {
            p_s1: 1.0,
            p_s2: 1.0,
            eta_r: 1.0,
            eta_j: 1.0,
            alpha: 0.5,
            n0: 1.0,
            theta_r: 0.0,
            theta_j: 0.0,
            jamming,
            high_snr,
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn dark_channel() {
        let p = SystemParams::reference();
        let f = FadingRealization::uniform(0.0);
        let pw = phase_powers(&p, &f);
        assert_eq!(
            pw,
            PhasePowers {
                p_r: 0.0,
                p_j: 0.0,
                e_hr: 0.0,
                e_hj: 0.0,
                p_tr: 0.0,
                p_tj: 0.0
            }
        );
        assert_eq!(amplification_factor(&p, &f), 0.0);
        assert_eq!(source_snrs(&p, &f), (0.0, 0.0));
        assert_eq!(secrecy_rate(&p, &f).r_sec, 0.0);
    }

    #[test]
    fn hand_evaluated_powers() {
        let p = unit(true, true);
        let pw = phase_powers(&p, &FadingRealization::uniform(1.0));
        assert_eq!(pw.p_r, 2.0);
        assert_eq!(pw.p_tr, 4.0);
        assert_eq!(pw.p_tj, 4.0);
        let off = phase_powers(&unit(false, true), &FadingRealization::uniform(1.0));
        assert_eq!(off.p_tj, 0.0);
        assert_eq!(off.p_tr, pw.p_tr);
    }

    #[test]
    fn hand_evaluated_sinr_and_gain() {
        let f = FadingRealization::uniform(1.0);
        assert_eq!(relay_sinr(&unit(false, true), &f), 2.0);
        assert!(rel(relay_sinr(&unit(true, true), &f), 2.0 / 5.0) < 1e-12);
        assert!(
            rel(
                amplification_factor(&unit(true, true), &f),
                (4.0f64 / 7.0).sqrt()
            ) < 1e-12
        );
    }

    #[test]
    fn hand_evaluated_end_to_end_snr() {
        let f = FadingRealization::uniform(1.0);
        let (g1, g2) = source_snrs(&unit(false, true), &f);
        assert!(rel(g2, 2.0 / 3.0) < 1e-12);
        assert_eq!(g1, g2);
        let (_, g2) = source_snrs(&unit(false, false), &f);
        assert!(rel(g2, 4.0 / 7.0) < 1e-12);
    }

    #[test]
    fn unit_inputs_clamp_secrecy_rate() {
        let r = secrecy_rate(&unit(false, true), &FadingRealization::uniform(1.0));
        assert!(rel(r.i_s1, 0.25 * (5.0f64 / 3.0).log2()) < 1e-12);
        assert!(rel(r.i_r, 0.25 * 3f64.log2()) < 1e-12);
        assert!(r.i_s1 + r.i_s2 - r.i_r < 0.0);
        assert_eq!(r.r_sec, 0.0);
    }

    #[test]
    fn strong_jammer_silences_relay() {
        let p = unit(true, true);
        let f = FadingRealization {
            u: 1e12,
            ..FadingRealization::uniform(1.0)
        };
        assert!(relay_sinr(&p, &f) < 1e-11);
    }

    #[test]
    fn prelog_collapse() {
        let f = FadingRealization::uniform(1.0);
        let p = SystemParams::reference().with_alpha(1.0 - 1e-12);
        assert!(secrecy_rate(&p, &f).r_sec < 1e-9);
    }

    fn params() -> impl Strategy<Value = SystemParams> {
        (
            (1e-2f64..1e2, 1e-2f64..1e2, 0.01f64..=1.0, 0.01f64..=1.0),
            (0.01f64..0.99, 1e-6f64..1e-1, any::<bool>(), any::<bool>()),
        )
            .prop_map(
                |((p_s1, p_s2, eta_r, eta_j), (alpha, n0, jamming, high_snr))| SystemParams {
                    p_s1,
                    p_s2,
                    eta_r,
                    eta_j,
                    alpha,
                    n0,
                    theta_r: 0.0,
                    theta_j: 0.0,
                    jamming,
                    high_snr,
                },
            )
    }

    fn fading() -> impl Strategy<Value = FadingRealization> {
        (
            1e-4f64..10.0,
            1e-4f64..10.0,
            1e-4f64..10.0,
            1e-4f64..10.0,
            1e-4f64..10.0,
        )
            .prop_map(|(x, y, z, w, u)| FadingRealization { x, y, z, w, u })
    }

    proptest! {
        #[test]
        fn relay_power_is_conserved(p in params(), f in fading()) {
            let zeta = amplification_factor(&p, &f);
            let pw = phase_powers(&p, &f);
            let budget = zeta * zeta * (pw.p_r + pw.p_tj * f.u + p.n0);
            prop_assert!(rel(budget, pw.p_tr) < 1e-12);
        }

        #[test]
        fn closed_form_powers_match_energy_budget(p in params(), f in fading()) {
            let pw = phase_powers(&p, &f);
            prop_assert!(rel(pw.p_tr, 2.0 * p.eta_r * p.alpha * pw.p_r / (1.0 - p.alpha)) < 1e-12);
            if p.jamming {
                prop_assert!(rel(pw.p_tj, 2.0 * p.eta_j * p.alpha * pw.p_j / (1.0 - p.alpha)) < 1e-12);
            }
        }
    }
}
