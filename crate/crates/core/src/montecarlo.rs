//! Monte Carlo oracle for the exact ESSR, the power outage probabilities
//! and `E{H}`.
//!
//! Samples are grouped into fixed blocks of [`BLOCK_LEN`] realizations and
//! block `b` always draws from substream `b` of the seed. Blocks are
//! evaluated in parallel and their partial moments are merged in block
//! order, so an estimate depends only on `(seed, samples, parameters)` and
//! never on the number of worker threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{jammer_outage, relay_outage};
use crate::channel::{sample_fading, RngStream};
use crate::error::{Error, Result};
use crate::params::{MeanGains, SystemParams};
use crate::protocol::secrecy_rate;

/// Realizations per substream.
pub const BLOCK_LEN: u64 = 4096;

/// Default sample count for ESSR estimates.
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        McConfig {
            samples,
            seed,
            threads: None,
        }
    }

    pub fn with_threads(self, threads: usize) -> Self {
        McConfig {
            threads: Some(threads),
            ..self
        }
    }
}

/// A Monte Carlo estimate and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n: u64,
    pub seed: u64,
    pub n_streams: usize,
}

/// Where the outage prefactor `(1 - P_poj)(1 - P_por)` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutagePrefactor {
    #[default]
    ClosedForm,
    /// Estimated from the same realizations as the rate average.
    Empirical,
}

/// Which expectation of the secrecy rate is multiplied by the prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Conditioning {
    /// Average over every realization.
    #[default]
    Unconditional,
    /// Average over realizations in which neither helper is in outage.
    NonOutage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EssrOptions {
    pub prefactor: OutagePrefactor,
    pub conditioning: Conditioning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutageTarget {
    Relay,
    Jammer,
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, v: f64) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if other.n == 0 {
            return self;
        }
        if self.n == 0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Moments {
            n,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.n as f64 * w,
        }
    }

    fn std_err(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

/// Runs `f` on every block (in parallel) and returns the results in block
/// order, plus the number of worker threads used.
fn run_blocks<A, F>(cfg: &McConfig, f: F) -> Result<(Vec<A>, usize)>
where
    A: Send,
    F: Fn(&mut RngStream, u64) -> A + Sync,
{
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be at least 1".into(),
        ));
    }
    let blocks = cfg.samples.div_ceil(BLOCK_LEN);
    let job = || {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let len = BLOCK_LEN.min(cfg.samples - b * BLOCK_LEN);
                let mut rng = RngStream::new(cfg.seed, b);
                f(&mut rng, len)
            })
            .collect::<Vec<A>>()
    };
    match cfg.threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let out = pool.install(job);
            Ok((out, k.max(1)))
        }
        None => Ok((job(), rayon::current_num_threads())),
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct EssrBlock {
    all: Moments,
    available: Moments,
    relay_out: u64,
    jammer_out: u64,
}

/// Exact ESSR: the outage prefactor times the sample mean of the clamped
/// instantaneous secrecy sum rate.
pub fn estimate_essr(p: &SystemParams, g: &MeanGains, cfg: &McConfig) -> Result<McEstimate> {
    estimate_essr_with(p, g, cfg, EssrOptions::default())
}

pub fn estimate_essr_with(
    p: &SystemParams,
    g: &MeanGains,
    cfg: &McConfig,
    opts: EssrOptions,
) -> Result<McEstimate> {
    p.validate()?;
    g.validate()?;
    let (blocks, n_streams) = run_blocks(cfg, |rng, len| {
        let mut acc = EssrBlock::default();
        for _ in 0..len {
            let f = sample_fading(g, rng);
            let r = secrecy_rate(p, &f).r_sec;
            acc.all.push(r);
            let relay_down = p.p_s1 * f.x + p.p_s2 * f.y < p.theta_r;
            let jammer_down = p.jamming && p.p_s1 * f.z + p.p_s2 * f.w < p.theta_j;
            acc.relay_out += relay_down as u64;
            acc.jammer_out += jammer_down as u64;
            if !relay_down && !jammer_down {
                acc.available.push(r);
            }
        }
        acc
    })?;
    let total = blocks
        .into_iter()
        .fold(EssrBlock::default(), |a, b| EssrBlock {
            all: a.all.merge(b.all),
            available: a.available.merge(b.available),
            relay_out: a.relay_out + b.relay_out,
            jammer_out: a.jammer_out + b.jammer_out,
        });
    let n = cfg.samples as f64;
    let prefactor = match opts.prefactor {
        OutagePrefactor::ClosedForm => (1.0 - jammer_outage(p, g)) * (1.0 - relay_outage(p, g)),
        OutagePrefactor::Empirical => {
            (1.0 - total.jammer_out as f64 / n) * (1.0 - total.relay_out as f64 / n)
        }
    };
    let rates = match opts.conditioning {
        Conditioning::Unconditional => total.all,
        Conditioning::NonOutage => total.available,
    };
    Ok(McEstimate {
        mean: prefactor * rates.mean,
        std_err: prefactor * rates.std_err(),
        n: cfg.samples,
        seed: cfg.seed,
        n_streams,
    })
}

/// Empirical frequency of the received harvesting power falling below the
/// threshold, with the binomial standard error.
pub fn estimate_outage(
    p: &SystemParams,
    g: &MeanGains,
    target: OutageTarget,
    cfg: &McConfig,
) -> Result<McEstimate> {
    p.validate()?;
    g.validate()?;
    let (counts, n_streams) = run_blocks(cfg, |rng, len| {
        let mut hits = 0u64;
        for _ in 0..len {
            let f = sample_fading(g, rng);
            let (received, theta) = match target {
                OutageTarget::Relay => (p.p_s1 * f.x + p.p_s2 * f.y, p.theta_r),
                OutageTarget::Jammer => (p.p_s1 * f.z + p.p_s2 * f.w, p.theta_j),
            };
            hits += (received < theta) as u64;
        }
        hits
    })?;
    let hits: u64 = counts.into_iter().sum();
    let n = cfg.samples as f64;
    let freq = hits as f64 / n;
    Ok(McEstimate {
        mean: freq,
        std_err: (freq * (1.0 - freq) / n).sqrt(),
        n: cfg.samples,
        seed: cfg.seed,
        n_streams,
    })
}

/// Sample mean of `1/(P_S1 x + P_S2 y)`. A draw with zero received power is
/// discarded and redrawn.
///
/// The variance of this quantity is (logarithmically) infinite, so the
/// reported standard error grows slowly with `n`; it is still the natural
/// yardstick for the closed form.
pub fn estimate_expected_inverse_sum(
    p: &SystemParams,
    g: &MeanGains,
    cfg: &McConfig,
) -> Result<McEstimate> {
    p.validate()?;
    g.validate()?;
    let (blocks, n_streams) = run_blocks(cfg, |rng, len| {
        let mut acc = Moments::default();
        for _ in 0..len {
            let s = loop {
                let f = sample_fading(g, rng);
                let s = p.p_s1 * f.x + p.p_s2 * f.y;
                if s > 0.0 {
                    break s;
                }
            };
            acc.push(1.0 / s);
        }
        acc
    })?;
    let total = blocks.into_iter().fold(Moments::default(), Moments::merge);
    Ok(McEstimate {
        mean: total.mean,
        std_err: total.std_err(),
        n: cfg.samples,
        seed: cfg.seed,
        n_streams,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{expected_inverse_sum, power_outage, OutageInputs};
    use crate::params::{mean_gains, Topology};

    fn reference() -> (SystemParams, MeanGains) {
        (
            SystemParams::reference(),
            mean_gains(&Topology::reference()),
        )
    }

    #[test]
    fn moments_merge_matches_sequential() {
        let data: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut seq = Moments::default();
        data.iter().for_each(|&v| seq.push(v));
        let (a, b) = data.split_at(377);
        let mut ma = Moments::default();
        let mut mb = Moments::default();
        a.iter().for_each(|&v| ma.push(v));
        b.iter().for_each(|&v| mb.push(v));
        let merged = ma.merge(mb);
        assert!((merged.mean - seq.mean).abs() < 1e-12);
        assert!((merged.m2 - seq.m2).abs() < 1e-8 * seq.m2);
    }

    #[test]
    fn zero_samples_rejected() {
        let (p, g) = reference();
        assert!(estimate_essr(&p, &g, &McConfig::new(0, 1)).is_err());
    }

    #[test]
    fn thread_count_does_not_change_estimates() {
        let (p, g) = reference();
        let base = McConfig::new(3 * BLOCK_LEN + 17, 99);
        let one = estimate_essr(&p, &g, &base.with_threads(1)).unwrap();
        let four = estimate_essr(&p, &g, &base.with_threads(4)).unwrap();
        assert_eq!(one.mean.to_bits(), four.mean.to_bits());
        assert_eq!(one.std_err.to_bits(), four.std_err.to_bits());
        assert_eq!(four.n_streams, 4);
    }

    #[test]
    fn essr_collapses_near_alpha_one() {
        let (p, g) = reference();
        let est = estimate_essr(&p.with_alpha(0.999), &g, &McConfig::new(100_000, 5)).unwrap();
        assert!(est.mean < 1e-2);
    }

    #[test]
    fn std_err_halves_when_samples_quadruple() {
        // doubling n shrinks the error by sqrt 2; four-fold shrinks it by 2
        let (p, g) = reference();
        for seed in [1, 2, 3] {
            let small = estimate_essr(&p, &g, &McConfig::new(100_000, seed)).unwrap();
            let large = estimate_essr(&p, &g, &McConfig::new(400_000, seed + 100)).unwrap();
            let ratio = small.std_err / large.std_err;
            assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
            let doubled = estimate_essr(&p, &g, &McConfig::new(200_000, seed + 200)).unwrap();
            let ratio = small.std_err / doubled.std_err;
            assert!(
                (ratio - 2f64.sqrt()).abs() < 0.2 * 2f64.sqrt(),
                "ratio {ratio}"
            );
        }
    }

    #[test]
    fn zero_threshold_gives_zero_outage() {
        let (p, g) = reference();
        let p = SystemParams {
            theta_r: 0.0,
            theta_j: 0.0,
            ..p
        };
        let cfg = McConfig::new(50_000, 3);
        assert_eq!(
            estimate_outage(&p, &g, OutageTarget::Relay, &cfg)
                .unwrap()
                .mean,
            0.0
        );
        assert_eq!(
            estimate_outage(&p, &g, OutageTarget::Jammer, &cfg)
                .unwrap()
                .mean,
            0.0
        );
    }

    #[test]
    fn unit_means_outage_matches_erlang_cdf() {
        let p = SystemParams {
            p_s1: 1.0,
            p_s2: 1.0,
            theta_r: 1.0,
            ..SystemParams::reference()
        };
        let g = MeanGains::uniform(1.0);
        let est =
            estimate_outage(&p, &g, OutageTarget::Relay, &McConfig::new(1_000_000, 11)).unwrap();
        let exact = 1.0 - 2.0 / std::f64::consts::E;
        assert!((est.mean - exact).abs() < 3.0 * est.std_err, "{est:?}");
    }

    #[test]
    fn reference_outage_matches_closed_form() {
        // reference outage is ~2e-6, so raise the threshold to get a measurable rate
        let (p, g) = reference();
        let p = SystemParams {
            theta_r: 0.2,
            theta_j: 0.2,
            ..p
        };
        let cfg = McConfig::new(1_000_000, 12);
        for (target, inp) in [
            (OutageTarget::Relay, OutageInputs::relay(&p, &g)),
            (OutageTarget::Jammer, OutageInputs::jammer(&p, &g)),
        ] {
            let est = estimate_outage(&p, &g, target, &cfg).unwrap();
            assert!(
                (est.mean - power_outage(&inp)).abs() < 3.0 * est.std_err,
                "{est:?}"
            );
        }
    }

    #[test]
    fn inverse_sum_matches_closed_form() {
        let p = SystemParams {
            p_s1: 1.0,
            p_s2: 1.0,
            ..SystemParams::reference()
        };
        let cfg = McConfig::new(1_000_000, 21);
        for (mu_r, mu_s) in [(2.0, 2.0), (2.0, 1.0)] {
            let g = MeanGains {
                mu_s1r: mu_r,
                mu_s2r: mu_s,
                ..MeanGains::uniform(1.0)
            };
            let est = estimate_expected_inverse_sum(&p, &g, &cfg).unwrap();
            let exact = expected_inverse_sum(mu_r, mu_s);
            assert!(
                (est.mean - exact).abs() < 3.0 * est.std_err,
                "{est:?} vs {exact}"
            );
            let again = estimate_expected_inverse_sum(&p, &g, &cfg).unwrap();
            assert_eq!(est, again);
        }
    }

    #[test]
    fn prefactor_and_conditioning_variants() {
        let (p, g) = reference();
        // a harsh threshold so that the variants actually differ
        let p = SystemParams {
            theta_r: 0.3,
            theta_j: 0.3,
            ..p
        };
        let cfg = McConfig::new(200_000, 8);
        let closed = estimate_essr(&p, &g, &cfg).unwrap();
        let empirical = estimate_essr_with(
            &p,
            &g,
            &cfg,
            EssrOptions {
                prefactor: OutagePrefactor::Empirical,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((closed.mean - empirical.mean).abs() < 0.02 * closed.mean);
        let conditional = estimate_essr_with(
            &p,
            &g,
            &cfg,
            EssrOptions {
                conditioning: Conditioning::NonOutage,
                ..Default::default()
            },
        )
        .unwrap();
        // rates are larger when the received power is large
        assert!(conditional.mean > closed.mean);
    }
}
