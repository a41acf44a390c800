//! Rayleigh block fading: sampling of the five channel power gains and the
//! densities used by the closed-form analysis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::params::{nearly_equal, MeanGains};

/// One joint draw of the channel power gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingRealization {
    /// |h_S1R|^2
    pub x: f64,
    /// |h_S2R|^2
    pub y: f64,
    /// |h_S1J|^2
    pub z: f64,
    /// |h_S2J|^2
    pub w: f64,
    /// |h_RJ|^2
    pub u: f64,
}

impl FadingRealization {
    pub fn new(x: f64, y: f64, z: f64, w: f64, u: f64) -> Self {
        FadingRealization { x, y, z, w, u }
    }

    /// All five gains set to `g`.
    pub fn uniform(g: f64) -> Self {
        Self::new(g, g, g, g, g)
    }

    /// Exchanges the source-1 and source-2 links.
    pub fn swapped_sources(&self) -> Self {
        Self::new(self.y, self.x, self.w, self.z, self.u)
    }
}

/// A reproducible random stream. The same `(seed, stream_id)` pair always
/// yields the same sequence; distinct stream ids are independent
/// ChaCha8 streams under one key.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Unit-mean exponential variate.
    #[inline]
    pub fn exp1(&mut self) -> f64 {
        self.rng.sample(Exp1)
    }

    /// Uniform variate in [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }
}

/// Draws the five independent exponential gains with the given means.
#[inline]
pub fn sample_fading(means: &MeanGains, rng: &mut RngStream) -> FadingRealization {
    FadingRealization {
        x: means.mu_s1r * rng.exp1(),
        y: means.mu_s2r * rng.exp1(),
        z: means.mu_s1j * rng.exp1(),
        w: means.mu_s2j * rng.exp1(),
        u: means.mu_rj * rng.exp1(),
    }
}

/// Exponential density of a channel power gain with mean `mu`; zero off the
/// support.
pub fn gain_pdf(g: f64, mu: f64) -> f64 {
    if g < 0.0 {
        return 0.0;
    }
    (-g / mu).exp() / mu
}

/// Density of the sum of two independent exponentials with rates `m_x` and
/// `m_y` (hypoexponential; Erlang-2 when the rates coincide).
pub fn sum_pdf(s: f64, m_x: f64, m_y: f64) -> f64 {
    if s < 0.0 {
        return 0.0;
    }
    if nearly_equal(m_x, m_y) {
        let m = 0.5 * (m_x + m_y);
        return m * m * s * (-m * s).exp();
    }
    // e^{-m_y s} (1 - e^{-(m_x - m_y) s}) keeps precision for close rates
    let d = m_x - m_y;
    m_x * m_y * (-m_y * s).exp() * -(-d * s).exp_m1() / d
}

/// Which closed form to use for the equal-means branch of the density of
/// `H = 1 / (R + S)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EqualMeansBranch {
    /// `exp(-1/(h mu)) / (h^3 mu^2)`, obtained by the change of variables
    /// `h = 1/s` from the Erlang-2 density. Integrates to one.
    #[default]
    Corrected,
    /// `exp(-1/(h mu)) / (h mu^2)`, kept for audit only: it is not a
    /// probability density (its integral diverges).
    AsPrinted,
}

/// Density of `H = 1/(R + S)` where `R` and `S` are independent exponentials
/// with means `mu_r` and `mu_s` (in watts).
pub fn inverse_sum_pdf(h: f64, mu_r: f64, mu_s: f64) -> f64 {
    inverse_sum_pdf_with(h, mu_r, mu_s, EqualMeansBranch::Corrected)
}

pub fn inverse_sum_pdf_with(h: f64, mu_r: f64, mu_s: f64, branch: EqualMeansBranch) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    if nearly_equal(mu_r, mu_s) {
        let mu = 0.5 * (mu_r + mu_s);
        let tail = (-1.0 / (h * mu)).exp();
        return match branch {
            EqualMeansBranch::Corrected => tail / (h * h * h * mu * mu),
            EqualMeansBranch::AsPrinted => tail / (h * mu * mu),
        };
    }
    let d = mu_s - mu_r;
    let c = d / (h * mu_r * mu_s);
    (-1.0 / (h * mu_s)).exp() * -(-c).exp_m1() / (h * h * d)
}
