use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::essr_lower_bound;
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_essr, McConfig};
use crate::params::{Setup, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// With friendly jammer.
    Wfj,
    /// Without friendly jammer.
    Wofj,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Wfj => "wfj",
            Scenario::Wofj => "wofj",
        }
    }

    pub fn jamming(self) -> bool {
        self == Scenario::Wfj
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Alpha,
    SnrDb,
    DistanceM,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::Alpha => "alpha",
            SweepVariable::SnrDb => "snr_db",
            SweepVariable::DistanceM => "distance_m",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub scenarios: Vec<Scenario>,
    pub methods: Vec<Method>,
    pub mc_samples: u64,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Time-switching ratios evaluated at every distance of a distance sweep.
    pub co_alphas: Vec<f64>,
    /// Relay-jammer distance as a fraction of the common distance `d`.
    pub rj_ratio: f64,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, start: f64, stop: f64, steps: usize) -> Self {
        SweepSpec {
            variable,
            start,
            stop,
            steps,
            scenarios: vec![Scenario::Wfj, Scenario::Wofj],
            methods: vec![Method::ClosedForm, Method::MonteCarlo],
            mc_samples: crate::montecarlo::DEFAULT_SAMPLES,
            seed: 1,
            threads: None,
            co_alphas: linspace(0.05, 0.95, 19),
            rj_ratio: 1.0,
        }
    }

    pub fn with_scenarios(mut self, scenarios: &[Scenario]) -> Self {
        self.scenarios = scenarios.to_vec();
        self
    }

    pub fn with_methods(mut self, methods: &[Method]) -> Self {
        self.methods = methods.to_vec();
        self
    }

    pub fn with_mc(mut self, samples: u64, seed: u64) -> Self {
        self.mc_samples = samples;
        self.seed = seed;
        self
    }

    fn mc_config(&self) -> McConfig {
        McConfig {
            samples: self.mc_samples,
            seed: self.seed,
            threads: self.threads,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Range("sweep needs at least one step".into()));
        }
        // a single step evaluates `start` alone
        let ordered = if self.steps == 1 {
            self.start <= self.stop
        } else {
            self.start < self.stop
        };
        if !(self.start.is_finite() && self.stop.is_finite() && ordered) {
            return Err(Error::Range(format!(
                "sweep needs finite start < stop, got [{}, {}]",
                self.start, self.stop
            )));
        }
        if self.scenarios.is_empty() || self.methods.is_empty() {
            return Err(Error::InvalidArgument(
                "sweep needs at least one scenario and one method".into(),
            ));
        }
        if self.methods.contains(&Method::MonteCarlo) && self.mc_samples == 0 {
            return Err(Error::InvalidArgument(
                "Monte Carlo sample count must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One ESSR value for a (scenario, method) pair. Closed-form entries carry
/// no standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepEntry {
    pub scenario: Scenario,
    pub method: Method,
    pub essr: f64,
    pub std_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// Name of the swept quantity, e.g. `alpha` or `alpha@distance_m=5`.
    pub variable: String,
    pub value: f64,
    /// Common node distance for distance sweeps.
    pub distance_m: Option<f64>,
    pub entries: Vec<SweepEntry>,
}

impl SweepRow {
    pub fn get(&self, scenario: Scenario, method: Method) -> Option<&SweepEntry> {
        self.entries
            .iter()
            .find(|e| e.scenario == scenario && e.method == method)
    }
}

/// `steps` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    if steps < 2 {
        return vec![start];
    }
    let h = (stop - start) / (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if i == steps - 1 {
                stop
            } else {
                start + h * i as f64
            }
        })
        .collect()
}

/// ESSR of one scenario at one operating point.
pub fn essr_point(
    setup: &Setup,
    scenario: Scenario,
    method: Method,
    mc: &McConfig,
) -> Result<SweepEntry> {
    let params = setup.params.with_jamming(scenario.jamming());
    let gains = setup.gains();
    let (essr, std_err) = match method {
        Method::ClosedForm => {
            params.validate()?;
            (essr_lower_bound(&params, &gains).r_lb, None)
        }
        Method::MonteCarlo => {
            let est = estimate_essr(&params, &gains, mc)?;
            (est.mean, Some(est.std_err))
        }
    };
    Ok(SweepEntry {
        scenario,
        method,
        essr,
        std_err,
    })
}

fn evaluate_row(
    spec: &SweepSpec,
    setup: &Setup,
    variable: String,
    value: f64,
    distance_m: Option<f64>,
) -> Result<SweepRow> {
    let mc = spec.mc_config();
    let mut entries = Vec::with_capacity(spec.scenarios.len() * spec.methods.len());
    for &scenario in &spec.scenarios {
        for &method in &spec.methods {
            entries.push(essr_point(setup, scenario, method, &mc)?);
        }
    }
    Ok(SweepRow {
        variable,
        value,
        distance_m,
        entries,
    })
}

/// Evaluates the grid points in parallel; output order follows the grid.
fn evaluate_grid(
    spec: &SweepSpec,
    points: Vec<(String, f64, Option<f64>, Setup)>,
) -> Result<Vec<SweepRow>> {
    let run = || {
        points
            .par_iter()
            .map(|(var, value, d, setup)| evaluate_row(spec, setup, var.clone(), *value, *d))
            .collect::<Result<Vec<_>>>()
    };
    match spec.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(run),
        None => run(),
    }
}

fn expect_variable(spec: &SweepSpec, want: SweepVariable) -> Result<()> {
    if spec.variable != want {
        return Err(Error::InvalidArgument(format!(
            "expected a {} sweep, got {}",
            want.as_str(),
            spec.variable.as_str()
        )));
    }
    Ok(())
}

fn check_alpha_range(lo: f64, hi: f64) -> Result<()> {
    if lo <= 0.0 || hi >= 1.0 {
        return Err(Error::Range(format!(
            "time-switching ratios must lie strictly inside (0, 1), got [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// ESSR against the time-switching ratio.
pub fn sweep_alpha(spec: &SweepSpec, base: &Setup) -> Result<Vec<SweepRow>> {
    expect_variable(spec, SweepVariable::Alpha)?;
    spec.validate()?;
    check_alpha_range(spec.start, spec.stop)?;
    base.validate()?;
    let points = linspace(spec.start, spec.stop, spec.steps)
        .into_iter()
        .map(|alpha| {
            let setup = Setup {
                params: base.params.with_alpha(alpha),
                ..*base
            };
            ("alpha".to_string(), alpha, None, setup)
        })
        .collect();
    evaluate_grid(spec, points)
}

/// ESSR against the transmit SNR `P_S / N_0` (dB); both sources transmit
/// at `N_0 10^(snr/10)` and the noise power stays fixed.
pub fn sweep_snr(spec: &SweepSpec, base: &Setup) -> Result<Vec<SweepRow>> {
    expect_variable(spec, SweepVariable::SnrDb)?;
    spec.validate()?;
    base.validate()?;
    let points = linspace(spec.start, spec.stop, spec.steps)
        .into_iter()
        .map(|snr| {
            let setup = Setup {
                params: base.params.with_transmit_snr_db(snr)?,
                ..*base
            };
            Ok(("snr_db".to_string(), snr, None, setup))
        })
        .collect::<Result<Vec<_>>>()?;
    evaluate_grid(spec, points)
}

/// ESSR against the time-switching ratio for every common node distance
/// `d`; the relay-jammer distance is `d * rj_ratio`. One curve per `d`.
pub fn sweep_distance(spec: &SweepSpec, base: &Setup) -> Result<Vec<SweepRow>> {
    expect_variable(spec, SweepVariable::DistanceM)?;
    spec.validate()?;
    if spec.start <= 0.0 {
        return Err(Error::Range(format!(
            "distances must be positive, got {}",
            spec.start
        )));
    }
    if !(spec.rj_ratio > 0.0 && spec.rj_ratio.is_finite()) {
        return Err(Error::Range(format!(
            "relay-jammer ratio must be positive, got {}",
            spec.rj_ratio
        )));
    }
    if spec.co_alphas.is_empty() {
        return Err(Error::Range(
            "distance sweep needs at least one alpha".into(),
        ));
    }
    let lo = spec.co_alphas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = spec
        .co_alphas
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    check_alpha_range(lo, hi)?;
    base.validate()?;
    let mut points = Vec::new();
    for d in linspace(spec.start, spec.stop, spec.steps) {
        let topology = Topology::equidistant(d, spec.rj_ratio, base.topology.rho);
        for &alpha in &spec.co_alphas {
            let setup = Setup {
                params: base.params.with_alpha(alpha),
                topology,
            };
            points.push((format!("alpha@distance_m={d}"), alpha, Some(d), setup));
        }
    }
    evaluate_grid(spec, points)
}

/// Dispatches on `spec.variable`.
pub fn sweep(spec: &SweepSpec, base: &Setup) -> Result<Vec<SweepRow>> {
    match spec.variable {
        SweepVariable::Alpha => sweep_alpha(spec, base),
        SweepVariable::SnrDb => sweep_snr(spec, base),
        SweepVariable::DistanceM => sweep_distance(spec, base),
    }
}

/// `(value, essr)` of the largest ESSR among `rows` for one curve; the first
/// maximum wins on ties.
pub fn argmax<'a, I>(rows: I, scenario: Scenario, method: Method) -> Option<(f64, f64)>
where
    I: IntoIterator<Item = &'a SweepRow>,
{
    let mut best: Option<(f64, f64)> = None;
    for row in rows {
        if let Some(e) = row.get(scenario, method) {
            if best.is_none_or(|(_, v)| e.essr > v) {
                best = Some((row.value, e.essr));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.05, 0.95, 19);
        assert_eq!(v.len(), 19);
        assert_eq!(v[0], 0.05);
        assert_eq!(v[18], 0.95);
        assert!((v[1] - 0.10).abs() < 1e-15);
    }

    #[test]
    fn alpha_range_touching_bounds_rejected() {
        let base = Setup::reference();
        for (lo, hi) in [(0.0, 0.5), (0.5, 1.0), (0.0, 1.0)] {
            let spec = SweepSpec::new(SweepVariable::Alpha, lo, hi, 5);
            assert!(matches!(sweep_alpha(&spec, &base), Err(Error::Range(_))));
        }
        let spec = SweepSpec::new(SweepVariable::Alpha, 0.5, 0.4, 5);
        assert!(matches!(sweep_alpha(&spec, &base), Err(Error::Range(_))));
        let spec = SweepSpec::new(SweepVariable::Alpha, 0.1, 0.4, 0);
        assert!(matches!(sweep_alpha(&spec, &base), Err(Error::Range(_))));
        let spec =
            SweepSpec::new(SweepVariable::Alpha, 0.4, 0.4, 1).with_methods(&[Method::ClosedForm]);
        assert_eq!(sweep_alpha(&spec, &base).unwrap().len(), 1);
        let spec = SweepSpec::new(SweepVariable::Alpha, 0.1, 0.4, 3).with_scenarios(&[]);
        assert!(sweep_alpha(&spec, &base).is_err());
    }

    #[test]
    fn closed_form_alpha_curve_is_unimodal() {
        let spec = SweepSpec::new(SweepVariable::Alpha, 0.05, 0.95, 19)
            .with_methods(&[Method::ClosedForm]);
        let rows = sweep_alpha(&spec, &Setup::reference()).unwrap();
        for s in [Scenario::Wfj, Scenario::Wofj] {
            let curve: Vec<f64> = rows
                .iter()
                .map(|r| r.get(s, Method::ClosedForm).unwrap().essr)
                .collect();
            assert!(crate::experiments::is_unimodal(&curve), "{s:?}: {curve:?}");
            assert!(curve.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn sweeps_are_deterministic() {
        let spec = SweepSpec::new(SweepVariable::SnrDb, 30.0, 50.0, 3).with_mc(20_000, 9);
        let a = sweep_snr(&spec, &Setup::reference()).unwrap();
        let b = sweep_snr(&spec, &Setup::reference()).unwrap();
        assert_eq!(a, b);
        let mut threaded = spec.clone();
        threaded.threads = Some(3);
        assert_eq!(sweep_snr(&threaded, &Setup::reference()).unwrap(), a);
    }

    #[test]
    fn snr_sweep_sets_source_powers() {
        let spec =
            SweepSpec::new(SweepVariable::SnrDb, 40.0, 50.0, 2).with_methods(&[Method::ClosedForm]);
        let rows = sweep_snr(&spec, &Setup::reference()).unwrap();
        // 50 dB above -40 dBW noise is the 10 dBW reference power
        let at_ref = essr_point(
            &Setup::reference(),
            Scenario::Wfj,
            Method::ClosedForm,
            &McConfig::new(1, 1),
        )
        .unwrap();
        assert!(
            (rows[1].get(Scenario::Wfj, Method::ClosedForm).unwrap().essr - at_ref.essr).abs()
                < 1e-12
        );
    }

    #[test]
    fn distance_sweep_emits_one_curve_per_distance() {
        let mut spec = SweepSpec::new(SweepVariable::DistanceM, 2.0, 5.0, 2)
            .with_methods(&[Method::ClosedForm]);
        spec.co_alphas = vec![0.2, 0.5, 0.8];
        let rows = sweep_distance(&spec, &Setup::reference()).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].distance_m, Some(2.0));
        assert_eq!(rows[3].distance_m, Some(5.0));
        assert_eq!(rows[4].variable, "alpha@distance_m=5");
        spec.co_alphas = vec![0.0, 0.5];
        assert!(sweep_distance(&spec, &Setup::reference()).is_err());
    }

    #[test]
    fn wrong_variable_rejected() {
        let spec = SweepSpec::new(SweepVariable::SnrDb, 0.1, 0.9, 3);
        assert!(sweep_alpha(&spec, &Setup::reference()).is_err());
    }
}
