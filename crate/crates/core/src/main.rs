//! `relaysec` command-line tool: sweeps, time-switching optimization,
//! outage probabilities and oracle validation.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use relaysec::analytics::{power_outage, OutageInputs};
use relaysec::config::{ConfigOverrides, ResolvedConfig};
use relaysec::experiments::{
    self, format_value, optimize_alpha, validate, Method, Scenario, SweepSpec, SweepVariable,
};
use relaysec::montecarlo::{estimate_outage, McConfig, OutageTarget, DEFAULT_SAMPLES};
use relaysec::params::Setup;
use relaysec::Result;

#[derive(Parser, Debug)]
#[command(
    name = "relaysec",
    version,
    about = "Secrecy sum rate of a wirelessly powered two-way untrusted relay"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ESSR against the time-switching ratio.
    SweepAlpha {
        #[arg(long, default_value_t = 0.05)]
        start: f64,
        #[arg(long, default_value_t = 0.95)]
        stop: f64,
        #[arg(long, default_value_t = 19)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// ESSR against the transmit SNR P_S/N_0 in dB.
    SweepSnr {
        #[arg(long, default_value_t = 0.0)]
        start: f64,
        #[arg(long, default_value_t = 50.0)]
        stop: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// ESSR against alpha for a range of common node distances.
    SweepDistance {
        #[arg(long, default_value_t = 2.0)]
        start: f64,
        #[arg(long, default_value_t = 5.0)]
        stop: f64,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha_start: f64,
        #[arg(long, default_value_t = 0.95)]
        alpha_stop: f64,
        #[arg(long, default_value_t = 19)]
        alpha_steps: usize,
        /// Relay-jammer distance as a fraction of the common distance.
        #[arg(long, default_value_t = 1.0)]
        rj_ratio: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Golden-section search for the ESSR-maximizing alpha.
    OptimizeAlpha {
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Power outage probabilities at the relay and the jammer.
    Outage {
        #[command(flatten)]
        common: Common,
    },
    /// Cross-check every closed form against the Monte Carlo oracle.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Wfj,
    Wofj,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Closed,
    Mc,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Common {
    /// Configuration file (flat TOML key = value).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Monte Carlo sample count per point.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    keys: KeyArgs,
}

/// Configuration keys; each overrides the file value of the same name.
#[derive(Args, Debug, Default)]
struct KeyArgs {
    #[arg(
        long = "p_s1_dbw",
        visible_alias = "p-s1-dbw",
        allow_hyphen_values = true
    )]
    p_s1_dbw: Option<f64>,
    #[arg(
        long = "p_s2_dbw",
        visible_alias = "p-s2-dbw",
        allow_hyphen_values = true
    )]
    p_s2_dbw: Option<f64>,
    #[arg(long = "eta_r", visible_alias = "eta-r", allow_hyphen_values = true)]
    eta_r: Option<f64>,
    #[arg(long = "eta_j", visible_alias = "eta-j", allow_hyphen_values = true)]
    eta_j: Option<f64>,
    #[arg(long = "alpha")]
    alpha: Option<f64>,
    #[arg(long = "n0_dbm", visible_alias = "n0-dbm", allow_hyphen_values = true)]
    n0_dbm: Option<f64>,
    #[arg(
        long = "theta_r_dbm",
        visible_alias = "theta-r-dbm",
        allow_hyphen_values = true
    )]
    theta_r_dbm: Option<f64>,
    #[arg(
        long = "theta_j_dbm",
        visible_alias = "theta-j-dbm",
        allow_hyphen_values = true
    )]
    theta_j_dbm: Option<f64>,
    #[arg(long = "jamming")]
    jamming: Option<bool>,
    #[arg(long = "high_snr", visible_alias = "high-snr")]
    high_snr: Option<bool>,
    #[arg(long = "d_s1r_m", visible_alias = "d-s1r-m")]
    d_s1r_m: Option<f64>,
    #[arg(long = "d_s2r_m", visible_alias = "d-s2r-m")]
    d_s2r_m: Option<f64>,
    #[arg(long = "d_s1j_m", visible_alias = "d-s1j-m")]
    d_s1j_m: Option<f64>,
    #[arg(long = "d_s2j_m", visible_alias = "d-s2j-m")]
    d_s2j_m: Option<f64>,
    #[arg(long = "d_rj_m", visible_alias = "d-rj-m")]
    d_rj_m: Option<f64>,
    #[arg(long = "rho")]
    rho: Option<f64>,
}

impl KeyArgs {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            p_s1_dbw: self.p_s1_dbw,
            p_s2_dbw: self.p_s2_dbw,
            eta_r: self.eta_r,
            eta_j: self.eta_j,
            alpha: self.alpha,
            n0_dbm: self.n0_dbm,
            theta_r_dbm: self.theta_r_dbm,
            theta_j_dbm: self.theta_j_dbm,
            jamming: self.jamming,
            high_snr: self.high_snr,
            d_s1r_m: self.d_s1r_m,
            d_s2r_m: self.d_s2r_m,
            d_s1j_m: self.d_s1j_m,
            d_s2j_m: self.d_s2j_m,
            d_rj_m: self.d_rj_m,
            rho: self.rho,
        }
    }
}

impl Common {
    fn resolve(&self) -> Result<(ResolvedConfig, Setup)> {
        let file = match &self.config {
            Some(path) => ConfigOverrides::from_file(path)?,
            None => ConfigOverrides::default(),
        };
        let resolved = file.merged_with(&self.keys.overrides()).resolve()?;
        let setup = resolved.setup()?;
        Ok((resolved, setup))
    }

    /// Scenarios to run; `fallback` applies when `--scenario` is absent.
    fn scenarios(&self, fallback: &[Scenario]) -> Vec<Scenario> {
        match self.scenario {
            Some(ScenarioArg::Wfj) => vec![Scenario::Wfj],
            Some(ScenarioArg::Wofj) => vec![Scenario::Wofj],
            Some(ScenarioArg::Both) => vec![Scenario::Wfj, Scenario::Wofj],
            None => fallback.to_vec(),
        }
    }

    fn methods(&self, fallback: &[Method]) -> Vec<Method> {
        match self.method {
            Some(MethodArg::Closed) => vec![Method::ClosedForm],
            Some(MethodArg::Mc) => vec![Method::MonteCarlo],
            Some(MethodArg::Both) => vec![Method::ClosedForm, Method::MonteCarlo],
            None => fallback.to_vec(),
        }
    }

    fn mc(&self) -> McConfig {
        McConfig {
            samples: self.samples,
            seed: self.seed,
            threads: self.threads,
        }
    }

    fn sweep_spec(
        &self,
        variable: SweepVariable,
        start: f64,
        stop: f64,
        steps: usize,
    ) -> SweepSpec {
        let mut spec = SweepSpec::new(variable, start, stop, steps)
            .with_scenarios(&self.scenarios(&[Scenario::Wfj, Scenario::Wofj]))
            .with_methods(&self.methods(&[Method::ClosedForm, Method::MonteCarlo]))
            .with_mc(self.samples, self.seed);
        spec.threads = self.threads;
        spec
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    params: &'a ResolvedConfig,
    rows: T,
    tool_version: &'static str,
}

fn write_json<T: Serialize>(mut out: impl Write, params: &ResolvedConfig, rows: T) -> Result<()> {
    let doc = Document {
        params,
        rows,
        tool_version: env!("CARGO_PKG_VERSION"),
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

fn write_table(out: impl Write, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn run_sweep(common: &Common, spec: SweepSpec) -> Result<bool> {
    let (resolved, setup) = common.resolve()?;
    let rows = experiments::sweep(&spec, &setup)?;
    let out = common.output()?;
    match common.format {
        Format::Csv => experiments::write_csv(out, &rows)?,
        Format::Json => experiments::write_json(out, &resolved, &rows)?,
    }
    Ok(true)
}

#[derive(Serialize)]
struct OptimumRow {
    scenario: &'static str,
    method: &'static str,
    alpha_opt: f64,
    essr_bps_hz: f64,
    fallback: bool,
}

fn run_optimize(common: &Common, tolerance: f64) -> Result<bool> {
    let (resolved, setup) = common.resolve()?;
    let mut rows = Vec::new();
    for scenario in common.scenarios(&[Scenario::Wfj, Scenario::Wofj]) {
        for method in common.methods(&[Method::ClosedForm]) {
            let opt = optimize_alpha(&setup, scenario, method, tolerance, &common.mc())?;
            rows.push(OptimumRow {
                scenario: scenario.as_str(),
                method: method.as_str(),
                alpha_opt: opt.alpha,
                essr_bps_hz: opt.essr,
                fallback: opt.fallback,
            });
        }
    }
    let out = common.output()?;
    match common.format {
        Format::Json => write_json(out, &resolved, &rows)?,
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.scenario.to_string(),
                        r.method.to_string(),
                        format_value(r.alpha_opt),
                        format_value(r.essr_bps_hz),
                        r.fallback.to_string(),
                    ]
                })
                .collect();
            write_table(
                out,
                &["scenario", "method", "alpha_opt", "essr_bps_hz", "fallback"],
                &table,
            )?;
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct OutageRow {
    target: &'static str,
    method: &'static str,
    probability: f64,
    std_err: f64,
}

fn run_outage(common: &Common) -> Result<bool> {
    let (resolved, setup) = common.resolve()?;
    let p = &setup.params;
    let g = setup.gains();
    let mut rows = Vec::new();
    for (name, target, inp) in [
        ("relay", OutageTarget::Relay, OutageInputs::relay(p, &g)),
        ("jammer", OutageTarget::Jammer, OutageInputs::jammer(p, &g)),
    ] {
        for method in common.methods(&[Method::ClosedForm]) {
            let (probability, std_err) = match method {
                Method::ClosedForm => (power_outage(&inp), 0.0),
                Method::MonteCarlo => {
                    let est = estimate_outage(p, &g, target, &common.mc())?;
                    (est.mean, est.std_err)
                }
            };
            rows.push(OutageRow {
                target: name,
                method: method.as_str(),
                probability,
                std_err,
            });
        }
    }
    let out = common.output()?;
    match common.format {
        Format::Json => write_json(out, &resolved, &rows)?,
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.target.to_string(),
                        r.method.to_string(),
                        format_value(r.probability),
                        format_value(r.std_err),
                    ]
                })
                .collect();
            write_table(out, &["target", "method", "probability", "std_err"], &table)?;
        }
    }
    Ok(true)
}

fn run_validate(common: &Common) -> Result<bool> {
    let (resolved, setup) = common.resolve()?;
    let fallback = if setup.params.jamming {
        Scenario::Wfj
    } else {
        Scenario::Wofj
    };
    let mut reports = Vec::new();
    for scenario in common.scenarios(&[fallback]) {
        let s = Setup {
            params: setup.params.with_jamming(scenario.jamming()),
            ..setup
        };
        reports.push((
            scenario.as_str(),
            validate(&s, common.samples, common.seed)?,
        ));
    }
    let passed = reports.iter().all(|(_, r)| r.passed());
    let mut out = common.output()?;
    match common.format {
        Format::Json => write_json(&mut out, &resolved, &reports)?,
        Format::Csv => {
            for (scenario, report) in &reports {
                writeln!(
                    out,
                    "# scenario {scenario}, n = {}, seed = {}",
                    report.samples, report.seed
                )?;
                write!(out, "{report}")?;
            }
            writeln!(
                out,
                "{}",
                if passed {
                    "all checks passed"
                } else {
                    "validation FAILED"
                }
            )?;
        }
    }
    out.flush()?;
    Ok(passed)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::SweepAlpha {
            start,
            stop,
            steps,
            common,
        } => {
            let spec = common.sweep_spec(SweepVariable::Alpha, start, stop, steps);
            run_sweep(&common, spec)
        }
        Command::SweepSnr {
            start,
            stop,
            steps,
            common,
        } => {
            let spec = common.sweep_spec(SweepVariable::SnrDb, start, stop, steps);
            run_sweep(&common, spec)
        }
        Command::SweepDistance {
            start,
            stop,
            steps,
            alpha_start,
            alpha_stop,
            alpha_steps,
            rj_ratio,
            common,
        } => {
            let mut spec = common.sweep_spec(SweepVariable::DistanceM, start, stop, steps);
            spec.co_alphas = experiments::linspace(alpha_start, alpha_stop, alpha_steps);
            spec.rj_ratio = rj_ratio;
            run_sweep(&common, spec)
        }
        Command::OptimizeAlpha { tolerance, common } => run_optimize(&common, tolerance),
        Command::Outage { common } => run_outage(&common),
        Command::Validate { common } => run_validate(&common),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
