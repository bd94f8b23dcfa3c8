use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use tempfile::NamedTempFile;
use zeno_darwin::branch::{self, SystemAmplitudes, DEFAULT_DELTA};
use zeno_darwin::io::{self as zio, format_f64};
use zeno_darwin::sweep::{self, Output, Param, SweepConfig};
use zeno_darwin::{lindblad, models, oracle, Error, ModelKind, ModelParams};

/// Environment variable holding the sweep worker count.
const WORKERS_ENV: &str = "ZENO_DARWIN_WORKERS";
/// Largest tolerated gap between closed-form and state-vector entropies.
const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "zeno-darwin",
    version,
    about = "Collision-model quantum Darwinism simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the branch overlap κ.
    Kappa {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Mutual information I(S, F_m) for every fragment size.
    Profile {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        state: StateArgs,
        /// Ancillas in the environment (defaults to --n).
        #[arg(long)]
        env: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Redundancy R = n / m_δ and its estimate −n ln κ.
    Redundancy {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a sweep described by a TOML config file.
    Sweep {
        /// Config file.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Regenerate the data of a figure preset.
    Figure {
        #[arg(value_enum)]
        preset: PresetArg,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare closed-form entropies with a state-vector simulation.
    OracleCheck {
        #[command(flatten)]
        model: ModelArgs,
        /// Environment size (at most 12 qubit or 8 qutrit ancillas).
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        beta: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare the collision model with continuous dephasing.
    LindbladCheck {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of collisions.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Base)]
    model: ModelArg,
    /// Coupling ω.
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    omega: f64,
    /// Collision time τ.
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    tau: f64,
    /// Rabi rate Ω (Zeno and anti-Zeno only).
    #[arg(long, allow_negative_numbers = true)]
    rabi: Option<f64>,
    /// Detuning ε (anti-Zeno only).
    #[arg(long, allow_negative_numbers = true)]
    detuning: Option<f64>,
}

#[derive(Args)]
struct StateArgs {
    /// Number of collisions.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Information deficit δ.
    #[arg(long, default_value_t = DEFAULT_DELTA, allow_negative_numbers = true)]
    delta: f64,
    /// Amplitude of |↓⟩ as `re` or `re,im`.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<String>,
    /// Amplitude of |↑⟩ as `re` or `re,im`.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<String>,
}

#[derive(Args)]
struct OutArgs {
    /// Output file (standard output if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    out: OutArgs,
    /// Separate CSV file for the mutual-information surface.
    #[arg(long)]
    surface_out: Option<PathBuf>,
    /// Worker threads (overrides ZENO_DARWIN_WORKERS).
    #[arg(long)]
    workers: Option<usize>,
    /// Include run metadata (workers, timing) in JSON output.
    #[arg(long)]
    metadata: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Base,
    Zeno,
    AntiZeno,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Fig1,
    Fig2,
    Fig3,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Usage(String),
    Compute(String),
}

type CliResult<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn compute(e: impl std::fmt::Display) -> Failure {
    Failure::Compute(e.to_string())
}

fn flag_error(flag: &str, e: Error) -> Failure {
    let detail = match e {
        Error::InvalidParams(s) | Error::OutOfRange(s) => s,
        other => other.to_string(),
    };
    usage(format!("invalid value for --{flag}: {detail}"))
}

impl ModelArgs {
    fn params(&self) -> CliResult<ModelParams> {
        let kind = match self.model {
            ModelArg::Base => ModelKind::Base,
            ModelArg::Zeno => ModelKind::Zeno,
            ModelArg::AntiZeno => ModelKind::AntiZeno,
        };
        let p = ModelParams {
            kind,
            omega: self.omega,
            tau: self.tau,
            rabi: self.rabi.unwrap_or(0.0),
            detuning: self.detuning.unwrap_or(0.0),
        };
        if kind == ModelKind::Base && self.rabi.is_some() {
            return Err(usage("--rabi is not accepted by --model base"));
        }
        if kind != ModelKind::AntiZeno && self.detuning.is_some() {
            return Err(usage(format!(
                "--detuning is not accepted by --model {kind}"
            )));
        }
        for (param, v) in [
            (Param::Omega, p.omega),
            (Param::Tau, p.tau),
            (Param::Rabi, p.rabi),
            (Param::Detuning, p.detuning),
        ] {
            param
                .check(kind, v)
                .map_err(|e| flag_error(param.key(), e))?;
        }
        p.validate().map_err(|e| usage(e.to_string()))?;
        Ok(p)
    }
}

fn parse_complex(flag: &str, s: &str) -> CliResult<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| {
        t.parse::<f64>().map_err(|_| {
            usage(format!(
                "invalid value for --{flag}: `{s}` is not `re` or `re,im`"
            ))
        })
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(usage(format!(
            "invalid value for --{flag}: expected `re` or `re,im`"
        ))),
    }
}

fn amplitudes(alpha: Option<&str>, beta: Option<&str>) -> CliResult<SystemAmplitudes> {
    match (alpha, beta) {
        (None, None) => Ok(SystemAmplitudes::uniform()),
        (Some(a), Some(b)) => {
            SystemAmplitudes::new(parse_complex("alpha", a)?, parse_complex("beta", b)?)
                .map_err(|e| flag_error("beta", e))
        }
        (Some(_), None) => Err(usage("--alpha requires --beta")),
        (None, Some(_)) => Err(usage("--beta requires --alpha")),
    }
}

impl StateArgs {
    fn amplitudes(&self) -> CliResult<SystemAmplitudes> {
        amplitudes(self.alpha.as_deref(), self.beta.as_deref())
    }

    fn check(&self) -> CliResult<()> {
        if self.n == 0 {
            return Err(usage(
                "invalid value for --n: at least one collision is required",
            ));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(usage(format!(
                "invalid value for --delta: {} is outside (0, 1)",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Writes every file to a temporary sibling first, then renames them into place.
fn write_outputs(files: &[(&Path, &str)]) -> CliResult<()> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, contents) in files {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = NamedTempFile::new_in(dir)
            .map_err(|e| compute(format!("cannot write {}: {e}", path.display())))?;
        std::io::Write::write_all(&mut tmp, contents.as_bytes())
            .map_err(|e| compute(format!("cannot write {}: {e}", path.display())))?;
        staged.push((tmp, *path));
    }
    for (tmp, path) in staged {
        tmp.persist(path)
            .map_err(|e| compute(format!("cannot write {}: {}", path.display(), e.error)))?;
    }
    Ok(())
}

fn emit(out: &OutArgs, contents: &str) -> CliResult<()> {
    match &out.out {
        Some(path) => write_outputs(&[(path, contents)]),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

/// One-row table in the requested format.
fn record(format: Format, fields: &[(&str, String)]) -> String {
    match format {
        Format::Csv => {
            let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            let row: Vec<&str> = fields.iter().map(|(_, v)| v.as_str()).collect();
            format!("{}\n{}\n", header.join(","), row.join(","))
        }
        Format::Json => {
            let body: Vec<String> = fields
                .iter()
                .map(|(k, v)| format!("\"{k}\":{}", json_scalar(v)))
                .collect();
            format!("{{{}}}\n", body.join(","))
        }
    }
}

fn json_scalar(v: &str) -> String {
    let numeric = v.parse::<f64>().is_ok_and(f64::is_finite);
    if numeric {
        v.to_string()
    } else {
        format!("\"{v}\"")
    }
}

fn run_kappa(model: &ModelArgs, out: &OutArgs) -> CliResult<()> {
    let p = model.params()?;
    let kappa = models::kappa_closed_form(&p).map_err(compute)?;
    emit(out, &record(out.format, &[("kappa", format_f64(kappa))]))
}

fn run_profile(
    model: &ModelArgs,
    state: &StateArgs,
    env: Option<usize>,
    out: &OutArgs,
) -> CliResult<()> {
    let p = model.params()?;
    state.check()?;
    let amps = state.amplitudes()?;
    let env = env.unwrap_or(state.n);
    if env < state.n {
        return Err(usage(format!(
            "invalid value for --env: {env} is smaller than --n {}",
            state.n
        )));
    }
    let profile = branch::darwin_profile_in_environment(&p, state.n, env, state.delta, &amps)
        .map_err(compute)?;
    let text = match out.format {
        Format::Csv => {
            let mut s = String::from("m,I_bits\n");
            for (m, i) in profile.mutual_info_bits.iter().enumerate() {
                let _ = writeln!(s, "{m},{}", format_f64(*i));
            }
            s
        }
        Format::Json => {
            let bits: Vec<String> = profile
                .mutual_info_bits
                .iter()
                .map(|&i| format_f64(i))
                .collect();
            format!(
                "{{\"kappa_mod\":{},\"n_collisions\":{},\"environment_size\":{},\"system_entropy_bits\":{},\"m_delta\":{},\"redundancy\":{},\"delta\":{},\"mutual_info_bits\":[{}]}}\n",
                format_f64(profile.kappa_mod),
                profile.n_collisions,
                profile.environment_size,
                format_f64(profile.system_entropy_bits),
                json_scalar(&profile.m_delta.to_string()),
                format_f64(profile.redundancy),
                format_f64(profile.delta),
                bits.join(",")
            )
        }
    };
    emit(out, &text)
}

fn run_redundancy(model: &ModelArgs, state: &StateArgs, out: &OutArgs) -> CliResult<()> {
    let p = model.params()?;
    state.check()?;
    let amps = state.amplitudes()?;
    let kappa = models::kappa_closed_form(&p).map_err(compute)?;
    let kappa_mod = kappa.abs().min(1.0);
    let m_delta = branch::fragment_size_for_deficit(kappa_mod, state.n, state.delta, &amps)
        .map_err(compute)?;
    let r = branch::redundancy(kappa_mod, state.n, state.delta, &amps).map_err(compute)?;
    let est = branch::redundancy_estimate(kappa_mod, state.n).map_err(compute)?;
    let fields = [
        ("kappa", format_f64(kappa)),
        ("R", format_f64(r)),
        ("R_estimate", format_f64(est)),
        ("m_delta", m_delta.to_string()),
    ];
    emit(out, &record(out.format, &fields))
}

fn worker_count(flag: Option<usize>) -> CliResult<Option<usize>> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(WORKERS_ENV) {
            Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| {
                usage(format!(
                    "{WORKERS_ENV} must be a positive integer, got `{s}`"
                ))
            })?),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(usage("invalid value for --workers: must be at least 1"));
    }
    Ok(n)
}

fn run_config(cfg: &SweepConfig, run: &RunArgs) -> CliResult<()> {
    if run.surface_out.is_some() && !cfg.wants(Output::MutualInfoSurface) {
        return Err(usage(
            "--surface-out given but the sweep does not compute a surface",
        ));
    }
    if run.surface_out.is_some() && run.out.format == Format::Json {
        return Err(usage(
            "--surface-out conflicts with --format json (the JSON result holds the surface)",
        ));
    }
    if run.metadata && run.out.format == Format::Csv {
        return Err(usage("--metadata requires --format json"));
    }
    let workers = worker_count(run.workers)?;
    let result = match workers {
        Some(w) => sweep::run_sweep_with_workers(cfg, w),
        None => sweep::run_sweep(cfg),
    }
    .map_err(compute)?;
    let main = match run.out.format {
        Format::Csv => zio::table_csv(&result),
        Format::Json => zio::to_json(&result, run.metadata).map_err(compute)?,
    };
    let surface = run
        .surface_out
        .as_ref()
        .and_then(|_| zio::surface_csv(&result));
    match (&run.out.out, &run.surface_out, &surface) {
        (Some(p), Some(sp), Some(s)) => write_outputs(&[(p, &main), (sp, s)]),
        (None, Some(sp), Some(s)) => {
            write_outputs(&[(sp, s)])?;
            print!("{main}");
            Ok(())
        }
        _ => emit(&run.out, &main),
    }
}

fn run_oracle_check(
    model: &ModelArgs,
    n: usize,
    alpha: Option<&str>,
    beta: Option<&str>,
    out: &OutArgs,
) -> CliResult<()> {
    let p = model.params()?;
    let amps = amplitudes(alpha, beta)?;
    let cap = match p.kind.ancilla_dim() {
        2 => oracle::MAX_QUBIT_ANCILLAS,
        _ => oracle::MAX_QUTRIT_ANCILLAS,
    };
    if n > cap {
        return Err(usage(format!(
            "invalid value for --n: {n} exceeds the oracle cap of {cap} for this model"
        )));
    }
    let kappa_mod = branch::kappa_modulus(&p).map_err(compute)?;
    let mut csv = String::from("ell,m,I_closed_form,I_exact,abs_error\n");
    let mut worst = 0.0_f64;
    for ell in 0..=n {
        let state = oracle::evolve(&amps, &p, ell, n).map_err(compute)?;
        for m in 0..=n {
            let exact = oracle::exact_entropies(&state, m).map_err(compute)?;
            let closed = [
                branch::system_entropy(kappa_mod, ell, &amps),
                branch::fragment_entropy(kappa_mod, ell, m, &amps),
                branch::joint_entropy(kappa_mod, ell, m, &amps),
            ]
            .into_iter()
            .collect::<Result<Vec<_>, _>>()
            .map_err(compute)?;
            let i_closed = branch::mutual_information(kappa_mod, ell, m, &amps).map_err(compute)?;
            let i_exact = exact.mutual_information();
            let err = [
                (closed[0] - exact.system).abs(),
                (closed[1] - exact.fragment).abs(),
                (closed[2] - exact.joint).abs(),
                (i_closed - i_exact).abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            worst = worst.max(err);
            let _ = writeln!(
                csv,
                "{ell},{m},{},{},{}",
                format_f64(i_closed),
                format_f64(i_exact),
                format_f64(err)
            );
        }
    }
    let text = match out.format {
        Format::Csv => csv,
        Format::Json => record(
            Format::Json,
            &[
                ("n", n.to_string()),
                ("max_abs_error", format_f64(worst)),
                ("tolerance", format_f64(ORACLE_TOLERANCE)),
            ],
        ),
    };
    emit(out, &text)?;
    eprintln!(
        "max |closed form − exact| = {} (tolerance {ORACLE_TOLERANCE:e})",
        format_f64(worst)
    );
    if worst > ORACLE_TOLERANCE {
        return Err(compute(
            "closed-form entropies disagree with the state-vector oracle",
        ));
    }
    Ok(())
}

fn run_lindblad_check(model: &ModelArgs, n: usize, out: &OutArgs) -> CliResult<()> {
    let p = model.params()?;
    if p.kind == ModelKind::AntiZeno {
        return Err(usage("--model anti-zeno has no continuum dephasing rate"));
    }
    let gamma = models::dephasing_rate(&p).map_err(compute)?;
    let dev = lindblad::continuum_consistency(&p, n).map_err(compute)?;
    let fields = [
        ("omega_tau", format_f64(p.collision_angle())),
        ("gamma", format_f64(gamma)),
        ("n", n.to_string()),
        ("max_relative_deviation", format_f64(dev)),
    ];
    emit(out, &record(out.format, &fields))
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Kappa { model, out } => run_kappa(&model, &out),
        Command::Profile {
            model,
            state,
            env,
            out,
        } => run_profile(&model, &state, env, &out),
        Command::Redundancy { model, state, out } => run_redundancy(&model, &state, &out),
        Command::Sweep { config, run } => {
            let cfg =
                zio::load_config(&config).map_err(|e| usage(format!("invalid --config: {e}")))?;
            run_config(&cfg, &run)
        }
        Command::Figure { preset, run } => {
            let name = match preset {
                PresetArg::Fig1 => "fig1",
                PresetArg::Fig2 => "fig2",
                PresetArg::Fig3 => "fig3",
            };
            let cfg = sweep::figure_preset(name).map_err(compute)?;
            run_config(&cfg, &run)
        }
        Command::OracleCheck {
            model,
            n,
            alpha,
            beta,
            out,
        } => run_oracle_check(&model, n, alpha.as_deref(), beta.as_deref(), &out),
        Command::LindbladCheck { model, n, out } => run_lindblad_check(&model, n, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
