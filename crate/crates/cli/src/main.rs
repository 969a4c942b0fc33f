use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use isingqc::protocols::teleport_initial;
use isingqc::runner::{
    emit_outputs, fmt_sig, local_maxima, parse_sequence_file, sweep_rabi_with, Execution, RunArtifacts, SweepSpec,
};
use isingqc::*;

#[derive(Parser)]
#[command(name = "isingqc", version, about = "Pulse-level simulator for an Ising spin-chain quantum register")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sequence file and report the final fidelity against the ideal engine.
    Simulate {
        file: PathBuf,
        #[command(flatten)]
        run: RunOpts,
        /// Initial basis state as a bitstring, most significant qubit first.
        #[arg(long)]
        initial: Option<String>,
    },
    /// Final fidelity as a function of the Rabi frequency.
    SweepRabi(SweepArgs),
    /// Run one of the built-in protocols on the default four-qubit chain.
    Protocol {
        #[command(subcommand)]
        which: ProtocolCmd,
    },
    /// Rabi frequency that nulls a transition detuned by `delta`.
    OptimalRabi {
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "pi")]
        angle: AngleArg,
    },
    /// Parse and validate a sequence file.
    Validate { file: PathBuf },
}

#[derive(Subcommand)]
enum ProtocolCmd {
    /// Period finding for N = 4.
    Shor4 {
        #[arg(long, default_value_t = 0.1)]
        omega: f64,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Teleport `c0|0⟩ + c1|1⟩` from qubit 3 to qubit 0.
    Teleport {
        /// Amplitude as `re,im` (or just `re`); defaults to 1/3.
        #[arg(long, allow_hyphen_values = true, requires = "c1")]
        c0: Option<String>,
        /// Defaults to sqrt(8)/3.
        #[arg(long, allow_hyphen_values = true, requires = "c0")]
        c1: Option<String>,
        #[arg(long, default_value_t = 0.1)]
        omega: f64,
        #[command(flatten)]
        run: RunOpts,
    },
}

#[derive(Args)]
struct RunOpts {
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    mode: ModeArg,
    /// Directory for CSV and report files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    integrator: IntegratorOpts,
    /// Repeat the full-engine run with half the step and fail if it moves.
    #[arg(long)]
    certify: bool,
}

#[derive(Args, Clone, Copy)]
struct IntegratorOpts {
    #[arg(long, default_value_t = 64)]
    samples_per_period: usize,
    /// Record every Nth integration step (0 = about 200 samples per pulse).
    #[arg(long, default_value_t = 0)]
    trace_stride: usize,
    #[arg(long, default_value_t = 1e-8)]
    convergence_tol: f64,
}

impl IntegratorOpts {
    fn settings(self) -> IntegratorSettings {
        IntegratorSettings {
            samples_per_period: self.samples_per_period,
            trace_stride: self.trace_stride,
            convergence_tol: self.convergence_tol,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Sequence file to sweep; alternatively pick a built-in protocol.
    #[arg(required_unless_present = "protocol", conflicts_with = "protocol")]
    file: Option<PathBuf>,
    #[arg(long, value_enum)]
    protocol: Option<ProtocolName>,
    #[arg(long, default_value_t = 0.08)]
    min: f64,
    #[arg(long, default_value_t = 0.48)]
    max: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    mode: ModeArg,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to one per core).
    #[arg(long, env = "ISINGQC_WORKERS")]
    workers: Option<usize>,
    /// Run the sweep points one after another.
    #[arg(long)]
    serial: bool,
    #[arg(long, default_value_t = 64)]
    samples_per_period: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolName {
    Shor4,
    Teleport,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Block,
    Ideal,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => Mode::Full,
            ModeArg::Block => Mode::Block,
            ModeArg::Ideal => Mode::Ideal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AngleArg {
    #[value(name = "pi")]
    Pi,
    #[value(name = "pi/2")]
    HalfPi,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Simulate { file, run, initial } => {
            let (config, sequence) = load(&file)?;
            let initial = match initial {
                Some(bits) => basis_from_label(&bits, config.n())?,
                None => StateVector::basis(config.n(), BasisIndex(0))?,
            };
            let outcome = execute(&sequence, &initial, &run)?;
            let mut report = outcome.summary.clone();
            if config.n() == 4 {
                report.push_str(&x_register_probabilities(&outcome.state)?.to_string());
            }
            finish(&run, outcome, report)
        }
        Command::SweepRabi(args) => sweep(args),
        Command::Protocol { which } => match which {
            ProtocolCmd::Shor4 { omega, run } => {
                let sequence = shor4_sequence(&ChainConfig::default_chain(), omega)?;
                let initial = StateVector::basis(4, BasisIndex(0))?;
                let outcome = execute(&sequence, &initial, &run)?;
                let report = format!("{}{}", outcome.summary, x_register_probabilities(&outcome.state)?);
                finish(&run, outcome, report)
            }
            ProtocolCmd::Teleport { c0, c1, omega, run } => {
                let (c0, c1) = match (c0, c1) {
                    (Some(a), Some(b)) => normalize_pair(parse_complex(&a)?, parse_complex(&b)?)?,
                    _ => worked_example(),
                };
                let sequence = teleport_sequence(&ChainConfig::default_chain(), omega)?;
                let outcome = execute(&sequence, &teleport_initial(c0, c1), &run)?;
                let report = format!("{}{}", outcome.summary, teleport_verify(&outcome.state, c0, c1)?);
                finish(&run, outcome, report)
            }
        },
        Command::OptimalRabi { delta, k, angle } => {
            let angle = match angle {
                AngleArg::Pi => PulseAngle::Pi,
                AngleArg::HalfPi => PulseAngle::HalfPi,
            };
            println!("{}", fmt_sig(optimal_rabi(delta, k, angle)?));
            Ok(())
        }
        Command::Validate { file } => {
            let (config, sequence) = load(&file)?;
            println!(
                "{}: ok ({} qubits, {} pulses, total duration {})",
                file.display(),
                config.n(),
                sequence.len(),
                fmt_sig(sequence.total_duration())
            );
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<(ChainConfig, PulseSequence)> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_sequence_file(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn basis_from_label(bits: &str, n: usize) -> Result<StateVector> {
    if bits.len() != n {
        bail!("initial state {bits:?} needs {n} bits");
    }
    let alpha = BasisIndex::from_label(bits).ok_or_else(|| anyhow!("initial state {bits:?} is not a bitstring"))?;
    Ok(StateVector::basis(n, alpha)?)
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let mut parts = text.split(',').map(str::trim);
    let re: f64 = parts.next().unwrap_or("").parse().with_context(|| format!("invalid amplitude {text:?}"))?;
    let im: f64 = match parts.next() {
        Some(p) => p.parse().with_context(|| format!("invalid amplitude {text:?}"))?,
        None => 0.0,
    };
    if parts.next().is_some() {
        bail!("amplitude {text:?} must be `re,im`");
    }
    Ok(Complex64::new(re, im))
}

fn normalize_pair(c0: Complex64, c1: Complex64) -> Result<(Complex64, Complex64)> {
    let norm = (c0.norm_sqr() + c1.norm_sqr()).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        bail!("amplitudes must not both vanish");
    }
    if (norm - 1.0).abs() > 1e-9 {
        log::warn!("normalizing teleported state (|c0|² + |c1|² = {})", norm * norm);
    }
    Ok((c0 / norm, c1 / norm))
}

fn worked_example() -> (Complex64, Complex64) {
    (Complex64::new(1.0 / 3.0, 0.0), Complex64::new(8f64.sqrt() / 3.0, 0.0))
}

struct Outcome {
    state: StateVector,
    ideal: StateVector,
    trace: FidelityTrace,
    summary: String,
}

fn execute(sequence: &PulseSequence, initial: &StateVector, run: &RunOpts) -> Result<Outcome> {
    let settings = run.integrator.settings();
    settings.validate()?;
    let mode = Mode::from(run.mode);
    let mut summary = String::new();
    if !sequence.label.is_empty() {
        writeln!(summary, "sequence: {}", sequence.label)?;
    }
    writeln!(
        summary,
        "mode: {mode}, {} pulses, omega = {}, total duration {}",
        sequence.len(),
        fmt_sig(sequence.rabi),
        fmt_sig(sequence.total_duration())
    )?;
    let (state, trace) = if run.certify && mode == Mode::Full {
        let c = engine::run_certified(sequence, initial, &settings)?;
        writeln!(summary, "step-halving difference: {}", fmt_sig(c.step_halving_diff))?;
        (c.state, c.trace)
    } else {
        run_sequence(sequence, initial, mode, &settings)?
    };
    let (ideal, _) = run_sequence(sequence, initial, Mode::Ideal, &settings)?;
    writeln!(summary, "final fidelity F_fi = {}", fmt_sig(fidelity(&ideal, &state)?))?;
    writeln!(summary, "norm drift: {}", fmt_sig((state.norm_sqr() - 1.0).abs()))?;
    Ok(Outcome {
        state,
        ideal,
        trace,
        summary,
    })
}

fn finish(run: &RunOpts, outcome: Outcome, report: String) -> Result<()> {
    print!("{report}");
    if let Some(dir) = &run.out {
        let artifacts = RunArtifacts {
            amplitudes: Some((outcome.state, outcome.ideal)),
            trace: Some(outcome.trace),
            sweep: None,
            report: Some(report),
        };
        for path in emit_outputs(dir, &artifacts)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let (sequence, initial) = match (&args.file, args.protocol) {
        (Some(file), _) => {
            let (config, sequence) = load(file)?;
            (sequence, StateVector::basis(config.n(), BasisIndex(0))?)
        }
        (None, Some(ProtocolName::Shor4)) => (
            shor4_sequence(&ChainConfig::default_chain(), 0.1)?,
            StateVector::basis(4, BasisIndex(0))?,
        ),
        (None, Some(ProtocolName::Teleport)) => {
            let (c0, c1) = worked_example();
            (teleport_sequence(&ChainConfig::default_chain(), 0.1)?, teleport_initial(c0, c1))
        }
        (None, None) => unreachable!("clap requires a file or a protocol"),
    };
    let spec = SweepSpec {
        omega_min: args.min,
        omega_max: args.max,
        points: args.points,
        sequence,
        initial,
        mode: args.mode.into(),
    };
    let settings = IntegratorSettings {
        samples_per_period: args.samples_per_period,
        ..IntegratorSettings::default()
    };
    let execution = if args.serial { Execution::Serial } else { Execution::Parallel };
    let rows = match args.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(|| sweep_rabi_with(&spec, &settings, execution))?
        }
        None => sweep_rabi_with(&spec, &settings, execution)?,
    };

    let mut report = format!("sweep of {} points over [{}, {}]\n", rows.len(), fmt_sig(args.min), fmt_sig(args.max));
    for m in local_maxima(&rows) {
        writeln!(report, "local maximum: omega = {}, F_fi = {}", fmt_sig(m.omega), fmt_sig(m.fidelity))?;
    }
    print!("{report}");
    if let Some(dir) = &args.out {
        let artifacts = RunArtifacts {
            sweep: Some(rows),
            report: Some(report),
            ..RunArtifacts::default()
        };
        for path in emit_outputs(dir, &artifacts)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
