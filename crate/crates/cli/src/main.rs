use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use spinball::lift::{classify_loop, lift_path, DEFAULT_CLOSURE_TOL};
use spinball::phase::{berry_experiment, latitude_experiment, GeodesicLoop, Spin};
use spinball::session::{
    handle_line, integrate_imu, parse_imu_log, parse_script_with, run_script, write_frame, Session,
    SessionConfig, TraceFrame, DEFAULT_STEPS_PER_DEGREE,
};
use spinball::{measurement, BallState, Frame, So3, Spinor, Su2, Vec3};

#[derive(Parser)]
#[command(name = "spinball", version, about = "Drive the spinorial ball from the command line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON event script and print the summary.
    Run {
        script: PathBuf,
        #[command(flatten)]
        session: SessionArgs,
    },
    /// Transport a basis state around a geodesic loop and report its phase.
    Berry {
        /// Loop file `{"vertices": [...], "samples_per_edge": n}`; `octant`
        /// selects the built-in ẑ → x̂ → ŷ loop.
        #[arg(required_unless_present = "latitude")]
        r#loop: Option<String>,
        #[arg(long, value_enum, default_value_t = SpinArg::Up)]
        spin: SpinArg,
        /// Use the circle of this polar angle (radians) instead of a loop file.
        #[arg(long, conflicts_with = "loop")]
        latitude: Option<f64>,
        /// Samples around the latitude circle.
        #[arg(long, default_value_t = 360)]
        samples: usize,
    },
    /// Repeat a measurement on fresh copies of a state and compare with the
    /// Born probability.
    MeasureStats {
        /// State as "a_re,a_im,b_re,b_im".
        #[arg(long, default_value = "1,0,0,0")]
        state: String,
        /// Measurement axis as "x,y,z".
        #[arg(long, default_value = "0,0,1")]
        axis: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Replay a gyroscope log (JSON lines `{"t":…,"gyro":[x,y,z]}`).
    Replay {
        log: PathBuf,
        #[command(flatten)]
        session: SessionArgs,
    },
    /// Serve live sessions over TCP, one JSON message per line.
    Serve {
        #[arg(long, default_value_t = 7878)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[command(flatten)]
        session: SessionArgs,
    },
    /// Classify a closed loop: a script, or `{"orientations": [...]}` with
    /// quaternions `[w,x,y,z]` or 3×3 row-major matrices.
    LoopClass {
        input: PathBuf,
        #[command(flatten)]
        session: SessionArgs,
    },
}

#[derive(Args, Clone)]
struct SessionArgs {
    /// Seed for every random draw; generated and reported when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Initial spinor as "a_re,a_im,b_re,b_im".
    #[arg(long)]
    initial: Option<String>,
    #[arg(long, value_enum, default_value_t = ImuMode::Body)]
    imu_mode: ImuMode,
    /// Write the trace (JSON lines) here; `-` for stdout, in which case the
    /// summary goes to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_STEPS_PER_DEGREE)]
    steps_per_degree: f64,
    /// Frobenius tolerance for deciding that a loop closed.
    #[arg(long, default_value_t = DEFAULT_CLOSURE_TOL)]
    closure_tol: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SpinArg {
    Up,
    Down,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ImuMode {
    Body,
    World,
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Runtime(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<spinball::Error> for Failure {
    fn from(e: spinball::Error) -> Self {
        if e.is_validation() {
            Failure::Invalid(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn parse_floats<const N: usize>(text: &str, what: &str) -> Result<[f64; N], Failure> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Invalid(format!("{what}: {e}")))?;
    parts
        .try_into()
        .map_err(|_| Failure::Invalid(format!("{what}: expected {N} comma-separated numbers")))
}

/// Accepts small rounding in hand-typed amplitudes and renormalizes.
fn parse_spinor(text: &str) -> Result<Spinor, Failure> {
    let [ar, ai, br, bi] = parse_floats::<4>(text, "spinor")?;
    let (a, b) = (Complex64::new(ar, ai), Complex64::new(br, bi));
    let norm_sq = a.norm_sqr() + b.norm_sqr();
    if !((norm_sq - 1.0).abs() <= 1e-6) {
        return Err(Failure::Invalid(format!(
            "spinor must be normalized (|a|^2 + |b|^2 = {norm_sq})"
        )));
    }
    Ok(Spinor::normalize(a, b)?)
}

fn parse_axis(text: &str) -> Result<Vec3, Failure> {
    let [x, y, z] = parse_floats::<3>(text, "axis")?;
    Ok(Vec3::new(x, y, z).require_unit()?)
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

impl SessionArgs {
    fn config(&self) -> Result<SessionConfig, Failure> {
        let initial_spinor = match &self.initial {
            Some(t) => parse_spinor(t)?,
            None => Spinor::UP,
        };
        if !(self.steps_per_degree > 0.0 && self.steps_per_degree.is_finite()) {
            return Err(Failure::Invalid("--steps-per-degree must be positive".into()));
        }
        if !(self.closure_tol >= 0.0) {
            return Err(Failure::Invalid("--closure-tol must be non-negative".into()));
        }
        Ok(SessionConfig {
            seed: resolve_seed(self.seed),
            initial_spinor,
            imu_mode: match self.imu_mode {
                ImuMode::Body => Frame::Body,
                ImuMode::World => Frame::World,
            },
            steps_per_degree: self.steps_per_degree,
            closure_tol: self.closure_tol,
        })
    }
}

fn print_json<T: serde::Serialize>(value: &T, to_stderr: bool) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))?;
    if to_stderr {
        eprintln!("{text}");
    } else {
        println!("{text}");
    }
    Ok(())
}

/// Writes the trace where `--out` says and returns whether stdout is taken.
fn write_trace(frames: &[TraceFrame], out: &Option<PathBuf>) -> Result<bool, Failure> {
    let Some(path) = out else {
        return Ok(false);
    };
    let to_stdout = path.as_os_str() == "-";
    let mut sink: Box<dyn Write> = if to_stdout {
        Box::new(io::stdout().lock())
    } else {
        Box::new(fs::File::create(path)?)
    };
    let mut sink = BufWriter::new(&mut sink);
    for f in frames {
        write_frame(f, &mut sink)?;
    }
    sink.flush()?;
    Ok(to_stdout)
}

fn run(script: &Path, args: &SessionArgs) -> Outcome {
    let config = args.config()?;
    let events = parse_script_with(&read_input(script)?, config.steps_per_degree)?;
    let (frames, summary) = run_script(&events, config)?;
    let stdout_taken = write_trace(&frames, &args.out)?;
    print_json(&summary, stdout_taken)
}

fn berry(lp: Option<&str>, spin: SpinArg, latitude: Option<f64>, samples: usize) -> Outcome {
    let spin = match spin {
        SpinArg::Up => Spin::Up,
        SpinArg::Down => Spin::Down,
    };
    let report = match (latitude, lp) {
        (Some(theta), _) => latitude_experiment(theta, samples, spin)?,
        (None, Some("octant")) => berry_experiment(&GeodesicLoop::new(vec![Vec3::Z, Vec3::X, Vec3::Y]), spin)?,
        (None, Some(path)) => {
            let text = read_input(Path::new(path))?;
            let lp: GeodesicLoop = serde_json::from_str(&text)
                .map_err(|e| Failure::Invalid(format!("loop file: {e}")))?;
            berry_experiment(&lp, spin)?
        }
        (None, None) => return Err(Failure::Invalid("a loop file or --latitude is required".into())),
    };
    print_json(&report, false)
}

fn measure_stats(state: &str, axis: &str, trials: u64, seed: Option<u64>) -> Outcome {
    let state = parse_spinor(state)?;
    let axis = parse_axis(axis)?;
    if trials == 0 {
        return Err(Failure::Invalid("--trials must be positive".into()));
    }
    let report = measurement::statistics(&state, axis, trials, resolve_seed(seed))?;
    print_json(&report, false)
}

fn replay(log: &Path, args: &SessionArgs) -> Outcome {
    let config = args.config()?;
    let samples = parse_imu_log(&read_input(log)?)?;
    let imu = integrate_imu(&samples, config.imu_mode)?;
    let mut session = Session::new(config)?;
    let mut frames = vec![session.frame()];
    frames.extend(session.apply_imu(&imu)?);
    let stdout_taken = write_trace(&frames, &args.out)?;
    print_json(&session.summary(), stdout_taken)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OrientationSample {
    Quaternion([f64; 4]),
    Matrix([[f64; 3]; 3]),
}

#[derive(Deserialize)]
struct OrientationLoop {
    orientations: Vec<OrientationSample>,
}

fn loop_class(input: &Path, args: &SessionArgs) -> Outcome {
    let text = read_input(input)?;
    let class = if let Ok(lp) = serde_json::from_str::<OrientationLoop>(&text) {
        let path: Vec<So3> = lp
            .orientations
            .iter()
            .map(|o| match o {
                OrientationSample::Quaternion(q) => Su2::from(*q).renormalized().project(),
                OrientationSample::Matrix(m) => So3 { m: *m },
            })
            .collect();
        let Some(first) = path.first() else {
            return Err(Failure::Invalid("orientation loop is empty".into()));
        };
        let lift = first.to_quaternion();
        let start = BallState {
            orientation: *first,
            lift,
            spinor: lift.apply(&Spinor::UP),
            principal_axis: first.rotate(Vec3::Z),
            step_count: 0,
            reference: Spinor::UP,
        };
        let states = lift_path(&path, &start)?;
        classify_loop(&states, args.closure_tol)?
    } else {
        let config = args.config()?;
        let events = parse_script_with(&text, config.steps_per_degree)?;
        let (frames, summary) = run_script(&events, config)?;
        write_trace(&frames, &args.out)?;
        match summary.homotopy {
            Some(c) => c,
            None => {
                return Err(Failure::Runtime(
                    "orientation did not return to its starting value; the loop is not closed".into(),
                ))
            }
        }
    };
    print_json(&class, false)
}

fn client(stream: TcpStream, config: SessionConfig) -> io::Result<()> {
    let mut session = match Session::new(config) {
        Ok(s) => s,
        Err(e) => {
            let mut w = &stream;
            writeln!(w, r#"{{"type":"error","message":{}}}"#, serde_json::to_string(&e.to_string())?)?;
            return Ok(());
        }
    };
    let reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        writeln!(writer, "{}", handle_line(&mut session, &line))?;
        writer.flush()?;
    }
    Ok(())
}

fn serve(host: &str, port: u16, args: &SessionArgs) -> Outcome {
    let config = args.config()?;
    let listener = TcpListener::bind((host, port))?;
    eprintln!("listening on {}", listener.local_addr()?);
    for stream in listener.incoming() {
        let stream = match stream {
            Ok(s) => s,
            Err(e) => {
                eprintln!("accept failed: {e}");
                continue;
            }
        };
        thread::spawn(move || {
            let peer = stream.peer_addr().map(|a| a.to_string()).unwrap_or_default();
            if let Err(e) = client(stream, config) {
                eprintln!("{peer}: {e}");
            }
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { script, session } => run(script, session),
        Command::Berry {
            r#loop,
            spin,
            latitude,
            samples,
        } => berry(r#loop.as_deref(), *spin, *latitude, *samples),
        Command::MeasureStats {
            state,
            axis,
            trials,
            seed,
        } => measure_stats(state, axis, *trials, *seed),
        Command::Replay { log, session } => replay(log, session),
        Command::Serve { port, host, session } => serve(host, *port, session),
        Command::LoopClass { input, session } => loop_class(input, session),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Failure::Invalid(_) => 2,
                Failure::Runtime(_) => 3,
            })
        }
    }
}
