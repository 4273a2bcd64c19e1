use clap::{Args, Parser, Subcommand};
use plemden::run::{run, RunConfig, SCHEMA_VERSION};
use plemden::LabError;
use serde::Serialize;
use serde_json::{Map, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// Verification lab for -lap_p u = f(u) on model manifolds.
#[derive(Parser, Debug)]
#[command(name = "plemden", version)]
struct Cli {
    /// Write the JSON report here (a `.csv` path receives the data table instead).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write CSV data (trajectories, scan tables, profiles) here.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Master seed for sampling campaigns.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the pass tolerance of residual and margin checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// JSON run configuration; its fields override the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Record wall time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

/// Comma list `a,b,c` or inclusive range `start:stop:step`.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
struct Floats(Vec<f64>);

fn parse_floats(s: &str) -> Result<Floats, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, h] = parts[..] else {
            return Err("range must be start:stop:step".into());
        };
        let (a, b, h) = (num(a)?, num(b)?, num(h)?);
        if h.is_nan() || h <= 0.0 || b < a {
            return Err("range needs step > 0 and stop >= start".into());
        }
        let count = ((b - a) / h + 1e-9).floor() as usize;
        Ok(Floats((0..=count).map(|i| a + h * i as f64).collect()))
    } else {
        s.split(',').map(num).collect::<Result<_, _>>().map(Floats)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
struct Usizes(Vec<usize>);

fn parse_usizes(s: &str) -> Result<Usizes, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Usizes)
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pointwise identity campaigns on random positive fields.
    Identities(IdentitiesArgs),
    /// Traceless trace inequality over random jets.
    TraceIneq(JetArgs),
    /// Refined Kato inequality over random jets.
    Kato(JetArgs),
    /// Pointwise Moser inequality along a radial solution.
    Moser(MoserArgs),
    /// Emden bubble residual and trajectory match.
    Bubble(BubbleArgs),
    /// Radial shooting scan over exponents and initial values.
    Scan(ScanArgs),
    /// Regular positive solutions of -lap u = u^q - lambda u on the sphere.
    BvSphere(SphereArgs),
    /// Global log-gradient bound on hyperbolic space.
    GradientBound(GradientArgs),
    /// Scale invariance of the local log-gradient quantity.
    LocalScaling(ScalingArgs),
    /// Weak Harnack and local maximum principle ratios.
    Harnack(HarnackArgs),
    /// Liouville classification of -lap_p u = f(u).
    Classify(ClassifyArgs),
    /// Critical exponent thresholds.
    Thresholds(ThresholdsArgs),
    /// Bishop-Gromov volume ratio check.
    Volume(VolumeArgs),
}

#[derive(Args, Debug, Serialize)]
struct IdentitiesArgs {
    /// all, decomposition, ww, bochner-x, bochner-p or basic1
    #[arg(long)]
    suite: Option<String>,
    /// Comma list of euclidean, sphere, hyperbolic.
    #[arg(long)]
    models: Option<String>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long = "dim", value_parser = parse_usizes)]
    #[serde(rename = "dims")]
    dim: Option<Usizes>,
    #[arg(long, value_parser = parse_floats)]
    p: Option<Floats>,
    /// polynomial, gaussian, radial-exp, rational, product, sum or mixed
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct JetArgs {
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long = "dim", value_parser = parse_usizes)]
    #[serde(rename = "dims")]
    dim: Option<Usizes>,
    #[arg(long, value_parser = parse_floats)]
    p: Option<Floats>,
    #[arg(long, value_parser = parse_floats)]
    b: Option<Floats>,
}

#[derive(Args, Debug, Serialize)]
struct MoserArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Exponent of f(u) = u^alpha.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    delta0: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    u0: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct BubbleArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    horizon: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct ScanArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_parser = parse_floats)]
    alpha: Option<Floats>,
    #[arg(long, value_parser = parse_floats)]
    u0: Option<Floats>,
    #[arg(long)]
    horizon: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct SphereArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_parser = parse_floats)]
    u0: Option<Floats>,
}

#[derive(Args, Debug, Serialize)]
struct GradientArgs {
    /// radial, horospherical or constant
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, value_parser = parse_usizes)]
    n: Option<Usizes>,
    #[arg(long, value_parser = parse_floats)]
    p: Option<Floats>,
    #[arg(long, value_parser = parse_floats)]
    kappa: Option<Floats>,
    #[arg(long)]
    delta0: Option<f64>,
    #[arg(long)]
    rtail: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct ScalingArgs {
    /// affine or fundamental
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    offset: Option<f64>,
    #[arg(long, value_parser = parse_floats)]
    radii: Option<Floats>,
}

#[derive(Args, Debug, Serialize)]
struct HarnackArgs {
    /// constant, decay or bubble
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    value: Option<f64>,
    #[arg(long)]
    power: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, value_parser = parse_floats)]
    radii: Option<Floats>,
    #[arg(long)]
    band: Option<f64>,
    /// weak, local-max or both
    #[arg(long)]
    test: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct ClassifyArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// positive, nonnegative, nonpositive or mixed
    #[arg(long)]
    sign: Option<String>,
    #[arg(long)]
    pure_power: Option<bool>,
    #[arg(long)]
    growth: Option<bool>,
    #[arg(long)]
    noncompact: Option<bool>,
}

#[derive(Args, Debug, Serialize)]
struct ThresholdsArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct VolumeArgs {
    /// euclidean, sphere or hyperbolic
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, value_parser = parse_floats)]
    radii: Option<Floats>,
}

const ENUM_FIELDS: [&str; 6] = ["suite", "family", "profile", "sign", "model", "test"];

/// Flag values as a config object: unset flags dropped, enum spellings normalized.
fn flag_map(args: &impl Serialize) -> Map<String, Value> {
    let Value::Object(m) = serde_json::to_value(args).expect("flags serialize") else {
        unreachable!()
    };
    m.into_iter()
        .filter(|(_, v)| !v.is_null())
        .map(|(k, v)| {
            let v = match (&v, k.as_str()) {
                (Value::String(s), f) if ENUM_FIELDS.contains(&f) => Value::String(s.replace('-', "_")),
                (Value::String(s), "models") => Value::Array(s.split(',').map(|t| Value::String(t.trim().into())).collect()),
                _ => v,
            };
            (k, v)
        })
        .collect()
}

impl Command {
    fn name_and_flags(&self) -> (&'static str, Map<String, Value>) {
        match self {
            Command::Identities(a) => ("identities", flag_map(a)),
            Command::TraceIneq(a) => ("trace-ineq", flag_map(a)),
            Command::Kato(a) => ("kato", flag_map(a)),
            Command::Moser(a) => ("moser", flag_map(a)),
            Command::Bubble(a) => ("bubble", flag_map(a)),
            Command::Scan(a) => ("scan", flag_map(a)),
            Command::BvSphere(a) => ("bv-sphere", flag_map(a)),
            Command::GradientBound(a) => ("gradient-bound", flag_map(a)),
            Command::LocalScaling(a) => ("local-scaling", flag_map(a)),
            Command::Harnack(a) => ("harnack", flag_map(a)),
            Command::Classify(a) => ("classify", flag_map(a)),
            Command::Thresholds(a) => ("thresholds", flag_map(a)),
            Command::Volume(a) => ("volume", flag_map(a)),
        }
    }
}

const SEEDED: [&str; 3] = ["identities", "trace-ineq", "kato"];
const TOLERANCED: [&str; 5] = ["identities", "trace-ineq", "kato", "moser", "bubble"];

fn build_config(cli: &Cli) -> Result<RunConfig, LabError> {
    let (command, mut exp) = cli.command.name_and_flags();
    if let Some(seed) = cli.seed {
        if !SEEDED.contains(&command) {
            return Err(LabError::Usage(format!("--seed is not used by {command}")));
        }
        exp.insert("seed".into(), seed.into());
    }
    if let Some(tol) = cli.tol {
        if !TOLERANCED.contains(&command) {
            return Err(LabError::Usage(format!("--tol is not used by {command}")));
        }
        exp.insert("tol".into(), tol.into());
    }
    let mut schema = Value::from(SCHEMA_VERSION);
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Usage(format!("{}: {e}", path.display())))?;
        let file: Value = serde_json::from_str(&text).map_err(|e| LabError::Usage(format!("{}: {e}", path.display())))?;
        let Value::Object(mut file) = file else {
            return Err(LabError::Usage("config file must hold a JSON object".into()));
        };
        if let Some(v) = file.remove("schema_version") {
            schema = v;
        }
        match file.remove("experiment") {
            Some(Value::Object(fexp)) => {
                if let Some(c) = fexp.get("command") {
                    if c != command {
                        return Err(LabError::Usage(format!("config is for {c}, not {command}")));
                    }
                }
                exp.extend(fexp);
            }
            Some(_) => return Err(LabError::Usage("experiment must be a JSON object".into())),
            None => {}
        }
        if let Some(k) = file.keys().next() {
            return Err(LabError::Usage(format!("unknown config field {k:?}")));
        }
    }
    exp.insert("command".into(), command.into());
    let full = serde_json::json!({"schema_version": schema, "experiment": exp});
    RunConfig::from_json(&full.to_string())
}

fn write(path: &PathBuf, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("plemden: {e}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let mut out = match run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("plemden: {e}");
            return ExitCode::from(if e.is_usage() { 2 } else { 1 });
        }
    };
    if cli.timing {
        out.report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    let json = out.report.to_json();
    let csv_out = cli.out.as_ref().filter(|p| p.extension().is_some_and(|e| e == "csv"));
    let json_out = cli.out.as_ref().filter(|_| csv_out.is_none());
    let mut io = Ok(());
    match json_out {
        Some(path) => io = io.and(write(path, &json)),
        None => print!("{json}"),
    }
    for path in [csv_out, cli.csv.as_ref()].into_iter().flatten() {
        match &out.csv {
            Some(csv) => io = io.and(write(path, csv)),
            None => eprintln!("plemden: {} produces no CSV data", config.experiment.command()),
        }
    }
    if let Err(e) = io {
        eprintln!("plemden: {e}");
        return ExitCode::from(1);
    }
    for c in out.report.checks.iter().filter(|c| !c.pass) {
        eprintln!("plemden: check {} failed", c.name);
    }
    if out.report.has_usage_error() {
        ExitCode::from(2)
    } else if out.report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
