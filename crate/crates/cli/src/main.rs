use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use grushin_cli::{error_record, run, DEFAULT_OUT, ERRORS_FILE};
use grushin_core::config::RunConfig;
use toml::{Table, Value};

/// Spectral calculus of the Grushin operator: transforms, propagation and
/// estimate probes.
#[derive(Parser, Debug)]
#[command(name = "grushin", version)]
struct Cli {
    /// TOML configuration; flags given here take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: $GRUSHIN_OUT, then ./grushin-out]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads [default: one per core]
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    half_width: Option<f64>,
    /// Nodes per axis (odd)
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Period of the t-grid
    #[arg(long, global = true)]
    period: Option<f64>,
    /// Samples of the t-grid (even)
    #[arg(long, global = true)]
    t_samples: Option<usize>,
    /// Highest Hermite level kept
    #[arg(long, short = 'K', global = true)]
    truncation: Option<usize>,
    /// Real part of the order α
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha_im: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the invariant suite
    Selftest,
    /// Apply m_α(t²G) to a stored field
    Transform(TransformArgs),
    /// Evolve a stored field by the wave equation
    Propagate(PropagateArgs),
    /// Annulus norms of a kernel section
    KernelScan(KernelScanArgs),
    /// Fit the decay exponent of a kernel section
    Decay(DecayArgs),
    /// Maximal-function domination battery
    Maximal(MaximalArgs),
    /// Weighted L² battery
    Weighted(CountArgs),
    /// Square-function probe of m_α(H(λ))
    Rbound(RboundArgs),
    /// Square-function probe of λ d/dλ m_α(H(λ)) by both methods
    RboundDeriv(RboundDerivArgs),
    /// Truncated-space probe of the wave propagator on L^p
    LpProbe(LpArgs),
    /// One-dimensional Hermite sup diagnostics
    N1Diag(N1Args),
    /// Write a random field to a container
    SynthField(SynthArgs),
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Args, Debug)]
struct PropagateArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
}

#[derive(Args, Debug)]
struct KernelScanArgs {
    #[arg(long)]
    t: Option<f64>,
    /// plain or energy
    #[arg(long)]
    family: Option<String>,
}

#[derive(Args, Debug)]
struct DecayArgs {
    #[arg(long)]
    t: Option<f64>,
    /// l2 or sup
    #[arg(long)]
    regime: Option<String>,
}

#[derive(Args, Debug)]
struct MaximalArgs {
    /// plain or energy
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    hl_exponent: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Args, Debug)]
struct RboundArgs {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    lambda_min: Option<f64>,
    #[arg(long)]
    lambda_max: Option<f64>,
}

#[derive(Args, Debug)]
struct RboundDerivArgs {
    #[command(flatten)]
    base: RboundArgs,
    /// Step of the finite-difference route
    #[arg(long)]
    h: Option<f64>,
}

#[derive(Args, Debug)]
struct LpArgs {
    #[arg(long, value_delimiter = ',')]
    ps: Option<Vec<f64>>,
    /// Truncations to probe, comma separated
    #[arg(long, value_delimiter = ',')]
    truncations: Option<Vec<usize>>,
    #[arg(long)]
    band: Option<usize>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
}

#[derive(Args, Debug)]
struct N1Args {
    #[arg(long)]
    kmin: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    levels: Option<usize>,
    /// Compact window as lo,hi
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 2)]
    window: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    band: Option<usize>,
    #[arg(long)]
    max_level: Option<usize>,
}

/// Collects `Some` flags as TOML values.
#[derive(Default)]
struct Overrides(Table);

impl Overrides {
    fn set<T: Into<Value>>(&mut self, key: &str, v: Option<T>) {
        if let Some(v) = v {
            self.0.insert(key.to_string(), v.into());
        }
    }

    fn path(&mut self, key: &str, v: &Option<PathBuf>) {
        self.set(key, v.as_ref().map(|p| p.to_string_lossy().into_owned()));
    }

    fn usize(&mut self, key: &str, v: Option<usize>) {
        self.set(key, v.map(|x| x as i64));
    }

    fn list<T: Clone + Into<Value>>(&mut self, key: &str, v: &Option<Vec<T>>) {
        self.set(key, v.clone().map(|xs| Value::Array(xs.into_iter().map(Into::into).collect())));
    }
}

impl Command {
    fn kind(&self) -> &'static str {
        match self {
            Command::Selftest => "selftest",
            Command::Transform(_) => "transform",
            Command::Propagate(_) => "propagate",
            Command::KernelScan(_) => "kernel-scan",
            Command::Decay(_) => "decay",
            Command::Maximal(_) => "maximal",
            Command::Weighted(_) => "weighted",
            Command::Rbound(_) => "rbound",
            Command::RboundDeriv(_) => "rbound-deriv",
            Command::LpProbe(_) => "lp-probe",
            Command::N1Diag(_) => "n1-diag",
            Command::SynthField(_) => "synth-field",
        }
    }

    fn overrides(&self) -> Overrides {
        let mut o = Overrides::default();
        let rbound = |o: &mut Overrides, a: &RboundArgs| {
            o.set("p", a.p);
            o.usize("count", a.count);
            o.set("lambda_min", a.lambda_min);
            o.set("lambda_max", a.lambda_max);
        };
        match self {
            Command::Selftest => {}
            Command::Transform(a) => {
                o.path("input", &a.input);
                o.path("output", &a.output);
                o.set("t", a.t);
            }
            Command::Propagate(a) => {
                o.path("input", &a.input);
                o.path("output", &a.output);
                o.set("s", a.s);
            }
            Command::KernelScan(a) => {
                o.set("t", a.t);
                o.set("family", a.family.clone());
            }
            Command::Decay(a) => {
                o.set("t", a.t);
                o.set("regime", a.regime.clone());
            }
            Command::Maximal(a) => {
                o.set("family", a.family.clone());
                o.set("hl_exponent", a.hl_exponent);
                o.usize("count", a.count);
            }
            Command::Weighted(a) => o.usize("count", a.count),
            Command::Rbound(a) => rbound(&mut o, a),
            Command::RboundDeriv(a) => {
                rbound(&mut o, &a.base);
                o.set("h", a.h);
            }
            Command::LpProbe(a) => {
                o.list("ps", &a.ps);
                o.list("truncations", &a.truncations.as_ref().map(|v| v.iter().map(|&k| k as i64).collect()));
                o.usize("band", a.band);
                o.usize("count", a.count);
                o.usize("iterations", a.iterations);
            }
            Command::N1Diag(a) => {
                o.usize("kmin", a.kmin);
                o.usize("kmax", a.kmax);
                o.usize("levels", a.levels);
                o.list("window", &a.window);
            }
            Command::SynthField(a) => {
                o.path("output", &a.output);
                o.usize("band", a.band);
                o.usize("max_level", a.max_level);
            }
        }
        o
    }
}

fn table_mut<'a>(t: &'a mut Table, key: &str) -> &'a mut Table {
    let entry = t.entry(key.to_string()).or_insert_with(|| Value::Table(Table::new()));
    if !entry.is_table() {
        *entry = Value::Table(Table::new());
    }
    entry.as_table_mut().expect("just made a table")
}

/// Configuration file, then command line.
fn resolve(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut doc: Table = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            text.parse().with_context(|| format!("parsing {}", p.display()))?
        }
        None => Table::new(),
    };
    let mut top = Overrides::default();
    top.usize("n", cli.n);
    top.usize("truncation", cli.truncation);
    top.set("seed", cli.seed.map(|s| s as i64));
    top.path("output", &cli.out);
    top.usize("workers", cli.workers);
    doc.extend(top.0);
    let mut grid = Overrides::default();
    grid.set("half_width", cli.half_width);
    grid.usize("nodes", cli.nodes);
    table_mut(&mut doc, "grid").extend(grid.0);
    let mut time = Overrides::default();
    time.set("period", cli.period);
    time.usize("samples", cli.t_samples);
    table_mut(&mut doc, "time").extend(time.0);
    let mut alpha = Overrides::default();
    alpha.set("re", cli.alpha);
    alpha.set("im", cli.alpha_im);
    table_mut(&mut doc, "alpha").extend(alpha.0);
    for key in ["grid", "time", "alpha"] {
        if doc[key].as_table().is_some_and(|t| t.is_empty()) {
            doc.remove(key);
        }
    }

    let kind = cli.command.kind();
    let exp = table_mut(&mut doc, "experiment");
    if exp.get("kind").and_then(Value::as_str) != Some(kind) {
        exp.clear();
        exp.insert("kind".into(), kind.into());
    }
    exp.extend(cli.command.overrides().0);
    let text = toml::to_string(&doc)?;
    Ok(RunConfig::from_toml(&text)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = resolve(&cli);
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.as_ref().ok().and_then(|c| c.output.clone()))
        .or_else(|| std::env::var_os("GRUSHIN_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let result = cfg.as_ref().map_err(|e| anyhow::anyhow!("{e:#}")).and_then(|c| run(c, &out));
    match result {
        Ok(records) => {
            for r in &records {
                if r.kind == "selftest" {
                    for line in &r.notes {
                        println!("{line}");
                    }
                } else {
                    println!("{}", r.to_json_line().unwrap_or_default());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let line = error_record(cfg.as_ref().ok(), &e);
            eprintln!("{line}");
            if std::fs::create_dir_all(&out).is_ok() {
                use std::io::Write;
                if let Ok(mut f) = std::fs::OpenOptions::new().create(true).append(true).open(out.join(ERRORS_FILE)) {
                    let _ = writeln!(f, "{line}");
                }
            }
            ExitCode::FAILURE
        }
    }
}
