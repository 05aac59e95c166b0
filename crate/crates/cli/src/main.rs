//! Command line runner for the sparse-ips experiments.
//!
//! Every subcommand reads an optional JSON config of the form
//! `{"experiment": .., "seed": .., "threads": .., "out_dir": .., "params": {..}}`
//! where all keys are optional and `params` holds the experiment's parameters.
//! Command line flags override the config. The summary JSON is printed to
//! stdout and, with an output directory, written as `summary.json` next to
//! one CSV per curve.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::de::{DeserializeOwned, IgnoredAny};
use serde::Deserialize;
use serde_json::Value;
use sparse_ips::experiments::{self, Report};
use sparse_ips::graphs::{gen_erdos_renyi, gen_lattice_box, gen_random_regular, write_edge_list};
use sparse_ips::Seed;

#[derive(Parser)]
#[command(name = "sparse-ips", version, about = "Interacting particle systems on sparse random graphs")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; required by randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; changes runtime only.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for summary.json and CSV curves.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph and write it as an edge list.
    GraphGen(GraphGen),
    /// Duality transform of a supercritical degree law.
    Duality(DualityArgs),
    /// Ball histograms of a random graph family against its limit tree.
    LwcTest,
    /// Global empirical measure against the limit root law.
    EmpTest,
    /// Component empirical measures in the sub- and supercritical regimes.
    CompEmpTest,
    /// Locality and covariance decay.
    CorrDecay(CorrDecayArgs),
    /// Empirical measure on a finite regular tree against the canopy limit.
    TreeCounterexample,
    /// Lattice boxes against the infinite lattice.
    LatticeTest,
    /// Shift-average variance of a local functional.
    Ergodicity,
    /// Glauber dynamics against exact Gibbs measures.
    GibbsCheck,
    /// Euler-Maruyama convergence on a two-vertex consensus model.
    IntegratorCheck,
}

#[derive(Args)]
#[command(group(ArgGroup::new("generator").required(true).args(["er", "regular", "lattice"])))]
struct GraphGen {
    /// Erdos-Renyi G(n, p).
    #[arg(long, num_args = 2, value_names = ["N", "P"])]
    er: Option<Vec<String>>,
    /// Uniform simple d-regular graph on n vertices.
    #[arg(long, num_args = 2, value_names = ["N", "D"])]
    regular: Option<Vec<usize>>,
    /// Box of radius r in Z^dim, rooted at the origin.
    #[arg(long, num_args = 2, value_names = ["DIM", "R"])]
    lattice: Option<Vec<usize>>,
    /// Write the edge list here instead of stdout.
    #[arg(long)]
    graph_out: Option<PathBuf>,
}

#[derive(Args)]
struct DualityArgs {
    /// Poisson parameter; repeatable.
    #[arg(long)]
    theta: Vec<f64>,
    /// Degree law: `poisson:<theta>`, `dirac:<k>` or `k:p,k:p,...`.
    #[arg(long, conflicts_with = "theta")]
    rho: Option<String>,
}

#[derive(Args)]
struct CorrDecayArgs {
    #[arg(long, value_enum)]
    variant: Option<Variant>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Variant {
    Discrete,
    Diffusion,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile<P> {
    experiment: Option<String>,
    seed: Option<u64>,
    threads: Option<usize>,
    out_dir: Option<PathBuf>,
    variant: Option<Variant>,
    params: Option<P>,
    /// Only for graph-gen: where to write the edge list.
    graph_out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl From<sparse_ips::Error> for Failure {
    fn from(e: sparse_ips::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

/// Global settings after merging the config file with the flags.
struct Settings {
    seed: Option<Seed>,
    out_dir: Option<PathBuf>,
    variant: Option<Variant>,
    graph_out: Option<PathBuf>,
    config: Option<(PathBuf, String)>,
}

impl Settings {
    fn seed(&self, command: &str) -> Result<Seed, Failure> {
        self.seed
            .ok_or_else(|| Failure::Config(format!("{command} is randomized and needs a seed (--seed or \"seed\" in the config)")))
    }

    fn params<P: DeserializeOwned + Default>(&self) -> Result<P, Failure> {
        match &self.config {
            None => Ok(P::default()),
            // parsed again with the typed params so errors point at a line
            Some((path, text)) => {
                let f: ConfigFile<P> = parse_config(path, text)?;
                Ok(f.params.unwrap_or_default())
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::GraphGen(_) => "graph-gen",
        Command::Duality(_) => "duality",
        Command::LwcTest => "lwc-test",
        Command::EmpTest => "emp-test",
        Command::CompEmpTest => "comp-emp-test",
        Command::CorrDecay(_) => "corr-decay",
        Command::TreeCounterexample => "tree-counterexample",
        Command::LatticeTest => "lattice-test",
        Command::Ergodicity => "ergodicity",
        Command::GibbsCheck => "gibbs-check",
        Command::IntegratorCheck => "integrator-check",
    }
}

fn parse_config<P: DeserializeOwned>(path: &Path, text: &str) -> Result<ConfigFile<P>, Failure> {
    // serde_json errors carry "line L column C"
    serde_json::from_str(text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn settle(cli: &Cli) -> Result<Settings, Failure> {
    let name = command_name(&cli.command);
    let config = match &cli.common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            Some((path.clone(), text))
        }
        None => None,
    };
    let (mut seed, mut threads, mut out_dir, mut variant, mut graph_out) = (None, None, None, None, None);
    if let Some((path, text)) = &config {
        let f: ConfigFile<IgnoredAny> = parse_config(path, text)?;
        if let Some(exp) = &f.experiment {
            if exp != name {
                return Err(Failure::Config(format!("config is for experiment {exp:?}, command is {name:?}")));
            }
        }
        (seed, threads, out_dir, variant, graph_out) = (f.seed, f.threads, f.out_dir, f.variant, f.graph_out);
    }
    seed = cli.common.seed.or(seed);
    threads = cli.common.threads.or(threads);
    out_dir = cli.common.out_dir.clone().or(out_dir);
    if let Command::CorrDecay(a) = &cli.command {
        variant = a.variant.or(variant);
    }
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    Ok(Settings {
        seed,
        out_dir,
        variant,
        graph_out,
        config,
    })
}

fn graph_gen(args: &GraphGen, s: &Settings) -> Result<(), Failure> {
    let (graph, root) = if let Some(er) = &args.er {
        let n: usize = er[0].parse().map_err(|e| Failure::Config(format!("--er n {:?}: {e}", er[0])))?;
        let p: f64 = er[1].parse().map_err(|e| Failure::Config(format!("--er p {:?}: {e}", er[1])))?;
        // with p in {0, 1} the graph does not depend on the seed
        let seed = if p == 0.0 || p == 1.0 { s.seed.unwrap_or(0) } else { s.seed("graph-gen")? };
        (gen_erdos_renyi(n, p, seed)?, None)
    } else if let Some(r) = &args.regular {
        (gen_random_regular(r[0], r[1], s.seed("graph-gen")?)?.graph, None)
    } else if let Some(l) = &args.lattice {
        let rg = gen_lattice_box(l[0], l[1])?;
        let root = rg.root();
        (rg.into_graph(), Some(root))
    } else {
        unreachable!("clap requires one generator")
    };
    match args.graph_out.as_ref().or(s.graph_out.as_ref()) {
        Some(path) => {
            let mut f = io::BufWriter::new(fs::File::create(path)?);
            write_edge_list(&mut f, &graph, root)?;
            f.flush()?;
        }
        None => {
            let mut out = io::BufWriter::new(io::stdout().lock());
            write_edge_list(&mut out, &graph, root)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn run_experiment(command: &Command, s: &Settings) -> Result<Report, Failure> {
    let name = command_name(command);
    Ok(match command {
        Command::GraphGen(_) => unreachable!("handled separately"),
        Command::Duality(a) => {
            let mut p: experiments::DualityParams = s.params()?;
            if !a.theta.is_empty() {
                p.thetas = a.theta.clone();
                p.rho = None;
            }
            if a.rho.is_some() {
                p.rho = a.rho.clone();
            }
            experiments::duality(&p, s.seed.unwrap_or(0))?
        }
        Command::LwcTest => experiments::lwc_test(&s.params()?, s.seed(name)?)?,
        Command::EmpTest => experiments::emp_test(&s.params()?, s.seed(name)?)?,
        Command::CompEmpTest => experiments::comp_emp_test(&s.params()?, s.seed(name)?)?,
        Command::CorrDecay(_) => match s.variant.unwrap_or(Variant::Discrete) {
            Variant::Discrete => experiments::corr_decay_discrete(&s.params()?, s.seed(name)?)?,
            Variant::Diffusion => experiments::corr_decay_diffusion(&s.params()?, s.seed(name)?)?,
        },
        Command::TreeCounterexample => experiments::tree_counterexample(&s.params()?, s.seed(name)?)?,
        Command::LatticeTest => experiments::lattice_test(&s.params()?, s.seed(name)?)?,
        Command::Ergodicity => experiments::ergodicity(&s.params()?, s.seed(name)?)?,
        Command::GibbsCheck => experiments::gibbs_check(&s.params()?, s.seed(name)?)?,
        Command::IntegratorCheck => experiments::integrator_check(&s.params()?, s.seed(name)?)?,
    })
}

fn summary_json(report: &Report, seed: Option<Seed>) -> Result<String, Failure> {
    let mut v = serde_json::to_value(report).map_err(|e| Failure::Config(e.to_string()))?;
    if seed.is_none() {
        v["seed"] = Value::Null;
    }
    let mut text = serde_json::to_string_pretty(&v).map_err(|e| Failure::Config(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn write_artifacts(dir: &Path, summary: &str, report: &Report) -> Result<(), Failure> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("summary.json"), summary)?;
    for curve in &report.curves {
        let file: String = curve
            .name
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        let mut f = io::BufWriter::new(fs::File::create(dir.join(format!("{file}.csv")))?);
        curve.write_csv(&mut f)?;
        f.flush()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let settings = settle(cli)?;
    if let Command::GraphGen(args) = &cli.command {
        graph_gen(args, &settings)?;
        return Ok(true);
    }
    let report = run_experiment(&cli.command, &settings)?;
    let summary = summary_json(&report, settings.seed)?;
    if let Some(dir) = &settings.out_dir {
        write_artifacts(dir, &summary, &report)?;
    }
    io::stdout().lock().write_all(summary.as_bytes())?;
    for c in report.failed_checks() {
        eprintln!("failed: {} = {} ({} {})", c.name, c.value, c.relation, c.bound);
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            match &f {
                Failure::Config(m) => eprintln!("error: {m}"),
                Failure::Numerical(m) => eprintln!("numerical abort: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
