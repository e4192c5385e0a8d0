//! Command-line front end: generate instances, train and sample the network,
//! evaluate schemes, run the exhaustive oracle, export MILP files and run
//! benchmarks.
//!
//! Exit codes: 0 success, 2 infeasible or no feasible sample, 3 malformed or
//! mismatched input file, 1 any other error.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use edgecloud::baselines::{brute_force, BruteForceBudget, UniformSampler};
use edgecloud::bench::{bench, generalize, write_sweep_csv, Axis, Policy, SweepConfig};
use edgecloud::gen::{family_member, family_topology, generate_independent, GenConfig};
use edgecloud::gssn::{load_model, preprocess, save_model, train, Architecture, GssnModel, TrainConfig};
use edgecloud::milp::{linearize, read_solution_file, write_lp_file, write_warmstart_file};
use edgecloud::model::io::{read_instance, read_instance_dir, read_scheme, write_instance, write_scheme};
use edgecloud::model::{compute_flows, FeasibilityReport, OptionTable};
use edgecloud::rng::{self, SAMPLE_STREAM_BASE};
use edgecloud::sampling::best_of;
use edgecloud::{Error, Result};

#[derive(Parser)]
#[command(name = "edgecloud", version, about = "Edge-cloud traffic scheduling under 95th-percentile billing")]
struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// JSON file with generator or training settings (fields as in the
    /// library's GenConfig / TrainConfig); command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path (file or directory, depending on the command).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instance files and a manifest.csv.
    Gen(GenArgs),
    /// Train a sampling network.
    Train(TrainArgs),
    /// Draw schemes for one instance and keep the cheapest feasible one.
    Sample(SampleArgs),
    /// Cost and feasibility of a scheme.
    Eval(EvalArgs),
    /// Exhaustive search for the optimal scheme of a tiny instance.
    Oracle(OracleArgs),
    /// Write the linearized model in LP format, optionally with a start file.
    ExportMilp(ExportArgs),
    /// Read a solver solution back into a verified scheme.
    ImportSolution(ImportArgs),
    /// Best-of-M benchmark over a directory of instances.
    Bench(BenchArgs),
    /// Generalization sweep over slot or user counts.
    Generalize(GeneralizeArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    slots: Option<usize>,
    #[arg(long)]
    types: Option<usize>,
    #[arg(long)]
    links: Option<usize>,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Index of the first family member to generate.
    #[arg(long, default_value_t = 0)]
    first: usize,
    /// Draw static parameters independently for every instance.
    #[arg(long)]
    independent: bool,
}

#[derive(Args)]
struct TrainArgs {
    /// Directory of training instances.
    #[arg(long)]
    instances: PathBuf,
    /// Directory of held-out instances for the validation curve.
    #[arg(long)]
    validation: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    tau_start: Option<f64>,
    #[arg(long)]
    tau_end: Option<f64>,
    /// Penalty weight of inequality violations.
    #[arg(long)]
    lambda_g: Option<f64>,
    /// Penalty weight of equality violations.
    #[arg(long)]
    lambda_h: Option<f64>,
    /// Loss-history CSV path.
    #[arg(long, default_value = "loss_history.csv")]
    history: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Gssn,
    Rsn,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "gssn")]
    policy: PolicyArg,
    /// Model file (required for the gssn policy).
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    scheme: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Maximum number of joint combinations to enumerate.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u128,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Scheme to turn into a start file.
    #[arg(long)]
    warmstart: Option<PathBuf>,
    /// Start file path (defaults to the LP path with a .mst extension).
    #[arg(long)]
    start_out: Option<PathBuf>,
}

#[derive(Args)]
struct ImportArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    instances: PathBuf,
    #[arg(long, value_enum, default_value = "gssn")]
    policy: PolicyArg,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Samples per problem (M).
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Add a wall-time column (makes the CSV run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct GeneralizeArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum)]
    axis: AxisArg,
    /// Comma-separated grid values, e.g. 12,24,48.
    #[arg(long, value_delimiter = ',', required = true)]
    grid: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    per_point: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// First family member used on the slots axis.
    #[arg(long, default_value_t = 1000)]
    first_member: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Slots,
    Users,
}

/// Failure of a command, mapped to an exit code.
enum Failure {
    NoFeasible(String),
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io { path: p.to_path_buf(), source: e })?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Format { context: format!("config {}", p.display()), message: e.to_string() })
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

fn gen_config(cli: &Cli, args: &GenArgs) -> Result<GenConfig> {
    let mut cfg: GenConfig = load_config(cli.config.as_deref())?;
    cfg.seed = cli.seed;
    if let Some(v) = args.users {
        cfg.n_users = v;
    }
    if let Some(v) = args.slots {
        cfg.n_slots = v;
    }
    if let Some(v) = args.types {
        cfg.n_types = v;
    }
    if let Some(v) = args.links {
        cfg.n_links = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> CmdResult {
    let cfg = gen_config(cli, args)?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("instances"));
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
    let instances = if args.independent {
        generate_independent(&cfg, args.count)?
    } else {
        let topology = family_topology(&cfg)?;
        (args.first..args.first + args.count).map(|j| family_member(&topology, &cfg, j)).collect::<Result<Vec<_>>>()?
    };
    let manifest = dir.join("manifest.csv");
    let mut w = csv::Writer::from_writer(create(&manifest)?);
    let csv_err = |e: csv::Error| Error::Format { context: "manifest".into(), message: e.to_string() };
    w.write_record(["id", "seed", "N", "T"]).map_err(csv_err)?;
    for inst in &instances {
        write_instance(inst, dir.join(format!("{}.json", inst.id)))?;
        w.write_record([
            inst.id.clone(),
            inst.seed.to_string(),
            inst.topology.n_users.to_string(),
            inst.topology.n_slots.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io { path: manifest, source: e })?;
    println!("wrote {} instances to {}", instances.len(), dir.display());
    Ok(())
}

fn cmd_train(cli: &Cli, args: &TrainArgs) -> CmdResult {
    let mut cfg: TrainConfig = load_config(cli.config.as_deref())?;
    cfg.seed = cli.seed;
    if let Some(v) = args.epochs {
        cfg.epochs = v;
    }
    if let Some(v) = args.learning_rate {
        cfg.learning_rate = v;
    }
    if let Some(v) = args.tau_start {
        cfg.tau_start = v;
    }
    if let Some(v) = args.tau_end {
        cfg.tau_end = v;
    }
    if let Some(v) = args.lambda_g {
        cfg.loss.inequality = v;
    }
    if let Some(v) = args.lambda_h {
        cfg.loss.equality = v;
    }
    let instances = read_instance_dir(&args.instances)?;
    let validation = match &args.validation {
        Some(dir) => read_instance_dir(dir)?,
        None => Vec::new(),
    };
    let n_links = instances.first().map_or(4, |i| i.topology.n_links);
    let arch = Architecture { n_links, ..Architecture::default() };
    let mut model = GssnModel::init(arch, &mut rng::stream(cfg.seed, rng::INIT_STREAM))?;
    let history = train(&mut model, &instances, &validation, &cfg)?;
    let model_path = cli.out.clone().unwrap_or_else(|| PathBuf::from("model.json"));
    save_model(&model, &model_path)?;
    let mut w = csv::Writer::from_writer(create(&args.history)?);
    let csv_err = |e: csv::Error| Error::Format { context: "loss history".into(), message: e.to_string() };
    w.write_record(["epoch", "tau", "train_loss", "validation_loss"]).map_err(csv_err)?;
    for e in &history.epochs {
        w.write_record([
            e.epoch.to_string(),
            e.tau.to_string(),
            e.train_loss.to_string(),
            e.validation_loss.map(|v| v.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io { path: args.history.clone(), source: e })?;
    if let Some(last) = history.epochs.last() {
        println!("epoch {}: train loss {}", last.epoch, last.train_loss);
    }
    println!("model written to {}", model_path.display());
    Ok(())
}

fn need_model(model: &Option<PathBuf>) -> Result<GssnModel> {
    let path = model.as_ref().ok_or_else(|| Error::InvalidConfig("--model is required for the gssn policy".into()))?;
    load_model(path)
}

fn cmd_sample(cli: &Cli, args: &SampleArgs) -> CmdResult {
    let instance = read_instance(&args.instance)?;
    let table = OptionTable::build(&instance.topology)?;
    let mut rng = rng::stream(cli.seed, SAMPLE_STREAM_BASE);
    let result = match args.policy {
        PolicyArg::Gssn => {
            let model = need_model(&args.model)?;
            let alpha = model.forward_alpha(&preprocess(&instance, &table))?;
            best_of(&alpha, &instance, &table, args.samples, &mut rng)?
        }
        PolicyArg::Rsn => best_of(&UniformSampler::new(&instance, &table), &instance, &table, args.samples, &mut rng)?,
    };
    println!("feasible samples: {}/{}", result.n_feasible, result.n_samples);
    let (scheme, cost) = result.best.ok_or_else(|| Failure::NoFeasible("no feasible sample".into()))?;
    println!("best cost: {cost}");
    write_scheme(&scheme, cli.out.clone().unwrap_or_else(|| PathBuf::from("scheme.json")))?;
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> CmdResult {
    let instance = read_instance(&args.instance)?;
    let scheme = read_scheme(&args.scheme)?;
    let table = OptionTable::build(&instance.topology)?;
    let flows = compute_flows(&instance, &table, &scheme)?;
    let report = FeasibilityReport::from_flows(&instance, &flows);
    println!("cost: {}", flows.cost_total);
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if !report.feasible {
        return Err(Failure::NoFeasible(format!("{} constraint violations", report.count())));
    }
    Ok(())
}

fn cmd_oracle(cli: &Cli, args: &OracleArgs) -> CmdResult {
    let instance = read_instance(&args.instance)?;
    let result = brute_force(&instance, BruteForceBudget { max_combinations: args.budget })?;
    println!("combinations: {}, evaluated: {}", result.n_combinations, result.n_evaluated);
    let (scheme, cost) = result.best.ok_or_else(|| Failure::NoFeasible("no feasible scheme exists".into()))?;
    println!("optimal cost: {cost}");
    write_scheme(&scheme, cli.out.clone().unwrap_or_else(|| PathBuf::from("optimal_scheme.json")))?;
    Ok(())
}

fn cmd_export(cli: &Cli, args: &ExportArgs) -> CmdResult {
    let instance = read_instance(&args.instance)?;
    let model = linearize(&instance)?;
    let lp_path = cli.out.clone().unwrap_or_else(|| PathBuf::from("model.lp"));
    write_lp_file(&model, &lp_path)?;
    println!(
        "{}: {} variables ({} binary), {} constraints",
        lp_path.display(),
        model.variables.len(),
        model.n_binaries(),
        model.constraints.len()
    );
    if let Some(scheme_path) = &args.warmstart {
        let scheme = read_scheme(scheme_path)?;
        let start = args.start_out.clone().unwrap_or_else(|| lp_path.with_extension("mst"));
        write_warmstart_file(&model, &instance, &scheme, &start)?;
        println!("start file: {}", start.display());
    }
    Ok(())
}

fn cmd_import(cli: &Cli, args: &ImportArgs) -> CmdResult {
    let instance = read_instance(&args.instance)?;
    let import = read_solution_file(&args.solution, &instance)?;
    println!("reported objective: {}, recomputed cost: {}", import.reported_objective, import.cost);
    write_scheme(&import.scheme, cli.out.clone().unwrap_or_else(|| PathBuf::from("solution_scheme.json")))?;
    Ok(())
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> CmdResult {
    let instances = read_instance_dir(&args.instances)?;
    let model;
    let policy = match args.policy {
        PolicyArg::Gssn => {
            model = need_model(&args.model)?;
            Policy::Gssn(&model)
        }
        PolicyArg::Rsn => Policy::Rsn,
    };
    let report = bench(&instances, policy, args.samples, cli.seed)?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(format!("bench_{}.csv", report.policy)));
    report.write_csv(create(&out)?, args.timing)?;
    let fmt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"));
    println!(
        "{}: mean cost {}, std {}, SSFR {:.4}, PFR {:.4} ({} problems x {} samples)",
        report.policy,
        fmt(report.mean_cost),
        fmt(report.std_cost),
        report.ssfr,
        report.pfr,
        report.rows.len(),
        args.samples
    );
    if report.pfr == 0.0 {
        return Err(Failure::NoFeasible("no problem has a feasible sample".into()));
    }
    Ok(())
}

fn cmd_generalize(cli: &Cli, args: &GeneralizeArgs) -> CmdResult {
    let model = load_model(&args.model)?;
    let mut gen: GenConfig = load_config(cli.config.as_deref())?;
    gen.seed = cli.seed;
    gen.n_links = model.arch.n_links;
    let config = SweepConfig {
        axis: match args.axis {
            AxisArg::Slots => Axis::Slots,
            AxisArg::Users => Axis::Users,
        },
        grid: args.grid.clone(),
        per_point: args.per_point,
        samples: args.samples,
        gen,
        first_member: args.first_member,
    };
    let points = generalize(&model, &config, cli.seed)?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("generalize.csv"));
    write_sweep_csv(&points, create(&out)?)?;
    for p in &points {
        println!(
            "{:>5} {:>4}: mean cost {:>12}  SSFR {:.4}  PFR {:.4}",
            p.value,
            p.policy,
            p.mean_cost.map_or_else(|| "n/a".to_string(), |v| format!("{v:.2}")),
            p.ssfr,
            p.pfr
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(&cli, a),
        Command::Train(a) => cmd_train(&cli, a),
        Command::Sample(a) => cmd_sample(&cli, a),
        Command::Eval(a) => cmd_eval(a),
        Command::Oracle(a) => cmd_oracle(&cli, a),
        Command::ExportMilp(a) => cmd_export(&cli, a),
        Command::ImportSolution(a) => cmd_import(&cli, a),
        Command::Bench(a) => cmd_bench(&cli, a),
        Command::Generalize(a) => cmd_generalize(&cli, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NoFeasible(msg)) => {
            eprintln!("infeasible: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_format_error() { 3 } else { 1 })
        }
    }
}
