use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use pup_core::bench::{
    run_method, sensitivity, write_compare_csv, write_records_csv, write_sensitivity_csv, Method, RunOptions,
};
use pup_core::io::{
    generate_rnd, parse_orlib_cap, parse_pmpup, read_native, write_native, write_solution, PmpupOptions, RndSpec,
};
use pup_core::{Error, Instance, SolverParams};

const EXIT_SOLVER: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "pup", version, about = "Exact solvers for the P-median problem with user preferences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance with one method.
    Solve(SolveArgs),
    /// Write a seeded random instance in the native format.
    GenRnd(GenArgs),
    /// Convert an OR-Library or PMPUP file to the native format.
    Convert(ConvertArgs),
    /// Run several methods over every instance in a directory.
    Compare(CompareArgs),
    /// Cost of ignoring preferences for a list of P values.
    Sensitivity(SensitivityArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Native,
    Orlib,
    Pmpup,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Analytic,
    Lp,
}

#[derive(Args)]
struct InputArgs {
    /// Input format; defaults to native.
    #[arg(long, value_enum, default_value = "native")]
    format: Format,
    /// Disutility spread for OR-Library files.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Seed for disutility draws (OR-Library) or instance generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of facilities to open; overrides the file value.
    #[arg(long)]
    p: Option<usize>,
    /// Read PMPUP matrices with one customer per row.
    #[arg(long)]
    customer_major: bool,
    /// Perturb tied disutilities instead of rejecting the instance.
    #[arg(long)]
    break_ties: bool,
}

#[derive(Args)]
struct SolverArgs {
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 7200.0)]
    time_limit: f64,
    /// Skip the greedy starting incumbent.
    #[arg(long)]
    no_greedy: bool,
    /// Solve every node LP from a slack basis.
    #[arg(long)]
    cold_lp: bool,
    /// Lift the size cap on the primal-dual model.
    #[arg(long)]
    allow_large_pdrm: bool,
}

impl SolverArgs {
    fn options(&self, record_log: bool) -> RunOptions {
        let mut opts = RunOptions {
            params: SolverParams {
                time_limit: self.time_limit,
                greedy_start: !self.no_greedy,
                warm_start_lp: !self.cold_lp,
                record_log,
                ..SolverParams::default()
            },
            ..RunOptions::default()
        };
        if self.allow_large_pdrm {
            opts.pdrm_max_size = usize::MAX;
        }
        opts
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, required_unless_present = "gen_rnd", conflicts_with = "gen_rnd")]
    instance: Option<PathBuf>,
    /// Random instance `CUSTOMERS,FACILITIES,DELTA` generated with `--seed`.
    #[arg(long)]
    gen_rnd: Option<String>,
    #[arg(long, default_value = "benders-as")]
    method: String,
    /// Separation route for the decomposition; `lp` turns benders-as into benders-lp.
    #[arg(long, value_enum)]
    route: Option<Route>,
    /// Solution document destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Node log destination (one JSON object per line).
    #[arg(long)]
    log: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    customers: usize,
    #[arg(long)]
    facilities: usize,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    opts: InputArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Directory of instance files (all in the same format).
    #[arg(long)]
    instances: PathBuf,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', default_value = "srm,benders-lp,benders-as")]
    methods: Vec<String>,
    /// Method the ARI and ratio rows are relative to.
    #[arg(long, default_value = "benders-as")]
    baseline: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SensitivityArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Comma-separated P values.
    #[arg(long, value_delimiter = ',', required = true)]
    p_list: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "instance".into(), |s| s.to_string_lossy().into_owned())
}

fn load(path: &Path, args: &InputArgs) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let inst = match args.format {
        Format::Native => {
            let inst: Instance = read_native(&text)?;
            match args.p {
                Some(p) => inst.with_p(p)?,
                None => inst,
            }
        }
        Format::Orlib => {
            let p = args.p.ok_or_else(|| Error::InvalidArgument("--p is required for OR-Library files".into()))?;
            parse_orlib_cap(&text, args.delta, args.seed, p)?
        }
        Format::Pmpup => {
            let opts = PmpupOptions {
                p: args.p,
                instance_id: Some(stem(path)),
                customer_major: args.customer_major,
                break_ties: args.break_ties,
            };
            parse_pmpup(&text, &opts)?
        }
    };
    Ok(inst)
}

fn sink(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn parse_rnd(spec: &str, seed: u64, p: Option<usize>) -> anyhow::Result<RndSpec> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let [ni, nj, delta] = parts.as_slice() else {
        return Err(
            Error::InvalidArgument(format!("--gen-rnd expects CUSTOMERS,FACILITIES,DELTA, got `{spec}`")).into()
        );
    };
    let bad = |what: &str| Error::InvalidArgument(format!("--gen-rnd: bad {what}"));
    let p = p.ok_or_else(|| Error::InvalidArgument("--p is required with --gen-rnd".into()))?;
    Ok(RndSpec {
        n_customers: ni.parse().map_err(|_| bad("customer count"))?,
        n_facilities: nj.parse().map_err(|_| bad("facility count"))?,
        delta: delta.parse().map_err(|_| bad("delta"))?,
        seed,
        p,
    })
}

fn cmd_solve(a: SolveArgs) -> anyhow::Result<()> {
    let mut method: Method = a.method.parse()?;
    match (a.route, method) {
        (Some(Route::Lp), Method::BendersAs) => method = Method::BendersLp,
        (Some(Route::Analytic), Method::BendersLp) => method = Method::BendersAs,
        _ => {}
    }
    let (id, inst, delta) = match (&a.instance, &a.gen_rnd) {
        (Some(path), _) => {
            let delta = matches!(a.input.format, Format::Orlib).then_some(a.input.delta);
            (stem(path), load(path, &a.input)?, delta)
        }
        (None, Some(spec)) => {
            let spec = parse_rnd(spec, a.input.seed, a.input.p)?;
            let id = format!("rnd-{}x{}-d{}-s{}", spec.n_customers, spec.n_facilities, spec.delta, spec.seed);
            (id, generate_rnd(&spec)?, Some(spec.delta))
        }
        (None, None) => bail!(Error::InvalidArgument("either --instance or --gen-rnd is required".into())),
    };
    let opts = a.solver.options(a.log.is_some());
    info!("solving {id} ({}x{}, P={}) with {method}", inst.n_customers(), inst.n_facilities(), inst.p());
    let run = run_method(&id, &inst, delta, method, &opts)?;
    if let Some(path) = &a.out {
        fs::write(path, write_solution(&run.solution_doc())).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &a.log {
        let mut f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        for rec in &run.log {
            writeln!(f, "{}", serde_json::to_string(rec)?)?;
        }
    }
    write_records_csv(io::stdout().lock(), std::slice::from_ref(&run.record))?;
    Ok(())
}

fn cmd_gen(a: GenArgs) -> anyhow::Result<()> {
    let spec = RndSpec { n_customers: a.customers, n_facilities: a.facilities, delta: a.delta, seed: a.seed, p: a.p };
    let inst: Instance = generate_rnd(&spec)?;
    sink(&a.out)?.write_all(write_native(&inst)?.as_bytes())?;
    Ok(())
}

fn cmd_convert(a: ConvertArgs) -> anyhow::Result<()> {
    let inst = load(&a.input, &a.opts)?;
    sink(&a.out)?.write_all(write_native(&inst)?.as_bytes())?;
    Ok(())
}

fn cmd_compare(a: CompareArgs) -> anyhow::Result<()> {
    let methods = a.methods.iter().map(|m| m.parse()).collect::<Result<Vec<Method>, _>>()?;
    let baseline: Method = a.baseline.parse()?;
    let mut paths: Vec<PathBuf> = fs::read_dir(&a.instances)
        .with_context(|| format!("listing {}", a.instances.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!(Error::InvalidArgument(format!("no instance files in {}", a.instances.display())));
    }
    let opts = a.solver.options(false);
    let delta = matches!(a.input.format, Format::Orlib).then_some(a.input.delta);
    let mut records = Vec::new();
    for path in &paths {
        let inst = load(path, &a.input)?;
        for &m in &methods {
            info!("{} / {m}", path.display());
            records.push(run_method(&stem(path), &inst, delta, m, &opts)?.record);
        }
    }
    write_compare_csv(sink(&a.out)?, &records, &methods, baseline)?;
    Ok(())
}

fn cmd_sensitivity(a: SensitivityArgs) -> anyhow::Result<()> {
    let inst = load(&a.instance, &a.input)?;
    let rows = sensitivity(&inst, &a.p_list, &a.solver.options(false))?;
    write_sensitivity_csv(sink(&a.out)?, &rows)?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return if e.is_input_error() { EXIT_INPUT } else { EXIT_SOLVER };
        }
        if cause.downcast_ref::<io::Error>().is_some() {
            return EXIT_INPUT;
        }
    }
    EXIT_SOLVER
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::GenRnd(a) => cmd_gen(a),
        Command::Convert(a) => cmd_convert(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Sensitivity(a) => cmd_sensitivity(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
