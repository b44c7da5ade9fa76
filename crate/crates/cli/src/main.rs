use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use magg_cli::{run_bigram, run_maintenance, run_quasi_periodic};
use magg_core::costs::cost_chain_report;
use magg_core::io;
use magg_core::models::{
    embed_jump_chain, gen_maintenance, gen_quasi_periodic, gen_random_block_stochastic, gen_toy,
    perturb, MaintenanceRates, PerturbNoise, TextPrep,
};
use magg_core::search::{
    agglomerative_aggregate, exhaustive_aggregate, sequential_aggregate, CostKind, SearchConfig,
};

#[derive(Parser)]
#[command(
    name = "magg",
    version,
    about = "Markov chain aggregation: project a large-alphabet chain onto a small partition\nand approximate it by a higher-order chain, searching for low-cost partitions."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and print the stationary distribution of a chain
    Stationary {
        /// Chain JSON file
        chain: PathBuf,
    },
    /// Evaluate aggregation costs of a partition against a chain
    CostEval(CostEvalArgs),
    /// Search for a partition minimizing an aggregation cost
    Aggregate(AggregateArgs),
    /// Reproduce one of the experiment studies
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Train a letter bi-gram chain from a text corpus
    BigramTrain(BigramTrainArgs),
    /// Generate one of the built-in models
    #[command(subcommand)]
    Generate(GenerateCmd),
}

#[derive(Args)]
struct CostEvalArgs {
    #[arg(long)]
    chain: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    /// Evaluate orders 1..=k
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// Write the reports as JSON here
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum AlgoArg {
    Seq,
    Agglo,
    Exhaustive,
}

#[derive(Copy, Clone, ValueEnum)]
enum CostArg {
    Pred,
    Lump,
}

impl From<CostArg> for CostKind {
    fn from(c: CostArg) -> CostKind {
        match c {
            CostArg::Pred => CostKind::Pred,
            CostArg::Lump => CostKind::Lump,
        }
    }
}

#[derive(Args)]
struct AggregateArgs {
    #[arg(long)]
    chain: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgoArg::Seq)]
    algo: AlgoArg,
    #[arg(long, value_enum, default_value_t = CostArg::Pred)]
    cost: CostArg,
    #[arg(long, default_value_t = 1)]
    order: usize,
    #[arg(long)]
    groups: usize,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long, default_value_t = 100)]
    max_sweeps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allow moves that empty a group
    #[arg(long)]
    allow_empty_groups: bool,
    /// Write the found partition here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the per-restart sweep costs as CSV here
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the cost report as JSON here
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Cluster error probabilities on the quasi-periodic model
    QuasiPeriodic {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Comma-separated epsilon grid
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
        eps: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2])]
        orders: Vec<usize>,
        /// Random initializations per trial
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the CSV table here (stdout otherwise)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate a letter bi-gram model of a corpus
    Bigram {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 4)]
        groups: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2])]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-3)]
        smoothing: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Partition recovery on the maintenance model
    Maintenance {
        #[arg(long, default_value_t = 3)]
        k_min: usize,
        #[arg(long, default_value_t = 7)]
        k_max: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2])]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[command(flatten)]
        rates: RateArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RateArgs {
    #[arg(long, default_value_t = 0.05)]
    lambda0: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda1: f64,
    #[arg(long, default_value_t = 0.3)]
    lambdam: f64,
    #[arg(long, default_value_t = 1.0)]
    mu0: f64,
    #[arg(long, default_value_t = 1.0)]
    mu1: f64,
    #[arg(long, default_value_t = 2.0)]
    mum: f64,
}

impl From<&RateArgs> for MaintenanceRates {
    fn from(r: &RateArgs) -> MaintenanceRates {
        MaintenanceRates {
            lambda_0: r.lambda0,
            lambda_1: r.lambda1,
            lambda_m: r.lambdam,
            mu_0: r.mu0,
            mu_1: r.mu1,
            mu_m: r.mum,
        }
    }
}

#[derive(Args)]
struct BigramTrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    smoothing: f64,
    /// Keep line breaks instead of replacing them by spaces
    #[arg(long)]
    keep_linebreaks: bool,
    /// Regex for chapter-heading lines to drop; pass an empty string to keep all lines
    #[arg(long)]
    strip_headings: Option<String>,
    #[arg(long)]
    out: PathBuf,
    /// Write the alphabet (one character per line, escaped) here
    #[arg(long)]
    alphabet_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// Two blocks that alternate deterministically until perturbed
    QuasiPeriodic {
        #[arg(long, default_value_t = 10)]
        block_size: usize,
        #[arg(long, default_value_t = 0.3)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        partition_out: Option<PathBuf>,
    },
    /// The six-state synthetic toy chain
    Toy {
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random block-stochastic chain with its natural partition
    Block {
        /// Comma-separated block sizes
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        partition_out: Option<PathBuf>,
    },
    /// Embedded jump chain of the maintenance model
    Maintenance {
        /// Number of deterioration steps
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[command(flatten)]
        rates: RateArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        partition_out: Option<PathBuf>,
    },
    /// Embedded jump chain of an arbitrary rate matrix
    JumpChain {
        /// JSON file with {"n_states": N, "rates": [[...], ...]}
        #[arg(long)]
        rates: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(serde::Deserialize)]
struct RateFile {
    n_states: usize,
    rates: Vec<Vec<f64>>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> magg_cli::Result<()> {
    match path {
        Some(p) => fs::write(p, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn run(cli: Cli) -> magg_cli::Result<()> {
    match cli.command {
        Command::Stationary { chain } => {
            let chain = io::read_first_order(&chain)?;
            let mu = chain.stationary_distribution()?;
            for (i, p) in mu.iter().enumerate() {
                println!("{}\t{p}", i + 1);
            }
            Ok(())
        }
        Command::CostEval(args) => {
            let chain = io::read_first_order(&args.chain)?;
            let partition = io::read_partition(&args.partition)?;
            let reports = cost_chain_report(&chain, &partition, args.order)?;
            println!("partition {}", partition.display_groups());
            println!("order\tpred_cost\tlump_cost\tkldr_bracket\tmap_error\tfano_slack");
            for r in &reports {
                println!(
                    "{}\t{:.9}\t{:.9}\t[{}, {:.9}]\t{:.9}\t{:.9}",
                    r.order,
                    r.pred_cost,
                    r.lump_cost,
                    r.kldr_lower,
                    r.kldr_upper,
                    r.map_error,
                    r.fano_slack
                );
            }
            if let Some(path) = &args.json {
                fs::write(
                    path,
                    serde_json::to_string_pretty(&reports).expect("serializable"),
                )?;
            }
            Ok(())
        }
        Command::Aggregate(args) => {
            let chain = io::read_first_order(&args.chain)?;
            let mut config = SearchConfig::new(
                args.cost.into(),
                args.order,
                args.groups,
                args.restarts,
                args.seed,
            );
            config.max_sweeps = args.max_sweeps;
            config.forbid_empty_groups = !args.allow_empty_groups;

            let (partition, report, trace) = match args.algo {
                AlgoArg::Seq => sequential_aggregate(&chain, &config)?,
                AlgoArg::Agglo => agglomerative_aggregate(&chain, &config)?,
                AlgoArg::Exhaustive => {
                    let (partition, report) = exhaustive_aggregate(&chain, &config)?;
                    println!("optimum {}", partition.display_groups());
                    println!(
                        "pred_cost {}\tlump_cost {}",
                        report.pred_cost, report.lump_cost
                    );
                    if let Some(out) = &args.out {
                        io::write_partition(out, &partition)?;
                    }
                    if let Some(path) = &args.report {
                        fs::write(
                            path,
                            serde_json::to_string_pretty(&report).expect("serializable"),
                        )?;
                    }
                    return Ok(());
                }
            };

            println!("found {}", partition.display_groups());
            println!(
                "order {}\tpred_cost {}\tlump_cost {}\tmap_error {}",
                report.order, report.pred_cost, report.lump_cost, report.map_error
            );
            if let Some(out) = &args.out {
                io::write_partition(out, &partition)?;
            }
            if let Some(path) = &args.report {
                fs::write(
                    path,
                    serde_json::to_string_pretty(&report).expect("serializable"),
                )?;
            }
            if let Some(path) = &args.trace {
                let mut csv = String::from("restart,sweep,cost\n");
                for (r, restart) in trace.restarts.iter().enumerate() {
                    for (s, cost) in restart.sweep_costs.iter().enumerate() {
                        csv.push_str(&format!("{r},{s},{cost}\n"));
                    }
                }
                fs::write(path, csv)?;
            }
            Ok(())
        }
        Command::Experiment(cmd) => match cmd {
            ExperimentCmd::QuasiPeriodic {
                trials,
                eps,
                orders,
                restarts,
                seed,
                out,
            } => {
                let result = run_quasi_periodic(trials, &eps, &orders, restarts, seed)?;
                write_or_print(&out, &result.to_csv())
            }
            ExperimentCmd::Bigram {
                corpus,
                groups,
                orders,
                restarts,
                smoothing,
                seed,
            } => {
                let raw = fs::read_to_string(&corpus)?;
                let text = TextPrep::default().apply(&raw);
                let outcome = run_bigram(&text, groups, &orders, restarts, smoothing, seed)?;
                println!(
                    "alphabet size {} over {} characters",
                    outcome.alphabet.len(),
                    text.chars().count()
                );
                print!("{}", outcome.render_table());
                Ok(())
            }
            ExperimentCmd::Maintenance {
                k_min,
                k_max,
                orders,
                restarts,
                rates,
                seed,
                out,
            } => {
                let ks: Vec<usize> = (k_min..=k_max).collect();
                let result = run_maintenance(&ks, &(&rates).into(), &orders, restarts, seed)?;
                write_or_print(&out, &result.to_csv())
            }
        },
        Command::BigramTrain(args) => {
            let raw = fs::read_to_string(&args.corpus)?;
            let prep = TextPrep {
                strip_linebreaks: !args.keep_linebreaks,
                heading_pattern: match args.strip_headings.as_deref() {
                    Some("") => None,
                    Some(pattern) => Some(regex_from(pattern)?),
                    None => TextPrep::default().heading_pattern,
                },
            };
            let text = prep.apply(&raw);
            let (chain, alphabet) = magg_core::models::bigram_train(&text, args.smoothing)?;
            chain.stationary_distribution()?;
            io::write_first_order(&args.out, &chain)?;
            println!(
                "trained {}-state chain from {} characters",
                alphabet.len(),
                text.chars().count()
            );
            if let Some(path) = &args.alphabet_out {
                let listing: String = alphabet
                    .iter()
                    .enumerate()
                    .map(|(i, c)| format!("{}\t{}\n", i + 1, c.escape_default()))
                    .collect();
                fs::write(path, listing)?;
            }
            Ok(())
        }
        Command::Generate(cmd) => match cmd {
            GenerateCmd::QuasiPeriodic {
                block_size,
                epsilon,
                seed,
                out,
                partition_out,
            } => {
                let (base, natural) = gen_quasi_periodic(block_size, seed)?;
                let chain = if epsilon > 0.0 {
                    perturb(&base, epsilon, PerturbNoise::Seed(seed.wrapping_add(1)))?
                } else {
                    base
                };
                io::write_first_order(&out, &chain)?;
                if let Some(p) = partition_out {
                    io::write_partition(p, &natural)?;
                }
                Ok(())
            }
            GenerateCmd::Toy {
                p,
                epsilon,
                seed,
                out,
            } => {
                let chain = gen_toy(p, epsilon, PerturbNoise::Seed(seed))?;
                io::write_first_order(&out, &chain)?;
                Ok(())
            }
            GenerateCmd::Block {
                sizes,
                epsilon,
                seed,
                out,
                partition_out,
            } => {
                let (base, natural) = gen_random_block_stochastic(&sizes, seed)?;
                let chain = if epsilon > 0.0 {
                    perturb(&base, epsilon, PerturbNoise::Seed(seed.wrapping_add(1)))?
                } else {
                    base
                };
                io::write_first_order(&out, &chain)?;
                if let Some(p) = partition_out {
                    io::write_partition(p, &natural)?;
                }
                Ok(())
            }
            GenerateCmd::Maintenance {
                k,
                rates,
                out,
                partition_out,
            } => {
                let (rate_matrix, reference) = gen_maintenance(k, &(&rates).into())?;
                let chain = embed_jump_chain(&rate_matrix)?;
                io::write_first_order(&out, &chain)?;
                if let Some(p) = partition_out {
                    io::write_partition(p, &reference)?;
                }
                Ok(())
            }
            GenerateCmd::JumpChain { rates, out } => {
                let file: RateFile = serde_json::from_str(&fs::read_to_string(&rates)?)
                    .map_err(magg_core::Error::from)?;
                if file.rates.len() != file.n_states
                    || file.rates.iter().any(|r| r.len() != file.n_states)
                {
                    return Err(magg_core::Error::InvalidRates(format!(
                        "expected a {0}x{0} rate matrix",
                        file.n_states
                    ))
                    .into());
                }
                let flat: Vec<f64> = file.rates.concat();
                let matrix = nalgebra::DMatrix::from_row_slice(file.n_states, file.n_states, &flat);
                let rate_matrix = magg_core::models::RateMatrix::from_off_diagonal(matrix)?;
                let chain = embed_jump_chain(&rate_matrix)?;
                io::write_first_order(&out, &chain)?;
                Ok(())
            }
        },
    }
}

fn regex_from(pattern: &str) -> magg_cli::Result<regex::Regex> {
    regex::Regex::new(pattern)
        .map_err(|e| magg_core::Error::InvalidConfig(format!("bad heading regex: {e}")).into())
}
