use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use betarisk_core::io::{load_network, network_to_string, render_matrices, render_risk_series};
use betarisk_core::{
    evaluate_request_with, fixture_three_node_with_variance, fuse, fusion_weights, generate_network, moments_to_beta,
    posterior_params, run_assessment_with, BetaCombiner, CombineMethod, DecisionOutcome, PriorSource, RiskAppetite,
    ScenarioConfig, TrustCombiner, TrustEstimate, TrustValue,
};

const EXIT_ERROR: u8 = 1;
const EXIT_DECLINE: u8 = 2;

#[derive(Parser)]
#[command(name = "betarisk", version, about = "Trust fusion and risk assessment for node networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fuse a direct and an indirect trust estimate and print every intermediate.
    Fuse(FuseArgs),
    /// Decide whether to accept a job with required trust T.
    Decide(DecideArgs),
    /// Generate (or load) a network, assess every edge and write reports.
    Simulate(SimulateArgs),
    /// Assess the three-node reference network and print its five matrices.
    #[command(name = "reproduce-table1")]
    ReproduceTable1(ReproduceArgs),
}

#[derive(Args)]
struct VarianceArgs {
    /// Variance for both estimates.
    #[arg(long = "var", env = "BETARISK_DEFAULT_VARIANCE", default_value_t = betarisk_core::DEFAULT_VARIANCE)]
    var: f64,
    /// Variance of the direct estimate (overrides --var).
    #[arg(long = "var-a")]
    var_a: Option<f64>,
    /// Variance of the indirect estimate (overrides --var).
    #[arg(long = "var-b")]
    var_b: Option<f64>,
}

impl VarianceArgs {
    fn estimates(&self, a: f64, b: f64) -> Result<(TrustEstimate, TrustEstimate), String> {
        let direct = TrustEstimate::new(a, self.var_a.unwrap_or(self.var)).map_err(|e| format!("direct trust: {e}"))?;
        let indirect =
            TrustEstimate::new(b, self.var_b.unwrap_or(self.var)).map_err(|e| format!("indirect trust: {e}"))?;
        Ok((direct, indirect))
    }
}

#[derive(Args)]
struct FuseArgs {
    /// Direct trust mean.
    #[arg(long)]
    a: f64,
    /// Indirect trust mean.
    #[arg(long)]
    b: f64,
    #[command(flatten)]
    variance: VarianceArgs,
    /// Which estimate acts as the prior.
    #[arg(long, default_value = "direct", value_parser = parse_prior)]
    prior: PriorSource,
}

#[derive(Args)]
struct DecideArgs {
    /// Required trust for the job.
    #[arg(long)]
    t: f64,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[command(flatten)]
    variance: VarianceArgs,
    /// Largest risk the node accepts.
    #[arg(long, default_value_t = 0.0)]
    appetite: f64,
    #[arg(long, default_value = "beta")]
    method: CombineMethod,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long, default_value_t = betarisk_core::netsim::FIFTEEN_NODE_SEED)]
    seed: u64,
    #[arg(long = "edge-prob", default_value_t = 0.3)]
    edge_prob: f64,
    #[arg(long = "var", env = "BETARISK_DEFAULT_VARIANCE", default_value_t = betarisk_core::DEFAULT_VARIANCE)]
    var: f64,
    #[arg(long, default_value_t = 0.0)]
    appetite: f64,
    #[arg(long, default_value = "beta")]
    method: CombineMethod,
    /// Use the three-node reference network instead of a random one.
    #[arg(long, conflicts_with = "network")]
    table1: bool,
    /// Assess a network document instead of generating one.
    #[arg(long)]
    network: Option<PathBuf>,
    /// Output directory for matrices.csv, risk_series.csv and network.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(long, default_value = "beta")]
    method: CombineMethod,
    #[arg(long = "var", env = "BETARISK_DEFAULT_VARIANCE", default_value_t = betarisk_core::DEFAULT_VARIANCE)]
    var: f64,
}

fn parse_prior(s: &str) -> Result<PriorSource, String> {
    match s {
        "direct" | "a" => Ok(PriorSource::Direct),
        "indirect" | "b" => Ok(PriorSource::Indirect),
        other => Err(format!("unknown prior `{other}` (expected direct or indirect)")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Fuse(args) => cmd_fuse(&args),
        Command::Decide(args) => cmd_decide(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::ReproduceTable1(args) => cmd_reproduce_table1(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn cmd_fuse(args: &FuseArgs) -> Result<ExitCode, String> {
    let (direct, indirect) = args.variance.estimates(args.a, args.b)?;
    let direct_params =
        moments_to_beta(&direct).map_err(|e| format!("moment inversion for direct trust (alpha_a, beta_a): {e}"))?;
    let indirect_params = moments_to_beta(&indirect)
        .map_err(|e| format!("moment inversion for indirect trust (alpha_b, beta_b): {e}"))?;
    let (prior, likelihood) = match args.prior {
        PriorSource::Direct => (direct_params, indirect_params),
        PriorSource::Indirect => (indirect_params, direct_params),
    };
    posterior_params(&prior, &likelihood).map_err(|e| format!("posterior combination: {e}"))?;
    fusion_weights(&prior, &likelihood).map_err(|e| format!("fusion weights (K): {e}"))?;
    let report = fuse(&direct, &indirect, args.prior).map_err(|e| e.to_string())?;

    println!("alpha_a: {:.6}", report.direct.alpha());
    println!("beta_a: {:.6}", report.direct.beta());
    println!("alpha_b: {:.6}", report.indirect.alpha());
    println!("beta_b: {:.6}", report.indirect.beta());
    println!("k: {:.6}", report.weights.k);
    println!("w_a: {:.6}", report.weight_direct());
    println!("w_b: {:.6}", report.weight_indirect());
    println!("c: {:.6}", report.combined.get());
    Ok(ExitCode::SUCCESS)
}

fn cmd_decide(args: &DecideArgs) -> Result<ExitCode, String> {
    let required = TrustValue::new(args.t).map_err(|e| format!("required trust: {e}"))?;
    let (direct, indirect) = args.variance.estimates(args.a, args.b)?;
    let appetite = RiskAppetite::new(args.appetite).map_err(|e| e.to_string())?;
    let record = evaluate_request_with(args.method.combiner(), required, direct, indirect, appetite)
        .map_err(|e| format!("combined trust: {e}"))?;

    println!("decision: {}", record.decision.name());
    match record.combined {
        Some(c) => println!("c: {:.6}", c.get()),
        None => println!("c: -"),
    }
    println!("r: {:.6}", record.risk);
    Ok(match record.decision {
        DecisionOutcome::Decline(_) => ExitCode::from(EXIT_DECLINE),
        _ => ExitCode::SUCCESS,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<ExitCode, String> {
    let appetite = RiskAppetite::new(args.appetite).map_err(|e| e.to_string())?;
    let network = if args.table1 {
        if let Some(n) = args.nodes.filter(|&n| n != 3) {
            return Err(format!("--table1 describes 3 nodes, got --nodes {n}"));
        }
        let mut net = fixture_three_node_with_variance(args.var).map_err(|e| e.to_string())?;
        net.set_all_appetites(appetite);
        net
    } else if let Some(path) = &args.network {
        load_network(path).map_err(|e| e.to_string())?
    } else {
        let config = ScenarioConfig {
            seed: args.seed,
            node_count: args.nodes.unwrap_or(15),
            edge_probability: args.edge_prob,
            variance_direct: args.var,
            variance_indirect: args.var,
            appetite,
        };
        generate_network(&config).map_err(|e| e.to_string())?
    };

    let combiner = args.method.combiner();
    let result = run_assessment_with(&network, combiner);
    for err in &result.errors {
        eprintln!("warning: {err}");
    }

    fs::create_dir_all(&args.out).map_err(|e| format!("{}: {e}", args.out.display()))?;
    let comments = vec![format!("method: {}", combiner.name())];
    write_file(&args.out.join("matrices.csv"), &render_matrices(&result, &comments))?;
    write_file(&args.out.join("risk_series.csv"), &render_risk_series(&result))?;
    write_file(&args.out.join("network.json"), &network_to_string(&network))?;

    let s = result.summary();
    println!("nodes: {}", network.node_count());
    println!("edges: {}", s.edges);
    println!("accept_direct: {}", s.accept_direct);
    println!("accept_indirect: {}", s.accept_indirect);
    println!("accept_combined: {}", s.accept_combined);
    println!("accept_with_risk: {}", s.accept_with_risk);
    println!("declined: {}", s.declined);
    println!("failed: {}", s.failed);
    Ok(ExitCode::SUCCESS)
}

fn cmd_reproduce_table1(args: &ReproduceArgs) -> Result<ExitCode, String> {
    let network = fixture_three_node_with_variance(args.var).map_err(|e| e.to_string())?;
    let combiner = args.method.combiner();
    let result = run_assessment_with(&network, combiner);
    for err in &result.errors {
        eprintln!("warning: {err}");
    }
    let comments = match args.method {
        CombineMethod::Beta => vec![
            format!("method: {} (direct trust as prior)", BetaCombiner::default().name()),
            format!("variance: direct={} indirect={}", args.var, args.var),
        ],
        CombineMethod::Average => vec![format!("method: {} (unweighted mean of A and B)", combiner.name())],
    };
    print!("{}", render_matrices(&result, &comments));
    Ok(ExitCode::SUCCESS)
}
