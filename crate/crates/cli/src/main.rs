//! `rsd-market` command-line front end.
//!
//! Exit codes: 0 success, 1 acceptance criteria failed, 2 usage error,
//! 3 precondition or domain error, 4 internal invariant breach.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use config::{pick, pick_parsed, resolve_seed, FileConfig};
use rsd_market::equilibrium::{
    brute_force_optimal, ce_prices, interim_feasibility_check, optimal_assignment, verify_ce,
};
use rsd_market::market::{total_welfare, utilities, Allocation, Outcome};
use rsd_market::mechanisms::{
    expost_ce_transfers, expost_pairwise_transfers, interim_transfers, rsd, rsd_then_ttc,
    serial_dictatorship, AgentModel, PairwiseMode, TradePolicy, TransactionCost,
};
use rsd_market::simulate::{
    batch_run, SimConfig, SimReport, SweepRow, WealthModel,
};
use rsd_market::strategic::{
    first_mover_expected_utility, optimal_offer, OfferDomain, TwoAgentGame, ValueDistribution,
};
use rsd_market::suite::{run_suite, SuiteOptions};
use rsd_market::{scenarios, Error, Market, MarketInstance, NumericMode, PickOrder, Result};

/// Version of every JSON document this tool writes.
const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "rsd-market", version, about = "Serial dictatorship with monetary transfers")]
struct Cli {
    /// Config file: JSON or `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized commands; defaults to $RSD_MARKET_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    numeric_mode: Option<ModeArg>,
    /// Worker threads for batch runs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Repeat for more progress output on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Integer,
    Real,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an allocation mechanism.
    #[command(subcommand)]
    Mech(MechCommand),
    /// Competitive-equilibrium prices.
    #[command(subcommand)]
    Equilibrium(EquilibriumCommand),
    /// Brute-force welfare optimum.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Two-agent Bayesian offer analysis.
    #[command(subcommand, name = "two-agent")]
    TwoAgent(TwoAgentCommand),
    /// Housing-market simulation.
    #[command(subcommand)]
    Sim(SimCommand),
    /// Run the acceptance criteria.
    Acceptance(AcceptanceArgs),
}

#[derive(Debug, Subcommand)]
enum MechCommand {
    Run(MechArgs),
}

#[derive(Debug, Subcommand)]
enum EquilibriumCommand {
    Solve(SolveArgs),
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    Check(SolveArgs),
}

#[derive(Debug, Subcommand)]
enum TwoAgentCommand {
    /// Optimal offer of the agent holding the item it wants less.
    Solve(OfferArgs),
    /// First mover's expected utility from each pick.
    FirstMover(FirstMoverArgs),
}

#[derive(Debug, Subcommand)]
enum SimCommand {
    /// Replications of the housing market; writes report.json, deltas.csv
    /// and trades.csv.
    Housing(HousingArgs),
    /// One replication per transaction cost; writes sweep.csv.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
struct InstanceArgs {
    /// Built-in market by name.
    #[arg(long, conflicts_with = "instance")]
    scenario: Option<String>,
    /// Market JSON file.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Pick order, comma-separated agent ids.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mechanism {
    /// Serial dictatorship in the given order (identity by default).
    Sd,
    /// Serial dictatorship in a seeded random order.
    Rsd,
    /// Truthful picks followed by top trading cycles.
    Ttc,
    /// Picks reallocated at competitive-equilibrium prices.
    Ce,
    /// Picks followed by pairwise trades.
    Pairwise,
    /// Trades during the picking.
    Interim,
}

#[derive(Debug, Clone, Args)]
struct PolicyArgs {
    /// Buyer's share of the trade surplus paid to the seller, in [0, 1].
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    seller_floor: Option<bool>,
    /// fixed-point or single-pass.
    #[arg(long)]
    pairwise_mode: Option<PairwiseMode>,
    #[arg(long)]
    budget_enforced: Option<bool>,
    /// none, fixed:X or prop:R.
    #[arg(long)]
    tau: Option<TransactionCost>,
}

#[derive(Debug, Clone, Args)]
struct MechArgs {
    #[arg(long, value_enum)]
    mechanism: Option<Mechanism>,
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    /// myopic or lookback.
    #[arg(long)]
    agent_model: Option<AgentModel>,
}

#[derive(Debug, Clone, Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
}

#[derive(Debug, Clone, Args)]
struct OfferArgs {
    /// Agent 1's value distribution for the item it holds.
    #[arg(long, default_value = "uniform:0,1")]
    held: ValueDistribution,
    /// Agent 1's value distribution for the item offered to it.
    #[arg(long, default_value = "uniform:0,1")]
    received: ValueDistribution,
    /// Offerer's value for the item it wants.
    #[arg(long, allow_hyphen_values = true)]
    v_want: f64,
    /// Offerer's value for the item it holds.
    #[arg(long, allow_hyphen_values = true)]
    v_hold: f64,
    /// nonnegative or symmetric.
    #[arg(long)]
    domain: Option<OfferDomain>,
}

#[derive(Debug, Clone, Args)]
struct FirstMoverArgs {
    #[arg(long, allow_hyphen_values = true)]
    v1a: f64,
    #[arg(long, allow_hyphen_values = true)]
    v1b: f64,
    /// Distribution of every unknown value.
    #[arg(long, default_value = "uniform:0,1")]
    dist: ValueDistribution,
    #[arg(long)]
    f1a: Option<ValueDistribution>,
    #[arg(long)]
    f1b: Option<ValueDistribution>,
    #[arg(long)]
    f2a: Option<ValueDistribution>,
    #[arg(long)]
    f2b: Option<ValueDistribution>,
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    domain: Option<OfferDomain>,
}

#[derive(Debug, Clone, Args)]
struct SimArgs {
    #[arg(long)]
    agents: Option<usize>,
    /// equal:AMOUNT or powerlaw:GROUPS,BASE,PER_GROUP.
    #[arg(long)]
    wealth: Option<WealthModel>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    seller_floor: Option<bool>,
    #[arg(long)]
    pairwise_mode: Option<PairwiseMode>,
    #[arg(long)]
    budget_enforced: Option<bool>,
    /// Discount public values by the resale cost when picking.
    #[arg(long)]
    cost_aware_augmentation: Option<bool>,
}

#[derive(Debug, Clone, Args)]
struct HousingArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// none, fixed:X or prop:R.
    #[arg(long)]
    tau: Option<TransactionCost>,
    #[arg(long)]
    reps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
struct SweepArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Comma-separated costs: plain numbers are fixed, or fixed:X, prop:R.
    #[arg(long, value_delimiter = ',')]
    tau_list: Option<Vec<String>>,
}

#[derive(Debug, Clone, Args)]
struct AcceptanceArgs {
    /// Skip the housing-simulation criteria.
    #[arg(long)]
    skip_heavy: bool,
    /// Surplus split used by the strategy-proofness scenario.
    #[arg(long)]
    lambda: Option<f64>,
}

/// Resolved global settings.
struct Context {
    file: FileConfig,
    cli_seed: Option<u64>,
    out: Option<PathBuf>,
    mode: Option<NumericMode>,
    threads: Option<usize>,
    verbosity: u8,
}

impl Context {
    fn seed(&self) -> Result<u64> {
        let (seed, generated) = resolve_seed(self.cli_seed, self.file.seed)?;
        if generated || self.verbosity > 0 {
            eprintln!("seed: {seed}{}", if generated { " (generated)" } else { "" });
        }
        Ok(seed)
    }

    fn log(&self, msg: impl AsRef<str>) {
        if self.verbosity > 0 {
            eprintln!("{}", msg.as_ref());
        }
    }

    /// Prints `doc` and, with `--out`, also writes it to `name`.
    fn emit(&self, name: &str, doc: &Value) -> Result<()> {
        let text = serde_json::to_string_pretty(doc)? + "\n";
        if let Some(dir) = &self.out {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(name), &text)?;
        }
        std::io::stdout().write_all(text.as_bytes())?;
        Ok(())
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Argument(_) => 2,
        Error::Internal(_) => 4,
        _ => 3,
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
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let mode = match (cli.numeric_mode, file.numeric_mode.as_deref()) {
        (Some(ModeArg::Integer), _) | (None, Some("integer")) => Some(NumericMode::Integer),
        (Some(ModeArg::Real), _) | (None, Some("real")) => Some(NumericMode::Real),
        (None, None) => None,
        (None, Some(other)) => {
            return Err(Error::Argument(format!(
                "numeric_mode must be integer or real, got '{other}'"
            )))
        }
    };
    let ctx = Context {
        cli_seed: cli.seed,
        out: cli.out.or_else(|| file.out.clone()),
        mode,
        threads: cli.threads.or(file.threads),
        verbosity: if cli.verbose > 0 {
            cli.verbose
        } else {
            file.verbosity.unwrap_or(0)
        },
        file,
    };
    match cli.command {
        Command::Mech(MechCommand::Run(args)) => mech_run(&ctx, args).map(|()| 0),
        Command::Equilibrium(EquilibriumCommand::Solve(args)) => {
            equilibrium_solve(&ctx, args).map(|()| 0)
        }
        Command::Oracle(OracleCommand::Check(args)) => oracle_check(&ctx, args).map(|()| 0),
        Command::TwoAgent(TwoAgentCommand::Solve(args)) => two_agent_solve(&ctx, args).map(|()| 0),
        Command::TwoAgent(TwoAgentCommand::FirstMover(args)) => {
            first_mover(&ctx, args).map(|()| 0)
        }
        Command::Sim(SimCommand::Housing(args)) => sim_housing(&ctx, args).map(|()| 0),
        Command::Sim(SimCommand::Sweep(args)) => sim_sweep(&ctx, args).map(|()| 0),
        Command::Acceptance(args) => acceptance(&ctx, args),
    }
}

fn load_market(ctx: &Context, args: &InstanceArgs) -> Result<(String, MarketInstance)> {
    let scenario = args.scenario.clone().or_else(|| ctx.file.scenario.clone());
    let path = args.instance.clone().or_else(|| ctx.file.instance.clone());
    let (label, market) = match (scenario, path) {
        (Some(name), None) => (name.clone(), scenarios::by_name(&name)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| Error::Argument(format!("{}: {e}", path.display())))?;
            (path.display().to_string(), MarketInstance::from_json(&text)?)
        }
        (Some(_), Some(_)) => {
            return Err(Error::Argument("give either a scenario or an instance file".into()))
        }
        (None, None) => {
            return Err(Error::Argument(format!(
                "missing --scenario or --instance; scenarios: {}",
                scenarios::NAMES.join(", ")
            )))
        }
    };
    let market = match ctx.mode {
        Some(mode) => market.with_mode(mode)?,
        None => market,
    };
    Ok((label, market))
}

fn explicit_order(ctx: &Context, args: &InstanceArgs, n: usize) -> Result<Option<PickOrder>> {
    args.order
        .clone()
        .or_else(|| ctx.file.order.clone())
        .map(|o| PickOrder::new(o, n))
        .transpose()
}

fn outcome_json<M: Market>(market: &M, outcome: &Outcome) -> Value {
    json!({
        "allocation": outcome.allocation.as_slice(),
        "transfers": outcome.transfers.as_slice(),
        "utilities": utilities(market, outcome),
        "welfare": total_welfare(market, &outcome.allocation),
        "trades": outcome.trade_log.records(),
        "pre_trade": outcome.pre_trade.as_ref().map(Allocation::as_slice),
    })
}

fn policy_from(
    ctx: &Context,
    lambda: Option<f64>,
    floor: Option<bool>,
    mode: Option<PairwiseMode>,
    budgets: Option<bool>,
    base: TradePolicy,
) -> Result<TradePolicy> {
    let f = &ctx.file;
    TradePolicy::new(
        pick(lambda, f.lambda, base.surplus_split),
        pick(floor, f.seller_floor, base.seller_floor),
        pick_parsed(mode, f.pairwise_mode.as_deref(), base.mode)?,
        pick(budgets, f.budget_enforced, base.budget_enforced),
    )
}

fn mech_run(ctx: &Context, args: MechArgs) -> Result<()> {
    let mechanism = match (args.mechanism, ctx.file.mechanism.as_deref()) {
        (Some(m), _) => m,
        (None, Some(name)) => Mechanism::from_str(name, true)
            .map_err(|_| Error::Argument(format!("unknown mechanism '{name}'")))?,
        (None, None) => return Err(Error::Argument("missing --mechanism".into())),
    };
    let (label, market) = load_market(ctx, &args.instance)?;
    let n = market.n_agents();
    let p = &args.policy;
    let policy = policy_from(
        ctx,
        p.lambda,
        p.seller_floor,
        p.pairwise_mode,
        p.budget_enforced,
        TradePolicy::default(),
    )?;
    let cost = pick_parsed(p.tau, ctx.file.tau.as_deref(), TransactionCost::None)?;
    let model = pick_parsed(
        args.agent_model,
        ctx.file.agent_model.as_deref(),
        AgentModel::Myopic,
    )?;
    let given = explicit_order(ctx, &args.instance, n)?;
    let mut seed = None;
    let order = match (mechanism, given) {
        (Mechanism::Rsd, Some(_)) => {
            return Err(Error::Argument("rsd draws its own order; use sd with --order".into()))
        }
        (_, Some(order)) => order,
        (Mechanism::Sd, None) => PickOrder::identity(n),
        (_, None) => {
            let s = ctx.seed()?;
            seed = Some(s);
            PickOrder::random(n, s)
        }
    };
    let mut extra = serde_json::Map::new();
    let outcome = match mechanism {
        Mechanism::Sd => serial_dictatorship(&market, &order)?,
        Mechanism::Rsd => {
            let (drawn, out) = rsd(&market, seed.expect("drawn above"))?;
            extra.insert("order".into(), json!(drawn.as_slice()));
            out
        }
        Mechanism::Ttc => rsd_then_ttc(&market, &order)?,
        Mechanism::Ce => {
            let ce = expost_ce_transfers(&market, &order)?;
            extra.insert("prices".into(), json!(ce.prices.as_slice()));
            extra.insert("endowment".into(), json!(ce.endowment.as_slice()));
            ce.outcome
        }
        Mechanism::Pairwise => expost_pairwise_transfers(&market, &order, &policy, &cost)?,
        Mechanism::Interim => interim_transfers(&market, &order, model, &policy)?,
    };
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "mech run",
        "mechanism": mechanism,
        "market": label,
        "seed": seed,
        "order": order.as_slice(),
        "policy": policy,
        "cost": cost,
        "agent_model": model,
        "outcome": outcome_json(&market, &outcome),
    });
    let obj = doc.as_object_mut().expect("object");
    obj.extend(extra);
    ctx.emit("mech.json", &doc)
}

fn equilibrium_solve(ctx: &Context, args: SolveArgs) -> Result<()> {
    let (label, market) = load_market(ctx, &args.instance)?;
    let order = explicit_order(ctx, &args.instance, market.n_agents())?
        .unwrap_or_else(|| PickOrder::identity(market.n_agents()));
    let ce = expost_ce_transfers(&market, &order)?;
    let prices = ce_prices(&market, &ce.endowment, &ce.outcome.allocation)?;
    let supported = verify_ce(&market, &ce.endowment, &ce.outcome.allocation, &prices);
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "equilibrium solve",
        "market": label,
        "order": order.as_slice(),
        "endowment": ce.endowment.as_slice(),
        "prices": prices.as_slice(),
        "supported": supported,
        "outcome": outcome_json(&market, &ce.outcome),
    });
    if !supported {
        return Err(Error::Internal("computed prices fail verification".into()));
    }
    ctx.emit("equilibrium.json", &doc)
}

fn oracle_check(ctx: &Context, args: SolveArgs) -> Result<()> {
    let (label, market) = load_market(ctx, &args.instance)?;
    let (best, optimum) = brute_force_optimal(&market)?;
    let agents: Vec<usize> = (0..market.n_agents()).collect();
    let items: Vec<usize> = (0..market.n_items()).collect();
    let assignment = optimal_assignment(&market, &agents, &items)?;
    let assignment_welfare = total_welfare(&market, &assignment);
    let order = explicit_order(ctx, &args.instance, market.n_agents())?;
    let feasible = order
        .as_ref()
        .map(|o| interim_feasibility_check(&market, o))
        .transpose()?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "oracle check",
        "market": label,
        "optimum_welfare": optimum,
        "allocation": best.as_slice(),
        "assignment": assignment.as_slice(),
        "assignment_welfare": assignment_welfare,
        "order": order.as_ref().map(PickOrder::as_slice),
        "interim_feasible": feasible,
    });
    ctx.emit("oracle.json", &doc)
}

fn two_agent_solve(ctx: &Context, args: OfferArgs) -> Result<()> {
    let domain = pick_parsed(args.domain, ctx.file.domain.as_deref(), OfferDomain::default())?;
    let offer = optimal_offer(args.v_want, args.v_hold, &args.held, &args.received, domain)?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "two-agent solve",
        "held": args.held,
        "received": args.received,
        "v_want": args.v_want,
        "v_hold": args.v_hold,
        "domain": domain,
        "offer": offer,
    });
    ctx.emit("offer.json", &doc)
}

fn first_mover(ctx: &Context, args: FirstMoverArgs) -> Result<()> {
    let game = TwoAgentGame {
        f1a: args.f1a.unwrap_or(args.dist),
        f1b: args.f1b.unwrap_or(args.dist),
        f2a: args.f2a.unwrap_or(args.dist),
        f2b: args.f2b.unwrap_or(args.dist),
        domain: pick_parsed(args.domain, ctx.file.domain.as_deref(), OfferDomain::default())?,
    };
    let draws = pick(args.draws, ctx.file.draws, 100_000);
    let seed = ctx.seed()?;
    let report = first_mover_expected_utility(args.v1a, args.v1b, &game, draws, seed)?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "two-agent first-mover",
        "seed": seed,
        "draws": draws,
        "v1a": args.v1a,
        "v1b": args.v1b,
        "game": game,
        "report": report,
    });
    ctx.emit("first_mover.json", &doc)
}

fn sim_config(ctx: &Context, args: &SimArgs) -> Result<SimConfig> {
    let f = &ctx.file;
    let mut cfg = SimConfig::new(pick(args.agents, f.agents, 1000));
    cfg.wealth = pick_parsed(args.wealth, f.wealth.as_deref(), cfg.wealth)?;
    cfg.policy = policy_from(
        ctx,
        args.lambda,
        args.seller_floor,
        args.pairwise_mode,
        args.budget_enforced,
        cfg.policy,
    )?;
    cfg.cost_aware_augmentation = pick(
        args.cost_aware_augmentation,
        f.cost_aware_augmentation,
        cfg.cost_aware_augmentation,
    );
    Ok(cfg)
}

fn out_dir(ctx: &Context) -> Result<PathBuf> {
    let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_deltas(path: &Path, reports: &[SimReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["rep", "agent", "budget0", "welfare_baseline", "welfare_treatment", "delta"])?;
    for (rep, r) in reports.iter().enumerate() {
        for j in 0..r.n_agents {
            w.serialize((
                rep,
                j,
                r.budgets[j],
                r.welfare_baseline[j],
                r.welfare_treatment[j],
                r.deltas[j],
            ))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_trades(path: &Path, reports: &[SimReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "rep", "step", "buyer", "seller", "room_sold", "room_given", "price", "cost",
    ])?;
    for (rep, r) in reports.iter().enumerate() {
        for (step, t) in r.trades.iter().enumerate() {
            w.serialize((
                rep,
                step,
                t.proposer,
                t.counterparty,
                t.proposer_got,
                t.proposer_gave,
                t.price,
                t.cost,
            ))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn sim_housing(ctx: &Context, args: HousingArgs) -> Result<()> {
    let f = &ctx.file;
    let mut cfg = sim_config(ctx, &args.sim)?;
    cfg.cost = pick_parsed(args.tau, f.tau.as_deref(), TransactionCost::None)?;
    cfg.replications = pick(args.reps, f.reps, 1);
    cfg.validate()?;
    let seed = ctx.seed()?;
    let dir = out_dir(ctx)?;
    ctx.log(format!(
        "running {} replication(s) of {} agents",
        cfg.replications, cfg.n_agents
    ));
    let (summary, reports) = batch_run(&cfg, seed, ctx.threads)?;
    write_deltas(&dir.join("deltas.csv"), &reports)?;
    write_trades(&dir.join("trades.csv"), &reports)?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "sim housing",
        "seed": seed,
        "summary": summary,
    });
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&doc)? + "\n")?;
    ctx.log(format!("wrote report.json, deltas.csv, trades.csv to {}", dir.display()));
    let brief = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "sim housing",
        "seed": seed,
        "out": dir,
        "mean_gain": summary.mean_gain,
        "positive_gain_reps": summary.positive_gain_reps,
        "negative_delta_fraction": summary.negative_delta_fraction,
    });
    println!("{}", serde_json::to_string_pretty(&brief)?);
    Ok(())
}

fn parse_cost(text: &str) -> Result<TransactionCost> {
    match text.trim().parse::<f64>() {
        Ok(x) => {
            let cost = TransactionCost::Fixed(x);
            cost.validate()?;
            Ok(cost)
        }
        Err(_) => text.trim().parse(),
    }
}

fn sim_sweep(ctx: &Context, args: SweepArgs) -> Result<()> {
    let cfg = sim_config(ctx, &args.sim)?;
    cfg.validate()?;
    let list = args
        .tau_list
        .or_else(|| ctx.file.tau_list.clone())
        .ok_or_else(|| Error::Argument("missing --tau-list".into()))?;
    let costs = list
        .iter()
        .map(|s| parse_cost(s))
        .collect::<Result<Vec<_>>>()?;
    let seed = ctx.seed()?;
    let dir = out_dir(ctx)?;
    // Fixed and proportional levels are swept separately, each in order.
    let mut rows: Vec<SweepRow> = Vec::new();
    let (mut fixed, mut prop): (Vec<_>, Vec<_>) = costs
        .into_iter()
        .partition(|c| !matches!(c, TransactionCost::Proportional(_)));
    for group in [&mut fixed, &mut prop] {
        if group.is_empty() {
            continue;
        }
        group.sort_by(|a, b| a.level().total_cmp(&b.level()));
        ctx.log(format!("sweeping {} cost levels", group.len()));
        rows.extend(rsd_market::simulate::transaction_cost_sweep(&cfg, group, seed)?);
    }
    let mut w = csv::Writer::from_path(dir.join("sweep.csv"))?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "sim sweep",
        "seed": seed,
        "out": dir,
        "rows": rows,
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

fn acceptance(ctx: &Context, args: AcceptanceArgs) -> Result<u8> {
    let opts = SuiteOptions {
        heavy: !args.skip_heavy,
        threads: ctx.threads,
        surplus_split: pick(args.lambda, ctx.file.lambda, SuiteOptions::default().surplus_split),
    };
    TradePolicy::new(opts.surplus_split, true, PairwiseMode::default(), false)?;
    let results = run_suite(&opts);
    for r in &results {
        eprintln!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "acceptance",
        "passed": results.len() - failed,
        "failed": failed,
        "results": results,
    });
    ctx.emit("acceptance.json", &doc)?;
    Ok(if failed == 0 { 0 } else { 1 })
}
