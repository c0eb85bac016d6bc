//! `exmarket`: generators, reductions, solvers, and checkers for matching
//! markets with exchange costs, coordination games, and local max-cut.
//!
//! Exit codes: 0 on success (and "stable"/"equilibrium" verdicts), 1 when a
//! check finds a witness, 2 on any validation or I/O error.

use std::error::Error;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use exmarket_core::assignment::solve_core_stable;
use exmarket_core::games::check_k_equilibrium;
use exmarket_core::generate::{random_game, random_maxcut};
use exmarket_core::io;
use exmarket_core::local_search::{find_2_stable, InitMode, PivotRule, SearchConfig};
use exmarket_core::market::{Allocation, CoalitionalExchange, MarketInstance};
use exmarket_core::reductions::{
    recover_cut, reduce_check_instance, reduce_game_to_market, reduce_maxcut_to_market,
};
use exmarket_core::stability::{candidate_count, check_k_stable};

/// Full enumerations beyond this many candidate exchanges get a stderr
/// warning before the check starts.
const ENUMERATION_WARN_THRESHOLD: u128 = 100_000_000;

#[derive(Parser)]
#[command(name = "exmarket", version, about = "Matching markets with exchange costs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instances.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Reduce games or max-cut graphs to markets.
    Reduce {
        #[command(subcommand)]
        what: ReduceCommand,
    },
    /// Solve a market.
    Solve {
        #[command(subcommand)]
        what: SolveCommand,
    },
    /// Check k-stability of an allocation; exit 1 with a witness if unstable.
    Check {
        market: PathBuf,
        allocation: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Check k-equilibrium of a profile; exit 1 with a witness if not.
    CheckEq {
        game: PathBuf,
        profile: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Read a cut back out of a solved max-cut-reduced market.
    RecoverCut {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        alloc: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print the potential of an allocation.
    Potential { market: PathBuf, allocation: PathBuf },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random network coordination game.
    Coordgame {
        #[arg(long)]
        players: usize,
        /// Strategy universe size; each player draws a non-empty subset.
        #[arg(long)]
        strategies: u32,
        #[arg(long)]
        max_degree: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Random weighted graph for local max-cut.
    Maxcut {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        max_degree: usize,
        #[arg(long, default_value_t = 7)]
        max_weight: i64,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum ReduceCommand {
    /// Game -> market with exchange costs; stability 2k mirrors equilibrium k.
    Game {
        game: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// (Game, profile, k) -> cost-free market + allocation + check level.
    Checkgame {
        game: PathBuf,
        profile: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        alloc_out: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Max-cut graph -> market whose 2-stable allocations are local optima.
    Maxcut {
        graph: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
}

#[derive(Subcommand)]
enum SolveCommand {
    /// 2-stable allocation by potential ascent over pair swaps.
    Local2 {
        market: PathBuf,
        #[arg(long, value_enum, default_value_t = PivotArg::Best)]
        pivot: PivotArg,
        #[arg(long, value_enum, default_value_t = InitArg::Identity)]
        init: InitArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_steps: Option<u64>,
        /// Write the accepted steps as `step i j phi_before phi_after` lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Core-stable allocation for non-graphical-equivalent instances.
    Assignment {
        market: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PivotArg {
    Best,
    First,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Identity,
    Random,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Box<dyn Error>> {
    match command {
        Command::Gen { what } => run_gen(what),
        Command::Reduce { what } => run_reduce(what),
        Command::Solve { what } => run_solve(what),
        Command::Check {
            market,
            allocation,
            k,
        } => run_check(&market, &allocation, k),
        Command::CheckEq { game, profile, k } => run_check_eq(&game, &profile, k),
        Command::RecoverCut { map, alloc, output } => {
            let map_file = io::load_reduction_map(&map)?;
            let map = map_file
                .maxcut
                .ok_or("reduction map does not describe a max-cut reduction")?;
            let allocation = io::load_allocation(&alloc)?;
            let cut = recover_cut(&map, &allocation)?;
            io::save_cut(&output, &cut)?;
            println!("sides {:?}", cut.sides());
            Ok(ExitCode::SUCCESS)
        }
        Command::Potential { market, allocation } => {
            let inst = io::load_market(&market)?;
            let alloc = load_allocation_for(&inst, &allocation)?;
            println!("{}", inst.potential(&alloc));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_gen(what: GenCommand) -> Result<ExitCode, Box<dyn Error>> {
    match what {
        GenCommand::Coordgame {
            players,
            strategies,
            max_degree,
            seed,
            output,
        } => {
            if players == 0 || strategies == 0 {
                return Err("--players and --strategies must be at least 1".into());
            }
            let game = random_game(players, strategies, max_degree, seed);
            io::save_game(&output, &game)?;
            println!(
                "coordgame: {} players, {} edges, universe {}",
                game.num_players(),
                game.edges().len(),
                game.universe()
            );
        }
        GenCommand::Maxcut {
            vertices,
            max_degree,
            max_weight,
            seed,
            output,
        } => {
            if vertices == 0 || max_weight < 1 {
                return Err("--vertices must be >= 1 and --max-weight >= 1".into());
            }
            let graph = random_maxcut(vertices, max_degree, max_weight, seed);
            io::save_maxcut(&output, &graph)?;
            println!(
                "maxcut: {} vertices, {} edges",
                graph.num_vertices(),
                graph.edges().len()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_reduce(what: ReduceCommand) -> Result<ExitCode, Box<dyn Error>> {
    match what {
        ReduceCommand::Game { game, output, map } => {
            let game = io::load_game(&game)?;
            let (market, reduction) = reduce_game_to_market(&game);
            io::save_market(&output, &market)?;
            io::save_json(&map, &io::game_map_to_file(&reduction))?;
            println!(
                "market: {} agents, delta {}",
                market.num_agents(),
                reduction.delta
            );
        }
        ReduceCommand::Checkgame {
            game,
            profile,
            k,
            output,
            alloc_out,
            map,
        } => {
            let game = io::load_game(&game)?;
            let profile = io::load_profile(&profile)?;
            let red = reduce_check_instance(&game, &profile, k)?;
            io::save_market(&output, &red.market)?;
            io::save_allocation(&alloc_out, &red.allocation)?;
            io::save_json(&map, &io::game_map_to_file(&red.map))?;
            println!("check with --k {}", red.stability_level);
        }
        ReduceCommand::Maxcut { graph, output, map } => {
            let graph = io::load_maxcut(&graph)?;
            let (market, reduction) = reduce_maxcut_to_market(&graph);
            io::save_market(&output, &market)?;
            io::save_json(&map, &io::maxcut_map_to_file(&reduction))?;
            println!("market: {} agents", market.num_agents());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_solve(what: SolveCommand) -> Result<ExitCode, Box<dyn Error>> {
    match what {
        SolveCommand::Local2 {
            market,
            pivot,
            init,
            seed,
            max_steps,
            trace,
            output,
        } => {
            let inst = io::load_market(&market)?;
            let config = SearchConfig {
                pivot: match pivot {
                    PivotArg::Best => PivotRule::BestImprovement,
                    PivotArg::First => PivotRule::FirstImprovement,
                },
                init: match init {
                    InitArg::Identity => InitMode::Identity,
                    InitArg::Random => InitMode::Random,
                },
                seed,
                max_steps,
            };
            let result = find_2_stable(&inst, &config)?;
            io::save_allocation(&output, &result.allocation)?;
            if let Some(path) = trace {
                let mut text = String::new();
                for s in &result.trace.steps {
                    writeln!(
                        text,
                        "{} {} {} {} {}",
                        s.step, s.i, s.j, s.potential_before, s.potential_after
                    )?;
                }
                std::fs::write(path, text)?;
            }
            println!(
                "{} after {} steps, potential {}",
                if result.converged {
                    "converged"
                } else {
                    "step limit reached"
                },
                result.trace.steps.len(),
                inst.potential(&result.allocation)
            );
            if !result.converged {
                return Ok(ExitCode::from(1));
            }
        }
        SolveCommand::Assignment { market, output } => {
            let inst = io::load_market(&market)?;
            let alloc = solve_core_stable(&inst)?;
            io::save_allocation(&output, &alloc)?;
            let welfare: i64 = (0..inst.num_agents())
                .map(|i| inst.valuation(i, alloc.item_of(i)))
                .sum();
            println!("welfare {welfare}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_check(
    market: &PathBuf,
    allocation: &PathBuf,
    k: usize,
) -> Result<ExitCode, Box<dyn Error>> {
    let inst = io::load_market(market)?;
    let alloc = load_allocation_for(&inst, allocation)?;
    let candidates = candidate_count(inst.num_agents(), k);
    if candidates > ENUMERATION_WARN_THRESHOLD {
        eprintln!("warning: enumerating up to {candidates} candidate exchanges");
    }
    let report = check_k_stable(&inst, &alloc, k)?;
    if report.stable {
        println!("stable k={k}");
        Ok(ExitCode::SUCCESS)
    } else {
        let witness = report.witness.expect("unstable report carries a witness");
        println!("unstable k={k}");
        println!("{}", format_witness(&inst, &alloc, &witness));
        Ok(ExitCode::from(1))
    }
}

/// One machine-parsable line:
/// `X=[..] mu=[x->mu(x),..] cost_total=.. gains=[..]`.
fn format_witness(
    inst: &MarketInstance,
    alloc: &Allocation,
    witness: &CoalitionalExchange,
) -> String {
    let after = alloc.apply(witness);
    let members: Vec<String> = witness.members().iter().map(|x| x.to_string()).collect();
    let mapping: Vec<String> = witness
        .pairs()
        .map(|(x, mx)| format!("{x}->{mx}"))
        .collect();
    let gains: Vec<String> = witness
        .pairs()
        .map(|(x, _)| {
            let fee = inst.cost(x, alloc.item_of(x), after.item_of(x));
            (inst.utility(&after, x) - fee - inst.utility(alloc, x)).to_string()
        })
        .collect();
    format!(
        "X=[{}] mu=[{}] cost_total={} gains=[{}]",
        members.join(","),
        mapping.join(","),
        inst.exchange_cost_total(alloc, witness),
        gains.join(",")
    )
}

fn run_check_eq(game: &PathBuf, profile: &PathBuf, k: usize) -> Result<ExitCode, Box<dyn Error>> {
    let game = io::load_game(game)?;
    let profile = io::load_profile(profile)?;
    let report = check_k_equilibrium(&game, &profile, k)?;
    if report.is_equilibrium {
        println!("equilibrium k={k}");
        Ok(ExitCode::SUCCESS)
    } else {
        let (coalition, target) = report.witness.expect("witness present");
        let members: Vec<String> = coalition.iter().map(|x| x.to_string()).collect();
        let strategies: Vec<String> =
            target.strategies().iter().map(|s| s.to_string()).collect();
        println!("not-equilibrium k={k}");
        println!("K=[{}] target=[{}]", members.join(","), strategies.join(","));
        Ok(ExitCode::from(1))
    }
}

fn load_allocation_for(
    inst: &MarketInstance,
    path: &PathBuf,
) -> Result<Allocation, Box<dyn Error>> {
    let alloc = io::load_allocation(path)?;
    if alloc.len() != inst.num_agents() {
        return Err(format!(
            "allocation covers {} agents but the market has {}",
            alloc.len(),
            inst.num_agents()
        )
        .into());
    }
    Ok(alloc)
}
