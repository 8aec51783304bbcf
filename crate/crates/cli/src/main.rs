//! `qgame`: evaluate, solve and demonstrate quantum sequential games.

mod human;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use qgame_core::equilibrium::{
    approx_mixed_quantum_equilibrium, solve_classes, theorem1_lift, theorem2_improve, DeviationClass, SolverConfig,
};
use qgame_core::matrix::random_unitary;
use qgame_core::pennyflip::{self, PICARD, Q};
use qgame_core::report::{certificate_json, outcome_json, report_json, to_document};
use qgame_core::{
    evolve, expected_payoff, load_game_file, strategic_form, GameError, GameSpec, PureClassicalStrategy, Strategy,
    StrategyProfile,
};

#[derive(Parser)]
#[command(name = "qgame", version, about = "Sequential zero-sum games on density matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play repeated penny-flip games and report expected payoffs.
    Demo(DemoArgs),
    /// Print the classical payoff matrix as CSV.
    StrategicForm(FormArgs),
    /// Find an equilibrium with each player restricted to a strategy class.
    Solve(SolveArgs),
    /// Demonstrate one of the constructive results (1, 2 or 3).
    Theorem(TheoremArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QPlay {
    /// Hadamard on both moves.
    Hadamard,
    /// Classical: each of NN, NF, FN, FF with probability 1/4.
    Uniform,
    /// Both players never flip.
    None,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Tuning {
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exploitability threshold for declaring an equilibrium.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, value_enum, default_value = "hadamard")]
    q: QPlay,
    /// Picard's flip probability.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 10)]
    rounds: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct FormArgs {
    /// Game file, or a built-in name (pennyflip, pennyflip2).
    #[arg(long, default_value = "pennyflip")]
    game: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, default_value = "pennyflip")]
    game: String,
    /// Strategy classes for player 1 and player 2.
    #[arg(long, num_args = 2, value_names = ["P1", "P2"], default_values = ["mixed", "mixed"])]
    class: Vec<String>,
    /// Points per angle for the mixed quantum grid.
    #[arg(long, default_value_t = 8)]
    grid: usize,
    #[command(flatten)]
    tuning: Tuning,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct TheoremArgs {
    #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
    n: u8,
    /// Random triples to certify (theorem 2).
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Coarsest grid of the refinement ladder (theorem 3).
    #[arg(long, default_value_t = 4)]
    grid: usize,
    /// Grid doublings including the first (theorem 3).
    #[arg(long, default_value_t = 3)]
    rounds: usize,
    #[command(flatten)]
    tuning: Tuning,
    #[command(flatten)]
    output: Output,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<GameError> for Failure {
    fn from(e: GameError) -> Self {
        let code = if matches!(e, GameError::NoConvergence(_)) { 1 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Demo(a) => demo(a),
        Command::StrategicForm(a) => form(a),
        Command::Solve(a) => solve(a),
        Command::Theorem(a) => theorem(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(name: &str) -> Result<GameSpec, Failure> {
    match name {
        "pennyflip" => Ok(pennyflip::game()),
        "pennyflip2" => Ok(pennyflip::two_move_game()),
        path => Ok(load_game_file(path)?),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write(output: &Output, doc: Value, human: impl FnOnce() -> String) -> Result<(), Failure> {
    let text = match output.format {
        Format::Json => to_document(&doc),
        Format::Human => human(),
    };
    emit(&output.out, &text)
}

fn config(t: &Tuning) -> Result<SolverConfig, Failure> {
    if !(t.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    if t.restarts == 0 {
        return Err(usage("--restarts must be at least 1"));
    }
    Ok(SolverConfig { eps: t.tol, restarts: t.restarts, seed: t.seed, ..SolverConfig::default() })
}

fn check_grid(grid: usize) -> Result<(), Failure> {
    if grid < 4 {
        return Err(usage("--grid must be at least 4"));
    }
    Ok(())
}

fn demo(a: DemoArgs) -> Result<(), Failure> {
    if !(0.0..=1.0).contains(&a.p) {
        return Err(usage("--p must lie in [0, 1]"));
    }
    let game = pennyflip::game();
    let never = |owner, moves| {
        Strategy::Pure(PureClassicalStrategy::new(owner, vec!["N".to_string(); moves]))
    };
    let (picard, q) = match a.q {
        QPlay::Hadamard => (Strategy::Mixed(pennyflip::picard_flip(a.p)), Strategy::Quantum(pennyflip::q_hadamard_pair())),
        QPlay::Uniform => (Strategy::Mixed(pennyflip::picard_flip(a.p)), Strategy::Mixed(pennyflip::q_uniform())),
        QPlay::None => (never(PICARD, 1), never(Q, 2)),
    };
    let profile = StrategyProfile::new(picard, q)?;
    let head = evolve(&game, &profile)?.final_state().diagonal()[0];
    let payoff = expected_payoff(&game, &profile, PICARD)?;
    // Games are independent, so every round has the same expectation.
    let games: Vec<(usize, f64)> = (1..=a.rounds).map(|k| (k, payoff * k as f64)).collect();
    let total = payoff * a.rounds as f64;
    let doc = json!({
        "games": games.iter().map(|(k, c)| json!({
            "game": k, "head_up_probability": head, "picard_payoff": payoff, "cumulative_picard_payoff": c,
        })).collect::<Vec<_>>(),
        "cumulative_picard_payoff": total,
    });
    write(&a.output, doc, || human::demo(head, payoff, &games, total))
}

fn form(a: FormArgs) -> Result<(), Failure> {
    let game = load(&a.game)?;
    emit(&a.out, &strategic_form(&game).to_csv())
}

fn solve(a: SolveArgs) -> Result<(), Failure> {
    let game = load(&a.game)?;
    let config = config(&a.tuning)?;
    check_grid(a.grid)?;
    let classes = [a.class[0].parse::<DeviationClass>()?, a.class[1].parse::<DeviationClass>()?];
    let outcome = solve_classes(&game, classes, a.grid, &config)?;
    write(&a.output, outcome_json(&outcome), || human::outcome(&outcome))
}

fn theorem(a: TheoremArgs) -> Result<(), Failure> {
    let config = config(&a.tuning)?;
    match a.n {
        1 => {
            let game = pennyflip::two_move_game();
            let classical = StrategyProfile::new(
                Strategy::Mixed(pennyflip::picard_flip(0.5)),
                Strategy::Mixed(pennyflip::q_flip(1, 0.5)),
            )?;
            let lift = theorem1_lift(&game, &classical, PICARD)?;
            let doc = json!({
                "lifted": qgame_core::report::strategy_json(&Strategy::Quantum(lift.strategy.clone())),
                "classical_diagonals": lift.classical_diagonals,
                "quantum_diagonals": lift.quantum_diagonals,
                "max_error": lift.max_error(),
            });
            write(&a.output, doc, || human::lift(&lift))
        }
        2 => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut certs = Vec::with_capacity(a.samples);
            for _ in 0..a.samples {
                let u: Vec<_> = (0..3).map(|_| random_unitary(&mut rng, 2)).collect();
                certs.push(theorem2_improve(&u[0], &u[1], &u[2])?);
            }
            let wins = certs.iter().filter(|c| (c.improved_payoff - 1.0).abs() <= 1e-9).count();
            let doc = json!({
                "samples": a.samples,
                "seed": config.seed,
                "winning_certificates": wins,
                "certificates": certs.iter().map(certificate_json).collect::<Vec<_>>(),
            });
            write(&a.output, doc, || human::certificates(&certs, wins))
        }
        _ => {
            check_grid(a.grid)?;
            if a.rounds == 0 {
                return Err(usage("--rounds must be at least 1"));
            }
            let report = approx_mixed_quantum_equilibrium(&pennyflip::game(), a.grid, a.rounds, &config)?;
            write(&a.output, report_json(&report), || human::ladder(&report))
        }
    }
}
