//! cssbkit: equilibrium paths and stable standards of behavior in
//! discounted repeated games, with individual or coalitional deviations.

mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cssbkit_core::equilibrium::{
    compare_modes, fixed_point, optimal_penal_code, verify_family, PunishmentFamily,
    VerifyOutcome,
};
use cssbkit_core::game::StageGame;
use cssbkit_core::paths::{enumerate_universe, Path, UniverseError, DEFAULT_UNIVERSE_CAP};
use cssbkit_core::situations::{
    external_stability, internal_stability, Mode, StandardOfBehavior,
};

use report::{
    CertificateReport, CompareReport, ConfigEcho, CounterexampleReport, PayoffRow, SolveReport,
    StabilityReport, TraceReport, VerifyReport,
};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cssbkit",
    version,
    about = "Equilibrium path sets of discounted repeated games under individual or coalitional deviations, with exact rational arithmetic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the largest enforceable path set over a finite universe,
    /// with its optimal penal code and certificate.
    Solve(SolveArgs),
    /// Check one path against an explicit punishment family.
    Verify(VerifyArgs),
    /// Audit a standard of behavior for internal and universe-relative
    /// external stability.
    Stability(StabilityArgs),
    /// Solve under both deviation modes and report the containment.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Nash,
    Coalition,
}

impl From<ModeArg> for Mode {
    fn from(arg: ModeArg) -> Mode {
        match arg {
            ModeArg::Nash => Mode::Nash,
            ModeArg::Coalition => Mode::Coalitional,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

#[derive(Args)]
struct CommonArgs {
    /// Game file (JSON).
    #[arg(long, value_name = "FILE")]
    game: PathBuf,
    /// Longest transient length in the path universe.
    #[arg(long, default_value_t = 2)]
    prefix: usize,
    /// Longest cycle length in the path universe (at least 1).
    #[arg(long, default_value_t = 2)]
    cycle: usize,
    /// Refuse universes with more raw paths than this.
    #[arg(long, env = "CSSBKIT_CAP", default_value_t = DEFAULT_UNIVERSE_CAP)]
    cap: u64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Deviation mode.
    #[arg(long, value_enum, default_value_t = ModeArg::Coalition)]
    mode: ModeArg,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Deviation mode.
    #[arg(long, value_enum, default_value_t = ModeArg::Coalition)]
    mode: ModeArg,
    /// Path literal to verify, e.g. "| C,C".
    #[arg(long, value_name = "LIT")]
    path: String,
    /// Punishment path literal, one per player in player order.
    #[arg(long, value_name = "LIT", action = clap::ArgAction::Append)]
    punish: Vec<String>,
}

#[derive(Args)]
struct StabilityArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Deviation mode.
    #[arg(long, value_enum, default_value_t = ModeArg::Coalition)]
    mode: ModeArg,
    /// Standard-of-behavior file: one path literal per line, '#' comments.
    #[arg(long, value_name = "FILE")]
    sb: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
}

enum CliError {
    Input(String),
    Cap(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Cap(_) => EXIT_CAP,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Cap(m) => m,
        }
    }
}

fn input_err(context: &str, err: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{context}: {err}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Stability(args) => cmd_stability(args),
        Command::Compare(args) => cmd_compare(args),
    }
}

fn load_game(file: &PathBuf) -> Result<StageGame, CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| input_err(&format!("cannot read {}", file.display()), e))?;
    StageGame::parse(&text).map_err(|e| input_err(&format!("{}", file.display()), e))
}

fn build_universe(game: &StageGame, common: &CommonArgs) -> Result<Vec<Path>, CliError> {
    enumerate_universe(game, common.prefix, common.cycle, common.cap).map_err(|e| match e {
        UniverseError::CapExceeded { .. } => CliError::Cap(e.to_string()),
        UniverseError::ZeroCycle => CliError::Input(e.to_string()),
    })
}

fn config_echo(command: &str, common: &CommonArgs, mode: Option<Mode>) -> ConfigEcho {
    ConfigEcho {
        command: command.to_string(),
        game_file: common.game.display().to_string(),
        mode: mode.map(|m| m.name().to_string()),
        prefix: common.prefix,
        cycle: common.cycle,
        cap: common.cap,
        format: match common.format {
            FormatArg::Text => "text".to_string(),
            FormatArg::Machine => "machine".to_string(),
        },
    }
}

fn emit<T: serde::Serialize>(common: &CommonArgs, report: &T, text: String) {
    match common.format {
        FormatArg::Text => print!("{text}"),
        FormatArg::Machine => {
            println!(
                "{}",
                serde_json::to_string_pretty(report).expect("reports serialize")
            );
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<u8, CliError> {
    let game = load_game(&args.common.game)?;
    let universe = build_universe(&game, &args.common)?;
    let mode = Mode::from(args.mode);
    let trace = fixed_point(&game, mode, &universe);

    let mut payoffs: Vec<PayoffRow> = trace
        .fixed_point
        .iter()
        .map(|p| PayoffRow::new(&game, p))
        .collect();
    payoffs.sort_by(|a, b| a.path.cmp(&b.path));

    let mut penal_code = BTreeMap::new();
    let mut certificates = Vec::new();
    if !trace.fixed_point.is_empty() {
        let family = optimal_penal_code(&game, mode, &trace.fixed_point)
            .expect("fixed points are self-generating");
        for (player, path) in family.paths().iter().enumerate() {
            penal_code.insert(game.player_id(player).to_string(), path.literal(&game));
        }
        let mut bases: Vec<&Path> = trace.fixed_point.iter().collect();
        bases.sort_by_key(|p| p.literal(&game));
        for base in bases {
            match verify_family(&game, mode, base, &family) {
                VerifyOutcome::Accepted(cert) => {
                    certificates.push(CertificateReport::new(&game, &cert));
                }
                VerifyOutcome::Rejected(counter) => {
                    unreachable!("penal code must enforce fixed-point member: {counter:?}")
                }
            }
        }
    }

    let report = SolveReport {
        config: config_echo("solve", &args.common, Some(mode)),
        universe_size: universe.len(),
        trace: TraceReport::new(&game, &trace),
        payoffs,
        penal_code,
        certificates,
    };
    let text = report.render_text();
    emit(&args.common, &report, text);
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let game = load_game(&args.common.game)?;
    let mode = Mode::from(args.mode);
    let base = Path::parse(&game, &args.path)
        .map_err(|e| input_err("--path", e))?;
    if args.punish.len() != game.num_players() {
        return Err(CliError::Input(format!(
            "expected {} --punish literals (one per player), got {}",
            game.num_players(),
            args.punish.len()
        )));
    }
    let mut family_paths = Vec::with_capacity(args.punish.len());
    for literal in &args.punish {
        family_paths.push(Path::parse(&game, literal).map_err(|e| input_err("--punish", e))?);
    }
    let family = PunishmentFamily::new(family_paths);

    let outcome = verify_family(&game, mode, &base, &family);
    let family_map: BTreeMap<String, String> = family
        .paths()
        .iter()
        .enumerate()
        .map(|(player, p)| (game.player_id(player).to_string(), p.literal(&game)))
        .collect();
    let report = VerifyReport {
        config: config_echo("verify", &args.common, Some(mode)),
        base: base.literal(&game),
        family: family_map,
        accepted: outcome.is_accepted(),
        certificate: outcome
            .certificate()
            .map(|c| CertificateReport::new(&game, c)),
        counterexample: outcome
            .counterexample()
            .map(|c| CounterexampleReport::new(&game, &base, family.paths(), c)),
    };
    let text = report.render_text();
    emit(&args.common, &report, text);
    Ok(if report.accepted { 0 } else { EXIT_NEGATIVE })
}

fn cmd_stability(args: StabilityArgs) -> Result<u8, CliError> {
    let game = load_game(&args.common.game)?;
    let universe = build_universe(&game, &args.common)?;
    let mode = Mode::from(args.mode);
    let sb_text = std::fs::read_to_string(&args.sb)
        .map_err(|e| input_err(&format!("cannot read {}", args.sb.display()), e))?;
    let sb = StandardOfBehavior::parse(&game, &sb_text)
        .map_err(|e| input_err(&format!("{}", args.sb.display()), e))?;

    let in_universe: std::collections::BTreeSet<&Path> = universe.iter().collect();
    if let Some(outside) = sb.iter().find(|p| !in_universe.contains(p)) {
        return Err(CliError::Input(format!(
            "standard path {} lies outside universe(prefix<={}, cycle<={}); raise the bounds",
            outside.literal(&game),
            args.common.prefix,
            args.common.cycle
        )));
    }

    let internal = internal_stability(&game, mode, &sb, None);
    let external = external_stability(&game, mode, &sb, &universe, None);
    let standard: Vec<Path> = sb.iter().cloned().collect();
    let report = StabilityReport::build(
        &game,
        config_echo("stability", &args.common, Some(mode)),
        &standard,
        &internal,
        &external,
    );
    let text = report.render_text();
    let verdict = report.verdict();
    emit(&args.common, &report, text);
    Ok(if verdict { 0 } else { EXIT_NEGATIVE })
}

fn cmd_compare(args: CompareArgs) -> Result<u8, CliError> {
    let game = load_game(&args.common.game)?;
    let universe = build_universe(&game, &args.common)?;
    let comparison = compare_modes(&game, &universe);
    let mut nash_only: Vec<String> = comparison
        .nash_only
        .iter()
        .map(|p| p.literal(&game))
        .collect();
    nash_only.sort();
    let report = CompareReport {
        config: config_echo("compare", &args.common, None),
        universe_size: universe.len(),
        nash: TraceReport::new(&game, &comparison.nash),
        coalitional: TraceReport::new(&game, &comparison.coalitional),
        nash_only,
        containment_holds: comparison.containment_holds,
    };
    let text = report.render_text();
    emit(&args.common, &report, text);
    Ok(0)
}
