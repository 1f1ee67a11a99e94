//! Command-line front end: load games and deviation sets, run the
//! solvers, verify certificates, dump transcripts.
//!
//! Exit codes: 0 success, 1 input parse error, 2 solver error,
//! 3 verification violation.

use eahkit_cli::gen;

use clap::{Args, Parser, Subcommand};
use eahkit::arith::{Rat, RatVec};
use eahkit::deviation::{
    make_constant_deviations, make_swap_deviations, parse_deviation_set, DeviationSet,
};
use eahkit::ellipsoid::{EllipsoidConfig, EllipsoidTranscript};
use eahkit::games::{
    brute_force_equilibrium, efg_build_sequence_form, parse_game_tree, parse_nfg,
    verify_equilibrium, AnchoredGame, ExtensiveFormGame, NormalFormGame, PolyhedralGame,
    VerifyOutcome, DEFAULT_BRUTE_CAP,
};
use eahkit::phi::{
    emit_equilibrium, parse_equilibrium, solve_phi_equilibrium, MixtureEquilibrium, PhiOptions,
    PureProfile,
};
use eahkit::polytope::SeparationResult;
use eahkit::saddle::{
    anchored_simplex_domain, matrix_game_value, solve_saddle, SaddleOptions,
    VertexBestResponseGer, YDomain,
};
use eahkit::RatMat;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "eahkit", version, about = "Exact equilibria of polyhedral games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an exact equilibrium and write its certificate file.
    Solve(GameArgs),
    /// Re-verify an equilibrium file against the game, exactly.
    Verify(VerifyArgs),
    /// Solve by full enumeration and write the joint distribution.
    Bruteforce(GameArgs),
    /// Solve a bilinear matrix game with the built-in vertex oracle.
    Saddle(SaddleArgs),
    /// Print dimensions and facet complexities.
    Info(InfoArgs),
}

#[derive(Args)]
struct CommonTuning {
    /// Cap (base-2 exponent) for the initial ellipsoid radius.
    #[arg(long = "ellipsoid-R-exp")]
    r_exp: Option<u64>,
    /// Cap (base-2 exponent) for the volume threshold.
    #[arg(long = "ellipsoid-eps-exp")]
    eps_exp: Option<u64>,
    /// Maximum number of verify-and-escalate reruns.
    #[arg(long = "escalation-cap")]
    escalation_cap: Option<u32>,
    /// Dump the ellipsoid transcript, one line per iteration.
    #[arg(long)]
    transcript: bool,
}

#[derive(Args)]
struct GameArgs {
    /// Game file (`nfg`/`efg`), or `random:nfg:<seed-generated>` spec.
    #[arg(long)]
    game: String,
    /// Deviation choice: `swap`, `constant`, or `file:<path>`.
    #[arg(long)]
    phi: String,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for `random:` game specs (test-instance generation only).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tuning: CommonTuning,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    game: String,
    #[arg(long)]
    phi: String,
    /// Equilibrium file produced by `solve`.
    #[arg(long)]
    equilibrium: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SaddleArgs {
    /// Matrix game file.
    #[arg(long)]
    game: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tuning: CommonTuning,
}

#[derive(Args)]
struct InfoArgs {
    #[arg(long)]
    game: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum RunError {
    Parse(String),
    Solver(String),
    Violation(String),
}

impl RunError {
    fn code(&self) -> u8 {
        match self {
            RunError::Parse(_) => 1,
            RunError::Solver(_) => 2,
            RunError::Violation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            RunError::Parse(m) | RunError::Solver(m) | RunError::Violation(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bruteforce(args) => cmd_bruteforce(args),
        Command::Saddle(args) => cmd_saddle(args),
        Command::Info(args) => cmd_info(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

enum LoadedGame {
    Nfg(NormalFormGame),
    Efg(Box<ExtensiveFormGame>),
}

fn load_game(spec: &str, seed: u64) -> Result<LoadedGame, RunError> {
    if let Some(rest) = spec.strip_prefix("random:nfg:") {
        let dims = parse_random_dims(rest)?;
        return Ok(LoadedGame::Nfg(gen::random_nfg(&dims, seed)));
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| RunError::Parse(format!("cannot read `{spec}`: {e}")))?;
    let header = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    match header {
        "nfg" => Ok(LoadedGame::Nfg(
            parse_nfg(&text).map_err(|e| RunError::Parse(e.to_string()))?,
        )),
        "efg" => {
            let tree = parse_game_tree(&text).map_err(|e| RunError::Parse(e.to_string()))?;
            let game =
                efg_build_sequence_form(tree).map_err(|e| RunError::Parse(e.to_string()))?;
            Ok(LoadedGame::Efg(Box::new(game)))
        }
        other => Err(RunError::Parse(format!(
            "unrecognized game header `{other}` in `{spec}`"
        ))),
    }
}

/// `<d1>x<d2>x...` action counts for a generated normal-form game.
fn parse_random_dims(spec: &str) -> Result<Vec<usize>, RunError> {
    let dims: Vec<usize> = spec
        .split('x')
        .map(|t| t.parse().unwrap_or(0))
        .collect();
    if dims.len() < 1 || dims.iter().any(|&d| d == 0) {
        return Err(RunError::Parse(format!("bad random game spec `{spec}`")));
    }
    Ok(dims)
}

#[derive(Clone)]
enum PhiChoice {
    Swap,
    Constant,
    File(String),
}

fn parse_phi(spec: &str) -> Result<PhiChoice, RunError> {
    match spec {
        "swap" => Ok(PhiChoice::Swap),
        "constant" => Ok(PhiChoice::Constant),
        other => match other.strip_prefix("file:") {
            Some(path) if !path.is_empty() => Ok(PhiChoice::File(path.to_string())),
            _ => Err(RunError::Parse(format!(
                "deviation choice must be swap, constant, or file:<path>; got `{other}`"
            ))),
        },
    }
}

fn phi_options(tuning: &CommonTuning) -> PhiOptions {
    let mut opts = PhiOptions::default();
    apply_tuning(&mut opts.saddle, tuning);
    opts
}

fn apply_tuning(opts: &mut SaddleOptions, tuning: &CommonTuning) {
    let mut cfg = EllipsoidConfig::default();
    cfg.stall_window = opts.ellipsoid.stall_window;
    if let Some(r) = tuning.r_exp {
        cfg.radius_exp_cap = r;
    }
    if let Some(e) = tuning.eps_exp {
        cfg.eps_exp_cap = e;
    }
    opts.ellipsoid = cfg;
    if let Some(c) = tuning.escalation_cap {
        opts.escalation_cap = c;
    }
    opts.record_transcript = false;
}

fn constant_devs<G: PolyhedralGame>(game: &G) -> Result<Vec<DeviationSet>, RunError> {
    (0..game.num_players())
        .map(|p| {
            let verts = game.pure_strategies(p).ok();
            make_constant_deviations(p, game.strategy_set(p), verts.as_deref())
                .map_err(|e| RunError::Solver(e.to_string()))
        })
        .collect()
}

fn file_devs<G: PolyhedralGame>(game: &G, path: &str) -> Result<Vec<DeviationSet>, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Parse(format!("cannot read `{path}`: {e}")))?;
    let mut by_player: Vec<Option<DeviationSet>> = vec![None; game.num_players()];
    // The file holds one `deviation-set` block per player.
    let mut rest = text.as_str();
    while let Some(start) = rest.find("deviation-set") {
        let chunk = &rest[start..];
        let (player, dev) =
            parse_deviation_set(chunk).map_err(|e| RunError::Parse(e.to_string()))?;
        if player >= by_player.len() {
            return Err(RunError::Parse(format!(
                "deviation block names player {} but the game has {} players",
                player + 1,
                by_player.len()
            )));
        }
        if by_player[player].is_some() {
            return Err(RunError::Parse(format!(
                "duplicate deviation block for player {}",
                player + 1
            )));
        }
        if dev.matrix_dim != game.strategy_dim(player) {
            return Err(RunError::Parse(format!(
                "deviation matrices for player {} are {}x{} but the strategy dimension is {}",
                player + 1,
                dev.matrix_dim,
                dev.matrix_dim,
                game.strategy_dim(player)
            )));
        }
        by_player[player] = Some(dev);
        // Move past this block's header so the next search advances.
        rest = &chunk["deviation-set".len()..];
    }
    by_player
        .into_iter()
        .enumerate()
        .map(|(p, d)| {
            d.ok_or_else(|| {
                RunError::Parse(format!("no deviation block for player {}", p + 1))
            })
        })
        .collect()
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), RunError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| RunError::Solver(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn dump_transcripts(transcripts: &[EllipsoidTranscript]) {
    for (run, t) in transcripts.iter().enumerate() {
        println!(
            "transcript run {} outcome {:?} after {} iterations",
            run, t.stop_reason, t.iterations
        );
        for (i, step) in t.steps.iter().enumerate() {
            match &step.answer {
                SeparationResult::Inside => println!("iter {i} center {} inside", step.center),
                SeparationResult::Violated { normal, offset } => {
                    println!("iter {i} center {} cut {} <= {}", step.center, normal, offset)
                }
            }
        }
    }
}

/// Per-player strategy dimensions as used by the solver (anchored
/// dimensions when constant deviations require the embedding).
fn solver_dims<G: PolyhedralGame>(game: &G) -> Vec<usize> {
    (0..game.num_players()).map(|p| game.strategy_dim(p)).collect()
}

fn solve_pipeline<G: PolyhedralGame>(
    game: &G,
    devs: &[DeviationSet],
    opts: &PhiOptions,
) -> Result<MixtureEquilibrium, RunError> {
    solve_phi_equilibrium(game, devs, opts).map_err(|e| RunError::Solver(e.to_string()))
}

fn cmd_solve(args: GameArgs) -> Result<(), RunError> {
    let phi = parse_phi(&args.phi)?;
    let game = load_game(&args.game, args.seed)?;
    let mut opts = phi_options(&args.tuning);
    opts.saddle.record_transcript = args.tuning.transcript;

    let (dims, eq) = match (&game, &phi) {
        (LoadedGame::Nfg(g), PhiChoice::Swap) => {
            let devs: Vec<_> = g
                .dims()
                .iter()
                .enumerate()
                .map(|(p, &d)| make_swap_deviations(p, d))
                .collect();
            (solver_dims(g), solve_pipeline(g, &devs, &opts)?)
        }
        (LoadedGame::Nfg(g), PhiChoice::Constant) => {
            let anchored = AnchoredGame::new(g.clone());
            let devs = constant_devs(&anchored)?;
            (solver_dims(&anchored), solve_pipeline(&anchored, &devs, &opts)?)
        }
        (LoadedGame::Nfg(g), PhiChoice::File(path)) => {
            let devs = file_devs(g, path)?;
            (solver_dims(g), solve_pipeline(g, &devs, &opts)?)
        }
        (LoadedGame::Efg(_), PhiChoice::Swap) => {
            return Err(RunError::Solver(
                "swap deviations are not closed on sequence-form strategy sets; \
                 use --phi constant or --phi file:"
                    .to_string(),
            ))
        }
        (LoadedGame::Efg(g), PhiChoice::Constant) => {
            let devs = constant_devs(g.as_ref())?;
            (solver_dims(g.as_ref()), solve_pipeline(g.as_ref(), &devs, &opts)?)
        }
        (LoadedGame::Efg(g), PhiChoice::File(path)) => {
            let devs = file_devs(g.as_ref(), path)?;
            (solver_dims(g.as_ref()), solve_pipeline(g.as_ref(), &devs, &opts)?)
        }
    };

    let n: usize = dims.iter().map(|d| d * d).sum();
    eprintln!(
        "support {} of at most N = {}; value check {}; {} oracle calls over {} iterations",
        eq.support.len(),
        n,
        eq.value_check,
        eq.stats.ger_calls,
        eq.stats.ellipsoid_iterations
    );
    if args.tuning.transcript {
        dump_transcripts(&eq.transcripts);
    }
    write_or_print(&args.out, &emit_equilibrium(&dims, &eq))
}

fn cmd_verify(args: VerifyArgs) -> Result<(), RunError> {
    let phi = parse_phi(&args.phi)?;
    let game = load_game(&args.game, args.seed)?;
    let text = std::fs::read_to_string(&args.equilibrium).map_err(|e| {
        RunError::Parse(format!(
            "cannot read `{}`: {e}",
            args.equilibrium.display()
        ))
    })?;
    let (dims, support) =
        parse_equilibrium(&text).map_err(|e| RunError::Parse(e.to_string()))?;

    fn check<G: PolyhedralGame>(
        game: &G,
        devs: &[DeviationSet],
        dims: &[usize],
        support: &[(PureProfile, Rat)],
    ) -> Result<(), RunError> {
        let expect = solver_dims(game);
        if dims != expect {
            return Err(RunError::Parse(format!(
                "equilibrium dims {dims:?} do not match the game ({expect:?})"
            )));
        }
        match verify_equilibrium(game, devs, support) {
            Ok(VerifyOutcome::Pass { certificate }) => {
                println!(
                    "pass: max deviation benefit {}",
                    certificate.max_benefit()
                );
                Ok(())
            }
            Ok(VerifyOutcome::Violation {
                player,
                vertex_index,
                benefit,
            }) => Err(RunError::Violation(format!(
                "player {} gains {} by deviation vertex {}",
                player + 1,
                benefit,
                vertex_index
            ))),
            Ok(VerifyOutcome::Invalid { reason }) => Err(RunError::Violation(format!(
                "not a valid mixture: {reason}"
            ))),
            Err(e) => Err(RunError::Solver(e.to_string())),
        }
    }

    match (&game, &phi) {
        (LoadedGame::Nfg(g), PhiChoice::Swap) => {
            let devs: Vec<_> = g
                .dims()
                .iter()
                .enumerate()
                .map(|(p, &d)| make_swap_deviations(p, d))
                .collect();
            check(g, &devs, &dims, &support)
        }
        (LoadedGame::Nfg(g), PhiChoice::Constant) => {
            let anchored = AnchoredGame::new(g.clone());
            let devs = constant_devs(&anchored)?;
            check(&anchored, &devs, &dims, &support)
        }
        (LoadedGame::Nfg(g), PhiChoice::File(path)) => {
            let devs = file_devs(g, path)?;
            check(g, &devs, &dims, &support)
        }
        (LoadedGame::Efg(_), PhiChoice::Swap) => Err(RunError::Solver(
            "swap deviations are not closed on sequence-form strategy sets".to_string(),
        )),
        (LoadedGame::Efg(g), PhiChoice::Constant) => {
            let devs = constant_devs(g.as_ref())?;
            check(g.as_ref(), &devs, &dims, &support)
        }
        (LoadedGame::Efg(g), PhiChoice::File(path)) => {
            let devs = file_devs(g.as_ref(), path)?;
            check(g.as_ref(), &devs, &dims, &support)
        }
    }
}

fn brute_cap() -> usize {
    std::env::var("EAHKIT_MAX_BRUTE")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BRUTE_CAP)
}

fn cmd_bruteforce(args: GameArgs) -> Result<(), RunError> {
    let phi = parse_phi(&args.phi)?;
    let game = load_game(&args.game, args.seed)?;

    fn run<G: PolyhedralGame>(
        game: &G,
        devs: &[DeviationSet],
        out: &Option<PathBuf>,
    ) -> Result<(), RunError> {
        let report = brute_force_equilibrium(game, devs, brute_cap())
            .map_err(|e| RunError::Solver(e.to_string()))?;
        let dims = solver_dims(game);
        let mut s = String::new();
        let _ = writeln!(s, "bruteforce-report");
        let _ = writeln!(s, "players {}", dims.len());
        let ds: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "dims {}", ds.join(" "));
        let _ = writeln!(s, "feasible {}", report.feasible);
        let _ = writeln!(s, "profiles {}", report.profiles.len());
        for (profile, w) in report.profiles.iter().zip(&report.weights) {
            let mut line = format!("weight {w}");
            for v in &profile.strategies {
                line.push_str(" | ");
                line.push_str(&v.to_string());
            }
            let _ = writeln!(s, "{line}");
        }
        let _ = writeln!(s, "end");
        eprintln!(
            "bruteforce: {} profiles, feasible = {}",
            report.profiles.len(),
            report.feasible
        );
        write_or_print(out, &s)
    }

    match (&game, &phi) {
        (LoadedGame::Nfg(g), PhiChoice::Swap) => {
            let devs: Vec<_> = g
                .dims()
                .iter()
                .enumerate()
                .map(|(p, &d)| make_swap_deviations(p, d))
                .collect();
            run(g, &devs, &args.out)
        }
        (LoadedGame::Nfg(g), PhiChoice::Constant) => {
            let anchored = AnchoredGame::new(g.clone());
            let devs = constant_devs(&anchored)?;
            run(&anchored, &devs, &args.out)
        }
        (LoadedGame::Nfg(g), PhiChoice::File(path)) => {
            let devs = file_devs(g, path)?;
            run(g, &devs, &args.out)
        }
        (LoadedGame::Efg(_), PhiChoice::Swap) => Err(RunError::Solver(
            "swap deviations are not closed on sequence-form strategy sets".to_string(),
        )),
        (LoadedGame::Efg(g), PhiChoice::Constant) => {
            let devs = constant_devs(g.as_ref())?;
            run(g.as_ref(), &devs, &args.out)
        }
        (LoadedGame::Efg(g), PhiChoice::File(path)) => {
            let devs = file_devs(g.as_ref(), path)?;
            run(g.as_ref(), &devs, &args.out)
        }
    }
}

/// Matrix game file:
///
/// ```text
/// matrix
/// rows <m>
/// cols <n>
/// <m lines of n rationals>
/// end
/// ```
fn parse_matrix(input: &str) -> Result<RatMat, RunError> {
    let err = |line: usize, m: &str| RunError::Parse(format!("line {}: {}", line + 1, m));
    let mut rows: Option<usize> = None;
    let mut cols: Option<usize> = None;
    let mut data: Vec<RatVec> = Vec::new();
    let mut saw_header = false;
    for (ln, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "matrix" {
                return Err(err(ln, "expected `matrix` header"));
            }
            saw_header = true;
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next().unwrap() {
            "rows" => rows = tokens.next().and_then(|t| t.parse().ok()),
            "cols" => cols = tokens.next().and_then(|t| t.parse().ok()),
            "end" => break,
            first => {
                let c = cols.ok_or_else(|| err(ln, "entries before `cols`"))?;
                let mut entries = Vec::with_capacity(c);
                entries.push(
                    first
                        .parse::<Rat>()
                        .map_err(|e| err(ln, &e.to_string()))?,
                );
                for t in tokens {
                    entries.push(t.parse::<Rat>().map_err(|e| err(ln, &e.to_string()))?);
                }
                if entries.len() != c {
                    return Err(err(ln, "wrong entry count"));
                }
                data.push(RatVec::from_entries(entries));
            }
        }
    }
    let m = rows.ok_or_else(|| RunError::Parse("missing `rows`".to_string()))?;
    if data.len() != m {
        return Err(RunError::Parse(format!(
            "expected {m} matrix rows, found {}",
            data.len()
        )));
    }
    Ok(RatMat::from_rows(data))
}

fn cmd_saddle(args: SaddleArgs) -> Result<(), RunError> {
    let text = std::fs::read_to_string(&args.game)
        .map_err(|e| RunError::Parse(format!("cannot read `{}`: {e}", args.game)))?;
    let a = parse_matrix(&text)?;
    let (value, _) = matrix_game_value(&a).map_err(|e| RunError::Solver(e.to_string()))?;
    let mut ger = VertexBestResponseGer::new(&a, &value);
    let domain =
        anchored_simplex_domain(a.cols()).map_err(|e| RunError::Solver(e.to_string()))?;
    let mut opts = SaddleOptions::default();
    apply_tuning(&mut opts, &args.tuning);
    opts.record_transcript = args.tuning.transcript;
    let phi = domain.polytope().facet_complexity();
    let sol = solve_saddle(&mut ger, &domain, phi, &opts)
        .map_err(|e| RunError::Solver(e.to_string()))?;

    let mut s = String::new();
    let _ = writeln!(s, "saddle-report");
    let _ = writeln!(s, "rows {}", a.rows());
    let _ = writeln!(s, "cols {}", a.cols());
    let _ = writeln!(s, "value {value}");
    let _ = writeln!(s, "support {}", sol.mixture.len());
    let mut strategy = RatVec::zeros(a.rows());
    for (resp, w) in &sol.mixture {
        let mut line = format!("response {} weight {w} row", resp.handle);
        let _ = write!(line, " {}", resp.row);
        let _ = writeln!(s, "{line}");
        strategy = strategy.add(&RatVec::unit(a.rows(), resp.handle).scale(w));
    }
    let _ = writeln!(s, "maximin-strategy {strategy}");
    let _ = writeln!(s, "value-check {}", sol.value_check);
    let _ = writeln!(s, "end");
    eprintln!(
        "saddle: value {value}, support {}, {} oracle calls, verified min {}",
        sol.mixture.len(),
        sol.stats.ger_calls,
        sol.value_check
    );
    if args.tuning.transcript {
        dump_transcripts(&sol.transcripts);
    }
    write_or_print(&args.out, &s)
}

fn cmd_info(args: InfoArgs) -> Result<(), RunError> {
    if !args.game.starts_with("random:") {
        let text = std::fs::read_to_string(&args.game)
            .map_err(|e| RunError::Parse(format!("cannot read `{}`: {e}", args.game)))?;
        let header = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .unwrap_or("");
        if header == "matrix" {
            let a = parse_matrix(&text)?;
            println!("matrix game: {} x {}", a.rows(), a.cols());
            return Ok(());
        }
    }
    let game = load_game(&args.game, args.seed)?;
    fn describe<G: PolyhedralGame>(game: &G, kind: &str) {
        let dims = solver_dims(game);
        let n: usize = dims.iter().map(|d| d * d).sum();
        println!("{kind} with {} players", game.num_players());
        println!("strategy dims: {dims:?}");
        println!("N = sum of squared dims = {n}");
        for p in 0..game.num_players() {
            println!(
                "player {}: facet complexity {}",
                p + 1,
                game.strategy_set(p).facet_complexity()
            );
        }
    }
    match &game {
        LoadedGame::Nfg(g) => describe(g, "normal-form game"),
        LoadedGame::Efg(g) => {
            describe(g.as_ref(), "extensive-form game");
            for p in 0..g.num_players() {
                println!(
                    "player {}: {} sequences, {} information sets",
                    p + 1,
                    g.sequence_count(p),
                    g.infoset_count(p)
                );
            }
        }
    }
    Ok(())
}
