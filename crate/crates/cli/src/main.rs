//! Command-line front end: parsing, model checking, game solving, the
//! winning-region encodings, and the randomized verification pipelines.
//!
//! Exit codes: 0 success, 1 checked property is false, 2 usage or input
//! error, 3 a verification pipeline found counterexamples. All stdout is
//! deterministic for a fixed command line (timings go to stderr).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mucalc::encoder::{self, EncodeMode, MacroOp, Variant, WitnessFrames};
use mucalc::evalgame;
use mucalc::formula::{self, classify, Formula};
use mucalc::generate::{FormulaKnobs, GameKnobs, ModelKnobs};
use mucalc::kripke::{DistanceMode, FrameProperty, KripkeModel, PointedModel};
use mucalc::paritygame::{Owner, ParityGame};
use mucalc::semantics;
use mucalc::verify::{
    self, EvalEncodingConfig, FixpointConfig, FixpointReport, VerificationReport, WnConfig,
};

const EXIT_PROPERTY_FALSE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_COUNTEREXAMPLES: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mucalc",
    version,
    about = "Workbench for the multimodal mu-calculus: model checking, parity games, and Kripke-model encodings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its canonical form
    Parse {
        /// Formula text, e.g. "mu X . p | <0> X"
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// Print a formula's alternation-hierarchy levels
    Depth {
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a formula in a model at a world (exit 0 true, 1 false)
    Check {
        /// Model JSON file
        model: PathBuf,
        /// World to evaluate at
        world: String,
        formula: String,
        #[arg(long, value_enum, default_value_t)]
        method: Method,
        #[arg(long)]
        json: bool,
    },
    /// Solve a parity game and print the winning regions and strategies
    Solve {
        /// Game file in PGSolver format
        game: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the evaluation game of a formula over a pointed model
    Evalgame {
        /// Model JSON file (must carry a point unless --world is given)
        model: PathBuf,
        formula: String,
        /// World to start from, overriding the model's point
        #[arg(long)]
        world: Option<String>,
    },
    /// Encode a parity game as a pointed multimodal Kripke model
    Encode {
        /// Game file in PGSolver format
        game: PathBuf,
        #[command(flatten)]
        enc: EncoderOpts,
        /// Priority bound for the marker vocabulary (default: the game's
        /// maximum priority)
        #[arg(long)]
        max_parity: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Print the winning-region formula for priorities up to n
    Wn {
        n: u32,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        variant: u8,
        #[arg(long, value_enum, default_value_t)]
        macro_op: MacroOpArg,
    },
    /// Test two pointed models for isomorphism (exit 0 yes, 1 no)
    Iso {
        a: PathBuf,
        b: PathBuf,
        /// Compare only the distance-< radius neighbourhoods of the points
        #[arg(long)]
        radius: Option<usize>,
        /// Measure distance over undirected edges
        #[arg(long)]
        undirected_distance: bool,
        #[arg(long)]
        json: bool,
    },
    /// Randomized verification pipelines (exit 3 on counterexamples)
    Verify {
        #[command(subcommand)]
        pipeline: Pipeline,
    },
    /// Iterate the evaluation-game encoding of f & f and check that
    /// consecutive iterates agree on growing neighbourhoods of the point
    Fixpoint {
        formula: String,
        /// Seed model JSON file (must carry a point)
        model: PathBuf,
        /// Number of encoding applications
        #[arg(long, default_value_t = 2)]
        steps: usize,
        #[command(flatten)]
        enc: EncoderOpts,
        /// Abort when an iterate exceeds this many worlds
        #[arg(long, default_value_t = 100_000)]
        world_budget: usize,
        #[arg(long)]
        undirected_distance: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum Pipeline {
    /// Denotational semantics vs the evaluation game on random pairs
    Oracle {
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        max_worlds: usize,
        #[arg(long, default_value_t = 12)]
        max_size: usize,
        #[arg(long, default_value_t = 3)]
        max_fixpoints: usize,
        #[arg(long)]
        json: bool,
    },
    /// Winning-region formula vs the game solver on random games
    Wn {
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        enc: EncoderOpts,
        #[arg(long, default_value_t = 8)]
        max_vertices: usize,
        #[arg(long, default_value_t = 2)]
        max_priority: u32,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long, value_enum, default_value_t)]
        macro_op: MacroOpArg,
        #[arg(long)]
        json: bool,
    },
    /// Formula truth vs winning-region truth on encoded evaluation games
    Eval {
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        enc: EncoderOpts,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
        #[arg(long, default_value_t = 8)]
        max_size: usize,
        #[arg(long, default_value_t = 2)]
        max_fixpoints: usize,
        #[arg(long, value_enum, default_value_t)]
        macro_op: MacroOpArg,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct EncoderOpts {
    /// Gadget variant (1, 2 or 3)
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    variant: u8,
    /// Witness kit: `minimal`, `s5`, or `file:<path>`
    #[arg(long, default_value = "minimal")]
    witness: String,
    /// Layout mode (default: graph for minimal witnesses, strict otherwise)
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

struct ResolvedEncoder {
    variant: Variant,
    witness: WitnessFrames,
    mode: EncodeMode,
    /// Frame properties the witness kit promises for every reduct.
    reducts: Vec<FrameProperty>,
}

impl EncoderOpts {
    fn resolve(&self) -> Result<ResolvedEncoder, String> {
        let variant = Variant::try_from(self.variant).expect("clap bounds the value");
        let (witness, default_mode, reducts) = match self.witness.as_str() {
            "minimal" => (WitnessFrames::minimal(variant), EncodeMode::Graph, vec![]),
            "s5" => (
                WitnessFrames::s5(variant),
                EncodeMode::Strict,
                vec![
                    FrameProperty::Reflexive,
                    FrameProperty::Symmetric,
                    FrameProperty::Transitive,
                ],
            ),
            other => match other.strip_prefix("file:") {
                Some(path) => {
                    let text = read(Path::new(path))?;
                    let wf = WitnessFrames::from_json(&text).map_err(|e| format!("{path}: {e}"))?;
                    if wf.variant != variant {
                        return Err(format!(
                            "{path}: witness kit is for variant {}, requested variant {variant}",
                            wf.variant
                        ));
                    }
                    (wf, EncodeMode::Strict, vec![])
                }
                None => {
                    return Err(format!(
                        "unknown witness kit {other:?} (expected minimal, s5, or file:<path>)"
                    ))
                }
            },
        };
        let mode = match self.mode {
            Some(ModeArg::Graph) => EncodeMode::Graph,
            Some(ModeArg::Strict) => EncodeMode::Strict,
            None => default_mode,
        };
        Ok(ResolvedEncoder {
            variant,
            witness,
            mode,
            reducts,
        })
    }
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum Method {
    #[default]
    Denotational,
    Game,
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum MacroOpArg {
    #[default]
    PerVariant,
    ForceMu,
    ForceNu,
}

impl From<MacroOpArg> for MacroOp {
    fn from(arg: MacroOpArg) -> MacroOp {
        match arg {
            MacroOpArg::PerVariant => MacroOp::PerVariant,
            MacroOpArg::ForceMu => MacroOp::ForceMu,
            MacroOpArg::ForceNu => MacroOp::ForceNu,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Graph,
    Strict,
}

fn main() -> ExitCode {
    // Die quietly when the read end of a pipe closes (e.g. `mucalc … | head`)
    // instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_formula(text: &str) -> Result<Formula, String> {
    formula::parse(text).map_err(|e| e.to_string())
}

fn load_game(path: &Path) -> Result<ParityGame, String> {
    ParityGame::read_pg(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_model(path: &Path) -> Result<(KripkeModel, Option<String>), String> {
    KripkeModel::from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_pointed(path: &Path, world: Option<&str>) -> Result<PointedModel, String> {
    let (model, point) = load_model(path)?;
    let point = match world {
        Some(w) => w.to_string(),
        None => {
            point.ok_or_else(|| format!("{}: model has no point; pass --world", path.display()))?
        }
    };
    PointedModel::new(model, point).map_err(|e| e.to_string())
}

fn owner_str(o: Owner) -> &'static str {
    match o {
        Owner::Exists => "exists",
        Owner::Forall => "forall",
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Parse { formula, json } => {
            let f = parse_formula(&formula)?;
            if json {
                println!(
                    "{}",
                    json!({
                        "formula": f.to_string(),
                        "size": f.size(),
                        "fixpoints": f.count_fixpoints(),
                        "closed": f.is_closed(),
                    })
                );
            } else {
                println!("{f}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Depth { formula, json } => {
            let f = parse_formula(&formula)?;
            let level = classify(&f);
            if json {
                println!(
                    "{}",
                    json!({
                        "formula": f.to_string(),
                        "sigma_level": level.sigma_level,
                        "pi_level": level.pi_level,
                    })
                );
            } else {
                println!("sigma-level: {}", level.sigma_level);
                println!("pi-level: {}", level.pi_level);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            model,
            world,
            formula,
            method,
            json,
        } => {
            let pm = load_pointed(&model, Some(&world))?;
            let f = parse_formula(&formula)?;
            let holds = match method {
                Method::Denotational => semantics::holds(&pm, &f).map_err(|e| e.to_string())?,
                Method::Game => evalgame::check_via_game(&pm, &f).map_err(|e| e.to_string())?,
            };
            if json {
                let method = match method {
                    Method::Denotational => "denotational",
                    Method::Game => "game",
                };
                println!("{}", json!({ "holds": holds, "method": method }));
            } else {
                println!("{holds}");
            }
            Ok(if holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_PROPERTY_FALSE)
            })
        }
        Command::Solve { game, json } => {
            let g = load_game(&game)?;
            let solution = g.solve();
            if json {
                let strategy = |map: &std::collections::BTreeMap<u32, u32>| -> serde_json::Value {
                    json!(map
                        .iter()
                        .map(|(k, v)| (k.to_string(), *v))
                        .collect::<std::collections::BTreeMap<String, u32>>())
                };
                println!(
                    "{}",
                    json!({
                        "initial": g.initial(),
                        "winner": owner_str(solution.winner_of(g.initial())),
                        "win_exists": solution.win_exists,
                        "win_forall": solution.win_forall,
                        "strategy_exists": strategy(&solution.strategy_exists),
                        "strategy_forall": strategy(&solution.strategy_forall),
                    })
                );
            } else {
                println!(
                    "winner at vertex {}: {}",
                    g.initial(),
                    owner_str(solution.winner_of(g.initial()))
                );
                let list = |s: &std::collections::BTreeSet<u32>| {
                    s.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
                };
                println!("win exists: {}", list(&solution.win_exists));
                println!("win forall: {}", list(&solution.win_forall));
                let moves = |m: &std::collections::BTreeMap<u32, u32>| {
                    m.iter()
                        .map(|(a, b)| format!("{a}->{b}"))
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                println!("strategy exists: {}", moves(&solution.strategy_exists));
                println!("strategy forall: {}", moves(&solution.strategy_forall));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Evalgame {
            model,
            formula,
            world,
        } => {
            let pm = load_pointed(&model, world.as_deref())?;
            let f = parse_formula(&formula)?;
            let eg = evalgame::build_eval_game(&pm, &f).map_err(|e| e.to_string())?;
            print!("{}", eg.game.write_pg());
            Ok(ExitCode::SUCCESS)
        }
        Command::Encode {
            game,
            enc,
            max_parity,
            json,
        } => {
            let g = load_game(&game)?;
            let r = enc.resolve()?;
            let bound = max_parity.unwrap_or_else(|| g.max_priority());
            let encoding =
                encoder::encode(&g, &r.witness, bound, r.mode).map_err(|e| e.to_string())?;
            if json {
                let model: serde_json::Value = serde_json::from_str(&encoding.pointed().to_json())
                    .expect("canonical model JSON parses");
                let vertex_map: std::collections::BTreeMap<String, &String> = encoding
                    .vertex_map
                    .iter()
                    .map(|(v, w)| (v.to_string(), w))
                    .collect();
                println!(
                    "{}",
                    json!({
                        "model": model,
                        "vertex_map": vertex_map,
                        "variant": u8::from(encoding.variant),
                        "max_parity": encoding.max_parity,
                        "initial_world": encoding.initial_world,
                    })
                );
            } else {
                println!("{}", encoding.pointed().to_json());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Wn {
            n,
            variant,
            macro_op,
        } => {
            let variant = Variant::try_from(variant).expect("clap bounds the value");
            println!("{}", encoder::wn_with(n, variant, macro_op.into()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Iso {
            a,
            b,
            radius,
            undirected_distance,
            json,
        } => {
            let pa = PointedModel::from_json(&read(&a)?).map_err(|e| e.to_string())?;
            let pb = PointedModel::from_json(&read(&b)?).map_err(|e| e.to_string())?;
            let mode = if undirected_distance {
                DistanceMode::Undirected
            } else {
                DistanceMode::Directed
            };
            let witness = match radius {
                Some(r) => pa.n_isomorphic(&pb, r, mode),
                None => pa.isomorphic(&pb),
            };
            if json {
                println!(
                    "{}",
                    match &witness {
                        Some(map) => json!({ "isomorphic": true, "witness": map }),
                        None => json!({ "isomorphic": false }),
                    }
                );
            } else {
                match &witness {
                    Some(map) => {
                        println!("isomorphic");
                        for (x, y) in map {
                            println!("{x} -> {y}");
                        }
                    }
                    None => println!("not isomorphic"),
                }
            }
            Ok(if witness.is_some() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_PROPERTY_FALSE)
            })
        }
        Command::Verify { pipeline } => run_pipeline(pipeline),
        Command::Fixpoint {
            formula,
            model,
            steps,
            enc,
            world_budget,
            undirected_distance,
            json,
        } => {
            let f = parse_formula(&formula)?;
            let seed_model = PointedModel::from_json(&read(&model)?).map_err(|e| e.to_string())?;
            let r = enc.resolve()?;
            let cfg = FixpointConfig {
                witness: r.witness,
                mode: r.mode,
                steps,
                world_budget,
                distance: if undirected_distance {
                    DistanceMode::Undirected
                } else {
                    DistanceMode::Directed
                },
            };
            let report = verify::run_fixpoint(&f, &seed_model, &cfg).map_err(|e| e.to_string())?;
            eprintln!("elapsed: {:?}", report.elapsed);
            print_fixpoint_report(&report, json);
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_PROPERTY_FALSE)
            })
        }
    }
}

fn run_pipeline(pipeline: Pipeline) -> Result<ExitCode, String> {
    let (report, json) = match pipeline {
        Pipeline::Oracle {
            trials,
            seed,
            max_worlds,
            max_size,
            max_fixpoints,
            json,
        } => {
            let models = ModelKnobs {
                max_worlds,
                ..ModelKnobs::default()
            };
            let formulas = FormulaKnobs {
                max_size,
                max_fixpoints,
                ..FormulaKnobs::default()
            };
            (
                verify::verify_oracle(trials, seed, &models, &formulas),
                json,
            )
        }
        Pipeline::Wn {
            trials,
            seed,
            enc,
            max_vertices,
            max_priority,
            max_degree,
            macro_op,
            json,
        } => {
            let r = enc.resolve()?;
            let mut cfg = WnConfig::new(r.variant, r.witness, r.mode);
            cfg.games = GameKnobs {
                max_vertices,
                max_priority,
                max_out_degree: max_degree,
            };
            cfg.reduct_checks = r.reducts;
            cfg.macro_op = macro_op.into();
            (verify::verify_wn(trials, seed, &cfg), json)
        }
        Pipeline::Eval {
            trials,
            seed,
            enc,
            max_worlds,
            max_size,
            max_fixpoints,
            macro_op,
            json,
        } => {
            let r = enc.resolve()?;
            let mut cfg = EvalEncodingConfig::new(r.variant, r.witness, r.mode);
            cfg.models = ModelKnobs {
                max_worlds,
                ..ModelKnobs::default()
            };
            cfg.formulas = FormulaKnobs {
                max_size,
                max_fixpoints,
                ..FormulaKnobs::default()
            };
            cfg.macro_op = macro_op.into();
            (verify::verify_eval_encoding(trials, seed, &cfg), json)
        }
    };
    eprintln!("elapsed: {:?}", report.elapsed);
    print_verification_report(&report, json);
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_COUNTEREXAMPLES)
    })
}

fn print_verification_report(report: &VerificationReport, json: bool) {
    if json {
        println!("{}", report.to_json());
        return;
    }
    println!("pipeline: {}", report.pipeline);
    println!("seed: {}", report.seed);
    println!("trials: {}", report.trials);
    println!("agreements: {}", report.agreements);
    println!("counterexamples: {}", report.counterexamples.len());
    for cx in &report.counterexamples {
        println!("counterexample at trial {}:", cx.trial);
        println!("  inputs: {}", cx.inputs);
        println!("  expected: {}", cx.expected);
        println!("  got: {}", cx.got);
    }
}

fn print_fixpoint_report(report: &FixpointReport, json: bool) {
    if json {
        println!("{}", report.to_json());
        return;
    }
    println!("formula: {}", report.formula);
    println!(
        "sizes: {}",
        report
            .sizes
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    );
    for check in &report.checks {
        println!(
            "radius {}: {}",
            check.radius,
            if check.isomorphic {
                "isomorphic"
            } else {
                "NOT isomorphic"
            }
        );
    }
    if let Some(msg) = &report.aborted {
        println!("aborted: {msg}");
    }
}
