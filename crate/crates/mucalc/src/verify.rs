//! Randomized verification pipelines.
//!
//! Each pipeline draws seeded instances from [`crate::generate`], checks a
//! cross-implementation property — the denotational semantics against the
//! evaluation game, or the winning-region formula against the parity-game
//! solver — and returns a [`VerificationReport`]. A report with zero
//! counterexamples is reproducible from its `(pipeline, seed)` pair, and
//! every counterexample can be replayed from its trial number via
//! [`generate::trial_rng`].

use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::encoder::{self, EncodeError, EncodeMode, Encoding, MacroOp, Variant, WitnessFrames};
use crate::evalgame;
use crate::formula::{self, Formula};
use crate::generate::{self, FormulaKnobs, GameKnobs, ModelKnobs};
use crate::kripke::{DistanceMode, FrameProperty, Isomorphism, PointedModel};
use crate::semantics;

/// One disagreement between the property's two sides.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    /// Trial index; `generate::trial_rng(report.seed, trial)` replays it.
    pub trial: u64,
    /// The generated instance, rendered in its canonical text form.
    pub inputs: String,
    pub expected: String,
    pub got: String,
}

/// Outcome of a pipeline run. Invariant:
/// `agreements + counterexamples.len() == trials`.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub pipeline: String,
    pub trials: u64,
    pub agreements: u64,
    pub counterexamples: Vec<Counterexample>,
    pub seed: u64,
    /// Wall-clock time; excluded from the JSON rendering so identical
    /// runs stay byte-identical.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    /// Canonical single-line JSON; deterministic for a given seed.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

/// Run `trials` seeded trials; `check` returns `None` on agreement and a
/// counterexample otherwise (at most one per trial, so the report
/// invariant holds by construction).
fn run_trials(
    pipeline: &str,
    trials: u64,
    seed: u64,
    mut check: impl FnMut(u64, &mut ChaCha8Rng) -> Option<Counterexample>,
) -> VerificationReport {
    let start = Instant::now();
    let mut report = VerificationReport {
        pipeline: pipeline.to_string(),
        trials,
        agreements: 0,
        counterexamples: Vec::new(),
        seed,
        elapsed: Duration::ZERO,
    };
    for trial in 0..trials {
        let mut rng = generate::trial_rng(seed, trial);
        match check(trial, &mut rng) {
            None => report.agreements += 1,
            Some(cx) => report.counterexamples.push(cx),
        }
    }
    report.elapsed = start.elapsed();
    report
}

/// Clamp the formula knobs' modal indices to the model knobs' signature,
/// so generated pairs never mention a relation the model lacks.
fn clamped(formulas: &FormulaKnobs, models: &ModelKnobs) -> FormulaKnobs {
    FormulaKnobs {
        indices: formulas.indices.min(models.indices),
        ..formulas.clone()
    }
}

/// Cross-check the denotational semantics against the evaluation-game
/// route on random (pointed model, closed formula) pairs.
pub fn verify_oracle(
    trials: u64,
    seed: u64,
    models: &ModelKnobs,
    formulas: &FormulaKnobs,
) -> VerificationReport {
    let formulas = clamped(formulas, models);
    run_trials("oracle", trials, seed, |trial, rng| {
        let pm = generate::model(rng, models);
        let f = generate::formula(rng, &formulas);
        let expected = semantics::holds(&pm, &f)
            .expect("generated formulas are closed and within the signature");
        let got = evalgame::check_via_game(&pm, &f)
            .expect("generated formulas are closed and within the signature");
        if expected == got {
            None
        } else {
            Some(Counterexample {
                trial,
                inputs: format!("model {} formula {f}", pm.to_json()),
                expected: expected.to_string(),
                got: got.to_string(),
            })
        }
    })
}

/// Configuration for [`verify_wn`].
#[derive(Debug, Clone)]
pub struct WnConfig {
    pub variant: Variant,
    pub witness: WitnessFrames,
    pub mode: EncodeMode,
    pub games: GameKnobs,
    /// Draw tree-shaped games (required for [`EncodeMode::Strict`])
    /// instead of arbitrary digraphs.
    pub tree_shaped: bool,
    /// Frame properties every relation reduct of every encoding must
    /// satisfy (empty unless the witness kit promises a frame class).
    pub reduct_checks: Vec<FrameProperty>,
    pub macro_op: MacroOp,
}

impl WnConfig {
    pub fn new(variant: Variant, witness: WitnessFrames, mode: EncodeMode) -> Self {
        WnConfig {
            variant,
            witness,
            mode,
            games: GameKnobs::default(),
            tree_shaped: mode == EncodeMode::Strict,
            reduct_checks: Vec::new(),
            macro_op: MacroOp::PerVariant,
        }
    }
}

/// Check, on random parity games, that the winning-region formula holds
/// at a vertex's designated world exactly when the solver puts that
/// vertex in the existential player's winning region — and that the
/// encoding passes the marker discipline and any configured reduct
/// checks.
pub fn verify_wn(trials: u64, seed: u64, cfg: &WnConfig) -> VerificationReport {
    let name = format!("wn/variant-{}", cfg.variant);
    run_trials(&name, trials, seed, |trial, rng| {
        let g = if cfg.tree_shaped {
            generate::tree_game(rng, &cfg.games)
        } else {
            generate::game(rng, &cfg.games)
        };
        let enc = match encoder::encode(&g, &cfg.witness, cfg.games.max_priority, cfg.mode) {
            Ok(enc) => enc,
            Err(e) => {
                return Some(Counterexample {
                    trial,
                    inputs: format!("game {}", g.write_pg()),
                    expected: "an encoding".to_string(),
                    got: e.to_string(),
                })
            }
        };
        if let Some(cx) = audit_encoding(trial, &g.write_pg(), &enc, &cfg.reduct_checks) {
            return Some(cx);
        }
        let wn = enc.wn_formula(cfg.macro_op);
        let truth = semantics::evaluate(&enc.model, &wn)
            .expect("the winning-region formula is closed and within the signature");
        let winners = g.solve().win_exists;
        for v in g.vertices() {
            let expected = winners.contains(&v);
            let world = enc
                .world_of(v)
                .expect("every vertex has a designated world");
            let got = truth.contains(world);
            if expected != got {
                return Some(Counterexample {
                    trial,
                    inputs: format!("game {} vertex {v}", g.write_pg()),
                    expected: format!("wn {expected} at {world}"),
                    got: format!("wn {got}"),
                });
            }
        }
        None
    })
}

/// Marker-discipline and reduct checks shared by the encoding pipelines.
fn audit_encoding(
    trial: u64,
    inputs: &str,
    enc: &Encoding,
    reduct_checks: &[FrameProperty],
) -> Option<Counterexample> {
    let violations = enc.marker_violations();
    if !violations.is_empty() {
        return Some(Counterexample {
            trial,
            inputs: format!("game {inputs}"),
            expected: "no marker violations".to_string(),
            got: violations.join("; "),
        });
    }
    for &i in enc.model.signature().clone().iter() {
        let results = enc
            .model
            .check_frame_properties(i, reduct_checks)
            .expect("signature indices have relations");
        for (prop, ok) in results {
            if !ok {
                return Some(Counterexample {
                    trial,
                    inputs: format!("game {inputs}"),
                    expected: format!("relation {i} {prop}"),
                    got: "property fails".to_string(),
                });
            }
        }
    }
    None
}

/// Configuration for [`verify_eval_encoding`].
#[derive(Debug, Clone)]
pub struct EvalEncodingConfig {
    pub variant: Variant,
    pub witness: WitnessFrames,
    pub mode: EncodeMode,
    pub models: ModelKnobs,
    pub formulas: FormulaKnobs,
    pub macro_op: MacroOp,
}

impl EvalEncodingConfig {
    pub fn new(variant: Variant, witness: WitnessFrames, mode: EncodeMode) -> Self {
        EvalEncodingConfig {
            variant,
            witness,
            mode,
            models: ModelKnobs::default(),
            formulas: FormulaKnobs::default(),
            macro_op: MacroOp::PerVariant,
        }
    }
}

/// Check, on random (pointed model, formula) pairs, that the formula
/// holds in the model exactly when the winning-region formula holds at
/// the initial world of the encoded evaluation game.
pub fn verify_eval_encoding(
    trials: u64,
    seed: u64,
    cfg: &EvalEncodingConfig,
) -> VerificationReport {
    let name = format!("eval-encoding/variant-{}", cfg.variant);
    let formulas = clamped(&cfg.formulas, &cfg.models);
    run_trials(&name, trials, seed, |trial, rng| {
        let pm = generate::model(rng, &cfg.models);
        let f = generate::formula(rng, &formulas);
        let expected = semantics::holds(&pm, &f)
            .expect("generated formulas are closed and within the signature");
        let describe = || format!("model {} formula {f}", pm.to_json());
        let (enc, _) = match encoder::encode_eval(&pm, &f, &cfg.witness, cfg.mode) {
            Ok(pair) => pair,
            Err(e) => {
                return Some(Counterexample {
                    trial,
                    inputs: describe(),
                    expected: "an encoding".to_string(),
                    got: e.to_string(),
                })
            }
        };
        let got = semantics::holds(&enc.pointed(), &enc.wn_formula(cfg.macro_op))
            .expect("the winning-region formula is closed and within the signature");
        if expected == got {
            None
        } else {
            Some(Counterexample {
                trial,
                inputs: describe(),
                expected: format!("wn {expected} at {}", enc.initial_world),
                got: format!("wn {got}"),
            })
        }
    })
}

/// One radius-`k` comparison from the iterated-encoding experiment.
#[derive(Debug, Clone, Serialize)]
pub struct FixpointCheck {
    /// Models `k` and `k+1` are compared on their distance-`< radius`
    /// restrictions around the point.
    pub radius: usize,
    pub isomorphic: bool,
    /// The world bijection when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Isomorphism>,
}

/// Report of the iterated-encoding experiment.
#[derive(Debug, Clone, Serialize)]
pub struct FixpointReport {
    /// The single (pre-doubling) formula, in parseable text form.
    pub formula: String,
    /// World counts of the iterates, starting with the seed model.
    pub sizes: Vec<usize>,
    pub checks: Vec<FixpointCheck>,
    /// Set when the world budget stopped the iteration early.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl FixpointReport {
    pub fn passed(&self) -> bool {
        self.aborted.is_none() && self.checks.iter().all(|c| c.isomorphic)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

/// Configuration for [`run_fixpoint`].
#[derive(Debug, Clone)]
pub struct FixpointConfig {
    pub witness: WitnessFrames,
    pub mode: EncodeMode,
    /// Number of encoding applications (the iterate count).
    pub steps: usize,
    /// Abort before encoding a model with more worlds than this; iterate
    /// sizes grow multiplicatively with each step.
    pub world_budget: usize,
    pub distance: DistanceMode,
}

impl FixpointConfig {
    pub fn new(witness: WitnessFrames, steps: usize) -> Self {
        FixpointConfig {
            witness,
            mode: EncodeMode::Graph,
            steps,
            world_budget: 100_000,
            distance: DistanceMode::Directed,
        }
    }
}

/// Iterate the evaluation-game encoding: starting from a seed model,
/// repeatedly encode the evaluation game of `f ∧ f` over the previous
/// iterate and check that consecutive iterates agree on larger and
/// larger neighbourhoods of the point — radius `k` for iterates `k` and
/// `k+1`.
///
/// The conjunction doubles the formula so the encoded game's initial
/// position is a connective rather than anything model-dependent, which
/// is what makes consecutive iterates locally alike.
pub fn run_fixpoint(
    f: &Formula,
    seed_model: &PointedModel,
    cfg: &FixpointConfig,
) -> Result<FixpointReport, EncodeError> {
    let start = Instant::now();
    let doubled = formula::and(f.clone(), f.clone());
    let mut iterates = vec![seed_model.clone()];
    let mut aborted = None;
    for step in 0..cfg.steps {
        let current = iterates.last().expect("seeded with one model");
        let worlds = current.model.worlds().len();
        if worlds > cfg.world_budget {
            aborted = Some(format!(
                "stopped before step {step}: {worlds} worlds exceed the budget of {}",
                cfg.world_budget
            ));
            break;
        }
        let (enc, _) = encoder::encode_eval(current, &doubled, &cfg.witness, cfg.mode)?;
        iterates.push(enc.pointed());
    }
    let checks = (0..iterates.len() - 1)
        .map(|k| {
            let witness = iterates[k].n_isomorphic(&iterates[k + 1], k, cfg.distance);
            FixpointCheck {
                radius: k,
                isomorphic: witness.is_some(),
                witness,
            }
        })
        .collect();
    Ok(FixpointReport {
        formula: f.to_string(),
        sizes: iterates.iter().map(|pm| pm.model.worlds().len()).collect(),
        checks,
        aborted,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::KripkeModel;

    #[test]
    fn oracle_pipeline_agrees_on_small_instances() {
        let models = ModelKnobs {
            max_worlds: 4,
            ..ModelKnobs::default()
        };
        let formulas = FormulaKnobs {
            max_size: 8,
            max_fixpoints: 2,
            ..FormulaKnobs::default()
        };
        let report = verify_oracle(40, 7, &models, &formulas);
        assert_eq!(report.trials, 40);
        assert_eq!(report.agreements, 40);
        assert!(report.passed());
        assert!(report.to_json().contains("\"pipeline\":\"oracle\""));
    }

    #[test]
    fn zero_trials_give_an_empty_report() {
        let report = verify_oracle(0, 1, &ModelKnobs::default(), &FormulaKnobs::default());
        assert_eq!(report.trials, 0);
        assert_eq!(report.agreements, 0);
        assert!(report.passed());
    }

    #[test]
    fn report_json_is_reproducible() {
        let models = ModelKnobs {
            max_worlds: 3,
            ..ModelKnobs::default()
        };
        let formulas = FormulaKnobs {
            max_size: 6,
            max_fixpoints: 1,
            ..FormulaKnobs::default()
        };
        let a = verify_oracle(10, 99, &models, &formulas);
        let b = verify_oracle(10, 99, &models, &formulas);
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn wn_pipeline_matches_the_solver_on_small_games() {
        let mut cfg = WnConfig::new(
            Variant::One,
            WitnessFrames::minimal(Variant::One),
            EncodeMode::Graph,
        );
        cfg.games = GameKnobs {
            max_vertices: 5,
            max_priority: 1,
            max_out_degree: 2,
        };
        let report = verify_wn(15, 3, &cfg);
        assert_eq!(report.agreements, 15, "{:?}", report.counterexamples);
    }

    #[test]
    fn strict_wn_pipeline_checks_the_s5_reducts() {
        let mut cfg = WnConfig::new(
            Variant::Two,
            WitnessFrames::s5(Variant::Two),
            EncodeMode::Strict,
        );
        cfg.games = GameKnobs {
            max_vertices: 6,
            max_priority: 1,
            max_out_degree: 2,
        };
        cfg.reduct_checks = vec![
            FrameProperty::Reflexive,
            FrameProperty::Symmetric,
            FrameProperty::Transitive,
        ];
        let report = verify_wn(10, 5, &cfg);
        assert_eq!(report.agreements, 10, "{:?}", report.counterexamples);
    }

    #[test]
    fn eval_encoding_pipeline_agrees_on_small_instances() {
        let mut cfg = EvalEncodingConfig::new(
            Variant::One,
            WitnessFrames::minimal(Variant::One),
            EncodeMode::Graph,
        );
        cfg.models = ModelKnobs {
            max_worlds: 2,
            ..ModelKnobs::default()
        };
        cfg.formulas = FormulaKnobs {
            max_size: 6,
            max_fixpoints: 1,
            ..FormulaKnobs::default()
        };
        let report = verify_eval_encoding(10, 11, &cfg);
        assert_eq!(report.agreements, 10, "{:?}", report.counterexamples);
    }

    #[test]
    fn fixpoint_iteration_is_locally_stable() {
        let mut m = KripkeModel::new([0]);
        m.add_world("w0");
        m.make_true("p", "w0").unwrap();
        let seed = PointedModel::new(m, "w0").unwrap();
        let f = formula::dia(0, formula::prop("p"));
        let cfg = FixpointConfig::new(WitnessFrames::minimal(Variant::One), 2);
        let report = run_fixpoint(&f, &seed, &cfg).unwrap();
        assert_eq!(report.sizes.len(), 3);
        assert!(report.passed(), "{}", report.to_json());
        assert!(report.checks[0].isomorphic);
        assert!(
            report.checks[1].isomorphic,
            "radius-1 neighbourhoods differ"
        );
    }

    #[test]
    fn fixpoint_budget_aborts_cleanly() {
        let mut m = KripkeModel::new([0]);
        m.add_world("w0");
        let seed = PointedModel::new(m, "w0").unwrap();
        let f = formula::dia(0, formula::prop("p"));
        let mut cfg = FixpointConfig::new(WitnessFrames::minimal(Variant::One), 4);
        cfg.world_budget = 10;
        let report = run_fixpoint(&f, &seed, &cfg).unwrap();
        assert!(report.aborted.is_some());
        assert!(!report.passed());
        assert!(report.sizes.len() < 5, "budget did not stop the iteration");
    }
}
