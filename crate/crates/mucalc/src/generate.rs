//! Seed-driven random instances: Kripke models, closed formulas in negation
//! normal form, and parity games.
//!
//! Every generator takes a caller-supplied [`Rng`] so pipelines can derive
//! independent, reproducible per-trial streams with [`trial_rng`]. All size
//! knobs are upper bounds; the actual size of each instance is drawn
//! uniformly below them.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::formula::{self, Formula, ModalIdx};
use crate::kripke::{KripkeModel, PointedModel};
use crate::paritygame::{GameBuilder, Owner, ParityGame, VertexId};

/// The RNG for trial `trial` of a pipeline seeded with `seed`.
///
/// Each trial gets its own ChaCha stream, so trials are mutually
/// independent and any single trial can be replayed from `(seed, trial)`
/// without generating its predecessors.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Size knobs for [`model`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelKnobs {
    /// Largest world count; the count is drawn from `1..=max_worlds`.
    pub max_worlds: usize,
    /// The signature is `0..indices`.
    pub indices: u32,
    /// Proposition alphabet; each (proposition, world) pair holds with
    /// probability 1/2.
    pub props: Vec<String>,
}

impl Default for ModelKnobs {
    fn default() -> Self {
        ModelKnobs {
            max_worlds: 6,
            indices: 2,
            props: vec!["p".to_string(), "q".to_string()],
        }
    }
}

/// A random pointed model. Worlds are named `w0..`; each world's
/// out-degree per relation is 0, 1 or 2 (weighted towards 1), so models
/// stay sparse enough for game-based checking.
pub fn model(rng: &mut impl Rng, knobs: &ModelKnobs) -> PointedModel {
    let n = rng.gen_range(1..=knobs.max_worlds.max(1));
    let names: Vec<String> = (0..n).map(|k| format!("w{k}")).collect();
    let mut m = KripkeModel::new(0..knobs.indices);
    for w in &names {
        m.add_world(w.clone());
    }
    for i in 0..knobs.indices {
        for a in &names {
            let degree = *[0, 1, 1, 1, 2].choose(rng).expect("non-empty") as usize;
            for b in names.choose_multiple(rng, degree.min(n)) {
                m.add_edge(i, a, b).expect("endpoints were just added");
            }
        }
    }
    for p in &knobs.props {
        for w in &names {
            if rng.gen_bool(0.5) {
                m.make_true(p, w).expect("world was just added");
            }
        }
    }
    let point = names.choose(rng).expect("at least one world").clone();
    PointedModel::new(m, point).expect("point is a world")
}

/// Size knobs for [`formula`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaKnobs {
    /// Node budget (counted by [`Formula::size`]); the budget is drawn
    /// from the smallest feasible size up to `max_size`.
    pub max_size: usize,
    /// Upper bound on the number of fixpoint binders.
    pub max_fixpoints: usize,
    /// Modal operators use indices `0..indices`.
    pub indices: u32,
    /// Proposition alphabet for literals.
    pub props: Vec<String>,
    /// Guarantee at least one modal operator (skipped if `indices == 0`).
    pub require_modality: bool,
    /// Guarantee at least one fixpoint binder (skipped if
    /// `max_fixpoints == 0`).
    pub require_fixpoint: bool,
}

impl Default for FormulaKnobs {
    fn default() -> Self {
        FormulaKnobs {
            max_size: 12,
            max_fixpoints: 3,
            indices: 2,
            props: vec!["p".to_string(), "q".to_string()],
            require_modality: true,
            require_fixpoint: true,
        }
    }
}

/// A random closed, rename-apart formula within the given bounds.
///
/// Binders are named `X0, X1, ..` in creation order, so every binder name
/// is distinct and variables never shadow each other. Bound-variable
/// occurrences are drawn only from the enclosing scope, which keeps the
/// formula closed.
pub fn formula(rng: &mut impl Rng, knobs: &FormulaKnobs) -> Formula {
    let need_fix = knobs.require_fixpoint && knobs.max_fixpoints > 0;
    let need_mod = knobs.require_modality && knobs.indices > 0;
    let floor = 1 + need_fix as usize + need_mod as usize;
    let budget = rng.gen_range(floor..=knobs.max_size.max(floor));
    let mut state = FormulaState {
        fixpoints_left: knobs.max_fixpoints,
        next_var: 0,
        scope: Vec::new(),
    };
    grow(rng, knobs, &mut state, budget, need_fix, need_mod)
}

struct FormulaState {
    fixpoints_left: usize,
    next_var: usize,
    scope: Vec<String>,
}

#[derive(Clone, Copy)]
enum Shape {
    Leaf,
    Var,
    And,
    Or,
    Dia,
    Box,
    Mu,
    Nu,
}

/// Recursive generator. Invariants: `budget >= 1 + need_fix + need_mod`
/// as-integers, and `need_fix` implies `state.fixpoints_left >= 1`; both
/// are re-established for every recursive call, so some constructor is
/// always eligible.
fn grow(
    rng: &mut impl Rng,
    knobs: &FormulaKnobs,
    state: &mut FormulaState,
    budget: usize,
    need_fix: bool,
    need_mod: bool,
) -> Formula {
    let nf = need_fix as usize;
    let nm = need_mod as usize;
    let mut table: Vec<(Shape, u32)> = Vec::new();
    if !need_fix && !need_mod {
        table.push((Shape::Leaf, 5));
        if !state.scope.is_empty() {
            table.push((Shape::Var, 3));
        }
    }
    if budget >= 3 + nf + nm {
        table.push((Shape::And, 4));
        table.push((Shape::Or, 4));
    }
    if knobs.indices > 0 && budget >= 2 + nf {
        let w = if need_mod { 8 } else { 4 };
        table.push((Shape::Dia, w));
        table.push((Shape::Box, w - 1));
    }
    if state.fixpoints_left > 0 && budget >= 2 + nm {
        let w = if need_fix { 8 } else { 2 };
        table.push((Shape::Mu, w));
        table.push((Shape::Nu, w));
    }
    let &(shape, _) = table
        .choose_weighted(rng, |&(_, w)| w)
        .expect("the invariants keep at least one shape eligible");
    match shape {
        Shape::Leaf => {
            if knobs.props.is_empty() || rng.gen_ratio(1, 5) {
                if rng.gen_bool(0.5) {
                    Formula::Top
                } else {
                    Formula::Bottom
                }
            } else {
                let name = knobs.props.choose(rng).expect("non-empty").clone();
                if rng.gen_ratio(2, 3) {
                    formula::prop(&name)
                } else {
                    formula::nprop(&name)
                }
            }
        }
        Shape::Var => {
            let name = state.scope.choose(rng).expect("non-empty scope");
            formula::var(name)
        }
        Shape::And | Shape::Or => {
            let heavy = 1 + nf + nm;
            let heavy_budget = rng.gen_range(heavy..=budget - 2);
            let light_budget = budget - 1 - heavy_budget;
            let heavy_left = rng.gen_bool(0.5);
            let (lb, ln, rb, rn) = if heavy_left {
                (
                    heavy_budget,
                    (need_fix, need_mod),
                    light_budget,
                    (false, false),
                )
            } else {
                (
                    light_budget,
                    (false, false),
                    heavy_budget,
                    (need_fix, need_mod),
                )
            };
            let left = grow(rng, knobs, state, lb, ln.0, ln.1);
            let right = grow(rng, knobs, state, rb, rn.0, rn.1);
            if matches!(shape, Shape::And) {
                formula::and(left, right)
            } else {
                formula::or(left, right)
            }
        }
        Shape::Dia | Shape::Box => {
            let i: ModalIdx = rng.gen_range(0..knobs.indices);
            let body = grow(rng, knobs, state, budget - 1, need_fix, false);
            if matches!(shape, Shape::Dia) {
                formula::dia(i, body)
            } else {
                formula::boxm(i, body)
            }
        }
        Shape::Mu | Shape::Nu => {
            let name = format!("X{}", state.next_var);
            state.next_var += 1;
            state.fixpoints_left -= 1;
            state.scope.push(name.clone());
            let body = grow(rng, knobs, state, budget - 1, false, need_mod);
            state.scope.pop();
            if matches!(shape, Shape::Mu) {
                formula::mu(&name, body)
            } else {
                formula::nu(&name, body)
            }
        }
    }
}

/// Size knobs for [`game`] and [`tree_game`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameKnobs {
    /// Largest vertex count; the count is drawn from `1..=max_vertices`.
    pub max_vertices: usize,
    /// Priorities are drawn from `0..=max_priority`.
    pub max_priority: u32,
    /// Upper bound on each vertex's out-degree; dead ends are allowed
    /// and exercise the stuck-player rule.
    pub max_out_degree: usize,
}

impl Default for GameKnobs {
    fn default() -> Self {
        GameKnobs {
            max_vertices: 8,
            max_priority: 2,
            max_out_degree: 3,
        }
    }
}

/// A random parity game. Vertices are `0..n`; owners are fair coin flips,
/// priorities uniform, successors sampled without replacement, so cycles,
/// self-loops and dead ends all occur.
pub fn game(rng: &mut impl Rng, knobs: &GameKnobs) -> ParityGame {
    let n = rng.gen_range(1..=knobs.max_vertices.max(1)) as VertexId;
    let all: Vec<VertexId> = (0..n).collect();
    let mut b = GameBuilder::new();
    for &v in &all {
        b.vertex(v, random_owner(rng), rng.gen_range(0..=knobs.max_priority));
    }
    for &v in &all {
        let degree = rng.gen_range(0..=knobs.max_out_degree.min(all.len()));
        for &t in all.choose_multiple(rng, degree) {
            b.edge(v, t);
        }
    }
    b.initial(rng.gen_range(0..n));
    b.build()
        .expect("generated vertices and edges are consistent")
}

/// A random tree-like parity game: every vertex has in-degree at most one
/// and the edge relation is acyclic (a forest). Vertex ids are randomly
/// permuted so edges do not systematically point towards larger ids.
pub fn tree_game(rng: &mut impl Rng, knobs: &GameKnobs) -> ParityGame {
    let n = rng.gen_range(1..=knobs.max_vertices.max(1));
    let mut perm: Vec<VertexId> = (0..n as VertexId).collect();
    perm.shuffle(rng);
    let mut b = GameBuilder::new();
    let mut out_degree = vec![0usize; n];
    for &id in &perm {
        b.vertex(id, random_owner(rng), rng.gen_range(0..=knobs.max_priority));
    }
    for v in 1..n {
        if rng.gen_ratio(1, 8) {
            continue; // leave a separate root; forests are fine
        }
        let open: Vec<usize> = (0..v)
            .filter(|&p| out_degree[p] < knobs.max_out_degree.max(1))
            .collect();
        if let Some(&parent) = open.choose(rng) {
            out_degree[parent] += 1;
            b.edge(perm[parent], perm[v]);
        }
    }
    b.initial(perm[rng.gen_range(0..n)]);
    b.build()
        .expect("generated vertices and edges are consistent")
}

fn random_owner(rng: &mut impl Rng) -> Owner {
    if rng.gen_bool(0.5) {
        Owner::Exists
    } else {
        Owner::Forall
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::is_tree_like;

    #[test]
    fn same_seed_and_trial_reproduce_the_instance() {
        let knobs = FormulaKnobs::default();
        let f1 = formula(&mut trial_rng(42, 7), &knobs);
        let f2 = formula(&mut trial_rng(42, 7), &knobs);
        assert_eq!(f1, f2);
        let m1 = model(&mut trial_rng(9, 3), &ModelKnobs::default());
        let m2 = model(&mut trial_rng(9, 3), &ModelKnobs::default());
        assert_eq!(m1, m2);
        let g1 = game(&mut trial_rng(1, 0), &GameKnobs::default());
        let g2 = game(&mut trial_rng(1, 0), &GameKnobs::default());
        assert_eq!(g1.write_pg(), g2.write_pg());
    }

    #[test]
    fn different_trials_give_different_instances() {
        let knobs = FormulaKnobs::default();
        let first = formula(&mut trial_rng(42, 0), &knobs);
        let differs = (1..10).any(|t| formula(&mut trial_rng(42, t), &knobs) != first);
        assert!(differs, "ten trials all produced the same formula");
    }

    #[test]
    fn formulas_respect_the_knobs() {
        let knobs = FormulaKnobs::default();
        for t in 0..200 {
            let f = formula(&mut trial_rng(5, t), &knobs);
            assert!(f.is_closed(), "free variables in {f}");
            assert!(f.is_rename_apart(), "binder reuse in {f}");
            assert!(f.size() <= knobs.max_size, "{f} exceeds the size budget");
            let fixpoints = f.count_fixpoints();
            assert!(fixpoints >= 1 && fixpoints <= knobs.max_fixpoints);
            assert!(f.has_modality(), "no modality in {f}");
            assert!(f.modal_indices().iter().all(|&i| i < knobs.indices));
        }
    }

    #[test]
    fn tight_budgets_force_the_required_structure() {
        let knobs = FormulaKnobs {
            max_size: 3,
            max_fixpoints: 1,
            ..FormulaKnobs::default()
        };
        for t in 0..50 {
            let f = formula(&mut trial_rng(11, t), &knobs);
            assert_eq!(f.size(), 3);
            assert_eq!(f.count_fixpoints(), 1);
            assert!(f.has_modality());
        }
    }

    #[test]
    fn requirements_can_be_switched_off() {
        let knobs = FormulaKnobs {
            max_size: 4,
            require_modality: false,
            require_fixpoint: false,
            ..FormulaKnobs::default()
        };
        let mut saw_no_fixpoint = false;
        for t in 0..100 {
            let f = formula(&mut trial_rng(13, t), &knobs);
            assert!(f.is_closed());
            saw_no_fixpoint |= f.count_fixpoints() == 0;
        }
        assert!(
            saw_no_fixpoint,
            "optional fixpoints never absent in 100 draws"
        );
    }

    #[test]
    fn models_respect_the_knobs() {
        let knobs = ModelKnobs::default();
        for t in 0..100 {
            let pm = model(&mut trial_rng(3, t), &knobs);
            assert!(pm.model.worlds().len() <= knobs.max_worlds);
            assert!(!pm.model.worlds().is_empty());
            let sig: Vec<u32> = pm.model.signature().iter().copied().collect();
            assert_eq!(sig, vec![0, 1]);
            for p in pm.model.valuation().keys() {
                assert!(knobs.props.contains(p), "unexpected proposition {p}");
            }
        }
    }

    #[test]
    fn games_respect_the_knobs() {
        let knobs = GameKnobs::default();
        for t in 0..100 {
            let g = game(&mut trial_rng(4, t), &knobs);
            assert!(g.vertex_count() <= knobs.max_vertices);
            for v in g.vertices() {
                assert!(g.priority(v) <= knobs.max_priority);
                assert!(g.successors(v).len() <= knobs.max_out_degree);
            }
        }
    }

    #[test]
    fn tree_games_are_tree_like() {
        let knobs = GameKnobs {
            max_vertices: 12,
            max_priority: 3,
            ..GameKnobs::default()
        };
        let mut max_seen = 0;
        for t in 0..100 {
            let g = tree_game(&mut trial_rng(6, t), &knobs);
            assert!(is_tree_like(&g), "cycle or shared target in generated tree");
            for v in g.vertices() {
                assert!(g.successors(v).len() <= knobs.max_out_degree);
            }
            max_seen = max_seen.max(g.vertex_count());
        }
        assert!(
            max_seen > 8,
            "tree generator never reached interesting sizes"
        );
    }
}
