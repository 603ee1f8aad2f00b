//! The evaluation game deciding `M, w ⊨ φ`, in parity-game form.
//!
//! Positions are pairs of a subformula occurrence and a world. Verifier
//! (player ∃) owns disjunctions, diamonds, false literals and Bottom;
//! Refuter (player ∀) owns conjunctions, boxes, true literals and Top — so
//! a player stuck on a literal is exactly the player whose claim failed.
//! Fixpoint positions unfold to their bodies and carry the only nonzero
//! priorities; variable positions regenerate to their binders. Verifier
//! wins an infinite play iff the greatest priority seen infinitely often is
//! even, which by construction happens iff the outermost infinitely
//! regenerated binder is a ν.

use crate::formula::{priority_of, Formula, ModalIdx};
use crate::kripke::{PointedModel, WorldId};
use crate::paritygame::{GameBuilder, GameError, Owner, ParityGame, VertexId};
use std::collections::BTreeMap;

/// A game vertex's label: which subformula occurrence at which world.
/// `subformula` indexes the preorder traversal of the (rename-apart)
/// formula the game was built from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EvalPosition {
    pub subformula: usize,
    pub world: WorldId,
}

/// The constructed game plus its position labels and the exact formula the
/// labels refer to (the input after renaming apart).
#[derive(Debug, Clone)]
pub struct EvalGame {
    pub game: ParityGame,
    pub positions: BTreeMap<VertexId, EvalPosition>,
    pub formula: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("formula has free variable {0}")]
    FreeVariable(String),
    #[error("modality index {0} is not in the model signature")]
    UnknownModality(ModalIdx),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Build the evaluation game for `f` at the distinguished world. Only
/// positions reachable from the initial one are materialized. Vertex names
/// encode `{subformula-index}@{world}`.
pub fn build_eval_game(pm: &PointedModel, f: &Formula) -> Result<EvalGame, EvalError> {
    if let Some(x) = f.free_vars().into_iter().next() {
        return Err(EvalError::FreeVariable(x));
    }
    let f = f.rename_apart();

    let subs: Vec<&Formula> = f.subformulas();
    let index_of: BTreeMap<*const Formula, usize> = subs
        .iter()
        .enumerate()
        .map(|(i, s)| (*s as *const Formula, i))
        .collect();
    // each bound variable's binder, by occurrence
    let binder_index: BTreeMap<&str, usize> = subs
        .iter()
        .filter_map(|s| match s {
            Formula::Mu(x, _) | Formula::Nu(x, _) => {
                Some((x.as_str(), index_of[&(*s as *const Formula)]))
            }
            _ => None,
        })
        .collect();
    let mut priorities: BTreeMap<usize, u32> = BTreeMap::new();
    for s in f.fixpoint_subformulas() {
        let idx = index_of[&(s as *const Formula)];
        let p = priority_of(&f, s).expect("fixpoint node of a rename-apart formula");
        priorities.insert(idx, p);
    }

    let mut builder = GameBuilder::new();
    let mut ids: BTreeMap<(usize, WorldId), VertexId> = BTreeMap::new();
    let mut queue: Vec<(usize, WorldId)> = Vec::new();
    let mut positions: BTreeMap<VertexId, EvalPosition> = BTreeMap::new();

    let point = pm.point.clone();
    let root = (0usize, point);
    ids.insert(root.clone(), 0);
    queue.push(root);

    let intern = |state: (usize, WorldId),
                  ids: &mut BTreeMap<(usize, WorldId), VertexId>,
                  queue: &mut Vec<(usize, WorldId)>|
     -> VertexId {
        if let Some(&v) = ids.get(&state) {
            return v;
        }
        let v = ids.len() as VertexId;
        ids.insert(state.clone(), v);
        queue.push(state);
        v
    };

    let mut cursor = 0;
    while cursor < queue.len() {
        let (si, world) = queue[cursor].clone();
        let vid = ids[&(si, world.clone())];
        cursor += 1;

        let sub = subs[si];
        let priority = priorities.get(&si).copied().unwrap_or(0);
        let mut moves: Vec<(usize, WorldId)> = Vec::new();
        let owner = match sub {
            Formula::Top => Owner::Forall,
            Formula::Bottom => Owner::Exists,
            Formula::Lit { name, positive } => {
                if pm.model.holds_prop(name, &world) == *positive {
                    Owner::Forall
                } else {
                    Owner::Exists
                }
            }
            Formula::Var(x) => {
                let target = binder_index[x.as_str()];
                moves.push((target, world.clone()));
                Owner::Exists
            }
            Formula::And(a, b) => {
                for part in [a, b] {
                    moves.push((index_of[&(&**part as *const Formula)], world.clone()));
                }
                Owner::Forall
            }
            Formula::Or(a, b) => {
                for part in [a, b] {
                    moves.push((index_of[&(&**part as *const Formula)], world.clone()));
                }
                Owner::Exists
            }
            Formula::Dia(i, g) | Formula::Box(i, g) => {
                let gi = index_of[&(&**g as *const Formula)];
                let succs = pm
                    .model
                    .successors(*i, &world)
                    .map_err(|_| EvalError::UnknownModality(*i))?;
                for v in succs {
                    moves.push((gi, v.clone()));
                }
                if matches!(sub, Formula::Dia(..)) {
                    Owner::Exists
                } else {
                    Owner::Forall
                }
            }
            Formula::Mu(_, body) => {
                moves.push((index_of[&(&**body as *const Formula)], world.clone()));
                Owner::Exists
            }
            Formula::Nu(_, body) => {
                moves.push((index_of[&(&**body as *const Formula)], world.clone()));
                Owner::Forall
            }
        };

        builder.vertex(vid, owner, priority);
        builder.name(vid, format!("{si}@{world}"));
        positions.insert(
            vid,
            EvalPosition {
                subformula: si,
                world: world.clone(),
            },
        );
        for state in moves {
            let target = intern(state, &mut ids, &mut queue);
            builder.edge(vid, target);
        }
    }
    builder.initial(0);
    Ok(EvalGame {
        game: builder.build()?,
        positions,
        formula: f,
    })
}

/// Decide `M, w ⊨ φ` by solving the evaluation game: true iff ∃ wins from
/// the initial position.
pub fn check_via_game(pm: &PointedModel, f: &Formula) -> Result<bool, EvalError> {
    let eg = build_eval_game(pm, f)?;
    let sol = eg.game.solve();
    Ok(sol.win_exists.contains(&eg.game.initial()))
}
