//! Shared helpers for integration tests: an exhaustive parity-game solver
//! used as an independent oracle.

use std::collections::{BTreeMap, BTreeSet};

use mucalc::paritygame::{Owner, ParityGame, VertexId};

type Strategy = BTreeMap<VertexId, VertexId>;

/// Every memoryless strategy for `owner`: one successor choice at each
/// owned vertex that has successors. Dead ends need no choice — their
/// owner is simply stuck there.
fn strategies(g: &ParityGame, owner: Owner) -> Vec<Strategy> {
    let mut out = vec![Strategy::new()];
    for v in g.vertices() {
        if g.owner(v) != owner {
            continue;
        }
        let succs = g.successors(v);
        if succs.is_empty() {
            continue;
        }
        let mut grown = Vec::with_capacity(out.len() * succs.len());
        for partial in &out {
            for &s in &succs {
                let mut next = partial.clone();
                next.insert(v, s);
                grown.push(next);
            }
        }
        out = grown;
    }
    out
}

/// Winner of the unique play from `start` under two fixed strategies:
/// a stuck player loses, and an infinite play is judged by the largest
/// priority on the cycle it settles into.
fn play_winner(g: &ParityGame, exists: &Strategy, forall: &Strategy, start: VertexId) -> Owner {
    let mut first_visit: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut path: Vec<VertexId> = Vec::new();
    let mut v = start;
    loop {
        if let Some(&i) = first_visit.get(&v) {
            let top = path[i..]
                .iter()
                .map(|&w| g.priority(w))
                .max()
                .expect("a cycle has at least one vertex");
            return if top % 2 == 0 {
                Owner::Exists
            } else {
                Owner::Forall
            };
        }
        first_visit.insert(v, path.len());
        path.push(v);
        let strategy = match g.owner(v) {
            Owner::Exists => exists,
            Owner::Forall => forall,
        };
        match strategy.get(&v) {
            Some(&w) => v = w,
            None => return g.owner(v).opponent(),
        }
    }
}

/// The existential player's winning set by exhaustive enumeration of both
/// players' memoryless strategies (sound by memoryless determinacy).
pub fn brute_force_win_exists(g: &ParityGame) -> BTreeSet<VertexId> {
    let exists = strategies(g, Owner::Exists);
    let forall = strategies(g, Owner::Forall);
    g.vertices()
        .filter(|&v| {
            exists.iter().any(|se| {
                forall
                    .iter()
                    .all(|sa| play_winner(g, se, sa, v) == Owner::Exists)
            })
        })
        .collect()
}
