//! Rendering parity games as pointed multimodal Kripke models.
//!
//! Every game vertex `v` becomes a designated world `v{v}` whose markers
//! record the vertex data: `@pos`/`@bd`, the owner (`@P_exists` or
//! `@P_forall`), the priority (`@P_{j}`) and, when the vertex has moves,
//! the recursion root marker `@pre0`. The move set is laid out behind the
//! root as a cascade of binary gadgets — each one a copy of a witness
//! frame — whose final hops land on the designated worlds of the
//! successors. Move sets larger than two spill into unmarked bridge
//! worlds that root the next gadget; the winning-region formulas from
//! [`wn`] recurse through them.
//!
//! Three gadget variants are supported; their signatures and first-hop
//! markers differ, but all deliver exactly the game's moves to the ♦/■
//! macros of the matching variant. A vertex is then won by the
//! existential player if and only if `wn(n, variant)` holds at its world.

mod macros;
mod witness;

pub use macros::{blacklozenge, blacklozenge_with, blacksquare, blacksquare_with, wn, wn_with};
pub use witness::{
    ChainWitness, ChoiceWitness, CompletionWitness, Frame, StepWitness, WitnessError, WitnessFrames,
};

use crate::evalgame::{build_eval_game, EvalError, EvalGame};
use crate::formula::{Formula, ModalIdx};
use crate::kripke::{KripkeModel, PointedModel, WorldId};
use crate::paritygame::{Owner, ParityGame, VertexId};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Marks the designated world of a game vertex.
pub const POS: &str = "@pos";
/// Marks every world that belongs to the encoded game structure.
pub const BD: &str = "@bd";
/// Marks a recursion root: a world with a gadget hanging off it.
pub const PRE0: &str = "@pre0";
/// Variant 2: the middle world of the relation-0 chain.
pub const MID0: &str = "@mid0";
/// The world reached by the gadget's first relation-0 hop.
pub const NXT0: &str = "@nxt0";
/// A world with a relation-1 hop ahead.
pub const PRE1: &str = "@pre1";
/// The world reached by a relation-1 hop.
pub const NXT1: &str = "@nxt1";
/// Variant 3: a world with a relation-2 hop ahead.
pub const PRE2: &str = "@pre2";
/// Variant 3: the world reached by a relation-2 hop.
pub const NXT2: &str = "@nxt2";
/// Owner marker of the existential player.
pub const P_EXISTS: &str = "@P_exists";
/// Owner marker of the universal player.
pub const P_FORALL: &str = "@P_forall";

/// `@P_{p}`, the priority marker.
pub fn parity_marker(p: u32) -> String {
    format!("@P_{p}")
}

/// Which gadget shape the encoding uses. Serialized as its number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Variant {
    /// Signature {0, 1}: relation 0 fans out to two branch worlds, each
    /// confirming its target over relation 1.
    One,
    /// Signature {0, 1}: relation 0 walks a two-hop chain; the middle and
    /// end worlds confirm over relation 1.
    Two,
    /// Signature {0, 1, 2}: relation 0 enters, relation 1 switches to the
    /// second branch, relation 2 confirms.
    Three,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::One, Variant::Two, Variant::Three];

    /// The relation indices this variant's models use.
    pub fn signature(self) -> BTreeSet<ModalIdx> {
        match self {
            Variant::One | Variant::Two => [0, 1].into(),
            Variant::Three => [0, 1, 2].into(),
        }
    }
}

impl From<Variant> for u8 {
    fn from(v: Variant) -> u8 {
        match v {
            Variant::One => 1,
            Variant::Two => 2,
            Variant::Three => 3,
        }
    }
}

impl TryFrom<u8> for Variant {
    type Error = String;

    fn try_from(n: u8) -> Result<Variant, String> {
        match n {
            1 => Ok(Variant::One),
            2 => Ok(Variant::Two),
            3 => Ok(Variant::Three),
            _ => Err(format!("variant must be 1, 2 or 3, got {n}")),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

/// Fixpoint operator choice for the ♦/■ macros. Bridge recursion is
/// forward-only, so all choices denote the same sets; swapping operators
/// is a cheap cross-check of that argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MacroOp {
    /// ν for variant 1, μ for variants 2 and 3.
    #[default]
    PerVariant,
    ForceMu,
    ForceNu,
}

/// How strictly the encoder lays out witness copies.
///
/// `Graph` accepts any game: a designated world may be confirmed by any
/// number of copies, and a singleton move set is confirmed by both
/// branches. `Strict` keeps the copies at each relation index pairwise
/// world-disjoint, so per-copy frame conditions (such as the S5 laws of
/// the built-in `s5` witnesses) carry over to the whole relation. That
/// discipline needs in-degrees at most one and no cycles — a tree-like
/// game — and pads singleton move sets with a fresh unmarked dead end
/// instead of confirming the same target twice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodeMode {
    Graph,
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("vertex {vertex} has priority {priority}, above the encoding bound {max}")]
    PriorityTooHigh {
        vertex: VertexId,
        priority: u32,
        max: u32,
    },
    #[error("strict mode needs a tree-like game (in-degree at most one, no cycles)")]
    NotTreeLike,
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A parity game rendered as a pointed multimodal model.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub model: KripkeModel,
    /// Designated world of each game vertex.
    pub vertex_map: BTreeMap<VertexId, WorldId>,
    pub variant: Variant,
    /// Priority bound the `@P_{j}` markers are drawn from.
    pub max_parity: u32,
    /// Designated world of the game's initial vertex.
    pub initial_world: WorldId,
}

impl Encoding {
    pub fn world_of(&self, v: VertexId) -> Option<&WorldId> {
        self.vertex_map.get(&v)
    }

    /// The model pointed at the initial vertex's world.
    pub fn pointed(&self) -> PointedModel {
        PointedModel::new(self.model.clone(), self.initial_world.clone())
            .expect("initial world is in the model")
    }

    /// The winning-region formula matching this encoding's bound and
    /// variant.
    pub fn wn_formula(&self, op: MacroOp) -> Formula {
        wn_with(self.max_parity, self.variant, op)
    }

    /// Check the marker discipline. Returns one line per violation; a
    /// sound encoding returns none. Checked:
    ///
    /// * only vocabulary markers appear in the valuation,
    /// * a position world carries exactly one owner marker and exactly
    ///   one priority marker within the bound,
    /// * owner and priority markers appear only on position worlds,
    /// * every marked world carries `@bd`,
    /// * every `@pre0 ∧ @bd` world has a relation-0 successor carrying
    ///   the variant's first-hop markers.
    pub fn marker_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let m = &self.model;

        let fixed = [
            POS, BD, PRE0, MID0, NXT0, PRE1, NXT1, PRE2, NXT2, P_EXISTS, P_FORALL,
        ];
        for key in m.valuation().keys() {
            if fixed.contains(&key.as_str()) {
                continue;
            }
            let parity_ok = key
                .strip_prefix("@P_")
                .and_then(|s| s.parse::<u32>().ok())
                .is_some_and(|p| p <= self.max_parity);
            if !parity_ok {
                out.push(format!("unknown marker {key}"));
            }
        }

        let priority_markers: Vec<String> = (0..=self.max_parity).map(parity_marker).collect();
        let first_hop: &[&str] = match self.variant {
            Variant::One => &[NXT0, PRE1, BD],
            Variant::Two => &[MID0, BD],
            Variant::Three => &[NXT0, PRE1, PRE2, BD],
        };

        for w in m.worlds() {
            let owners = [P_EXISTS, P_FORALL]
                .iter()
                .filter(|p| m.holds_prop(p, w))
                .count();
            let priorities = priority_markers
                .iter()
                .filter(|p| m.holds_prop(p, w))
                .count();
            let marked = fixed.iter().any(|p| m.holds_prop(p, w)) || priorities > 0;
            if m.holds_prop(POS, w) {
                if owners != 1 {
                    out.push(format!("position world {w} has {owners} owner markers"));
                }
                if priorities != 1 {
                    out.push(format!(
                        "position world {w} has {priorities} priority markers"
                    ));
                }
            } else if owners + priorities > 0 {
                out.push(format!(
                    "non-position world {w} carries owner or priority markers"
                ));
            }
            if marked && !m.holds_prop(BD, w) {
                out.push(format!("marked world {w} lacks {BD}"));
            }
            if m.holds_prop(PRE0, w) && m.holds_prop(BD, w) {
                let ok = m
                    .successors(0, w)
                    .map(|succ| {
                        succ.iter()
                            .any(|u| first_hop.iter().all(|p| m.holds_prop(p, u)))
                    })
                    .unwrap_or(false);
                if !ok {
                    out.push(format!("recursion root {w} has no marked first hop"));
                }
            }
        }
        out
    }
}

fn position_world(v: VertexId) -> WorldId {
    format!("v{v}")
}

/// In-degree at most one everywhere and no directed cycle.
pub fn is_tree_like(g: &ParityGame) -> bool {
    let mut indeg: BTreeMap<VertexId, usize> = g.vertices().map(|v| (v, 0)).collect();
    for (_, b) in g.edges() {
        *indeg.get_mut(b).expect("edge endpoints are vertices") += 1;
    }
    if indeg.values().any(|&d| d > 1) {
        return false;
    }
    let mut queue: Vec<VertexId> = indeg
        .iter()
        .filter(|&(_, &d)| d == 0)
        .map(|(&v, _)| v)
        .collect();
    let mut removed = 0usize;
    while let Some(v) = queue.pop() {
        removed += 1;
        for u in g.successors(v) {
            let d = indeg.get_mut(&u).expect("successors are vertices");
            *d -= 1;
            if *d == 0 {
                queue.push(u);
            }
        }
    }
    removed == g.vertex_count()
}

/// Where a gadget's final hop lands.
enum Endpoint {
    /// The designated world of a game successor.
    Confirm(VertexId),
    /// A fresh world rooting the next gadget of the cascade.
    Bridge(WorldId),
    /// A fresh unmarked world (strict-mode singleton padding).
    DeadEnd(WorldId),
}

struct Builder<'a> {
    model: KripkeModel,
    wf: &'a WitnessFrames,
    /// Per relation index: worlds already inside some witness copy.
    covered: BTreeMap<ModalIdx, BTreeSet<WorldId>>,
    /// Numbers the fresh copies of non-designated witness worlds.
    extras: u64,
}

impl Builder<'_> {
    fn mark(&mut self, world: &str, props: &[&str]) {
        for p in props {
            self.model.make_true(p, world).expect("world was added");
        }
    }

    /// Copy `frame` into relation `i`: designated worlds map per `map`,
    /// all others become fresh `c{n}.{orig}` worlds. Every world of the
    /// copy is registered as covered at `i`.
    fn instantiate(&mut self, i: ModalIdx, frame: &Frame, map: &[(&str, &str)]) {
        let mut image: BTreeMap<&str, WorldId> =
            map.iter().map(|&(orig, w)| (orig, w.to_string())).collect();
        for w in &frame.worlds {
            if !image.contains_key(w.as_str()) {
                image.insert(w, format!("c{}.{}", self.extras, w));
                self.extras += 1;
            }
        }
        for w in image.values() {
            self.model.add_world(w.clone());
            self.covered
                .get_mut(&i)
                .expect("index is in the signature")
                .insert(w.clone());
        }
        for (a, b) in &frame.edges {
            self.model
                .add_edge(i, &image[a.as_str()], &image[b.as_str()])
                .expect("copy endpoints were added");
        }
    }

    /// Resolve an endpoint, mark it as a landing site, and hop onto it
    /// with the step witness for relation `i`.
    fn attach(&mut self, i: ModalIdx, src: &str, endpoint: &Endpoint, confirm_marker: &str) {
        let (dst, marks): (WorldId, Vec<&str>) = match endpoint {
            Endpoint::Confirm(u) => (position_world(*u), vec![confirm_marker]),
            Endpoint::Bridge(w) => (w.clone(), vec![confirm_marker, PRE0, BD]),
            Endpoint::DeadEnd(w) => (w.clone(), vec![]),
        };
        let wf = self.wf;
        let step = &wf.steps[&i];
        self.instantiate(i, &step.frame, &[(&step.src, src), (&step.dst, &dst)]);
        self.mark(&dst, &marks);
    }

    /// Lay out one gadget at `root` delivering the two endpoints.
    fn emit_layer(
        &mut self,
        variant: Variant,
        v: VertexId,
        layer: u32,
        root: &str,
        left: &Endpoint,
        right: &Endpoint,
    ) {
        let wf = self.wf;
        match variant {
            Variant::One => {
                let a = format!("v{v}.a{layer}");
                let b = format!("v{v}.b{layer}");
                let ch = wf.choice.as_ref().expect("validated choice witness");
                self.instantiate(
                    0,
                    &ch.frame,
                    &[(&ch.root, root), (&ch.left, &a), (&ch.right, &b)],
                );
                self.mark(&a, &[NXT0, PRE1, BD]);
                self.mark(&b, &[NXT0, PRE1, BD]);
                self.attach(1, &a, left, NXT1);
                self.attach(1, &b, right, NXT1);
            }
            Variant::Two => {
                let m = format!("v{v}.m{layer}");
                let e = format!("v{v}.e{layer}");
                let ch = wf.chain.as_ref().expect("validated chain witness");
                self.instantiate(
                    0,
                    &ch.frame,
                    &[(&ch.root, root), (&ch.mid, &m), (&ch.end, &e)],
                );
                self.mark(&m, &[MID0, PRE1, BD]);
                self.mark(&e, &[NXT0, PRE1, BD]);
                self.attach(1, &m, left, NXT1);
                self.attach(1, &e, right, NXT1);
            }
            Variant::Three => {
                let a = format!("v{v}.a{layer}");
                let b = format!("v{v}.b{layer}");
                let s0 = &wf.steps[&0];
                self.instantiate(0, &s0.frame, &[(&s0.src, root), (&s0.dst, &a)]);
                self.mark(&a, &[NXT0, PRE1, PRE2, BD]);
                let s1 = &wf.steps[&1];
                self.instantiate(1, &s1.frame, &[(&s1.src, &a), (&s1.dst, &b)]);
                self.mark(&b, &[NXT1, PRE2, BD]);
                self.attach(2, &a, left, NXT2);
                self.attach(2, &b, right, NXT2);
            }
        }
    }
}

/// Encode `g` over `wf`'s variant with priority markers up to
/// `max_parity`. All vertex priorities must stay within the bound; the
/// `Strict` mode additionally needs a tree-like game.
pub fn encode(
    g: &ParityGame,
    wf: &WitnessFrames,
    max_parity: u32,
    mode: EncodeMode,
) -> Result<Encoding, EncodeError> {
    wf.validate()?;
    let variant = wf.variant;
    for v in g.vertices() {
        let p = g.priority(v);
        if p > max_parity {
            return Err(EncodeError::PriorityTooHigh {
                vertex: v,
                priority: p,
                max: max_parity,
            });
        }
    }
    if mode == EncodeMode::Strict && !is_tree_like(g) {
        return Err(EncodeError::NotTreeLike);
    }

    let signature = variant.signature();
    let mut b = Builder {
        model: KripkeModel::new(signature.iter().copied()),
        wf,
        covered: signature.iter().map(|&i| (i, BTreeSet::new())).collect(),
        extras: 0,
    };

    // designated worlds with the vertex data as markers
    let mut vertex_map: BTreeMap<VertexId, WorldId> = BTreeMap::new();
    for v in g.vertices() {
        let w = position_world(v);
        b.model.add_world(w.clone());
        let owner = match g.owner(v) {
            Owner::Exists => P_EXISTS,
            Owner::Forall => P_FORALL,
        };
        let priority = parity_marker(g.priority(v));
        b.mark(&w, &[POS, BD, owner, &priority]);
        if !g.successors(v).is_empty() {
            b.mark(&w, &[PRE0]);
        }
        vertex_map.insert(v, w);
    }

    // one gadget cascade per vertex with moves
    for v in g.vertices() {
        let succs = g.successors(v);
        if succs.is_empty() {
            continue;
        }
        let mut root = vertex_map[&v].clone();
        let mut layer: u32 = 0;
        let mut rest: &[VertexId] = &succs;
        loop {
            let (left, right) = match (rest, mode) {
                ([only], EncodeMode::Graph) => (Endpoint::Confirm(*only), Endpoint::Confirm(*only)),
                ([only], EncodeMode::Strict) => (
                    Endpoint::Confirm(*only),
                    Endpoint::DeadEnd(format!("v{v}.d{layer}")),
                ),
                ([l, r], _) => (Endpoint::Confirm(*l), Endpoint::Confirm(*r)),
                ([l, ..], _) => (
                    Endpoint::Confirm(*l),
                    Endpoint::Bridge(format!("v{v}.r{}", layer + 1)),
                ),
                ([], _) => unreachable!("the cascade never runs out of moves"),
            };
            b.emit_layer(variant, v, layer, &root, &left, &right);
            match right {
                Endpoint::Bridge(w) => {
                    root = w;
                    layer += 1;
                    rest = &rest[1..];
                }
                _ => break,
            }
        }
    }

    // completion: every world joins a copy at every index
    for &i in &signature {
        let comp = &wf.completion[&i];
        let uncovered: Vec<WorldId> = b
            .model
            .worlds()
            .iter()
            .filter(|w| !b.covered[&i].contains(*w))
            .cloned()
            .collect();
        for w in uncovered {
            b.instantiate(i, &comp.frame, &[(&comp.world, &w)]);
        }
    }

    let initial_world = vertex_map[&g.initial()].clone();
    Ok(Encoding {
        model: b.model,
        vertex_map,
        variant,
        max_parity,
        initial_world,
    })
}

/// Build the evaluation game of `f` at `pm`'s point and encode it. The
/// priority bound is the game's maximum priority, at least 1. The game
/// starts at vertex 0, so the encoding is pointed at world `v0`.
pub fn encode_eval(
    pm: &PointedModel,
    f: &Formula,
    wf: &WitnessFrames,
    mode: EncodeMode,
) -> Result<(Encoding, EvalGame), EncodeError> {
    let eg = build_eval_game(pm, f)?;
    let n = eg.game.max_priority().max(1);
    let enc = encode(&eg.game, wf, n, mode)?;
    Ok((enc, eg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::kripke::FrameProperty;
    use crate::paritygame::GameBuilder;
    use crate::semantics::{evaluate, holds};

    fn game(table: &[(VertexId, Owner, u32, &[VertexId])], initial: VertexId) -> ParityGame {
        let mut b = GameBuilder::new();
        for &(v, o, p, succs) in table {
            b.vertex(v, o, p);
            for &u in succs {
                b.edge(v, u);
            }
        }
        b.initial(initial);
        b.build().unwrap()
    }

    /// `wn` truth at every designated world against the game solution.
    fn assert_wn_matches_solver(g: &ParityGame, enc: &Encoding) {
        let solved = g.solve();
        let truths = evaluate(&enc.model, &enc.wn_formula(MacroOp::PerVariant)).unwrap();
        for v in g.vertices() {
            assert_eq!(
                truths.contains(&enc.vertex_map[&v]),
                solved.win_exists.contains(&v),
                "vertex {v} of variant {:?}",
                enc.variant,
            );
        }
    }

    #[test]
    fn fan_layout_matches_the_hand_count() {
        // the initial vertex fans out to three dead ends
        let g = game(
            &[
                (0, Owner::Exists, 0, &[1, 2, 3]),
                (1, Owner::Exists, 1, &[]),
                (2, Owner::Forall, 0, &[]),
                (3, Owner::Exists, 8, &[]),
            ],
            0,
        );
        let wf = WitnessFrames::minimal(Variant::One);
        let enc = encode(&g, &wf, 8, EncodeMode::Graph).unwrap();
        let expect: BTreeSet<WorldId> = [
            "v0", "v1", "v2", "v3", "v0.a0", "v0.b0", "v0.r1", "v0.a1", "v0.b1",
        ]
        .map(String::from)
        .into();
        assert_eq!(enc.model.worlds(), &expect);
        assert_eq!(enc.model.prop_worlds(BD), expect);
        // the bridge is confirmed like a target and rooted like a position
        for p in [NXT1, PRE0, BD] {
            assert!(enc.model.holds_prop(p, "v0.r1"), "missing {p}");
        }
        assert!(!enc.model.holds_prop(POS, "v0.r1"));
        assert!(enc.model.holds_prop(P_EXISTS, "v0"));
        assert!(enc.model.holds_prop(P_FORALL, "v2"));
        assert!(enc.model.holds_prop("@P_8", "v3"));
        assert!(enc.model.holds_prop(PRE0, "v0"));
        assert!(!enc.model.holds_prop(PRE0, "v1"));
        assert_eq!(enc.initial_world, "v0");
        assert_eq!(enc.world_of(3), Some(&"v3".to_string()));
        assert_eq!(enc.marker_violations(), Vec::<String>::new());
        // two fan-out edges per layer; one confirm per move plus the bridge hop
        let r0 = enc.model.relation(0).unwrap();
        assert_eq!(r0.len(), 4);
        let r1 = enc.model.relation(1).unwrap();
        assert_eq!(r1.len(), 4);
        assert!(r1.contains(&("v0.b0".into(), "v0.r1".into())));
        assert!(r1.contains(&("v0.a0".into(), "v1".into())));
        // and the priority-8 winning-region formula agrees with the solver
        // at all four positions
        assert_wn_matches_solver(&g, &enc);
    }

    #[test]
    fn self_loop_is_confirmed_by_both_branches() {
        let g = game(&[(0, Owner::Exists, 0, &[0])], 0);
        let wf = WitnessFrames::minimal(Variant::One);
        let enc = encode(&g, &wf, 0, EncodeMode::Graph).unwrap();
        let r1 = enc.model.relation(1).unwrap();
        assert!(r1.contains(&("v0.a0".into(), "v0".into())));
        assert!(r1.contains(&("v0.b0".into(), "v0".into())));
        assert!(enc.model.holds_prop(NXT1, "v0"));
        // the loop has even priority, so the existential player wins it
        assert!(g.solve().win_exists.contains(&0));
        assert_wn_matches_solver(&g, &enc);
    }

    #[test]
    fn stuck_positions_lose_for_their_owner() {
        for (owner, expected) in [(Owner::Exists, false), (Owner::Forall, true)] {
            let g = game(&[(0, owner, 1, &[])], 0);
            assert_eq!(g.solve().win_exists.contains(&0), expected);
            for variant in Variant::ALL {
                let wf = WitnessFrames::minimal(variant);
                let enc = encode(&g, &wf, 1, EncodeMode::Graph).unwrap();
                assert!(enc.marker_violations().is_empty());
                assert_wn_matches_solver(&g, &enc);
            }
        }
    }

    #[test]
    fn wn_matches_the_solver_on_cyclic_games() {
        // an odd two-cycle next to an even self-loop escape
        let g1 = game(
            &[
                (0, Owner::Exists, 1, &[1]),
                (1, Owner::Forall, 0, &[0, 2]),
                (2, Owner::Exists, 2, &[2]),
            ],
            0,
        );
        // the universal player prefers its own odd loop
        let g2 = game(
            &[(0, Owner::Forall, 1, &[0, 1]), (1, Owner::Exists, 2, &[1])],
            0,
        );
        // the existential player escapes its odd loop through an even cycle
        let g3 = game(
            &[(0, Owner::Exists, 1, &[0, 1]), (1, Owner::Forall, 2, &[0])],
            0,
        );
        // an even self-loop behind a fan (bridge over a cycle)
        let g4 = game(
            &[
                (0, Owner::Exists, 2, &[0, 1, 2]),
                (1, Owner::Forall, 0, &[0]),
                (2, Owner::Exists, 1, &[2]),
            ],
            0,
        );
        for g in [&g1, &g2, &g3, &g4] {
            for variant in Variant::ALL {
                let wf = WitnessFrames::minimal(variant);
                let enc = encode(g, &wf, g.max_priority(), EncodeMode::Graph).unwrap();
                assert!(enc.marker_violations().is_empty());
                assert_wn_matches_solver(g, &enc);
            }
        }
    }

    #[test]
    fn s5_reducts_and_truth_on_a_tree() {
        // alternating owners, priorities up to 3, one fan of three
        let g = game(
            &[
                (0, Owner::Forall, 3, &[1, 2]),
                (1, Owner::Exists, 2, &[3, 4, 6]),
                (2, Owner::Exists, 1, &[]),
                (3, Owner::Forall, 0, &[]),
                (4, Owner::Exists, 0, &[5]),
                (5, Owner::Forall, 2, &[]),
                (6, Owner::Exists, 1, &[]),
            ],
            0,
        );
        assert!(is_tree_like(&g));
        for variant in Variant::ALL {
            let wf = WitnessFrames::s5(variant);
            let enc = encode(&g, &wf, 3, EncodeMode::Strict).unwrap();
            assert_eq!(enc.marker_violations(), Vec::<String>::new());
            for &i in enc.model.signature() {
                let props = enc
                    .model
                    .check_frame_properties(
                        i,
                        &[
                            FrameProperty::Reflexive,
                            FrameProperty::Symmetric,
                            FrameProperty::Transitive,
                        ],
                    )
                    .unwrap();
                assert!(
                    props.values().all(|&ok| ok),
                    "relation {i} of variant {variant:?}: {props:?}"
                );
            }
            assert_wn_matches_solver(&g, &enc);
        }
    }

    #[test]
    fn strict_singletons_pad_with_a_dead_end() {
        let g = game(
            &[(0, Owner::Forall, 0, &[1]), (1, Owner::Exists, 1, &[])],
            0,
        );
        let wf = WitnessFrames::s5(Variant::One);
        let enc = encode(&g, &wf, 1, EncodeMode::Strict).unwrap();
        assert!(enc.model.has_world("v0.d0"));
        // the pad world carries no markers but is still covered everywhere
        assert!(enc
            .model
            .valuation()
            .values()
            .all(|set| !set.contains("v0.d0")));
        for &i in enc.model.signature() {
            let props = enc
                .model
                .check_frame_properties(i, &[FrameProperty::Reflexive])
                .unwrap();
            assert!(props[&FrameProperty::Reflexive]);
        }
        // truth is unaffected: the universal player must move to the
        // stuck existential vertex
        assert_wn_matches_solver(&g, &enc);
    }

    #[test]
    fn strict_mode_rejects_shared_targets_and_cycles() {
        let shared = game(
            &[
                (0, Owner::Exists, 0, &[2]),
                (1, Owner::Forall, 1, &[2]),
                (2, Owner::Exists, 0, &[]),
            ],
            0,
        );
        let wf = WitnessFrames::s5(Variant::One);
        assert_eq!(
            encode(&shared, &wf, 1, EncodeMode::Strict).unwrap_err(),
            EncodeError::NotTreeLike
        );
        let minimal = WitnessFrames::minimal(Variant::One);
        assert!(encode(&shared, &minimal, 1, EncodeMode::Graph).is_ok());

        let cycle = game(
            &[(0, Owner::Exists, 0, &[1]), (1, Owner::Forall, 1, &[0])],
            0,
        );
        assert_eq!(
            encode(&cycle, &wf, 1, EncodeMode::Strict).unwrap_err(),
            EncodeError::NotTreeLike
        );
        assert!(!is_tree_like(&cycle));
        assert!(!is_tree_like(&game(&[(0, Owner::Exists, 0, &[0])], 0)));
    }

    #[test]
    fn priorities_above_the_bound_are_rejected() {
        let g = game(&[(0, Owner::Exists, 3, &[])], 0);
        let wf = WitnessFrames::minimal(Variant::Two);
        assert_eq!(
            encode(&g, &wf, 2, EncodeMode::Graph).unwrap_err(),
            EncodeError::PriorityTooHigh {
                vertex: 0,
                priority: 3,
                max: 2
            }
        );
    }

    #[test]
    fn macro_operator_swap_keeps_all_verdicts() {
        let g = game(
            &[
                (0, Owner::Exists, 1, &[1]),
                (1, Owner::Forall, 0, &[0, 2]),
                (2, Owner::Exists, 2, &[2]),
            ],
            0,
        );
        for variant in Variant::ALL {
            let enc = encode(&g, &WitnessFrames::minimal(variant), 2, EncodeMode::Graph).unwrap();
            let base = evaluate(&enc.model, &enc.wn_formula(MacroOp::PerVariant)).unwrap();
            for op in [MacroOp::ForceMu, MacroOp::ForceNu] {
                let swapped = evaluate(&enc.model, &enc.wn_formula(op)).unwrap();
                assert_eq!(swapped, base, "variant {variant:?} under {op:?}");
            }
        }
    }

    #[test]
    fn marker_checks_catch_a_corrupted_model() {
        let g = game(
            &[(0, Owner::Exists, 0, &[1]), (1, Owner::Forall, 1, &[])],
            0,
        );
        let mut enc = encode(
            &g,
            &WitnessFrames::minimal(Variant::One),
            1,
            EncodeMode::Graph,
        )
        .unwrap();
        assert!(enc.marker_violations().is_empty());
        enc.model.make_true(P_EXISTS, "v0.a0").unwrap();
        enc.model.make_true("@P_9", "v1").unwrap();
        let issues = enc.marker_violations();
        assert!(
            issues.iter().any(|s| s.contains("unknown marker @P_9")),
            "{issues:?}"
        );
        assert!(issues.iter().any(|s| s.contains("v0.a0")), "{issues:?}");
        assert_eq!(issues.len(), 2, "{issues:?}");
    }

    #[test]
    fn eval_game_encodings_preserve_truth() {
        let mut m = KripkeModel::new([0]);
        m.add_world("u");
        m.add_world("w");
        m.add_edge(0, "u", "w").unwrap();
        m.make_true("p", "w").unwrap();
        let pm = PointedModel::new(m, "u").unwrap();
        let cases = [
            (parse("<0> p").unwrap(), true),
            (parse("[0] false").unwrap(), false),
            (parse("mu X . p | <0> X").unwrap(), true),
            (parse("nu X . p & [0] X").unwrap(), false),
        ];
        for (f, expected) in cases {
            assert_eq!(holds(&pm, &f).unwrap(), expected, "{f}");
            for variant in Variant::ALL {
                let (enc, eg) =
                    encode_eval(&pm, &f, &WitnessFrames::minimal(variant), EncodeMode::Graph)
                        .unwrap();
                assert_eq!(enc.initial_world, "v0");
                assert_eq!(eg.game.initial(), 0);
                let truths = evaluate(&enc.model, &enc.wn_formula(MacroOp::PerVariant)).unwrap();
                assert_eq!(truths.contains("v0"), expected, "{f} variant {variant:?}");
            }
        }
    }

    #[test]
    fn user_witnesses_with_extra_structure_stay_inert() {
        // a step frame with a spectator world hanging off the source
        let mut wf = WitnessFrames::minimal(Variant::One);
        let s = wf.steps.get_mut(&1).unwrap();
        s.frame.worlds.insert("x".into());
        s.frame.edges.insert(("s".into(), "x".into()));
        wf.validate().unwrap();
        let g = game(
            &[(0, Owner::Exists, 1, &[1]), (1, Owner::Forall, 0, &[0])],
            0,
        );
        let enc = encode(&g, &wf, 1, EncodeMode::Graph).unwrap();
        // both branches of both singleton layers confirm, so four step
        // copies, each with its own fresh spectator
        let spectators: Vec<&WorldId> = enc
            .model
            .worlds()
            .iter()
            .filter(|w| w.starts_with('c'))
            .collect();
        assert_eq!(spectators.len(), 4);
        assert!(spectators.iter().all(|w| w.ends_with(".x")));
        assert_wn_matches_solver(&g, &enc);
    }
}
