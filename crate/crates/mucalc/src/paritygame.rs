//! Parity games: arena representation, exact solving, tree unfolding, and
//! PGSolver-format text I/O.
//!
//! The solver is the classic recursive attractor decomposition. Dead ends
//! are handled by totalizing the arena first: a stuck vertex gets a single
//! edge into a fresh losing sink for its owner (an odd self-loop for ∃, an
//! even self-loop for ∀), which realizes the rule that a player with no
//! available move loses. The sinks are stripped from the returned solution.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub type VertexId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Owner {
    Exists,
    Forall,
}

impl Owner {
    pub fn opponent(self) -> Owner {
        match self {
            Owner::Exists => Owner::Forall,
            Owner::Forall => Owner::Exists,
        }
    }

    fn side(self) -> usize {
        match self {
            Owner::Exists => 0,
            Owner::Forall => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("vertex {0} is declared twice")]
    DuplicateVertex(VertexId),
    #[error("edge references undeclared vertex {0}")]
    UnknownVertex(VertexId),
    #[error("initial vertex {0} is not declared")]
    BadInitial(VertexId),
    #[error("no initial vertex")]
    MissingInitial,
    #[error("vertex name {0:?} contains a quote or line break")]
    BadName(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Two-player parity arena with a designated initial vertex. Owner
/// `Exists` wins a play iff the greatest priority occurring infinitely
/// often is even; a player who cannot move loses immediately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityGame {
    owners: BTreeMap<VertexId, Owner>,
    priority: BTreeMap<VertexId, u32>,
    edges: BTreeSet<(VertexId, VertexId)>,
    names: BTreeMap<VertexId, String>,
    initial: VertexId,
}

/// Incremental construction with validation at the end.
#[derive(Debug, Clone, Default)]
pub struct GameBuilder {
    owners: BTreeMap<VertexId, Owner>,
    priority: BTreeMap<VertexId, u32>,
    edges: BTreeSet<(VertexId, VertexId)>,
    names: BTreeMap<VertexId, String>,
    initial: Option<VertexId>,
    duplicate: Option<VertexId>,
}

impl GameBuilder {
    pub fn new() -> Self {
        GameBuilder::default()
    }

    pub fn vertex(&mut self, id: VertexId, owner: Owner, priority: u32) -> &mut Self {
        if self.owners.insert(id, owner).is_some() && self.duplicate.is_none() {
            self.duplicate = Some(id);
        }
        self.priority.insert(id, priority);
        self
    }

    pub fn name(&mut self, id: VertexId, name: impl Into<String>) -> &mut Self {
        self.names.insert(id, name.into());
        self
    }

    pub fn edge(&mut self, from: VertexId, to: VertexId) -> &mut Self {
        self.edges.insert((from, to));
        self
    }

    pub fn initial(&mut self, id: VertexId) -> &mut Self {
        self.initial = Some(id);
        self
    }

    pub fn build(&self) -> Result<ParityGame, GameError> {
        if let Some(id) = self.duplicate {
            return Err(GameError::DuplicateVertex(id));
        }
        let initial = self.initial.ok_or(GameError::MissingInitial)?;
        if !self.owners.contains_key(&initial) {
            return Err(GameError::BadInitial(initial));
        }
        for &(a, b) in &self.edges {
            for v in [a, b] {
                if !self.owners.contains_key(&v) {
                    return Err(GameError::UnknownVertex(v));
                }
            }
        }
        for (id, name) in &self.names {
            if !self.owners.contains_key(id) {
                return Err(GameError::UnknownVertex(*id));
            }
            if name.contains('"') || name.contains('\n') || name.contains('\r') {
                return Err(GameError::BadName(name.clone()));
            }
        }
        Ok(ParityGame {
            owners: self.owners.clone(),
            priority: self.priority.clone(),
            edges: self.edges.clone(),
            names: self.names.clone(),
            initial,
        })
    }
}

/// Winning regions and memoryless winning strategies. Each strategy is
/// defined exactly on the owner's vertices inside the owner's region and
/// follows edges that stay in that region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub win_exists: BTreeSet<VertexId>,
    pub win_forall: BTreeSet<VertexId>,
    pub strategy_exists: BTreeMap<VertexId, VertexId>,
    pub strategy_forall: BTreeMap<VertexId, VertexId>,
}

impl Solution {
    pub fn winner_of(&self, v: VertexId) -> Owner {
        if self.win_exists.contains(&v) {
            Owner::Exists
        } else {
            Owner::Forall
        }
    }
}

impl ParityGame {
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.owners.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.owners.len()
    }

    pub fn owner(&self, v: VertexId) -> Owner {
        self.owners[&v]
    }

    pub fn priority(&self, v: VertexId) -> u32 {
        self.priority[&v]
    }

    pub fn name(&self, v: VertexId) -> Option<&str> {
        self.names.get(&v).map(String::as_str)
    }

    pub fn initial(&self) -> VertexId {
        self.initial
    }

    pub fn edges(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.edges
    }

    pub fn successors(&self, v: VertexId) -> Vec<VertexId> {
        self.edges
            .range((v, VertexId::MIN)..=(v, VertexId::MAX))
            .map(|&(_, b)| b)
            .collect()
    }

    pub fn max_priority(&self) -> u32 {
        self.priority.values().copied().max().unwrap_or(0)
    }

    pub fn with_initial(&self, v: VertexId) -> Result<ParityGame, GameError> {
        if !self.owners.contains_key(&v) {
            return Err(GameError::BadInitial(v));
        }
        let mut g = self.clone();
        g.initial = v;
        Ok(g)
    }

    /// Exact winning regions and memoryless strategies for both players.
    /// The returned partition is checked before returning: the regions
    /// cover the vertices disjointly and each strategy stays inside its
    /// owner's region.
    pub fn solve(&self) -> Solution {
        let ids: Vec<VertexId> = self.vertices().collect();
        let pos: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = ids.len();
        let sink_even = n;
        let sink_odd = n + 1;

        let mut owner: Vec<Owner> = ids.iter().map(|&v| self.owners[&v]).collect();
        owner.push(Owner::Forall); // even sink
        owner.push(Owner::Exists); // odd sink
        let mut priority: Vec<u32> = ids.iter().map(|&v| self.priority[&v]).collect();
        priority.push(0);
        priority.push(1);

        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
        for &(a, b) in &self.edges {
            succ[pos[&a]].push(pos[&b]);
        }
        for v in 0..n {
            if succ[v].is_empty() {
                succ[v].push(match owner[v] {
                    Owner::Exists => sink_odd,
                    Owner::Forall => sink_even,
                });
            }
        }
        succ[sink_even].push(sink_even);
        succ[sink_odd].push(sink_odd);

        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
        for (v, ss) in succ.iter().enumerate() {
            for &s in ss {
                pred[s].push(v);
            }
        }

        let arena = Arena {
            owner,
            priority,
            succ,
            pred,
        };
        let alive: BTreeSet<usize> = (0..n + 2).collect();
        let parts = zielonka(&arena, &alive);

        let mut sol = Solution {
            win_exists: BTreeSet::new(),
            win_forall: BTreeSet::new(),
            strategy_exists: BTreeMap::new(),
            strategy_forall: BTreeMap::new(),
        };
        for (i, &id) in ids.iter().enumerate() {
            if parts.win[0].contains(&i) {
                sol.win_exists.insert(id);
            } else {
                sol.win_forall.insert(id);
            }
        }
        for (side, strat) in [(0, &mut sol.strategy_exists), (1, &mut sol.strategy_forall)] {
            let region = if side == 0 {
                &sol.win_exists
            } else {
                &sol.win_forall
            };
            for (&v, &t) in &parts.strat[side] {
                if v < n && t < n && region.contains(&ids[v]) {
                    strat.insert(ids[v], ids[t]);
                }
            }
        }
        self.check_solution(&sol);
        sol
    }

    /// Sanity checks on a freshly computed solution; violations are bugs.
    fn check_solution(&self, sol: &Solution) {
        assert!(
            sol.win_exists.is_disjoint(&sol.win_forall),
            "winning regions overlap"
        );
        let all: BTreeSet<VertexId> = self.vertices().collect();
        let union: BTreeSet<VertexId> = sol.win_exists.union(&sol.win_forall).copied().collect();
        assert_eq!(all, union, "winning regions do not cover the game");
        for (who, region, strat) in [
            (Owner::Exists, &sol.win_exists, &sol.strategy_exists),
            (Owner::Forall, &sol.win_forall, &sol.strategy_forall),
        ] {
            for &v in region {
                if self.owners[&v] == who {
                    let t = strat
                        .get(&v)
                        .unwrap_or_else(|| panic!("missing strategy at vertex {v}"));
                    assert!(
                        self.edges.contains(&(v, *t)),
                        "strategy leaves the edge set"
                    );
                    assert!(region.contains(t), "strategy leaves the winning region");
                }
            }
            for v in strat.keys() {
                assert!(
                    region.contains(v) && self.owners[v] == who,
                    "strategy defined off the owner's region"
                );
            }
        }
    }

    /// The vertices from which ∃ wins, validated pointwise by re-solving
    /// with each vertex as the initial one.
    pub fn winning_positions(&self) -> BTreeSet<VertexId> {
        let wins = self.solve().win_exists;
        for v in self.vertices() {
            let again = self.with_initial(v).expect("vertex exists").solve();
            assert_eq!(
                again.win_exists.contains(&v),
                wins.contains(&v),
                "pointwise re-solve disagrees at vertex {v}"
            );
        }
        wins
    }

    /// Tree unfolding: players move to fresh copies of vertices, following
    /// paths from the initial vertex of length below `depth` (a depth of 0
    /// still yields the root copy). Copies keep owner and priority; a copy
    /// whose successors were cut off by the depth bound gets a `~cut`
    /// marker appended to its name. For an acyclic game whose paths are
    /// all shorter than `depth`, the unfolding is the game itself, tree
    /// shaped.
    pub fn unfold(&self, depth: u32) -> ParityGame {
        let plies = depth.max(1);
        let mut b = GameBuilder::new();
        let mut queue: VecDeque<(VertexId, VertexId, u32)> = VecDeque::new();
        let mut next_id: VertexId = 0;
        queue.push_back((0, self.initial, 0));
        next_id += 1;
        while let Some((copy, orig, ply)) = queue.pop_front() {
            b.vertex(copy, self.owners[&orig], self.priority[&orig]);
            let base = match self.names.get(&orig) {
                Some(n) => n.clone(),
                None => format!("v{orig}"),
            };
            let succs = self.successors(orig);
            if ply + 1 < plies {
                for s in succs {
                    let child = next_id;
                    next_id += 1;
                    b.edge(copy, child);
                    queue.push_back((child, s, ply + 1));
                }
                b.name(copy, base);
            } else {
                b.name(
                    copy,
                    if succs.is_empty() {
                        base
                    } else {
                        format!("{base}~cut")
                    },
                );
            }
        }
        b.initial(0);
        b.build().expect("unfolding of a valid game is valid")
    }

    /// Serialize as PGSolver text: `parity <max-id>;` header, one
    /// semicolon-terminated line per vertex in ascending id order with
    /// priority, owner (0 = ∃, 1 = ∀), comma-separated successors (field
    /// omitted when stuck) and the optional quoted name. A `start <id>;`
    /// line is emitted only when the initial vertex is not the first
    /// listed one.
    pub fn write_pg(&self) -> String {
        let max = self.vertices().max().expect("games are nonempty");
        let mut out = format!("parity {max};\n");
        let first = self.vertices().next().expect("games are nonempty");
        if self.initial != first {
            out.push_str(&format!("start {};\n", self.initial));
        }
        for v in self.vertices() {
            out.push_str(&format!(
                "{v} {} {}",
                self.priority[&v],
                match self.owners[&v] {
                    Owner::Exists => 0,
                    Owner::Forall => 1,
                }
            ));
            let succs = self.successors(v);
            if !succs.is_empty() {
                let list: Vec<String> = succs.iter().map(|s| s.to_string()).collect();
                out.push(' ');
                out.push_str(&list.join(","));
            }
            if let Some(name) = self.names.get(&v) {
                out.push_str(&format!(" \"{name}\""));
            }
            out.push_str(";\n");
        }
        out
    }

    /// Parse PGSolver text (the exact dialect `write_pg` emits; the
    /// declared maximum id may exceed the ids in use). The initial vertex
    /// is the `start` line's id when present, otherwise the first listed
    /// vertex.
    pub fn read_pg(text: &str) -> Result<ParityGame, GameError> {
        let err = |line: usize, msg: &str| GameError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
        let max_id: VertexId = header
            .strip_prefix("parity ")
            .and_then(|r| r.strip_suffix(';'))
            .ok_or_else(|| err(hline, "expected header `parity <max-id>;`"))?
            .trim()
            .parse()
            .map_err(|_| err(hline, "malformed maximum id in header"))?;

        let mut b = GameBuilder::new();
        let mut start: Option<VertexId> = None;
        let mut first_vertex: Option<VertexId> = None;
        for (ln, line) in lines {
            if let Some(rest) = line.strip_prefix("start ") {
                if first_vertex.is_some() {
                    return Err(err(ln, "`start` must precede vertex lines"));
                }
                if start.is_some() {
                    return Err(err(ln, "duplicate `start` line"));
                }
                let id = rest
                    .strip_suffix(';')
                    .ok_or_else(|| err(ln, "missing `;`"))?
                    .trim()
                    .parse()
                    .map_err(|_| err(ln, "malformed `start` id"))?;
                start = Some(id);
                continue;
            }
            let body = line
                .strip_suffix(';')
                .ok_or_else(|| err(ln, "missing `;`"))?;
            let mut rest = body.trim_start();

            let take_field = |what: &str, rest: &mut &str| -> Result<u32, GameError> {
                let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
                let (tok, tail) = rest.split_at(end);
                let v = tok
                    .parse()
                    .map_err(|_| err(ln, &format!("malformed {what} field")))?;
                *rest = tail.trim_start();
                Ok(v)
            };
            let id: VertexId = take_field("id", &mut rest)?;
            let priority: u32 = take_field("priority", &mut rest)?;
            let owner = match take_field("owner", &mut rest)? {
                0 => Owner::Exists,
                1 => Owner::Forall,
                _ => return Err(err(ln, "owner must be 0 or 1")),
            };
            if id > max_id {
                return Err(err(ln, "vertex id exceeds the declared maximum"));
            }
            if b.owners.contains_key(&id) {
                return Err(GameError::DuplicateVertex(id));
            }
            b.vertex(id, owner, priority);
            first_vertex.get_or_insert(id);

            if rest.starts_with(|c: char| c.is_ascii_digit()) {
                let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
                let (list, tail) = rest.split_at(end);
                for tok in list.split(',') {
                    let to: VertexId = tok
                        .parse()
                        .map_err(|_| err(ln, "malformed successor list"))?;
                    if to > max_id {
                        return Err(err(ln, "successor id exceeds the declared maximum"));
                    }
                    b.edge(id, to);
                }
                rest = tail.trim_start();
            }
            if let Some(name_rest) = rest.strip_prefix('"') {
                let close = name_rest
                    .find('"')
                    .ok_or_else(|| err(ln, "unterminated vertex name"))?;
                b.name(id, &name_rest[..close]);
                rest = name_rest[close + 1..].trim_start();
            }
            if !rest.is_empty() {
                return Err(err(ln, "trailing input after vertex line"));
            }
        }
        let first = first_vertex.ok_or(GameError::MissingInitial)?;
        b.initial(start.unwrap_or(first));
        b.build()
    }
}

struct Arena {
    owner: Vec<Owner>,
    priority: Vec<u32>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

#[derive(Default)]
struct Parts {
    /// winning sets, indexed by Owner::side()
    win: [BTreeSet<usize>; 2],
    /// positional strategies, indexed by Owner::side()
    strat: [BTreeMap<usize, usize>; 2],
}

/// Vertices from which `player` can force reaching `base`, plus the
/// attracting strategy for the vertices that joined along the way.
fn attractor(
    a: &Arena,
    alive: &BTreeSet<usize>,
    player: Owner,
    base: &BTreeSet<usize>,
) -> (BTreeSet<usize>, BTreeMap<usize, usize>) {
    let mut attr = base.clone();
    let mut strat = BTreeMap::new();
    let mut queue: VecDeque<usize> = base.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        for &u in &a.pred[v] {
            if !alive.contains(&u) || attr.contains(&u) {
                continue;
            }
            if a.owner[u] == player {
                attr.insert(u);
                strat.insert(u, v);
                queue.push_back(u);
            } else {
                let mut any = false;
                let mut all_in = true;
                for &s in &a.succ[u] {
                    if alive.contains(&s) {
                        any = true;
                        if !attr.contains(&s) {
                            all_in = false;
                            break;
                        }
                    }
                }
                if any && all_in {
                    attr.insert(u);
                    queue.push_back(u);
                }
            }
        }
    }
    (attr, strat)
}

/// Recursive attractor decomposition over a total arena (every alive
/// vertex keeps at least one alive successor, which the sink construction
/// guarantees for the top call and attractor removal preserves below).
fn zielonka(a: &Arena, alive: &BTreeSet<usize>) -> Parts {
    if alive.is_empty() {
        return Parts::default();
    }
    let d = alive.iter().map(|&v| a.priority[v]).max().unwrap();
    let alpha = if d % 2 == 0 {
        Owner::Exists
    } else {
        Owner::Forall
    };
    let opp = alpha.opponent();
    let base: BTreeSet<usize> = alive
        .iter()
        .copied()
        .filter(|&v| a.priority[v] == d)
        .collect();
    let (attr_a, attr_a_strat) = attractor(a, alive, alpha, &base);
    let sub: BTreeSet<usize> = alive.difference(&attr_a).copied().collect();
    let inner = zielonka(a, &sub);

    if inner.win[opp.side()].is_empty() {
        // alpha wins everywhere: attract to the top-priority vertices and
        // otherwise follow the subgame strategy.
        let mut parts = inner;
        parts.win[alpha.side()] = alive.clone();
        parts.win[opp.side()].clear();
        let st = &mut parts.strat[alpha.side()];
        st.extend(attr_a_strat);
        for &v in &base {
            if a.owner[v] == alpha {
                let s = a.succ[v]
                    .iter()
                    .copied()
                    .find(|s| alive.contains(s))
                    .expect("total arena has an alive successor");
                st.insert(v, s);
            }
        }
        parts
    } else {
        // the opponent holds territory: it also wins everything attracted
        // to that territory; re-solve the rest.
        let held = inner.win[opp.side()].clone();
        let (attr_b, attr_b_strat) = attractor(a, alive, opp, &held);
        let sub2: BTreeSet<usize> = alive.difference(&attr_b).copied().collect();
        let mut parts = zielonka(a, &sub2);
        parts.win[opp.side()].extend(attr_b);
        let st = &mut parts.strat[opp.side()];
        for (v, t) in &inner.strat[opp.side()] {
            st.insert(*v, *t);
        }
        st.extend(attr_b_strat);
        parts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game(table: &[(VertexId, Owner, u32, &[VertexId])], initial: VertexId) -> ParityGame {
        let mut b = GameBuilder::new();
        for &(id, owner, pri, succs) in table {
            b.vertex(id, owner, pri);
            for &s in succs {
                b.edge(id, s);
            }
        }
        b.initial(initial);
        b.build().unwrap()
    }

    const FAN: &str =
        "parity 3;\n0 0 0 1,2,3 \"e0\";\n1 1 0 \"e1\";\n2 0 1 \"a0\";\n3 8 0 \"e8\";\n";

    #[test]
    fn self_loops_are_decided_by_parity() {
        let even = game(&[(0, Owner::Exists, 0, &[0])], 0);
        assert_eq!(even.solve().win_exists, BTreeSet::from([0]));
        let odd = game(&[(0, Owner::Exists, 1, &[0])], 0);
        assert_eq!(odd.solve().win_forall, BTreeSet::from([0]));
    }

    #[test]
    fn stuck_player_loses() {
        let stuck_e = game(&[(0, Owner::Exists, 0, &[])], 0);
        assert_eq!(stuck_e.solve().win_forall, BTreeSet::from([0]));
        let all_stuck_a = game(
            &[
                (0, Owner::Forall, 5, &[]),
                (1, Owner::Forall, 3, &[]),
                (2, Owner::Forall, 1, &[]),
            ],
            0,
        );
        assert_eq!(all_stuck_a.solve().win_exists, BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn fan_out_of_stuck_vertices() {
        // An ∃ vertex fanning out to one stuck ∃ vertex, one stuck ∀
        // vertex and another stuck ∃ vertex: the ∀-owned dead end is a win
        // for ∃, and moving there wins from the root too.
        let g = ParityGame::read_pg(FAN).unwrap();
        let sol = g.solve();
        assert_eq!(sol.win_exists, BTreeSet::from([0, 2]));
        assert_eq!(sol.strategy_exists, BTreeMap::from([(0, 2)]));
        assert_eq!(g.winning_positions(), BTreeSet::from([0, 2]));
    }

    #[test]
    fn strategies_pick_the_right_loop() {
        // root chooses between an even loop and an odd loop
        let table: &[(VertexId, Owner, u32, &[VertexId])] = &[
            (0, Owner::Exists, 0, &[1, 2]),
            (1, Owner::Exists, 0, &[1]),
            (2, Owner::Exists, 1, &[2]),
        ];
        let g = game(table, 0);
        let sol = g.solve();
        assert_eq!(sol.win_exists, BTreeSet::from([0, 1]));
        assert_eq!(sol.strategy_exists[&0], 1);

        let mut flipped: Vec<(VertexId, Owner, u32, &[VertexId])> = table.to_vec();
        flipped[0].1 = Owner::Forall;
        let g2 = game(&flipped, 0);
        let sol2 = g2.solve();
        assert_eq!(sol2.win_forall, BTreeSet::from([0, 2]));
        assert_eq!(sol2.strategy_forall[&0], 2);
    }

    #[test]
    fn cycles_judged_by_their_greatest_priority() {
        // a(∀,3) -> b(∃,2); with a back edge and a self-loop at b the ∃
        // player can stay on priority 2 forever
        let g = game(
            &[(0, Owner::Forall, 3, &[1]), (1, Owner::Exists, 2, &[0, 1])],
            0,
        );
        let sol = g.solve();
        assert_eq!(sol.win_exists, BTreeSet::from([0, 1]));
        assert_eq!(sol.strategy_exists[&1], 1);

        // without the self-loop every play alternates through priority 3
        let g2 = game(
            &[(0, Owner::Forall, 3, &[1]), (1, Owner::Exists, 2, &[0])],
            0,
        );
        assert_eq!(g2.solve().win_forall, BTreeSet::from([0, 1]));
    }

    #[test]
    fn attractor_basin_joins_the_win() {
        // chain of ∃ vertices leading to an even loop
        let g = game(
            &[
                (0, Owner::Exists, 1, &[1]),
                (1, Owner::Exists, 3, &[2]),
                (2, Owner::Exists, 0, &[2]),
            ],
            0,
        );
        assert_eq!(g.solve().win_exists, BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn pg_round_trip_is_byte_identical() {
        let g = ParityGame::read_pg(FAN).unwrap();
        assert_eq!(g.write_pg(), FAN);
        assert_eq!(ParityGame::read_pg(&g.write_pg()).unwrap(), g);

        // nameless vertices and non-default start
        let mut b = GameBuilder::new();
        b.vertex(3, Owner::Forall, 2);
        b.vertex(7, Owner::Exists, 1);
        b.edge(3, 7).edge(7, 7).initial(7);
        let g2 = b.build().unwrap();
        let text = g2.write_pg();
        assert_eq!(text, "parity 7;\nstart 7;\n3 2 1 7;\n7 1 0 7;\n");
        assert_eq!(ParityGame::read_pg(&text).unwrap(), g2);
    }

    #[test]
    fn pg_parser_rejects_malformed_input() {
        for (text, needle) in [
            ("", "empty input"),
            ("parody 3;\n0 0 0;\n", "expected header"),
            (
                "parity 3;\n0 0 0 99 \"x\";\n",
                "exceeds the declared maximum",
            ),
            ("parity 3;\n0 0 7;\n", "owner must be 0 or 1"),
            ("parity 3;\n0 0 0\n", "missing `;`"),
            ("parity 3;\n0 0 0 \"oops;\n", "unterminated vertex name"),
            ("parity 3;\n0 0 0 \"x\" extra;\n", "trailing input"),
            ("parity 1;\n0 0 0 1;\n1 0 0;\nstart 0;\n", "must precede"),
            ("parity 3;\n", "no initial vertex"),
        ] {
            let e = ParityGame::read_pg(text).unwrap_err();
            assert!(
                e.to_string().contains(needle),
                "{text:?} should fail with {needle:?}, got {e}"
            );
        }
        assert_eq!(
            ParityGame::read_pg("parity 2;\n0 0 0 1;\n"),
            Err(GameError::UnknownVertex(1))
        );
        assert_eq!(
            ParityGame::read_pg("parity 2;\n0 0 0;\n0 1 1;\n"),
            Err(GameError::DuplicateVertex(0))
        );
    }

    #[test]
    fn header_may_declare_a_larger_maximum() {
        let g = ParityGame::read_pg("parity 9;\n0 0 0 1;\n1 2 1 0;\n").unwrap();
        assert_eq!(g.write_pg(), "parity 1;\n0 0 0 1;\n1 2 1 0;\n");
    }

    #[test]
    fn unfolding_a_tree_is_exact() {
        let g = ParityGame::read_pg(FAN).unwrap();
        let u = g.unfold(4);
        assert_eq!(u.vertex_count(), 4);
        assert_eq!(u.edges().len(), 3);
        assert!(u.vertices().all(|v| !u.name(v).unwrap().contains("~cut")));
        assert_eq!(
            u.solve().win_exists.contains(&u.initial()),
            g.solve().win_exists.contains(&g.initial())
        );
    }

    #[test]
    fn unfolding_a_self_loop_gives_a_marked_path() {
        let g = game(&[(0, Owner::Exists, 0, &[0])], 0);
        let u = g.unfold(3);
        assert_eq!(u.vertex_count(), 3);
        assert_eq!(u.edges(), &BTreeSet::from([(0, 1), (1, 2)]));
        assert_eq!(u.name(2), Some("v0~cut"));
        assert_eq!(u.name(1), Some("v0"));

        let root_only = g.unfold(0);
        assert_eq!(root_only.vertex_count(), 1);
        assert!(root_only.edges().is_empty());
        assert_eq!(root_only.name(0), Some("v0~cut"));
    }

    #[test]
    fn builder_validation() {
        let mut b = GameBuilder::new();
        b.vertex(0, Owner::Exists, 0).edge(0, 1).initial(0);
        assert_eq!(b.build(), Err(GameError::UnknownVertex(1)));

        let mut b = GameBuilder::new();
        b.vertex(0, Owner::Exists, 0);
        assert_eq!(b.build(), Err(GameError::MissingInitial));

        let mut b = GameBuilder::new();
        b.vertex(0, Owner::Exists, 0).initial(5);
        assert_eq!(b.build(), Err(GameError::BadInitial(5)));

        let mut b = GameBuilder::new();
        b.vertex(0, Owner::Exists, 0)
            .name(0, "has \" quote")
            .initial(0);
        assert!(matches!(b.build(), Err(GameError::BadName(_))));
    }
}
