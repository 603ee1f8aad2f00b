//! Finite multimodal Kripke models.
//!
//! A model carries a modal signature (the set of relation indices), a finite
//! set of named worlds, one accessibility relation per index, and a valuation
//! mapping proposition names to the sets of worlds where they hold. All
//! containers are ordered so that serialization and generated artifacts are
//! deterministic: the JSON writer emits worlds, pairs and map keys in
//! canonical (lexicographic) order, and `write -> read -> write` is the
//! identity on bytes.

use crate::formula::ModalIdx;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

pub type WorldId = String;

/// World-to-world mapping witnessing an isomorphism.
pub type Isomorphism = BTreeMap<WorldId, WorldId>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown world {0:?}")]
    UnknownWorld(WorldId),
    #[error("unknown relation index {0}")]
    UnknownIndex(ModalIdx),
    #[error("point {0:?} is not a world of the model")]
    BadPoint(WorldId),
    #[error("world set in valuation of {prop:?} mentions unknown world {world:?}")]
    BadValuation { prop: String, world: WorldId },
    #[error("signature mismatch between models")]
    SignatureMismatch,
    #[error("relation key {0:?} is not an index of the signature")]
    BadRelationKey(String),
    #[error("missing relation entry for index {0}")]
    MissingRelation(ModalIdx),
    #[error("duplicate world {0:?}")]
    DuplicateWorld(WorldId),
    #[error("malformed model JSON: {0}")]
    Json(String),
}

/// Which edges count when measuring distance for [`PointedModel::restrict`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// Follow edges forward only.
    #[default]
    Directed,
    /// Treat every edge as bidirectional.
    Undirected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    signature: BTreeSet<ModalIdx>,
    worlds: BTreeSet<WorldId>,
    relations: BTreeMap<ModalIdx, BTreeSet<(WorldId, WorldId)>>,
    valuation: BTreeMap<String, BTreeSet<WorldId>>,
}

impl KripkeModel {
    pub fn new(signature: impl IntoIterator<Item = ModalIdx>) -> Self {
        let signature: BTreeSet<ModalIdx> = signature.into_iter().collect();
        let relations = signature.iter().map(|&i| (i, BTreeSet::new())).collect();
        KripkeModel {
            signature,
            worlds: BTreeSet::new(),
            relations,
            valuation: BTreeMap::new(),
        }
    }

    pub fn signature(&self) -> &BTreeSet<ModalIdx> {
        &self.signature
    }

    pub fn worlds(&self) -> &BTreeSet<WorldId> {
        &self.worlds
    }

    pub fn has_world(&self, w: &str) -> bool {
        self.worlds.contains(w)
    }

    /// Add a world (idempotent).
    pub fn add_world(&mut self, w: impl Into<WorldId>) {
        self.worlds.insert(w.into());
    }

    pub fn relation(&self, i: ModalIdx) -> Result<&BTreeSet<(WorldId, WorldId)>, ModelError> {
        self.relations.get(&i).ok_or(ModelError::UnknownIndex(i))
    }

    pub fn add_edge(&mut self, i: ModalIdx, from: &str, to: &str) -> Result<(), ModelError> {
        if !self.worlds.contains(from) {
            return Err(ModelError::UnknownWorld(from.to_string()));
        }
        if !self.worlds.contains(to) {
            return Err(ModelError::UnknownWorld(to.to_string()));
        }
        self.relations
            .get_mut(&i)
            .ok_or(ModelError::UnknownIndex(i))?
            .insert((from.to_string(), to.to_string()));
        Ok(())
    }

    /// Make `prop` true at `world`.
    pub fn make_true(&mut self, prop: &str, world: &str) -> Result<(), ModelError> {
        if !self.worlds.contains(world) {
            return Err(ModelError::UnknownWorld(world.to_string()));
        }
        self.valuation
            .entry(prop.to_string())
            .or_default()
            .insert(world.to_string());
        Ok(())
    }

    pub fn valuation(&self) -> &BTreeMap<String, BTreeSet<WorldId>> {
        &self.valuation
    }

    /// Worlds where `prop` holds (empty set for unknown propositions).
    pub fn prop_worlds(&self, prop: &str) -> BTreeSet<WorldId> {
        self.valuation.get(prop).cloned().unwrap_or_default()
    }

    pub fn holds_prop(&self, prop: &str, world: &str) -> bool {
        self.valuation.get(prop).is_some_and(|s| s.contains(world))
    }

    pub fn successors(&self, i: ModalIdx, w: &str) -> Result<Vec<&WorldId>, ModelError> {
        Ok(self
            .relation(i)?
            .iter()
            .filter(|(a, _)| a == w)
            .map(|(_, b)| b)
            .collect())
    }

    /// The model with the valuation of `name` replaced by `set` (the
    /// augmentation `M[X := A]` used for fixpoint unfolding).
    pub fn augment(&self, name: &str, set: &BTreeSet<WorldId>) -> Result<KripkeModel, ModelError> {
        if let Some(w) = set.iter().find(|w| !self.worlds.contains(*w)) {
            return Err(ModelError::BadValuation {
                prop: name.to_string(),
                world: w.clone(),
            });
        }
        let mut m = self.clone();
        if set.is_empty() {
            m.valuation.remove(name);
        } else {
            m.valuation.insert(name.to_string(), set.clone());
        }
        Ok(m)
    }

    /// Disjoint union. World `w` of the `k`-th input is renamed to `k:w`.
    /// All inputs must share one signature.
    pub fn disjoint_union(models: &[KripkeModel]) -> Result<KripkeModel, ModelError> {
        let sig = match models.first() {
            Some(m) => m.signature.clone(),
            None => BTreeSet::new(),
        };
        if models.iter().any(|m| m.signature != sig) {
            return Err(ModelError::SignatureMismatch);
        }
        let mut out = KripkeModel::new(sig);
        for (k, m) in models.iter().enumerate() {
            let tag = |w: &WorldId| format!("{k}:{w}");
            for w in &m.worlds {
                out.worlds.insert(tag(w));
            }
            for (&i, edges) in &m.relations {
                let r = out.relations.get_mut(&i).unwrap();
                for (a, b) in edges {
                    r.insert((tag(a), tag(b)));
                }
            }
            for (p, set) in &m.valuation {
                let v = out.valuation.entry(p.clone()).or_default();
                for w in set {
                    v.insert(tag(w));
                }
            }
        }
        Ok(out)
    }

    /// Per-index frame properties of the accessibility relation.
    pub fn check_frame_properties(
        &self,
        i: ModalIdx,
        props: &[FrameProperty],
    ) -> Result<BTreeMap<FrameProperty, bool>, ModelError> {
        let edges = self.relation(i)?;
        let has = |a: &WorldId, b: &WorldId| edges.contains(&(a.clone(), b.clone()));
        let mut out = BTreeMap::new();
        for &p in props {
            let ok = match p {
                FrameProperty::Reflexive => self.worlds.iter().all(|w| has(w, w)),
                FrameProperty::Irreflexive => self.worlds.iter().all(|w| !has(w, w)),
                FrameProperty::Symmetric => edges.iter().all(|(a, b)| has(b, a)),
                FrameProperty::Transitive => edges
                    .iter()
                    .all(|(a, b)| edges.iter().filter(|(c, _)| c == b).all(|(_, d)| has(a, d))),
                FrameProperty::Euclidean => edges
                    .iter()
                    .all(|(a, b)| edges.iter().filter(|(c, _)| c == a).all(|(_, d)| has(b, d))),
                FrameProperty::Serial => self
                    .worlds
                    .iter()
                    .all(|w| edges.iter().any(|(a, _)| a == w)),
            };
            out.insert(p, ok);
        }
        Ok(out)
    }

    /// Serialize to the canonical JSON text (single line, keys and world
    /// arrays sorted). `point` is emitted as the optional `"point"` field.
    pub fn to_json(&self, point: Option<&WorldId>) -> String {
        let file = ModelFile {
            signature: self.signature.iter().copied().collect(),
            worlds: self.worlds.iter().cloned().collect(),
            relations: self
                .relations
                .iter()
                .map(|(i, es)| (i.to_string(), es.iter().cloned().collect()))
                .collect(),
            valuation: self
                .valuation
                .iter()
                .map(|(p, ws)| (p.clone(), ws.iter().cloned().collect()))
                .collect(),
            point: point.cloned(),
        };
        serde_json::to_string(&file).expect("model serialization cannot fail")
    }

    /// Parse and validate the JSON model format. Returns the model and the
    /// optional point.
    pub fn from_json(text: &str) -> Result<(KripkeModel, Option<WorldId>), ModelError> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        let mut m = KripkeModel::new(file.signature.iter().copied());
        for w in &file.worlds {
            if !m.worlds.insert(w.clone()) {
                return Err(ModelError::DuplicateWorld(w.clone()));
            }
        }
        for (key, pairs) in &file.relations {
            let i: ModalIdx = key
                .parse()
                .map_err(|_| ModelError::BadRelationKey(key.clone()))?;
            if !m.signature.contains(&i) {
                return Err(ModelError::BadRelationKey(key.clone()));
            }
            for (a, b) in pairs {
                m.add_edge(i, a, b)?;
            }
        }
        for i in &m.signature.clone() {
            if !file.relations.contains_key(&i.to_string()) {
                return Err(ModelError::MissingRelation(*i));
            }
        }
        for (p, ws) in &file.valuation {
            for w in ws {
                m.make_true(p, w).map_err(|_| ModelError::BadValuation {
                    prop: p.clone(),
                    world: w.clone(),
                })?;
            }
        }
        if let Some(pt) = &file.point {
            if !m.worlds.contains(pt) {
                return Err(ModelError::BadPoint(pt.clone()));
            }
        }
        Ok((m, file.point))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FrameProperty {
    Reflexive,
    Transitive,
    Symmetric,
    Serial,
    Euclidean,
    Irreflexive,
}

impl std::fmt::Display for FrameProperty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FrameProperty::Reflexive => "reflexive",
            FrameProperty::Transitive => "transitive",
            FrameProperty::Symmetric => "symmetric",
            FrameProperty::Serial => "serial",
            FrameProperty::Euclidean => "euclidean",
            FrameProperty::Irreflexive => "irreflexive",
        };
        f.write_str(s)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    signature: Vec<ModalIdx>,
    worlds: Vec<WorldId>,
    relations: BTreeMap<String, Vec<(WorldId, WorldId)>>,
    valuation: BTreeMap<String, Vec<WorldId>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    point: Option<WorldId>,
}

/// A model with a distinguished world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedModel {
    pub model: KripkeModel,
    pub point: WorldId,
}

impl PointedModel {
    pub fn new(model: KripkeModel, point: impl Into<WorldId>) -> Result<Self, ModelError> {
        let point = point.into();
        if !model.has_world(&point) {
            return Err(ModelError::BadPoint(point));
        }
        Ok(PointedModel { model, point })
    }

    pub fn to_json(&self) -> String {
        self.model.to_json(Some(&self.point))
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let (model, point) = KripkeModel::from_json(text)?;
        let point = point.ok_or(ModelError::Json("missing \"point\"".to_string()))?;
        PointedModel::new(model, point)
    }

    /// The submodel of worlds at distance `< n` from the point, measured
    /// over the union of all relations. `n = 0` yields the empty model
    /// (which has no point).
    pub fn restrict(&self, n: usize, mode: DistanceMode) -> Restriction {
        let mut keep: BTreeSet<WorldId> = BTreeSet::new();
        if n > 0 {
            let mut dist: BTreeMap<&WorldId, usize> = BTreeMap::new();
            let mut queue: VecDeque<&WorldId> = VecDeque::new();
            dist.insert(&self.point, 0);
            queue.push_back(&self.point);
            while let Some(w) = queue.pop_front() {
                let d = dist[w];
                if d + 1 >= n {
                    continue;
                }
                for edges in self.model.relations.values() {
                    for (a, b) in edges {
                        let next = if a == w {
                            Some(b)
                        } else if mode == DistanceMode::Undirected && b == w {
                            Some(a)
                        } else {
                            None
                        };
                        if let Some(v) = next {
                            if !dist.contains_key(v) {
                                dist.insert(v, d + 1);
                                queue.push_back(v);
                            }
                        }
                    }
                }
            }
            keep = dist.keys().map(|w| (*w).clone()).collect();
        }
        let mut m = KripkeModel::new(self.model.signature.iter().copied());
        m.worlds = keep.clone();
        for (&i, edges) in &self.model.relations {
            let r = m.relations.get_mut(&i).unwrap();
            for (a, b) in edges {
                if keep.contains(a) && keep.contains(b) {
                    r.insert((a.clone(), b.clone()));
                }
            }
        }
        for (p, ws) in &self.model.valuation {
            let set: BTreeSet<WorldId> = ws.intersection(&keep).cloned().collect();
            if !set.is_empty() {
                m.valuation.insert(p.clone(), set);
            }
        }
        let point = if n > 0 {
            Some(self.point.clone())
        } else {
            None
        };
        Restriction { model: m, point }
    }

    /// Pointed isomorphism: a bijection preserving the point, every
    /// relation and the valuation in both directions.
    pub fn isomorphic(&self, other: &PointedModel) -> Option<Isomorphism> {
        isomorphic_opt(
            &self.model,
            Some(&self.point),
            &other.model,
            Some(&other.point),
        )
    }

    /// Isomorphism of the distance-`< n` restrictions.
    pub fn n_isomorphic(
        &self,
        other: &PointedModel,
        n: usize,
        mode: DistanceMode,
    ) -> Option<Isomorphism> {
        self.restrict(n, mode).isomorphic(&other.restrict(n, mode))
    }
}

/// Result of [`PointedModel::restrict`]; the point survives only when the
/// radius is positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub model: KripkeModel,
    pub point: Option<WorldId>,
}

impl Restriction {
    pub fn isomorphic(&self, other: &Restriction) -> Option<Isomorphism> {
        isomorphic_opt(
            &self.model,
            self.point.as_ref(),
            &other.model,
            other.point.as_ref(),
        )
    }
}

/// Exhaustive isomorphism search with pruning on local invariants: worlds
/// can only map to worlds with the same proposition set and the same
/// per-index in/out degrees. A relation index missing from one model's
/// signature is compared as an empty relation, so models differing only
/// by structureless indices count as isomorphic. Intended for the
/// desk-scale models the verification pipelines produce.
fn isomorphic_opt(
    a: &KripkeModel,
    pa: Option<&WorldId>,
    b: &KripkeModel,
    pb: Option<&WorldId>,
) -> Option<Isomorphism> {
    if a.worlds.len() != b.worlds.len() {
        return None;
    }
    if pa.is_some() != pb.is_some() {
        return None;
    }

    let indices: Vec<ModalIdx> = a.signature.union(&b.signature).copied().collect();

    let color = |m: &KripkeModel, w: &WorldId| -> (Vec<String>, Vec<(usize, usize)>) {
        let props: Vec<String> = m
            .valuation
            .iter()
            .filter(|(_, ws)| ws.contains(w))
            .map(|(p, _)| p.clone())
            .collect();
        let degs: Vec<(usize, usize)> = indices
            .iter()
            .map(|i| match m.relations.get(i) {
                Some(es) => {
                    let out = es.iter().filter(|(x, _)| x == w).count();
                    let inn = es.iter().filter(|(_, y)| y == w).count();
                    (out, inn)
                }
                None => (0, 0),
            })
            .collect();
        (props, degs)
    };

    type Color = (Vec<String>, Vec<(usize, usize)>);
    let colors_a: BTreeMap<&WorldId, Color> = a.worlds.iter().map(|w| (w, color(a, w))).collect();
    let colors_b: BTreeMap<&WorldId, Color> = b.worlds.iter().map(|w| (w, color(b, w))).collect();

    // class sizes must agree
    let mut count_a: BTreeMap<&Color, usize> = BTreeMap::new();
    for c in colors_a.values() {
        *count_a.entry(c).or_default() += 1;
    }
    let mut count_b: BTreeMap<&Color, usize> = BTreeMap::new();
    for c in colors_b.values() {
        *count_b.entry(c).or_default() += 1;
    }
    if count_a != count_b {
        return None;
    }

    let edges_a: HashSet<(ModalIdx, &WorldId, &WorldId)> = a
        .relations
        .iter()
        .flat_map(|(&i, es)| es.iter().map(move |(x, y)| (i, x, y)))
        .collect();
    let edges_b: HashSet<(ModalIdx, &WorldId, &WorldId)> = b
        .relations
        .iter()
        .flat_map(|(&i, es)| es.iter().map(move |(x, y)| (i, x, y)))
        .collect();

    let mut map: BTreeMap<&WorldId, &WorldId> = BTreeMap::new();
    let mut used: BTreeSet<&WorldId> = BTreeSet::new();

    // the points must correspond
    if let (Some(x), Some(y)) = (pa, pb) {
        if colors_a[x] != colors_b[y] {
            return None;
        }
        map.insert(x, y);
        used.insert(y);
    }

    struct Ctx<'m> {
        order: Vec<&'m WorldId>,
        colors_a: BTreeMap<&'m WorldId, Color>,
        colors_b: BTreeMap<&'m WorldId, Color>,
        edges_a: HashSet<(ModalIdx, &'m WorldId, &'m WorldId)>,
        edges_b: HashSet<(ModalIdx, &'m WorldId, &'m WorldId)>,
        indices: Vec<ModalIdx>,
        b_worlds: &'m BTreeSet<WorldId>,
    }

    fn search<'m>(
        ctx: &Ctx<'m>,
        idx: usize,
        map: &mut BTreeMap<&'m WorldId, &'m WorldId>,
        used: &mut BTreeSet<&'m WorldId>,
    ) -> bool {
        let Some(&v) = ctx.order.get(idx) else {
            return true;
        };
        if map.contains_key(v) {
            return search(ctx, idx + 1, map, used);
        }
        'cand: for w in ctx.b_worlds {
            if used.contains(w) || ctx.colors_a[v] != ctx.colors_b[w] {
                continue;
            }
            for (&u, &u2) in map.iter() {
                for &i in &ctx.indices {
                    if ctx.edges_a.contains(&(i, v, u)) != ctx.edges_b.contains(&(i, w, u2))
                        || ctx.edges_a.contains(&(i, u, v)) != ctx.edges_b.contains(&(i, u2, w))
                    {
                        continue 'cand;
                    }
                }
            }
            // self-loops
            if ctx
                .indices
                .iter()
                .any(|&i| ctx.edges_a.contains(&(i, v, v)) != ctx.edges_b.contains(&(i, w, w)))
            {
                continue;
            }
            map.insert(v, w);
            used.insert(w);
            if search(ctx, idx + 1, map, used) {
                return true;
            }
            map.remove(v);
            used.remove(w);
        }
        false
    }

    let ctx = Ctx {
        order: a.worlds.iter().collect(),
        colors_a,
        colors_b,
        edges_a,
        edges_b,
        indices,
        b_worlds: &b.worlds,
    };
    if search(&ctx, 0, &mut map, &mut used) {
        Some(
            map.into_iter()
                .map(|(x, y)| (x.clone(), y.clone()))
                .collect(),
        )
    } else {
        None
    }
}
