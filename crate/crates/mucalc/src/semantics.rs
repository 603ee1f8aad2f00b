//! Denotational semantics: the set of worlds satisfying a formula.
//!
//! Fixpoints are computed by plain Kleene iteration — least fixpoints start
//! from the empty set, greatest fixpoints from the full world set, and the
//! body is re-evaluated until the approximant stabilizes. Worlds are
//! interned to indices once per call and all set operations run on packed
//! bit vectors, so the iteration stays cheap even on the randomized
//! verification workloads.

use crate::formula::{Formula, ModalIdx};
use crate::kripke::{KripkeModel, PointedModel, WorldId};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("variable {0} is not bound and has no value in the environment or valuation")]
    UnboundVariable(String),
    #[error("modality index {0} is not in the model signature")]
    UnknownModality(ModalIdx),
    #[error("environment entry for {var} mentions unknown world {world:?}")]
    UnknownWorldInEnv { var: String, world: WorldId },
}

/// Worlds of `model` where the closed formula `f` holds.
pub fn evaluate(model: &KripkeModel, f: &Formula) -> Result<BTreeSet<WorldId>, SemanticsError> {
    evaluate_with_env(model, f, &BTreeMap::new())
}

/// Worlds where `f` holds, with free variables drawn from `env` first and
/// falling back to the model valuation (the shape `augment` produces).
pub fn evaluate_with_env(
    model: &KripkeModel,
    f: &Formula,
    env: &BTreeMap<String, BTreeSet<WorldId>>,
) -> Result<BTreeSet<WorldId>, SemanticsError> {
    let ev = Evaluator::new(model);
    let mut scope: Vec<(String, Bits)> = Vec::new();
    for (x, ws) in env {
        let mut bits = Bits::empty(ev.n);
        for w in ws {
            let Some(&i) = ev.ids.get(w) else {
                return Err(SemanticsError::UnknownWorldInEnv {
                    var: x.clone(),
                    world: w.clone(),
                });
            };
            bits.insert(i);
        }
        scope.push((x.clone(), bits));
    }
    let bits = ev.eval(f, &mut scope)?;
    Ok(ev.to_worlds(&bits))
}

/// Does `f` hold at the distinguished world?
pub fn holds(pm: &PointedModel, f: &Formula) -> Result<bool, SemanticsError> {
    Ok(evaluate(&pm.model, f)?.contains(&pm.point))
}

struct Evaluator<'m> {
    n: usize,
    ids: BTreeMap<&'m WorldId, usize>,
    names: Vec<&'m WorldId>,
    /// successor sets per signature index, indexed by interned world
    succ: BTreeMap<ModalIdx, Vec<Bits>>,
    props: BTreeMap<&'m str, Bits>,
}

impl<'m> Evaluator<'m> {
    fn new(model: &'m KripkeModel) -> Self {
        let names: Vec<&WorldId> = model.worlds().iter().collect();
        let n = names.len();
        let ids: BTreeMap<&WorldId, usize> =
            names.iter().enumerate().map(|(i, w)| (*w, i)).collect();
        let mut succ = BTreeMap::new();
        for &i in model.signature() {
            let mut adj = vec![Bits::empty(n); n];
            for (a, b) in model.relation(i).expect("index from signature") {
                adj[ids[a]].insert(ids[b]);
            }
            succ.insert(i, adj);
        }
        let props = model
            .valuation()
            .iter()
            .map(|(p, ws)| {
                let mut bits = Bits::empty(n);
                for w in ws {
                    bits.insert(ids[w]);
                }
                (p.as_str(), bits)
            })
            .collect();
        Evaluator {
            n,
            ids,
            names,
            succ,
            props,
        }
    }

    fn to_worlds(&self, bits: &Bits) -> BTreeSet<WorldId> {
        (0..self.n)
            .filter(|&i| bits.contains(i))
            .map(|i| self.names[i].clone())
            .collect()
    }

    fn eval(&self, f: &Formula, scope: &mut Vec<(String, Bits)>) -> Result<Bits, SemanticsError> {
        match f {
            Formula::Top => Ok(Bits::full(self.n)),
            Formula::Bottom => Ok(Bits::empty(self.n)),
            Formula::Lit { name, positive } => {
                let set = self
                    .props
                    .get(name.as_str())
                    .cloned()
                    .unwrap_or_else(|| Bits::empty(self.n));
                Ok(if *positive {
                    set
                } else {
                    set.complement(self.n)
                })
            }
            Formula::Var(x) => scope
                .iter()
                .rev()
                .find(|(y, _)| y == x)
                .map(|(_, bits)| bits.clone())
                .or_else(|| self.props.get(x.as_str()).cloned())
                .ok_or_else(|| SemanticsError::UnboundVariable(x.clone())),
            Formula::And(a, b) => {
                let mut l = self.eval(a, scope)?;
                l.intersect_with(&self.eval(b, scope)?);
                Ok(l)
            }
            Formula::Or(a, b) => {
                let mut l = self.eval(a, scope)?;
                l.union_with(&self.eval(b, scope)?);
                Ok(l)
            }
            Formula::Dia(i, g) => {
                let adj = self
                    .succ
                    .get(i)
                    .ok_or(SemanticsError::UnknownModality(*i))?;
                let inner = self.eval(g, scope)?;
                let mut out = Bits::empty(self.n);
                for (w, row) in adj.iter().enumerate() {
                    if row.intersects(&inner) {
                        out.insert(w);
                    }
                }
                Ok(out)
            }
            Formula::Box(i, g) => {
                let adj = self
                    .succ
                    .get(i)
                    .ok_or(SemanticsError::UnknownModality(*i))?;
                let inner = self.eval(g, scope)?;
                let mut out = Bits::empty(self.n);
                for (w, row) in adj.iter().enumerate() {
                    if row.is_subset(&inner) {
                        out.insert(w);
                    }
                }
                Ok(out)
            }
            Formula::Mu(x, body) => self.fixpoint(x, body, Bits::empty(self.n), scope),
            Formula::Nu(x, body) => self.fixpoint(x, body, Bits::full(self.n), scope),
        }
    }

    fn fixpoint(
        &self,
        x: &str,
        body: &Formula,
        start: Bits,
        scope: &mut Vec<(String, Bits)>,
    ) -> Result<Bits, SemanticsError> {
        let mut cur = start;
        loop {
            scope.push((x.to_string(), cur.clone()));
            let next = self.eval(body, scope);
            scope.pop();
            let next = next?;
            if next == cur {
                return Ok(cur);
            }
            cur = next;
        }
    }
}

/// Packed bit vector over `0..n`; unused high bits of the last block are
/// kept zero so equality on blocks is equality of sets.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut blocks = vec![u64::MAX; n.div_ceil(64)];
        if !n.is_multiple_of(64) {
            if let Some(last) = blocks.last_mut() {
                *last = (1u64 << (n % 64)) - 1;
            }
        }
        Bits(blocks)
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1u64 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1u64 << (i % 64)) != 0
    }

    fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    fn intersect_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
    }

    fn complement(&self, n: usize) -> Bits {
        let mut out = Bits::full(n);
        for (a, b) in out.0.iter_mut().zip(&self.0) {
            *a &= !b;
        }
        out
    }

    fn intersects(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{and, boxm, dia, mu, nprop, nu, or, prop, var};
    use crate::kripke::KripkeModel;

    fn worlds(items: &[&str]) -> BTreeSet<WorldId> {
        items.iter().map(|s| s.to_string()).collect()
    }

    /// w -0-> u with p true at u.
    fn chain() -> KripkeModel {
        let mut m = KripkeModel::new([0]);
        m.add_world("w");
        m.add_world("u");
        m.add_edge(0, "w", "u").unwrap();
        m.make_true("p", "u").unwrap();
        m
    }

    #[test]
    fn least_fixpoint_reaches_p() {
        // "p is reachable along 0-edges"
        let f = mu("X", or(prop("p"), dia(0, var("X"))));
        assert_eq!(evaluate(&chain(), &f).unwrap(), worlds(&["u", "w"]));
    }

    #[test]
    fn greatest_fixpoint_needs_a_cycle() {
        let f = nu("X", dia(0, var("X")));
        assert_eq!(evaluate(&chain(), &f).unwrap(), worlds(&[]));

        let mut looped = chain();
        looped.add_edge(0, "u", "u").unwrap();
        assert_eq!(evaluate(&looped, &f).unwrap(), worlds(&["u", "w"]));
    }

    #[test]
    fn boolean_and_literal_cases() {
        let m = chain();
        assert_eq!(evaluate(&m, &prop("p")).unwrap(), worlds(&["u"]));
        assert_eq!(evaluate(&m, &nprop("p")).unwrap(), worlds(&["w"]));
        assert_eq!(evaluate(&m, &prop("missing")).unwrap(), worlds(&[]));
        assert_eq!(
            evaluate(&m, &nprop("missing")).unwrap(),
            worlds(&["u", "w"])
        );
        assert_eq!(evaluate(&m, &Formula::Top).unwrap(), worlds(&["u", "w"]));
        assert_eq!(evaluate(&m, &Formula::Bottom).unwrap(), worlds(&[]));
        assert_eq!(
            evaluate(&m, &and(prop("p"), nprop("p"))).unwrap(),
            worlds(&[])
        );
    }

    #[test]
    fn box_is_vacuously_true_at_dead_ends() {
        let m = chain();
        // u has no 0-successor
        assert_eq!(
            evaluate(&m, &boxm(0, Formula::Bottom)).unwrap(),
            worlds(&["u"])
        );
        assert_eq!(evaluate(&m, &dia(0, Formula::Top)).unwrap(), worlds(&["w"]));
        assert_eq!(
            evaluate(&m, &boxm(0, prop("p"))).unwrap(),
            worlds(&["u", "w"])
        );
    }

    #[test]
    fn alternating_modalities_on_a_two_cycle() {
        // a -0-> b -0-> a, p at a; "every second step hits p forever"
        let mut m = KripkeModel::new([0]);
        m.add_world("a");
        m.add_world("b");
        m.add_edge(0, "a", "b").unwrap();
        m.add_edge(0, "b", "a").unwrap();
        m.make_true("p", "a").unwrap();
        let f = nu("X", and(prop("p"), dia(0, dia(0, var("X")))));
        assert_eq!(evaluate(&m, &f).unwrap(), worlds(&["a"]));
    }

    #[test]
    fn environment_and_valuation_supply_free_variables() {
        let m = chain();
        let f = dia(0, var("X"));
        assert!(matches!(
            evaluate(&m, &f),
            Err(SemanticsError::UnboundVariable(x)) if x == "X"
        ));

        let mut env = BTreeMap::new();
        env.insert("X".to_string(), worlds(&["u"]));
        assert_eq!(evaluate_with_env(&m, &f, &env).unwrap(), worlds(&["w"]));

        // augmented models carry variable values in the valuation
        let aug = m.augment("X", &worlds(&["u"])).unwrap();
        assert_eq!(evaluate(&aug, &f).unwrap(), worlds(&["w"]));

        // a binder shadows both
        let g = mu("X", or(prop("p"), dia(0, var("X"))));
        assert_eq!(
            evaluate_with_env(&m, &g, &env).unwrap(),
            worlds(&["u", "w"])
        );

        env.insert("X".to_string(), worlds(&["nope"]));
        assert!(matches!(
            evaluate_with_env(&m, &f, &env),
            Err(SemanticsError::UnknownWorldInEnv { .. })
        ));
    }

    #[test]
    fn unknown_modality_is_an_error() {
        let m = chain();
        assert!(matches!(
            evaluate(&m, &dia(3, Formula::Top)),
            Err(SemanticsError::UnknownModality(3))
        ));
        assert!(matches!(
            evaluate(&m, &boxm(3, Formula::Top)),
            Err(SemanticsError::UnknownModality(3))
        ));
    }

    #[test]
    fn fixpoint_results_are_fixpoints() {
        // re-substituting the computed set leaves it unchanged
        let mut m = KripkeModel::new([0, 1]);
        for w in ["a", "b", "c", "d"] {
            m.add_world(w);
        }
        m.add_edge(0, "a", "b").unwrap();
        m.add_edge(0, "b", "c").unwrap();
        m.add_edge(1, "c", "a").unwrap();
        m.add_edge(0, "d", "d").unwrap();
        m.make_true("p", "c").unwrap();
        for f in [
            mu("X", or(prop("p"), or(dia(0, var("X")), dia(1, var("X"))))),
            nu("X", and(nprop("p"), boxm(0, var("X")))),
            nu("X", dia(0, var("X"))),
        ] {
            let (x, body) = match &f {
                Formula::Mu(x, b) | Formula::Nu(x, b) => (x.clone(), (**b).clone()),
                _ => unreachable!(),
            };
            let result = evaluate(&m, &f).unwrap();
            let mut env = BTreeMap::new();
            env.insert(x, result.clone());
            assert_eq!(evaluate_with_env(&m, &body, &env).unwrap(), result);
        }
    }

    #[test]
    fn empty_model_evaluates_everything_to_empty() {
        let m = KripkeModel::new([0]);
        let f = nu("X", boxm(0, var("X")));
        assert_eq!(evaluate(&m, &f).unwrap(), worlds(&[]));
        assert_eq!(evaluate(&m, &Formula::Top).unwrap(), worlds(&[]));
    }
}
