//! Formula AST for the multimodal mu-calculus.
//!
//! Formulas are kept in negation normal form: negation appears only on
//! propositions (`Lit` with `positive: false`). The surface syntax accepts a
//! restricted implication `a -> b` whose antecedent is propositional; the
//! parser desugars it into this AST via De Morgan, so the evaluator and the
//! game construction never see an implication node.

mod classify;
mod parser;

pub use classify::{classify, priority_of, HierarchyLevel};
pub use parser::{parse, ParseError};

use std::collections::BTreeSet;
use std::fmt;

/// Index of a modality / accessibility relation (`<i>`, `[i]`).
pub type ModalIdx = u32;

/// Fixpoint operator kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fix {
    Mu,
    Nu,
}

impl Fix {
    pub fn dual(self) -> Fix {
        match self {
            Fix::Mu => Fix::Nu,
            Fix::Nu => Fix::Mu,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bottom,
    /// Proposition literal; `positive: false` is the negated proposition.
    Lit {
        name: String,
        positive: bool,
    },
    Var(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// `<i> f`
    Dia(ModalIdx, Box<Formula>),
    /// `[i] f`
    Box(ModalIdx, Box<Formula>),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
}

/// Errors from structural operations on formulas.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("formula is not rename-apart")]
    NotRenameApart,
    #[error("variable {0} has no binder")]
    UnboundVariable(String),
    #[error("subformula is not a fixpoint formula")]
    NotAFixpoint,
    #[error("not a subformula")]
    NotASubformula,
}

// Convenience constructors; tests and the encoding generators build a lot of
// ASTs by hand.
pub fn prop(name: &str) -> Formula {
    Formula::Lit {
        name: name.to_string(),
        positive: true,
    }
}
pub fn nprop(name: &str) -> Formula {
    Formula::Lit {
        name: name.to_string(),
        positive: false,
    }
}
pub fn var(name: &str) -> Formula {
    Formula::Var(name.to_string())
}
pub fn and(a: Formula, b: Formula) -> Formula {
    Formula::And(Box::new(a), Box::new(b))
}
pub fn or(a: Formula, b: Formula) -> Formula {
    Formula::Or(Box::new(a), Box::new(b))
}
pub fn dia(i: ModalIdx, f: Formula) -> Formula {
    Formula::Dia(i, Box::new(f))
}
pub fn boxm(i: ModalIdx, f: Formula) -> Formula {
    Formula::Box(i, Box::new(f))
}
pub fn mu(x: &str, f: Formula) -> Formula {
    Formula::Mu(x.to_string(), Box::new(f))
}
pub fn nu(x: &str, f: Formula) -> Formula {
    Formula::Nu(x.to_string(), Box::new(f))
}

/// `a -> b` with a propositional antecedent, desugared to `~a | b` by
/// pushing the negation down to literals. Panics if `a` is not propositional;
/// the parser checks this before calling.
pub fn implies(a: Formula, b: Formula) -> Formula {
    or(
        negate_propositional(&a).expect("implication antecedent must be propositional"),
        b,
    )
}

/// De Morgan dual of a propositional formula (literals, constants, and/or).
/// Returns `None` when the formula contains a variable, modality or fixpoint.
pub fn negate_propositional(f: &Formula) -> Option<Formula> {
    match f {
        Formula::Top => Some(Formula::Bottom),
        Formula::Bottom => Some(Formula::Top),
        Formula::Lit { name, positive } => Some(Formula::Lit {
            name: name.clone(),
            positive: !positive,
        }),
        Formula::And(a, b) => Some(or(negate_propositional(a)?, negate_propositional(b)?)),
        Formula::Or(a, b) => Some(and(negate_propositional(a)?, negate_propositional(b)?)),
        _ => None,
    }
}

impl Formula {
    /// Variables occurring free.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, acc: &mut BTreeSet<String>) {
            match f {
                Formula::Top | Formula::Bottom | Formula::Lit { .. } => {}
                Formula::Var(x) => {
                    if !bound.iter().any(|b| b == x) {
                        acc.insert(x.clone());
                    }
                }
                Formula::And(a, b) | Formula::Or(a, b) => {
                    go(a, bound, acc);
                    go(b, bound, acc);
                }
                Formula::Dia(_, g) | Formula::Box(_, g) => go(g, bound, acc),
                Formula::Mu(x, g) | Formula::Nu(x, g) => {
                    bound.push(x.clone());
                    go(g, bound, acc);
                    bound.pop();
                }
            }
        }
        let mut acc = BTreeSet::new();
        go(self, &mut Vec::new(), &mut acc);
        acc
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// True if the variable occurs (the caller decides whether that means
    /// "free": on rename-apart formulas every occurrence of a binder's
    /// variable inside a proper subformula is free there).
    pub fn mentions_var(&self, x: &str) -> bool {
        match self {
            Formula::Var(y) => y == x,
            Formula::Top | Formula::Bottom | Formula::Lit { .. } => false,
            Formula::And(a, b) | Formula::Or(a, b) => a.mentions_var(x) || b.mentions_var(x),
            Formula::Dia(_, g) | Formula::Box(_, g) => g.mentions_var(x),
            Formula::Mu(_, g) | Formula::Nu(_, g) => g.mentions_var(x),
        }
    }

    /// All subformulas in pre-order, the formula itself first.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            out.push(f);
            match f {
                Formula::And(a, b) | Formula::Or(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Formula::Dia(_, g) | Formula::Box(_, g) | Formula::Mu(_, g) | Formula::Nu(_, g) => {
                    go(g, out)
                }
                _ => {}
            }
        }
        go(self, &mut out);
        out
    }

    /// Fixpoint-rooted subformulas in pre-order.
    pub fn fixpoint_subformulas(&self) -> Vec<&Formula> {
        self.subformulas()
            .into_iter()
            .filter(|f| matches!(f, Formula::Mu(..) | Formula::Nu(..)))
            .collect()
    }

    /// The fixpoint kind, for `Mu`/`Nu` nodes.
    pub fn fix_kind(&self) -> Option<Fix> {
        match self {
            Formula::Mu(..) => Some(Fix::Mu),
            Formula::Nu(..) => Some(Fix::Nu),
            _ => None,
        }
    }

    pub fn count_fixpoints(&self) -> usize {
        self.fixpoint_subformulas().len()
    }

    pub fn has_modality(&self) -> bool {
        self.subformulas()
            .iter()
            .any(|f| matches!(f, Formula::Dia(..) | Formula::Box(..)))
    }

    /// Modal indices used anywhere in the formula.
    pub fn modal_indices(&self) -> BTreeSet<ModalIdx> {
        self.subformulas()
            .iter()
            .filter_map(|f| match f {
                Formula::Dia(i, _) | Formula::Box(i, _) => Some(*i),
                _ => None,
            })
            .collect()
    }

    /// True if all binders use pairwise-distinct variables that also differ
    /// from every free variable.
    pub fn is_rename_apart(&self) -> bool {
        let mut seen = self.free_vars();
        fn go(f: &Formula, seen: &mut BTreeSet<String>) -> bool {
            match f {
                Formula::Mu(x, g) | Formula::Nu(x, g) => {
                    if !seen.insert(x.clone()) {
                        return false;
                    }
                    go(g, seen)
                }
                Formula::And(a, b) | Formula::Or(a, b) => go(a, seen) && go(b, seen),
                Formula::Dia(_, g) | Formula::Box(_, g) => go(g, seen),
                _ => true,
            }
        }
        go(self, &mut seen)
    }

    /// Alpha-rename binders so that every binder variable is unique and
    /// distinct from all free variables. Free variables are untouched.
    /// Idempotent up to the choice of fresh names.
    pub fn rename_apart(&self) -> Formula {
        fn fresh(base: &str, used: &BTreeSet<String>) -> String {
            let mut k = 1u64;
            loop {
                let cand = format!("{base}{k}");
                if !used.contains(&cand) {
                    return cand;
                }
                k += 1;
            }
        }
        fn go(
            f: &Formula,
            used: &mut BTreeSet<String>,
            env: &mut Vec<(String, String)>,
        ) -> Formula {
            match f {
                Formula::Top | Formula::Bottom | Formula::Lit { .. } => f.clone(),
                Formula::Var(x) => {
                    // innermost binding wins
                    for (old, new) in env.iter().rev() {
                        if old == x {
                            return Formula::Var(new.clone());
                        }
                    }
                    Formula::Var(x.clone())
                }
                Formula::And(a, b) => and(go(a, used, env), go(b, used, env)),
                Formula::Or(a, b) => or(go(a, used, env), go(b, used, env)),
                Formula::Dia(i, g) => dia(*i, go(g, used, env)),
                Formula::Box(i, g) => boxm(*i, go(g, used, env)),
                Formula::Mu(x, g) | Formula::Nu(x, g) => {
                    let name = if used.contains(x) {
                        fresh(x, used)
                    } else {
                        x.clone()
                    };
                    used.insert(name.clone());
                    env.push((x.clone(), name.clone()));
                    let body = go(g, used, env);
                    env.pop();
                    match f {
                        Formula::Mu(..) => Formula::Mu(name, Box::new(body)),
                        _ => Formula::Nu(name, Box::new(body)),
                    }
                }
            }
        }
        let mut used = self.free_vars();
        go(self, &mut used, &mut Vec::new())
    }

    /// The unique fixpoint subformula binding `x`. Requires rename-apart.
    pub fn binder_of(&self, x: &str) -> Result<&Formula, FormulaError> {
        if !self.is_rename_apart() {
            return Err(FormulaError::NotRenameApart);
        }
        self.subformulas()
            .into_iter()
            .find(|f| matches!(f, Formula::Mu(y, _) | Formula::Nu(y, _) if y == x))
            .ok_or_else(|| FormulaError::UnboundVariable(x.to_string()))
    }

    /// Structural size (number of AST nodes).
    pub fn size(&self) -> usize {
        self.subformulas().len()
    }
}

// ---------------------------------------------------------------------------
// Printing. The printer emits the concrete grammar back out with minimal
// parentheses; `parse(f.to_string()) == f` for every AST built from the
// constructors above.
// ---------------------------------------------------------------------------

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        // prec: 1 = or-level, 2 = and-level, 3 = unary operand.
        // `rightmost` tracks whether the node extends to the end of the
        // enclosing formula, in which case a binder needs no parentheses.
        fn go(f: &Formula, prec: u8, rightmost: bool, out: &mut fmt::Formatter<'_>) -> fmt::Result {
            match f {
                Formula::Top => write!(out, "true"),
                Formula::Bottom => write!(out, "false"),
                Formula::Lit { name, positive } => {
                    if *positive {
                        write!(out, "{name}")
                    } else {
                        write!(out, "~{name}")
                    }
                }
                Formula::Var(x) => write!(out, "{x}"),
                Formula::Or(a, b) => {
                    let need = prec > 1;
                    if need {
                        write!(out, "(")?;
                    }
                    go(a, 2, false, out)?;
                    write!(out, " | ")?;
                    go(b, 2, rightmost && !need, out)?;
                    if need {
                        write!(out, ")")?;
                    }
                    Ok(())
                }
                Formula::And(a, b) => {
                    let need = prec > 2;
                    if need {
                        write!(out, "(")?;
                    }
                    go(a, 3, false, out)?;
                    write!(out, " & ")?;
                    go(b, 3, rightmost && !need, out)?;
                    if need {
                        write!(out, ")")?;
                    }
                    Ok(())
                }
                Formula::Dia(i, g) => {
                    write!(out, "<{i}> ")?;
                    go(g, 3, rightmost, out)
                }
                Formula::Box(i, g) => {
                    write!(out, "[{i}] ")?;
                    go(g, 3, rightmost, out)
                }
                Formula::Mu(x, g) | Formula::Nu(x, g) => {
                    let kw = if matches!(f, Formula::Mu(..)) {
                        "mu"
                    } else {
                        "nu"
                    };
                    let need = !rightmost && prec > 0;
                    if need {
                        write!(out, "(")?;
                    }
                    write!(out, "{kw} {x} . ")?;
                    go(g, 0, true, out)?;
                    if need {
                        write!(out, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, 0, true, out)
    }
}
