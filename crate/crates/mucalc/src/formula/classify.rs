//! Alternation-hierarchy classification.
//!
//! The level of a formula is computed from its dependency chains: a chain is
//! a sequence of nested fixpoint subformulas `f_1 ⊋ f_2 ⊋ ... ⊋ f_k` with
//! strictly alternating mu/nu kinds such that the variable bound by `f_i`
//! occurs free in `f_{i+1}`. With `L` the longest chain length, `Mmu`/`Mnu`
//! the longest lengths of chains starting with a mu/nu formula:
//!
//! * `sigma_level = L + 1` if some maximal chain starts with nu, else `L`;
//! * `pi_level    = L + 1` if some maximal chain starts with mu, else `L`;
//! * both are `0` exactly when the formula has no fixpoint operator.
//!
//! Levels are invariant under alpha-renaming, so the entry points rename
//! apart internally when needed.

use super::{Fix, Formula, FormulaError};
use std::collections::HashMap;

/// Position of a formula in the alternation hierarchy: the least `n` with
/// `f` in Sigma_n respectively Pi_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HierarchyLevel {
    pub sigma_level: u32,
    pub pi_level: u32,
}

/// Longest alternating dependency chain starting at the fixpoint formula
/// `node`, memoized by node address (the AST is borrowed, addresses are
/// stable for the duration of the walk).
fn longest_chain(node: &Formula, memo: &mut HashMap<*const Formula, u32>) -> u32 {
    let key = node as *const Formula;
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let (kind, x, body) = match node {
        Formula::Mu(x, body) => (Fix::Mu, x, body),
        Formula::Nu(x, body) => (Fix::Nu, x, body),
        _ => unreachable!("longest_chain called on a non-fixpoint node"),
    };
    let mut best = 0;
    for t in body.fixpoint_subformulas() {
        if t.fix_kind() == Some(kind.dual()) && t.mentions_var(x) {
            best = best.max(longest_chain(t, memo));
        }
    }
    let v = 1 + best;
    memo.insert(key, v);
    v
}

/// Compute the hierarchy levels of `f`.
pub fn classify(f: &Formula) -> HierarchyLevel {
    let owned;
    let f = if f.is_rename_apart() {
        f
    } else {
        owned = f.rename_apart();
        &owned
    };
    let mut memo = HashMap::new();
    let mut longest = 0u32;
    let mut longest_mu = 0u32;
    let mut longest_nu = 0u32;
    for node in f.fixpoint_subformulas() {
        let l = longest_chain(node, &mut memo);
        longest = longest.max(l);
        match node.fix_kind().unwrap() {
            Fix::Mu => longest_mu = longest_mu.max(l),
            Fix::Nu => longest_nu = longest_nu.max(l),
        }
    }
    if longest == 0 {
        return HierarchyLevel {
            sigma_level: 0,
            pi_level: 0,
        };
    }
    HierarchyLevel {
        sigma_level: longest + u32::from(longest_nu == longest),
        pi_level: longest + u32::from(longest_mu == longest),
    }
}

/// Parity-game priority of the fixpoint subformula `sub` of `f`:
/// for a mu formula the largest odd number at most its sigma level, for a
/// nu formula the largest even number at most its pi level. `f` must be
/// rename-apart and `sub` one of its fixpoint subformulas.
pub fn priority_of(f: &Formula, sub: &Formula) -> Result<u32, FormulaError> {
    if !f.is_rename_apart() {
        return Err(FormulaError::NotRenameApart);
    }
    let kind = match sub.fix_kind() {
        Some(k) => k,
        None => return Err(FormulaError::NotAFixpoint),
    };
    if !f.subformulas().contains(&sub) {
        return Err(FormulaError::NotASubformula);
    }
    let lvl = classify(sub);
    Ok(match kind {
        // sigma/pi level of a fixpoint-rooted formula is at least 1, so the
        // subtraction cannot underflow.
        Fix::Mu => {
            let k = lvl.sigma_level;
            if k % 2 == 1 {
                k
            } else {
                k - 1
            }
        }
        Fix::Nu => {
            let k = lvl.pi_level;
            if k.is_multiple_of(2) {
                k
            } else {
                k - 1
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::super::{and, mu, nu, or, parse, prop, var};
    use super::*;

    fn levels(s: &str) -> (u32, u32) {
        let l = classify(&parse(s).unwrap());
        (l.sigma_level, l.pi_level)
    }

    #[test]
    fn fixpoint_free_is_level_zero() {
        assert_eq!(levels("p & ~q | [1] false"), (0, 0));
        assert_eq!(levels("<0> <1> p"), (0, 0));
    }

    #[test]
    fn single_mu_is_sigma_one() {
        assert_eq!(levels("mu X. (p | <0> X)"), (1, 2));
    }

    #[test]
    fn single_nu_is_pi_one() {
        assert_eq!(levels("nu X. (p & [0] X)"), (2, 1));
    }

    #[test]
    fn three_way_alternation() {
        // nu X2. mu X1. nu X0 with each variable used one binder deeper
        let f = parse("nu X2. mu X1. nu X0. ((X2 & p) | <0> (X1 & X0))").unwrap();
        let l = classify(&f);
        assert_eq!((l.sigma_level, l.pi_level), (4, 3));
    }

    #[test]
    fn independent_fixpoints_do_not_chain() {
        // X does not occur in the nu subformula: no alternating chain
        assert_eq!(levels("mu X. (p | <0> nu Y. (q & [1] Y))"), (2, 2));
        // same-kind nesting does not alternate either
        assert_eq!(levels("mu X. mu Y. (X | Y | <0> Y)"), (1, 2));
    }

    #[test]
    fn classify_ignores_binder_names() {
        let f = parse("mu X. nu Y. ((p & X) | <0> Y)").unwrap();
        let g = f.rename_apart();
        assert_eq!(classify(&f), classify(&g));
        assert_eq!((classify(&f).sigma_level, classify(&f).pi_level), (2, 3));
    }

    #[test]
    fn sigma_and_pi_differ_by_at_most_one() {
        let cases = [
            "p",
            "mu X. X",
            "nu X. X",
            "mu X. nu Y. (X & Y)",
            "nu X2. mu X1. nu X0. ((X2 & p) | <0> (X1 & X0))",
            "(mu X. (p | <0> X)) & nu Y. (p & [0] Y)",
        ];
        for s in cases {
            let l = classify(&parse(s).unwrap());
            let d = l.sigma_level.abs_diff(l.pi_level);
            assert!(d <= 1, "{s}: {l:?}");
        }
    }

    #[test]
    fn priorities_follow_binder_kind() {
        let f = parse("mu X. (p | <0> X)").unwrap();
        assert_eq!(priority_of(&f, &f), Ok(1));

        let g = parse("nu X. (p & [0] X)").unwrap();
        assert_eq!(priority_of(&g, &g), Ok(0));

        // outermost nu of a nu-mu-nu alternation: pi level 3, priority 2
        let h = parse("nu X2. mu X1. nu X0. ((X2 & p) | <0> (X1 & X0))").unwrap();
        assert_eq!(priority_of(&h, &h), Ok(2));
        // its mu subformula: sigma level 2, priority 1
        let sub = match &h {
            Formula::Nu(_, b) => b.as_ref(),
            _ => unreachable!(),
        };
        assert_eq!(priority_of(&h, sub), Ok(1));
        // innermost nu: pi level 1, priority 0
        let sub2 = match sub {
            Formula::Mu(_, b) => b.as_ref(),
            _ => unreachable!(),
        };
        assert_eq!(priority_of(&h, sub2), Ok(0));
    }

    #[test]
    fn priority_is_odd_iff_mu() {
        let fs = [
            parse("mu X. nu Y. mu Z. ((X & Y & Z) | p)").unwrap(),
            parse("nu X. mu Y. ((X | <0> Y) & q)").unwrap(),
            parse("mu X. (X & nu Y. Y)").unwrap(),
        ];
        for f in &fs {
            for sub in f.fixpoint_subformulas() {
                let p = priority_of(f, sub).unwrap();
                let is_mu = matches!(sub, Formula::Mu(..));
                assert_eq!(p % 2 == 1, is_mu, "{sub} in {f}");
            }
        }
    }

    #[test]
    fn priority_rejects_non_subformulas_and_non_fixpoints() {
        let f = parse("mu X. (p | <0> X)").unwrap();
        assert_eq!(priority_of(&f, &prop("p")), Err(FormulaError::NotAFixpoint));
        assert_eq!(
            priority_of(&f, &nu("Z", var("Z"))),
            Err(FormulaError::NotASubformula)
        );
        let not_apart = and(mu("X", var("X")), mu("X", var("X")));
        assert_eq!(
            priority_of(&not_apart, &mu("X", var("X"))),
            Err(FormulaError::NotRenameApart)
        );
    }

    #[test]
    fn adding_an_outer_mu_moves_sigma_by_at_most_one() {
        let cases = [
            "p & q",
            "mu X. (p | <0> X)",
            "nu X. (p & [0] X)",
            "mu X. nu Y. ((p & X) | <0> Y)",
            "nu X2. mu X1. nu X0. ((X2 & p) | <0> (X1 & X0))",
        ];
        for s in cases {
            let f = parse(s).unwrap();
            let wrapped = mu("W0", or(f.clone(), var("W0")));
            let (a, b) = (classify(&f).sigma_level, classify(&wrapped).sigma_level);
            assert!(b >= a && b <= a + 1, "{s}: {a} -> {b}");
        }
    }
}
