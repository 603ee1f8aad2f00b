//! The gadget-traversal macros ♦ (`blacklozenge`) and ■ (`blacksquare`)
//! and the winning-region formulas `W_n` built from them.
//!
//! ♦φ walks one encoded game move existentially: from a position world it
//! descends through the gadget markers and demands φ at some reachable
//! position world, recursing through bridge worlds via the macro variable.
//! ■φ is its universal dual, phrased with implications so that closure
//! edges added by richer witness frames stay inert. Bridge chains are
//! finite and forward-only, so binding the macro variable with μ or ν
//! yields the same denotation; the default operator follows the variant
//! and can be overridden for robustness checks.

use super::{
    MacroOp, Variant, BD, MID0, NXT0, NXT1, NXT2, POS, PRE0, PRE1, PRE2, P_EXISTS, P_FORALL,
};
use crate::formula::{and, boxm, dia, implies, mu, nprop, nu, or, prop, var, Formula};
use std::collections::BTreeSet;

/// `(Y ∧ ¬pos) ∨ (f ∧ pos)`: recurse through a bridge, or deliver `f` at a
/// position world.
fn continue_or_deliver(y: &str, f: &Formula) -> Formula {
    or(and(var(y), nprop(POS)), and(f.clone(), prop(POS)))
}

fn bind(variant: Variant, op: MacroOp, y: &str, body: Formula) -> Formula {
    let use_nu = match op {
        MacroOp::PerVariant => variant == Variant::One,
        MacroOp::ForceMu => false,
        MacroOp::ForceNu => true,
    };
    if use_nu {
        nu(y, body)
    } else {
        mu(y, body)
    }
}

fn lozenge_body(f: &Formula, variant: Variant, y: &str) -> Formula {
    let c = || continue_or_deliver(y, f);
    match variant {
        Variant::One => and(
            and(prop(PRE0), prop(BD)),
            dia(
                0,
                and(
                    and(and(prop(NXT0), prop(PRE1)), prop(BD)),
                    dia(1, and(and(prop(NXT1), prop(BD)), c())),
                ),
            ),
        ),
        Variant::Two => and(
            and(prop(PRE0), prop(BD)),
            dia(
                0,
                and(
                    and(prop(MID0), prop(BD)),
                    or(
                        and(prop(PRE1), dia(1, and(and(prop(NXT1), prop(BD)), c()))),
                        dia(
                            0,
                            and(
                                and(and(prop(NXT0), prop(PRE1)), prop(BD)),
                                dia(1, and(and(prop(NXT1), prop(BD)), c())),
                            ),
                        ),
                    ),
                ),
            ),
        ),
        Variant::Three => and(
            and(prop(PRE0), prop(BD)),
            dia(
                0,
                and(
                    and(and(and(prop(NXT0), prop(PRE1)), prop(PRE2)), prop(BD)),
                    or(
                        dia(2, and(and(prop(NXT2), prop(BD)), c())),
                        dia(
                            1,
                            and(
                                and(and(prop(NXT1), prop(PRE2)), prop(BD)),
                                dia(2, and(and(prop(NXT2), prop(BD)), c())),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    }
}

fn square_body(f: &Formula, variant: Variant, y: &str) -> Formula {
    let c = || continue_or_deliver(y, f);
    match variant {
        Variant::One => implies(
            and(prop(PRE0), prop(BD)),
            boxm(
                0,
                implies(
                    and(and(prop(NXT0), prop(PRE1)), prop(BD)),
                    boxm(1, implies(and(prop(NXT1), prop(BD)), c())),
                ),
            ),
        ),
        Variant::Two => implies(
            and(prop(PRE0), prop(BD)),
            boxm(
                0,
                implies(
                    and(prop(MID0), prop(BD)),
                    and(
                        boxm(1, implies(and(prop(NXT1), prop(BD)), c())),
                        boxm(
                            0,
                            implies(
                                and(and(prop(NXT0), prop(PRE1)), prop(BD)),
                                boxm(1, implies(and(prop(NXT1), prop(BD)), c())),
                            ),
                        ),
                    ),
                ),
            ),
        ),
        Variant::Three => implies(
            and(prop(PRE0), prop(BD)),
            boxm(
                0,
                implies(
                    and(and(and(prop(NXT0), prop(PRE1)), prop(PRE2)), prop(BD)),
                    and(
                        boxm(2, implies(and(prop(NXT2), prop(BD)), c())),
                        boxm(
                            1,
                            implies(
                                and(and(prop(NXT1), prop(PRE2)), prop(BD)),
                                boxm(2, implies(and(prop(NXT2), prop(BD)), c())),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    }
}

/// Every variable name occurring in `f`, free or as a binder.
fn used_names(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for s in f.subformulas() {
        match s {
            Formula::Var(x) | Formula::Mu(x, _) | Formula::Nu(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        }
    }
    out
}

/// A macro variable name not occurring anywhere in `f`, so that wrapping
/// keeps rename-apart formulas rename-apart.
fn fresh_macro_var(f: &Formula) -> String {
    let used = used_names(f);
    if !used.contains("Y") {
        return "Y".to_string();
    }
    let mut k = 1u64;
    loop {
        let y = format!("Y{k}");
        if !used.contains(&y) {
            return y;
        }
        k += 1;
    }
}

/// The existential move macro ♦φ with the variant's default fixpoint
/// operator (ν for variant 1, μ for variants 2 and 3).
pub fn blacklozenge(f: &Formula, variant: Variant) -> Formula {
    blacklozenge_with(f, variant, MacroOp::PerVariant)
}

pub fn blacklozenge_with(f: &Formula, variant: Variant, op: MacroOp) -> Formula {
    let y = fresh_macro_var(f);
    bind(variant, op, &y, lozenge_body(f, variant, &y))
}

/// The universal move macro ■φ with the variant's default fixpoint
/// operator.
pub fn blacksquare(f: &Formula, variant: Variant) -> Formula {
    blacksquare_with(f, variant, MacroOp::PerVariant)
}

pub fn blacksquare_with(f: &Formula, variant: Variant, op: MacroOp) -> Formula {
    let y = fresh_macro_var(f);
    bind(variant, op, &y, square_body(f, variant, &y))
}

/// The winning-region formula for games with priorities up to `n`:
/// binders X_n…X_0 from outermost to innermost (ν on even j, μ on odd j)
/// around the disjunction over j of
///
/// ```text
/// (@P_j ∧ @P_exists ∧ ♦X_j)  ∨  (@P_j ∧ @P_forall ∧ ■X_j)
/// ```
///
/// Macro variables are drawn from the running sequence `Y_0, Y_1, …` so
/// the result is rename-apart.
pub fn wn(n: u32, variant: Variant) -> Formula {
    wn_with(n, variant, MacroOp::PerVariant)
}

pub fn wn_with(n: u32, variant: Variant, op: MacroOp) -> Formula {
    let mut macro_count = 0u32;
    let mut fresh = || {
        let y = format!("Y_{macro_count}");
        macro_count += 1;
        y
    };
    let body = (0..=n)
        .map(|j| {
            let xj = format!("X_{j}");
            let pj = super::parity_marker(j);
            let y1 = fresh();
            let exists_move = and(
                and(prop(&pj), prop(P_EXISTS)),
                bind(variant, op, &y1, lozenge_body(&var(&xj), variant, &y1)),
            );
            let y2 = fresh();
            let forall_move = and(
                and(prop(&pj), prop(P_FORALL)),
                bind(variant, op, &y2, square_body(&var(&xj), variant, &y2)),
            );
            or(exists_move, forall_move)
        })
        .reduce(or)
        .expect("0..=n is nonempty");
    let mut f = body;
    for j in 0..=n {
        let xj = format!("X_{j}");
        f = if j % 2 == 0 { nu(&xj, f) } else { mu(&xj, f) };
    }
    f
}
