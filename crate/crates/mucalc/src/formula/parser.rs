//! Hand-rolled recursive-descent parser for the formula surface syntax.
//!
//! ```text
//! formula := or ('->' formula)?          implication: propositional antecedent only
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := '~' prop | '<' nat '>' unary | '[' nat ']' unary
//!          | ('mu'|'nu') VAR '.' formula | atom
//! atom    := 'true' | 'false' | PROP | VAR | '(' formula ')'
//! ```
//!
//! Propositions start with a lowercase letter or with `@` (reserved marker
//! namespace); variables start with an uppercase letter. Binders extend
//! maximally to the right. `a -> b` is desugared into `~a | b` with the
//! negation pushed to literals, so the resulting AST is negation normal.

use super::{and, boxm, dia, negate_propositional, or, Formula};

/// Parse failure with a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        msg: msg.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Prop(String),
    Var(String),
    Nat(u32),
    KwTrue,
    KwFalse,
    KwMu,
    KwNu,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    Dot,
    LPar,
    RPar,
    Lt,
    Gt,
    LBr,
    RBr,
}

struct Lexer {
    toks: Vec<(usize, Tok)>,
    end: usize,
}

fn lex(input: &str) -> Result<Lexer, ParseError> {
    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '(' => {
                toks.push((start, Tok::LPar));
                i += 1;
            }
            ')' => {
                toks.push((start, Tok::RPar));
                i += 1;
            }
            '<' => {
                toks.push((start, Tok::Lt));
                i += 1;
            }
            '>' => {
                toks.push((start, Tok::Gt));
                i += 1;
            }
            '[' => {
                toks.push((start, Tok::LBr));
                i += 1;
            }
            ']' => {
                toks.push((start, Tok::RBr));
                i += 1;
            }
            '~' => {
                toks.push((start, Tok::Tilde));
                i += 1;
            }
            '&' => {
                toks.push((start, Tok::Amp));
                i += 1;
            }
            '|' => {
                toks.push((start, Tok::Pipe));
                i += 1;
            }
            '.' => {
                toks.push((start, Tok::Dot));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((start, Tok::Arrow));
                    i += 2;
                } else {
                    return err(start, "expected '->'");
                }
            }
            '0'..='9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let text = &input[i..j];
                match text.parse::<u32>() {
                    Ok(n) => toks.push((start, Tok::Nat(n))),
                    Err(_) => return err(start, format!("modality index {text} out of range")),
                }
                i = j;
            }
            '@' => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                if j == i + 1 {
                    return err(start, "'@' must be followed by an identifier");
                }
                toks.push((start, Tok::Prop(input[i..j].to_string())));
                i = j;
            }
            'a'..='z' | 'A'..='Z' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let word = &input[i..j];
                let tok = match word {
                    "true" => Tok::KwTrue,
                    "false" => Tok::KwFalse,
                    "mu" => Tok::KwMu,
                    "nu" => Tok::KwNu,
                    _ if c.is_ascii_lowercase() => Tok::Prop(word.to_string()),
                    _ => Tok::Var(word.to_string()),
                };
                toks.push((start, tok));
                i = j;
            }
            _ => return err(start, format!("unexpected character {c:?}")),
        }
    }
    Ok(Lexer {
        toks,
        end: input.len(),
    })
}

/// Deepest nesting `parse` accepts before reporting an error instead of
/// risking stack exhaustion on adversarial input.
const MAX_DEPTH: usize = 2048;

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            err(self.here(), format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return err(
                self.here(),
                format!("nesting deeper than {MAX_DEPTH} levels"),
            );
        }
        let out = self.formula_inner();
        self.depth -= 1;
        out
    }

    fn formula_inner(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or_level()?;
        if self.peek() == Some(&Tok::Arrow) {
            let arrow_at = self.here();
            self.pos += 1;
            let neg = match negate_propositional(&lhs) {
                Some(n) => n,
                None => {
                    return err(
                        arrow_at,
                        "implication antecedent must be propositional \
                         (literals, true/false, &, |)",
                    )
                }
            };
            let rhs = self.formula()?;
            Ok(or(neg, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or_level(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.and_level()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            let g = self.and_level()?;
            f = or(f, g);
        }
        Ok(f)
    }

    fn and_level(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let g = self.unary()?;
            f = and(f, g);
        }
        Ok(f)
    }

    fn modal_index(&mut self) -> Result<u32, ParseError> {
        match self.bump() {
            Some(Tok::Nat(n)) => Ok(n),
            _ => err(self.here(), "modality index must be a decimal natural"),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return err(
                self.here(),
                format!("nesting deeper than {MAX_DEPTH} levels"),
            );
        }
        let out = self.unary_inner();
        self.depth -= 1;
        out
    }

    fn unary_inner(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                let at = self.here();
                match self.bump() {
                    Some(Tok::Prop(p)) => Ok(Formula::Lit {
                        name: p,
                        positive: false,
                    }),
                    Some(Tok::KwTrue) => Ok(Formula::Bottom),
                    Some(Tok::KwFalse) => Ok(Formula::Top),
                    _ => err(at, "'~' may only be applied to a proposition"),
                }
            }
            Some(Tok::Lt) => {
                self.pos += 1;
                let i = self.modal_index()?;
                self.expect(Tok::Gt, "'>'")?;
                Ok(dia(i, self.unary()?))
            }
            Some(Tok::LBr) => {
                self.pos += 1;
                let i = self.modal_index()?;
                self.expect(Tok::RBr, "']'")?;
                Ok(boxm(i, self.unary()?))
            }
            Some(Tok::KwMu) | Some(Tok::KwNu) => {
                let is_mu = self.peek() == Some(&Tok::KwMu);
                self.pos += 1;
                let at = self.here();
                let x = match self.bump() {
                    Some(Tok::Var(x)) => x,
                    _ => return err(at, "binder variable must be an uppercase identifier"),
                };
                self.expect(Tok::Dot, "'.' after binder variable")?;
                let body = self.formula()?;
                Ok(if is_mu {
                    Formula::Mu(x, Box::new(body))
                } else {
                    Formula::Nu(x, Box::new(body))
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let at = self.here();
        match self.bump() {
            Some(Tok::KwTrue) => Ok(Formula::Top),
            Some(Tok::KwFalse) => Ok(Formula::Bottom),
            Some(Tok::Prop(p)) => Ok(Formula::Lit {
                name: p,
                positive: true,
            }),
            Some(Tok::Var(x)) => Ok(Formula::Var(x)),
            Some(Tok::LPar) => {
                let f = self.formula()?;
                self.expect(Tok::RPar, "')'")?;
                Ok(f)
            }
            Some(t) => err(at, format!("unexpected token {t:?}")),
            None => err(at, "unexpected end of input"),
        }
    }
}

/// Parse a formula from its concrete syntax.
pub fn parse(input: &str) -> Result<Formula, ParseError> {
    let lexer = lex(input)?;
    let mut p = Parser {
        toks: lexer.toks,
        pos: 0,
        end: lexer.end,
        depth: 0,
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return err(p.here(), "trailing input after formula");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::super::{nprop, prop, var};
    use super::*;
    use crate::formula::mu;

    #[test]
    fn parses_fixpoint_with_disjunction() {
        let f = parse("mu X. (p | <0> X)").unwrap();
        assert_eq!(f, mu("X", or(prop("p"), dia(0, var("X")))));
        // binder extends maximally right: the parens are redundant
        assert_eq!(parse("mu X. p | <0> X").unwrap(), f);
    }

    #[test]
    fn desugars_implication_via_de_morgan() {
        let f = parse("(pre0 & bd) -> [0] q").unwrap();
        assert_eq!(f, or(or(nprop("pre0"), nprop("bd")), boxm(0, prop("q"))));
    }

    #[test]
    fn implication_antecedent_must_be_propositional() {
        assert!(parse("<0> p -> q").is_err());
        assert!(parse("(mu X. X) -> q").is_err());
        assert!(parse("X -> q").is_err());
    }

    #[test]
    fn rejects_negated_variables_and_formulas() {
        assert!(parse("mu X. ~X").is_err());
        assert!(parse("~(p & q)").is_err());
        assert!(parse("~<0> p").is_err());
    }

    #[test]
    fn negated_constants_fold() {
        assert_eq!(parse("~true").unwrap(), Formula::Bottom);
        assert_eq!(parse("~false").unwrap(), Formula::Top);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse("mu X. (p | <0> X").is_err()); // unbalanced
        assert!(parse("<p> q").is_err()); // index not a natural
        assert!(parse("p q").is_err()); // trailing input
        assert!(parse("").is_err());
        assert!(parse("p -").is_err());
        assert!(parse("@").is_err());
    }

    #[test]
    fn positions_point_at_the_offence() {
        let e = parse("p & $").unwrap_err();
        assert_eq!(e.pos, 4);
    }

    #[test]
    fn at_prefixed_identifiers_are_propositions() {
        let f = parse("@P_exists & ~@bd | @P_3").unwrap();
        assert_eq!(f, or(and(prop("@P_exists"), nprop("@bd")), prop("@P_3")));
    }

    #[test]
    fn precedence_unary_and_or() {
        // unary binds tighter than &, & tighter than |
        let f = parse("<0> p & q | [1] r").unwrap();
        assert_eq!(f, or(and(dia(0, prop("p")), prop("q")), boxm(1, prop("r"))));
    }

    #[test]
    fn deep_nesting_is_rejected_not_crashed() {
        // deep but under the limit: parses fine
        let mut ok = "<0> ".repeat(2000);
        ok.push('p');
        assert!(parse(&ok).is_ok());

        // far over the limit: a clean positioned error, not stack exhaustion
        let mut bad = "(".repeat(5000);
        bad.push('p');
        bad.push_str(&")".repeat(5000));
        let e = parse(&bad).unwrap_err();
        assert!(e.msg.contains("nesting"), "{e}");

        // real winning-region formulas sit far below the limit
        let wn = crate::encoder::wn(12, crate::encoder::Variant::One).to_string();
        assert!(parse(&wn).is_ok());
    }

    #[test]
    fn keywords_are_not_identifiers() {
        assert!(parse("mu true . p").is_err());
        assert_eq!(parse("truth").unwrap(), prop("truth"));
        assert_eq!(parse("nut").unwrap(), prop("nut"));
    }
}
