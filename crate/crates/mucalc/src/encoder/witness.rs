//! Witness frames: the per-relation building blocks the encoder copies
//! into the model, one copy per gadget.
//!
//! Each witness is a single-relation frame with designated worlds. The
//! encoder maps the designated worlds onto model worlds and freshens the
//! rest, so a witness may carry arbitrary extra structure (the built-in
//! `s5` witnesses are cliques with loops; `minimal` carries exactly the
//! required edges). Which witnesses a variant needs:
//!
//! * variant 1: a `choice` (root with two branches) and a step for
//!   relation 1,
//! * variant 2: a `chain` (root, middle, end) and a step for relation 1,
//! * variant 3: steps for relations 0, 1 and 2.
//!
//! Every signature index additionally needs a single-world `completion`
//! frame, applied to worlds no copy covers at that index so that frame
//! conditions like reflexivity extend to the whole model.

use super::Variant;
use crate::formula::ModalIdx;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A frame over one accessibility relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub worlds: BTreeSet<String>,
    pub edges: BTreeSet<(String, String)>,
}

impl Frame {
    fn of(worlds: &[&str], edges: &[(&str, &str)]) -> Frame {
        Frame {
            worlds: worlds.iter().map(|w| w.to_string()).collect(),
            edges: edges
                .iter()
                .map(|&(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        }
    }

    /// All edges between the given worlds, loops included.
    fn clique(worlds: &[&str]) -> Frame {
        let edges: BTreeSet<(String, String)> = worlds
            .iter()
            .flat_map(|a| worlds.iter().map(move |b| (a.to_string(), b.to_string())))
            .collect();
        Frame {
            worlds: worlds.iter().map(|w| w.to_string()).collect(),
            edges,
        }
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        self.edges.contains(&(a.to_string(), b.to_string()))
    }
}

/// Root with two branches; the copy's relation-0 fan-out in variant 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceWitness {
    #[serde(flatten)]
    pub frame: Frame,
    pub root: String,
    pub left: String,
    pub right: String,
}

/// Root, middle and end of the two-hop relation-0 walk in variant 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainWitness {
    #[serde(flatten)]
    pub frame: Frame,
    pub root: String,
    pub mid: String,
    pub end: String,
}

/// A single directed hop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepWitness {
    #[serde(flatten)]
    pub frame: Frame,
    pub src: String,
    pub dst: String,
}

/// One-world frame used to cover worlds outside every copy at an index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionWitness {
    #[serde(flatten)]
    pub frame: Frame,
    pub world: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error("witness JSON: {0}")]
    Json(String),
    #[error("variant {variant} needs a {gadget} witness")]
    MissingGadget { variant: u8, gadget: &'static str },
    #[error("variant {variant} does not use a {gadget} witness")]
    UnexpectedGadget { variant: u8, gadget: &'static str },
    #[error("{gadget} witness: designated world `{world}` is not in the frame")]
    DesignatedMissing { gadget: String, world: String },
    #[error("{gadget} witness: designated worlds must be pairwise distinct")]
    DesignatedClash { gadget: String },
    #[error("{gadget} witness: edge endpoint `{world}` is not in the frame")]
    EdgeEndpointMissing { gadget: String, world: String },
    #[error("{gadget} witness: required edge `{from}` -> `{to}` is missing")]
    RequiredEdgeMissing {
        gadget: String,
        from: String,
        to: String,
    },
    #[error("no step witness for relation {0}")]
    MissingStep(ModalIdx),
    #[error("step witness for relation {0} is not used by this variant")]
    UnexpectedStep(ModalIdx),
    #[error("no completion witness for relation {0}")]
    MissingCompletion(ModalIdx),
    #[error("completion witness for relation {0} is outside the signature")]
    UnexpectedCompletion(ModalIdx),
    #[error("completion witness for relation {0} must have exactly one world")]
    CompletionNotSingleton(ModalIdx),
}

/// The full kit of witnesses for one variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFrames {
    pub variant: Variant,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub choice: Option<ChoiceWitness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chain: Option<ChainWitness>,
    pub steps: BTreeMap<ModalIdx, StepWitness>,
    pub completion: BTreeMap<ModalIdx, CompletionWitness>,
}

/// Relation indices whose step witnesses a variant's gadgets walk.
pub(super) fn required_steps(variant: Variant) -> BTreeSet<ModalIdx> {
    match variant {
        Variant::One | Variant::Two => [1].into(),
        Variant::Three => [0, 1, 2].into(),
    }
}

impl WitnessFrames {
    /// Bare witnesses: exactly the required edges, nothing else. The
    /// completion frames are edgeless, so applying them changes nothing.
    pub fn minimal(variant: Variant) -> WitnessFrames {
        let step = || StepWitness {
            frame: Frame::of(&["s", "t"], &[("s", "t")]),
            src: "s".into(),
            dst: "t".into(),
        };
        let completion = || CompletionWitness {
            frame: Frame::of(&["w"], &[]),
            world: "w".into(),
        };
        WitnessFrames {
            variant,
            choice: (variant == Variant::One).then(|| ChoiceWitness {
                frame: Frame::of(&["r", "a", "b"], &[("r", "a"), ("r", "b")]),
                root: "r".into(),
                left: "a".into(),
                right: "b".into(),
            }),
            chain: (variant == Variant::Two).then(|| ChainWitness {
                frame: Frame::of(&["r", "m", "e"], &[("r", "m"), ("m", "e")]),
                root: "r".into(),
                mid: "m".into(),
                end: "e".into(),
            }),
            steps: required_steps(variant)
                .into_iter()
                .map(|i| (i, step()))
                .collect(),
            completion: variant
                .signature()
                .into_iter()
                .map(|i| (i, completion()))
                .collect(),
        }
    }

    /// Equivalence-relation witnesses: each frame is a clique with loops,
    /// so every copy is reflexive, symmetric and transitive on its worlds.
    pub fn s5(variant: Variant) -> WitnessFrames {
        let step = || StepWitness {
            frame: Frame::clique(&["s", "t"]),
            src: "s".into(),
            dst: "t".into(),
        };
        let completion = || CompletionWitness {
            frame: Frame::of(&["w"], &[("w", "w")]),
            world: "w".into(),
        };
        WitnessFrames {
            variant,
            choice: (variant == Variant::One).then(|| ChoiceWitness {
                frame: Frame::clique(&["r", "a", "b"]),
                root: "r".into(),
                left: "a".into(),
                right: "b".into(),
            }),
            chain: (variant == Variant::Two).then(|| ChainWitness {
                frame: Frame::clique(&["r", "m", "e"]),
                root: "r".into(),
                mid: "m".into(),
                end: "e".into(),
            }),
            steps: required_steps(variant)
                .into_iter()
                .map(|i| (i, step()))
                .collect(),
            completion: variant
                .signature()
                .into_iter()
                .map(|i| (i, completion()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("witness frames serialize")
    }

    /// Parse and validate.
    pub fn from_json(text: &str) -> Result<WitnessFrames, WitnessError> {
        let wf: WitnessFrames =
            serde_json::from_str(text).map_err(|e| WitnessError::Json(e.to_string()))?;
        wf.validate()?;
        Ok(wf)
    }

    /// Check the kit is complete and well-formed for its variant.
    pub fn validate(&self) -> Result<(), WitnessError> {
        let vn = u8::from(self.variant);
        match self.variant {
            Variant::One => {
                if self.choice.is_none() {
                    return Err(WitnessError::MissingGadget {
                        variant: vn,
                        gadget: "choice",
                    });
                }
                if self.chain.is_some() {
                    return Err(WitnessError::UnexpectedGadget {
                        variant: vn,
                        gadget: "chain",
                    });
                }
            }
            Variant::Two => {
                if self.chain.is_none() {
                    return Err(WitnessError::MissingGadget {
                        variant: vn,
                        gadget: "chain",
                    });
                }
                if self.choice.is_some() {
                    return Err(WitnessError::UnexpectedGadget {
                        variant: vn,
                        gadget: "choice",
                    });
                }
            }
            Variant::Three => {
                if self.choice.is_some() {
                    return Err(WitnessError::UnexpectedGadget {
                        variant: vn,
                        gadget: "choice",
                    });
                }
                if self.chain.is_some() {
                    return Err(WitnessError::UnexpectedGadget {
                        variant: vn,
                        gadget: "chain",
                    });
                }
            }
        }

        if let Some(c) = &self.choice {
            check_gadget(
                "choice",
                &c.frame,
                &[&c.root, &c.left, &c.right],
                &[(&c.root, &c.left), (&c.root, &c.right)],
            )?;
        }
        if let Some(c) = &self.chain {
            check_gadget(
                "chain",
                &c.frame,
                &[&c.root, &c.mid, &c.end],
                &[(&c.root, &c.mid), (&c.mid, &c.end)],
            )?;
        }

        let required = required_steps(self.variant);
        for i in &required {
            if !self.steps.contains_key(i) {
                return Err(WitnessError::MissingStep(*i));
            }
        }
        for (i, s) in &self.steps {
            if !required.contains(i) {
                return Err(WitnessError::UnexpectedStep(*i));
            }
            check_gadget(
                &format!("step {i}"),
                &s.frame,
                &[&s.src, &s.dst],
                &[(&s.src, &s.dst)],
            )?;
        }

        let signature = self.variant.signature();
        for i in &signature {
            if !self.completion.contains_key(i) {
                return Err(WitnessError::MissingCompletion(*i));
            }
        }
        for (i, c) in &self.completion {
            if !signature.contains(i) {
                return Err(WitnessError::UnexpectedCompletion(*i));
            }
            if c.frame.worlds.len() != 1 || !c.frame.worlds.contains(&c.world) {
                return Err(WitnessError::CompletionNotSingleton(*i));
            }
            check_gadget(&format!("completion {i}"), &c.frame, &[&c.world], &[])?;
        }
        Ok(())
    }
}

/// Common frame checks: designated worlds distinct and present, edge
/// endpoints inside the frame, required edges present.
fn check_gadget(
    gadget: &str,
    frame: &Frame,
    designated: &[&str],
    required_edges: &[(&str, &str)],
) -> Result<(), WitnessError> {
    let distinct: BTreeSet<&str> = designated.iter().copied().collect();
    if distinct.len() != designated.len() {
        return Err(WitnessError::DesignatedClash {
            gadget: gadget.to_string(),
        });
    }
    for w in designated {
        if !frame.worlds.contains(*w) {
            return Err(WitnessError::DesignatedMissing {
                gadget: gadget.to_string(),
                world: w.to_string(),
            });
        }
    }
    for (a, b) in &frame.edges {
        for w in [a, b] {
            if !frame.worlds.contains(w) {
                return Err(WitnessError::EdgeEndpointMissing {
                    gadget: gadget.to_string(),
                    world: w.clone(),
                });
            }
        }
    }
    for &(a, b) in required_edges {
        if !frame.has_edge(a, b) {
            return Err(WitnessError::RequiredEdgeMissing {
                gadget: gadget.to_string(),
                from: a.to_string(),
                to: b.to_string(),
            });
        }
    }
    Ok(())
}
