use std::fmt;

use serde::{Deserialize, Serialize};

use crate::design::{Action, Design};
use crate::locus::{Locus, Ramification};
use crate::syntax::parse_locus_plain;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Divergence {
    /// A positive action met a directory without its ramification.
    MissingRamification {
        focus: Locus,
        ramification: Ramification,
    },
    /// A locus was dropped while the other side still had moves on it.
    ErasedLocus { locus: Locus },
}

impl Divergence {
    pub fn locus(&self) -> &Locus {
        match self {
            Divergence::MissingRamification { focus, .. } => focus,
            Divergence::ErasedLocus { locus } => locus,
        }
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::MissingRamification {
                focus,
                ramification,
            } => write!(f, "no entry {ramification} at {focus}"),
            Divergence::ErasedLocus { locus } => write!(f, "locus {locus} was erased"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    Converged { residual: Design },
    Diverged { reason: Divergence },
    OutOfFuel { steps: usize },
}

impl Verdict {
    pub fn is_converged(&self) -> bool {
        matches!(self, Verdict::Converged { .. })
    }

    pub fn residual(&self) -> Option<&Design> {
        match self {
            Verdict::Converged { residual } => Some(residual),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Converged { .. } => f.write_str("converged"),
            Verdict::Diverged { reason } => write!(f, "diverged({})", reason.locus()),
            Verdict::OutOfFuel { .. } => f.write_str("out-of-fuel"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub member: String,
    pub action: Action,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub verdict: Verdict,
}

impl Trace {
    /// The line-oriented form, one `STEP` line per action and a final `VERDICT`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, s) in self.steps.iter().enumerate() {
            out.push_str(&format!("STEP {}: {} {}\n", k + 1, s.member, s.action));
        }
        out.push_str(&format!("VERDICT: {}\n", self.verdict));
        out
    }

    pub fn actions(&self) -> Vec<Action> {
        self.steps.iter().map(|s| s.action.clone()).collect()
    }
}

/// Wire form of an action: `{"kind":"pos","focus":"0.3","ramification":[5,7]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focus: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramification: Option<Vec<u32>>,
}

impl From<&Action> for ActionJson {
    fn from(a: &Action) -> Self {
        match a {
            Action::Daimon => ActionJson {
                kind: "dai".into(),
                focus: None,
                ramification: None,
            },
            Action::Positive {
                focus,
                ramification,
            }
            | Action::Negative {
                focus,
                ramification,
            } => ActionJson {
                kind: if matches!(a, Action::Positive { .. }) {
                    "pos"
                } else {
                    "neg"
                }
                .into(),
                focus: Some(focus.to_string()),
                ramification: Some(ramification.biases().collect()),
            },
        }
    }
}

impl TryFrom<ActionJson> for Action {
    type Error = String;

    fn try_from(j: ActionJson) -> Result<Self, Self::Error> {
        let located = |j: &ActionJson| -> Result<(Locus, Ramification), String> {
            let focus = j.focus.as_deref().ok_or("missing focus")?;
            let focus = parse_locus_plain(focus).map_err(|e| e.to_string())?;
            let ram = j
                .ramification
                .clone()
                .unwrap_or_default()
                .into_iter()
                .collect();
            Ok((focus, ram))
        };
        match j.kind.as_str() {
            "dai" => Ok(Action::Daimon),
            "pos" => {
                let (focus, ramification) = located(&j)?;
                Ok(Action::Positive {
                    focus,
                    ramification,
                })
            }
            "neg" => {
                let (focus, ramification) = located(&j)?;
                Ok(Action::Negative {
                    focus,
                    ramification,
                })
            }
            other => Err(format!("unknown action kind `{other}`")),
        }
    }
}

impl Serialize for Action {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ActionJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ActionJson::deserialize(d)?;
        Action::try_from(j).map_err(serde::de::Error::custom)
    }
}
