use std::fmt;

use argumentation::ArgType;
use epistemic_core::{AtomKind, Formula};
use serde::{Deserialize, Serialize};

/// Optional explicit argument attached to an operation. Without it the
/// engine names arguments `{claim}@T{turn}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claim: Option<Formula>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arg_type: Option<ArgType>,
    /// Atom ids; `!p` marks an argument that waits for `p` to be retracted.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deps: Vec<String>,
    /// Argument references this argument attacks.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attacks: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolveMode {
    Consensual,
    Authoritative,
}

fn default_kind() -> AtomKind {
    AtomKind::Hypothesis
}

fn is_false(b: &bool) -> bool {
    !b
}

/// The eight operations. References (`gamma` on Support, Undermine and
/// Revise; `subsumes`; attack targets) name an argument id or, failing
/// that, an atomic claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Op {
    Observe {
        psi: Formula,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        argument: Option<ArgSpec>,
    },
    Hypothesize {
        gamma: String,
        #[serde(default)]
        deps: Vec<String>,
        /// Observation this hypothesis answers; otherwise the oldest
        /// matching open problem is used.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        explains: Option<Formula>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        argument: Option<ArgSpec>,
    },
    Support {
        gamma: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        evidence: Option<String>,
        /// γ-specific evidence: lexicographic instead of conservative upgrade.
        #[serde(default, skip_serializing_if = "is_false")]
        specific: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        argument: Option<ArgSpec>,
    },
    Undermine {
        gamma: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        evidence: Option<String>,
        /// A prediction of γ that turned out false; its worlds are removed
        /// instead of applying ⇑¬γ.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        falsified_prediction: Option<Formula>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        argument: Option<ArgSpec>,
    },
    Revise {
        gamma: String,
        /// Argument whose attack on γ motivates the revision.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        evidence: Option<String>,
    },
    ExpandAwareness {
        atom: String,
        #[serde(default = "default_kind")]
        kind: AtomKind,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        label: String,
        /// Defaults to every agent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        agents: Option<Vec<String>>,
    },
    Resolve {
        gamma: Formula,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        subsumes: Vec<String>,
        mode: ResolveMode,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        dissenters: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        argument: Option<ArgSpec>,
    },
    Question {
        chi: Formula,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Observe,
    Hypothesize,
    Support,
    Undermine,
    Revise,
    ExpandAwareness,
    Resolve,
    Question,
}

impl OpKind {
    pub fn name(self) -> &'static str {
        match self {
            OpKind::Observe => "Observe",
            OpKind::Hypothesize => "Hypothesize",
            OpKind::Support => "Support",
            OpKind::Undermine => "Undermine",
            OpKind::Revise => "Revise",
            OpKind::ExpandAwareness => "ExpandAwareness",
            OpKind::Resolve => "Resolve",
            OpKind::Question => "Question",
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Op {
    pub fn kind(&self) -> OpKind {
        match self {
            Op::Observe { .. } => OpKind::Observe,
            Op::Hypothesize { .. } => OpKind::Hypothesize,
            Op::Support { .. } => OpKind::Support,
            Op::Undermine { .. } => OpKind::Undermine,
            Op::Revise { .. } => OpKind::Revise,
            Op::ExpandAwareness { .. } => OpKind::ExpandAwareness,
            Op::Resolve { .. } => OpKind::Resolve,
            Op::Question { .. } => OpKind::Question,
        }
    }
}

/// One classified unit of an utterance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnOperation {
    pub speaker: String,
    #[serde(flatten)]
    pub op: Op,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub turn_text: String,
}

impl TurnOperation {
    pub fn new(speaker: impl Into<String>, op: Op) -> Self {
        TurnOperation { speaker: speaker.into(), op, turn_text: String::new() }
    }
}

/// A failed precondition: the name of the failing condition and the
/// operation the interpreter should have used instead, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub name: String,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggested: Option<OpKind>,
}

impl Violation {
    pub fn new(name: &str, detail: impl Into<String>) -> Self {
        Violation { name: name.to_string(), detail: detail.into(), suggested: None }
    }

    pub fn suggest(mut self, op: OpKind) -> Self {
        self.suggested = Some(op);
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self.detail)?;
        if let Some(op) = self.suggested {
            write!(f, " (use {op})")?;
        }
        Ok(())
    }
}
