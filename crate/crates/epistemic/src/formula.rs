use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Epistemic formula over the model's atom registry.
///
/// JSON form: `true` is ⊤, a bare string is an atom, everything else is a
/// single-key object (`{"not": φ}`, `{"and": [..]}`, `{"implies": [φ, ψ]}`,
/// `{"knows": {"agent": "a", "phi": φ}}`, `{"common": {"agents": [..], "phi": φ}}`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "Repr", try_from = "Repr")]
pub enum Formula {
    Top,
    Atom(String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Knows(String, Box<Formula>),
    Believes(String, Box<Formula>),
    Aware(String, Box<Formula>),
    Common(BTreeSet<String>, Box<Formula>),
}

impl Formula {
    pub fn atom(id: impl Into<String>) -> Self {
        Formula::Atom(id.into())
    }

    pub fn bottom() -> Self {
        Formula::Not(Box::new(Formula::Top))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(phi: Formula) -> Self {
        Formula::Not(Box::new(phi))
    }

    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Self {
        Formula::And(parts.into_iter().collect())
    }

    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Self {
        Formula::Or(parts.into_iter().collect())
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn knows(agent: impl Into<String>, phi: Formula) -> Self {
        Formula::Knows(agent.into(), Box::new(phi))
    }

    pub fn believes(agent: impl Into<String>, phi: Formula) -> Self {
        Formula::Believes(agent.into(), Box::new(phi))
    }

    pub fn aware(agent: impl Into<String>, phi: Formula) -> Self {
        Formula::Aware(agent.into(), Box::new(phi))
    }

    pub fn common<S: Into<String>>(agents: impl IntoIterator<Item = S>, phi: Formula) -> Self {
        Formula::Common(agents.into_iter().map(Into::into).collect(), Box::new(phi))
    }

    /// Atom ids mentioned anywhere in the formula, including under modalities.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Top => {}
            Formula::Atom(id) => {
                out.insert(id.clone());
            }
            Formula::Not(f)
            | Formula::Knows(_, f)
            | Formula::Believes(_, f)
            | Formula::Aware(_, f)
            | Formula::Common(_, f) => f.collect_atoms(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_atoms(out)),
            Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Agents named by modal operators.
    pub fn agents(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_agents(&mut out);
        out
    }

    fn collect_agents(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Top | Formula::Atom(_) => {}
            Formula::Not(f) => f.collect_agents(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_agents(out)),
            Formula::Implies(a, b) => {
                a.collect_agents(out);
                b.collect_agents(out);
            }
            Formula::Knows(i, f) | Formula::Believes(i, f) | Formula::Aware(i, f) => {
                out.insert(i.clone());
                f.collect_agents(out);
            }
            Formula::Common(g, f) => {
                out.extend(g.iter().cloned());
                f.collect_agents(out);
            }
        }
    }

    /// True when no modal operator occurs.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Top | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_propositional(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_propositional),
            Formula::Implies(a, b) => a.is_propositional() && b.is_propositional(),
            _ => false,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Formula::Atom(id) => Some(id),
            _ => None,
        }
    }

    /// Normal form used for formula identity: nested conjunctions and
    /// disjunctions are flattened, sorted and deduplicated; double negation
    /// is removed; unary `and`/`or` collapse to their operand.
    pub fn canonical(&self) -> Formula {
        match self {
            Formula::Top | Formula::Atom(_) => self.clone(),
            Formula::Not(f) => match f.canonical() {
                Formula::Not(inner) => *inner,
                g => Formula::Not(Box::new(g)),
            },
            Formula::And(fs) => Self::canonical_nary(fs, true),
            Formula::Or(fs) => Self::canonical_nary(fs, false),
            Formula::Implies(a, b) => Formula::Implies(Box::new(a.canonical()), Box::new(b.canonical())),
            Formula::Knows(i, f) => Formula::Knows(i.clone(), Box::new(f.canonical())),
            Formula::Believes(i, f) => Formula::Believes(i.clone(), Box::new(f.canonical())),
            Formula::Aware(i, f) => Formula::Aware(i.clone(), Box::new(f.canonical())),
            Formula::Common(g, f) => Formula::Common(g.clone(), Box::new(f.canonical())),
        }
    }

    fn canonical_nary(parts: &[Formula], conj: bool) -> Formula {
        let mut flat = BTreeSet::new();
        for part in parts {
            match (part.canonical(), conj) {
                (Formula::And(inner), true) | (Formula::Or(inner), false) => flat.extend(inner),
                (g, _) => {
                    flat.insert(g);
                }
            }
        }
        let mut flat: Vec<Formula> = flat.into_iter().collect();
        match flat.len() {
            0 if conj => Formula::Top,
            0 => Formula::bottom(),
            1 => flat.pop().expect("len checked"),
            _ if conj => Formula::And(flat),
            _ => Formula::Or(flat),
        }
    }
}

impl From<&str> for Formula {
    fn from(id: &str) -> Self {
        Formula::Atom(id.to_string())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, parts: &[Formula], sep: &str) -> fmt::Result {
            write!(f, "(")?;
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    write!(f, " {sep} ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")
        }
        match self {
            Formula::Top => write!(f, "⊤"),
            Formula::Atom(id) => write!(f, "{id}"),
            Formula::Not(inner) => write!(f, "¬{inner}"),
            Formula::And(parts) => join(f, parts, "∧"),
            Formula::Or(parts) => join(f, parts, "∨"),
            Formula::Implies(a, b) => write!(f, "({a} → {b})"),
            Formula::Knows(i, inner) => write!(f, "K_{i}({inner})"),
            Formula::Believes(i, inner) => write!(f, "B_{i}({inner})"),
            Formula::Aware(i, inner) => write!(f, "A_{i}({inner})"),
            Formula::Common(g, inner) => {
                let g: Vec<&str> = g.iter().map(String::as_str).collect();
                write!(f, "C_{{{}}}({inner})", g.join(","))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Const(bool),
    Atom(String),
    Node(Node),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum Node {
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Knows { agent: String, phi: Box<Formula> },
    Believes { agent: String, phi: Box<Formula> },
    Aware { agent: String, phi: Box<Formula> },
    Common { agents: BTreeSet<String>, phi: Box<Formula> },
}

impl From<Formula> for Repr {
    fn from(f: Formula) -> Self {
        match f {
            Formula::Top => Repr::Const(true),
            Formula::Atom(id) => Repr::Atom(id),
            Formula::Not(inner) if *inner == Formula::Top => Repr::Const(false),
            Formula::Not(inner) => Repr::Node(Node::Not(inner)),
            Formula::And(fs) => Repr::Node(Node::And(fs)),
            Formula::Or(fs) => Repr::Node(Node::Or(fs)),
            Formula::Implies(a, b) => Repr::Node(Node::Implies(a, b)),
            Formula::Knows(agent, phi) => Repr::Node(Node::Knows { agent, phi }),
            Formula::Believes(agent, phi) => Repr::Node(Node::Believes { agent, phi }),
            Formula::Aware(agent, phi) => Repr::Node(Node::Aware { agent, phi }),
            Formula::Common(agents, phi) => Repr::Node(Node::Common { agents, phi }),
        }
    }
}

impl TryFrom<Repr> for Formula {
    type Error = String;

    fn try_from(r: Repr) -> Result<Self, Self::Error> {
        Ok(match r {
            Repr::Const(true) => Formula::Top,
            Repr::Const(false) => Formula::bottom(),
            Repr::Atom(id) if id.is_empty() => return Err("empty atom id".into()),
            Repr::Atom(id) => Formula::Atom(id),
            Repr::Node(Node::Not(f)) => Formula::Not(f),
            Repr::Node(Node::And(fs)) => Formula::And(fs),
            Repr::Node(Node::Or(fs)) => Formula::Or(fs),
            Repr::Node(Node::Implies(a, b)) => Formula::Implies(a, b),
            Repr::Node(Node::Knows { agent, phi }) => Formula::Knows(agent, phi),
            Repr::Node(Node::Believes { agent, phi }) => Formula::Believes(agent, phi),
            Repr::Node(Node::Aware { agent, phi }) => Formula::Aware(agent, phi),
            Repr::Node(Node::Common { agents, phi }) => Formula::Common(agents, phi),
        })
    }
}
