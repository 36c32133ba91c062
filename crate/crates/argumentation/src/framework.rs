use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use epistemic_core::Formula;
use serde::{Deserialize, Serialize};

use crate::error::{ArgError, Result};

pub type ArgId = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgType {
    Pro,
    Con,
    Resolve,
    Observe,
    Hypothesize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgStatus {
    Active,
    Weakened,
    Abandoned,
    Resolved,
}

impl ArgStatus {
    pub const ALL: [ArgStatus; 4] = [ArgStatus::Active, ArgStatus::Weakened, ArgStatus::Abandoned, ArgStatus::Resolved];

    /// Lifecycle edges: active→weakened→abandoned, active→resolved,
    /// weakened→abandoned. Staying put is always allowed.
    pub fn can_become(self, to: ArgStatus) -> bool {
        use ArgStatus::*;
        self == to || matches!((self, to), (Active, Weakened) | (Active, Resolved) | (Weakened, Abandoned))
    }

    /// Statuses that can ground a claim.
    pub fn is_live(self) -> bool {
        matches!(self, ArgStatus::Active | ArgStatus::Resolved)
    }

    pub fn name(self) -> &'static str {
        match self {
            ArgStatus::Active => "active",
            ArgStatus::Weakened => "weakened",
            ArgStatus::Abandoned => "abandoned",
            ArgStatus::Resolved => "resolved",
        }
    }
}

impl fmt::Display for ArgStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Argument {
    pub id: ArgId,
    pub claim: Formula,
    pub speaker: String,
    pub turn: u32,
    pub arg_type: ArgType,
    pub status: ArgStatus,
}

impl Argument {
    pub fn new(id: impl Into<ArgId>, claim: Formula, speaker: impl Into<String>, turn: u32, arg_type: ArgType) -> Self {
        Argument { id: id.into(), claim, speaker: speaker.into(), turn, arg_type, status: ArgStatus::Active }
    }
}

/// Arguments in creation order plus an acyclic attack relation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FrameworkDoc", into = "FrameworkDoc")]
pub struct ArgFramework {
    args: Vec<Argument>,
    index: BTreeMap<ArgId, usize>,
    attacks: BTreeSet<(ArgId, ArgId)>,
}

#[derive(Serialize, Deserialize)]
struct FrameworkDoc {
    args: Vec<Argument>,
    attacks: BTreeSet<(ArgId, ArgId)>,
}

impl From<ArgFramework> for FrameworkDoc {
    fn from(af: ArgFramework) -> Self {
        FrameworkDoc { args: af.args, attacks: af.attacks }
    }
}

impl TryFrom<FrameworkDoc> for ArgFramework {
    type Error = ArgError;

    fn try_from(doc: FrameworkDoc) -> Result<Self> {
        let mut af = ArgFramework::default();
        for arg in doc.args {
            af.add_argument(arg)?;
        }
        for (a, t) in doc.attacks {
            af.add_attack(&a, &t)?;
        }
        Ok(af)
    }
}

impl ArgFramework {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.args.len()
    }

    pub fn is_empty(&self) -> bool {
        self.args.is_empty()
    }

    /// Arguments in creation order.
    pub fn args(&self) -> &[Argument] {
        &self.args
    }

    pub fn ids(&self) -> impl Iterator<Item = &ArgId> {
        self.args.iter().map(|a| &a.id)
    }

    pub fn get(&self, id: &str) -> Option<&Argument> {
        self.index.get(id).map(|&i| &self.args[i])
    }

    /// Index of `id` in creation order.
    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn attacks(&self) -> &BTreeSet<(ArgId, ArgId)> {
        &self.attacks
    }

    pub fn attacks_pair(&self, attacker: &str, target: &str) -> bool {
        self.attacks.contains(&(attacker.to_string(), target.to_string()))
    }

    pub fn attackers_of<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a ArgId> + 'a {
        self.attacks.iter().filter(move |(_, t)| t == id).map(|(a, _)| a)
    }

    /// Arguments whose claim equals `claim` after canonicalization, in creation order.
    pub fn with_claim(&self, claim: &Formula) -> Vec<&Argument> {
        let c = claim.canonical();
        self.args.iter().filter(|a| a.claim.canonical() == c).collect()
    }

    pub fn add_argument(&mut self, arg: Argument) -> Result<()> {
        if self.index.contains_key(&arg.id) {
            return Err(ArgError::DuplicateId(arg.id));
        }
        if let Some(last) = self.args.last() {
            if arg.turn < last.turn {
                return Err(ArgError::NonMonotoneTurn { id: arg.id, turn: arg.turn, previous: last.turn });
            }
        }
        self.index.insert(arg.id.clone(), self.args.len());
        self.args.push(arg);
        Ok(())
    }

    /// Adds `attacker → target`, refusing edges that would close a cycle
    /// (including self-attacks).
    pub fn add_attack(&mut self, attacker: &str, target: &str) -> Result<()> {
        for id in [attacker, target] {
            if !self.contains(id) {
                return Err(ArgError::UnknownArgument(id.to_string()));
            }
        }
        if attacker == target || self.reaches(target, attacker) {
            return Err(ArgError::CycleIntroduced { attacker: attacker.to_string(), target: target.to_string() });
        }
        self.attacks.insert((attacker.to_string(), target.to_string()));
        Ok(())
    }

    /// Adds an edge without the cycle check; only for building cyclic
    /// frameworks for the brute-force oracle.
    pub fn add_attack_unchecked(&mut self, attacker: &str, target: &str) -> Result<()> {
        for id in [attacker, target] {
            if !self.contains(id) {
                return Err(ArgError::UnknownArgument(id.to_string()));
            }
        }
        self.attacks.insert((attacker.to_string(), target.to_string()));
        Ok(())
    }

    /// Is `to` reachable from `from` along attack edges?
    fn reaches(&self, from: &str, to: &str) -> bool {
        let succ = self.successors();
        let mut stack = vec![from];
        let mut seen = BTreeSet::new();
        while let Some(x) = stack.pop() {
            if x == to {
                return true;
            }
            if seen.insert(x) {
                if let Some(next) = succ.get(x) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        false
    }

    fn successors(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (a, t) in &self.attacks {
            succ.entry(a.as_str()).or_default().push(t.as_str());
        }
        succ
    }

    /// Whole-graph check, independent of the per-insertion reachability test.
    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Kahn order over attack edges (attackers first); `None` on a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.args.len();
        let mut indeg = vec![0usize; n];
        let mut succ: Vec<Vec<usize>> = vec![vec![]; n];
        for (a, t) in &self.attacks {
            let (ia, it) = (self.index[a], self.index[t]);
            succ[ia].push(it);
            indeg[it] += 1;
        }
        let mut queue: std::collections::VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &j in &succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Moves `id` along the lifecycle state machine.
    pub fn set_status(&mut self, id: &str, to: ArgStatus) -> Result<()> {
        let i = *self.index.get(id).ok_or_else(|| ArgError::UnknownArgument(id.to_string()))?;
        let from = self.args[i].status;
        if !from.can_become(to) {
            return Err(ArgError::InvalidTransition { id: id.to_string(), from, to });
        }
        self.args[i].status = to;
        Ok(())
    }

    /// Overwrites a status without consulting the state machine. Exists for
    /// fault injection (noise models, diff self-tests).
    pub fn force_status(&mut self, id: &str, to: ArgStatus) -> Result<()> {
        let i = *self.index.get(id).ok_or_else(|| ArgError::UnknownArgument(id.to_string()))?;
        self.args[i].status = to;
        Ok(())
    }

    /// Sub-framework without `removed` and their incident attacks.
    pub fn without(&self, removed: &BTreeSet<ArgId>) -> ArgFramework {
        let mut out = ArgFramework::default();
        for arg in self.args.iter().filter(|a| !removed.contains(&a.id)) {
            out.index.insert(arg.id.clone(), out.args.len());
            out.args.push(arg.clone());
        }
        out.attacks =
            self.attacks.iter().filter(|(a, t)| !removed.contains(a) && !removed.contains(t)).cloned().collect();
        out
    }

    /// No member attacks another member.
    pub fn is_conflict_free(&self, set: &BTreeSet<ArgId>) -> bool {
        !self.attacks.iter().any(|(a, t)| set.contains(a) && set.contains(t))
    }
}
