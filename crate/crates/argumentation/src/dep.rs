use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::framework::ArgId;

/// Splits a dep entry into `(atom, negated)`. An entry `!p` means the
/// argument only stands while `p` has not been retracted.
pub fn literal(entry: &str) -> (&str, bool) {
    match entry.strip_prefix('!') {
        Some(atom) => (atom, true),
        None => (entry, false),
    }
}

/// Argument → supporting atoms, plus the atoms retracted so far.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepMap {
    pub deps: BTreeMap<ArgId, BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub retracted: BTreeSet<String>,
}

impl DepMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Makes sure `arg` has an entry (possibly empty).
    pub fn define(&mut self, arg: &str) {
        self.deps.entry(arg.to_string()).or_default();
    }

    /// Additive: existing entries are never dropped.
    pub fn extend<I, S>(&mut self, arg: &str, atoms: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.deps.entry(arg.to_string()).or_default().extend(atoms.into_iter().map(Into::into));
    }

    pub fn get(&self, arg: &str) -> Option<&BTreeSet<String>> {
        self.deps.get(arg)
    }

    pub fn is_defined(&self, arg: &str) -> bool {
        self.deps.contains_key(arg)
    }

    /// Positive dependency on `atom`?
    pub fn depends_on(&self, arg: &str, atom: &str) -> bool {
        self.deps.get(arg).is_some_and(|d| d.contains(atom))
    }

    /// Removal happens only when an argument leaves the framework.
    pub fn remove(&mut self, arg: &str) -> Option<BTreeSet<String>> {
        self.deps.remove(arg)
    }

    /// Does any entry mention `atom`, positively or negated?
    pub fn mentions(&self, atom: &str) -> bool {
        self.deps.values().flatten().any(|e| literal(e).0 == atom)
    }

    /// Arguments waiting on a negated atom that has not been retracted.
    pub fn dormant(&self) -> BTreeSet<ArgId> {
        self.deps
            .iter()
            .filter(|(_, d)| {
                d.iter().any(|e| {
                    let (atom, neg) = literal(e);
                    neg && !self.retracted.contains(atom)
                })
            })
            .map(|(a, _)| a.clone())
            .collect()
    }

    pub fn total_entries(&self) -> usize {
        self.deps.values().map(BTreeSet::len).sum()
    }
}

/// Public commitments per agent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commitments {
    pub by_agent: BTreeMap<String, BTreeSet<ArgId>>,
}

impl Commitments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn commit(&mut self, agent: &str, arg: &str) {
        self.by_agent.entry(agent.to_string()).or_default().insert(arg.to_string());
    }

    pub fn of(&self, agent: &str) -> impl Iterator<Item = &ArgId> {
        self.by_agent.get(agent).into_iter().flatten()
    }

    pub fn is_committed(&self, agent: &str, arg: &str) -> bool {
        self.by_agent.get(agent).is_some_and(|s| s.contains(arg))
    }

    pub fn committed_agents(&self, arg: &str) -> BTreeSet<String> {
        self.by_agent.iter().filter(|(_, s)| s.contains(arg)).map(|(a, _)| a.clone()).collect()
    }

    /// Drops `arg` from every agent's record.
    pub fn remove_arg(&mut self, arg: &str) {
        for set in self.by_agent.values_mut() {
            set.remove(arg);
        }
    }
}
