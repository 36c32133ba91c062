use std::collections::{BTreeMap, BTreeSet};

use epistemic_core::{Atom, AtomKind, Formula};
use serde::{Deserialize, Serialize};

use crate::dep::{literal, DepMap};
use crate::error::{ArgError, Result};
use crate::framework::{ArgFramework, ArgId, ArgType};

/// Largest framework `brute_force_extensions` will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 15;

/// The unique extension of an acyclic framework: walking attackers-first,
/// an argument is IN iff every attacker is OUT.
pub fn preferred_extension(af: &ArgFramework) -> Result<BTreeSet<ArgId>> {
    let order = af.topological_order().ok_or(ArgError::CyclicFramework)?;
    let args = af.args();
    let pos = |id: &str| af.position(id).expect("attack endpoints are members");
    let mut attackers: Vec<Vec<usize>> = vec![vec![]; args.len()];
    for (a, t) in af.attacks() {
        attackers[pos(t)].push(pos(a));
    }
    let mut inside = vec![false; args.len()];
    for i in order {
        inside[i] = attackers[i].iter().all(|&j| !inside[j]);
    }
    Ok(args.iter().zip(inside).filter(|(_, x)| *x).map(|(a, _)| a.id.clone()).collect())
}

/// Extension of the framework once dormant arguments (see
/// [`DepMap::dormant`]) are set aside.
pub fn current_extension(af: &ArgFramework, dep: &DepMap) -> Result<BTreeSet<ArgId>> {
    let dormant = dep.dormant();
    if dormant.is_empty() {
        preferred_extension(af)
    } else {
        preferred_extension(&af.without(&dormant))
    }
}

/// All preferred extensions (maximal admissible sets) by subset enumeration.
/// Works on cyclic frameworks too.
pub fn brute_force_extensions(af: &ArgFramework) -> Result<BTreeSet<BTreeSet<ArgId>>> {
    let n = af.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(ArgError::TooLarge(n));
    }
    let ids: Vec<&ArgId> = af.ids().collect();
    let pos: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
    // attackers_mask[i]: bitmask of arguments attacking i
    let mut attackers_mask = vec![0u32; n];
    for (a, t) in af.attacks() {
        attackers_mask[pos[t.as_str()]] |= 1 << pos[a.as_str()];
    }
    let attacked_by_set = |s: u32| -> u32 {
        (0..n).filter(|&i| attackers_mask[i] & s != 0).fold(0, |m, i| m | 1 << i)
    };
    let admissible: Vec<u32> = (0u32..1 << n)
        .filter(|&s| {
            let hit = attacked_by_set(s);
            let conflict_free = hit & s == 0;
            // every attacker of a member is itself attacked by s
            let defended = (0..n).filter(|&i| s >> i & 1 == 1).all(|i| attackers_mask[i] & !hit == 0);
            conflict_free && defended
        })
        .collect();
    Ok(admissible
        .iter()
        .filter(|&&s| !admissible.iter().any(|&t| t != s && t & s == s))
        .map(|&s| (0..n).filter(|&i| s >> i & 1 == 1).map(|i| ids[i].clone()).collect())
        .collect())
}

/// Extension members whose dep set contains `p` directly.
pub fn affected(p: &str, extension: &BTreeSet<ArgId>, dep: &DepMap) -> BTreeSet<ArgId> {
    extension.iter().filter(|a| dep.depends_on(a, p)).cloned().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetractMode {
    Direct,
    Cascade,
}

/// Acceptance before and after a retraction for one surviving argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusChange {
    pub was_in: bool,
    pub now_in: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetractionReport {
    pub retracted: String,
    pub mode: RetractMode,
    pub affected: BTreeSet<ArgId>,
    /// S′ = S minus the affected arguments.
    pub surviving_extension: BTreeSet<ArgId>,
    /// Extension recomputed on the reduced framework.
    pub recomputed_extension: BTreeSet<ArgId>,
    /// Surviving arguments whose acceptance flipped.
    pub changes: BTreeMap<ArgId, StatusChange>,
    pub conflict_free: bool,
    /// Members of S′ that the recomputation no longer accepts.
    pub dropped_from_surviving: BTreeSet<ArgId>,
    pub warnings: Vec<String>,
    /// The reduced framework and dep map.
    #[serde(skip)]
    pub framework: ArgFramework,
    #[serde(skip)]
    pub dep: DepMap,
}

impl RetractionReport {
    pub fn reinstated(&self) -> impl Iterator<Item = &ArgId> {
        self.changes.iter().filter(|(_, c)| c.now_in && !c.was_in).map(|(a, _)| a)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &ArgId> {
        self.changes.iter().filter(|(_, c)| c.was_in && !c.now_in).map(|(a, _)| a)
    }
}

/// Removes the arguments resting on `p` and recomputes acceptance.
/// Cascade mode keeps going: when a removed argument's atomic claim appears
/// in the dep set of a surviving extension member, that member goes too.
pub fn retract(p: &str, af: &ArgFramework, dep: &DepMap, mode: RetractMode) -> Result<RetractionReport> {
    if !af.is_acyclic() {
        return Err(ArgError::CyclicFramework);
    }
    let extension = current_extension(af, dep)?;
    let mut warnings = vec![];
    if !dep.mentions(p) {
        warnings.push(format!("no argument depends on `{p}`"));
    }
    let mut hit = affected(p, &extension, dep);
    if mode == RetractMode::Cascade {
        loop {
            let claims: BTreeSet<&str> =
                hit.iter().filter_map(|a| af.get(a)?.claim.as_atom()).collect();
            let more: BTreeSet<ArgId> = extension
                .iter()
                .filter(|b| !hit.contains(*b))
                .filter(|b| claims.iter().any(|c| dep.depends_on(b, c)))
                .cloned()
                .collect();
            if more.is_empty() {
                break;
            }
            hit.extend(more);
        }
    }
    let reduced = af.without(&hit);
    let mut reduced_dep = dep.clone();
    for a in &hit {
        reduced_dep.remove(a);
    }
    reduced_dep.retracted.insert(p.to_string());
    let recomputed = current_extension(&reduced, &reduced_dep)?;
    let surviving: BTreeSet<ArgId> = extension.difference(&hit).cloned().collect();
    let changes = reduced
        .ids()
        .filter_map(|a| {
            let (was_in, now_in) = (extension.contains(a), recomputed.contains(a));
            (was_in != now_in).then(|| (a.clone(), StatusChange { was_in, now_in }))
        })
        .collect();
    Ok(RetractionReport {
        retracted: p.to_string(),
        mode,
        conflict_free: reduced.is_conflict_free(&surviving),
        dropped_from_surviving: surviving.difference(&recomputed).cloned().collect(),
        affected: hit,
        surviving_extension: surviving,
        recomputed_extension: recomputed,
        changes,
        warnings,
        framework: reduced,
        dep: reduced_dep,
    })
}

/// Transitive dependency closure of `arg`. Hypothesis atoms are followed
/// back into the dep sets of the arguments claiming them (con arguments
/// excepted). Output is in registry order; negated entries are skipped, as
/// is the argument's own claim.
pub fn walk_deps(arg: &str, dep: &DepMap, af: &ArgFramework, registry: &[Atom]) -> Vec<String> {
    let kinds: BTreeMap<&str, AtomKind> = registry.iter().map(|a| (a.id.as_str(), a.kind)).collect();
    let own_claim = af.get(arg).and_then(|a| a.claim.as_atom()).map(str::to_string);
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut visited_args: BTreeSet<&str> = BTreeSet::from([arg]);
    let mut stack: Vec<&str> = vec![arg];
    while let Some(a) = stack.pop() {
        for entry in dep.get(a).into_iter().flatten() {
            let (atom, neg) = literal(entry);
            if neg || !seen.insert(atom.to_string()) {
                continue;
            }
            if kinds.get(atom) == Some(&AtomKind::Hypothesis) {
                let claim = Formula::atom(atom);
                for b in af.args() {
                    if b.arg_type != ArgType::Con && b.claim == claim && visited_args.insert(b.id.as_str()) {
                        stack.push(b.id.as_str());
                    }
                }
            }
        }
    }
    if let Some(c) = own_claim {
        seen.remove(&c);
    }
    let mut out: Vec<String> = registry.iter().filter(|a| seen.contains(&a.id)).map(|a| a.id.clone()).collect();
    // Entries outside the registry still show up, after the registered ones.
    out.extend(seen.into_iter().filter(|s| !kinds.contains_key(s.as_str())));
    out
}
