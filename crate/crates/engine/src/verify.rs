use std::collections::BTreeSet;

use argumentation::{walk_deps, ArgId, ArgStatus, ArgType};
use epistemic_core::Formula;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::structure::DependencyStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Grounded,
    Ungrounded,
}

/// Where the verdict was settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionStage {
    /// No argument carries the claim.
    NullResolution,
    /// Every match has a status that cannot ground.
    Status,
    /// Live matches exist but none is accepted.
    Membership,
    /// Grounded; the dep chain was walked.
    Walk,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub argument: ArgId,
    pub status: ArgStatus,
    pub turn: u32,
    /// Turn the current status was set; the creation turn if never changed.
    pub status_since: u32,
    pub in_extension: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyResult {
    pub verdict: Verdict,
    pub dep_chain: Vec<String>,
    pub evidence: Vec<Evidence>,
    pub decided_at: DecisionStage,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl VerifyResult {
    pub fn is_grounded(&self) -> bool {
        self.verdict == Verdict::Grounded
    }
}

/// Maps a user-facing claim id onto a registry atom. The default is
/// identity; fuzzy matching belongs to whoever produced the claim.
pub trait ClaimResolver {
    fn resolve(&self, claim: &str) -> Option<String>;
}

pub struct IdentityResolver;

impl ClaimResolver for IdentityResolver {
    fn resolve(&self, claim: &str) -> Option<String> {
        Some(claim.to_string())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Membership only, ignoring status.
    pub membership_only: bool,
    /// Let weakened arguments ground a claim (with a warning).
    pub weakened_grounds: bool,
}

/// Status-aware grounding check. Reads only the structure.
pub fn verify(claim: &str, d: &DependencyStructure) -> Result<VerifyResult> {
    verify_with(claim, d, VerifyOptions::default(), &IdentityResolver)
}

pub fn verify_with(
    claim: &str,
    d: &DependencyStructure,
    opts: VerifyOptions,
    resolver: &dyn ClaimResolver,
) -> Result<VerifyResult> {
    let ungrounded = |evidence, stage, warnings| VerifyResult {
        verdict: Verdict::Ungrounded,
        dep_chain: vec![],
        evidence,
        decided_at: stage,
        warnings,
    };
    let Some(atom) = resolver.resolve(claim) else {
        return Ok(ungrounded(vec![], DecisionStage::NullResolution, vec![]));
    };
    let target = Formula::atom(&atom);
    let matches: Vec<_> = d.af.args().iter().filter(|a| a.claim == target).collect();
    if matches.is_empty() {
        return Ok(ungrounded(vec![], DecisionStage::NullResolution, vec![]));
    }
    let extension = d.current_extension()?;
    let evidence: Vec<Evidence> = matches
        .iter()
        .map(|a| Evidence {
            argument: a.id.clone(),
            status: a.status,
            turn: a.turn,
            status_since: d.status_since.get(&a.id).copied().unwrap_or(a.turn),
            in_extension: extension.contains(&a.id),
        })
        .collect();
    let mut warnings = vec![];
    let can_ground = |s: ArgStatus| {
        opts.membership_only || s.is_live() || (opts.weakened_grounds && s == ArgStatus::Weakened)
    };
    let live: Vec<_> = matches.iter().filter(|a| a.arg_type != ArgType::Con && can_ground(a.status)).collect();
    if live.is_empty() {
        return Ok(ungrounded(evidence, DecisionStage::Status, warnings));
    }
    let Some(winner) = live.iter().find(|a| extension.contains(&a.id)) else {
        return Ok(ungrounded(evidence, DecisionStage::Membership, warnings));
    };
    if winner.status == ArgStatus::Weakened {
        warnings.push(format!("{} is weakened", winner.id));
    }
    Ok(VerifyResult {
        verdict: Verdict::Grounded,
        dep_chain: walk_deps(&winner.id, &d.dep, &d.af, d.registry()),
        evidence,
        decided_at: DecisionStage::Walk,
        warnings,
    })
}

/// `Affected(p)` over the structure's current extension.
pub fn affected(p: &str, d: &DependencyStructure) -> Result<(BTreeSet<ArgId>, Vec<String>)> {
    let mut warnings = vec![];
    if !d.model.has_atom(p) {
        warnings.push(format!("`{p}` is not a registered atom"));
    }
    // Most atoms have no dependents; skip the extension for them.
    if !d.dep.deps.iter().any(|(a, e)| e.contains(p) && d.af.contains(a)) {
        return Ok((BTreeSet::new(), warnings));
    }
    let ext = d.current_extension()?;
    Ok((argumentation::affected(p, &ext, &d.dep), warnings))
}
