use std::collections::{BTreeMap, BTreeSet};

use argumentation::{
    current_extension, literal, ArgFramework, ArgId, ArgStatus, ArgType, Argument, Commitments, DepMap,
};
use epistemic_core::{
    evaluate_solution, AbductionVerdict, AbductiveProblem, Atom, AtomKind, EpistemicError, EpistemicModel, Formula,
    ProblemStatus, WorldId,
};
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::ops::{ArgSpec, Op, OpKind, ResolveMode, TurnOperation, Violation};

/// The turn-indexed bundle: model, framework, commitments, dep map, plus
/// the abductive queue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependencyStructure {
    pub turn: u32,
    pub model: EpistemicModel,
    pub af: ArgFramework,
    pub cm: Commitments,
    pub dep: DepMap,
    pub abd_queue: Vec<AbductiveProblem>,
    /// Re-resolved from `ground_truth` after every update.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actual_world: Option<WorldId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<BTreeMap<String, bool>>,
    /// Agents allowed to resolve authoritatively.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub authorities: BTreeSet<String>,
    /// Dissenters recorded against authoritative decisions.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub dissent: BTreeMap<ArgId, BTreeSet<String>>,
    /// Turn of each argument's last status change.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub status_since: BTreeMap<ArgId, u32>,
}

/// What one turn did besides producing the next structure.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnOutcome {
    pub created: Vec<ArgId>,
    pub warnings: Vec<String>,
}

impl DependencyStructure {
    pub fn new(model: EpistemicModel) -> Self {
        DependencyStructure {
            turn: 0,
            model,
            af: ArgFramework::new(),
            cm: Commitments::new(),
            dep: DepMap::new(),
            abd_queue: vec![],
            actual_world: None,
            ground_truth: None,
            authorities: BTreeSet::new(),
            dissent: BTreeMap::new(),
            status_since: BTreeMap::new(),
        }
    }

    /// Declares the actual valuation; atoms not listed default to true in
    /// the world lookup (the copy that keeps its id on expansion).
    pub fn with_ground_truth(mut self, truth: BTreeMap<String, bool>) -> Self {
        self.ground_truth = Some(truth);
        self.refresh_actual();
        self
    }

    pub fn with_authorities<S: Into<String>>(mut self, agents: impl IntoIterator<Item = S>) -> Self {
        self.authorities = agents.into_iter().map(Into::into).collect();
        self
    }

    /// Registers an argument that exists before the first turn.
    pub fn add_initial_argument(&mut self, arg: Argument, deps: &[String], committed: &[String]) -> Result<()> {
        self.check_dep_atoms(deps).map_err(EngineError::Precondition)?;
        let id = arg.id.clone();
        self.af.add_argument(arg)?;
        self.dep.define(&id);
        self.dep.extend(&id, deps.iter().cloned());
        for agent in committed {
            self.cm.commit(agent, &id);
        }
        Ok(())
    }

    fn refresh_actual(&mut self) {
        self.actual_world = self.ground_truth.as_ref().and_then(|t| self.model.find_world(t));
    }

    fn world_of(&self, model: &EpistemicModel) -> Result<WorldId> {
        let actual = self.ground_truth.as_ref().and_then(|t| model.find_world(t));
        actual.or_else(|| model.world_ids().next()).ok_or(EngineError::Inconsistent)
    }

    /// World at which beliefs are read: the actual world when declared and
    /// still present, otherwise the lowest-id world.
    pub fn eval_world(&self) -> Result<WorldId> {
        self.world_of(&self.model)
    }

    pub fn registry(&self) -> &[Atom] {
        self.model.registry()
    }

    /// Oldest non-con argument whose claim is `claim`.
    pub fn primary_for(&self, claim: &Formula) -> Option<&Argument> {
        self.af.with_claim(claim).into_iter().find(|a| a.arg_type != ArgType::Con)
    }

    /// Argument id first, atomic claim second.
    pub fn resolve_ref(&self, r: &str) -> Option<&Argument> {
        self.af.get(r).or_else(|| self.primary_for(&Formula::atom(r)))
    }

    pub fn current_extension(&self) -> Result<BTreeSet<ArgId>> {
        Ok(current_extension(&self.af, &self.dep)?)
    }

    pub fn open_problems(&self) -> impl Iterator<Item = &AbductiveProblem> {
        self.abd_queue.iter().filter(|p| p.is_open())
    }

    /// Enqueues `(agent, chi)` if `chi` holds at the actual world and the
    /// agent does not already believe it. Call before the turn's updates.
    pub fn surprise_scan(&mut self, chi: &Formula, agent: &str) -> Result<bool> {
        let w = self.actual_world.ok_or(EngineError::NoActualWorld)?;
        let surprising =
            self.model.eval(w, chi)? && !self.model.eval(w, &Formula::believes(agent, chi.clone()))?;
        if surprising {
            self.enqueue(agent, chi.clone(), self.turn + 1);
        }
        Ok(surprising)
    }

    fn enqueue(&mut self, agent: &str, chi: Formula, turn: u32) {
        let c = chi.canonical();
        if !self.open_problems().any(|p| p.agent == agent && p.observation.canonical() == c) {
            self.abd_queue.push(AbductiveProblem::open(agent, chi, turn));
        }
    }

    /// Evaluates the operation's row of the precondition table against the
    /// structure as it stands.
    pub fn check_precondition(&self, top: &TurnOperation) -> Result<(), Violation> {
        self.precondition(top, self.turn + 1, None).map(|_| ())
    }

    /// One operation as a whole turn.
    pub fn apply(&self, top: &TurnOperation) -> Result<(Self, TurnOutcome)> {
        self.apply_turn(std::slice::from_ref(top), false)
    }

    /// Applies `ops` in order as one turn. Either every operation applies or
    /// `self` is left as it was and the first failure is returned. With
    /// `simultaneous`, Observe formulas are all evaluated in the model at the
    /// start of the turn.
    pub fn apply_turn(&self, ops: &[TurnOperation], simultaneous: bool) -> Result<(Self, TurnOutcome)> {
        let mut next = self.clone();
        next.turn += 1;
        let base = simultaneous.then(|| self.model.clone());
        let mut outcome = TurnOutcome::default();
        for top in ops {
            let plan = next.precondition(top, next.turn, base.as_ref()).map_err(EngineError::Precondition)?;
            next.apply_op(top, plan, base.as_ref(), &mut outcome)?;
            next.refresh_actual();
        }
        Ok((next, outcome))
    }

    /// Structural invariants across the four components.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        self.model.check_invariants()?;
        if !self.af.is_acyclic() {
            return Err("attack graph is cyclic".into());
        }
        for arg in self.af.args() {
            if !self.dep.is_defined(&arg.id) {
                return Err(format!("argument {} has no dep entry", arg.id));
            }
        }
        for (arg, entries) in &self.dep.deps {
            if !self.af.contains(arg) {
                return Err(format!("dep entry for missing argument {arg}"));
            }
            for e in entries {
                if !self.model.has_atom(literal(e).0) {
                    return Err(format!("dep entry {e} of {arg} is not a registered atom"));
                }
            }
        }
        for (agent, args) in &self.cm.by_agent {
            if let Some(a) = args.iter().find(|a| !self.af.contains(a)) {
                return Err(format!("{agent} is committed to missing argument {a}"));
            }
        }
        Ok(())
    }

    fn check_dep_atoms(&self, deps: &[String]) -> Result<(), Violation> {
        match deps.iter().find(|d| !self.model.has_atom(literal(d).0)) {
            Some(d) => Err(Violation::new("unregistered-atom", format!("dependency `{d}` is not registered"))
                .suggest(OpKind::ExpandAwareness)),
            None => Ok(()),
        }
    }

    fn check_formula(&self, phi: &Formula) -> Result<(), Violation> {
        if let Some(a) = phi.atoms().into_iter().find(|a| !self.model.has_atom(a)) {
            return Err(Violation::new("unregistered-atom", format!("`{a}` is not registered"))
                .suggest(OpKind::ExpandAwareness));
        }
        if let Some(i) = phi.agents().into_iter().find(|i| !self.model.has_agent(i)) {
            return Err(Violation::new("unknown-agent", format!("`{i}` is not an agent")));
        }
        Ok(())
    }

    fn check_agent(&self, agent: &str) -> Result<(), Violation> {
        if self.model.has_agent(agent) {
            Ok(())
        } else {
            Err(Violation::new("unknown-agent", format!("`{agent}` is not an agent")))
        }
    }

    fn check_spec(&self, spec: Option<&ArgSpec>) -> Result<(), Violation> {
        let Some(spec) = spec else { return Ok(()) };
        if let Some(id) = &spec.id {
            if self.af.contains(id) {
                return Err(Violation::new("duplicate-argument", format!("argument `{id}` already exists")));
            }
        }
        if let Some(c) = &spec.claim {
            self.check_formula(c)?;
        }
        self.check_dep_atoms(&spec.deps)?;
        for t in &spec.attacks {
            self.target(t)?;
        }
        Ok(())
    }

    fn target(&self, r: &str) -> Result<&Argument, Violation> {
        self.resolve_ref(r).ok_or_else(|| {
            Violation::new("unknown-target", format!("`{r}` names no argument")).suggest(OpKind::Hypothesize)
        })
    }

    fn internal(e: impl std::fmt::Display) -> Violation {
        Violation::new("ill-formed", e.to_string())
    }

    /// `base` is the turn-start model of a simultaneous turn; Observe
    /// formulas are checked there.
    fn precondition(&self, top: &TurnOperation, turn: u32, base: Option<&EpistemicModel>) -> Result<Plan, Violation> {
        self.check_agent(&top.speaker)?;
        let w = self.eval_world().map_err(Self::internal)?;
        match &top.op {
            Op::Observe { psi, argument } => {
                self.check_formula(psi)?;
                self.check_spec(argument.as_ref())?;
                if !base.unwrap_or(&self.model).satisfiable(psi).map_err(Self::internal)? {
                    return Err(Violation::new(
                        "inconsistent-announcement",
                        format!("no world satisfies {psi}"),
                    ));
                }
                Ok(Plan::None)
            }
            Op::Hypothesize { gamma, deps, explains, argument } => {
                let model = if self.model.has_atom(gamma) {
                    self.model.clone()
                } else {
                    self.model
                        .expand_awareness(self.model.agents(), Atom::new(gamma, AtomKind::Hypothesis))
                        .map_err(|e| match e {
                            EpistemicError::Invalid(m) => Violation::new("invalid-atom", m),
                            e => Self::internal(e),
                        })?
                };
                let id = self.arg_id(&Formula::atom(gamma), argument.as_ref(), turn);
                if self.af.contains(&id) {
                    return Err(Violation::new("duplicate-argument", format!("argument `{id}` already exists")));
                }
                if let Some(chi) = explains {
                    self.check_formula(chi)?;
                }
                let deps_ok = deps.iter().all(|d| model.has_atom(literal(d).0));
                if !deps_ok {
                    self.check_dep_atoms(deps)?;
                }
                self.check_spec(argument.as_ref())?;
                let problem = self.match_problem(&model, gamma, deps, explains.as_ref())?;
                Ok(Plan::Hypothesize { problem })
            }
            Op::Support { gamma, evidence, argument, .. } => {
                let target = self.target(gamma)?;
                if target.status == ArgStatus::Abandoned {
                    return Err(Violation::new("target-abandoned", format!("{} is abandoned", target.id))
                        .suggest(OpKind::Hypothesize));
                }
                self.check_spec(argument.as_ref())?;
                match evidence {
                    None if argument.is_none() => {
                        return Err(Violation::new("missing-evidence", "support needs evidence or an argument"))
                    }
                    Some(e) => {
                        self.check_dep_atoms(std::slice::from_ref(e))?;
                        if argument.is_none() && self.dep.depends_on(&target.id, e) {
                            return Err(Violation::new(
                                "redundant-support",
                                format!("{} already rests on {e}", target.id),
                            ));
                        }
                    }
                    None => {}
                }
                Ok(Plan::Target(target.id.clone()))
            }
            Op::Undermine { gamma, evidence, falsified_prediction, argument } => {
                let target = self.target(gamma)?;
                if matches!(target.status, ArgStatus::Abandoned | ArgStatus::Resolved) {
                    return Err(Violation::new(
                        "not-currently-believed",
                        format!("{} is already {}", target.id, target.status),
                    )
                    .suggest(OpKind::Revise));
                }
                let not_claim = Formula::not(target.claim.clone());
                let believes_not = self
                    .model
                    .eval(w, &Formula::believes(&top.speaker, not_claim))
                    .map_err(Self::internal)?;
                if believes_not {
                    return Err(Violation::new(
                        "not-currently-believed",
                        format!("{} already believes ¬{}", top.speaker, target.claim),
                    )
                    .suggest(OpKind::Revise));
                }
                if let Some(e) = evidence {
                    self.check_dep_atoms(std::slice::from_ref(e))?;
                }
                if let Some(pred) = falsified_prediction {
                    self.check_formula(pred)?;
                    if self.model.valid(pred).map_err(Self::internal)? {
                        return Err(Violation::new(
                            "inconsistent-announcement",
                            format!("removing {pred} would leave no world"),
                        ));
                    }
                }
                self.check_spec(argument.as_ref())?;
                Ok(Plan::Target(target.id.clone()))
            }
            Op::Revise { gamma, evidence } => {
                let target = self.target(gamma)?;
                if target.status == ArgStatus::Resolved {
                    return Err(Violation::new("target-resolved", format!("{} is resolved", target.id)));
                }
                if let Some(e) = evidence {
                    let attacker = self.target(e)?;
                    if attacker.id == target.id || self.reaches(&target.id, &attacker.id) {
                        return Err(Violation::new(
                            "attack-cycle",
                            format!("{} -> {} would close a cycle", attacker.id, target.id),
                        ));
                    }
                }
                Ok(Plan::Target(target.id.clone()))
            }
            Op::ExpandAwareness { atom, agents, .. } => {
                let agents = agents.clone().unwrap_or_else(|| self.model.agents().to_vec());
                for a in &agents {
                    self.check_agent(a)?;
                }
                let f = Formula::atom(atom);
                if self.model.has_atom(atom)
                    && agents.iter().all(|a| self.model.is_aware(a, &f).unwrap_or(false))
                {
                    return Err(Violation::new("already-aware", format!("`{atom}` is already registered"))
                        .suggest(OpKind::Observe));
                }
                Ok(Plan::None)
            }
            Op::Resolve { gamma, subsumes, mode, dissenters, argument } => {
                self.check_formula(gamma)?;
                self.check_spec(argument.as_ref())?;
                let existing = self.resolve_claim(gamma);
                match mode {
                    ResolveMode::Consensual => {
                        if let Some(alpha) = existing {
                            if alpha.status == ArgStatus::Weakened || alpha.status == ArgStatus::Abandoned {
                                return Err(Violation::new(
                                    "not-resolvable",
                                    format!("{} is {}", alpha.id, alpha.status),
                                ));
                            }
                            let ext = self.current_extension().map_err(Self::internal)?;
                            if !ext.contains(&alpha.id) {
                                return Err(Violation::new(
                                    "undefeated-attack",
                                    format!("{} is not in the current extension", alpha.id),
                                ));
                            }
                            let attackers: Vec<&ArgId> = self.af.attackers_of(&alpha.id).collect();
                            if let Some((agent, att)) = attackers.iter().find_map(|att| {
                                self.cm.committed_agents(att).into_iter().next().map(|ag| (ag, att))
                            }) {
                                return Err(Violation::new(
                                    "open-dissent",
                                    format!("{agent} is committed to {att}, which attacks {}", alpha.id),
                                )
                                .suggest(OpKind::Resolve));
                            }
                        }
                        if !self.model.satisfiable(gamma).map_err(Self::internal)? {
                            return Err(Violation::new(
                                "inconsistent-announcement",
                                format!("no world satisfies {gamma}"),
                            ));
                        }
                    }
                    ResolveMode::Authoritative => {
                        if !self.authorities.contains(&top.speaker) {
                            return Err(Violation::new(
                                "no-authority",
                                format!("{} cannot decide authoritatively", top.speaker),
                            ));
                        }
                        if dissenters.is_empty() {
                            return Err(Violation::new("no-dissent", "authoritative resolve without dissenters")
                                .suggest(OpKind::Resolve));
                        }
                        for d in dissenters {
                            self.check_agent(d)?;
                        }
                    }
                }
                if !subsumes.is_empty() && gamma.as_atom().is_none() {
                    return Err(Violation::new("non-atomic-subsumption", format!("{gamma} is not an atom")));
                }
                for s in subsumes {
                    let b = self.target(s)?;
                    if !matches!(b.status, ArgStatus::Active | ArgStatus::Resolved) {
                        return Err(Violation::new("not-resolvable", format!("{} is {}", b.id, b.status)));
                    }
                }
                Ok(Plan::Resolve { existing: existing.map(|a| a.id.clone()) })
            }
            Op::Question { .. } => Ok(Plan::None),
        }
    }

    /// For Resolve: an argument id when γ is an atom naming one, otherwise
    /// the primary argument for the claim.
    fn resolve_claim(&self, gamma: &Formula) -> Option<&Argument> {
        gamma.as_atom().and_then(|id| self.af.get(id)).or_else(|| self.primary_for(gamma))
    }

    fn reaches(&self, from: &str, to: &str) -> bool {
        let mut stack = vec![from.to_string()];
        let mut seen = BTreeSet::new();
        while let Some(x) = stack.pop() {
            if x == to {
                return true;
            }
            if seen.insert(x.clone()) {
                stack.extend(self.af.attacks().iter().filter(|(a, _)| *a == x).map(|(_, t)| t.clone()));
            }
        }
        false
    }

    /// Oldest open problem this hypothesis answers. With `explains`, the
    /// observation must match; otherwise accepted candidates sharing an atom
    /// with the hypothesis or its deps come first, then any accepted one.
    fn match_problem(
        &self,
        model: &EpistemicModel,
        gamma: &str,
        deps: &[String],
        explains: Option<&Formula>,
    ) -> Result<usize, Violation> {
        let w = self.world_of(model).map_err(Self::internal)?;
        let g = Formula::atom(gamma);
        let wanted = explains.map(Formula::canonical);
        let candidates: Vec<usize> = (0..self.abd_queue.len())
            .filter(|&i| self.abd_queue[i].is_open())
            .filter(|&i| wanted.as_ref().map_or(true, |c| self.abd_queue[i].observation.canonical() == *c))
            .collect();
        if candidates.is_empty() {
            let what = explains.map_or_else(|| "any observation".to_string(), |c| c.to_string());
            return Err(Violation::new("no-open-problem", format!("no open problem for {what}"))
                .suggest(OpKind::Question));
        }
        let mut mentioned: BTreeSet<String> = deps.iter().map(|d| literal(d).0.to_string()).collect();
        mentioned.insert(gamma.to_string());
        let mut first_accept = None;
        let mut first_reject = None;
        for &i in &candidates {
            let p = &self.abd_queue[i];
            match evaluate_solution(model, w, &p.agent, &p.observation, &g).map_err(Self::internal)? {
                AbductionVerdict::Accept => {
                    if p.observation.atoms().iter().any(|a| mentioned.contains(a)) {
                        return Ok(i);
                    }
                    first_accept.get_or_insert(i);
                }
                AbductionVerdict::Reject(r) => {
                    first_reject.get_or_insert((i, r));
                }
            }
        }
        if let Some(i) = first_accept {
            return Ok(i);
        }
        let (i, r) = first_reject.expect("candidates non-empty");
        Err(Violation::new(
            &format!("abduction-{}", r.name()),
            format!("{gamma} fails as an answer to {}", self.abd_queue[i].observation),
        ))
    }

    fn arg_id(&self, claim: &Formula, spec: Option<&ArgSpec>, turn: u32) -> ArgId {
        if let Some(id) = spec.and_then(|s| s.id.clone()) {
            return id;
        }
        let base = format!("{claim}@T{turn}");
        if !self.af.contains(&base) {
            return base;
        }
        (2..).map(|k| format!("{base}#{k}")).find(|id| !self.af.contains(id)).expect("unbounded")
    }

    /// Adds an argument to all three argument-side components at once.
    fn create_argument(
        &mut self,
        arg: Argument,
        deps: impl IntoIterator<Item = String>,
        attacks: &[String],
    ) -> Result<ArgId> {
        let id = arg.id.clone();
        let speaker = arg.speaker.clone();
        let deps: Vec<String> = deps.into_iter().collect();
        if let Some(d) = deps.iter().find(|d| !self.model.has_atom(literal(d).0)) {
            return Err(EpistemicError::UnknownAtom(d.clone()).into());
        }
        self.af.add_argument(arg)?;
        self.dep.define(&id);
        self.dep.extend(&id, deps);
        self.cm.commit(&speaker, &id);
        for r in attacks {
            let target = self.resolve_ref(r).ok_or_else(|| EngineError::UnknownReference(r.clone()))?.id.clone();
            if target != id {
                self.af.add_attack(&id, &target)?;
            }
        }
        debug_assert!(self.af.contains(&id) && self.cm.is_committed(&speaker, &id) && self.dep.is_defined(&id));
        Ok(id)
    }

    fn spec_argument(
        &self,
        spec: &ArgSpec,
        default_claim: &Formula,
        speaker: &str,
        default_type: ArgType,
    ) -> Argument {
        let claim = spec.claim.clone().unwrap_or_else(|| default_claim.clone());
        let id = self.arg_id(&claim, Some(spec), self.turn);
        Argument::new(id, claim, speaker, self.turn, spec.arg_type.unwrap_or(default_type))
    }

    fn set_status(&mut self, id: &str, to: ArgStatus) -> Result<()> {
        if self.af.get(id).map(|a| a.status) != Some(to) {
            self.af.set_status(id, to)?;
            self.status_since.insert(id.to_string(), self.turn);
        }
        Ok(())
    }

    fn apply_op(
        &mut self,
        top: &TurnOperation,
        plan: Plan,
        base: Option<&EpistemicModel>,
        out: &mut TurnOutcome,
    ) -> Result<()> {
        let speaker = top.speaker.as_str();
        let turn = self.turn;
        match &top.op {
            Op::Observe { psi, argument } => {
                let pre = self.model.clone();
                self.model = match base {
                    Some(start) => {
                        let keep: BTreeSet<WorldId> = start
                            .world_ids()
                            .zip(start.truth(psi)?)
                            .filter(|(_, t)| *t)
                            .map(|(w, _)| w)
                            .collect();
                        self.model.retain_worlds(&keep)
                    }
                    None => self.model.announce(psi)?,
                };
                if self.model.is_inconsistent() {
                    return Err(EngineError::Precondition(Violation::new(
                        "inconsistent-announcement",
                        format!("{psi} leaves no world"),
                    )));
                }
                let not_psi = Formula::not(psi.clone());
                let mut attacks: Vec<String> = vec![];
                for b in self.af.args() {
                    let contradicted = pre.satisfiable(&b.claim).unwrap_or(false)
                        && pre.valid(&Formula::implies(b.claim.clone(), not_psi.clone())).unwrap_or(false);
                    if contradicted {
                        attacks.push(b.id.clone());
                    }
                }
                let spec = argument.clone().unwrap_or_default();
                attacks.extend(spec.attacks.iter().cloned());
                let arg = self.spec_argument(&spec, psi, speaker, ArgType::Observe);
                out.created.push(self.create_argument(arg, spec.deps.clone(), &attacks)?);
            }
            Op::Hypothesize { gamma, deps, argument, .. } => {
                let Plan::Hypothesize { problem } = plan else { unreachable!("planned by precondition") };
                if !self.model.has_atom(gamma) {
                    let agents = self.model.agents().to_vec();
                    self.model = self.model.expand_awareness(&agents, Atom::new(gamma, AtomKind::Hypothesis))?;
                }
                let g = Formula::atom(gamma);
                self.model = self.model.upgrade_lexicographic(&g)?;
                let spec = argument.clone().unwrap_or_default();
                let arg = self.spec_argument(&spec, &g, speaker, ArgType::Hypothesize);
                let all_deps = deps.iter().chain(&spec.deps).cloned();
                out.created.push(self.create_argument(arg, all_deps, &spec.attacks)?);
                let p = &mut self.abd_queue[problem];
                p.status = ProblemStatus::Closed;
                p.closed_by = Some(gamma.clone());
            }
            Op::Support { evidence, specific, argument, .. } => {
                let Plan::Target(target) = plan else { unreachable!("planned by precondition") };
                let claim = self.af.get(&target).expect("resolved").claim.clone();
                self.model = if *specific {
                    self.model.upgrade_lexicographic(&claim)?
                } else {
                    self.model.upgrade_conservative(&claim)?
                };
                if let Some(e) = evidence {
                    self.dep.extend(&target, [e.clone()]);
                }
                if let Some(spec) = argument {
                    let arg = self.spec_argument(spec, &claim, speaker, ArgType::Pro);
                    out.created.push(self.create_argument(arg, spec.deps.clone(), &spec.attacks)?);
                }
            }
            Op::Undermine { evidence, falsified_prediction, argument, .. } => {
                let Plan::Target(target) = plan else { unreachable!("planned by precondition") };
                let claim = self.af.get(&target).expect("resolved").claim.clone();
                let not_claim = Formula::not(claim);
                self.model = match falsified_prediction {
                    Some(pred) => self.model.announce(&Formula::not(pred.clone()))?,
                    None => self.model.upgrade_lexicographic(&not_claim)?,
                };
                let spec = argument.clone().unwrap_or_default();
                let arg = self.spec_argument(&spec, &not_claim, speaker, ArgType::Con);
                let deps = evidence.iter().chain(&spec.deps).cloned();
                let mut attacks = vec![target.clone()];
                attacks.extend(spec.attacks.iter().cloned());
                out.created.push(self.create_argument(arg, deps, &attacks)?);
                if self.af.get(&target).expect("resolved").status == ArgStatus::Active {
                    self.set_status(&target, ArgStatus::Weakened)?;
                }
            }
            Op::Revise { evidence, .. } => {
                let Plan::Target(target) = plan else { unreachable!("planned by precondition") };
                let claim = self.af.get(&target).expect("resolved").claim.clone();
                let revised = self.model.announce(&Formula::not(claim.clone()))?;
                if revised.is_inconsistent() {
                    out.warnings.push(format!("T{turn}: !¬{claim} would leave no world; model unchanged"));
                } else {
                    self.model = revised;
                }
                if let Some(e) = evidence {
                    let attacker = self.resolve_ref(e).expect("checked").id.clone();
                    self.af.add_attack(&attacker, &target)?;
                }
                if self.af.get(&target).expect("resolved").status == ArgStatus::Active {
                    self.set_status(&target, ArgStatus::Weakened)?;
                }
                self.set_status(&target, ArgStatus::Abandoned)?;
            }
            Op::ExpandAwareness { atom, kind, label, agents } => {
                let agents = agents.clone().unwrap_or_else(|| self.model.agents().to_vec());
                let atom = Atom::new(atom, *kind).with_label(label.clone());
                self.model = self.model.expand_awareness(&agents, atom)?;
            }
            Op::Resolve { gamma, subsumes, mode, dissenters, argument } => {
                let Plan::Resolve { existing } = plan else { unreachable!("planned by precondition") };
                let mut decided = vec![];
                match mode {
                    ResolveMode::Consensual => {
                        self.model = self.model.announce(gamma)?;
                        if let Some(alpha) = &existing {
                            decided.push(alpha.clone());
                        }
                        if existing.is_none() || argument.is_some() {
                            let spec = argument.clone().unwrap_or_default();
                            let arg = self.spec_argument(&spec, gamma, speaker, ArgType::Resolve);
                            let id = self.create_argument(arg, spec.deps.clone(), &spec.attacks)?;
                            out.created.push(id.clone());
                            decided.push(id);
                        }
                    }
                    ResolveMode::Authoritative => {
                        let spec = argument.clone().unwrap_or_default();
                        let arg = self.spec_argument(&spec, gamma, speaker, ArgType::Resolve);
                        let id = self.create_argument(arg, spec.deps.clone(), &spec.attacks)?;
                        self.dissent.insert(id.clone(), dissenters.iter().cloned().collect());
                        out.created.push(id.clone());
                        decided.push(id);
                    }
                }
                for id in decided {
                    self.set_status(&id, ArgStatus::Resolved)?;
                }
                for s in subsumes {
                    let b = self.resolve_ref(s).expect("checked").id.clone();
                    let g = gamma.as_atom().expect("checked").to_string();
                    self.dep.extend(&b, [g]);
                    self.set_status(&b, ArgStatus::Resolved)?;
                }
            }
            Op::Question { chi } => self.enqueue(speaker, chi.clone(), turn),
        }
        Ok(())
    }
}

/// What a passed precondition resolved, so apply does not redo it.
#[derive(Debug)]
enum Plan {
    None,
    Target(ArgId),
    Hypothesize { problem: usize },
    Resolve { existing: Option<ArgId> },
}
