use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use argumentation::{literal, ArgType, Argument, RetractionReport};
use epistemic_core::{AtomKind, Formula};

use crate::structure::DependencyStructure;

/// Auto-named arguments read better under their claim.
fn label(arg: &Argument) -> String {
    if arg.id.contains("@T") {
        arg.claim.to_string()
    } else {
        arg.id.clone()
    }
}

/// Hypothesis atoms each agent believes at the evaluation world.
fn believed(d: &DependencyStructure) -> BTreeMap<String, BTreeSet<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let Ok(w) = d.eval_world() else { return out };
    for atom in d.registry().iter().filter(|a| a.kind == AtomKind::Hypothesis) {
        for agent in d.model.agents() {
            let b = Formula::believes(agent, Formula::atom(&atom.id));
            if d.model.eval(w, &b).unwrap_or(false) {
                out.entry(atom.id.clone()).or_default().insert(agent.clone());
            }
        }
    }
    out
}

fn join<'a>(items: impl IntoIterator<Item = &'a String>) -> String {
    items.into_iter().map(String::as_str).collect::<Vec<_>>().join(", ")
}

/// Templated account of what changed between two structures; empty when
/// nothing did.
pub fn render_summary(before: &DependencyStructure, after: &DependencyStructure) -> String {
    let mut lines: Vec<String> = vec![];
    if before.model.world_count() != after.model.world_count() {
        lines.push(format!("worlds: {} -> {}", before.model.world_count(), after.model.world_count()));
    }
    for atom in after.registry() {
        let newly: Vec<&String> = after
            .model
            .agents()
            .iter()
            .filter(|a| {
                let f = Formula::atom(&atom.id);
                after.model.is_aware(a, &f).unwrap_or(false) && !before.model.is_aware(a, &f).unwrap_or(false)
            })
            .collect();
        if !newly.is_empty() {
            lines.push(format!("{} now aware of {}", join(newly), atom.id));
        }
    }
    for arg in after.af.args() {
        match before.af.get(&arg.id) {
            None => lines.push(format!("{} now {} ({}, {})", label(arg), arg.status, arg.speaker, arg.id)),
            Some(old) if old.status != arg.status => {
                lines.push(format!("{} now {} (was {})", label(arg), arg.status, old.status))
            }
            Some(_) => {}
        }
        let old_deps = before.dep.get(&arg.id).cloned().unwrap_or_default();
        if before.af.contains(&arg.id) {
            let gained: Vec<&String> =
                after.dep.get(&arg.id).into_iter().flatten().filter(|d| !old_deps.contains(*d)).collect();
            if !gained.is_empty() {
                lines.push(format!("{} now also rests on {}", label(arg), join(gained)));
            }
        }
    }
    for (a, t) in after.af.attacks().difference(before.af.attacks()) {
        lines.push(format!("{a} attacks {t}"));
    }
    let (b0, b1) = (believed(before), believed(after));
    for (h, agents) in &b1 {
        if b0.get(h) != Some(agents) {
            lines.push(format!("{h} now leads for {}", join(agents)));
        }
    }
    for h in b0.keys().filter(|h| !b1.contains_key(*h)) {
        lines.push(format!("{h} no longer believed"));
    }
    let was_open: BTreeSet<(String, String)> =
        before.open_problems().map(|p| (p.agent.clone(), p.observation.to_string())).collect();
    let now_open: BTreeSet<(String, String)> =
        after.open_problems().map(|p| (p.agent.clone(), p.observation.to_string())).collect();
    for (agent, chi) in now_open.difference(&was_open) {
        lines.push(format!("open problem: {agent} asks why {chi}"));
    }
    for (agent, chi) in was_open.difference(&now_open) {
        lines.push(format!("closed problem: {agent} on {chi}"));
    }
    lines.join("\n")
}

/// One flag per argument the retraction removed, then the reinstatements.
pub fn render_retraction(report: &RetractionReport, before: &DependencyStructure) -> String {
    let mut out = String::new();
    let order: BTreeMap<&str, usize> =
        before.registry().iter().enumerate().map(|(i, a)| (a.id.as_str(), i)).collect();
    for id in &report.affected {
        let Some(arg) = before.af.get(id) else { continue };
        let noun = if arg.arg_type == ArgType::Resolve { "decision" } else { "argument" };
        let mut rest: Vec<&str> = before
            .dep
            .get(id)
            .into_iter()
            .flatten()
            .map(|e| literal(e))
            .filter(|(a, neg)| !neg && *a != report.retracted)
            .map(|(a, _)| a)
            .collect();
        rest.sort_by_key(|a| order.get(a).copied().unwrap_or(usize::MAX));
        let _ = write!(out, "{noun} {id} no longer grounded; affected by retraction of {}", report.retracted);
        if !rest.is_empty() {
            let _ = write!(out, "; depends on {}", rest.join(", "));
        }
        out.push('\n');
    }
    for id in report.reinstated() {
        let _ = writeln!(out, "{id} reinstated");
    }
    for id in report.flagged() {
        let _ = writeln!(out, "{id} no longer accepted");
    }
    out
}
