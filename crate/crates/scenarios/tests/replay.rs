use argumentation::ArgStatus;
use engine::{verify, DecisionStage, OpKind, Verdict};
use interpreter::{Interpreter, ScriptedInterpreter};
use scenarios::{design_review, incident, replay_gold, Scenario, ScenarioError};

#[test]
fn incident_replays_clean() {
    let s = incident();
    let r = replay_gold(&s).unwrap();
    assert!(r.report.passed(), "{}", r.report.to_json());
    assert_eq!(r.report.mismatch_count(), 0);
    assert_eq!(r.report.reprompts(), 0);
    assert_eq!(r.report.world_counts, [512, 32, 8, 2, 2, 4, 8, 4, 4, 2, 2, 16, 32, 16]);

    let d = r.final_state();
    let status = |id: &str| d.af.get(id).unwrap().status;
    assert_eq!(status("h1@T5"), ArgStatus::Resolved);
    assert_eq!(status("h2@T6"), ArgStatus::Abandoned);
    assert_eq!(status("h3@T11"), ArgStatus::Resolved);
    assert_eq!(status("h4@T12"), ArgStatus::Resolved);
}

#[test]
fn incident_counterfactual_decisions() {
    let r = replay_gold(&incident()).unwrap();
    assert_eq!(r.report.decision_score(), (12, 12));
    let o8 = &r.report.counterfactuals[0];
    assert_eq!(o8.retract, "o8");
    assert_eq!(o8.affected.iter().map(String::as_str).collect::<Vec<_>>(), ["h1@T5"]);
}

#[test]
fn first_incident_turn_is_three_observations_and_a_question() {
    let s = incident();
    let mut interp = ScriptedInterpreter::new(s.gold_turns());
    let d = s.initial_structure().unwrap();
    let t = &s.turns[0];
    let req = interpreter::ClassifyRequest {
        format: interpreter::WIRE_FORMAT,
        turn_id: t.id,
        speaker: t.speaker.clone(),
        utterance: t.text.clone(),
        context: interpreter::render_context(interpreter::PromptCondition::Minimal, &d),
        condition: interpreter::PromptCondition::Minimal,
        violation: None,
    };
    let kinds: Vec<OpKind> = interp.classify(&req).unwrap().operations.iter().map(|o| o.op.kind()).collect();
    assert_eq!(kinds, [OpKind::Observe, OpKind::Observe, OpKind::Observe, OpKind::Question]);
}

#[test]
fn abandoned_hypothesis_is_ungrounded_with_its_history() {
    let r = replay_gold(&incident()).unwrap();
    let d = r.state_at(13);
    let h2 = verify("h2", d).unwrap();
    assert_eq!(h2.verdict, Verdict::Ungrounded);
    assert_eq!(h2.decided_at, DecisionStage::Status);
    let e = h2.evidence.iter().find(|e| e.argument == "h2@T6").unwrap();
    assert_eq!((e.status, e.turn, e.status_since), (ArgStatus::Abandoned, 6, 9));

    let h4 = verify("h4", d).unwrap();
    assert!(h4.is_grounded());
    assert!(!h4.dep_chain.is_empty());
    // Before abandonment the claim was live.
    assert!(verify("h2", r.state_at(6)).unwrap().is_grounded());
}

#[test]
fn design_review_retraction_of_a3() {
    let s = design_review();
    let r = replay_gold(&s).unwrap();
    assert!(r.report.passed(), "{}", r.report.to_json());
    let a3 = &r.report.counterfactuals[0];
    let ids = |set: &std::collections::BTreeSet<String>| set.iter().cloned().collect::<Vec<_>>();
    assert_eq!(ids(&a3.affected), ["alpha16", "alpha18"]);
    assert_eq!(ids(&a3.reinstated), ["alpha15", "alpha17"]);
    assert_eq!(ids(&a3.no_longer_accepted), ["P5"]);
    assert!(a3.rendering.contains("decision alpha18 no longer grounded"));
    assert!(r.report.counterfactuals[1].affected.is_empty());
    // Bob is not committed to the decision he dissented from.
    let d = r.final_state();
    assert!(!d.cm.is_committed("b", "alpha18"));
    assert!(d.cm.is_committed("a", "alpha18"));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for s in [incident(), design_review()] {
        let a = replay_gold(&s).unwrap().report.to_json();
        let b = replay_gold(&s).unwrap().report.to_json();
        assert_eq!(a, b);
    }
}

#[test]
fn scenario_round_trips() {
    let s = design_review();
    assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
}

#[test]
fn scenario_without_expectations_passes() {
    let mut s = incident();
    s.initial.expected = None;
    for t in &mut s.turns {
        t.expected = None;
    }
    s.counterfactuals.clear();
    let r = replay_gold(&s).unwrap();
    assert!(r.report.passed());
    assert!(r.report.turns.iter().all(|t| t.applied));
}

#[test]
fn wrong_expectation_is_reported_not_fatal() {
    let mut s = incident();
    s.turns[0].expected.as_mut().unwrap().world_count = Some(31);
    let r = replay_gold(&s).unwrap();
    assert!(!r.report.passed());
    assert_eq!(r.report.mismatch_count(), 1);
    assert_eq!(r.report.turns[0].mismatches[0].field, "world_count");
}

fn edit(f: impl FnOnce(&mut serde_json::Value)) -> Result<Scenario, ScenarioError> {
    let mut v: serde_json::Value = serde_json::from_str(scenarios::INCIDENT_JSON).unwrap();
    f(&mut v);
    Scenario::from_json(&v.to_string())
}

fn path_of(e: ScenarioError) -> String {
    match e {
        ScenarioError::Validation { path, .. } => path,
        other => panic!("expected a validation error, got {other}"),
    }
}

#[test]
fn validation_errors_name_the_field() {
    assert_eq!(path_of(edit(|v| v["format"] = 2.into()).unwrap_err()), "format");
    assert_eq!(path_of(edit(|v| v["turns"][3]["id"] = 9.into()).unwrap_err()), "turns[3].id");
    assert_eq!(path_of(edit(|v| v["turns"][2]["speaker"] = "zed".into()).unwrap_err()), "turns[2].speaker");
    assert_eq!(
        path_of(edit(|v| v["counterfactuals"][0]["retract"] = "nope".into()).unwrap_err()),
        "counterfactuals[0].retract"
    );
    assert!(matches!(edit(|v| v["turns"][0]["colour"] = "red".into()), Err(ScenarioError::Parse(_))));
    assert!(matches!(Scenario::from_json("{"), Err(ScenarioError::Parse(_))));
}
