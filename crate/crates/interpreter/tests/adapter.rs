use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::mpsc;
use std::thread;

use engine::{DependencyStructure, Op, OpKind, TurnOperation};
use epistemic_core::{Atom, AtomKind, CellSpec, EpistemicModel, Formula};
use interpreter::*;

/// Serves `replies` in order, one per connection, and forwards each
/// request body.
fn stub(replies: Vec<String>) -> (String, mpsc::Receiver<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/classify", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for reply in replies {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0usize;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
            }
            let mut body = vec![0u8; len];
            reader.read_exact(&mut body).unwrap();
            tx.send(String::from_utf8(body).unwrap()).unwrap();
            let resp = format!(
                "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                reply.len(),
                reply
            );
            stream.write_all(resp.as_bytes()).unwrap();
        }
    });
    (url, rx)
}

fn structure() -> DependencyStructure {
    let registry = vec![Atom::new("o1", AtomKind::Observable)];
    let model = EpistemicModel::new(registry, vec!["a".into(), "b".into()], &CellSpec::Public).unwrap();
    DependencyStructure::new(model)
}

fn utterance(text: &str) -> Utterance {
    Utterance { turn_id: 1, speaker: "a".into(), text: text.into(), simultaneous: false }
}

fn request() -> ClassifyRequest {
    ClassifyRequest {
        format: WIRE_FORMAT,
        turn_id: 1,
        speaker: "a".into(),
        utterance: "the build is red".into(),
        context: String::new(),
        condition: PromptCondition::Minimal,
        violation: None,
    }
}

const OBSERVE_FRESH: &str = r#"{"operations":[{"op":"observe","psi":"p"}]}"#;
const EXPAND_P: &str = r#"{"operations":[{"op":"expand_awareness","atom":"p","kind":"observable"}]}"#;

#[test]
fn scripted_returns_gold_and_ignores_text() {
    let gold = ClassifiedTurn {
        turn_id: 1,
        operations: vec![TurnOperation::new("a", Op::Question { chi: Formula::atom("o1") })],
        simultaneous: false,
        raw_response: None,
    };
    let mut s = ScriptedInterpreter::new([gold.clone()]);
    let mut req = request();
    assert_eq!(s.classify(&req).unwrap(), gold);
    req.utterance = "something else entirely".into();
    assert_eq!(s.classify(&req).unwrap(), gold);
    req.turn_id = 2;
    assert_eq!(s.classify(&req), Err(InterpreterError::GoldLabelMissing(2)));
}

#[test]
fn empty_gold_list_is_missing() {
    let mut s = ScriptedInterpreter::new([]);
    assert_eq!(s.classify(&request()), Err(InterpreterError::GoldLabelMissing(1)));
}

#[test]
fn external_parses_stub_payload() {
    let payload = r#"{"operations":[{"op":"observe","psi":"o1"},{"op":"question","chi":"o1","speaker":"b"}]}"#;
    let (url, rx) = stub(vec![payload.into()]);
    let mut ext = ExternalInterpreter::new(&InterpreterConfig::external(url)).unwrap();
    let turn = ext.classify(&request()).unwrap();
    let wire: WireResponse = serde_json::from_str(payload).unwrap();
    assert_eq!(turn, wire.into_turn(1, "a", Some(payload.into())).unwrap());
    assert_eq!(turn.operations[0].speaker, "a");
    assert_eq!(turn.operations[1].speaker, "b");
    let sent: ClassifyRequest = serde_json::from_str(&rx.recv().unwrap()).unwrap();
    assert_eq!(sent, request());
}

#[test]
fn reprompt_recovers_with_expand_awareness() {
    let (url, rx) = stub(vec![OBSERVE_FRESH.into(), EXPAND_P.into()]);
    let config = InterpreterConfig::external(url);
    let mut ext = ExternalInterpreter::new(&config).unwrap();
    let d = structure();
    let out = reprompt_loop(&mut ext, &utterance("what about p?"), &d, &config).unwrap();
    assert_eq!(out.attempts, 2);
    assert_eq!(out.violations.len(), 1);
    assert_eq!(out.violations[0].suggested, Some(OpKind::ExpandAwareness));
    assert!(out.structure.registry().iter().any(|a| a.id == "p"));
    let first: ClassifyRequest = serde_json::from_str(&rx.recv().unwrap()).unwrap();
    let second: ClassifyRequest = serde_json::from_str(&rx.recv().unwrap()).unwrap();
    assert!(first.violation.is_none());
    assert_eq!(second.violation.as_ref().map(|v| v.name.as_str()), Some(out.violations[0].name.as_str()));
}

#[test]
fn budget_exhaustion_leaves_structure_alone() {
    let (url, _rx) = stub(vec![OBSERVE_FRESH.into(); 3]);
    let config = InterpreterConfig { max_reprompts: 2, ..InterpreterConfig::external(url) };
    let mut ext = ExternalInterpreter::new(&config).unwrap();
    let d = structure();
    let before = d.clone();
    match reprompt_loop(&mut ext, &utterance("p"), &d, &config) {
        Err(InterpreterError::RepromptBudgetExhausted { attempts, .. }) => assert_eq!(attempts, 3),
        other => panic!("expected budget exhaustion, got {other:?}"),
    }
    assert_eq!(d, before);
}

#[test]
fn garbage_and_silence() {
    let (url, _rx) = stub(vec!["not json".into(), r#"{"operations":[]}"#.into()]);
    let mut ext = ExternalInterpreter::new(&InterpreterConfig::external(url)).unwrap();
    assert!(matches!(ext.classify(&request()), Err(InterpreterError::UnparseableResponse(_))));
    assert!(matches!(ext.classify(&request()), Err(InterpreterError::UnparseableResponse(_))));

    // Bind then drop to get a port with nobody listening.
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut dead = ExternalInterpreter::new(&InterpreterConfig::external(format!("http://127.0.0.1:{port}/"))).unwrap();
    assert!(matches!(dead.classify(&request()), Err(InterpreterError::AdapterUnreachable(_))));
}

#[test]
fn config_validation() {
    assert!(InterpreterConfig::default().validate().is_ok());
    let no_endpoint = InterpreterConfig { mode: InterpreterMode::External, ..InterpreterConfig::default() };
    assert!(matches!(no_endpoint.validate(), Err(InterpreterError::InvalidConfig(_))));
    assert!(InterpreterConfig::external("ftp://x").validate().is_err());
    let cfg: InterpreterConfig =
        serde_json::from_str(r#"{"mode":"external","endpoint":"http://localhost:9/","max_reprompts":5}"#).unwrap();
    assert_eq!(cfg.max_reprompts, 5);
    assert_eq!(cfg.prompt_condition, PromptCondition::Minimal);
}

#[test]
fn context_by_condition() {
    let d = structure();
    let gold = ClassifiedTurn {
        turn_id: 1,
        operations: vec![TurnOperation::new("a", Op::Observe { psi: Formula::atom("o1"), argument: None })],
        simultaneous: false,
        raw_response: None,
    };
    let config = InterpreterConfig::default();
    let mut s = ScriptedInterpreter::new([gold]);
    let d1 = reprompt_loop(&mut s, &utterance("o1 holds"), &d, &config).unwrap().structure;
    assert_eq!(render_context(PromptCondition::Minimal, &d1), "");
    assert_eq!(render_context(PromptCondition::Definitions, &d1), OPERATION_DEFINITIONS);
    let rich = render_context(PromptCondition::StateAugmented, &d1);
    assert!(rich.starts_with(OPERATION_DEFINITIONS));
    assert!(rich.contains("o1 now active"), "{rich}");
}
