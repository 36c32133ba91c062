//! Turning utterances into engine operations.
//!
//! [`ScriptedInterpreter`] replays gold labels by turn id and ignores the
//! text. [`ExternalInterpreter`] posts a versioned JSON request to an HTTP
//! endpoint; see [`ClassifyRequest`] and [`WireResponse`] for the wire
//! format. [`reprompt_loop`] drives either one against the engine.

use std::collections::BTreeMap;
use std::time::Duration;

use engine::{render_summary, DependencyStructure, EngineError, Op, TurnOperation, TurnOutcome, Violation};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Version of the adapter request/response schema.
pub const WIRE_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedTurn {
    pub turn_id: u32,
    pub operations: Vec<TurnOperation>,
    /// All operations are evaluated against the turn-start model.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub simultaneous: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_response: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpreterMode {
    #[default]
    Scripted,
    External,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptCondition {
    #[default]
    Minimal,
    Definitions,
    StateAugmented,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpreterConfig {
    #[serde(default)]
    pub mode: InterpreterMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub prompt_condition: PromptCondition,
    #[serde(default = "default_reprompts")]
    pub max_reprompts: u32,
    #[serde(default = "default_timeout")]
    pub timeout_ms: u64,
}

fn default_reprompts() -> u32 {
    2
}

fn default_timeout() -> u64 {
    30_000
}

impl Default for InterpreterConfig {
    fn default() -> Self {
        InterpreterConfig {
            mode: InterpreterMode::Scripted,
            endpoint: None,
            prompt_condition: PromptCondition::Minimal,
            max_reprompts: default_reprompts(),
            timeout_ms: default_timeout(),
        }
    }
}

impl InterpreterConfig {
    pub fn external(endpoint: impl Into<String>) -> Self {
        InterpreterConfig { mode: InterpreterMode::External, endpoint: Some(endpoint.into()), ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), InterpreterError> {
        match (self.mode, &self.endpoint) {
            (InterpreterMode::External, None) => {
                Err(InterpreterError::InvalidConfig("external mode needs an endpoint".into()))
            }
            (InterpreterMode::External, Some(url)) if !url.starts_with("http://") && !url.starts_with("https://") => {
                Err(InterpreterError::InvalidConfig(format!("endpoint `{url}` is not an http(s) URL")))
            }
            _ if self.timeout_ms == 0 => Err(InterpreterError::InvalidConfig("timeout_ms must be positive".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpreterError {
    #[error("invalid interpreter config: {0}")]
    InvalidConfig(String),
    #[error("no gold label for turn {0}")]
    GoldLabelMissing(u32),
    #[error("adapter unreachable: {0}")]
    AdapterUnreachable(String),
    #[error("unparseable adapter response: {0}")]
    UnparseableResponse(String),
    #[error("turn {turn}: gave up after {attempts} attempts, last violation {last}")]
    RepromptBudgetExhausted { turn: u32, attempts: u32, last: Violation },
    #[error(transparent)]
    Engine(EngineError),
}

/// The adapter request body. Also what scripted classifiers receive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyRequest {
    pub format: u32,
    pub turn_id: u32,
    pub speaker: String,
    pub utterance: String,
    pub context: String,
    pub condition: PromptCondition,
    /// The precondition the previous attempt failed, on re-prompts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

/// One operation on the wire; the speaker defaults to the turn's speaker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireOp {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speaker: Option<String>,
    #[serde(flatten)]
    pub op: Op,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireResponse {
    pub operations: Vec<WireOp>,
    #[serde(default)]
    pub simultaneous: bool,
}

impl WireResponse {
    pub fn into_turn(self, turn_id: u32, speaker: &str, raw: Option<String>) -> Result<ClassifiedTurn, InterpreterError> {
        if self.operations.is_empty() {
            return Err(InterpreterError::UnparseableResponse("empty operation list".into()));
        }
        let operations = self
            .operations
            .into_iter()
            .map(|w| TurnOperation::new(w.speaker.unwrap_or_else(|| speaker.to_string()), w.op))
            .collect();
        Ok(ClassifiedTurn { turn_id, operations, simultaneous: self.simultaneous, raw_response: raw })
    }
}

pub trait Interpreter {
    fn classify(&mut self, req: &ClassifyRequest) -> Result<ClassifiedTurn, InterpreterError>;
}

/// Gold labels keyed by turn id. Re-prompts get the same answer.
#[derive(Debug, Clone, Default)]
pub struct ScriptedInterpreter {
    gold: BTreeMap<u32, ClassifiedTurn>,
}

impl ScriptedInterpreter {
    pub fn new(turns: impl IntoIterator<Item = ClassifiedTurn>) -> Self {
        ScriptedInterpreter { gold: turns.into_iter().map(|t| (t.turn_id, t)).collect() }
    }
}

impl Interpreter for ScriptedInterpreter {
    fn classify(&mut self, req: &ClassifyRequest) -> Result<ClassifiedTurn, InterpreterError> {
        match self.gold.get(&req.turn_id) {
            Some(t) if !t.operations.is_empty() => Ok(t.clone()),
            _ => Err(InterpreterError::GoldLabelMissing(req.turn_id)),
        }
    }
}

/// Blocking HTTP adapter: POST [`ClassifyRequest`], expect [`WireResponse`].
pub struct ExternalInterpreter {
    endpoint: String,
    agent: ureq::Agent,
}

impl ExternalInterpreter {
    pub fn new(config: &InterpreterConfig) -> Result<Self, InterpreterError> {
        config.validate()?;
        let endpoint =
            config.endpoint.clone().ok_or_else(|| InterpreterError::InvalidConfig("no endpoint".into()))?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(ExternalInterpreter { endpoint, agent })
    }
}

impl Interpreter for ExternalInterpreter {
    fn classify(&mut self, req: &ClassifyRequest) -> Result<ClassifiedTurn, InterpreterError> {
        let mut resp = self
            .agent
            .post(&self.endpoint)
            .send_json(req)
            .map_err(|e| InterpreterError::AdapterUnreachable(e.to_string()))?;
        let status = resp.status();
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| InterpreterError::AdapterUnreachable(e.to_string()))?;
        if !status.is_success() {
            return Err(InterpreterError::AdapterUnreachable(format!("HTTP {status}")));
        }
        let parsed: WireResponse =
            serde_json::from_str(&body).map_err(|e| InterpreterError::UnparseableResponse(e.to_string()))?;
        parsed.into_turn(req.turn_id, &req.speaker, Some(body))
    }
}

/// Builds the configured interpreter; scripted mode needs the gold turns.
pub fn build_interpreter(
    config: &InterpreterConfig,
    gold: impl IntoIterator<Item = ClassifiedTurn>,
) -> Result<Box<dyn Interpreter>, InterpreterError> {
    config.validate()?;
    Ok(match config.mode {
        InterpreterMode::Scripted => Box::new(ScriptedInterpreter::new(gold)),
        InterpreterMode::External => Box::new(ExternalInterpreter::new(config)?),
    })
}

pub const OPERATION_DEFINITIONS: &str = "\
Observe(psi): a public, truthful announcement; removes worlds where psi fails.
Hypothesize(gamma): proposes an explanation for an open surprising observation.
Support(gamma, e): evidence raising the plausibility of gamma.
Undermine(gamma, e): evidence against gamma; gamma must not be currently believed otherwise.
Revise(gamma): abandons gamma after counter-evidence.
ExpandAwareness(p): introduces a proposition nobody had considered; use it, not Observe, for new atoms.
Resolve(gamma): settles the question, consensually or by authority.
Question(chi): asks about chi and opens an abductive problem.";

/// Prompt context for `condition`. The state-augmented view is the full
/// summary of `d` against an empty framework over the same model.
pub fn render_context(condition: PromptCondition, d: &DependencyStructure) -> String {
    match condition {
        PromptCondition::Minimal => String::new(),
        PromptCondition::Definitions => OPERATION_DEFINITIONS.to_string(),
        PromptCondition::StateAugmented => {
            let mut empty = DependencyStructure::new(d.model.clone());
            empty.turn = d.turn;
            empty.actual_world = d.actual_world;
            empty.ground_truth = d.ground_truth.clone();
            let state = render_summary(&empty, d);
            format!("{OPERATION_DEFINITIONS}\n\nCurrent state (turn {}):\n{state}", d.turn)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    pub turn_id: u32,
    pub speaker: String,
    pub text: String,
    pub simultaneous: bool,
}

#[derive(Debug, Clone)]
pub struct LoopResult {
    pub structure: DependencyStructure,
    pub turn: ClassifiedTurn,
    pub outcome: TurnOutcome,
    /// Classification calls made, including the successful one.
    pub attempts: u32,
    pub violations: Vec<Violation>,
}

/// classify → apply; on a precondition violation, re-classify with the
/// violation attached, up to `max_reprompts` extra attempts. `d` is never
/// modified; the caller adopts `structure` on success.
pub fn reprompt_loop(
    interp: &mut dyn Interpreter,
    utt: &Utterance,
    d: &DependencyStructure,
    config: &InterpreterConfig,
) -> Result<LoopResult, InterpreterError> {
    let mut req = ClassifyRequest {
        format: WIRE_FORMAT,
        turn_id: utt.turn_id,
        speaker: utt.speaker.clone(),
        utterance: utt.text.clone(),
        context: render_context(config.prompt_condition, d),
        condition: config.prompt_condition,
        violation: None,
    };
    let mut violations = vec![];
    for attempt in 1..=config.max_reprompts + 1 {
        let turn = interp.classify(&req)?;
        if turn.operations.is_empty() {
            return Err(InterpreterError::UnparseableResponse("empty operation list".into()));
        }
        match d.apply_turn(&turn.operations, turn.simultaneous || utt.simultaneous) {
            Ok((structure, outcome)) => {
                return Ok(LoopResult { structure, turn, outcome, attempts: attempt, violations });
            }
            Err(EngineError::Precondition(v)) => {
                req.violation = Some(v.clone());
                violations.push(v);
            }
            Err(e) => return Err(InterpreterError::Engine(e)),
        }
    }
    Err(InterpreterError::RepromptBudgetExhausted {
        turn: utt.turn_id,
        attempts: config.max_reprompts + 1,
        last: violations.pop().expect("at least one attempt"),
    })
}
