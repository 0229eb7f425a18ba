use std::collections::{BTreeSet, HashMap};
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::Action;
use crate::interaction::{
    make_net, play, ActionJson, EngineError, Net, NetError, PlayState, TraceStep, Verdict,
    DEFAULT_FUEL,
};
use crate::locus::Locus;
use crate::scenarios;
use crate::syntax::{parse_source, SyntaxError};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("request must give exactly one of `file` and `scenario`")]
    NoSource,
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown design `{0}`")]
    UnknownDesign(String),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("sessions need a closed net (nothing visible)")]
    OpenNet,
    #[error("`{0}` is not a member of the net")]
    UnknownMember(String),
    #[error("no session `{0}`")]
    NotFound(String),
    #[error("the session is over")]
    Finished,
    #[error("move {0} is not legal here")]
    IllegalMove(Action),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("cannot write the session log: {0}")]
    Log(String),
}

impl ServiceError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::NoSource => "bad-request",
            ServiceError::UnknownScenario(_) => "unknown-scenario",
            ServiceError::Syntax(_) => "parse-error",
            ServiceError::UnknownDesign(_) => "unknown-design",
            ServiceError::Net(_) | ServiceError::OpenNet => "invalid-net",
            ServiceError::UnknownMember(_) => "unknown-member",
            ServiceError::NotFound(_) => "not-found",
            ServiceError::Finished => "not-human-turn",
            ServiceError::IllegalMove(_) => "illegal-move",
            ServiceError::Engine(_) => "engine-error",
            ServiceError::Log(_) => "internal",
        }
    }
}

/// Body of `POST /sessions`.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CreateSession {
    /// Source text in the design language.
    #[serde(default)]
    pub file: Option<String>,
    /// Name of a shipped scenario, instead of `file`.
    #[serde(default)]
    pub scenario: Option<String>,
    pub net: Vec<String>,
    /// Cut loci; inferred from the bases when absent.
    #[serde(default)]
    pub cuts: Option<Vec<String>>,
    pub human_side: String,
    #[serde(default)]
    pub auto_forced: bool,
    #[serde(default)]
    pub fuel: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Running,
    Converged,
    Diverged,
    OutOfFuel,
}

/// What a client sees of a session.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot {
    pub id: String,
    pub status: Status,
    pub human_side: String,
    pub members: Vec<String>,
    pub history: Vec<TraceStep>,
    pub trace_text: String,
    pub legal_moves: Vec<Action>,
    pub verdict: Option<Verdict>,
    /// Human moves applied so far, forced ones included.
    pub moves: Vec<Action>,
}

pub struct Session {
    id: String,
    net: Net,
    human: usize,
    fuel: usize,
    auto_forced: bool,
    /// Moves sent by the client, in order.
    moves: Vec<Action>,
    snapshot: Snapshot,
}

impl Session {
    pub fn create(id: String, req: &CreateSession) -> Result<Session, ServiceError> {
        let text = match (&req.file, &req.scenario) {
            (Some(t), None) => t.clone(),
            (None, Some(name)) => scenarios::get(name)
                .ok_or_else(|| ServiceError::UnknownScenario(name.clone()))?
                .to_string(),
            _ => return Err(ServiceError::NoSource),
        };
        let src = parse_source(&text)?;
        let designs = req
            .net
            .iter()
            .map(|n| {
                src.design(n)
                    .cloned()
                    .ok_or_else(|| ServiceError::UnknownDesign(n.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let cuts: BTreeSet<Locus> = match &req.cuts {
            Some(c) => c.iter().map(|t| src.locus(t)).collect::<Result<_, _>>()?,
            None => designs
                .iter()
                .filter_map(|d| d.base.handle.clone())
                .filter(|h| designs.iter().any(|e| e.base.tines.contains(h)))
                .collect(),
        };
        let net = make_net(designs, cuts, &src.library)?;
        if !net.is_closed() {
            return Err(ServiceError::OpenNet);
        }
        let human = net
            .member_index(&req.human_side)
            .ok_or_else(|| ServiceError::UnknownMember(req.human_side.clone()))?;
        let mut session = Session {
            snapshot: empty_snapshot(&id, &net, human),
            id,
            net,
            human,
            fuel: req.fuel.unwrap_or(DEFAULT_FUEL),
            auto_forced: req.auto_forced,
            moves: Vec::new(),
        };
        session.snapshot = session.replay(&[])?;
        Ok(session)
    }

    pub fn snapshot(&self) -> &Snapshot {
        &self.snapshot
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Legal moves, or an error when the session is over.
    pub fn legal_moves(&self) -> Result<&[Action], ServiceError> {
        match self.snapshot.status {
            Status::Running => Ok(&self.snapshot.legal_moves),
            _ => Err(ServiceError::Finished),
        }
    }

    /// Applies one move; the state is unchanged when the move is rejected.
    pub fn play_move(&mut self, action: Action) -> Result<&Snapshot, ServiceError> {
        if !self.legal_moves()?.contains(&action) {
            return Err(ServiceError::IllegalMove(action));
        }
        let mut moves = self.moves.clone();
        moves.push(action);
        self.snapshot = self.replay(&moves)?;
        self.moves = moves;
        Ok(&self.snapshot)
    }

    fn replay(&self, moves: &[Action]) -> Result<Snapshot, ServiceError> {
        let p = play(&self.net, self.fuel, self.human, moves, self.auto_forced)?;
        let mut snap = empty_snapshot(&self.id, &self.net, self.human);
        snap.history = p.steps;
        snap.moves = p.played;
        for (k, s) in snap.history.iter().enumerate() {
            snap.trace_text
                .push_str(&format!("STEP {}: {} {}\n", k + 1, s.member, s.action));
        }
        match p.state {
            PlayState::Awaiting { legal } => {
                snap.status = Status::Running;
                snap.legal_moves = legal;
            }
            PlayState::Finished { verdict } => {
                snap.status = match verdict {
                    Verdict::Converged { .. } => Status::Converged,
                    Verdict::Diverged { .. } => Status::Diverged,
                    Verdict::OutOfFuel { .. } => Status::OutOfFuel,
                };
                snap.trace_text.push_str(&format!("VERDICT: {verdict}\n"));
                snap.verdict = Some(verdict);
            }
        }
        Ok(snap)
    }
}

fn empty_snapshot(id: &str, net: &Net, human: usize) -> Snapshot {
    Snapshot {
        id: id.to_string(),
        status: Status::Running,
        human_side: net.members()[human].name.clone(),
        members: net.members().iter().map(|d| d.name.clone()).collect(),
        history: Vec::new(),
        trace_text: String::new(),
        legal_moves: Vec::new(),
        verdict: None,
        moves: Vec::new(),
    }
}

#[derive(Serialize)]
struct LogLine<'a> {
    session: &'a str,
    moves: Vec<ActionJson>,
    verdict: Option<String>,
}

/// All live sessions. Each session has its own lock, so moves on one
/// session are serialized while other sessions proceed.
#[derive(Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    log: Option<Mutex<PathBuf>>,
}

impl SessionStore {
    pub fn new() -> Self {
        SessionStore::default()
    }

    /// Appends one JSON line per session event to `path`.
    pub fn with_log(path: PathBuf) -> Self {
        SessionStore {
            sessions: RwLock::default(),
            log: Some(Mutex::new(path)),
        }
    }

    pub fn create(&self, req: &CreateSession) -> Result<Snapshot, ServiceError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Session::create(id.clone(), req)?;
        let snap = session.snapshot().clone();
        self.record(&session)?;
        self.sessions
            .write()
            .expect("session map poisoned")
            .insert(id, Arc::new(Mutex::new(session)));
        Ok(snap)
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(id.to_string()))
    }

    pub fn snapshot(&self, id: &str) -> Result<Snapshot, ServiceError> {
        let s = self.get(id)?;
        let s = s.lock().expect("session poisoned");
        Ok(s.snapshot().clone())
    }

    pub fn legal_moves(&self, id: &str) -> Result<Vec<Action>, ServiceError> {
        let s = self.get(id)?;
        let s = s.lock().expect("session poisoned");
        Ok(s.legal_moves()?.to_vec())
    }

    pub fn play_move(&self, id: &str, action: Action) -> Result<Snapshot, ServiceError> {
        let s = self.get(id)?;
        let mut s = s.lock().expect("session poisoned");
        let snap = s.play_move(action)?.clone();
        self.record(&s)?;
        Ok(snap)
    }

    fn record(&self, s: &Session) -> Result<(), ServiceError> {
        let Some(path) = &self.log else {
            return Ok(());
        };
        let path = path.lock().expect("log poisoned");
        let line = LogLine {
            session: s.id(),
            moves: s.moves.iter().map(ActionJson::from).collect(),
            verdict: s.snapshot.verdict.as_ref().map(|v| v.to_string()),
        };
        let text = serde_json::to_string(&line).map_err(|e| ServiceError::Log(e.to_string()))?;
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&*path)
            .map_err(|e| ServiceError::Log(e.to_string()))?;
        writeln!(f, "{text}").map_err(|e| ServiceError::Log(e.to_string()))
    }
}
