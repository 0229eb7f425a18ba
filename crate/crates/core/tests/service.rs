use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use ludics::scenarios;
use ludics::service::{router, CreateSession, SessionStore, Status};
use ludics::{make_net, normalize, parse_source, Locus};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(
    store: &Arc<SessionStore>,
    method: &str,
    uri: &str,
    body: Option<Value>,
) -> (StatusCode, String) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = router(store.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn json_call(
    store: &Arc<SessionStore>,
    method: &str,
    uri: &str,
    body: Option<Value>,
) -> (StatusCode, Value) {
    let (s, text) = call(store, method, uri, body).await;
    (
        s,
        serde_json::from_str(&text).unwrap_or_else(|_| panic!("not JSON: {text}")),
    )
}

fn golden() -> String {
    let f = parse_source(scenarios::PAPER_S25).unwrap();
    let net = make_net(
        vec![
            f.design("D").unwrap().clone(),
            f.design("E").unwrap().clone(),
        ],
        [Locus::new(vec![0])].into_iter().collect(),
        &f.library,
    )
    .unwrap();
    normalize(&net, 100).unwrap().to_text()
}

#[tokio::test]
async fn scripted_dialogue_reproduces_the_batch_trace() {
    let store = Arc::new(SessionStore::new());
    let body =
        json!({"scenario": "paper_s25.lud", "net": ["D", "E"], "cuts": ["xi"], "humanSide": "E"});
    let (s, snap) = json_call(&store, "POST", "/sessions", Some(body)).await;
    assert_eq!(s, StatusCode::CREATED, "{snap}");
    assert_eq!(snap["status"], "running");
    assert_eq!(snap["traceText"], "STEP 1: D + 0 {0}\n");
    let id = snap["id"].as_str().unwrap().to_string();

    let (s, moves) = json_call(&store, "GET", &format!("/sessions/{id}/moves"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(
        moves["legal"],
        json!([{"kind": "dai"}, {"kind": "pos", "focus": "0.0", "ramification": [2, 3]}])
    );

    // A move outside the palette is refused and changes nothing.
    let bad = json!({"action": {"kind": "pos", "focus": "0.0", "ramification": [9]}});
    let (s, err) = json_call(&store, "POST", &format!("/sessions/{id}/moves"), Some(bad)).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(err["code"], "illegal-move");
    assert!(err["message"].as_str().unwrap().contains("0.0"));
    let (_, again) = json_call(&store, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(again, snap);

    let mv = json!({"action": {"kind": "pos", "focus": "0.0", "ramification": [2, 3]}});
    let (s, snap) = json_call(&store, "POST", &format!("/sessions/{id}/moves"), Some(mv)).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(snap["legalMoves"], json!([{"kind": "dai"}]));
    let (s, snap) = json_call(
        &store,
        "POST",
        &format!("/sessions/{id}/moves"),
        Some(json!({"action": {"kind": "dai"}})),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(snap["status"], "converged");

    let (s, text) = call(&store, "GET", &format!("/sessions/{id}/trace"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(text, golden());

    let (s, err) = json_call(&store, "GET", &format!("/sessions/{id}/moves"), None).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(err["code"], "not-human-turn");
}

#[tokio::test]
async fn erased_locus_attack_diverges() {
    let store = Arc::new(SessionStore::new());
    let body =
        json!({"scenario": "many_questions.lud", "net": ["LOC1", "ATTACK"], "humanSide": "ATTACK"});
    let (s, snap) = json_call(&store, "POST", "/sessions", Some(body)).await;
    assert_eq!(s, StatusCode::CREATED, "{snap}");
    let id = snap["id"].as_str().unwrap();
    let mv = json!({"action": {"kind": "pos", "focus": "0.0", "ramification": [1, 2]}});
    let (_, snap) = json_call(&store, "POST", &format!("/sessions/{id}/moves"), Some(mv)).await;
    assert_eq!(snap["status"], "diverged");
    assert_eq!(snap["verdict"]["reason"]["kind"], "erased-locus");
    assert_eq!(snap["verdict"]["reason"]["locus"], "0.0.1");
    assert!(snap["traceText"]
        .as_str()
        .unwrap()
        .ends_with("VERDICT: diverged(0.0.1)\n"));
}

#[tokio::test]
async fn forced_moves_and_immediate_verdicts() {
    let store = Arc::new(SessionStore::new());
    let body = json!({"scenario": "bombe.lud", "net": ["BOMB", "NDAI"], "humanSide": "BOMB", "autoForced": true});
    let (_, snap) = json_call(&store, "POST", "/sessions", Some(body)).await;
    assert_eq!(snap["status"], "converged");
    assert_eq!(
        snap["moves"],
        json!([{"kind": "pos", "focus": "0", "ramification": []}])
    );

    let body = json!({"scenario": "bombe.lud", "net": ["DAI", "SCONSE"], "humanSide": "SCONSE"});
    let (_, snap) = json_call(&store, "POST", "/sessions", Some(body)).await;
    assert_eq!(snap["status"], "converged");
    assert_eq!(snap["traceText"], "STEP 1: DAI †\nVERDICT: converged\n");
}

#[tokio::test]
async fn errors_have_codes() {
    let store = Arc::new(SessionStore::new());
    let (s, e) = json_call(&store, "GET", "/sessions/nope", None).await;
    assert_eq!(
        (s, e["code"].as_str()),
        (StatusCode::NOT_FOUND, Some("not-found"))
    );
    let (s, e) = json_call(
        &store,
        "POST",
        "/sessions",
        Some(json!({"scenario": "bombe.lud", "net": ["BOMB", "NDAI"], "humanSide": "X"})),
    )
    .await;
    assert_eq!(
        (s, e["code"].as_str()),
        (StatusCode::UNPROCESSABLE_ENTITY, Some("unknown-member"))
    );
    let (_, e) = json_call(
        &store,
        "POST",
        "/sessions",
        Some(json!({"file": "design A : |- 0 = (+", "net": ["A"], "humanSide": "A"})),
    )
    .await;
    assert_eq!(e["code"], "parse-error");
    let (_, e) = json_call(
        &store,
        "POST",
        "/sessions",
        Some(json!({"scenario": "question_answer.lud", "net": ["Q", "R"], "humanSide": "R"})),
    )
    .await;
    assert_eq!(e["code"], "invalid-net");
    let (_, e) = json_call(
        &store,
        "POST",
        "/sessions",
        Some(json!({"scenario": "bombe.lud", "net": ["BOMB", "NOPE"], "humanSide": "BOMB"})),
    )
    .await;
    assert_eq!(e["code"], "unknown-design");
    let (s, _) = json_call(
        &store,
        "POST",
        "/sessions",
        Some(json!({"net": ["A"], "humanSide": "A"})),
    )
    .await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn scenarios_are_served() {
    let store = Arc::new(SessionStore::new());
    let (s, list) = json_call(&store, "GET", "/scenarios", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(list.as_array().unwrap().len(), scenarios::ALL.len());
    let (s, text) = call(&store, "GET", "/scenarios/ame.lud", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(text, scenarios::AME);
}

#[test]
fn replaying_recorded_moves_gives_the_same_session() {
    let store = SessionStore::new();
    let req = CreateSession {
        file: Some(scenarios::PAPER_S25.to_string()),
        scenario: None,
        net: vec!["D".into(), "E".into()],
        cuts: None,
        human_side: "E".into(),
        auto_forced: false,
        fuel: None,
    };
    let first = store.create(&req).unwrap();
    let mut snap = first.clone();
    while snap.status == Status::Running {
        let mv = snap.legal_moves.last().unwrap().clone();
        snap = store.play_move(&first.id, mv).unwrap();
    }
    let replay = store.create(&req).unwrap();
    let mut again = replay.clone();
    for mv in &snap.moves {
        again = store.play_move(&replay.id, mv.clone()).unwrap();
    }
    assert_eq!(again.history, snap.history);
    assert_eq!(again.verdict, snap.verdict);
    assert_eq!(again.trace_text, golden());
}

#[test]
fn sessions_are_logged_and_isolated() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sessions.jsonl");
    let store = Arc::new(SessionStore::with_log(path.clone()));
    let req = CreateSession {
        file: None,
        scenario: Some("paper_s25.lud".into()),
        net: vec!["D".into(), "E".into()],
        cuts: None,
        human_side: "E".into(),
        auto_forced: true,
        fuel: None,
    };
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let store = store.clone();
            let req = req.clone();
            std::thread::spawn(move || {
                let s = store.create(&req).unwrap();
                store.play_move(&s.id, ludics::Action::Daimon).unwrap()
            })
        })
        .collect();
    let finals: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    for f in &finals {
        assert_eq!(f.status, Status::Converged);
        assert_eq!(f.history, finals[0].history);
    }
    let log = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<Value> = log
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 16);
    for f in &finals {
        let last = lines
            .iter()
            .rev()
            .find(|l| l["session"] == f.id.as_str())
            .unwrap();
        assert_eq!(last["verdict"], "converged");
        assert_eq!(last["moves"].as_array().unwrap().len(), 1);
    }
}
