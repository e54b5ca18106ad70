use std::net::{SocketAddr, TcpStream};
use std::path::Path;
use std::time::Duration;

use negacq_core::analysis::{corpus, relation_counts, utterance_metrics};
use negacq_core::io::{find_session_dirs, load_lexicon, load_session};
use negacq_core::teacher::negation_lexicon;
use negacq_core::{BehaviorId, FacialExpression, MatchFeatureSpec, ObjectId, Scenario};
use negacq_service::{ClientMessage, ErrorCode, PushState, Server, ServerMessage, ServiceConfig, WordInput};
use tungstenite::stream::MaybeTlsStream;
use tungstenite::{Message, WebSocket};

type Ws = WebSocket<MaybeTlsStream<TcpStream>>;

fn serve(out: &Path, speed: f64) -> SocketAddr {
    let server = Server::bind(
        "127.0.0.1:0",
        ServiceConfig {
            out_dir: out.to_path_buf(),
            speed,
            ..ServiceConfig::default()
        },
    )
    .unwrap();
    let addr = server.local_addr().unwrap();
    std::thread::spawn(move || server.run());
    addr
}

fn connect(addr: SocketAddr) -> Ws {
    let (ws, _) = tungstenite::connect(format!("ws://{addr}")).unwrap();
    if let MaybeTlsStream::Plain(s) = ws.get_ref() {
        s.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
    }
    ws
}

fn send(ws: &mut Ws, m: &ClientMessage) {
    ws.send(Message::text(serde_json::to_string(m).unwrap())).unwrap();
}

fn recv(ws: &mut Ws) -> ServerMessage {
    loop {
        match ws.read().expect("server message") {
            Message::Text(t) => return serde_json::from_str(t.as_str()).unwrap(),
            Message::Close(_) => panic!("closed"),
            _ => {}
        }
    }
}

fn start(ws: &mut Ws, scenario: Scenario, index: u8) -> Vec<ObjectId> {
    send(
        ws,
        &ClientMessage::StartSession {
            scenario,
            session_index: index,
            participant: "P42".into(),
            forbidden: None,
        },
    );
    loop {
        if let ServerMessage::SessionStarted { forbidden, .. } = recv(ws) {
            return forbidden;
        }
    }
}

fn say(ws: &mut Ws, text: &str, emphasized: usize) {
    send(
        ws,
        &ClientMessage::Utterance {
            words: text.split(' ').map(WordInput::text).collect(),
            neg_type: None,
            emphasized_index: Some(emphasized),
        },
    );
}

/// Reads until a state message satisfies `f`; returns its tick.
fn wait_state(ws: &mut Ws, f: impl Fn(&negacq_service::RobotState) -> bool) -> u64 {
    loop {
        if let ServerMessage::State(s) = recv(ws) {
            if f(&s) {
                return s.tick;
            }
        }
    }
}

fn end(ws: &mut Ws) -> String {
    send(ws, &ClientMessage::EndSession);
    loop {
        if let ServerMessage::SessionEnd { dir, .. } = recv(ws) {
            return dir;
        }
    }
}

#[test]
fn second_client_is_refused_and_malformed_input_is_survivable() {
    let out = tempfile::tempdir().unwrap();
    let addr = serve(out.path(), 1.0);
    let mut a = connect(addr);
    let mut b = connect(addr);
    match recv(&mut b) {
        ServerMessage::Error { code, .. } => assert_eq!(code, ErrorCode::Busy),
        other => panic!("{other:?}"),
    }
    a.send(Message::text("{not json")).unwrap();
    match recv(&mut a) {
        ServerMessage::Error { code, .. } => assert_eq!(code, ErrorCode::Malformed),
        other => panic!("{other:?}"),
    }
    send(&mut a, &ClientMessage::Withdraw);
    match recv(&mut a) {
        ServerMessage::Error { code, .. } => assert_eq!(code, ErrorCode::NoSession),
        other => panic!("{other:?}"),
    }
    start(&mut a, Scenario::Rejection, 1);
    let dir = end(&mut a);
    assert!(load_session(Path::new(&dir)).unwrap().transcript.is_empty());
    drop(a);
    std::thread::sleep(Duration::from_millis(100));
    let mut c = connect(addr);
    start(&mut c, Scenario::Rejection, 2);
}

#[test]
fn push_during_reach_frowns_within_two_ticks() {
    let out = tempfile::tempdir().unwrap();
    let addr = serve(out.path(), 1.0);
    let mut ws = connect(addr);
    start(&mut ws, Scenario::Rejection, 1);
    send(&mut ws, &ClientMessage::Present { object: ObjectId::Triangle });
    let seen = wait_state(&mut ws, |s| s.behavior == BehaviorId::Reaching);
    send(&mut ws, &ClientMessage::Push { state: PushState::Start });
    let frown = wait_state(&mut ws, |s| s.face == FacialExpression::Frown);
    assert!(frown <= seen + 2, "reaching seen at {seen}, frown at {frown}");
    end(&mut ws);
}

/// A scripted teacher over the wire: one minute per session, two sessions,
/// then the produced logs go through the batch analyses.
#[test]
fn scripted_minute_sessions_feed_the_analyses() {
    let out = tempfile::tempdir().unwrap();
    let addr = serve(out.path(), 15.0);
    let mut ws = connect(addr);
    for index in 1..=2u8 {
        let forbidden = start(&mut ws, Scenario::Prohibition, index);
        let mut objects = ObjectId::ALL.to_vec();
        objects.rotate_left(usize::from(index));
        let mut last_tick = 0;
        for (k, o) in objects.iter().cycle().enumerate() {
            if last_tick >= 1700 {
                break;
            }
            send(&mut ws, &ClientMessage::Present { object: *o });
            say(&mut ws, &format!("look at the {o}"), 3);
            let t0 = wait_state(&mut ws, |_| true);
            if forbidden.contains(o) {
                let t = wait_state(&mut ws, |s| s.behavior == BehaviorId::Reaching || s.tick > t0 + 240);
                send(&mut ws, &ClientMessage::Push { state: PushState::Start });
                say(&mut ws, "no you can't", 0);
                wait_state(&mut ws, |s| s.tick > t + 45);
                send(&mut ws, &ClientMessage::Push { state: PushState::End });
            } else if k % 2 == 0 {
                say(&mut ws, "no don't", 0);
            }
            last_tick = wait_state(&mut ws, |s| s.tick > t0 + 150);
            send(&mut ws, &ClientMessage::Withdraw);
            last_tick = last_tick.max(wait_state(&mut ws, |s| s.tick > last_tick + 20));
        }
        end(&mut ws);
    }

    let neg = negation_lexicon();
    let dirs = find_session_dirs(out.path()).unwrap();
    assert_eq!(dirs.len(), 2);
    for d in &dirs {
        let log = load_session(d).unwrap();
        assert!(log.body_memory.len() >= 1700);
        assert!(log.body_memory.windows(2).all(|w| w[1].tick == w[0].tick + 1));
        let m = utterance_metrics(log.teacher_utterances(), log.body_memory.len() as f64 / 30.0, &neg);
        assert!(m.u >= 10 && m.nu > 0);
        assert_eq!(corpus(&log.transcript, true, &neg).iter().map(|e| e.count).sum::<usize>(), m.u);
        let rel = relation_counts(&log.transcript, &log.pushes).unwrap();
        assert_eq!(rel.len(), 9);
        assert!(!log.pushes.is_empty());
    }
    let lex = load_lexicon(&out.path().join("P42").join("lexicon_after_session_2.jsonl"), "P42", &MatchFeatureSpec::default()).unwrap();
    assert!(lex.words().contains("no"));
}
