//! WebSocket transport. One I/O thread per connection and a single tick-loop
//! thread that owns the [`Engine`]; they talk over channels.

use std::io::ErrorKind;
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use negacq_core::smm::TICK_HZ;
use tungstenite::{Message, WebSocket};

use crate::live::{Engine, ServiceConfig};
use crate::protocol::{parse_client, ClientMessage, ErrorCode, ServerMessage};

const POLL: Duration = Duration::from_millis(2);

enum Event {
    Connected(u64, Sender<ServerMessage>),
    Message(u64, ClientMessage),
    Disconnected(u64),
}

pub struct Server {
    listener: TcpListener,
    engine: Engine,
}

impl Server {
    pub fn bind(addr: impl std::net::ToSocketAddrs, cfg: ServiceConfig) -> Result<Server, crate::Error> {
        let engine = Engine::new(cfg)?;
        let listener = TcpListener::bind(addr)?;
        Ok(Server { listener, engine })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Serves clients until the process exits.
    pub fn run(self) -> Result<(), crate::Error> {
        let (tx, rx) = mpsc::channel();
        let busy = Arc::new(AtomicBool::new(false));
        let speed = self.engine.config().speed;
        let engine = self.engine;
        thread::Builder::new()
            .name("tick-loop".into())
            .spawn(move || tick_loop(engine, rx, speed))?;
        let mut next_id = 0;
        for stream in self.listener.incoming() {
            let Ok(stream) = stream else { continue };
            next_id += 1;
            let (tx, busy) = (tx.clone(), busy.clone());
            let id = next_id;
            thread::spawn(move || connection(id, stream, tx, busy));
        }
        Ok(())
    }
}

fn connection(id: u64, stream: TcpStream, events: Sender<Event>, busy: Arc<AtomicBool>) {
    let _ = stream.set_nodelay(true);
    let Ok(mut ws) = tungstenite::accept(stream) else {
        return;
    };
    if busy.swap(true, Ordering::SeqCst) {
        let _ = ws.send(Message::text(ServerMessage::error(ErrorCode::Busy, "another client is connected").to_json()));
        let _ = ws.close(None);
        let _ = ws.flush();
        return;
    }
    let (out_tx, out_rx) = mpsc::channel();
    if events.send(Event::Connected(id, out_tx)).is_ok() {
        let _ = ws.get_ref().set_read_timeout(Some(POLL));
        pump(id, &mut ws, &events, &out_rx);
    }
    let _ = events.send(Event::Disconnected(id));
    busy.store(false, Ordering::SeqCst);
}

/// Moves frames between the socket and the tick loop until either side closes.
fn pump(id: u64, ws: &mut WebSocket<TcpStream>, events: &Sender<Event>, out: &Receiver<ServerMessage>) {
    loop {
        match ws.read() {
            Ok(Message::Text(t)) => match parse_client(t.as_str()) {
                Ok(m) => {
                    if events.send(Event::Message(id, m)).is_err() {
                        return;
                    }
                }
                Err(e) => {
                    let _ = ws.send(Message::text(e.to_json()));
                }
            },
            Ok(Message::Binary(_)) => {
                let _ = ws.send(Message::text(ServerMessage::error(ErrorCode::Malformed, "binary frames are not accepted").to_json()));
            }
            Ok(Message::Close(_)) => {
                let _ = ws.flush();
                return;
            }
            Ok(_) => {}
            Err(tungstenite::Error::Io(e)) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => {}
            Err(_) => return,
        }
        loop {
            match out.try_recv() {
                Ok(m) => match ws.write(Message::text(m.to_json())) {
                    Ok(()) => {}
                    Err(tungstenite::Error::Io(e)) if e.kind() == ErrorKind::WouldBlock => {}
                    Err(_) => return,
                },
                Err(mpsc::TryRecvError::Empty) => break,
                Err(mpsc::TryRecvError::Disconnected) => return,
            }
        }
        match ws.flush() {
            Ok(()) => {}
            Err(tungstenite::Error::Io(e)) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => {}
            Err(_) => return,
        }
    }
}

/// Owns the engine. While a session runs, tick n is due at t0 + n / (30 * speed).
fn tick_loop(mut engine: Engine, events: Receiver<Event>, speed: f64) {
    let period = Duration::from_secs_f64(1.0 / (TICK_HZ * speed));
    let mut client: Option<(u64, Sender<ServerMessage>)> = None;
    let mut clock: Option<(Instant, u32)> = None;
    loop {
        let event = match clock {
            Some((t0, n)) => {
                let due = t0 + period * n;
                match events.recv_timeout(due.saturating_duration_since(Instant::now())) {
                    Ok(e) => Some(e),
                    Err(RecvTimeoutError::Timeout) => None,
                    Err(RecvTimeoutError::Disconnected) => return,
                }
            }
            None => match events.recv() {
                Ok(e) => Some(e),
                Err(_) => return,
            },
        };
        let mut replies = vec![];
        match event {
            Some(Event::Connected(id, tx)) => client = Some((id, tx)),
            Some(Event::Disconnected(id)) => {
                if client.as_ref().is_some_and(|c| c.0 == id) {
                    client = None;
                    if engine.in_session() {
                        engine.end();
                    }
                }
            }
            Some(Event::Message(id, m)) => {
                if client.as_ref().is_some_and(|c| c.0 == id) {
                    replies = engine.handle(m);
                }
            }
            None => {
                if let Some((_, n)) = clock.as_mut() {
                    *n += 1;
                }
                replies = engine.tick();
            }
        }
        clock = match (engine.in_session(), clock) {
            (true, None) => Some((Instant::now(), 1)),
            (true, c) => c,
            (false, _) => None,
        };
        if let Some((_, tx)) = &client {
            for r in replies {
                let _ = tx.send(r);
            }
        }
    }
}
