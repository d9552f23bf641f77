//! Plain-TCP transport: one connection is one session, one JSON object per
//! line in each direction.

use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use crate::sim::SimError;

use super::service::{ServiceState, SessionHandler};
use super::wire::{self, Envelope, ErrorBody, ErrorCode, Message};

/// Refuse lines longer than this (canonical messages are small).
const MAX_LINE_BYTES: usize = 1 << 20;

pub struct Server {
    addr: SocketAddr,
    shutdown: Arc<AtomicBool>,
    accept_thread: Option<JoinHandle<()>>,
    clock_thread: Option<JoinHandle<()>>,
    clock_error: Arc<Mutex<Option<SimError>>>,
}

impl Server {
    /// Bind and start serving. With `slot_duration` set, a clock thread
    /// advances the engine one slot per period (wall-clock accelerated time);
    /// without it the caller steps the engine itself.
    pub fn start(
        state: Arc<ServiceState>,
        addr: &str,
        slot_duration: Option<Duration>,
    ) -> std::io::Result<Self> {
        let listener = TcpListener::bind(addr)?;
        listener.set_nonblocking(true)?;
        let local = listener.local_addr()?;
        let shutdown = Arc::new(AtomicBool::new(false));

        let accept_state = Arc::clone(&state);
        let accept_shutdown = Arc::clone(&shutdown);
        let accept_thread = thread::spawn(move || {
            while !accept_shutdown.load(Ordering::SeqCst) {
                match listener.accept() {
                    Ok((stream, _)) => {
                        let conn_state = Arc::clone(&accept_state);
                        thread::spawn(move || serve_connection(conn_state, stream));
                    }
                    Err(e) if e.kind() == ErrorKind::WouldBlock => {
                        thread::sleep(Duration::from_millis(10));
                    }
                    Err(_) => break,
                }
            }
        });

        let clock_error = Arc::new(Mutex::new(None));
        let clock_thread = slot_duration.map(|period| {
            let clock_state = Arc::clone(&state);
            let clock_shutdown = Arc::clone(&shutdown);
            let error_slot = Arc::clone(&clock_error);
            thread::spawn(move || {
                while !clock_shutdown.load(Ordering::SeqCst) {
                    thread::sleep(period);
                    if clock_shutdown.load(Ordering::SeqCst) {
                        break;
                    }
                    let result = clock_state.sim.lock().unwrap().step_slot();
                    if let Err(e) = result {
                        *error_slot.lock().unwrap() = Some(e);
                        break;
                    }
                }
            })
        });

        Ok(Self {
            addr: local,
            shutdown,
            accept_thread: Some(accept_thread),
            clock_thread,
            clock_error,
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// A fatal engine error stopped the clock, if any.
    pub fn clock_error(&self) -> Option<SimError> {
        self.clock_error.lock().unwrap().clone()
    }

    /// Stop accepting and advancing; existing connections end when their
    /// clients disconnect.
    pub fn shutdown(mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        if let Some(t) = self.accept_thread.take() {
            let _ = t.join();
        }
        if let Some(t) = self.clock_thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
    }
}

fn serve_connection(state: Arc<ServiceState>, stream: TcpStream) {
    let mut handler = SessionHandler::new(state);
    let mut writer = match stream.try_clone() {
        Ok(w) => w,
        Err(_) => return,
    };
    let mut reader = BufReader::new(stream);
    let mut line = String::new();
    loop {
        line.clear();
        match reader.read_line(&mut line) {
            Ok(0) => return,
            Ok(_) => {
                if line.trim().is_empty() {
                    continue;
                }
                let response = if line.len() > MAX_LINE_BYTES {
                    Envelope::new(
                        0,
                        Message::Error(ErrorBody {
                            code: ErrorCode::BadMessage,
                            detail: "line too long".to_string(),
                        }),
                    )
                } else {
                    match wire::decode(&line) {
                        Ok(envelope) => handler.handle(envelope),
                        Err(e) => Envelope::new(
                            0,
                            Message::Error(ErrorBody {
                                code: ErrorCode::BadMessage,
                                detail: e.to_string(),
                            }),
                        ),
                    }
                };
                let encoded = match wire::encode(&response) {
                    Ok(s) => s,
                    Err(_) => return,
                };
                if writer
                    .write_all(encoded.as_bytes())
                    .and_then(|_| writer.write_all(b"\n"))
                    .and_then(|_| writer.flush())
                    .is_err()
                {
                    return;
                }
            }
            Err(_) => return,
        }
    }
}

/// Blocking line-oriented client, used by tests and tooling.
pub struct Client {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    next_seq: u64,
}

impl Client {
    pub fn connect(addr: &SocketAddr) -> std::io::Result<Self> {
        let stream = TcpStream::connect(addr)?;
        let writer = stream.try_clone()?;
        Ok(Self {
            reader: BufReader::new(stream),
            writer,
            next_seq: 1,
        })
    }

    /// Send one message and wait for the matching response line.
    pub fn roundtrip(&mut self, msg: Message) -> std::io::Result<Envelope> {
        let seq = self.next_seq;
        self.next_seq += 1;
        let env = Envelope::new(seq, msg);
        let line = wire::encode(&env)
            .map_err(|e| std::io::Error::new(ErrorKind::InvalidData, e.to_string()))?;
        self.writer.write_all(line.as_bytes())?;
        self.writer.write_all(b"\n")?;
        self.writer.flush()?;
        let mut response = String::new();
        self.reader.read_line(&mut response)?;
        wire::decode(&response)
            .map_err(|e| std::io::Error::new(ErrorKind::InvalidData, e.to_string()))
    }
}
