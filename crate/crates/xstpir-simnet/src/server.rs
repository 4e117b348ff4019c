//! The simulated server: a sequential actor holding at most one storage
//! share, answering queries over any [`Transport`]. Servers never see the
//! scheme matrices; a digest of the canonical scheme serialization guards
//! against client/server mismatch, and the STORE frame carries the field
//! description needed for arithmetic.
//!
//! Every server keeps a view log (installs, received queries, sent answers,
//! timestamps) that the collusion recorder extracts.

use crate::transport::{ChannelTransport, TcpTransport, Transport};
use crate::wire::{ErrorCode, Frame};
use crate::SimError;
use std::net::TcpListener;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, SystemTime};
use xstpir::gf::{FieldElement, FieldParams};
use xstpir::protocol::{server_answer, Query, StorageShare};

/// What one server has seen, in arrival order.
#[derive(Debug, Clone, Default)]
pub struct ServerLog {
    pub installs: Vec<(SystemTime, Vec<u64>)>,
    pub received_queries: Vec<(SystemTime, Vec<u64>)>,
    pub sent_answers: Vec<(SystemTime, u64)>,
}

/// Sequential server state machine; `handle` maps one request frame to one
/// response frame.
pub struct ServerState {
    index: u32,
    digest: [u8; 32],
    field: Option<FieldParams>,
    share: Option<StorageShare>,
    log: ServerLog,
}

impl ServerState {
    pub fn new(index: u32, digest: [u8; 32]) -> ServerState {
        ServerState {
            index,
            digest,
            field: None,
            share: None,
            log: ServerLog::default(),
        }
    }

    pub fn log(&self) -> &ServerLog {
        &self.log
    }

    pub fn handle(&mut self, frame: Frame) -> Frame {
        match frame {
            Frame::SchemeDigest(d) => {
                if d == self.digest {
                    Frame::SchemeDigest(self.digest)
                } else {
                    Frame::Error {
                        code: ErrorCode::DigestMismatch,
                        message: "scheme digest does not match".to_string(),
                    }
                }
            }
            Frame::Store {
                server_index,
                p,
                m,
                files,
                file_len,
                symbols,
            } => self.install(server_index, p, m, files, file_len, symbols),
            Frame::Query {
                server_index,
                files,
                file_len,
                symbols,
            } => self.answer(server_index, files, file_len, symbols),
            Frame::Answer { .. } => Frame::Error {
                code: ErrorCode::BadTag,
                message: "servers do not accept ANSWER frames".to_string(),
            },
            Frame::Error { .. } => Frame::Error {
                code: ErrorCode::BadTag,
                message: "servers do not accept ERROR frames".to_string(),
            },
        }
    }

    fn install(
        &mut self,
        server_index: u32,
        p: u64,
        m: u32,
        files: u32,
        file_len: u32,
        symbols: Vec<u64>,
    ) -> Frame {
        if server_index != self.index {
            return Frame::Error {
                code: ErrorCode::BadLength,
                message: format!("share for server {server_index} sent to {}", self.index),
            };
        }
        let field = match FieldParams::new(p, m) {
            Ok(f) => f,
            Err(e) => {
                return Frame::Error {
                    code: ErrorCode::BadLength,
                    message: format!("bad field description: {e}"),
                }
            }
        };
        let elems: Result<Vec<FieldElement>, _> =
            symbols.iter().map(|&s| field.element(s)).collect();
        let elems = match elems {
            Ok(v) => v,
            Err(e) => {
                return Frame::Error {
                    code: ErrorCode::BadLength,
                    message: format!("bad symbol: {e}"),
                }
            }
        };
        let share = match StorageShare::new(
            self.index as usize,
            files as usize,
            file_len as usize,
            elems,
        ) {
            Ok(s) => s,
            Err(e) => {
                return Frame::Error {
                    code: ErrorCode::BadLength,
                    message: e.to_string(),
                }
            }
        };
        self.log.installs.push((SystemTime::now(), symbols));
        self.field = Some(field);
        self.share = Some(share); // idempotent: a re-install replaces
        Frame::SchemeDigest(self.digest)
    }

    fn answer(&mut self, server_index: u32, files: u32, file_len: u32, symbols: Vec<u64>) -> Frame {
        let (Some(field), Some(share)) = (&self.field, &self.share) else {
            return Frame::Error {
                code: ErrorCode::NoShareInstalled,
                message: "QUERY before STORE".to_string(),
            };
        };
        if server_index != self.index {
            return Frame::Error {
                code: ErrorCode::BadLength,
                message: format!("query for server {server_index} sent to {}", self.index),
            };
        }
        let elems: Result<Vec<FieldElement>, _> =
            symbols.iter().map(|&s| field.element(s)).collect();
        let elems = match elems {
            Ok(v) => v,
            Err(e) => {
                return Frame::Error {
                    code: ErrorCode::BadLength,
                    message: format!("bad symbol: {e}"),
                }
            }
        };
        let query = match Query::new(
            self.index as usize,
            files as usize,
            file_len as usize,
            elems,
        ) {
            Ok(q) => q,
            Err(e) => {
                return Frame::Error {
                    code: ErrorCode::BadLength,
                    message: e.to_string(),
                }
            }
        };
        self.log.received_queries.push((SystemTime::now(), symbols));
        match server_answer(share, &query, field) {
            Ok(a) => {
                self.log
                    .sent_answers
                    .push((SystemTime::now(), a.value.index()));
                Frame::Answer {
                    server_index: self.index,
                    value: a.value.index(),
                }
            }
            Err(e) => Frame::Error {
                code: ErrorCode::BadLength,
                message: e.to_string(),
            },
        }
    }
}

/// Serves one connection to completion: one request, one response, repeated
/// sequentially until the peer closes.
pub fn run_connection(
    transport: &mut dyn Transport,
    state: &Arc<Mutex<ServerState>>,
) -> Result<(), SimError> {
    loop {
        let frame = match transport.recv() {
            Ok(Some(f)) => f,
            Ok(None) => return Ok(()),
            // a malformed frame gets a wire-level ERROR reply, then the
            // connection ends (framing is unreliable after a codec error)
            Err(SimError::Wire(e)) => {
                let code = match e {
                    crate::wire::WireError::BadTag(_) => ErrorCode::BadTag,
                    _ => ErrorCode::BadLength,
                };
                let _ = transport.send(&Frame::Error {
                    code,
                    message: e.to_string(),
                });
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        let response = state.lock().expect("server state lock").handle(frame);
        transport.send(&response)?;
    }
}

/// A running server plus the shared state handle the collusion recorder
/// reads.
pub struct ServerHandle {
    pub index: u32,
    pub state: Arc<Mutex<ServerState>>,
    stop: Arc<AtomicBool>,
    join: Option<std::thread::JoinHandle<()>>,
    /// TCP mode only.
    pub endpoint: Option<String>,
}

impl ServerHandle {
    pub fn shutdown(mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(j) = self.join.take() {
            let _ = j.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(j) = self.join.take() {
            let _ = j.join();
        }
    }
}

/// Binds a TCP server on `bind_addr` (use port 0 for an ephemeral port) and
/// serves connections sequentially until shutdown.
pub fn serve_tcp(bind_addr: &str, index: u32, digest: [u8; 32]) -> Result<ServerHandle, SimError> {
    let listener = TcpListener::bind(bind_addr)?;
    let endpoint = listener.local_addr()?.to_string();
    listener.set_nonblocking(true)?;
    let state = Arc::new(Mutex::new(ServerState::new(index, digest)));
    let stop = Arc::new(AtomicBool::new(false));
    let state2 = Arc::clone(&state);
    let stop2 = Arc::clone(&stop);
    let join = std::thread::spawn(move || {
        while !stop2.load(Ordering::SeqCst) {
            match listener.accept() {
                Ok((stream, _)) => {
                    stream.set_nonblocking(false).expect("blocking stream");
                    let mut transport = TcpTransport::from_stream(stream, Duration::from_secs(10));
                    let _ = run_connection(&mut transport, &state2);
                }
                Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                    std::thread::sleep(Duration::from_millis(2));
                }
                Err(_) => break,
            }
        }
    });
    Ok(ServerHandle {
        index,
        state,
        stop,
        join: Some(join),
        endpoint: Some(endpoint),
    })
}

/// An in-process cluster: one sequential server actor per index, reachable
/// through fresh channel sessions. Runs without sockets.
pub struct ChannelCluster {
    handles: Vec<ServerHandle>,
    session_timeout: Duration,
}

impl ChannelCluster {
    pub fn start(n: usize, digest: [u8; 32], session_timeout: Duration) -> ChannelCluster {
        let handles = (0..n)
            .map(|i| {
                let state = Arc::new(Mutex::new(ServerState::new(i as u32, digest)));
                ServerHandle {
                    index: i as u32,
                    state,
                    stop: Arc::new(AtomicBool::new(false)),
                    join: None,
                    endpoint: None,
                }
            })
            .collect();
        ChannelCluster {
            handles,
            session_timeout,
        }
    }

    pub fn len(&self) -> usize {
        self.handles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.handles.is_empty()
    }

    pub fn handles(&self) -> &[ServerHandle] {
        &self.handles
    }

    /// Opens a session to server `n`; a thread serves it until the client
    /// end drops.
    pub fn connect(&self, n: usize) -> Result<Box<dyn Transport>, SimError> {
        let handle = self
            .handles
            .get(n)
            .ok_or_else(|| SimError::BadEndpoint(format!("server {n}")))?;
        let (client_end, mut server_end) =
            ChannelTransport::pair(&format!("channel:{n}"), self.session_timeout);
        let state = Arc::clone(&handle.state);
        std::thread::spawn(move || {
            let _ = run_connection(&mut server_end, &state);
        });
        Ok(Box::new(client_end))
    }
}
