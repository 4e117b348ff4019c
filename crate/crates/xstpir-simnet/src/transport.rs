//! One transport interface, two implementations: TCP sockets and in-process
//! byte channels. Both move the exact encoded frame bytes, so channel mode
//! exercises the same codec as socket mode.

use crate::wire::{read_frame, write_frame, Frame, WireError};
use crate::SimError;
use std::io::Read;
use std::net::TcpStream;
use std::sync::mpsc::{Receiver, RecvTimeoutError, Sender};
use std::time::Duration;

pub trait Transport: Send {
    fn send(&mut self, frame: &Frame) -> Result<(), SimError>;
    /// Receives the next frame; `Ok(None)` when the peer closed cleanly.
    fn recv(&mut self) -> Result<Option<Frame>, SimError>;
}

pub struct TcpTransport {
    peer: String,
    stream: TcpStream,
}

impl TcpTransport {
    /// Connects with a timeout; both connect failure and a later read
    /// timeout surface as [`SimError::Timeout`] naming the endpoint.
    pub fn connect(endpoint: &str, timeout: Duration) -> Result<TcpTransport, SimError> {
        let addr = endpoint
            .parse()
            .map_err(|_| SimError::BadEndpoint(endpoint.to_string()))?;
        let stream = TcpStream::connect_timeout(&addr, timeout)
            .map_err(|_| SimError::Timeout(endpoint.to_string()))?;
        stream
            .set_read_timeout(Some(timeout))
            .expect("nonzero timeout");
        Ok(TcpTransport {
            peer: endpoint.to_string(),
            stream,
        })
    }

    pub fn from_stream(stream: TcpStream, timeout: Duration) -> TcpTransport {
        let peer = stream
            .peer_addr()
            .map(|a| a.to_string())
            .unwrap_or_else(|_| "<unknown>".to_string());
        stream
            .set_read_timeout(Some(timeout))
            .expect("nonzero timeout");
        TcpTransport { peer, stream }
    }
}

impl Transport for TcpTransport {
    fn send(&mut self, frame: &Frame) -> Result<(), SimError> {
        write_frame(&mut self.stream, frame).map_err(SimError::from)
    }

    fn recv(&mut self) -> Result<Option<Frame>, SimError> {
        match read_frame(&mut self.stream) {
            Ok(f) => Ok(f),
            Err(WireError::Io(e))
                if e.kind() == std::io::ErrorKind::WouldBlock
                    || e.kind() == std::io::ErrorKind::TimedOut =>
            {
                Err(SimError::Timeout(self.peer.clone()))
            }
            Err(e) => Err(e.into()),
        }
    }
}

/// In-process transport carrying encoded frame bytes over mpsc channels.
pub struct ChannelTransport {
    peer: String,
    tx: Sender<Vec<u8>>,
    rx: Receiver<Vec<u8>>,
    timeout: Duration,
}

impl ChannelTransport {
    /// A connected pair (client end, server end).
    pub fn pair(peer: &str, timeout: Duration) -> (ChannelTransport, ChannelTransport) {
        let (atx, brx) = std::sync::mpsc::channel();
        let (btx, arx) = std::sync::mpsc::channel();
        (
            ChannelTransport {
                peer: peer.to_string(),
                tx: atx,
                rx: arx,
                timeout,
            },
            ChannelTransport {
                peer: peer.to_string(),
                tx: btx,
                rx: brx,
                timeout,
            },
        )
    }
}

impl Transport for ChannelTransport {
    fn send(&mut self, frame: &Frame) -> Result<(), SimError> {
        // a dropped peer at send time reads as a closed connection
        self.tx
            .send(frame.to_bytes())
            .map_err(|_| SimError::Timeout(self.peer.clone()))
    }

    fn recv(&mut self) -> Result<Option<Frame>, SimError> {
        match self.rx.recv_timeout(self.timeout) {
            Ok(bytes) => {
                let mut cursor = std::io::Cursor::new(bytes);
                match read_frame(&mut cursor)? {
                    Some(f) => {
                        let mut rest = Vec::new();
                        cursor.read_to_end(&mut rest).expect("cursor read");
                        if !rest.is_empty() {
                            return Err(WireError::BadLength(
                                "multiple frames in one channel message".into(),
                            )
                            .into());
                        }
                        Ok(Some(f))
                    }
                    None => Err(WireError::BadLength("empty channel message".into()).into()),
                }
            }
            Err(RecvTimeoutError::Timeout) => Err(SimError::Timeout(self.peer.clone())),
            Err(RecvTimeoutError::Disconnected) => Ok(None),
        }
    }
}
