//! Multi-server simulation of the retrieval protocol: `N` server endpoints
//! holding shares, a client running sessions over a framed wire protocol
//! (TCP or in-process channels behind one transport interface), and a
//! collusion recorder capturing coalition views.

pub mod client;
pub mod collusion;
pub mod server;
pub mod transport;
pub mod wire;

use sha2::{Digest, Sha256};
use thiserror::Error;
use xstpir::scheme::SchemeSpec;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("timeout or unreachable: {0}")]
    Timeout(String),
    #[error("bad endpoint: {0}")]
    BadEndpoint(String),
    #[error("scheme digest mismatch at {0}")]
    DigestMismatch(String),
    #[error("unexpected frame ({0})")]
    UnexpectedFrame(String),
    #[error("server {server} reported {code:?}: {message}")]
    ServerError {
        server: usize,
        code: wire::ErrorCode,
        message: String,
    },
    #[error(transparent)]
    Wire(#[from] wire::WireError),
    #[error(transparent)]
    Protocol(#[from] xstpir::protocol::ProtocolError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// 32-byte SHA-256 digest of the canonical scheme serialization. The scheme
/// file header names this algorithm.
pub fn scheme_digest(scheme: &SchemeSpec) -> [u8; 32] {
    digest_bytes(&scheme.to_bytes())
}

pub fn digest_bytes(bytes: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().into()
}
