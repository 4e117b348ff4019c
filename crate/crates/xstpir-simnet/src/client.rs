//! The retrieval client: installs shares, runs sessions, decodes. Transport
//! comes from a connector closure, so socket mode and channel mode share one
//! code path and stay bit-identical.

use crate::transport::{TcpTransport, Transport};
use crate::wire::Frame;
use crate::SimError;
use std::time::Duration;
use xstpir::gf::FieldElement;
use xstpir::protocol::{
    decode, encode_storage, gen_queries, Answer, Database, Query, SeededNoise, StorageShare,
};
use xstpir::scheme::SchemeSpec;

pub type Connector<'a> = dyn Fn(usize) -> Result<Box<dyn Transport>, SimError> + Sync + 'a;

/// A TCP connector over an endpoint list (one `host:port` per server).
pub fn tcp_connector(
    endpoints: Vec<String>,
    timeout: Duration,
) -> impl Fn(usize) -> Result<Box<dyn Transport>, SimError> + Sync {
    move |n: usize| {
        let ep = endpoints
            .get(n)
            .ok_or_else(|| SimError::BadEndpoint(format!("no endpoint for server {n}")))?;
        Ok(Box::new(TcpTransport::connect(ep, timeout)?) as Box<dyn Transport>)
    }
}

fn expect_reply(transport: &mut dyn Transport, server: usize) -> Result<Frame, SimError> {
    match transport.recv()? {
        Some(Frame::Error { code, message }) => Err(SimError::ServerError {
            server,
            code,
            message,
        }),
        Some(f) => Ok(f),
        None => Err(SimError::Timeout(format!("server {server} closed early"))),
    }
}

fn handshake(
    transport: &mut dyn Transport,
    server: usize,
    digest: [u8; 32],
) -> Result<(), SimError> {
    transport.send(&Frame::SchemeDigest(digest))?;
    match expect_reply(transport, server)? {
        Frame::SchemeDigest(echo) if echo == digest => Ok(()),
        Frame::SchemeDigest(_) => Err(SimError::DigestMismatch(format!("server {server}"))),
        _ => Err(SimError::UnexpectedFrame(format!("server {server}"))),
    }
}

fn store_share(
    transport: &mut dyn Transport,
    scheme: &SchemeSpec,
    share: &StorageShare,
) -> Result<(), SimError> {
    let field = scheme.field();
    transport.send(&Frame::Store {
        server_index: share.server_index as u32,
        p: field.p(),
        m: field.m(),
        files: share.files() as u32,
        file_len: share.file_len() as u32,
        symbols: share.data().iter().map(|e| e.index()).collect(),
    })?;
    match expect_reply(transport, share.server_index)? {
        Frame::SchemeDigest(_) => Ok(()),
        _ => Err(SimError::UnexpectedFrame(format!(
            "server {} store ack",
            share.server_index
        ))),
    }
}

/// Sends one query, returns the raw answer symbol; field validation happens
/// at the caller, which holds the scheme.
fn query_one(transport: &mut dyn Transport, query: &Query) -> Result<u64, SimError> {
    let server = query.server_index;
    transport.send(&Frame::Query {
        server_index: server as u32,
        files: query.files() as u32,
        file_len: query.file_len() as u32,
        symbols: query.data().iter().map(|e| e.index()).collect(),
    })?;
    match expect_reply(transport, server)? {
        Frame::Answer {
            server_index,
            value,
        } => {
            if server_index as usize != server {
                return Err(SimError::UnexpectedFrame(format!(
                    "answer from {server_index} on session {server}"
                )));
            }
            Ok(value)
        }
        _ => Err(SimError::UnexpectedFrame(format!("server {server} answer"))),
    }
}

/// Encodes the database and installs one share per server.
pub fn install(
    connect: &Connector<'_>,
    scheme: &SchemeSpec,
    db: &Database,
    storage_seed: u64,
    digest: [u8; 32],
) -> Result<(), SimError> {
    let mut noise = SeededNoise::new(storage_seed);
    let shares = encode_storage(scheme, db, &mut noise)?;
    for share in &shares {
        let mut t = connect(share.server_index)?;
        handshake(t.as_mut(), share.server_index, digest)?;
        store_share(t.as_mut(), scheme, share)?;
    }
    Ok(())
}

/// One retrieval session: queries all `N` servers concurrently, joins the
/// answers, decodes. Bit-identical to the in-process pipeline for the same
/// seed.
pub fn retrieve(
    connect: &Connector<'_>,
    scheme: &SchemeSpec,
    theta: usize,
    files: usize,
    query_seed: u64,
    digest: [u8; 32],
) -> Result<Vec<FieldElement>, SimError> {
    let mut noise = SeededNoise::new(query_seed);
    let queries = gen_queries(scheme, theta, files, &mut noise)?;
    let n = scheme.n_servers();
    let mut raw: Vec<u64> = vec![0; n];
    std::thread::scope(|scope| -> Result<(), SimError> {
        let mut workers = Vec::with_capacity(n);
        for query in &queries {
            workers.push(scope.spawn(move || -> Result<u64, SimError> {
                let mut t = connect(query.server_index)?;
                handshake(t.as_mut(), query.server_index, digest)?;
                query_one(t.as_mut(), query)
            }));
        }
        for (i, worker) in workers.into_iter().enumerate() {
            raw[i] = worker.join().expect("query worker panicked")?;
        }
        Ok(())
    })?;
    let field = scheme.field();
    let answers: Vec<Answer> = raw
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            field
                .element(v)
                .map(|value| Answer {
                    server_index: i,
                    value,
                })
                .map_err(|e| SimError::UnexpectedFrame(format!("server {i}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(decode(scheme, &answers)?)
}
