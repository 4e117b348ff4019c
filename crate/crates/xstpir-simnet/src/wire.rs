//! The framed wire protocol. Every frame is `length (u32 LE) | tag (byte) |
//! payload`, with `length = payload size + 1`. All multi-byte integers are
//! little-endian; field elements travel as their u64 indices.
//!
//! Tags: 0x01 STORE, 0x02 QUERY, 0x03 ANSWER, 0x04 SCHEME_DIGEST, 0x05 ERROR.

use std::io::{Read, Write};
use thiserror::Error;

/// Upper bound on accepted frame payloads; desk-scale schemes stay far below.
const MAX_PAYLOAD: u32 = 1 << 26;

pub const TAG_STORE: u8 = 0x01;
pub const TAG_QUERY: u8 = 0x02;
pub const TAG_ANSWER: u8 = 0x03;
pub const TAG_SCHEME_DIGEST: u8 = 0x04;
pub const TAG_ERROR: u8 = 0x05;

#[derive(Debug, Error)]
pub enum WireError {
    #[error("bad tag 0x{0:02x}")]
    BadTag(u8),
    #[error("bad length: {0}")]
    BadLength(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Error codes carried by ERROR frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    BadTag = 1,
    BadLength = 2,
    DigestMismatch = 3,
    NoShareInstalled = 4,
}

impl ErrorCode {
    fn from_byte(b: u8) -> Option<ErrorCode> {
        match b {
            1 => Some(ErrorCode::BadTag),
            2 => Some(ErrorCode::BadLength),
            3 => Some(ErrorCode::DigestMismatch),
            4 => Some(ErrorCode::NoShareInstalled),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frame {
    /// Install a storage share. Carries the field description `(p, m)` so the
    /// server can do arithmetic without ever seeing the scheme matrices.
    Store {
        server_index: u32,
        p: u64,
        m: u32,
        files: u32,
        file_len: u32,
        symbols: Vec<u64>,
    },
    Query {
        server_index: u32,
        files: u32,
        file_len: u32,
        symbols: Vec<u64>,
    },
    Answer {
        server_index: u32,
        value: u64,
    },
    /// Compatibility handshake: client sends its digest of the canonical
    /// scheme serialization, the server echoes its own on match.
    SchemeDigest([u8; 32]),
    Error {
        code: ErrorCode,
        message: String,
    },
}

impl Frame {
    pub fn tag(&self) -> u8 {
        match self {
            Frame::Store { .. } => TAG_STORE,
            Frame::Query { .. } => TAG_QUERY,
            Frame::Answer { .. } => TAG_ANSWER,
            Frame::SchemeDigest(_) => TAG_SCHEME_DIGEST,
            Frame::Error { .. } => TAG_ERROR,
        }
    }

    fn payload(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match self {
            Frame::Store {
                server_index,
                p,
                m,
                files,
                file_len,
                symbols,
            } => {
                out.extend_from_slice(&server_index.to_le_bytes());
                out.extend_from_slice(&p.to_le_bytes());
                out.extend_from_slice(&m.to_le_bytes());
                out.extend_from_slice(&files.to_le_bytes());
                out.extend_from_slice(&file_len.to_le_bytes());
                for s in symbols {
                    out.extend_from_slice(&s.to_le_bytes());
                }
            }
            Frame::Query {
                server_index,
                files,
                file_len,
                symbols,
            } => {
                out.extend_from_slice(&server_index.to_le_bytes());
                out.extend_from_slice(&files.to_le_bytes());
                out.extend_from_slice(&file_len.to_le_bytes());
                for s in symbols {
                    out.extend_from_slice(&s.to_le_bytes());
                }
            }
            Frame::Answer {
                server_index,
                value,
            } => {
                out.extend_from_slice(&server_index.to_le_bytes());
                out.extend_from_slice(&value.to_le_bytes());
            }
            Frame::SchemeDigest(d) => out.extend_from_slice(d),
            Frame::Error { code, message } => {
                out.push(*code as u8);
                out.extend_from_slice(message.as_bytes());
            }
        }
        out
    }

    /// Full frame bytes including the length prefix.
    pub fn to_bytes(&self) -> Vec<u8> {
        let payload = self.payload();
        let mut out = Vec::with_capacity(5 + payload.len());
        out.extend_from_slice(&(payload.len() as u32 + 1).to_le_bytes());
        out.push(self.tag());
        out.extend_from_slice(&payload);
        out
    }

    fn parse(tag: u8, payload: &[u8]) -> Result<Frame, WireError> {
        let mut r = SliceReader {
            buf: payload,
            pos: 0,
        };
        let frame = match tag {
            TAG_STORE => {
                let server_index = r.u32()?;
                let p = r.u64()?;
                let m = r.u32()?;
                let files = r.u32()?;
                let file_len = r.u32()?;
                let symbols = r.rest_u64s()?;
                if symbols.len() as u64 != files as u64 * file_len as u64 {
                    return Err(WireError::BadLength(format!(
                        "store carries {} symbols for a {}x{} share",
                        symbols.len(),
                        files,
                        file_len
                    )));
                }
                Frame::Store {
                    server_index,
                    p,
                    m,
                    files,
                    file_len,
                    symbols,
                }
            }
            TAG_QUERY => {
                let server_index = r.u32()?;
                let files = r.u32()?;
                let file_len = r.u32()?;
                let symbols = r.rest_u64s()?;
                if symbols.len() as u64 != files as u64 * file_len as u64 {
                    return Err(WireError::BadLength(format!(
                        "query carries {} symbols for a {}x{} matrix",
                        symbols.len(),
                        files,
                        file_len
                    )));
                }
                Frame::Query {
                    server_index,
                    files,
                    file_len,
                    symbols,
                }
            }
            TAG_ANSWER => Frame::Answer {
                server_index: r.u32()?,
                value: r.u64()?,
            },
            TAG_SCHEME_DIGEST => {
                let bytes = r.take(32)?;
                let mut d = [0u8; 32];
                d.copy_from_slice(bytes);
                Frame::SchemeDigest(d)
            }
            TAG_ERROR => {
                let code = ErrorCode::from_byte(r.u8()?)
                    .ok_or_else(|| WireError::BadLength("unknown error code".into()))?;
                let message = String::from_utf8_lossy(r.rest()).into_owned();
                return Ok(Frame::Error { code, message });
            }
            other => return Err(WireError::BadTag(other)),
        };
        if !r.at_end() {
            return Err(WireError::BadLength("trailing payload bytes".into()));
        }
        Ok(frame)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Frame, WireError> {
        if bytes.len() < 5 {
            return Err(WireError::BadLength("frame shorter than header".into()));
        }
        let length = u32::from_le_bytes(bytes[..4].try_into().unwrap());
        if length == 0 || length > MAX_PAYLOAD {
            return Err(WireError::BadLength(format!("length field {length}")));
        }
        if bytes.len() as u64 != 4 + length as u64 {
            return Err(WireError::BadLength(format!(
                "length field {} but {} bytes follow",
                length,
                bytes.len() - 4
            )));
        }
        Frame::parse(bytes[4], &bytes[5..])
    }
}

struct SliceReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> SliceReader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.pos + n > self.buf.len() {
            return Err(WireError::BadLength("payload truncated".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, WireError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn rest(&mut self) -> &'a [u8] {
        let s = &self.buf[self.pos..];
        self.pos = self.buf.len();
        s
    }

    fn rest_u64s(&mut self) -> Result<Vec<u64>, WireError> {
        let rest = self.rest();
        if !rest.len().is_multiple_of(8) {
            return Err(WireError::BadLength(
                "symbol block not a multiple of 8".into(),
            ));
        }
        Ok(rest
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn at_end(&self) -> bool {
        self.pos == self.buf.len()
    }
}

/// Writes one frame to a byte stream.
pub fn write_frame(w: &mut impl Write, frame: &Frame) -> Result<(), WireError> {
    w.write_all(&frame.to_bytes())?;
    w.flush()?;
    Ok(())
}

/// Reads one frame from a byte stream. `Ok(None)` on clean EOF at a frame
/// boundary.
pub fn read_frame(r: &mut impl Read) -> Result<Option<Frame>, WireError> {
    let mut header = [0u8; 4];
    match r.read_exact(&mut header) {
        Ok(()) => {}
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e.into()),
    }
    let length = u32::from_le_bytes(header);
    if length == 0 || length > MAX_PAYLOAD {
        return Err(WireError::BadLength(format!("length field {length}")));
    }
    let mut body = vec![0u8; length as usize];
    r.read_exact(&mut body)?;
    Ok(Some(Frame::parse(body[0], &body[1..])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_frame() -> impl Strategy<Value = Frame> {
        let store = (any::<u32>(), 1u64..1 << 32, 1u32..8, 0u32..6, 0u32..6).prop_flat_map(
            |(server_index, p, m, files, file_len)| {
                proptest::collection::vec(any::<u64>(), (files * file_len) as usize).prop_map(
                    move |symbols| Frame::Store {
                        server_index,
                        p,
                        m,
                        files,
                        file_len,
                        symbols,
                    },
                )
            },
        );
        let query =
            (any::<u32>(), 0u32..6, 0u32..6).prop_flat_map(|(server_index, files, file_len)| {
                proptest::collection::vec(any::<u64>(), (files * file_len) as usize).prop_map(
                    move |symbols| Frame::Query {
                        server_index,
                        files,
                        file_len,
                        symbols,
                    },
                )
            });
        let answer = (any::<u32>(), any::<u64>()).prop_map(|(server_index, value)| Frame::Answer {
            server_index,
            value,
        });
        let digest = any::<[u8; 32]>().prop_map(Frame::SchemeDigest);
        let error = (1u8..=4, "[a-z ]{0,40}").prop_map(|(c, message)| Frame::Error {
            code: ErrorCode::from_byte(c).unwrap(),
            message,
        });
        prop_oneof![store, query, answer, digest, error]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn roundtrip(frame in arb_frame()) {
            let bytes = frame.to_bytes();
            // length field = payload + 1
            let len = u32::from_le_bytes(bytes[..4].try_into().unwrap());
            prop_assert_eq!(len as usize, bytes.len() - 4);
            let back = Frame::from_bytes(&bytes).unwrap();
            prop_assert_eq!(back, frame.clone());
            // stream reader agrees
            let mut cursor = std::io::Cursor::new(bytes);
            let streamed = read_frame(&mut cursor).unwrap().unwrap();
            prop_assert_eq!(streamed, frame);
        }
    }

    #[test]
    fn bad_tag_and_length() {
        let mut bytes = Frame::Answer {
            server_index: 0,
            value: 1,
        }
        .to_bytes();
        bytes[4] = 0x7f;
        assert!(matches!(
            Frame::from_bytes(&bytes).unwrap_err(),
            WireError::BadTag(0x7f)
        ));

        let zero_len = [0u8, 0, 0, 0, TAG_ANSWER];
        assert!(matches!(
            Frame::from_bytes(&zero_len).unwrap_err(),
            WireError::BadLength(_)
        ));
    }

    #[test]
    fn clean_eof_is_none() {
        let mut cursor = std::io::Cursor::new(Vec::<u8>::new());
        assert!(read_frame(&mut cursor).unwrap().is_none());
    }
}
