//! Bridge framing: a `TYPE LENGTH\n` header, LENGTH payload bytes, `\n`.

use std::fmt;

use tokio::io::{AsyncBufReadExt, AsyncReadExt, AsyncWrite, AsyncWriteExt};

/// Largest payload accepted.
pub const MAX_PAYLOAD: usize = 16 << 20;
const MAX_HEADER: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameType {
    Hello,
    Lisp,
    Return,
    Error,
}

impl FrameType {
    pub fn as_str(self) -> &'static str {
        match self {
            FrameType::Hello => "HELLO",
            FrameType::Lisp => "LISP",
            FrameType::Return => "RETURN",
            FrameType::Error => "ERROR",
        }
    }

    fn parse(s: &str) -> Option<FrameType> {
        [
            FrameType::Hello,
            FrameType::Lisp,
            FrameType::Return,
            FrameType::Error,
        ]
        .into_iter()
        .find(|t| t.as_str() == s)
    }
}

impl fmt::Display for FrameType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub kind: FrameType,
    pub payload: String,
}

impl Frame {
    pub fn new(kind: FrameType, payload: impl Into<String>) -> Frame {
        Frame {
            kind,
            payload: payload.into(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = format!("{} {}\n", self.kind, self.payload.len()).into_bytes();
        out.extend_from_slice(self.payload.as_bytes());
        out.push(b'\n');
        out
    }
}

/// A frame that could not be read. The stream stays usable: reading
/// resumes after the offending header or payload.
#[derive(Debug)]
pub enum FrameError {
    Malformed(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for FrameError {
    fn from(e: std::io::Error) -> Self {
        FrameError::Io(e)
    }
}

fn parse_header(line: &str) -> Result<(FrameType, usize), String> {
    let mut parts = line.split(' ');
    let (Some(kind), Some(len), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(format!("malformed header {line:?}"));
    };
    let kind = FrameType::parse(kind).ok_or_else(|| format!("unknown frame type {kind:?}"))?;
    if len.is_empty() || !len.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("malformed length {len:?}"));
    }
    let len: usize = len
        .parse()
        .ok()
        .filter(|n| *n <= MAX_PAYLOAD)
        .ok_or_else(|| format!("length {len} exceeds {MAX_PAYLOAD}"))?;
    Ok((kind, len))
}

/// Reads one frame; `Ok(None)` at a clean end of stream.
pub async fn read_frame<R>(r: &mut R) -> Result<Option<Frame>, FrameError>
where
    R: AsyncBufReadExt + Unpin,
{
    let mut header = Vec::new();
    let n = (&mut *r)
        .take(MAX_HEADER as u64)
        .read_until(b'\n', &mut header)
        .await?;
    if n == 0 {
        return Ok(None);
    }
    if header.last() != Some(&b'\n') {
        if n < MAX_HEADER {
            return Err(FrameError::Malformed("truncated header".into()));
        }
        // skip the rest of an overlong line
        let mut rest = Vec::new();
        r.read_until(b'\n', &mut rest).await?;
        return Err(FrameError::Malformed("header too long".into()));
    }
    header.pop();
    let line = String::from_utf8_lossy(&header);
    let (kind, len) = parse_header(line.trim_end_matches('\r')).map_err(FrameError::Malformed)?;
    let mut payload = vec![0; len + 1];
    r.read_exact(&mut payload).await?;
    if payload.pop() != Some(b'\n') {
        return Err(FrameError::Malformed(format!(
            "payload of {kind} frame is not followed by a newline"
        )));
    }
    let payload = String::from_utf8(payload)
        .map_err(|_| FrameError::Malformed("payload is not UTF-8".into()))?;
    Ok(Some(Frame { kind, payload }))
}

pub async fn write_frame<W>(w: &mut W, frame: &Frame) -> std::io::Result<()>
where
    W: AsyncWrite + Unpin,
{
    w.write_all(&frame.to_bytes()).await?;
    w.flush().await
}

#[cfg(test)]
mod tests {
    use super::*;
    use tokio::io::BufReader;

    fn read_all(bytes: &[u8]) -> Vec<Result<Frame, String>> {
        let rt = tokio::runtime::Builder::new_current_thread()
            .build()
            .unwrap();
        rt.block_on(async {
            let mut r = BufReader::new(bytes);
            let mut out = Vec::new();
            loop {
                match read_frame(&mut r).await {
                    Ok(Some(f)) => out.push(Ok(f)),
                    Ok(None) => break,
                    Err(FrameError::Malformed(m)) => out.push(Err(m)),
                    Err(FrameError::Io(_)) => {
                        out.push(Err("io".into()));
                        break;
                    }
                }
            }
            out
        })
    }

    #[test]
    fn golden_bytes() {
        assert_eq!(
            Frame::new(FrameType::Lisp, "(A)").to_bytes(),
            b"LISP 3\n(A)\n".to_vec()
        );
        assert_eq!(
            Frame::new(FrameType::Return, "").to_bytes(),
            b"RETURN 0\n\n".to_vec()
        );
        // length counts bytes, not characters
        assert_eq!(
            Frame::new(FrameType::Error, "é").to_bytes(),
            b"ERROR 2\n\xc3\xa9\n".to_vec()
        );
    }

    #[test]
    fn reads_back() {
        let f = Frame::new(FrameType::Hello, "x\ny");
        assert_eq!(read_all(&f.to_bytes()), vec![Ok(f)]);
    }

    #[test]
    fn bad_header_does_not_end_the_stream() {
        let mut bytes = b"LISP x\n".to_vec();
        bytes.extend(Frame::new(FrameType::Lisp, "ok").to_bytes());
        let got = read_all(&bytes);
        assert!(got[0].as_ref().unwrap_err().contains("length"));
        assert_eq!(got[1], Ok(Frame::new(FrameType::Lisp, "ok")));
    }

    #[test]
    fn rejects_unknown_type_and_missing_newline() {
        assert!(read_all(b"PING 0\n\n")[0]
            .as_ref()
            .unwrap_err()
            .contains("unknown"));
        assert!(read_all(b"LISP 2\nabc")[0]
            .as_ref()
            .unwrap_err()
            .contains("newline"));
        assert!(read_all(b"LISP 99999999999999999999\n")[0].is_err());
        assert!(read_all(b"LISP -1\n")[0].is_err());
    }

    #[test]
    fn truncated_payload_is_io() {
        assert_eq!(read_all(b"LISP 10\nab"), vec![Err("io".into())]);
    }
}
