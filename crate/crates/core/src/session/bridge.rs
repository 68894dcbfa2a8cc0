//! The socket endpoint: framed transfer-language commands in, framed
//! outcome forms out.

use std::net::SocketAddr;

use tokio::io::{AsyncRead, AsyncWrite, BufReader};
use tokio::net::TcpStream;

use super::frame::{read_frame, write_frame, Frame, FrameError, FrameType};
use super::queue::Handle;
use super::state::unit_source;
use crate::transfer::{parse_sexpr, serialize, transfer_to_ast, Outcome};

pub const PROTOCOL: &str = "SYNTHETO-BRIDGE 1";

const WRAPPERS: [&str; 2] = ["TRY-IN-MAIN-THREAD", "NLD"];

/// Removes any nesting of `(try-in-main-thread ...)` and `(nld ...)`
/// around a command. Heads match case-insensitively, with or without a
/// package prefix.
pub fn strip_wrappers(text: &str) -> &str {
    let mut t = text.trim();
    loop {
        let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
            return t;
        };
        let inner = inner.trim_start();
        let end = inner
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(inner.len());
        let head = &inner[..end];
        let head = head.rsplit_once("::").map_or(head, |(_, n)| n);
        if !WRAPPERS.iter().any(|w| w.eq_ignore_ascii_case(head)) {
            return t;
        }
        t = inner[end..].trim();
    }
}

/// Runs one command; every failure is folded into a failure outcome.
pub async fn execute(handle: &Handle, text: &str) -> Outcome {
    let unit = match parse_sexpr(strip_wrappers(text)) {
        Ok(form) => match transfer_to_ast(&form) {
            Ok(u) => u,
            Err(e) => return Outcome::failure(format!("transfer error: {e}")),
        },
        Err(e) => return Outcome::failure(format!("read error: {e}")),
    };
    match handle.append(unit_source(&unit)).await {
        Ok((_, cell, _)) => cell.outcome.expect("a run cell has an outcome"),
        Err(e) => Outcome::failure(e.to_string()),
    }
}

fn reply(outcome: &Outcome) -> Frame {
    match serialize(&outcome.to_sexpr()) {
        Ok(text) => Frame::new(FrameType::Return, text),
        Err(e) => Frame::new(FrameType::Error, e.to_string()),
    }
}

/// Serves one connection until the peer closes it.
pub async fn connection<S>(stream: S, handle: Handle) -> std::io::Result<()>
where
    S: AsyncRead + AsyncWrite + Unpin,
{
    let (r, mut w) = tokio::io::split(stream);
    let mut r = BufReader::new(r);
    let id = handle.snapshot().id.clone();
    write_frame(
        &mut w,
        &Frame::new(FrameType::Hello, format!("{PROTOCOL} {id}")),
    )
    .await?;
    loop {
        let out = match read_frame(&mut r).await {
            Ok(None) => return Ok(()),
            Ok(Some(f)) if f.kind == FrameType::Lisp => reply(&execute(&handle, &f.payload).await),
            Ok(Some(f)) => Frame::new(FrameType::Error, format!("unexpected {} frame", f.kind)),
            Err(FrameError::Malformed(m)) => Frame::new(FrameType::Error, m),
            Err(FrameError::Io(e)) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
                let _ = write_frame(&mut w, &Frame::new(FrameType::Error, "truncated frame")).await;
                return Ok(());
            }
            Err(FrameError::Io(e)) => return Err(e),
        };
        write_frame(&mut w, &out).await?;
    }
}

/// A bridge client, for tests and scripting.
pub struct Client {
    reader: BufReader<tokio::net::tcp::OwnedReadHalf>,
    writer: tokio::net::tcp::OwnedWriteHalf,
    pub hello: String,
}

impl Client {
    pub async fn connect(addr: SocketAddr) -> std::io::Result<Client> {
        let (r, w) = TcpStream::connect(addr).await?.into_split();
        let mut c = Client {
            reader: BufReader::new(r),
            writer: w,
            hello: String::new(),
        };
        match c.read().await? {
            Frame {
                kind: FrameType::Hello,
                payload,
            } => c.hello = payload,
            f => {
                return Err(std::io::Error::other(format!(
                    "expected HELLO, got {}",
                    f.kind
                )))
            }
        }
        Ok(c)
    }

    pub async fn send_raw(&mut self, bytes: &[u8]) -> std::io::Result<()> {
        use tokio::io::AsyncWriteExt;
        self.writer.write_all(bytes).await
    }

    pub async fn read(&mut self) -> std::io::Result<Frame> {
        match read_frame(&mut self.reader).await {
            Ok(Some(f)) => Ok(f),
            Ok(None) => Err(std::io::ErrorKind::UnexpectedEof.into()),
            Err(FrameError::Io(e)) => Err(e),
            Err(FrameError::Malformed(m)) => Err(std::io::Error::other(m)),
        }
    }

    /// Sends a LISP frame and reads the reply.
    pub async fn call(&mut self, text: &str) -> std::io::Result<Frame> {
        write_frame(&mut self.writer, &Frame::new(FrameType::Lisp, text)).await?;
        self.read().await
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrappers_are_stripped() {
        assert_eq!(
            strip_wrappers("(try-in-main-thread (nld (SYNTHETO::F 1)))"),
            "(SYNTHETO::F 1)"
        );
        assert_eq!(strip_wrappers(" (ACL2::NLD\n(A)) "), "(A)");
        assert_eq!(strip_wrappers("(nldx (A))"), "(nldx (A))");
        assert_eq!(strip_wrappers("(A)"), "(A)");
        assert_eq!(strip_wrappers("(nld)"), "");
    }
}
