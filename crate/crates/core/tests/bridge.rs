//! The bridge and the notebook file over real sockets.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use syntheto::eval::OracleConfig;
use syntheto::session::bridge::{Client, PROTOCOL};
use syntheto::session::frame::{Frame, FrameType};
use syntheto::session::{CellStatus, ServeConfig, Server, Session};
use syntheto::transfer::normalize_whitespace;

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus/golden")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

fn oracle() -> OracleConfig {
    OracleConfig {
        trials: 100,
        ..OracleConfig::default()
    }
}

async fn start(notebook: Option<&Path>) -> SocketAddr {
    let server = Server::bind(ServeConfig {
        bridge: Some("127.0.0.1:0".parse().unwrap()),
        http: None,
        oracle: oracle(),
        notebook: notebook.map(Path::to_path_buf),
    })
    .await
    .unwrap();
    let addr = server.bridge_addr().unwrap();
    tokio::spawn(server.run());
    addr
}

#[tokio::test]
async fn positive_form_returns_the_listed_outcome() {
    let addr = start(None).await;
    let mut c = Client::connect(addr).await.unwrap();
    assert!(c.hello.starts_with(PROTOCOL));
    let form = format!("(try-in-main-thread (nld {}))", golden("positive.transfer"));
    let reply = c.call(&form).await.unwrap();
    assert_eq!(reply.kind, FrameType::Return);
    assert_eq!(
        reply.payload,
        normalize_whitespace(&golden("positive.outcome"))
    );
}

#[tokio::test]
async fn malformed_frames_get_errors_and_the_connection_survives() {
    let addr = start(None).await;
    let mut c = Client::connect(addr).await.unwrap();

    c.send_raw(b"LISP nope\n").await.unwrap();
    assert_eq!(c.read().await.unwrap().kind, FrameType::Error);

    c.send_raw(&Frame::new(FrameType::Return, "()").to_bytes())
        .await
        .unwrap();
    let f = c.read().await.unwrap();
    assert_eq!(f.kind, FrameType::Error);
    assert!(f.payload.contains("RETURN"));

    // unreadable commands are failures, not protocol errors
    let f = c.call("(SYNTHETO::MAKE-BOGUS").await.unwrap();
    assert_eq!(f.kind, FrameType::Return);
    assert!(f.payload.contains("FAILURE"));

    let f = c.call(&golden("positive.transfer")).await.unwrap();
    assert_eq!(f.payload, normalize_whitespace(&golden("positive.outcome")));
}

#[tokio::test]
async fn clients_share_one_session() {
    let addr = start(None).await;
    let mut a = Client::connect(addr).await.unwrap();
    let mut b = Client::connect(addr).await.unwrap();
    assert_eq!(a.hello, b.hello);
    a.call(&golden("positive.transfer")).await.unwrap();
    // the second definition of the same name is rejected
    let f = b.call(&golden("positive.transfer")).await.unwrap();
    assert!(f.payload.contains("FAILURE"), "{}", f.payload);
}

#[tokio::test]
async fn notebook_is_saved_and_replayed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("session.synth");
    {
        let addr = start(Some(&path)).await;
        let mut c = Client::connect(addr).await.unwrap();
        c.call(&golden("positive.transfer")).await.unwrap();
    }
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("subtype positive"), "{text}");

    let s = Session::load(&path, oracle()).unwrap();
    assert_eq!(s.cells().len(), 1);
    assert_eq!(s.cells()[0].status, CellStatus::Accepted);

    // a restarted server picks the cell up again
    let addr = start(Some(&path)).await;
    let mut c = Client::connect(addr).await.unwrap();
    let f = c.call(&golden("positive.transfer")).await.unwrap();
    assert!(f.payload.contains("FAILURE"), "{}", f.payload);
}
