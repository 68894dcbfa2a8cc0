use std::io::Write;
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

fn syntheto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syntheto"))
        .args(args)
        .env_remove("SYNTHETO_SEED")
        .output()
        .unwrap()
}

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
        .display()
        .to_string()
}

fn file_with(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new()
        .suffix(".synth")
        .tempfile()
        .unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn basics_are_accepted() {
    let o = syntheto(&["run", &corpus("basics.synth"), "--trials", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("14 of 14 cells accepted"));
}

#[test]
fn type_error_in_second_cell_exits_1() {
    let f = file_with(
        "subtype positive {x: int | x > 0}\n\
         function f(x: int) returns (y: bool) { return x; }\n\
         function g(x: int) returns (y: int) { return x; }\n",
    );
    let o = syntheto(&["run", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("cell 1: type-success positive"), "{out}");
    assert!(out.contains("cell 2: rejected"), "{out}");
    assert!(out.contains("cell 3: stale"), "{out}");
}

#[test]
fn obligation_failure_exits_1() {
    let o = syntheto(&["run", &corpus("rational_invalid.synth")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("product-invariant"));
}

#[test]
fn emit_transfer_prints_commands_and_outcomes() {
    let f = file_with("subtype positive {\n  x: int | x > 0\n}\n");
    let o = syntheto(&["run", "--emit-transfer", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let golden = |n: &str| {
        syntheto::transfer::normalize_whitespace(
            &std::fs::read_to_string(corpus(&format!("golden/{n}"))).unwrap(),
        )
    };
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(
        lines,
        [golden("positive.transfer"), golden("positive.outcome")]
    );
}

#[test]
fn json_report() {
    let o = syntheto(&[
        "run",
        "--json",
        &corpus("rational_invalid.synth"),
        "--seed",
        "0x2a",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["version"], 1);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["exit_code"], 1);
    assert_eq!(v["cells"][2]["status"], "rejected");
    let obs = v["cells"][2]["obligations"].as_array().unwrap();
    assert_eq!(obs.last().unwrap()["status"], "fail");
    assert_eq!(obs.last().unwrap()["provenance"], "product-invariant");
    assert!(v["cells"][0]["command"]
        .as_str()
        .unwrap()
        .starts_with("(SYNTHETO::PROCESS-SYNTHETO-TOPLEVEL"));
}

#[test]
fn seed_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_syntheto"))
        .args(["run", "--json", &corpus("rational_invalid.synth")])
        .env("SYNTHETO_SEED", "7")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 7);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(syntheto(&["run"]).status.code(), Some(2));
    assert_eq!(
        syntheto(&["run", "/nonexistent.synth"]).status.code(),
        Some(2)
    );
    assert_eq!(
        syntheto(&["run", "x.synth", "--seed", "zz"]).status.code(),
        Some(2)
    );
    assert_eq!(syntheto(&["--help"]).status.code(), Some(0));
}

#[test]
fn occupied_port_is_a_bind_error() {
    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let o = syntheto(&["serve", "--port", &port]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(&port));
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port()
}

#[test]
fn http_port_alone_serves_http_only() {
    let port = free_port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_syntheto"))
        .args(["serve", "--http-port", &port.to_string()])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(10);
    let body = loop {
        if let Ok(mut s) = std::net::TcpStream::connect(("127.0.0.1", port)) {
            s.write_all(b"GET /session HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n")
                .unwrap();
            let mut out = String::new();
            std::io::Read::read_to_string(&mut s, &mut out).unwrap();
            break out;
        }
        assert!(Instant::now() < deadline, "server did not start");
        std::thread::sleep(Duration::from_millis(50));
    };
    child.kill().unwrap();
    let out = child.wait_with_output().unwrap();
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(body.starts_with("HTTP/1.1 200"), "{body}");
    assert!(body.contains("\"revision\":0"), "{body}");
    assert!(err.contains("http listening"), "{err}");
    assert!(!err.contains("bridge listening"), "{err}");
}
