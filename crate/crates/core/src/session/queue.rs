//! The single writer: one thread owns the session and applies requests in
//! arrival order. Readers see immutable snapshots.

use std::path::PathBuf;
use std::sync::{mpsc, Arc, RwLock};

use tokio::sync::mpsc::{unbounded_channel, UnboundedReceiver, UnboundedSender};

use super::state::{Cell, Session, SessionError};

#[derive(Clone, Debug)]
pub enum Request {
    /// Append a cell and run it.
    Append { source: String },
    /// Replace a cell's source and cascade.
    Edit { index: usize, source: String },
    /// Rerun a cell and cascade.
    Run { index: usize },
}

#[derive(Clone, Debug)]
pub enum Event {
    Cell {
        index: usize,
        cell: Cell,
        revision: u64,
    },
    Done {
        revision: u64,
    },
    Refused(SessionError),
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub id: String,
    pub revision: u64,
    pub cells: Vec<Cell>,
    pub accepted: usize,
    pub world_text: String,
}

impl Snapshot {
    fn of(s: &Session) -> Snapshot {
        Snapshot {
            id: s.id.clone(),
            revision: s.revision(),
            cells: s.cells().to_vec(),
            accepted: s.accepted(),
            world_text: s.world().canonical_text(),
        }
    }
}

struct Job {
    request: Request,
    reply: UnboundedSender<Event>,
}

#[derive(Clone)]
pub struct Handle {
    jobs: mpsc::Sender<Job>,
    snapshot: Arc<RwLock<Arc<Snapshot>>>,
}

impl Handle {
    /// Moves `session` onto a writer thread. With `notebook`, the notebook
    /// is saved after every request.
    pub fn spawn(session: Session, notebook: Option<PathBuf>) -> Handle {
        let snapshot = Arc::new(RwLock::new(Arc::new(Snapshot::of(&session))));
        let (jobs, rx) = mpsc::channel::<Job>();
        let shared = snapshot.clone();
        std::thread::Builder::new()
            .name("syntheto-session".into())
            .spawn(move || writer(session, rx, shared, notebook))
            .expect("spawn session writer");
        Handle { jobs, snapshot }
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.read().expect("snapshot lock").clone()
    }

    /// Queues a request; events arrive as cells finish, ending with `Done`
    /// or `Refused`.
    pub fn request(&self, request: Request) -> UnboundedReceiver<Event> {
        let (reply, rx) = unbounded_channel();
        // a dead writer shows up as a closed channel
        let _ = self.jobs.send(Job { request, reply });
        rx
    }

    /// Appends a cell and waits for its result.
    pub async fn append(
        &self,
        source: impl Into<String>,
    ) -> Result<(usize, Cell, u64), SessionError> {
        let mut rx = self.request(Request::Append {
            source: source.into(),
        });
        let mut got = None;
        while let Some(ev) = rx.recv().await {
            match ev {
                Event::Cell {
                    index,
                    cell,
                    revision,
                } => got = Some((index, cell, revision)),
                Event::Refused(e) => return Err(e),
                Event::Done { .. } => break,
            }
        }
        Ok(got.expect("append reports its cell"))
    }
}

fn writer(
    mut session: Session,
    rx: mpsc::Receiver<Job>,
    shared: Arc<RwLock<Arc<Snapshot>>>,
    notebook: Option<PathBuf>,
) {
    for job in rx {
        let reply = job.reply;
        let result = apply(&mut session, job.request, &reply);
        *shared.write().expect("snapshot lock") = Arc::new(Snapshot::of(&session));
        if let Some(path) = &notebook {
            if let Err(e) = session.save(path) {
                eprintln!("syntheto: saving {}: {e}", path.display());
            }
        }
        let _ = reply.send(match result {
            Ok(()) => Event::Done {
                revision: session.revision(),
            },
            Err(e) => Event::Refused(e),
        });
    }
}

fn apply(
    s: &mut Session,
    request: Request,
    reply: &UnboundedSender<Event>,
) -> Result<(), SessionError> {
    let revision = s.revision() + 1;
    let each = |index: usize, cell: &Cell| {
        let _ = reply.send(Event::Cell {
            index,
            cell: cell.clone(),
            revision,
        });
    };
    match request {
        Request::Append { source } => {
            let cell = s.submit(source)?.clone();
            each(s.cells().len() - 1, &cell);
            Ok(())
        }
        Request::Edit { index, source } => s.edit(index, source, each),
        Request::Run { index } => s.rerun(index, each),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::OracleConfig;
    use crate::session::state::CellStatus;

    #[tokio::test(flavor = "multi_thread", worker_threads = 4)]
    async fn concurrent_appends_get_distinct_revisions() {
        let h = Handle::spawn(Session::new(OracleConfig::default()), None);
        let tasks: Vec<_> = (0..16)
            .map(|i| {
                let h = h.clone();
                tokio::spawn(async move {
                    h.append(format!(
                        "function f{i}(x: int) returns (y: int) {{ return x + {i}; }}"
                    ))
                    .await
                    .unwrap()
                })
            })
            .collect();
        let mut got = Vec::new();
        for t in tasks {
            got.push(t.await.unwrap());
        }
        got.sort_by_key(|g| g.2);
        for (k, (index, cell, revision)) in got.iter().enumerate() {
            assert_eq!(*index, k);
            assert_eq!(*revision, k as u64 + 1);
            assert_eq!(cell.status, CellStatus::Accepted);
        }
        let snap = h.snapshot();
        assert_eq!(snap.revision, 16);
        assert_eq!(snap.accepted, 16);
    }

    #[tokio::test]
    async fn refusal_is_reported() {
        let h = Handle::spawn(Session::new(OracleConfig::default()), None);
        let mut rx = h.request(Request::Run { index: 3 });
        assert!(matches!(
            rx.recv().await,
            Some(Event::Refused(SessionError::NoCell(3)))
        ));
    }
}
