//! Notebook sessions: cell state, the serialized writer, the framed
//! bridge and the HTTP facade.

pub mod bridge;
pub mod frame;
pub mod http;
pub mod json;
pub mod queue;
pub mod server;
pub mod state;

pub use queue::{Event, Handle, Request, Snapshot};
pub use server::{serve, ServeConfig, ServeError, Server};
pub use state::{split_cells, Cell, CellStatus, Session, SessionError, CELL_SEPARATOR};
