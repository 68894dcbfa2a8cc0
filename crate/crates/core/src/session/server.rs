//! Binding and running the bridge and HTTP endpoints.

use std::net::SocketAddr;
use std::path::PathBuf;

use thiserror::Error;
use tokio::net::TcpListener;

use super::queue::Handle;
use super::state::Session;
use super::{bridge, http};
use crate::eval::OracleConfig;

pub const DEFAULT_BRIDGE_PORT: u16 = 55433;
pub const DEFAULT_HTTP_PORT: u16 = 55434;

#[derive(Clone, Debug)]
pub struct ServeConfig {
    /// Bridge endpoint; `None` disables it.
    pub bridge: Option<SocketAddr>,
    /// HTTP endpoint; `None` disables it.
    pub http: Option<SocketAddr>,
    pub oracle: OracleConfig,
    /// Notebook file replayed at start and saved after every change.
    pub notebook: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        source: std::io::Error,
    },
    #[error("no endpoint enabled")]
    NoEndpoint,
    #[error("notebook {path}: {source}")]
    Notebook {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub struct Server {
    pub handle: Handle,
    bridge: Option<TcpListener>,
    http: Option<TcpListener>,
}

async fn bind(addr: SocketAddr) -> Result<TcpListener, ServeError> {
    TcpListener::bind(addr)
        .await
        .map_err(|source| ServeError::Bind { addr, source })
}

impl Server {
    pub async fn bind(config: ServeConfig) -> Result<Server, ServeError> {
        if config.bridge.is_none() && config.http.is_none() {
            return Err(ServeError::NoEndpoint);
        }
        let bridge = match config.bridge {
            Some(a) => Some(bind(a).await?),
            None => None,
        };
        let http = match config.http {
            Some(a) => Some(bind(a).await?),
            None => None,
        };
        let session = match &config.notebook {
            Some(path) if path.exists() => {
                Session::load(path, config.oracle).map_err(|source| ServeError::Notebook {
                    path: path.clone(),
                    source,
                })?
            }
            _ => Session::new(config.oracle),
        };
        Ok(Server {
            handle: Handle::spawn(session, config.notebook),
            bridge,
            http,
        })
    }

    pub fn bridge_addr(&self) -> Option<SocketAddr> {
        self.bridge.as_ref().and_then(|l| l.local_addr().ok())
    }

    pub fn http_addr(&self) -> Option<SocketAddr> {
        self.http.as_ref().and_then(|l| l.local_addr().ok())
    }

    /// Serves until an endpoint fails.
    pub async fn run(self) -> Result<(), ServeError> {
        let handle = self.handle;
        let bridge = self.bridge.map(|l| {
            let handle = handle.clone();
            tokio::spawn(async move {
                loop {
                    let (stream, _) = l.accept().await?;
                    let handle = handle.clone();
                    tokio::spawn(async move {
                        if let Err(e) = bridge::connection(stream, handle).await {
                            eprintln!("syntheto: bridge connection: {e}");
                        }
                    });
                }
                #[allow(unreachable_code)]
                Ok::<(), std::io::Error>(())
            })
        });
        let http = self
            .http
            .map(|l| tokio::spawn(async move { axum::serve(l, http::router(handle)).await }));
        match (bridge, http) {
            (Some(b), Some(h)) => tokio::select! {
                r = b => r.expect("bridge task")?,
                r = h => r.expect("http task")?,
            },
            (Some(b), None) => b.await.expect("bridge task")?,
            (None, Some(h)) => h.await.expect("http task")?,
            (None, None) => unreachable!("checked at bind"),
        }
        Ok(())
    }
}

/// Binds the configured endpoints and serves forever.
pub async fn serve(config: ServeConfig) -> Result<(), ServeError> {
    Server::bind(config).await?.run().await
}
