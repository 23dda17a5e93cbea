//! HTTP front end. Every handler runs on an immutable [`Service`] snapshot;
//! solves run on the blocking pool.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;

use hazalloc::io::{canonical_bytes, load_bundle, ModelBundle};
use hazalloc::Error;

use crate::api::{machine, ErrorBody, Service, SolveBody, SweepBody};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bind: std::net::IpAddr,
    pub port: u16,
    /// `None` serves the bundle shipped with the library.
    pub bundle: Option<PathBuf>,
    /// Seconds a solve may search before returning its best answer so far.
    pub request_timeout: f64,
    pub max_free_exact: usize,
}

impl ServiceConfig {
    pub fn load(&self) -> hazalloc::Result<Service> {
        if !(self.request_timeout > 0.0) || !self.request_timeout.is_finite() {
            return Err(Error::Usage(format!("request timeout {} must be positive", self.request_timeout)));
        }
        let bundle = match &self.bundle {
            Some(path) => load_bundle(path)?,
            None => ModelBundle::iowa(),
        };
        let mut service = Service::new(bundle);
        service.max_free_exact = self.max_free_exact;
        service.default_time_limit = Some(self.request_timeout);
        Ok(service)
    }
}

pub fn status_for(e: &Error) -> StatusCode {
    match e {
        Error::UnknownHazard(_) | Error::UnknownProject(_) | Error::UnknownScenario(_) => StatusCode::NOT_FOUND,
        Error::Infeasible(_) => StatusCode::UNPROCESSABLE_ENTITY,
        Error::Io(_) | Error::Capacity { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        _ => StatusCode::BAD_REQUEST,
    }
}

fn json(status: StatusCode, body: Vec<u8>) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error_response(e: &Error) -> Response {
    if status_for(e).is_server_error() {
        log::error!("{e}");
    }
    json(status_for(e), canonical_bytes(&ErrorBody::from(e)))
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, Error> {
    serde_json::from_slice(body).map_err(|e| Error::Parse(e.to_string()))
}

async fn blocking<F>(f: F) -> Response
where
    F: FnOnce() -> Result<Vec<u8>, Error> + Send + 'static,
{
    match tokio::task::spawn_blocking(f).await {
        Ok(Ok(bytes)) => json(StatusCode::OK, bytes),
        Ok(Err(e)) => error_response(&e),
        Err(join) => {
            log::error!("solver task failed: {join}");
            let body = ErrorBody { code: "internal".into(), message: "internal error".into(), field: None };
            json(StatusCode::INTERNAL_SERVER_ERROR, canonical_bytes(&body))
        }
    }
}

async fn health() -> Response {
    json(StatusCode::OK, canonical_bytes(&serde_json::json!({ "status": "ok" })))
}

async fn model(State(service): State<Arc<Service>>) -> Response {
    match service.model_document() {
        Ok(bytes) => json(StatusCode::OK, bytes),
        Err(e) => error_response(&e),
    }
}

async fn scenarios(State(service): State<Arc<Service>>) -> Response {
    json(StatusCode::OK, service.scenarios_document())
}

async fn solve(State(service): State<Arc<Service>>, body: Bytes) -> Response {
    blocking(move || {
        let body: SolveBody = parse(&body)?;
        Ok(machine(&service.solve(&body)?))
    })
    .await
}

async fn sweep(State(service): State<Arc<Service>>, body: Bytes) -> Response {
    blocking(move || {
        let body: SweepBody = parse(&body)?;
        Ok(machine(&service.sweep(&body)?))
    })
    .await
}

async fn not_found() -> Response {
    let body = ErrorBody { code: "not_found".into(), message: "no such endpoint".into(), field: None };
    json(StatusCode::NOT_FOUND, canonical_bytes(&body))
}

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/model", get(model))
        .route("/scenarios", get(scenarios))
        .route("/solve", post(solve))
        .route("/sweep", post(sweep))
        .fallback(not_found)
        .with_state(service)
}

/// Serves until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> hazalloc::Result<()> {
    let service = Arc::new(config.load()?);
    let addr = SocketAddr::new(config.bind, config.port);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("serving {} on http://{}", service.bundle().name, listener.local_addr()?);
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            tokio::signal::ctrl_c().await.ok();
        })
        .await?;
    Ok(())
}
