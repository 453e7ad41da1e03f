//! Blocking request/response transport used by the external embedder and
//! external policies.

use std::time::Duration;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error("request to {url} failed: {message}")]
    Request { url: String, message: String },
    #[error("transport unavailable: {0}")]
    Unavailable(String),
}

/// Sends one request body and returns the response body.
pub trait Transport: Send + Sync {
    fn send(&self, body: &str) -> Result<String, TransportError>;
}

impl<T: Transport + ?Sized> Transport for Box<T> {
    fn send(&self, body: &str) -> Result<String, TransportError> {
        (**self).send(body)
    }
}

impl<T: Transport + ?Sized> Transport for std::sync::Arc<T> {
    fn send(&self, body: &str) -> Result<String, TransportError> {
        (**self).send(body)
    }
}

/// JSON-over-HTTP POST.
pub struct HttpTransport {
    url: String,
    bearer: Option<String>,
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(url: impl Into<String>, timeout: Duration, bearer: Option<String>) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(true)
            .build()
            .into();
        Self {
            url: url.into(),
            bearer,
            agent,
        }
    }
}

impl Transport for HttpTransport {
    fn send(&self, body: &str) -> Result<String, TransportError> {
        let err = |e: ureq::Error| TransportError::Request {
            url: self.url.clone(),
            message: e.to_string(),
        };
        let mut req = self.agent.post(&self.url).header("Content-Type", "application/json");
        if let Some(token) = &self.bearer {
            req = req.header("Authorization", &format!("Bearer {token}"));
        }
        let mut resp = req.send(body).map_err(err)?;
        resp.body_mut().read_to_string().map_err(err)
    }
}

/// Calls `transport` up to `1 + retries` times, returning the first success
/// or the last error.
pub fn send_with_retries(transport: &dyn Transport, body: &str, retries: u32) -> Result<String, TransportError> {
    let mut last = None;
    for _ in 0..=retries {
        match transport.send(body) {
            Ok(s) => return Ok(s),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| TransportError::Unavailable("no attempt made".into())))
}
