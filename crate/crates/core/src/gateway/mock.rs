//! In-process chat-completion endpoint for offline tests.
//!
//! Speaks the same request/response schema as the real client expects.
//! Each request is handled on its own thread so concurrency limits can be
//! observed.

use std::collections::VecDeque;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use serde_json::{json, Value};
use tiny_http::{Header, Response, Server};

/// What the mock answers to one request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MockReply {
    /// 200 with this assistant message content.
    Content(String),
    /// Bare status code with an empty JSON object body.
    Status(u16),
    /// Status code with a raw body.
    Raw(u16, String),
}

impl MockReply {
    pub fn content(text: impl Into<String>) -> Self {
        MockReply::Content(text.into())
    }
}

/// A request as the mock saw it.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordedRequest {
    pub path: String,
    pub body: Value,
    pub authorization: Option<String>,
}

impl RecordedRequest {
    /// The user message content, when the body has the expected shape.
    pub fn user_message(&self) -> Option<&str> {
        self.body["messages"].as_array()?.iter().find(|m| m["role"] == "user")?["content"].as_str()
    }

    pub fn system_message(&self) -> Option<&str> {
        self.body["messages"].as_array()?.iter().find(|m| m["role"] == "system")?["content"].as_str()
    }
}

type Responder = dyn Fn(&RecordedRequest) -> MockReply + Send + Sync;

struct State {
    responder: Box<Responder>,
    delay: Duration,
    requests: Mutex<Vec<RecordedRequest>>,
    in_flight: AtomicUsize,
    max_in_flight: AtomicUsize,
}

pub struct MockServer {
    addr: SocketAddr,
    server: Arc<Server>,
    state: Arc<State>,
    accept: Option<JoinHandle<()>>,
}

impl MockServer {
    /// Binds an ephemeral loopback port and answers with `responder`.
    pub fn start<F>(responder: F) -> std::io::Result<Self>
    where
        F: Fn(&RecordedRequest) -> MockReply + Send + Sync + 'static,
    {
        Self::start_with_delay(responder, Duration::ZERO)
    }

    /// Like [`start`](Self::start), holding each request for `delay`
    /// before answering.
    pub fn start_with_delay<F>(responder: F, delay: Duration) -> std::io::Result<Self>
    where
        F: Fn(&RecordedRequest) -> MockReply + Send + Sync + 'static,
    {
        let server = Arc::new(Server::http("127.0.0.1:0").map_err(std::io::Error::other)?);
        let addr =
            server.server_addr().to_ip().ok_or_else(|| std::io::Error::other("mock server has no IP address"))?;
        let state = Arc::new(State {
            responder: Box::new(responder),
            delay,
            requests: Mutex::new(Vec::new()),
            in_flight: AtomicUsize::new(0),
            max_in_flight: AtomicUsize::new(0),
        });
        let accept = {
            let (server, state) = (Arc::clone(&server), Arc::clone(&state));
            thread::spawn(move || {
                let mut workers = Vec::new();
                for request in server.incoming_requests() {
                    let state = Arc::clone(&state);
                    workers.push(thread::spawn(move || handle(request, &state)));
                }
                for w in workers {
                    let _ = w.join();
                }
            })
        };
        Ok(Self { addr, server, state, accept: Some(accept) })
    }

    /// Replies in order; the last reply repeats once the script runs out.
    pub fn scripted(replies: Vec<MockReply>) -> std::io::Result<Self> {
        assert!(!replies.is_empty(), "script needs at least one reply");
        let queue = Mutex::new(VecDeque::from(replies));
        Self::start(move |_| {
            let mut q = queue.lock().unwrap();
            if q.len() > 1 {
                q.pop_front().unwrap()
            } else {
                q.front().cloned().unwrap()
            }
        })
    }

    /// Base URL suitable for an endpoint config.
    pub fn base_url(&self) -> String {
        format!("http://{}/v1", self.addr)
    }

    pub fn requests(&self) -> Vec<RecordedRequest> {
        self.state.requests.lock().unwrap().clone()
    }

    pub fn request_count(&self) -> usize {
        self.state.requests.lock().unwrap().len()
    }

    /// Highest number of requests handled at once.
    pub fn max_in_flight(&self) -> usize {
        self.state.max_in_flight.load(Ordering::SeqCst)
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(h) = self.accept.take() {
            let _ = h.join();
        }
    }
}

fn handle(mut request: tiny_http::Request, state: &State) {
    let now = state.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
    state.max_in_flight.fetch_max(now, Ordering::SeqCst);

    let mut raw = String::new();
    let _ = request.as_reader().read_to_string(&mut raw);
    let recorded = RecordedRequest {
        path: request.url().to_string(),
        body: serde_json::from_str(&raw).unwrap_or(Value::Null),
        authorization: request.headers().iter().find(|h| h.field.equiv("Authorization")).map(|h| h.value.to_string()),
    };
    state.requests.lock().unwrap().push(recorded.clone());
    if !state.delay.is_zero() {
        thread::sleep(state.delay);
    }
    let (status, body) = match (state.responder)(&recorded) {
        MockReply::Content(text) => (
            200,
            json!({
                "id": "mock",
                "object": "chat.completion",
                "choices": [{"index": 0, "message": {"role": "assistant", "content": text}, "finish_reason": "stop"}],
            })
            .to_string(),
        ),
        MockReply::Status(code) => (code, "{}".to_string()),
        MockReply::Raw(code, body) => (code, body),
    };
    let header = Header::from_bytes("Content-Type", "application/json").expect("static header");
    state.in_flight.fetch_sub(1, Ordering::SeqCst);
    let _ = request.respond(Response::from_string(body).with_status_code(status).with_header(header));
}
