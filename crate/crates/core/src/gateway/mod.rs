//! Client for chat-completion endpoints that classify one domain per call.
//!
//! The system message is the bundled prompt asset, byte for byte; the user
//! message is the bare domain. Only a leading `true`/`false` token counts
//! as an answer.

pub mod mock;

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde_json::{json, Value};
use thiserror::Error;

use crate::evaluator::{Classifier, Verdict};

/// The analyst system prompt sent with every request.
pub const SYSTEM_PROMPT: &str = include_str!("../../assets/system_prompt.txt");

pub const API_KEY_ENV: &str = "SQUATLAB_API_KEY";
pub const MAX_RETRIES_LIMIT: u32 = 5;

pub type LlmVerdict = Verdict;

/// A secret that never prints.
#[derive(Clone, PartialEq, Eq)]
pub struct Credential(String);

impl Credential {
    pub fn new(secret: impl Into<String>) -> Self {
        Self(secret.into())
    }

    /// Reads [`API_KEY_ENV`]; empty values count as absent.
    pub fn from_env() -> Option<Self> {
        std::env::var(API_KEY_ENV).ok().filter(|v| !v.is_empty()).map(Self)
    }

    fn expose(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Credential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Credential(redacted)")
    }
}

#[derive(Debug, Clone)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model_name: String,
    pub timeout: Duration,
    pub max_retries: u32,
    pub max_concurrent: usize,
    /// First retry delay; doubles on each further retry.
    pub initial_backoff: Duration,
    pub credential: Option<Credential>,
}

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>, model_name: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            model_name: model_name.into(),
            timeout: Duration::from_secs(60),
            max_retries: 3,
            max_concurrent: 4,
            initial_backoff: Duration::from_millis(250),
            credential: Credential::from_env(),
        }
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        let bad = |m: &str| Err(GatewayError::Config(m.to_string()));
        if self.timeout.is_zero() {
            return bad("timeout must be positive");
        }
        if self.max_retries > MAX_RETRIES_LIMIT {
            return bad("max_retries must be at most 5");
        }
        if self.max_concurrent == 0 {
            return bad("max_concurrent must be positive");
        }
        if !(self.base_url.starts_with("http://") || self.base_url.starts_with("https://")) {
            return bad("base_url must be an http(s) URL");
        }
        Ok(())
    }

    pub fn completions_url(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("invalid endpoint config: {0}")]
    Config(String),
    #[error("transport failure after {attempts} attempt(s): {reason}")]
    Transport { attempts: u32, reason: String },
    #[error("endpoint answered HTTP {status} after {attempts} attempt(s)")]
    Status { status: u16, attempts: u32 },
}

/// `True`/`False` when the first whitespace-delimited token, stripped of
/// surrounding punctuation, is that word in any case.
pub fn parse_verdict(raw: &str) -> LlmVerdict {
    let token =
        raw.split_whitespace().next().unwrap_or("").trim_matches(|c: char| !c.is_alphanumeric()).to_ascii_lowercase();
    match token.as_str() {
        "true" => Verdict::True,
        "false" => Verdict::False,
        _ => Verdict::NonConforming(raw.to_string()),
    }
}

/// Chat-completion request body for one domain.
pub fn request_body(model: &str, domain: &str) -> Value {
    json!({
        "model": model,
        "messages": [
            {"role": "system", "content": SYSTEM_PROMPT},
            {"role": "user", "content": domain},
        ],
        "temperature": 0,
    })
}

enum Attempt {
    Done(String),
    Retry(GatewayError),
    Fail(GatewayError),
}

pub struct LlmClient {
    config: EndpointConfig,
    http: reqwest::blocking::Client,
}

impl fmt::Debug for LlmClient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LlmClient").field("config", &self.config).finish_non_exhaustive()
    }
}

impl LlmClient {
    pub fn new(config: EndpointConfig) -> Result<Self, GatewayError> {
        config.validate()?;
        let http = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| GatewayError::Config(e.to_string()))?;
        Ok(Self { config, http })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    fn attempt(&self, body: &Value, attempt: u32) -> Attempt {
        let mut req = self.http.post(self.config.completions_url()).json(body);
        if let Some(c) = &self.config.credential {
            req = req.bearer_auth(c.expose());
        }
        let resp = match req.send() {
            Ok(r) => r,
            Err(e) => {
                return Attempt::Retry(GatewayError::Transport {
                    attempts: attempt,
                    reason: e.without_url().to_string(),
                })
            }
        };
        let status = resp.status();
        if status.is_server_error() || status.as_u16() == 429 {
            return Attempt::Retry(GatewayError::Status { status: status.as_u16(), attempts: attempt });
        }
        if !status.is_success() {
            return Attempt::Fail(GatewayError::Status { status: status.as_u16(), attempts: attempt });
        }
        match resp.json::<Value>() {
            Ok(v) => match v["choices"][0]["message"]["content"].as_str() {
                Some(content) => Attempt::Done(content.to_string()),
                None => Attempt::Done(String::new()),
            },
            Err(e) => {
                Attempt::Retry(GatewayError::Transport { attempts: attempt, reason: e.without_url().to_string() })
            }
        }
    }

    /// Sends one domain, retrying transport failures, 5xx and 429 with
    /// exponential backoff.
    pub fn classify_domain(&self, domain: &str) -> Result<LlmVerdict, GatewayError> {
        let body = request_body(&self.config.model_name, domain);
        let mut backoff = self.config.initial_backoff;
        let mut attempt = 1;
        loop {
            log::debug!("classify {domain}: attempt {attempt}");
            match self.attempt(&body, attempt) {
                Attempt::Done(content) => return Ok(parse_verdict(&content)),
                Attempt::Fail(e) => return Err(e),
                Attempt::Retry(e) if attempt > self.config.max_retries => return Err(e),
                Attempt::Retry(e) => {
                    log::warn!("classify {domain}: {e}; retrying in {backoff:?}");
                    thread::sleep(backoff);
                    backoff = backoff.saturating_mul(2);
                    attempt += 1;
                }
            }
        }
    }

    /// Results align with `domains`. At most `max_concurrent` requests are
    /// in flight; failures become non-conforming entries.
    pub fn batch_classify(&self, domains: &[&str]) -> Vec<LlmVerdict> {
        let next = AtomicUsize::new(0);
        let results: Mutex<Vec<Option<LlmVerdict>>> = Mutex::new(vec![None; domains.len()]);
        let workers = self.config.max_concurrent.min(domains.len());
        thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(domain) = domains.get(i) else { break };
                    let verdict = self
                        .classify_domain(domain)
                        .unwrap_or_else(|e| Verdict::NonConforming(format!("gateway error: {e}")));
                    results.lock().unwrap()[i] = Some(verdict);
                });
            }
        });
        results.into_inner().unwrap().into_iter().map(|v| v.expect("every slot filled")).collect()
    }
}

impl Classifier for LlmClient {
    fn classify(&self, domain: &str) -> Verdict {
        self.classify_domain(domain).unwrap_or_else(|e| Verdict::NonConforming(format!("gateway error: {e}")))
    }

    fn classify_batch(&self, domains: &[&str]) -> Vec<Verdict> {
        self.batch_classify(domains)
    }
}

/// One-shot classification with a fresh client.
pub fn classify_domain_llm(domain: &str, config: &EndpointConfig) -> Result<LlmVerdict, GatewayError> {
    LlmClient::new(config.clone())?.classify_domain(domain)
}

/// Batch classification with a fresh client.
pub fn batch_classify(domains: &[&str], config: &EndpointConfig) -> Result<Vec<LlmVerdict>, GatewayError> {
    Ok(LlmClient::new(config.clone())?.batch_classify(domains))
}
