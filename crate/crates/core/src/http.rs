//! Polite HTTP GET: per-host rate limiting and exponential backoff on 429/5xx.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FetchError {
    #[error("invalid url {0:?}")]
    InvalidUrl(String),
    #[error("GET {url}: {reason}")]
    Transport { url: String, reason: String },
    #[error("GET {url}: HTTP {status}")]
    Status { url: String, status: u16 },
}

impl FetchError {
    /// Every network-side failure may succeed on a later run; only malformed
    /// input is permanent.
    pub fn is_retryable(&self) -> bool {
        !matches!(self, FetchError::InvalidUrl(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

/// Raw transport. Implemented by the reqwest client and by test doubles.
pub trait Fetch: Send + Sync {
    fn get(&self, url: &str) -> Result<HttpResponse, FetchError>;
}

pub struct ReqwestFetcher {
    client: reqwest::blocking::Client,
}

impl ReqwestFetcher {
    pub fn new(timeout: Duration) -> Result<Self, FetchError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .user_agent(concat!("evver/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| FetchError::Transport { url: String::new(), reason: e.to_string() })?;
        Ok(Self { client })
    }
}

impl Fetch for ReqwestFetcher {
    fn get(&self, url: &str) -> Result<HttpResponse, FetchError> {
        let resp = self.client.get(url).send().map_err(|e| FetchError::Transport { url: url.to_string(), reason: e.to_string() })?;
        let status = resp.status().as_u16();
        let body = resp.text().map_err(|e| FetchError::Transport { url: url.to_string(), reason: e.to_string() })?;
        Ok(HttpResponse { status, body })
    }
}

/// Hands out request slots at most one per `interval` for each host.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    next_slot: Mutex<HashMap<String, Instant>>,
}

impl RateLimiter {
    pub fn new(interval: Duration) -> Self {
        Self { interval, next_slot: Mutex::new(HashMap::new()) }
    }

    /// Process-wide limiter: one request per second per host.
    pub fn global() -> Arc<RateLimiter> {
        static GLOBAL: OnceLock<Arc<RateLimiter>> = OnceLock::new();
        GLOBAL.get_or_init(|| Arc::new(RateLimiter::new(Duration::from_secs(1)))).clone()
    }

    pub fn interval(&self) -> Duration {
        self.interval
    }

    /// Blocks until the caller may issue a request to `host`.
    pub fn acquire(&self, host: &str) {
        let now = Instant::now();
        let slot = {
            let mut slots = self.next_slot.lock().expect("rate limiter poisoned");
            let slot = slots.get(host).copied().filter(|t| *t > now).unwrap_or(now);
            slots.insert(host.to_string(), slot + self.interval);
            slot
        };
        let wait = slot.saturating_duration_since(Instant::now());
        if !wait.is_zero() {
            thread::sleep(wait);
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self { max_retries: 3, base_delay: Duration::from_secs(1) }
    }
}

fn should_back_off(status: u16) -> bool {
    status == 429 || (500..600).contains(&status)
}

/// Rate-limited, retrying client around any [`Fetch`] transport.
#[derive(Clone)]
pub struct PoliteClient {
    inner: Arc<dyn Fetch>,
    limiter: Arc<RateLimiter>,
    retry: RetryPolicy,
}

impl PoliteClient {
    pub fn new(inner: Arc<dyn Fetch>, limiter: Arc<RateLimiter>, retry: RetryPolicy) -> Self {
        Self { inner, limiter, retry }
    }

    /// Live client with the global limiter and default retry policy.
    pub fn live() -> Result<Self, FetchError> {
        Ok(Self::new(Arc::new(ReqwestFetcher::new(Duration::from_secs(30))?), RateLimiter::global(), RetryPolicy::default()))
    }

    /// Returns the body of a 2xx response.
    pub fn get(&self, url: &str) -> Result<String, FetchError> {
        let parsed = url::Url::parse(url).map_err(|_| FetchError::InvalidUrl(url.to_string()))?;
        let host = parsed.host_str().ok_or_else(|| FetchError::InvalidUrl(url.to_string()))?.to_string();
        let mut attempt = 0;
        loop {
            self.limiter.acquire(&host);
            let result = self.inner.get(url);
            let retry = match &result {
                Ok(r) if (200..300).contains(&r.status) => return Ok(result.unwrap().body),
                Ok(r) => should_back_off(r.status),
                Err(_) => true,
            };
            if !retry || attempt >= self.retry.max_retries {
                return Err(match result {
                    Ok(r) => FetchError::Status { url: url.to_string(), status: r.status },
                    Err(e) => e,
                });
            }
            tracing::debug!(url, attempt, "backing off");
            thread::sleep(self.retry.base_delay * 2u32.pow(attempt));
            attempt += 1;
        }
    }
}

/// In-memory transport for offline runs, examples and tests.
pub mod canned {
    use super::*;

    /// Serves canned responses keyed by URL and records every request.
    /// Unknown URLs get a 404.
    #[derive(Default)]
    pub struct CannedFetcher {
        pub pages: Mutex<HashMap<String, Vec<HttpResponse>>>,
        pub log: Mutex<Vec<(String, Instant)>>,
    }

    impl CannedFetcher {
        pub fn with(pages: &[(&str, u16, &str)]) -> Self {
            let m = CannedFetcher::default();
            for (url, status, body) in pages {
                m.push(url, *status, body);
            }
            m
        }

        /// Queues a response; the last queued response repeats.
        pub fn push(&self, url: &str, status: u16, body: &str) {
            self.pages.lock().unwrap().entry(url.to_string()).or_default().push(HttpResponse { status, body: body.to_string() });
        }

        pub fn requests(&self) -> usize {
            self.log.lock().unwrap().len()
        }
    }

    impl Fetch for CannedFetcher {
        fn get(&self, url: &str) -> Result<HttpResponse, FetchError> {
            self.log.lock().unwrap().push((url.to_string(), Instant::now()));
            let mut pages = self.pages.lock().unwrap();
            match pages.get_mut(url) {
                Some(queue) if queue.len() > 1 => Ok(queue.remove(0)),
                Some(queue) => Ok(queue[0].clone()),
                None => Ok(HttpResponse { status: 404, body: "Page Not Found".into() }),
            }
        }
    }

    /// Client with millisecond rate limiting and backoff.
    pub fn fast_client(mock: Arc<CannedFetcher>) -> PoliteClient {
        PoliteClient::new(mock, Arc::new(RateLimiter::new(Duration::from_millis(1))), RetryPolicy { max_retries: 2, base_delay: Duration::from_millis(1) })
    }
}
