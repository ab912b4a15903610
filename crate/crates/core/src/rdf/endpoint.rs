use std::time::Duration;

use base64::Engine as _;

use crate::error::{Error, Result};

pub const ENV_ENDPOINT: &str = "UDC_SPARQL_ENDPOINT";
pub const ENV_TOKEN: &str = "UDC_SPARQL_TOKEN";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Auth {
    Bearer(String),
    Basic { user: String, password: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointConfig {
    pub url: String,
    pub auth: Option<Auth>,
    pub timeout: Duration,
}

impl EndpointConfig {
    pub fn new(url: impl Into<String>) -> Self {
        Self {
            url: url.into(),
            auth: None,
            timeout: Duration::from_secs(30),
        }
    }

    /// Reads `UDC_SPARQL_ENDPOINT` and, when set, `UDC_SPARQL_TOKEN`. A token
    /// of the form `user:password` is sent as basic credentials.
    pub fn from_env() -> Option<Self> {
        let url = std::env::var(ENV_ENDPOINT).ok().filter(|u| !u.is_empty())?;
        let mut cfg = Self::new(url);
        cfg.auth = std::env::var(ENV_TOKEN).ok().filter(|t| !t.is_empty()).map(|t| parse_token(&t));
        Some(cfg)
    }
}

pub fn parse_token(t: &str) -> Auth {
    match t.split_once(':') {
        Some((user, password)) => Auth::Basic {
            user: user.to_string(),
            password: password.to_string(),
        },
        None => Auth::Bearer(t.to_string()),
    }
}

const EXCERPT_LEN: usize = 200;

/// POSTs an update script. Any 2xx is success.
pub fn push_update(cfg: &EndpointConfig, script: &str) -> Result<()> {
    let agent = ureq::AgentBuilder::new().timeout(cfg.timeout).build();
    let mut req = agent.post(&cfg.url).set("Content-Type", "application/sparql-update");
    match &cfg.auth {
        Some(Auth::Bearer(t)) => req = req.set("Authorization", &format!("Bearer {t}")),
        Some(Auth::Basic { user, password }) => {
            let enc = base64::engine::general_purpose::STANDARD.encode(format!("{user}:{password}"));
            req = req.set("Authorization", &format!("Basic {enc}"));
        }
        None => {}
    }
    match req.send_string(script) {
        Ok(_) => Ok(()),
        Err(ureq::Error::Status(status, resp)) => {
            let body = resp.into_string().unwrap_or_default();
            Err(Error::EndpointError {
                status,
                excerpt: body.chars().take(EXCERPT_LEN).collect(),
            })
        }
        Err(e) => Err(Error::Transport(e.to_string())),
    }
}
