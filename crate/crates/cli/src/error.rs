use std::fmt;

use serde_json::{json, Value};

use une::bigraph::GraphError;
use une::gadget::GadgetError;
use une::io::IoError;
use une::nbwalk::NbError;
use une::params::ParamError;
use une::product::ProductError;
use une::spectral::SpectralError;

pub mod code {
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
    pub const PARSE: u8 = 4;
    pub const DOMAIN: u8 = 5;
    pub const CHECK_FAILED: u8 = 6;
    pub const BUDGET: u8 = 7;
    pub const NOT_RAMANUJAN: u8 = 10;
    pub const GADGET_FAILED: u8 = 11;
    pub const PRODUCT_FAILED: u8 = 12;
    pub const AUDIT_FAILED: u8 = 13;
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
    pub detail: Option<Value>,
}

impl CliError {
    pub fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            kind,
            message: message.into(),
            detail: None,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(code::USAGE, "usage", message)
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }

    pub fn to_json(&self) -> Value {
        let mut err = json!({ "kind": self.kind, "message": self.message });
        if let Some(d) = &self.detail {
            err["detail"] = d.clone();
        }
        json!({ "error": err })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Io { .. } => CliError::new(code::IO, "io", e.to_string()),
            IoError::Parse { .. } => CliError::new(code::PARSE, "parse", e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(code::IO, "io", e.to_string())
    }
}

macro_rules! domain_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::new(code::DOMAIN, "domain", e.to_string())
            }
        }
    )*};
}

domain_error!(GraphError, SpectralError, ProductError);

impl From<NbError> for CliError {
    fn from(e: NbError) -> Self {
        match e {
            NbError::BudgetExceeded { .. } => CliError::new(code::BUDGET, "budget", e.to_string()),
            _ => CliError::new(code::DOMAIN, "domain", e.to_string()),
        }
    }
}

impl From<GadgetError> for CliError {
    fn from(e: GadgetError) -> Self {
        CliError::new(code::DOMAIN, "domain", e.to_string())
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        let err = CliError::new(code::DOMAIN, "domain", e.to_string());
        match e {
            ParamError::QBelowThreshold { sheet, .. } => {
                err.with_detail(serde_json::to_value(*sheet).expect("serializable"))
            }
            _ => err,
        }
    }
}
