//! Plain-text `key = value` files. `#` starts a comment; blank lines are
//! ignored; a key may appear only once.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct KvError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

pub fn parse(text: &str) -> Result<Vec<Entry>, KvError> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(KvError { line, message: format!("expected `key = value`, found `{body}`") });
        };
        let (key, value) = (k.trim(), v.trim());
        if key.is_empty() {
            return Err(KvError { line, message: "empty key".into() });
        }
        if let Some(prev) = out.iter().find(|e| e.key == key) {
            return Err(KvError { line, message: format!("`{key}` already set on line {}", prev.line) });
        }
        out.push(Entry { line, key: key.to_string(), value: value.to_string() });
    }
    Ok(out)
}

impl Entry {
    pub fn number(&self) -> Result<f64, KvError> {
        self.value
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.error(format!("`{}` is not a number", self.value)))
    }

    pub fn numbers(&self) -> Result<Vec<f64>, KvError> {
        self.value
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| self.error(format!("`{s}` is not a number")))
            })
            .collect()
    }

    pub fn error(&self, message: String) -> KvError {
        KvError { line: self.line, message: format!("{}: {message}", self.key) }
    }
}
