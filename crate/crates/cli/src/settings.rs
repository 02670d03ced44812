//! Flat key-value configuration. Values come from a TOML file, then `--set
//! key=value` pairs, then dedicated flags; later sources win. Every key an
//! experiment reads is recorded with its effective value so that the run can
//! be replayed from the manifest alone.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;

use crate::CliError;

#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, Value>,
    resolved: RefCell<BTreeMap<String, Value>>,
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn from_toml(v: toml::Value) -> Result<Value, CliError> {
    Ok(match v {
        toml::Value::String(s) => Value::from(s),
        toml::Value::Integer(i) => Value::from(i),
        toml::Value::Float(f) => Value::from(f),
        toml::Value::Boolean(b) => Value::from(b),
        toml::Value::Array(a) => {
            Value::Array(a.into_iter().map(from_toml).collect::<Result<_, _>>()?)
        }
        toml::Value::Datetime(_) | toml::Value::Table(_) => {
            return usage("config values must be numbers, strings, booleans or arrays")
        }
    })
}

/// Parses the right-hand side of `key = value`; bare words are strings.
pub fn parse_value(raw: &str) -> Result<Value, CliError> {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => from_toml(t.remove("v").expect("key present")),
        Err(_) => Ok(Value::from(raw)),
    }
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let table: toml::Table = text
            .parse()
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let mut s = Self::default();
        for (k, v) in table {
            if matches!(v, toml::Value::Table(_)) {
                return usage(format!("config is flat; section [{k}] is not allowed"));
            }
            s.values.insert(k, from_toml(v)?);
        }
        Ok(s)
    }

    pub fn from_map(values: BTreeMap<String, Value>) -> Self {
        Self {
            values,
            resolved: RefCell::default(),
        }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.values.insert(key.to_string(), value);
    }

    /// Applies `key=value` strings.
    pub fn apply_pairs(&mut self, pairs: &[String]) -> Result<(), CliError> {
        for p in pairs {
            let Some((k, v)) = p.split_once('=') else {
                return usage(format!("--set expects key=value, got {p:?}"));
            };
            self.set(k.trim(), parse_value(v.trim())?);
        }
        Ok(())
    }

    /// Removes a key that steers dispatch rather than the experiment.
    pub fn take(&mut self, key: &str) -> Option<Value> {
        self.values.remove(key)
    }

    fn get(&self, key: &str, default: Value) -> Value {
        let v = self.values.get(key).cloned().unwrap_or(default);
        self.resolved
            .borrow_mut()
            .insert(key.to_string(), v.clone());
        v
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.get(key, Value::from(default)).as_f64() {
            Some(x) if x.is_finite() => Ok(x),
            _ => usage(format!("{key} must be a finite number")),
        }
    }

    /// A number that may be absent; absence is recorded as `null`.
    pub fn opt_f64(&self, key: &str, default: Option<f64>) -> Result<Option<f64>, CliError> {
        match self.get(key, default.map_or(Value::Null, Value::from)) {
            Value::Null => Ok(None),
            v => match v.as_f64() {
                Some(x) if x.is_finite() => Ok(Some(x)),
                _ => usage(format!("{key} must be a finite number")),
            },
        }
    }

    pub fn u64(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.get(key, Value::from(default)).as_u64() {
            Some(x) => Ok(x),
            None => usage(format!("{key} must be a nonnegative integer")),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        Ok(self.u64(key, default as u64)? as usize)
    }

    pub fn string(&self, key: &str, default: &str) -> Result<String, CliError> {
        match self.get(key, Value::from(default)) {
            Value::String(s) => Ok(s),
            _ => usage(format!("{key} must be a string")),
        }
    }

    pub fn bool(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.get(key, Value::from(default)).as_bool() {
            Some(b) => Ok(b),
            None => usage(format!("{key} must be true or false")),
        }
    }

    /// A list of numbers; a comma-separated string is accepted too.
    pub fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let bad = || CliError::Usage(format!("{key} must be a list of numbers"));
        let v = match self.values.get(key) {
            Some(Value::String(s)) => Value::Array(
                s.split(',')
                    .map(|p| p.trim().parse::<f64>().map(Value::from).map_err(|_| bad()))
                    .collect::<Result<_, _>>()?,
            ),
            Some(v) => v.clone(),
            None => Value::from(default.to_vec()),
        };
        let list = v
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|x| x.as_f64().filter(|f| f.is_finite()).ok_or_else(bad))
            .collect::<Result<Vec<_>, _>>()?;
        self.resolved
            .borrow_mut()
            .insert(key.to_string(), Value::from(list.clone()));
        Ok(list)
    }

    /// Fails on keys that no part of the experiment read.
    pub fn reject_unknown(&self) -> Result<(), CliError> {
        let resolved = self.resolved.borrow();
        let unknown: Vec<&str> = self
            .values
            .keys()
            .filter(|k| !resolved.contains_key(*k))
            .map(String::as_str)
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            usage(format!("unknown config keys: {}", unknown.join(", ")))
        }
    }

    /// Effective values of every key read so far.
    pub fn resolved(&self) -> BTreeMap<String, Value> {
        self.resolved.borrow().clone()
    }
}
