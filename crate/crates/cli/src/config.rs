//! JSON loading with diagnostics that name the offending field.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use mrs_core::rational::{parse_q, Q};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

pub fn read_value(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))
}

/// A config file as a JSON object, or an empty object when none is given.
pub fn read_object(path: Option<&Path>) -> Result<Map<String, Value>> {
    match path {
        None => Ok(Map::new()),
        Some(p) => match read_value(p)? {
            Value::Object(m) => Ok(m),
            _ => bail!("{}: expected a JSON object", p.display()),
        },
    }
}

pub fn from_value<T: DeserializeOwned>(value: Value, what: &str) -> Result<T> {
    let original = value.clone();
    serde_path_to_error::deserialize::<_, T>(value).map_err(|e| {
        let mut path = e.path().to_string();
        let inner = e.inner().to_string();
        if let Some(key) =
            pointer(&original, &path).and_then(|v| culprit::<T>(&original, &path, v, &inner))
        {
            path = if path == "." {
                key
            } else {
                format!("{path}.{key}")
            };
        }
        if path == "." {
            anyhow!("{what}: {inner}")
        } else {
            anyhow!("{what}: field `{path}`: {inner}")
        }
    })
}

fn pointer<'a>(root: &'a Value, path: &str) -> Option<&'a Value> {
    if path == "." {
        Some(root)
    } else {
        root.pointer(&pointer_path(path))
    }
}

/// Tagged objects (code specs) lose the inner field path. Finds the key
/// whose removal changes the error, which is the one that caused it.
fn culprit<T: DeserializeOwned>(
    root: &Value,
    path: &str,
    at: &Value,
    inner: &str,
) -> Option<String> {
    let obj = at.as_object()?;
    if !obj.contains_key("family") {
        return None;
    }
    obj.keys().filter(|k| *k != "family").find_map(|key| {
        let mut probe = root.clone();
        let target = if path == "." {
            &mut probe
        } else {
            probe.pointer_mut(&pointer_path(path))?
        };
        target.as_object_mut()?.remove(key);
        match serde_json::from_value::<T>(probe) {
            Err(e) if e.to_string().starts_with(inner) => None,
            _ => Some(key.clone()),
        }
    })
}

fn pointer_path(path: &str) -> String {
    path.split('.')
        .flat_map(|seg| seg.split(['[', ']']).filter(|s| !s.is_empty()))
        .fold(String::new(), |acc, s| acc + "/" + s)
}

pub fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            anyhow!("{what}: {}", e.inner())
        } else {
            anyhow!("{what}: field `{path}`: {}", e.inner())
        }
    })
}

/// Seed used when neither a flag nor the config sets one.
pub fn default_seed() -> Result<u64> {
    match std::env::var("MRS_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| anyhow!("MRS_SEED must be an unsigned integer, got `{s}`")),
        Err(_) => Ok(0),
    }
}

/// Fills `seed` in a config object: the flag wins, then the config's own
/// value, then `MRS_SEED`, then 0.
pub fn resolve_seed(obj: &mut Map<String, Value>, flag: Option<u64>) -> Result<()> {
    if let Some(s) = flag {
        obj.insert("seed".into(), s.into());
    } else if !obj.contains_key("seed") {
        obj.insert("seed".into(), default_seed()?.into());
    }
    Ok(())
}

/// Inserts `value` under `key` when the flag was given.
pub fn set<T: Into<Value>>(obj: &mut Map<String, Value>, key: &str, value: Option<T>) {
    if let Some(v) = value {
        obj.insert(key.into(), v.into());
    }
}

pub fn set_file(obj: &mut Map<String, Value>, key: &str, path: Option<&Path>) -> Result<()> {
    if let Some(p) = path {
        obj.insert(key.into(), read_value(p)?);
    }
    Ok(())
}

pub fn rational(s: &str) -> Result<Q, String> {
    parse_q(s)
}
