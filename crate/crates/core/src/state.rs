use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A state identifier. Product states are flat tuples of component state
/// names, so products of products need no re-bracketing.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(Arc<[Arc<str>]>);

fn is_state_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl StateId {
    pub fn new(name: &str) -> Result<Self> {
        if is_state_name(name) {
            Ok(StateId(Arc::from(vec![Arc::from(name)])))
        } else {
            Err(Error::InvalidName(name.to_string()))
        }
    }

    /// Concatenates component identifiers into one flat tuple.
    pub fn tuple<'a>(parts: impl IntoIterator<Item = &'a StateId>) -> Self {
        let names: Vec<Arc<str>> = parts.into_iter().flat_map(|p| p.0.iter().cloned()).collect();
        StateId(Arc::from(names))
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|s| &**s)
    }

    /// The sub-tuple `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> StateId {
        StateId(Arc::from(self.0[start..start + len].to_vec()))
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return f.write_str(&self.0[0]);
        }
        f.write_str("(")?;
        for (i, part) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(part)?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for StateId {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::InvalidName(text.to_string());
        if let Some(inner) = text.strip_prefix('(') {
            let inner = inner.strip_suffix(')').ok_or_else(bad)?;
            let parts: Vec<Arc<str>> = inner.split(',').map(Arc::from).collect();
            if parts.len() < 2 || !parts.iter().all(|p| is_state_name(p)) {
                return Err(bad());
            }
            Ok(StateId(Arc::from(parts)))
        } else {
            StateId::new(text)
        }
    }
}

/// Shorthand for literals in tests and examples; panics on malformed input.
pub fn sid(text: &str) -> StateId {
    text.parse().expect("valid state identifier")
}
