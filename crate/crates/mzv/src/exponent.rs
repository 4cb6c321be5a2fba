//! Exponents that are either integers or integer offsets of named real slots.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Values bound to slot names at evaluation time.
pub type Bindings = BTreeMap<String, f64>;

/// An exponent of the form `offset + s_a + s_b + ...` where the slots are
/// formal real parameters. A plain integer has no slots.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent {
    pub offset: i64,
    pub slots: Vec<String>,
}

impl Exponent {
    pub fn int(n: i64) -> Self {
        Exponent {
            offset: n,
            slots: Vec::new(),
        }
    }

    pub fn slot(name: &str) -> Self {
        Exponent {
            offset: 0,
            slots: vec![name.to_string()],
        }
    }

    pub fn is_int(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.offset == 0 && self.slots.is_empty()
    }

    pub fn as_int(&self) -> Option<i64> {
        if self.slots.is_empty() {
            Some(self.offset)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        let mut slots = self.slots.clone();
        slots.extend(other.slots.iter().cloned());
        slots.sort();
        Exponent {
            offset: self.offset + other.offset,
            slots,
        }
    }

    pub fn add_int(&self, n: i64) -> Exponent {
        Exponent {
            offset: self.offset + n,
            slots: self.slots.clone(),
        }
    }

    /// Numeric value under the given slot bindings.
    pub fn bind(&self, bindings: &Bindings) -> Result<f64> {
        let mut v = self.offset as f64;
        for s in &self.slots {
            v += bindings
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnboundSlot(s.clone()))?;
        }
        Ok(v)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.slots.is_empty() {
            return write!(f, "{}", self.offset);
        }
        let mut parts: Vec<String> = self.slots.clone();
        if self.offset != 0 {
            parts.insert(0, self.offset.to_string());
        }
        write!(f, "{}", parts.join("+"))
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut offset = 0i64;
        let mut slots = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            if part.is_empty() {
                return Err(Error::Parse(format!("bad exponent: {s:?}")));
            }
            if let Ok(n) = part.parse::<i64>() {
                offset += n;
            } else if !part.is_empty()
                && part.chars().next().unwrap().is_ascii_alphabetic()
                && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                slots.push(part.to_string());
            } else {
                return Err(Error::Parse(format!("bad exponent: {s:?}")));
            }
        }
        slots.sort();
        Ok(Exponent { offset, slots })
    }
}
