//! Finite formal Q-linear combinations with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A finite map from keys to nonzero rational coefficients.
/// Term order follows `K: Ord`, which gives deterministic iteration
/// and serialization.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LinComb<K: Ord + Clone> {
    terms: BTreeMap<K, BigRational>,
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn zero() -> Self {
        LinComb {
            terms: BTreeMap::new(),
        }
    }

    pub fn singleton(k: K) -> Self {
        let mut t = BTreeMap::new();
        t.insert(k, BigRational::one());
        LinComb { terms: t }
    }

    pub fn from_terms<I: IntoIterator<Item = (BigRational, K)>>(it: I) -> Self {
        let mut lc = LinComb::zero();
        for (c, k) in it {
            lc.add_term(k, c);
        }
        lc
    }

    pub fn add_term(&mut self, k: K, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(k);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: &K) -> BigRational {
        self.terms.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &BigRational)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn remove(&mut self, k: &K) -> Option<BigRational> {
        self.terms.remove(k)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.iter() {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.iter() {
            out.add_term(k.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return LinComb::zero();
        }
        LinComb {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(c.clone()))
    }

    pub fn map_keys<J: Ord + Clone, F: FnMut(&K) -> J>(&self, mut f: F) -> LinComb<J> {
        let mut out = LinComb::zero();
        for (k, c) in self.iter() {
            out.add_term(f(k), c.clone());
        }
        out
    }

    pub fn try_map_keys<J: Ord + Clone, E, F: FnMut(&K) -> std::result::Result<J, E>>(
        &self,
        mut f: F,
    ) -> std::result::Result<LinComb<J>, E> {
        let mut out = LinComb::zero();
        for (k, c) in self.iter() {
            out.add_term(f(k)?, c.clone());
        }
        Ok(out)
    }

    /// Sum of all coefficients.
    pub fn coeff_sum(&self) -> BigRational {
        let mut s = BigRational::zero();
        for (_, c) in self.iter() {
            s += c;
        }
        s
    }
}

impl<K: Ord + Clone + fmt::Display> fmt::Display for LinComb<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.iter() {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if a.is_one() {
                write!(f, "{k}")?;
            } else {
                write!(f, "{a}*{k}")?;
            }
        }
        Ok(())
    }
}

/// "a/b" when the denominator is not 1, otherwise just "a".
pub fn rational_to_string(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn rational_from_str(s: &str) -> Option<BigRational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = t.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}
