//! Words over the two-letter alphabet {x, y} and their z-sequence form.
//!
//! A word of weight k with d letters `y` corresponds to a monomial in the
//! non-commutative polynomial ring Q<x,y>. Words ending in `y` (or empty)
//! live in H1 and factor uniquely as z_{k_1}...z_{k_N} with z_p = x^{p-1}y;
//! words that additionally start with `x` are admissible (H0).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Letter {
    X,
    Y,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.len()
    }

    pub fn depth(&self) -> usize {
        self.0.iter().filter(|&&l| l == Letter::Y).count()
    }

    pub fn is_h1(&self) -> bool {
        self.0.is_empty() || *self.0.last().unwrap() == Letter::Y
    }

    pub fn is_admissible(&self) -> bool {
        self.0.is_empty() || (self.0[0] == Letter::X && *self.0.last().unwrap() == Letter::Y)
    }

    pub fn prepend(&self, l: Letter) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(l);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// Prepends z_p = x^{p-1} y.
    pub fn prepend_z(&self, p: i64) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + p as usize);
        for _ in 0..p - 1 {
            v.push(Letter::X);
        }
        v.push(Letter::Y);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// z-sequence (k_1, ..., k_N) such that the word equals z_{k_1}...z_{k_N},
    /// read left to right. Requires the word to be in H1.
    pub fn to_zseq(&self) -> Result<Vec<i64>> {
        if !self.is_h1() {
            return Err(Error::NotInH1(self.to_string()));
        }
        let mut out = Vec::new();
        let mut run = 0i64;
        for &l in &self.0 {
            match l {
                Letter::X => run += 1,
                Letter::Y => {
                    out.push(run + 1);
                    run = 0;
                }
            }
        }
        Ok(out)
    }

    /// Inverse of `to_zseq`: z_{k_1}...z_{k_N} as a word. Entries must be >= 1.
    pub fn from_zseq(zs: &[i64]) -> Word {
        let mut v = Vec::new();
        for &k in zs {
            assert!(k >= 1, "z-sequence entries must be >= 1, got {k}");
            for _ in 0..(k - 1) {
                v.push(Letter::X);
            }
            v.push(Letter::Y);
        }
        Word(v)
    }
}

pub fn word_to_zseq(w: &Word) -> Result<Vec<i64>> {
    w.to_zseq()
}

pub fn zseq_to_word(zs: &[i64]) -> Word {
    Word::from_zseq(zs)
}

pub fn is_admissible(w: &Word) -> bool {
    w.is_admissible()
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for &l in &self.0 {
            match l {
                Letter::X => write!(f, "x")?,
                Letter::Y => write!(f, "y")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts "xy"-style letter strings, z-notation ("z2z1", "z3 z2"),
    /// and "1" or "" for the empty word.
    fn from_str(s: &str) -> Result<Word> {
        let t = s.trim();
        if t.is_empty() || t == "1" {
            return Ok(Word::empty());
        }
        if t.starts_with('z') || t.starts_with('Z') {
            let mut zs = Vec::new();
            let mut chars = t.chars().peekable();
            while let Some(c) = chars.next() {
                if c.is_whitespace() {
                    continue;
                }
                if c != 'z' && c != 'Z' {
                    return Err(Error::Parse(format!("bad z-notation: {s}")));
                }
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let k: i64 = digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad z-notation: {s}")))?;
                if k < 1 {
                    return Err(Error::Parse(format!("z index must be >= 1: {s}")));
                }
                zs.push(k);
            }
            return Ok(Word::from_zseq(&zs));
        }
        let mut v = Vec::new();
        for c in t.chars() {
            match c {
                'x' | 'X' => v.push(Letter::X),
                'y' | 'Y' => v.push(Letter::Y),
                c if c.is_whitespace() => {}
                _ => return Err(Error::Parse(format!("bad word: {s}"))),
            }
        }
        Ok(Word(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zseq_round_trip() {
        let w: Word = "xxyxyy".parse().unwrap();
        assert_eq!(w.to_zseq().unwrap(), vec![3, 2, 1]);
        assert_eq!(Word::from_zseq(&[3, 2, 1]), w);
        let w2: Word = "xy".parse().unwrap();
        assert_eq!(w2.to_zseq().unwrap(), vec![2]);
    }

    #[test]
    fn zseq_rejects_non_h1() {
        let w: Word = "yx".parse().unwrap();
        assert!(matches!(w.to_zseq(), Err(Error::NotInH1(_))));
    }

    #[test]
    fn admissibility() {
        let check = |s: &str| s.parse::<Word>().unwrap().is_admissible();
        assert!(check("xy"));
        assert!(!check("y"));
        assert!(check("xyy"));
        assert!(check("1"));
        assert!(!check("xyx"));
    }

    #[test]
    fn z_notation_parse() {
        let a: Word = "z3z2".parse().unwrap();
        let b: Word = "z3 z2".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "xxyxy");
    }

    #[test]
    fn weight_and_depth() {
        let w: Word = "xxyxyy".parse().unwrap();
        assert_eq!(w.weight(), 6);
        assert_eq!(w.depth(), 3);
    }
}
