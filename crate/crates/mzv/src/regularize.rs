//! Shuffle regularization: the unique extension of the evaluation map from
//! admissible words to all of H^1, valued in polynomials in T.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::algebra::{shuffle, stuffle};
use crate::error::{Error, Result};
use crate::index::z_map;
use crate::lincomb::{rational_to_string, LinComb};
use crate::relations::{Provenance, Relation, ZetaTerm};
use crate::words::{Letter, Word};

/// Polynomial in T whose coefficients are combinations of admissible words.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TPoly {
    coeffs: BTreeMap<usize, LinComb<Word>>,
}

impl TPoly {
    pub fn zero() -> Self {
        TPoly::default()
    }

    pub fn constant(c: LinComb<Word>) -> Self {
        let mut p = TPoly::zero();
        p.add_in(0, &c);
        p
    }

    /// The monomial T.
    pub fn t() -> Self {
        let mut p = TPoly::zero();
        p.add_in(1, &LinComb::singleton(Word::empty()));
        p
    }

    pub fn coeff(&self, degree: usize) -> LinComb<Word> {
        self.coeffs
            .get(&degree)
            .cloned()
            .unwrap_or_else(LinComb::zero)
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_in(&mut self, degree: usize, c: &LinComb<Word>) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(degree).or_insert_with(LinComb::zero);
        *entry = entry.add(c);
        if entry.is_zero() {
            self.coeffs.remove(&degree);
        }
    }

    pub fn add(&self, other: &TPoly) -> TPoly {
        let mut out = self.clone();
        for (d, c) in &other.coeffs {
            out.add_in(*d, c);
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> TPoly {
        let mut out = TPoly::zero();
        for (d, lc) in &self.coeffs {
            out.add_in(*d, &lc.scale(c));
        }
        out
    }

    /// Product; coefficients multiply by the shuffle product.
    pub fn mul(&self, other: &TPoly) -> TPoly {
        let mut out = TPoly::zero();
        for (d1, c1) in &self.coeffs {
            for (d2, c2) in &other.coeffs {
                out.add_in(d1 + d2, &shuffle(c1, c2));
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!(self
            .coeffs
            .iter()
            .map(|(d, c)| {
                json!({
                    "t_power": d,
                    "terms": c.iter().map(|(w, q)| json!({
                        "coeff": rational_to_string(q),
                        "word": w.to_string(),
                    })).collect::<Vec<_>>(),
                })
            })
            .collect::<Vec<_>>())
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .rev()
            .map(|(d, c)| match d {
                0 => format!("({c})"),
                1 => format!("T*({c})"),
                _ => format!("T^{d}*({c})"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn regularize_word(w: &Word, memo: &mut HashMap<Word, TPoly>) -> Result<TPoly> {
    if let Some(p) = memo.get(w) {
        return Ok(p.clone());
    }
    if !w.is_h1() {
        return Err(Error::NotInH1(w.to_string()));
    }
    let result = if w.is_empty() || w.is_admissible() {
        TPoly::constant(LinComb::singleton(w.clone()))
    } else {
        // Non-admissible H^1 words start with y: w = y u. From
        // y sh u = c w + R (c the multiplicity of w itself), the image of w
        // is (T * image(u) - image(R)) / c. Every word of R moves its
        // leading y strictly later, so the recursion terminates.
        let u = Word::from_letters(w.letters()[1..].to_vec());
        let s = shuffle(
            &LinComb::singleton(Word::from_letters(vec![Letter::Y])),
            &LinComb::singleton(u.clone()),
        );
        let c = s.coeff(w);
        debug_assert!(!c.is_zero());
        let mut r = s;
        r.add_term(w.clone(), -c.clone());
        let reg_u = regularize_word(&u, memo)?;
        let mut reg_r = TPoly::zero();
        for (rw, rc) in r.iter() {
            reg_r = reg_r.add(&regularize_word(rw, memo)?.scale(rc));
        }
        TPoly::t()
            .mul(&reg_u)
            .add(&reg_r.scale(&-BigRational::one()))
            .scale(&(BigRational::one() / c))
    };
    memo.insert(w.clone(), result.clone());
    Ok(result)
}

/// Image of an H^1 combination in the polynomial algebra in T over
/// admissible-word combinations.
pub fn shuffle_regularize(w: &LinComb<Word>) -> Result<TPoly> {
    let mut memo = HashMap::new();
    let mut out = TPoly::zero();
    for (word, c) in w.iter() {
        out = out.add(&regularize_word(word, &mut memo)?.scale(c));
    }
    Ok(out)
}

/// Extended double shuffle relations: the regularized image of
/// w1 * w2 - w1 sh w2 vanishes coefficient-wise in T.
pub fn extended_dsr(w1: &Word, w2: &Word) -> Result<Vec<Relation>> {
    if !w1.is_h1() {
        return Err(Error::NotInH1(w1.to_string()));
    }
    if !w2.is_admissible() {
        return Err(Error::NotInH0(w2.to_string()));
    }
    let c1 = LinComb::singleton(w1.clone());
    let c2 = LinComb::singleton(w2.clone());
    let diff = stuffle(&c1, &c2)?.sub(&shuffle(&c1, &c2));
    let reg = shuffle_regularize(&diff)?;
    let weight = (w1.weight() + w2.weight()) as i64;
    let provenance = |d: usize| Provenance::ExtendedDsr {
        w1: w1.to_string(),
        w2: w2.to_string(),
        t_power: d,
    };
    if reg.is_zero() {
        return Ok(vec![Relation {
            terms: LinComb::zero(),
            provenance: provenance(0),
            weight: Some(weight),
        }]);
    }
    let mut out = Vec::new();
    for d in reg.degrees().collect::<Vec<_>>() {
        let terms = reg.coeff(d).try_map_keys(|w| z_map(w).map(ZetaTerm::Mzv))?;
        out.push(Relation {
            terms,
            provenance: provenance(d),
            weight: Some(weight),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::MzvIndex;

    fn reg(s: &str) -> TPoly {
        shuffle_regularize(&LinComb::singleton(s.parse().unwrap())).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn y_maps_to_t() {
        assert_eq!(reg("y"), TPoly::t());
    }

    #[test]
    fn admissible_words_are_fixed() {
        let p = reg("xxyy");
        assert_eq!(p.degree(), Some(0));
        assert_eq!(p.coeff(0), LinComb::singleton("xxyy".parse().unwrap()));
    }

    #[test]
    fn yxy_regularizes_to_t_z2_minus_2_z3z1() {
        let p = reg("yxy");
        let mut want1 = LinComb::zero();
        want1.add_term("xy".parse().unwrap(), q(1, 1));
        let mut want0 = LinComb::zero();
        want0.add_term("xyy".parse().unwrap(), q(-2, 1));
        assert_eq!(p.coeff(1), want1);
        assert_eq!(p.coeff(0), want0);
    }

    #[test]
    fn powers_of_y_give_t_powers_over_factorials() {
        let p = reg("yy");
        assert_eq!(
            p.coeff(2),
            LinComb::singleton(Word::empty()).scale(&q(1, 2))
        );
        assert_eq!(p.degree(), Some(2));
        assert!(p.coeff(0).is_zero() && p.coeff(1).is_zero());
        let p = reg("yyy");
        assert_eq!(
            p.coeff(3),
            LinComb::singleton(Word::empty()).scale(&q(1, 6))
        );
    }

    #[test]
    fn homomorphism_on_shuffles() {
        let pairs = [("y", "xy"), ("yy", "xy"), ("yxy", "xxy"), ("xyy", "yxy")];
        for (a, b) in pairs {
            let wa: Word = a.parse().unwrap();
            let wb: Word = b.parse().unwrap();
            let prod = shuffle(&LinComb::singleton(wa), &LinComb::singleton(wb));
            let lhs = shuffle_regularize(&prod).unwrap();
            let rhs = reg(a).mul(&reg(b));
            assert_eq!(lhs, rhs, "a={a} b={b}");
        }
    }

    #[test]
    fn extended_dsr_z1_z2_gives_euler() {
        let rels = extended_dsr(&"y".parse().unwrap(), &"xy".parse().unwrap()).unwrap();
        assert_eq!(rels.len(), 1);
        let mut want = LinComb::zero();
        want.add_term(ZetaTerm::Mzv(MzvIndex::from_ints(&[3])), q(1, 1));
        want.add_term(ZetaTerm::Mzv(MzvIndex::from_ints(&[2, 1])), q(-1, 1));
        assert_eq!(rels[0].terms, want);
    }

    #[test]
    fn extended_dsr_h0_input_matches_finite() {
        let w1: Word = "xy".parse().unwrap();
        let w2: Word = "xy".parse().unwrap();
        let rels = extended_dsr(&w1, &w2).unwrap();
        assert_eq!(rels.len(), 1);
        let fin = crate::relations::finite_dsr(&w1, &w2).unwrap();
        assert_eq!(rels[0].terms, fin.terms);
    }
}
