//! Shuffle and harmonic products, plus the closed-form shuffle step.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lincomb::LinComb;
use crate::words::{Letter, Word};

/// Exact binomial coefficient.
pub fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n {
        return BigInt::from(0);
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

fn shuffle_words(w1: &[Letter], w2: &[Letter]) -> LinComb<Word> {
    if w1.is_empty() {
        return LinComb::singleton(Word::from_letters(w2.to_vec()));
    }
    if w2.is_empty() {
        return LinComb::singleton(Word::from_letters(w1.to_vec()));
    }
    let a = shuffle_words(&w1[1..], w2).map_keys(|w| w.prepend(w1[0]));
    let b = shuffle_words(w1, &w2[1..]).map_keys(|w| w.prepend(w2[0]));
    a.add(&b)
}

/// Shuffle product, extended bilinearly to all of H.
pub fn shuffle(w1: &LinComb<Word>, w2: &LinComb<Word>) -> LinComb<Word> {
    let mut out = LinComb::zero();
    for (u, cu) in w1.iter() {
        for (v, cv) in w2.iter() {
            let prod = shuffle_words(u.letters(), v.letters());
            out = out.add(&prod.scale(&(cu * cv)));
        }
    }
    out
}

fn stuffle_zseqs(a: &[i64], b: &[i64]) -> LinComb<Word> {
    if a.is_empty() {
        return LinComb::singleton(Word::from_zseq(b));
    }
    if b.is_empty() {
        return LinComb::singleton(Word::from_zseq(a));
    }
    let p = a[0];
    let q = b[0];
    let mut out = stuffle_zseqs(&a[1..], b).map_keys(|w| w.prepend_z(p));
    out = out.add(&stuffle_zseqs(a, &b[1..]).map_keys(|w| w.prepend_z(q)));
    out.add(&stuffle_zseqs(&a[1..], &b[1..]).map_keys(|w| w.prepend_z(p + q)))
}

/// Harmonic (stuffle) product on H^1, extended bilinearly.
pub fn stuffle(w1: &LinComb<Word>, w2: &LinComb<Word>) -> Result<LinComb<Word>> {
    let mut out = LinComb::zero();
    for (u, cu) in w1.iter() {
        for (v, cv) in w2.iter() {
            let a = u.to_zseq()?;
            let b = v.to_zseq()?;
            let prod = stuffle_zseqs(&a, &b);
            out = out.add(&prod.scale(&(cu * cv)));
        }
    }
    Ok(out)
}

/// One term produced by a single shuffle step: coeff · z_prefix · (left ⧢ right).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepTerm {
    pub coeff: BigInt,
    pub prefix: i64,
    pub left: Vec<i64>,
    pub right: Vec<i64>,
}

/// Closed-form single shuffle step on a pair of z-sequences (head entry first).
/// Produces exactly right[0] + left[0] terms.
pub fn shuffle_step(left: &[i64], right: &[i64]) -> Result<Vec<StepTerm>> {
    if left.is_empty() || right.is_empty() {
        return Err(Error::EmptyStepFactor);
    }
    let pa = left[0];
    let qb = right[0];
    let mut out = Vec::with_capacity((pa + qb) as usize);
    for tau in 0..qb {
        let mut r = Vec::with_capacity(right.len());
        r.push(qb - tau);
        r.extend_from_slice(&right[1..]);
        out.push(StepTerm {
            coeff: binom(pa - 1 + tau, tau),
            prefix: pa + tau,
            left: left[1..].to_vec(),
            right: r,
        });
    }
    for tau in 0..pa {
        let mut l = Vec::with_capacity(left.len());
        l.push(pa - tau);
        l.extend_from_slice(&left[1..]);
        out.push(StepTerm {
            coeff: binom(qb - 1 + tau, tau),
            prefix: qb + tau,
            left: l,
            right: right[1..].to_vec(),
        });
    }
    Ok(out)
}

/// Full expansion of left ⧢ right via repeated shuffle steps.
/// Oracle counterpart of `shuffle` on z-sequences.
pub fn shuffle_zseqs_via_steps(left: &[i64], right: &[i64]) -> LinComb<Word> {
    if left.is_empty() {
        return LinComb::singleton(Word::from_zseq(right));
    }
    if right.is_empty() {
        return LinComb::singleton(Word::from_zseq(left));
    }
    let mut out = LinComb::zero();
    for t in shuffle_step(left, right).expect("nonempty factors") {
        let sub = shuffle_zseqs_via_steps(&t.left, &t.right).map_keys(|w| w.prepend_z(t.prefix));
        out = out.add(&sub.scale(&BigRational::from_integer(t.coeff.clone())));
    }
    out
}

/// Parse "xy" (or z-notation) into a single-word combination.
pub fn word_comb(s: &str) -> Result<LinComb<Word>> {
    let w: Word = s.parse()?;
    Ok(LinComb::singleton(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn one(s: &str) -> LinComb<Word> {
        word_comb(s).unwrap()
    }

    fn c(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn shuffle_y_xy() {
        let got = shuffle(&one("y"), &one("xy"));
        let mut want = LinComb::zero();
        want.add_term("yxy".parse().unwrap(), c(1));
        want.add_term("xyy".parse().unwrap(), c(2));
        assert_eq!(got, want);
    }

    #[test]
    fn shuffle_unit() {
        let got = shuffle(&one("1"), &one("xxy"));
        assert_eq!(got, one("xxy"));
    }

    #[test]
    fn shuffle_xy_xy() {
        let got = shuffle(&one("xy"), &one("xy"));
        let mut want = LinComb::zero();
        want.add_term("xyxy".parse().unwrap(), c(2));
        want.add_term("xxyy".parse().unwrap(), c(4));
        assert_eq!(got, want);
    }

    #[test]
    fn stuffle_depth_one() {
        // z_2 * z_3 = z_2 z_3 + z_3 z_2 + z_5
        let got = stuffle(&one("z2"), &one("z3")).unwrap();
        let mut want = LinComb::zero();
        want.add_term(Word::from_zseq(&[2, 3]), c(1));
        want.add_term(Word::from_zseq(&[3, 2]), c(1));
        want.add_term(Word::from_zseq(&[5]), c(1));
        assert_eq!(got, want);
    }

    #[test]
    fn stuffle_z1_z2z1() {
        let got = stuffle(&one("z1"), &one("z2z1")).unwrap();
        let mut want = LinComb::zero();
        want.add_term(Word::from_zseq(&[1, 2, 1]), c(1));
        want.add_term(Word::from_zseq(&[2, 1, 1]), c(2));
        want.add_term(Word::from_zseq(&[3, 1]), c(1));
        want.add_term(Word::from_zseq(&[2, 2]), c(1));
        assert_eq!(got, want);
    }

    #[test]
    fn stuffle_rejects_non_h1() {
        assert!(stuffle(&one("yx"), &one("y")).is_err());
    }

    #[test]
    fn step_term_count_and_trivial_case() {
        let terms = shuffle_step(&[1], &[1]).unwrap();
        assert_eq!(terms.len(), 2);
        for t in &terms {
            assert_eq!(t.coeff, BigInt::one());
            assert_eq!(t.prefix, 1);
        }
        assert!(shuffle_step(&[], &[1]).is_err());
    }

    #[test]
    fn step_expansion_matches_recursion_small() {
        let got = shuffle_zseqs_via_steps(&[2], &[2]);
        assert_eq!(got, shuffle(&one("xy"), &one("xy")));
    }

    fn zseqs_of_weight(w: i64) -> Vec<Vec<i64>> {
        if w == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for head in 1..=w {
            for tail in zseqs_of_weight(w - head) {
                let mut v = vec![head];
                v.extend(tail);
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn step_expansion_matches_recursion_all_weight_le_7() {
        for total in 2..=7 {
            for wl in 1..total {
                for l in zseqs_of_weight(wl) {
                    if l.is_empty() {
                        continue;
                    }
                    for r in zseqs_of_weight(total - wl) {
                        if r.is_empty() {
                            continue;
                        }
                        let via_steps = shuffle_zseqs_via_steps(&l, &r);
                        let direct = shuffle(
                            &LinComb::singleton(Word::from_zseq(&l)),
                            &LinComb::singleton(Word::from_zseq(&r)),
                        );
                        assert_eq!(via_steps, direct, "l={l:?} r={r:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn shuffle_coeff_sum_is_binomial() {
        let w1: Word = "xxy".parse().unwrap();
        let w2: Word = "xyy".parse().unwrap();
        let s = shuffle(&LinComb::singleton(w1), &LinComb::singleton(w2));
        assert_eq!(s.coeff_sum(), BigRational::from_integer(binom(6, 3)));
        assert!(!s.coeff_sum().is_zero());
    }
}
