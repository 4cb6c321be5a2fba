//! Nested-sum expressions over interval prefix sums and their partial
//! fraction decompositions.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::algebra::binom;
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::index::{exp_from_json, exp_json, MzvIndex};
use crate::lincomb::LinComb;

/// One factor (l_lo + l_{lo+1} + ... + l_hi)^{-exp}.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub lo: usize,
    pub hi: usize,
    pub exp: Exponent,
}

/// Sum over l_1,...,l_n >= 1 of a product of interval factors.
/// Kept canonical: factors sorted by (lo, hi), duplicates merged,
/// zero exponents dropped.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NestedSumExpr {
    pub nvars: usize,
    factors: Vec<Factor>,
}

impl NestedSumExpr {
    pub fn new(nvars: usize, factors: Vec<Factor>) -> Self {
        for f in &factors {
            assert!(
                f.lo >= 1 && f.lo <= f.hi && f.hi <= nvars,
                "factor out of range"
            );
        }
        let mut e = NestedSumExpr { nvars, factors };
        e.canonicalize_in_place();
        e
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    fn canonicalize_in_place(&mut self) {
        self.factors.sort_by_key(|f| (f.lo, f.hi));
        let mut merged: Vec<Factor> = Vec::with_capacity(self.factors.len());
        for f in self.factors.drain(..) {
            if let Some(last) = merged.last_mut() {
                if last.lo == f.lo && last.hi == f.hi {
                    last.exp = last.exp.add(&f.exp);
                    continue;
                }
            }
            merged.push(f);
        }
        merged.retain(|f| !f.exp.is_zero());
        self.factors = merged;
    }

    pub fn is_integral(&self) -> bool {
        self.factors.iter().all(|f| f.exp.is_int())
    }

    /// Total exponent sum (the weight), when integral.
    pub fn weight(&self) -> Option<i64> {
        self.factors.iter().map(|f| f.exp.as_int()).sum()
    }

    pub fn factor_exp(&self, lo: usize, hi: usize) -> Option<&Exponent> {
        self.factors
            .iter()
            .find(|f| f.lo == lo && f.hi == hi)
            .map(|f| &f.exp)
    }

    /// Terminal iff every factor is a prefix interval [1, h]: the expression
    /// is then a plain MZV-shaped sum.
    pub fn is_mzv_shape(&self) -> bool {
        self.factors.iter().all(|f| f.lo == 1)
    }

    /// Reads a terminal expression as an MZV index: the factor [1, h]
    /// carries k_{n+1-h}. Missing prefixes get exponent 0.
    pub fn as_mzv(&self) -> Option<MzvIndex> {
        if !self.is_mzv_shape() || self.nvars == 0 {
            return None;
        }
        let mut ks = vec![Exponent::int(0); self.nvars];
        for f in &self.factors {
            ks[self.nvars - f.hi] = f.exp.clone();
        }
        Some(MzvIndex { ks })
    }

    /// Applies a variable permutation (old 1-based position -> new position).
    /// Every factor's index set must stay an interval.
    fn relabel(&self, perm: &[usize]) -> NestedSumExpr {
        let factors = self
            .factors
            .iter()
            .map(|f| {
                let mut imgs: Vec<usize> = (f.lo..=f.hi).map(|i| perm[i - 1]).collect();
                imgs.sort_unstable();
                assert!(
                    imgs.windows(2).all(|w| w[1] == w[0] + 1),
                    "relabel broke an interval"
                );
                Factor {
                    lo: imgs[0],
                    hi: *imgs.last().unwrap(),
                    exp: f.exp.clone(),
                }
            })
            .collect();
        NestedSumExpr::new(self.nvars, factors)
    }

    /// Exact value at a rational point, for identity checks. Requires
    /// integer exponents and nonzero interval sums.
    pub fn eval_rational(&self, xs: &[BigRational]) -> Option<BigRational> {
        assert_eq!(xs.len(), self.nvars);
        let mut v = BigRational::one();
        for f in &self.factors {
            let e = f.exp.as_int()?;
            let mut s = BigRational::zero();
            for x in &xs[f.lo - 1..f.hi] {
                s += x;
            }
            if s.is_zero() {
                return None;
            }
            let mut p = BigRational::one();
            for _ in 0..e.unsigned_abs() {
                p *= &s;
            }
            if e >= 0 {
                v /= p;
            } else {
                v *= p;
            }
        }
        Some(v)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "nvars": self.nvars,
            "factors": self.factors.iter().map(|f| json!({
                "lo": f.lo, "hi": f.hi, "exp": exp_json(&f.exp),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let nvars = v
            .get("nvars")
            .and_then(|n| n.as_u64())
            .ok_or_else(|| Error::Parse("expected {\"nvars\": n, \"factors\": [..]}".into()))?
            as usize;
        let fs = v
            .get("factors")
            .and_then(|f| f.as_array())
            .ok_or_else(|| Error::Parse("missing \"factors\"".into()))?;
        let mut factors = Vec::with_capacity(fs.len());
        for f in fs {
            let lo = f.get("lo").and_then(|x| x.as_u64());
            let hi = f.get("hi").and_then(|x| x.as_u64());
            let (Some(lo), Some(hi)) = (lo, hi) else {
                return Err(Error::Parse("factor needs lo/hi".into()));
            };
            let exp = exp_from_json(
                f.get("exp")
                    .ok_or_else(|| Error::Parse("factor needs exp".into()))?,
            )?;
            let (lo, hi) = (lo as usize, hi as usize);
            if lo < 1 || lo > hi || hi > nvars {
                return Err(Error::Invalid(format!("factor [{lo},{hi}] out of range")));
            }
            factors.push(Factor { lo, hi, exp });
        }
        Ok(NestedSumExpr::new(nvars, factors))
    }
}

impl fmt::Display for NestedSumExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sum[{}]", self.nvars)?;
        for fac in &self.factors {
            if fac.lo == fac.hi {
                write!(f, " (l{})^-{{{}}}", fac.lo, fac.exp)?;
            } else {
                write!(f, " (l{}..l{})^-{{{}}}", fac.lo, fac.hi, fac.exp)?;
            }
        }
        Ok(())
    }
}

/// Returns the canonical form (constructor already canonicalizes; this is the
/// explicit entry point).
pub fn canonicalize(e: &NestedSumExpr) -> NestedSumExpr {
    NestedSumExpr::new(e.nvars, e.factors.clone())
}

/// Which original factor survives in a decomposition term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PfdSide {
    KeepY,
    KeepX,
}

/// One term of 1/(X^a Y^b) = sum of coeff / ((X+Y)^sum_exp Z^keep_exp)
/// with Z the kept side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfdTerm {
    pub coeff: BigInt,
    pub side: PfdSide,
    pub sum_exp: i64,
    pub keep_exp: i64,
}

/// The alpha + beta terms of the two-variable decomposition.
pub fn pfd_binary(alpha: &Exponent, beta: &Exponent) -> Result<Vec<PfdTerm>> {
    let (Some(a), Some(b)) = (alpha.as_int(), beta.as_int()) else {
        return Err(Error::SymbolicExponent);
    };
    if a < 1 || b < 1 {
        return Err(Error::Invalid(format!(
            "PFD exponents must be >= 1, got {a}, {b}"
        )));
    }
    let mut out = Vec::with_capacity((a + b) as usize);
    for tau in 0..b {
        out.push(PfdTerm {
            coeff: binom(a - 1 + tau, tau),
            side: PfdSide::KeepY,
            sum_exp: a + tau,
            keep_exp: b - tau,
        });
    }
    for tau in 0..a {
        out.push(PfdTerm {
            coeff: binom(b - 1 + tau, tau),
            side: PfdSide::KeepX,
            sum_exp: b + tau,
            keep_exp: a - tau,
        });
    }
    Ok(out)
}

/// Decomposes the pair of adjacent interval factors A, B of `expr` into the
/// union interval, without renaming variables.
pub fn apply_pfd(
    expr: &NestedSumExpr,
    a: (usize, usize),
    b: (usize, usize),
) -> Result<LinComb<NestedSumExpr>> {
    let (x, _y) = if a.1 + 1 == b.0 {
        (a, b)
    } else if b.1 + 1 == a.0 {
        (b, a)
    } else {
        return Err(Error::Invalid(format!(
            "intervals [{},{}] and [{},{}] are not adjacent",
            a.0, a.1, b.0, b.1
        )));
    };
    let alpha = expr
        .factor_exp(a.0, a.1)
        .ok_or_else(|| Error::Invalid(format!("no factor on [{},{}]", a.0, a.1)))?
        .clone();
    let beta = expr
        .factor_exp(b.0, b.1)
        .ok_or_else(|| Error::Invalid(format!("no factor on [{},{}]", b.0, b.1)))?
        .clone();
    let terms = pfd_binary(&alpha, &beta)?;
    let rest: Vec<Factor> = expr
        .factors()
        .iter()
        .filter(|f| (f.lo, f.hi) != a && (f.lo, f.hi) != b)
        .cloned()
        .collect();
    let union = (x.0, a.1.max(b.1));
    let mut out = LinComb::zero();
    for t in terms {
        let keep = match t.side {
            PfdSide::KeepY => b,
            PfdSide::KeepX => a,
        };
        let mut fs = rest.clone();
        fs.push(Factor {
            lo: union.0,
            hi: union.1,
            exp: Exponent::int(t.sum_exp),
        });
        fs.push(Factor {
            lo: keep.0,
            hi: keep.1,
            exp: Exponent::int(t.keep_exp),
        });
        out.add_term(
            NestedSumExpr::new(expr.nvars, fs),
            BigRational::from_integer(t.coeff),
        );
    }
    Ok(out)
}

/// One decomposition step matching the shuffle step: detects the head pair
/// ([1, j-1] and [j, h]) from the block structure, decomposes it, and
/// renames variables so children are again in block form.
/// Returns None when the expression is already MZV-shaped.
pub fn pfd_step(expr: &NestedSumExpr) -> Result<Option<LinComb<NestedSumExpr>>> {
    if expr.is_mzv_shape() {
        return Ok(None);
    }
    let j = expr
        .factors()
        .iter()
        .filter(|f| f.lo > 1)
        .map(|f| f.lo)
        .min()
        .unwrap();
    if expr.factors().iter().any(|f| f.lo > 1 && f.lo != j) {
        return Err(Error::Invalid(
            "expression is not in block form (multiple inner blocks)".into(),
        ));
    }
    let h = expr
        .factors()
        .iter()
        .filter(|f| f.lo == j)
        .map(|f| f.hi)
        .max()
        .unwrap();
    let a = (1, j - 1);
    let b = (j, h);
    if expr.factor_exp(a.0, a.1).is_none() || expr.factor_exp(b.0, b.1).is_none() {
        return Err(Error::Invalid(format!(
            "missing head factor [{},{}] or [{},{}]",
            a.0, a.1, b.0, b.1
        )));
    }
    if !expr.factor_exp(a.0, a.1).unwrap().is_int() || !expr.factor_exp(b.0, b.1).unwrap().is_int()
    {
        return Err(Error::SymbolicStep);
    }
    let raw = apply_pfd(expr, a, b)?;
    // After the step, the side that kept the inner block shrinks the lower
    // block by one variable; rename position j-1 to h and slide j..h down so
    // the kept block becomes [j-1, h-1].
    let mut rot: Vec<usize> = (1..=expr.nvars).collect();
    rot[j - 2] = h;
    for pos in j..=h {
        rot[pos - 1] = pos - 1;
    }
    let mut out = LinComb::zero();
    for (child, coeff) in raw.iter() {
        // Only KeepY children retain the full inner head [j, h]; the inner
        // block's lower factors appear in both kinds of children.
        let kept_inner = child.factor_exp(j, h).is_some();
        let relabeled = if kept_inner {
            child.relabel(&rot)
        } else {
            child.clone()
        };
        out.add_term(relabeled, coeff.clone());
    }
    Ok(Some(out))
}

/// Repeated decomposition until everything is MZV-shaped. Returns the exact
/// combination of MZV indices.
pub fn reduce_to_mzvs(expr: &NestedSumExpr, max_steps: usize) -> Result<LinComb<MzvIndex>> {
    if !expr.is_integral() {
        return Err(Error::SymbolicReduce);
    }
    let mut work: LinComb<NestedSumExpr> = LinComb::singleton(expr.clone());
    let mut done: LinComb<MzvIndex> = LinComb::zero();
    for _ in 0..max_steps {
        // Pull out finished terms, step one remaining expression.
        let mut pending: Option<(NestedSumExpr, BigRational)> = None;
        let mut rest = LinComb::zero();
        for (e, c) in work.iter() {
            if e.is_mzv_shape() {
                done.add_term(e.as_mzv().expect("terminal"), c.clone());
            } else if pending.is_none() {
                pending = Some((e.clone(), c.clone()));
            } else {
                rest.add_term(e.clone(), c.clone());
            }
        }
        let Some((e, c)) = pending else {
            return Ok(done);
        };
        let children = pfd_step(&e)?.expect("non-terminal");
        rest = rest.add(&children.scale(&c));
        work = rest;
    }
    Err(Error::Invalid("reduction did not terminate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{an_to_nested_sum, mzv_as_an, shuffle_state_layout};

    fn e(n: i64) -> Exponent {
        Exponent::int(n)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn canonical_merges_and_sorts() {
        let a = NestedSumExpr::new(
            2,
            vec![
                Factor {
                    lo: 1,
                    hi: 2,
                    exp: e(1),
                },
                Factor {
                    lo: 1,
                    hi: 1,
                    exp: e(2),
                },
                Factor {
                    lo: 1,
                    hi: 2,
                    exp: e(2),
                },
            ],
        );
        assert_eq!(a.factors().len(), 2);
        assert_eq!(a.factor_exp(1, 2), Some(&e(3)));
        assert_eq!(canonicalize(&a), a);
    }

    #[test]
    fn pfd_binary_counts_and_identity() {
        let terms = pfd_binary(&e(2), &e(2)).unwrap();
        assert_eq!(terms.len(), 4);
        let coeffs: Vec<i64> = terms
            .iter()
            .map(|t| i64::try_from(&t.coeff).unwrap())
            .collect();
        assert_eq!(coeffs, vec![1, 2, 1, 2]);
        assert!(pfd_binary(&Exponent::slot("s1"), &e(1)).is_err());

        // 1/(X^2 Y^2) at X=2, Y=3 versus the expansion.
        let x = q(2, 1);
        let y = q(3, 1);
        let lhs = q(1, 4) * q(1, 9);
        let mut rhs = BigRational::zero();
        for t in pfd_binary(&e(2), &e(2)).unwrap() {
            let z = match t.side {
                PfdSide::KeepY => y.clone(),
                PfdSide::KeepX => x.clone(),
            };
            let s = &x + &y;
            let mut term = BigRational::from_integer(t.coeff);
            for _ in 0..t.sum_exp {
                term /= &s;
            }
            for _ in 0..t.keep_exp {
                term /= &z;
            }
            rhs += term;
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn apply_pfd_identity_random_rationals() {
        // zeta(p) zeta(r,q) with p=2, r=3, q=2: l^-2 (m+n)^-3 m^-2.
        let expr = NestedSumExpr::new(
            3,
            vec![
                Factor {
                    lo: 1,
                    hi: 1,
                    exp: e(2),
                },
                Factor {
                    lo: 2,
                    hi: 3,
                    exp: e(3),
                },
                Factor {
                    lo: 2,
                    hi: 2,
                    exp: e(2),
                },
            ],
        );
        let dec = apply_pfd(&expr, (1, 1), (2, 3)).unwrap();
        assert_eq!(dec.len() as i64, 5);
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            q(
                ((seed >> 33) % 97 + 1) as i64,
                ((seed >> 17) % 13 + 1) as i64,
            )
        };
        for _ in 0..100 {
            let xs = [next(), next(), next()];
            let lhs = expr.eval_rational(&xs).unwrap();
            let mut rhs = BigRational::zero();
            for (t, c) in dec.iter() {
                rhs += c * t.eval_rational(&xs).unwrap();
            }
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn apply_pfd_rejects_non_adjacent() {
        let expr = NestedSumExpr::new(
            3,
            vec![
                Factor {
                    lo: 1,
                    hi: 1,
                    exp: e(2),
                },
                Factor {
                    lo: 3,
                    hi: 3,
                    exp: e(2),
                },
            ],
        );
        assert!(apply_pfd(&expr, (1, 1), (3, 3)).is_err());
    }

    #[test]
    fn full_reduce_product_2_2() {
        // zeta(2)zeta(2) = 2 zeta(2,2) + 4 zeta(3,1)
        let layout = shuffle_state_layout(&[], &[e(2)], &[e(2)]).unwrap();
        let got = reduce_to_mzvs(&an_to_nested_sum(&layout), 1000).unwrap();
        let mut want = LinComb::zero();
        want.add_term(MzvIndex::from_ints(&[2, 2]), q(2, 1));
        want.add_term(MzvIndex::from_ints(&[3, 1]), q(4, 1));
        assert_eq!(got, want);
    }

    #[test]
    fn full_reduce_rank3_prefixed() {
        // zeta_3(a,0,b,0,c,0) = sum_i binom(b-1+i,i) zeta(a,b+i,c-i)
        //                     + sum_i binom(c-1+i,i) zeta(a,c+i,b-i)
        let (a, b, c) = (2i64, 3i64, 2i64);
        let layout = shuffle_state_layout(&[e(a)], &[e(b)], &[e(c)]).unwrap();
        let got = reduce_to_mzvs(&an_to_nested_sum(&layout), 1000).unwrap();
        let mut want = LinComb::zero();
        for i in 0..c {
            want.add_term(
                MzvIndex::from_ints(&[a, b + i, c - i]),
                BigRational::from_integer(binom(b - 1 + i, i)),
            );
        }
        for i in 0..b {
            want.add_term(
                MzvIndex::from_ints(&[a, c + i, b - i]),
                BigRational::from_integer(binom(c - 1 + i, i)),
            );
        }
        assert_eq!(got, want);
    }

    #[test]
    fn terminal_expr_reads_back_as_mzv() {
        let ix = MzvIndex::from_ints(&[3, 1, 2]);
        let expr = an_to_nested_sum(&mzv_as_an(&ix));
        assert!(expr.is_mzv_shape());
        assert_eq!(expr.as_mzv(), Some(ix.clone()));
        assert_eq!(reduce_to_mzvs(&expr, 10).unwrap(), LinComb::singleton(ix));
    }

    #[test]
    fn json_roundtrip() {
        let expr = NestedSumExpr::new(
            3,
            vec![
                Factor {
                    lo: 1,
                    hi: 3,
                    exp: e(2),
                },
                Factor {
                    lo: 2,
                    hi: 2,
                    exp: Exponent::slot("s1"),
                },
            ],
        );
        assert_eq!(NestedSumExpr::from_json(&expr.to_json()).unwrap(), expr);
    }

    #[test]
    fn weight_is_conserved_by_steps() {
        let layout = shuffle_state_layout(&[e(2)], &[e(2), e(1)], &[e(2)]).unwrap();
        let expr = an_to_nested_sum(&layout);
        let w = expr.weight().unwrap();
        let children = pfd_step(&expr).unwrap().unwrap();
        for (child, _) in children.iter() {
            assert_eq!(child.weight(), Some(w));
        }
    }
}
