//! MZV indices, triangular A_N indices, the Z-map, and the layouts that
//! place prefixed shuffle states inside A_N zeta values.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::nested::{Factor, NestedSumExpr};
use crate::words::Word;

/// Index (k_1, ..., k_N) of a multiple zeta value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MzvIndex {
    pub ks: Vec<Exponent>,
}

impl MzvIndex {
    pub fn from_ints(ks: &[i64]) -> Self {
        MzvIndex {
            ks: ks.iter().map(|&k| Exponent::int(k)).collect(),
        }
    }

    pub fn depth(&self) -> usize {
        self.ks.len()
    }

    pub fn as_ints(&self) -> Option<Vec<i64>> {
        self.ks.iter().map(|e| e.as_int()).collect()
    }

    pub fn weight(&self) -> Option<i64> {
        self.as_ints().map(|v| v.iter().sum())
    }

    pub fn to_json(&self) -> Value {
        json!({ "ks": self.ks.iter().map(exp_json).collect::<Vec<_>>() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let ks = v
            .get("ks")
            .and_then(|a| a.as_array())
            .ok_or_else(|| Error::Parse("expected {\"ks\": [...]}".into()))?;
        if ks.is_empty() {
            return Err(Error::Parse("empty index".into()));
        }
        Ok(MzvIndex {
            ks: ks.iter().map(exp_from_json).collect::<Result<_>>()?,
        })
    }
}

impl fmt::Display for MzvIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "zeta({})",
            self.ks
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

pub fn exp_json(e: &Exponent) -> Value {
    match e.as_int() {
        Some(n) => json!(n),
        None => json!(e.to_string()),
    }
}

pub fn exp_from_json(v: &Value) -> Result<Exponent> {
    if let Some(n) = v.as_i64() {
        Ok(Exponent::int(n))
    } else if let Some(s) = v.as_str() {
        s.parse()
    } else {
        Err(Error::Parse(format!("bad exponent value: {v}")))
    }
}

/// Triangular index of a zeta value of the root system A_N:
/// entries s_{ij} for 1 <= i <= j <= N, stored row-major
/// (row i holds s_{i,i}..s_{i,N}).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnIndex {
    pub rank: usize,
    rows: Vec<Vec<Exponent>>,
}

impl AnIndex {
    pub fn zero(rank: usize) -> Self {
        let rows = (0..rank)
            .map(|i| vec![Exponent::int(0); rank - i])
            .collect();
        AnIndex { rank, rows }
    }

    /// s_{ij} with 1-based i <= j.
    pub fn get(&self, i: usize, j: usize) -> &Exponent {
        &self.rows[i - 1][j - i]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Exponent) {
        self.rows[i - 1][j - i] = e;
    }

    pub fn rows(&self) -> &[Vec<Exponent>] {
        &self.rows
    }

    /// Flat argument list s_{11}, s_{12}, ..., s_{1N}, s_{22}, ..., s_{NN}.
    pub fn to_flat(&self) -> Vec<Exponent> {
        self.rows.iter().flatten().cloned().collect()
    }

    pub fn from_flat(rank: usize, flat: &[Exponent]) -> Result<Self> {
        if flat.len() != rank * (rank + 1) / 2 {
            return Err(Error::Invalid(format!(
                "rank {rank} needs {} entries, got {}",
                rank * (rank + 1) / 2,
                flat.len()
            )));
        }
        let mut ix = AnIndex::zero(rank);
        let mut it = flat.iter().cloned();
        for i in 1..=rank {
            for j in i..=rank {
                ix.set(i, j, it.next().unwrap());
            }
        }
        Ok(ix)
    }

    pub fn is_integral(&self) -> bool {
        self.rows.iter().flatten().all(|e| e.is_int())
    }

    /// Sum of all entries (the weight), when integral.
    pub fn weight(&self) -> Option<i64> {
        self.rows
            .iter()
            .flatten()
            .map(|e| e.as_int())
            .sum::<Option<i64>>()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rank": self.rank,
            "s": self.rows.iter()
                .map(|r| r.iter().map(exp_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let rank = v
            .get("rank")
            .and_then(|r| r.as_u64())
            .ok_or_else(|| Error::Parse("expected {\"rank\": N, \"s\": [[..]]}".into()))?
            as usize;
        let rows = v
            .get("s")
            .and_then(|s| s.as_array())
            .ok_or_else(|| Error::Parse("missing \"s\" rows".into()))?;
        let flat: Vec<Exponent> = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Parse("rows must be arrays".into()))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .map(exp_from_json)
            .collect::<Result<_>>()?;
        AnIndex::from_flat(rank, &flat)
    }
}

impl fmt::Display for AnIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "zeta_{}({};A{})",
            self.rank,
            self.to_flat()
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(","),
            self.rank
        )
    }
}

/// Z-map: admissible word x^{k_1-1}y ... x^{k_N-1}y to (k_1,...,k_N).
pub fn z_map(w: &Word) -> Result<MzvIndex> {
    if w.is_empty() || !w.is_admissible() {
        return Err(Error::NotInH0(w.to_string()));
    }
    let ks = w.to_zseq()?;
    Ok(MzvIndex::from_ints(&ks))
}

/// zeta(k_1,...,k_N) = zeta_N(k_1,...,k_N,0,...,0; A_N): first row carries
/// the MZV index, everything else is 0.
pub fn mzv_as_an(k: &MzvIndex) -> AnIndex {
    let n = k.depth();
    let mut ix = AnIndex::zero(n);
    for (j, e) in k.ks.iter().enumerate() {
        ix.set(1, j + 1, e.clone());
    }
    ix
}

/// Layout of the prefixed shuffle state z_{r_c}..z_{r_1}(z_{p_a}..z_{p_1} sh
/// z_{q_b}..z_{q_1}) as a rank a+b+c index. Sequences are head-first:
/// r = (r_c,...,r_1), p = (p_a,...,p_1), q = (q_b,...,q_1).
pub fn shuffle_state_layout(r: &[Exponent], p: &[Exponent], q: &[Exponent]) -> Result<AnIndex> {
    let (c, a, b) = (r.len(), p.len(), q.len());
    if a == 0 || b == 0 {
        return Err(Error::DegenerateState);
    }
    let n = a + b + c;
    let mut ix = AnIndex::zero(n);
    // Row 1, columns 1..c get r_c..r_1: s_{1j} = r_{c+1-j}; head-first
    // storage means r[0] = r_c, so r_{c+1-j} = r[j-1].
    for j in 1..=c {
        ix.set(1, j, r[j - 1].clone());
    }
    // Row 1, columns b+c+1..n get p's: s_{1j} = p_{n+1-j}; p[0] = p_a means
    // p_{n+1-j} = p[j-(b+c+1)] read from the high column down... p_{n+1-j}
    // with j=b+c+1 gives p_a = p[0], j=n gives p_1 = p[a-1].
    for j in b + c + 1..=n {
        ix.set(1, j, p[j - (b + c + 1)].clone());
    }
    // Row a+1, columns a+c+1..n get q's: s_{a+1,j} = q_{n+1-j}.
    for j in a + c + 1..=n {
        ix.set(a + 1, j, q[j - (a + c + 1)].clone());
    }
    Ok(ix)
}

/// Layout of x^r (z_{p_a}..z_{p_1} sh z_{q_b}..z_{q_1}) as a rank a+b index
/// with the outer power sitting at s_{11}.
pub fn xr_layout(r: i64, p: &[Exponent], q: &[Exponent]) -> Result<AnIndex> {
    let (a, b) = (p.len(), q.len());
    if a == 0 || b == 0 {
        return Err(Error::DegenerateState);
    }
    if r < 1 {
        return Err(Error::Invalid("outer exponent must be >= 1".into()));
    }
    let n = a + b;
    let mut ix = AnIndex::zero(n);
    ix.set(1, 1, Exponent::int(r));
    for j in b + 1..=n {
        ix.set(1, j, p[j - (b + 1)].clone());
    }
    for j in a + 1..=n {
        ix.set(a + 1, j, q[j - (a + 1)].clone());
    }
    Ok(ix)
}

/// Nested-sum form: s_{ij} contributes the factor
/// (l_i + l_{i+1} + ... + l_{N+i-j})^{-s_{ij}}; zero exponents are dropped.
pub fn an_to_nested_sum(ix: &AnIndex) -> NestedSumExpr {
    let n = ix.rank;
    let mut factors = Vec::new();
    for i in 1..=n {
        for j in i..=n {
            let e = ix.get(i, j);
            if e.is_zero() {
                continue;
            }
            factors.push(Factor {
                lo: i,
                hi: n + i - j,
                exp: e.clone(),
            });
        }
    }
    NestedSumExpr::new(n, factors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: i64) -> Exponent {
        Exponent::int(n)
    }

    #[test]
    fn z_map_basics() {
        assert_eq!(
            z_map(&"xy".parse().unwrap()).unwrap(),
            MzvIndex::from_ints(&[2])
        );
        assert_eq!(
            z_map(&"xxyy".parse().unwrap()).unwrap(),
            MzvIndex::from_ints(&[3, 1])
        );
        assert_eq!(
            z_map(&"xyxy".parse().unwrap()).unwrap(),
            MzvIndex::from_ints(&[2, 2])
        );
        assert!(matches!(
            z_map(&"yx".parse().unwrap()),
            Err(Error::NotInH0(_))
        ));
    }

    #[test]
    fn mzv_as_an_rows() {
        let ix = mzv_as_an(&MzvIndex::from_ints(&[2, 1, 1]));
        assert_eq!(ix.rank, 3);
        assert_eq!(ix.to_flat(), vec![e(2), e(1), e(1), e(0), e(0), e(0)]);
    }

    #[test]
    fn layout_rank3_example() {
        // r=(r+i), p=(p-i), q=(q) -> zeta_3(r+i, 0, p-i, 0, q, 0)
        let ix = shuffle_state_layout(&[e(5)], &[e(3)], &[e(2)]).unwrap();
        assert_eq!(ix.to_flat(), vec![e(5), e(0), e(3), e(0), e(2), e(0)]);
    }

    #[test]
    fn layout_rank4_example() {
        // r=(u+i), p=(p-i), q=(s2,s1) -> zeta_4(u+i,0,0,p-i,0,s2,s1,0,0,0)
        let s1 = Exponent::slot("s1");
        let s2 = Exponent::slot("s2");
        let ix = shuffle_state_layout(&[e(7)], &[e(4)], &[s2.clone(), s1.clone()]).unwrap();
        assert_eq!(
            ix.to_flat(),
            vec![e(7), e(0), e(0), e(4), e(0), s2, s1, e(0), e(0), e(0)]
        );
    }

    #[test]
    fn layout_degenerate_and_divergent_pattern() {
        assert!(matches!(
            shuffle_state_layout(&[], &[], &[e(2)]),
            Err(Error::DegenerateState)
        ));
        // c=0, a=b=1: d_{12}=p, d_{22}=q, d_{11}=0
        let ix = shuffle_state_layout(&[], &[e(3)], &[e(2)]).unwrap();
        assert_eq!(ix.to_flat(), vec![e(0), e(3), e(2)]);
    }

    #[test]
    fn xr_layout_rank2() {
        let ix = xr_layout(1, &[e(3)], &[e(2)]).unwrap();
        assert_eq!(ix.to_flat(), vec![e(1), e(3), e(2)]);
        assert!(xr_layout(0, &[e(3)], &[e(2)]).is_err());
    }

    #[test]
    fn nested_sum_of_mzv() {
        // zeta(2,1): (l1+l2)^-2 l1^-1
        let expr = an_to_nested_sum(&mzv_as_an(&MzvIndex::from_ints(&[2, 1])));
        assert_eq!(expr.nvars, 2);
        let f = expr.factors();
        assert_eq!(f.len(), 2);
        assert_eq!((f[0].lo, f[0].hi, f[0].exp.as_int()), (1, 1, Some(1)));
        assert_eq!((f[1].lo, f[1].hi, f[1].exp.as_int()), (1, 2, Some(2)));
    }

    #[test]
    fn json_roundtrip() {
        let ix = shuffle_state_layout(&[e(2)], &[e(3)], &[Exponent::slot("s1")]).unwrap();
        let v = ix.to_json();
        assert_eq!(AnIndex::from_json(&v).unwrap(), ix);
        let k = MzvIndex::from_ints(&[2, 1]);
        assert_eq!(MzvIndex::from_json(&k.to_json()).unwrap(), k);
    }

    #[test]
    fn weight_conservation() {
        let ix = shuffle_state_layout(&[e(2)], &[e(3), e(1)], &[e(2)]).unwrap();
        assert_eq!(ix.weight(), Some(8));
    }
}
