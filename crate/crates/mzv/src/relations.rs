//! Double shuffle relations, functional relations, and numerical
//! verification.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::algebra::{binom, shuffle, stuffle};
use crate::error::{Error, Result};
use crate::eval::{eval_an, eval_mzv, EvalParams};
use crate::exponent::{Bindings, Exponent};
use crate::index::{shuffle_state_layout, z_map, AnIndex, MzvIndex};
use crate::lincomb::{rational_from_str, rational_to_string, LinComb};
use crate::spp::pfd_full_reduce;
use crate::words::Word;

/// A zeta-value leaf: either an MZV index or an A_N index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ZetaTerm {
    Mzv(MzvIndex),
    An(AnIndex),
}

impl ZetaTerm {
    pub fn to_json(&self) -> Value {
        match self {
            ZetaTerm::Mzv(k) => json!({ "kind": "mzv", "index": k.to_json() }),
            ZetaTerm::An(ix) => json!({ "kind": "an", "index": ix.to_json() }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = v
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| Error::Parse("term needs \"kind\"".into()))?;
        let ix = v
            .get("index")
            .ok_or_else(|| Error::Parse("term needs \"index\"".into()))?;
        match kind {
            "mzv" => Ok(ZetaTerm::Mzv(MzvIndex::from_json(ix)?)),
            "an" => Ok(ZetaTerm::An(AnIndex::from_json(ix)?)),
            other => Err(Error::Parse(format!("unknown term kind {other:?}"))),
        }
    }
}

impl fmt::Display for ZetaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZetaTerm::Mzv(k) => write!(f, "{k}"),
            ZetaTerm::An(ix) => write!(f, "{ix}"),
        }
    }
}

/// Where a relation came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    FiniteDsr {
        w1: String,
        w2: String,
    },
    ExtendedDsr {
        w1: String,
        w2: String,
        t_power: usize,
    },
    Functional {
        family: String,
        params: BTreeMap<String, String>,
    },
    Named(String),
}

impl Provenance {
    pub fn to_json(&self) -> Value {
        match self {
            Provenance::FiniteDsr { w1, w2 } => {
                json!({ "type": "finite_dsr", "w1": w1, "w2": w2 })
            }
            Provenance::ExtendedDsr { w1, w2, t_power } => {
                json!({ "type": "extended_dsr", "w1": w1, "w2": w2, "t_power": t_power })
            }
            Provenance::Functional { family, params } => {
                json!({ "type": "functional", "family": family, "params": params })
            }
            Provenance::Named(name) => json!({ "type": "named", "name": name }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let ty = v
            .get("type")
            .and_then(|t| t.as_str())
            .ok_or_else(|| Error::Parse("provenance needs \"type\"".into()))?;
        let get = |k: &str| -> Result<String> {
            v.get(k)
                .and_then(|x| x.as_str())
                .map(str::to_string)
                .ok_or_else(|| Error::Parse(format!("provenance needs {k:?}")))
        };
        match ty {
            "finite_dsr" => Ok(Provenance::FiniteDsr {
                w1: get("w1")?,
                w2: get("w2")?,
            }),
            "extended_dsr" => Ok(Provenance::ExtendedDsr {
                w1: get("w1")?,
                w2: get("w2")?,
                t_power: v.get("t_power").and_then(|x| x.as_u64()).unwrap_or(0) as usize,
            }),
            "functional" => {
                let params = v
                    .get("params")
                    .and_then(|p| p.as_object())
                    .map(|m| {
                        m.iter()
                            .filter_map(|(k, x)| x.as_str().map(|s| (k.clone(), s.to_string())))
                            .collect()
                    })
                    .unwrap_or_default();
                Ok(Provenance::Functional {
                    family: get("family")?,
                    params,
                })
            }
            "named" => Ok(Provenance::Named(get("name")?)),
            other => Err(Error::Parse(format!("unknown provenance {other:?}"))),
        }
    }
}

/// A linear combination of zeta-value leaves asserted to vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub terms: LinComb<ZetaTerm>,
    pub provenance: Provenance,
    pub weight: Option<i64>,
}

impl Relation {
    pub fn is_trivial(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "terms": self.terms.iter().map(|(t, c)| json!({
                "coeff": rational_to_string(c),
                "kind": match t { ZetaTerm::Mzv(_) => "mzv", ZetaTerm::An(_) => "an" },
                "index": match t {
                    ZetaTerm::Mzv(k) => k.to_json(),
                    ZetaTerm::An(ix) => ix.to_json(),
                },
            })).collect::<Vec<_>>(),
            "provenance": self.provenance.to_json(),
            "weight": self.weight,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let terms_json = v
            .get("terms")
            .and_then(|t| t.as_array())
            .ok_or_else(|| Error::Parse("relation needs \"terms\"".into()))?;
        let mut terms = LinComb::zero();
        for t in terms_json {
            let coeff = t
                .get("coeff")
                .and_then(|c| c.as_str())
                .and_then(rational_from_str)
                .ok_or_else(|| Error::Parse("term needs \"coeff\"".into()))?;
            terms.add_term(ZetaTerm::from_json(t)?, coeff);
        }
        let provenance = match v.get("provenance") {
            Some(p) => Provenance::from_json(p)?,
            None => Provenance::Named("unknown".into()),
        };
        let weight = v.get("weight").and_then(|w| w.as_i64());
        Ok(Relation {
            terms,
            provenance,
            weight,
        })
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = 0", self.terms)
    }
}

/// Finite double shuffle relation: Z(w1 * w2) - Z(w1 sh w2) = 0.
pub fn finite_dsr(w1: &Word, w2: &Word) -> Result<Relation> {
    if !w1.is_admissible() || !w2.is_admissible() {
        let bad = if w1.is_admissible() { w2 } else { w1 };
        return Err(Error::Invalid(format!("requires H0: {bad}")));
    }
    let c1 = LinComb::singleton(w1.clone());
    let c2 = LinComb::singleton(w2.clone());
    let diff = stuffle(&c1, &c2)?.sub(&shuffle(&c1, &c2));
    let terms = diff.try_map_keys(|w| z_map(w).map(ZetaTerm::Mzv))?;
    let weight = (w1.weight() + w2.weight()) as i64;
    Ok(Relation {
        terms,
        provenance: Provenance::FiniteDsr {
            w1: w1.to_string(),
            w2: w2.to_string(),
        },
        weight: Some(weight),
    })
}

/// Admissible words of the exact given weight, in lexicographic order.
pub fn admissible_words(weight: i64) -> Vec<Word> {
    fn zseqs(w: i64, first: bool) -> Vec<Vec<i64>> {
        if w == 0 {
            return vec![vec![]];
        }
        let lo = if first { 2 } else { 1 };
        let mut out = Vec::new();
        for h in lo..=w {
            for t in zseqs(w - h, false) {
                let mut v = vec![h];
                v.extend(t);
                out.push(v);
            }
        }
        out
    }
    if weight < 2 {
        return vec![];
    }
    let mut ws: Vec<Word> = zseqs(weight, true)
        .into_iter()
        .map(|v| Word::from_zseq(&v))
        .collect();
    ws.sort();
    ws
}

/// Exact row reduction used to drop linearly dependent relations.
struct RowReducer {
    rows: Vec<BTreeMap<ZetaTerm, BigRational>>,
}

impl RowReducer {
    fn new() -> Self {
        RowReducer { rows: Vec::new() }
    }

    /// Returns true (and absorbs the row) iff it is independent of the rows
    /// seen so far.
    fn insert(&mut self, terms: &LinComb<ZetaTerm>) -> bool {
        let mut row: BTreeMap<ZetaTerm, BigRational> =
            terms.iter().map(|(k, c)| (k.clone(), c.clone())).collect();
        for basis in &self.rows {
            let pivot = basis.keys().next().expect("nonempty basis row");
            if let Some(c) = row.get(pivot).cloned() {
                let scale = &c / &basis[pivot];
                for (k, v) in basis {
                    let entry = row.entry(k.clone()).or_insert_with(BigRational::zero);
                    *entry -= &scale * v;
                }
                row.retain(|_, v| !v.is_zero());
            }
        }
        if row.is_empty() {
            return false;
        }
        // Keep echelon: sort rows by pivot after insertion.
        self.rows.push(row);
        self.rows
            .sort_by(|a, b| a.keys().next().cmp(&b.keys().next()));
        // Back-substitute so each pivot is unique.
        for i in 0..self.rows.len() {
            let pivot = self.rows[i].keys().next().unwrap().clone();
            let pv = self.rows[i][&pivot].clone();
            for j in 0..self.rows.len() {
                if i == j {
                    continue;
                }
                if let Some(c) = self.rows[j].get(&pivot).cloned() {
                    let scale = &c / &pv;
                    let src = self.rows[i].clone();
                    for (k, v) in src {
                        let entry = self.rows[j].entry(k).or_insert_with(BigRational::zero);
                        *entry -= &scale * &v;
                    }
                    self.rows[j].retain(|_, v| !v.is_zero());
                }
            }
        }
        self.rows.retain(|r| !r.is_empty());
        true
    }
}

/// All independent finite double shuffle relations of total weight
/// <= max_weight.
pub fn gen_relations(max_weight: i64) -> Vec<Relation> {
    let mut out = Vec::new();
    let mut reducer = RowReducer::new();
    for total in 4..=max_weight {
        for w1_weight in 2..=total / 2 {
            let lefts = admissible_words(w1_weight);
            let rights = admissible_words(total - w1_weight);
            for (i, w1) in lefts.iter().enumerate() {
                for w2 in &rights {
                    if w1_weight == total - w1_weight {
                        // Unordered pairs: skip the mirrored half.
                        if rights.get(..i).is_some_and(|prior| prior.contains(w2)) {
                            continue;
                        }
                    }
                    let rel = finite_dsr(w1, w2).expect("admissible inputs");
                    if rel.is_trivial() {
                        continue;
                    }
                    if reducer.insert(&rel.terms) {
                        out.push(rel);
                    }
                }
            }
        }
    }
    out
}

/// Outcome of a numerical verification.
#[derive(Clone, Copy, Debug)]
pub struct VerifyOutcome {
    pub residual: f64,
    pub combined_bound: f64,
    pub pass: bool,
}

fn eval_term(t: &ZetaTerm, bindings: &Bindings, params: &EvalParams) -> Result<(f64, f64)> {
    let r = match t {
        ZetaTerm::Mzv(k) => eval_mzv::<f64>(k, bindings, params),
        ZetaTerm::An(ix) => eval_an::<f64>(ix, bindings, params),
    };
    match r {
        Ok(res) => Ok((res.value, res.error_bound)),
        Err(Error::Divergent(msg)) => Err(Error::Divergent(format!("{t}: {msg}"))),
        Err(e) => Err(e),
    }
}

fn rational_to_f64(c: &BigRational) -> f64 {
    let n: f64 = c.numer().to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = c.denom().to_string().parse().unwrap_or(f64::NAN);
    n / d
}

/// Evaluates all terms; PASS iff |sum| <= combined error bounds + tolerance.
pub fn verify(rel: &Relation, bindings: &Bindings, params: &EvalParams) -> Result<VerifyOutcome> {
    let mut sum = 0.0f64;
    let mut bound = 0.0f64;
    for (t, c) in rel.terms.iter() {
        let (v, b) = eval_term(t, bindings, params)?;
        let cf = rational_to_f64(c);
        sum += cf * v;
        bound += cf.abs() * b;
    }
    let residual = sum.abs();
    Ok(VerifyOutcome {
        residual,
        combined_bound: bound,
        pass: residual <= bound + params.tolerance,
    })
}

/// A product of zeta-value leaves with a rational coefficient.
pub type ProductTerm = (BigRational, Vec<ZetaTerm>);

/// LHS = RHS with named real slots.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalRelation {
    pub family: String,
    pub slots: Vec<String>,
    pub lhs: Vec<ProductTerm>,
    pub rhs: Vec<ProductTerm>,
}

fn product_json(side: &[ProductTerm]) -> Value {
    Value::Array(
        side.iter()
            .map(|(c, factors)| {
                json!({
                    "coeff": rational_to_string(c),
                    "factors": factors.iter().map(|t| t.to_json()).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn product_from_json(v: &Value) -> Result<Vec<ProductTerm>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected term array".into()))?;
    arr.iter()
        .map(|t| {
            let coeff = t
                .get("coeff")
                .and_then(|c| c.as_str())
                .and_then(rational_from_str)
                .ok_or_else(|| Error::Parse("term needs \"coeff\"".into()))?;
            let factors = t
                .get("factors")
                .and_then(|f| f.as_array())
                .ok_or_else(|| Error::Parse("term needs \"factors\"".into()))?
                .iter()
                .map(ZetaTerm::from_json)
                .collect::<Result<Vec<_>>>()?;
            Ok((coeff, factors))
        })
        .collect()
}

impl FunctionalRelation {
    pub fn to_json(&self) -> Value {
        json!({
            "family": self.family,
            "slots": self.slots,
            "lhs": product_json(&self.lhs),
            "rhs": product_json(&self.rhs),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let family = v
            .get("family")
            .and_then(|f| f.as_str())
            .ok_or_else(|| Error::Parse("needs \"family\"".into()))?
            .to_string();
        let slots = v
            .get("slots")
            .and_then(|s| s.as_array())
            .map(|a| {
                a.iter()
                    .filter_map(|x| x.as_str().map(str::to_string))
                    .collect()
            })
            .unwrap_or_default();
        Ok(FunctionalRelation {
            family,
            slots,
            lhs: product_from_json(v.get("lhs").unwrap_or(&Value::Null))?,
            rhs: product_from_json(v.get("rhs").unwrap_or(&Value::Null))?,
        })
    }
}

fn eval_side(side: &[ProductTerm], bindings: &Bindings, params: &EvalParams) -> Result<(f64, f64)> {
    let mut sum = 0.0;
    let mut bound = 0.0;
    for (c, factors) in side {
        let cf = rational_to_f64(c);
        let mut prod: f64 = 1.0;
        let mut prod_bound: f64 = 0.0;
        for t in factors {
            let (v, b) = eval_term(t, bindings, params)?;
            prod_bound = prod_bound * v.abs() + prod.abs() * b;
            prod *= v;
        }
        sum += cf * prod;
        bound += cf.abs() * prod_bound;
    }
    Ok((sum, bound))
}

/// Evaluates both sides at the given slot values.
pub fn verify_functional(
    rel: &FunctionalRelation,
    bindings: &Bindings,
    params: &EvalParams,
) -> Result<VerifyOutcome> {
    for s in &rel.slots {
        if !bindings.contains_key(s) {
            return Err(Error::UnboundSlot(s.clone()));
        }
    }
    let (lv, lb) = eval_side(&rel.lhs, bindings, params)?;
    let (rv, rb) = eval_side(&rel.rhs, bindings, params)?;
    let residual = (lv - rv).abs();
    Ok(VerifyOutcome {
        residual,
        combined_bound: lb + rb,
        pass: residual <= lb + rb + params.tolerance,
    })
}

fn one() -> BigRational {
    BigRational::one()
}

fn slot_names(tail: &[Exponent]) -> Vec<String> {
    let mut out = Vec::new();
    for e in tail {
        for s in &e.slots {
            if !out.contains(s) {
                out.push(s.clone());
            }
        }
    }
    out
}

/// zeta(p) * zeta(head, tail...) expanded by one shuffle step: pure-MZV
/// terms plus prefixed layouts. Tail length 1 or 2.
pub fn functional_shuffle(p: i64, head: i64, tail: &[Exponent]) -> Result<FunctionalRelation> {
    if p < 2 || head < 2 {
        return Err(Error::Invalid("p and head must be >= 2".into()));
    }
    if tail.is_empty() || tail.len() > 2 {
        return Err(Error::FamilyNotImplemented(format!(
            "shuffle family with tail length {}",
            tail.len()
        )));
    }
    let mut lhs_index = vec![Exponent::int(head)];
    lhs_index.extend(tail.iter().cloned());
    let lhs = vec![(
        one(),
        vec![
            ZetaTerm::Mzv(MzvIndex {
                ks: vec![Exponent::int(p)],
            }),
            ZetaTerm::Mzv(MzvIndex { ks: lhs_index }),
        ],
    )];
    let mut rhs: Vec<ProductTerm> = Vec::new();
    for i in 0..head {
        let mut ks = vec![Exponent::int(p + i), Exponent::int(head - i)];
        ks.extend(tail.iter().cloned());
        rhs.push((
            BigRational::from_integer(binom(p - 1 + i, i)),
            vec![ZetaTerm::Mzv(MzvIndex { ks })],
        ));
    }
    for i in 0..p {
        let layout =
            shuffle_state_layout(&[Exponent::int(head + i)], &[Exponent::int(p - i)], tail)?;
        rhs.push((
            BigRational::from_integer(binom(head - 1 + i, i)),
            vec![ZetaTerm::An(layout)],
        ));
    }
    Ok(FunctionalRelation {
        family: if tail.len() == 1 { "5-1" } else { "5-2" }.into(),
        slots: slot_names(tail),
        lhs,
        rhs,
    })
}

/// zeta(p) * zeta(index...) expanded by the harmonic product: all
/// interleavings plus all single merges.
pub fn functional_stuffle(p: i64, index: &[Exponent]) -> Result<FunctionalRelation> {
    if index.is_empty() {
        return Err(Error::Invalid("index must be nonempty".into()));
    }
    let lhs = vec![(
        one(),
        vec![
            ZetaTerm::Mzv(MzvIndex {
                ks: vec![Exponent::int(p)],
            }),
            ZetaTerm::Mzv(MzvIndex { ks: index.to_vec() }),
        ],
    )];
    let mut rhs: Vec<ProductTerm> = Vec::new();
    for pos in 0..=index.len() {
        let mut ks = index.to_vec();
        ks.insert(pos, Exponent::int(p));
        rhs.push((one(), vec![ZetaTerm::Mzv(MzvIndex { ks })]));
    }
    for pos in 0..index.len() {
        let mut ks = index.to_vec();
        ks[pos] = ks[pos].add_int(p);
        rhs.push((one(), vec![ZetaTerm::Mzv(MzvIndex { ks })]));
    }
    Ok(FunctionalRelation {
        family: if index.len() == 2 { "5-3" } else { "5-4" }.into(),
        slots: slot_names(index),
        lhs,
        rhs,
    })
}

/// Shuffle expansion = harmonic expansion (the common product eliminated).
pub fn functional_dsr(p1: i64, p2: i64, tail: &[Exponent]) -> Result<FunctionalRelation> {
    let sh = functional_shuffle(p1, p2, tail)?;
    let mut index = vec![Exponent::int(p2)];
    index.extend(tail.iter().cloned());
    let st = functional_stuffle(p1, &index)?;
    Ok(FunctionalRelation {
        family: if tail.len() == 1 { "5-5" } else { "5-6" }.into(),
        slots: sh.slots.clone(),
        lhs: sh.rhs,
        rhs: st.rhs,
    })
}

/// Builds a functional relation by family name.
pub fn functional_by_family(
    family: &str,
    p1: i64,
    p2: i64,
    tail: &[Exponent],
) -> Result<FunctionalRelation> {
    match family {
        "5-1" | "5-2" => {
            let want = if family == "5-1" { 1 } else { 2 };
            if tail.len() != want {
                return Err(Error::FamilyNotImplemented(format!(
                    "family {family} needs {want} slot(s)"
                )));
            }
            functional_shuffle(p1, p2, tail)
        }
        "5-3" | "5-4" => {
            let mut index = vec![Exponent::int(p2)];
            index.extend(tail.iter().cloned());
            let want = if family == "5-3" { 2 } else { 3 };
            if index.len() != want {
                return Err(Error::FamilyNotImplemented(format!(
                    "family {family} needs index length {want}"
                )));
            }
            functional_stuffle(p1, &index)
        }
        "5-5" | "5-6" => {
            let want = if family == "5-5" { 1 } else { 2 };
            if tail.len() != want {
                return Err(Error::FamilyNotImplemented(format!(
                    "family {family} needs {want} slot(s)"
                )));
            }
            functional_dsr(p1, p2, tail)
        }
        other => Err(Error::FamilyNotImplemented(other.to_string())),
    }
}

fn bind_exponent_int(e: &Exponent, vals: &BTreeMap<String, i64>) -> Result<Exponent> {
    let mut n = e.offset;
    for s in &e.slots {
        n += vals
            .get(s)
            .copied()
            .ok_or_else(|| Error::UnboundSlot(s.clone()))?;
    }
    Ok(Exponent::int(n))
}

/// Specializes a functional relation at integer slot values and reduces all
/// layout leaves to MZVs, producing a plain relation (LHS - RHS = 0).
pub fn specialize_functional(
    rel: &FunctionalRelation,
    vals: &BTreeMap<String, i64>,
) -> Result<Relation> {
    let mut terms: LinComb<ZetaTerm> = LinComb::zero();
    let mut weight: Option<i64> = None;
    for (sign, side) in [(1, &rel.lhs), (-1, &rel.rhs)] {
        for (c, factors) in side.iter() {
            if factors.len() != 1 {
                return Err(Error::Invalid(
                    "specialization supports single-leaf terms only".into(),
                ));
            }
            let signed = if sign > 0 { c.clone() } else { -c.clone() };
            match &factors[0] {
                ZetaTerm::Mzv(k) => {
                    let ks =
                        k.ks.iter()
                            .map(|e| bind_exponent_int(e, vals))
                            .collect::<Result<Vec<_>>>()?;
                    let ix = MzvIndex { ks };
                    weight = weight.or(ix.weight());
                    terms.add_term(ZetaTerm::Mzv(ix), signed);
                }
                ZetaTerm::An(ix) => {
                    let flat = ix
                        .to_flat()
                        .iter()
                        .map(|e| bind_exponent_int(e, vals))
                        .collect::<Result<Vec<_>>>()?;
                    let bound = AnIndex::from_flat(ix.rank, &flat)?;
                    for (k, rc) in pfd_full_reduce(&bound)?.iter() {
                        terms.add_term(ZetaTerm::Mzv(k.clone()), &signed * rc);
                    }
                }
            }
        }
    }
    let params = rel
        .slots
        .iter()
        .map(|s| {
            (
                s.clone(),
                vals.get(s).map(|v| v.to_string()).unwrap_or_default(),
            )
        })
        .collect();
    Ok(Relation {
        terms,
        provenance: Provenance::Functional {
            family: rel.family.clone(),
            params,
        },
        weight,
    })
}

/// The double shuffle relation obtained from the p1 = p2 = 2 functional
/// family at integer slot value k.
pub fn dsr_2_2_at(k: i64) -> Result<Relation> {
    let rel = functional_dsr(2, 2, &[Exponent::slot("s1")])?;
    let mut vals = BTreeMap::new();
    vals.insert("s1".to_string(), k);
    specialize_functional(&rel, &vals)
}

/// Named identities shipped with the binary.
pub fn builtins() -> BTreeMap<String, Relation> {
    let mut out = BTreeMap::new();
    let mut euler = dsr_2_2_at(1).expect("k=1 specialization");
    euler.provenance = Provenance::Named("euler-3-1-1".into());
    out.insert("euler-3-1-1".to_string(), euler);
    let product = finite_dsr(&"xy".parse().unwrap(), &"xy".parse().unwrap()).expect("H0 words");
    out.insert("euler-product-2-2".to_string(), product);
    for k in [1, 2] {
        let mut rel = dsr_2_2_at(k).expect("integer specialization");
        rel.provenance = Provenance::Named(format!("dsr-2-2-k{k}"));
        out.insert(format!("dsr-2-2-k{k}"), rel);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn finite_dsr_2_2() {
        let rel = finite_dsr(&"xy".parse().unwrap(), &"xy".parse().unwrap()).unwrap();
        let mut want = LinComb::zero();
        want.add_term(ZetaTerm::Mzv(MzvIndex::from_ints(&[4])), q(1));
        want.add_term(ZetaTerm::Mzv(MzvIndex::from_ints(&[3, 1])), q(-4));
        assert_eq!(rel.terms, want);
        assert_eq!(rel.weight, Some(4));
    }

    #[test]
    fn finite_dsr_requires_h0() {
        let r = finite_dsr(&"y".parse().unwrap(), &"xy".parse().unwrap());
        assert!(matches!(r, Err(Error::Invalid(msg)) if msg.contains("requires H0")));
    }

    #[test]
    fn finite_dsr_with_unit_is_trivial() {
        let rel = finite_dsr(&Word::empty(), &"xy".parse().unwrap()).unwrap();
        assert!(rel.is_trivial());
    }

    #[test]
    fn gen_relations_counts() {
        assert!(gen_relations(3).is_empty());
        let rels = gen_relations(4);
        assert_eq!(rels.len(), 1);
        let w5 = gen_relations(5);
        assert!(w5.len() > 1);
        // All rows independent by construction: re-reducing drops them all.
        let mut red = RowReducer::new();
        for r in &w5 {
            assert!(red.insert(&r.terms));
        }
    }

    #[test]
    fn verify_finite_dsr_numerically() {
        let rel = finite_dsr(&"xy".parse().unwrap(), &"xy".parse().unwrap()).unwrap();
        let out = verify(&rel, &Bindings::new(), &EvalParams::default()).unwrap();
        assert!(out.pass, "residual {}", out.residual);
        assert!(out.residual <= 1e-8);
    }

    #[test]
    fn stuffle_family_term_counts() {
        let s = functional_stuffle(2, &[Exponent::int(3), Exponent::slot("s1")]).unwrap();
        assert_eq!(s.rhs.len(), 5);
        let s = functional_stuffle(
            2,
            &[Exponent::int(3), Exponent::slot("s2"), Exponent::slot("s1")],
        )
        .unwrap();
        assert_eq!(s.rhs.len(), 7);
    }

    #[test]
    fn dsr_2_2_k1_is_the_weight_5_identity() {
        let rel = dsr_2_2_at(1).unwrap();
        let mut want = LinComb::zero();
        want.add_term(ZetaTerm::Mzv(MzvIndex::from_ints(&[3, 1, 1])), q(6));
        want.add_term(ZetaTerm::Mzv(MzvIndex::from_ints(&[2, 2, 1])), q(1));
        want.add_term(ZetaTerm::Mzv(MzvIndex::from_ints(&[4, 1])), q(-1));
        want.add_term(ZetaTerm::Mzv(MzvIndex::from_ints(&[2, 3])), q(-1));
        assert_eq!(rel.terms, want);
    }

    #[test]
    fn unsupported_family_is_an_error() {
        let r = functional_by_family("9-9", 2, 2, &[Exponent::slot("s1")]);
        assert!(matches!(r, Err(Error::FamilyNotImplemented(_))));
    }

    #[test]
    fn integer_specialization_lies_in_dsr_span() {
        // dsr-2-2 at k=2 is a weight-6 consequence of finite double shuffle.
        let rel = dsr_2_2_at(2).unwrap();
        let mut red = RowReducer::new();
        for r in gen_relations(6) {
            red.insert(&r.terms);
        }
        assert!(!red.insert(&rel.terms), "should be dependent");
    }

    #[test]
    fn relation_json_roundtrip() {
        let rel = finite_dsr(&"xy".parse().unwrap(), &"xxy".parse().unwrap()).unwrap();
        let back = Relation::from_json(&rel.to_json()).unwrap();
        assert_eq!(back.terms, rel.terms);
        assert_eq!(back.provenance, rel.provenance);
    }

    #[test]
    fn functional_json_roundtrip() {
        let rel = functional_dsr(2, 3, &[Exponent::slot("s1")]).unwrap();
        let back = FunctionalRelation::from_json(&rel.to_json()).unwrap();
        assert_eq!(back, rel);
    }
}
