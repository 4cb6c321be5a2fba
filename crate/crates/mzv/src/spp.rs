//! Prefixed shuffle states, the mirrored step, and the step-by-step trace
//! showing that decomposition of the nested sums tracks the shuffle steps.

use std::fmt;

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::algebra::binom;
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::index::{an_to_nested_sum, mzv_as_an, shuffle_state_layout, AnIndex, MzvIndex};
use crate::lincomb::{rational_to_string, LinComb};
use crate::nested::{pfd_step, reduce_to_mzvs, NestedSumExpr};

/// State z_{r_c}..z_{r_1}(z_{p_a}..z_{p_1} sh z_{q_b}..z_{q_1}), with all
/// three sequences stored head-first (r[0] = r_c, p[0] = p_a, q[0] = q_b).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SppState {
    pub r: Vec<i64>,
    pub p: Vec<i64>,
    pub q: Vec<i64>,
}

impl SppState {
    pub fn new(r: Vec<i64>, p: Vec<i64>, q: Vec<i64>) -> Self {
        SppState { r, p, q }
    }

    /// No shuffle left to perform: the state is a plain z-word.
    pub fn is_terminal(&self) -> bool {
        self.p.is_empty() || self.q.is_empty()
    }

    /// Terminal states read as the MZV with index r followed by whichever
    /// factor sequence is left.
    pub fn as_mzv(&self) -> Option<MzvIndex> {
        if !self.is_terminal() {
            return None;
        }
        let mut ks = self.r.clone();
        ks.extend_from_slice(&self.p);
        ks.extend_from_slice(&self.q);
        Some(MzvIndex::from_ints(&ks))
    }

    pub fn layout(&self) -> Result<AnIndex> {
        if self.is_terminal() {
            let ix = self.as_mzv().expect("terminal");
            return Ok(mzv_as_an(&ix));
        }
        let exps = |v: &[i64]| v.iter().map(|&k| Exponent::int(k)).collect::<Vec<_>>();
        shuffle_state_layout(&exps(&self.r), &exps(&self.p), &exps(&self.q))
    }

    pub fn to_expr(&self) -> NestedSumExpr {
        an_to_nested_sum(&self.layout().expect("valid state"))
    }
}

impl fmt::Display for SppState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = |v: &[i64]| {
            v.iter()
                .map(|k| format!("z{k}"))
                .collect::<Vec<_>>()
                .join("")
        };
        if self.is_terminal() {
            let mut w = self.r.clone();
            w.extend_from_slice(&self.p);
            w.extend_from_slice(&self.q);
            write!(f, "{}", z(&w))
        } else {
            write!(f, "{}({} sh {})", z(&self.r), z(&self.p), z(&self.q))
        }
    }
}

/// One shuffle step on a state: the head pair (p_a, q_b) is consumed and the
/// aggregated prefix joins the r-chain. Terminal states return themselves.
pub fn spp_mirror_step(state: &SppState) -> Vec<(BigRational, SppState)> {
    if state.is_terminal() {
        return vec![(BigRational::from_integer(1.into()), state.clone())];
    }
    let pa = state.p[0];
    let qb = state.q[0];
    let mut out = Vec::with_capacity((pa + qb) as usize);
    for tau in 0..qb {
        let mut r = state.r.clone();
        r.push(pa + tau);
        let mut q = vec![qb - tau];
        q.extend_from_slice(&state.q[1..]);
        out.push((
            BigRational::from_integer(binom(pa - 1 + tau, tau)),
            SppState::new(r, state.p[1..].to_vec(), q),
        ));
    }
    for tau in 0..pa {
        let mut r = state.r.clone();
        r.push(qb + tau);
        let mut p = vec![pa - tau];
        p.extend_from_slice(&state.p[1..]);
        out.push((
            BigRational::from_integer(binom(qb - 1 + tau, tau)),
            SppState::new(r, p, state.q[1..].to_vec()),
        ));
    }
    out
}

/// Snapshot after one paired step.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub algebra: LinComb<SppState>,
    pub analysis: LinComb<NestedSumExpr>,
    pub matched: bool,
}

/// The two columns of the procedure diagram, stepped in lockstep.
#[derive(Clone, Debug)]
pub struct DiagramTrace {
    pub steps: Vec<TraceStep>,
    pub completed: bool,
}

fn lincomb_json<K: Ord + Clone, F: Fn(&K) -> Value>(lc: &LinComb<K>, f: F) -> Value {
    Value::Array(
        lc.iter()
            .map(|(k, c)| json!({ "coeff": rational_to_string(c), "term": f(k) }))
            .collect(),
    )
}

impl DiagramTrace {
    pub fn to_json(&self) -> Value {
        json!({
            "completed": self.completed,
            "steps": self.steps.iter().map(|s| json!({
                "matched": s.matched,
                "algebra": lincomb_json(&s.algebra, |st| json!(st.to_string())),
                "analysis": lincomb_json(&s.analysis, |e| e.to_json()),
            })).collect::<Vec<_>>(),
        })
    }
}

fn expr_side(states: &LinComb<SppState>) -> LinComb<NestedSumExpr> {
    states.map_keys(|s| s.to_expr())
}

/// Runs the shuffle steps on w1 sh w2 and the matching decompositions on the
/// nested sums, checking both columns agree after every step.
pub fn trace_commutative_diagram(w1: &[i64], w2: &[i64], max_steps: usize) -> Result<DiagramTrace> {
    if w1.is_empty() || w2.is_empty() {
        return Err(Error::EmptyStepFactor);
    }
    let start = SppState::new(vec![], w1.to_vec(), w2.to_vec());
    let mut algebra: LinComb<SppState> = LinComb::singleton(start.clone());
    let mut analysis: LinComb<NestedSumExpr> = LinComb::singleton(start.to_expr());
    let mut steps = vec![TraceStep {
        algebra: algebra.clone(),
        analysis: analysis.clone(),
        matched: true,
    }];
    let mut completed = false;
    for step_no in 1..=max_steps {
        let pending = algebra
            .iter()
            .find(|(s, _)| !s.is_terminal())
            .map(|(s, c)| (s.clone(), c.clone()));
        let Some((state, coeff)) = pending else {
            completed = true;
            break;
        };

        algebra.add_term(state.clone(), -coeff.clone());
        for (c, child) in spp_mirror_step(&state) {
            algebra.add_term(child, c * &coeff);
        }

        let expr = state.to_expr();
        let children = pfd_step(&expr)?.ok_or_else(|| {
            Error::Invalid("analysis side terminal while algebra side is not".into())
        })?;
        analysis.add_term(expr, -coeff.clone());
        analysis = analysis.add(&children.scale(&coeff));

        let matched = expr_side(&algebra) == analysis;
        steps.push(TraceStep {
            algebra: algebra.clone(),
            analysis: analysis.clone(),
            matched,
        });
        if !matched {
            return Err(Error::DiagramMismatch {
                step: step_no,
                algebra: expr_side(&algebra).to_string(),
                analysis: analysis.to_string(),
            });
        }
    }
    if !completed {
        completed = algebra.iter().all(|(s, _)| s.is_terminal());
    }
    Ok(DiagramTrace { steps, completed })
}

/// Repeated decomposition of a layout down to a combination of MZV indices.
pub fn pfd_full_reduce(ix: &AnIndex) -> Result<LinComb<MzvIndex>> {
    if !ix.is_integral() {
        return Err(Error::SymbolicReduce);
    }
    reduce_to_mzvs(&an_to_nested_sum(ix), 10_000)
}
