//! Numerical evaluation of MZVs, A_N zeta values, and nested sums,
//! generic over the float type.

use num_traits::{Float, FromPrimitive};

use crate::error::{Error, Result};
use crate::exponent::Bindings;
use crate::index::{an_to_nested_sum, AnIndex, MzvIndex};
use crate::nested::NestedSumExpr;
use crate::spp::pfd_full_reduce;

/// Truncation and precision controls.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalParams {
    /// Truncation of the outer recursion for MZVs.
    pub mzv_m: usize,
    /// Per-variable truncation for direct multi-sums.
    pub direct_m: usize,
    /// Euler-Maclaurin terms kept in tail corrections (0, 1, or 2).
    pub tail_order: u8,
    /// Target absolute tolerance; exceeding it is an error.
    pub tolerance: f64,
    /// Working float precision in bits (informational; 32 or 64).
    pub precision_bits: u32,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            mzv_m: 10_000,
            direct_m: 400,
            tail_order: 2,
            tolerance: 1e-6,
            precision_bits: 64,
        }
    }
}

impl EvalParams {
    pub fn validate(&self) -> Result<()> {
        if self.mzv_m < 10 || self.direct_m < 10 {
            return Err(Error::Invalid("truncation M must be >= 10".into()));
        }
        if self.tolerance <= 0.0 || self.tolerance.is_nan() {
            return Err(Error::Invalid("tolerance must be > 0".into()));
        }
        if self.tail_order > 2 {
            return Err(Error::Invalid("tail order must be 0, 1, or 2".into()));
        }
        Ok(())
    }
}

/// Value plus an error bound. The bound is heuristic (difference of two
/// truncations), not a certified enclosure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult<F> {
    pub value: F,
    pub error_bound: F,
    pub heuristic: bool,
}

pub type EvalResult64 = EvalResult<f64>;
pub type EvalResult32 = EvalResult<f32>;

fn f<F: Float + FromPrimitive>(x: f64) -> F {
    F::from_f64(x).expect("finite")
}

/// One power term c * u^{-s}.
#[derive(Clone, Copy)]
struct PowTerm<F> {
    c: F,
    s: F,
}

/// Euler-Maclaurin expansion of sum_{m > u} m^{-s} as power terms in u:
/// u^{1-s}/(s-1) - u^{-s}/2 + s u^{-s-1}/12 (truncated per tail_order).
fn power_tail<F: Float + FromPrimitive>(t: PowTerm<F>, order: u8) -> Vec<PowTerm<F>> {
    let one = F::one();
    let mut out = vec![PowTerm {
        c: t.c / (t.s - one),
        s: t.s - one,
    }];
    if order >= 1 {
        out.push(PowTerm {
            c: -t.c / f::<F>(2.0),
            s: t.s,
        });
    }
    if order >= 2 {
        out.push(PowTerm {
            c: t.c * t.s / f::<F>(12.0),
            s: t.s + one,
        });
    }
    out
}

fn eval_terms<F: Float + FromPrimitive>(terms: &[PowTerm<F>], u: F) -> F {
    let mut v = F::zero();
    for t in terms {
        v = v + t.c * u.powf(-t.s);
    }
    v
}

fn mzv_truncated<F: Float + FromPrimitive>(ks: &[f64], m: usize, order: u8) -> F {
    let n = ks.len();
    // g[i] = sum over m >= m_i > ... > m_n >= 1 of the inner products;
    // g[n] == 1 is the empty level.
    let mut g = vec![F::zero(); n + 1];
    g[n] = F::one();
    let mut pow = vec![F::zero(); n];
    for v in 1..=m {
        let vf = f::<F>(v as f64);
        for (i, k) in ks.iter().enumerate() {
            pow[i] = vf.powf(f::<F>(-k));
        }
        // Ascending i: g[i+1] still holds the value at v-1.
        for i in 0..n {
            g[i] = g[i] + pow[i] * g[i + 1];
        }
    }
    // Multi-level tail: the missing terms have m_i > M for a prefix of
    // levels. Weight terms propagate inward as power expansions.
    let mf = f::<F>(m as f64);
    let mut tail = F::zero();
    let mut weight = vec![PowTerm {
        c: F::one(),
        s: F::zero(),
    }];
    for i in 0..n {
        let mut shifted: Vec<PowTerm<F>> = weight
            .iter()
            .map(|t| PowTerm {
                c: t.c,
                s: t.s + f::<F>(ks[i]),
            })
            .collect();
        shifted.retain(|t| t.c != F::zero());
        let mut p: Vec<PowTerm<F>> = Vec::with_capacity(shifted.len() * 3);
        for t in shifted {
            p.extend(power_tail(t, order));
        }
        // Inner levels fully below M contribute g[i+1] times the pure tail.
        tail = tail + g[i + 1] * eval_terms(&p, mf);
        weight = p;
    }
    g[0] + tail
}

fn bound_indices(k: &MzvIndex, bindings: &Bindings) -> Result<Vec<f64>> {
    k.ks.iter().map(|e| e.bind(bindings)).collect()
}

/// zeta(k_1,...,k_N) by cumulative partial sums plus tail correction.
pub fn eval_mzv<F: Float + FromPrimitive>(
    k: &MzvIndex,
    bindings: &Bindings,
    params: &EvalParams,
) -> Result<EvalResult<F>> {
    params.validate()?;
    let ks = bound_indices(k, bindings)?;
    if ks.is_empty() {
        return Err(Error::Divergent("empty index".into()));
    }
    if ks[0] <= 1.0 {
        return Err(Error::Divergent(format!("k_1 = {} <= 1", ks[0])));
    }
    if ks.iter().any(|&x| x <= 0.0) {
        return Err(Error::Divergent("all exponents must be > 0".into()));
    }
    let v_full: F = mzv_truncated(&ks, params.mzv_m, params.tail_order);
    let v_half: F = mzv_truncated(&ks, params.mzv_m / 2, params.tail_order);
    let bound = (v_full - v_half).abs();
    if bound.to_f64().unwrap_or(f64::INFINITY) > params.tolerance {
        return Err(Error::PrecisionNotMet {
            value: v_full.to_f64().unwrap_or(f64::NAN),
            bound: bound.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(EvalResult {
        value: v_full,
        error_bound: bound,
        heuristic: true,
    })
}

/// Sufficient convergence condition: for every nonempty subset S of the
/// variables, the exponents of factors meeting S sum to more than |S|.
fn converges(factors: &[(usize, usize, f64)], nvars: usize) -> bool {
    if nvars == 0 || nvars > 63 {
        return false;
    }
    for mask in 1u64..(1u64 << nvars) {
        let mut total = 0.0;
        for &(lo, hi, e) in factors {
            let meets = (lo..=hi).any(|v| mask >> (v - 1) & 1 == 1);
            if meets {
                total += e;
            }
        }
        if total <= mask.count_ones() as f64 {
            return false;
        }
    }
    true
}

/// Legendre-Gauss nodes/weights on (0, 1), by Newton iteration on P_n.
fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for i in 0..n {
        // Initial guess (Chebyshev-like) on [-1, 1].
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Evaluate P_n and P_n' by recurrence.
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1,1] -> [0,1].
        xs.push(0.5 * (x + 1.0));
        ws.push(0.5 * w);
    }
    (xs, ws)
}

struct BoxSummer {
    /// (lo, hi, exponent), sorted so each factor is applied at depth hi.
    factors: Vec<(usize, usize, f64)>,
    nvars: usize,
}

impl BoxSummer {
    /// Sum over the integer box [1..m]^nvars, with some variables pinned to
    /// real values (their integer slots stay 0; the real offsets are added
    /// only in factors covering them). Integer interval sums go through
    /// per-factor power tables.
    fn box_sum<F: Float + FromPrimitive>(
        &self,
        m: usize,
        pins: &[(usize, F)],
        tables: &[Vec<F>],
    ) -> F {
        let mut vals = vec![0usize; self.nvars];
        self.recurse(m, pins, tables, 0, &mut vals, F::one())
    }

    fn recurse<F: Float + FromPrimitive>(
        &self,
        m: usize,
        pins: &[(usize, F)],
        tables: &[Vec<F>],
        d: usize,
        vals: &mut [usize],
        prod: F,
    ) -> F {
        if d == self.nvars {
            return prod;
        }
        let var = d + 1;
        let pinned_here = pins.iter().any(|&(pv, _)| pv == var);
        let mut acc = F::zero();
        let mut v = 1usize;
        loop {
            vals[d] = if pinned_here { 0 } else { v };
            // Apply every factor whose interval closes at this depth.
            let mut p = prod;
            for (fi, &(lo, hi, e)) in self.factors.iter().enumerate() {
                if hi != var {
                    continue;
                }
                let isum: usize = vals[lo - 1..hi].iter().sum();
                let mut offset = F::zero();
                let mut covered = false;
                for &(pv, x) in pins {
                    if lo <= pv && pv <= hi {
                        offset = offset + x;
                        covered = true;
                    }
                }
                if covered {
                    p = p * (f::<F>(isum as f64) + offset).powf(f::<F>(-e));
                } else {
                    p = p * tables[fi][isum];
                }
            }
            acc = acc + self.recurse(m, pins, tables, d + 1, vals, p);
            if pinned_here || v == m {
                break;
            }
            v += 1;
        }
        acc
    }

    fn tables<F: Float + FromPrimitive>(&self, m: usize) -> Vec<Vec<F>> {
        let top = self.nvars * m + 1;
        self.factors
            .iter()
            .map(|&(_, _, e)| {
                let mut t = Vec::with_capacity(top + 1);
                t.push(F::nan());
                for v in 1..=top {
                    t.push(f::<F>(v as f64).powf(f::<F>(-e)));
                }
                t
            })
            .collect()
    }

    /// Box sum plus tail corrections, composing the per-variable
    /// Euler-Maclaurin operator over all subsets of tail variables:
    /// sum_{x>m} g(x) ~ integral_m^inf g - g(m)/2 - g'(m)/12.
    fn estimate<F: Float + FromPrimitive>(&self, m: usize, order: u8) -> F {
        let tables = self.tables::<F>(m);
        let (nodes, weights) = gauss_legendre_01(16);
        let mut pins: Vec<(usize, F)> = Vec::new();
        self.expand(m, order, &nodes, &weights, &tables, 1, &mut pins, F::one())
    }

    #[allow(clippy::too_many_arguments)]
    fn expand<F: Float + FromPrimitive>(
        &self,
        m: usize,
        order: u8,
        nodes: &[f64],
        weights: &[f64],
        tables: &[Vec<F>],
        var: usize,
        pins: &mut Vec<(usize, F)>,
        w: F,
    ) -> F {
        if var > self.nvars {
            return w * self.box_sum(m, pins, tables);
        }
        // Variable stays inside the box.
        let mut total = self.expand(m, order, nodes, weights, tables, var + 1, pins, w);
        let mf = m as f64;
        // Tail integral over x > m via the substitution x = m/t.
        for (t, gw) in nodes.iter().zip(weights) {
            let jac = f::<F>(mf / (t * t) * gw);
            pins.push((var, f::<F>(mf / t)));
            total = total + self.expand(m, order, nodes, weights, tables, var + 1, pins, w * jac);
            pins.pop();
        }
        if order >= 1 {
            pins.push((var, f::<F>(mf)));
            let half = w / f::<F>(2.0);
            total = total - self.expand(m, order, nodes, weights, tables, var + 1, pins, half);
            pins.pop();
        }
        if order >= 2 {
            // -g'(m)/12 by central difference on the pinned value.
            let h = mf * 1e-3;
            for (x, sgn) in [(mf + h, -1.0), (mf - h, 1.0)] {
                pins.push((var, f::<F>(x)));
                let cw = w * f::<F>(sgn / (24.0 * h));
                total = total + self.expand(m, order, nodes, weights, tables, var + 1, pins, cw);
                pins.pop();
            }
        }
        total
    }
}

/// Direct evaluation of a nested-sum expression at bound slot values.
pub fn eval_nested_sum<F: Float + FromPrimitive>(
    expr: &NestedSumExpr,
    bindings: &Bindings,
    params: &EvalParams,
) -> Result<EvalResult<F>> {
    params.validate()?;
    if expr.factors().is_empty() {
        return Err(Error::Divergent("empty expression".into()));
    }
    let factors: Vec<(usize, usize, f64)> = expr
        .factors()
        .iter()
        .map(|fac| Ok((fac.lo, fac.hi, fac.exp.bind(bindings)?)))
        .collect::<Result<_>>()?;
    if !converges(&factors, expr.nvars) {
        return Err(Error::UnverifiedConvergence(expr.to_string()));
    }
    if expr.nvars > 4 {
        return Err(Error::Invalid(
            "direct summation supports at most 4 variables".into(),
        ));
    }
    let m = if expr.nvars >= 4 {
        params.direct_m.min(120)
    } else {
        params.direct_m
    };
    let summer = BoxSummer {
        factors,
        nvars: expr.nvars,
    };
    let order = params.tail_order;
    let v_full: F = summer.estimate(m, order);
    let v_half: F = summer.estimate(m / 2, order);
    // Two-mesh heuristic: for error ~ C/m^k the difference equals the error
    // exactly at k = 1, so double it for a safety margin.
    let bound = (v_full - v_half).abs() * f::<F>(2.0);
    if bound.to_f64().unwrap_or(f64::INFINITY) > params.tolerance {
        return Err(Error::PrecisionNotMet {
            value: v_full.to_f64().unwrap_or(f64::NAN),
            bound: bound.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(EvalResult {
        value: v_full,
        error_bound: bound,
        heuristic: true,
    })
}

/// A_N zeta value: exact reduction to MZVs when possible, direct summation
/// otherwise.
pub fn eval_an<F: Float + FromPrimitive>(
    ix: &AnIndex,
    bindings: &Bindings,
    params: &EvalParams,
) -> Result<EvalResult<F>> {
    params.validate()?;
    if ix.is_integral() {
        if let Ok(reduced) = pfd_full_reduce(ix) {
            let mut value = F::zero();
            let mut bound = F::zero();
            let mut ok = true;
            let mut results = Vec::new();
            for (k, c) in reduced.iter() {
                match eval_mzv::<F>(k, bindings, params) {
                    Ok(r) => results.push((r, c.clone())),
                    Err(Error::Divergent(_)) => {
                        return Err(Error::UnverifiedConvergence(ix.to_string()))
                    }
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                for (r, c) in results {
                    let cf = f::<F>(rational_f64(&c));
                    value = value + cf * r.value;
                    bound = bound + cf.abs() * r.error_bound;
                }
                return Ok(EvalResult {
                    value,
                    error_bound: bound,
                    heuristic: true,
                });
            }
        }
    }
    eval_nested_sum(&an_to_nested_sum(ix), bindings, params)
}

fn rational_f64(c: &num_rational::BigRational) -> f64 {
    let n = c.numer();
    let d = c.denom();
    bigint_f64(n) / bigint_f64(d)
}

fn bigint_f64(n: &num_bigint::BigInt) -> f64 {
    n.to_string().parse::<f64>().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::mzv_as_an;

    fn p() -> EvalParams {
        EvalParams::default()
    }

    fn ev(ks: &[i64]) -> f64 {
        eval_mzv::<f64>(&MzvIndex::from_ints(ks), &Bindings::new(), &p())
            .unwrap()
            .value
    }

    #[test]
    fn zeta_2_matches_pi_squared_over_6() {
        let want = std::f64::consts::PI.powi(2) / 6.0;
        assert!((ev(&[2]) - want).abs() < 1e-10);
    }

    #[test]
    fn euler_zeta_2_1_equals_zeta_3() {
        assert!((ev(&[2, 1]) - ev(&[3])).abs() < 1e-8);
    }

    #[test]
    fn trailing_ones_still_accurate() {
        // zeta(2,1,1) = zeta(4) (a classical identity).
        assert!((ev(&[2, 1, 1]) - ev(&[4])).abs() < 1e-8);
    }

    #[test]
    fn divergent_indices_rejected() {
        let r = eval_mzv::<f64>(&MzvIndex::from_ints(&[1, 2]), &Bindings::new(), &p());
        assert!(matches!(r, Err(Error::Divergent(_))));
    }

    #[test]
    fn real_exponent_slot() {
        let mut b = Bindings::new();
        b.insert("s1".into(), 2.5);
        let k = MzvIndex {
            ks: vec![crate::exponent::Exponent::slot("s1")],
        };
        let r = eval_mzv::<f64>(&k, &b, &p()).unwrap();
        // zeta(2.5) = 1.3414872572509171...
        assert!((r.value - 1.341487257250917).abs() < 1e-9);
    }

    #[test]
    fn an_embedding_matches_mzv() {
        for ks in [vec![2], vec![2, 1], vec![3, 2], vec![2, 1, 1]] {
            let k = MzvIndex::from_ints(&ks);
            let a = eval_an::<f64>(&mzv_as_an(&k), &Bindings::new(), &p()).unwrap();
            let m = eval_mzv::<f64>(&k, &Bindings::new(), &p()).unwrap();
            assert!(
                (a.value - m.value).abs() <= (a.error_bound + m.error_bound).max(1e-9),
                "ks={ks:?}"
            );
        }
    }

    #[test]
    fn harmonic_product_identity_numeric() {
        for (kp, kq) in [(2, 2), (2, 3), (3, 4)] {
            let lhs = ev(&[kp]) * ev(&[kq]);
            let rhs = ev(&[kp, kq]) + ev(&[kq, kp]) + ev(&[kp + kq]);
            assert!((lhs - rhs).abs() < 1e-8, "p={kp} q={kq}");
        }
    }

    #[test]
    fn nested_sum_single_factor_is_zeta() {
        use crate::nested::Factor;
        let e = NestedSumExpr::new(
            1,
            vec![Factor {
                lo: 1,
                hi: 1,
                exp: crate::exponent::Exponent::int(2),
            }],
        );
        let r = eval_nested_sum::<f64>(&e, &Bindings::new(), &p()).unwrap();
        assert!((r.value - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-6);
    }

    #[test]
    fn nested_sum_slow_path_matches_fast_path() {
        // zeta_3(2,0,2,0,1,0;A_3): PFD fast path vs direct triple sum.
        use crate::exponent::Exponent;
        use crate::index::shuffle_state_layout;
        let e = Exponent::int;
        let layout = shuffle_state_layout(&[e(2)], &[e(2)], &[e(1)]).unwrap();
        let fast = eval_an::<f64>(&layout, &Bindings::new(), &p()).unwrap();
        let mut params = p();
        params.tolerance = 1e-4;
        let slow =
            eval_nested_sum::<f64>(&an_to_nested_sum(&layout), &Bindings::new(), &params).unwrap();
        assert!(
            (fast.value - slow.value).abs() < 1e-5,
            "fast={} slow={}",
            fast.value,
            slow.value
        );
    }

    #[test]
    fn empty_expression_is_divergent() {
        let e = NestedSumExpr::new(1, vec![]);
        assert!(matches!(
            eval_nested_sum::<f64>(&e, &Bindings::new(), &p()),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn divergent_an_pattern_rejected() {
        use crate::exponent::Exponent;
        use crate::index::shuffle_state_layout;
        // c=0 with p_a=1: zeta_2(0,1,2) diverges.
        let layout = shuffle_state_layout(&[], &[Exponent::int(1)], &[Exponent::int(2)]).unwrap();
        assert!(eval_an::<f64>(&layout, &Bindings::new(), &p()).is_err());
    }

    #[test]
    fn gauss_nodes_integrate_polynomials() {
        let (xs, ws) = gauss_legendre_01(16);
        // integral of x^5 over [0,1] = 1/6
        let v: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(5)).sum();
        assert!((v - 1.0 / 6.0).abs() < 1e-14);
    }
}
