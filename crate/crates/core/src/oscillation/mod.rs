//! Rearrangements, medians and local mean oscillation on dyadic cubes.
//!
//! Everything here works from the finite list of `(value, measure)` pairs
//! that a step function takes on a cube, so all quantities are exact
//! (measures are dyadic rationals).

mod lerner;

pub use lerner::{lerner_decompose, verify_lerner_bound, LernerDecomposition, LernerReport, StructureReport};

use serde::Serialize;

use crate::cube::DyadicCube;
use crate::error::{check_range, Error, Result};
use crate::step::StepFunction;

/// Distinct values in ascending order with the measure each occupies.
pub(crate) fn distribution(mut vals: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    vals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(vals.len());
    for (v, m) in vals {
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += m,
            _ => out.push((v, m)),
        }
    }
    out
}

/// `g^*(t) = inf{a > 0 : |{|g| > a}| < t}` for the function taking value
/// `v` on a set of measure `m` for each pair (and zero elsewhere).
pub(crate) fn rearrangement_of(vals: impl IntoIterator<Item = (f64, f64)>, t: f64) -> f64 {
    let abs: Vec<(f64, f64)> = vals.into_iter().map(|(v, m)| (v.abs(), m)).collect();
    let dist = distribution(abs);
    // Walk the levels a_1 > a_2 > ... downward. Any a in [a_k, a_{k-1}) is
    // exceeded on the top k-1 levels, so the infimum is the first level at
    // which the cumulative measure reaches t.
    let mut exceeding = 0.0;
    for &(a, m) in dist.iter().rev() {
        if a <= 0.0 {
            return 0.0;
        }
        exceeding += m;
        if exceeding >= t {
            return a;
        }
    }
    0.0
}

/// Non-increasing rearrangement `(f chi_Q)^*(t)` for `0 < t <= |Q|`.
pub fn rearrangement_value(f: &StepFunction, q: &DyadicCube, t: f64) -> Result<f64> {
    check_range("t", t, t > 0.0 && t <= q.measure(), "0 < t <= |Q|")?;
    Ok(rearrangement_of(f.values_in(q)?, t))
}

/// `((f - c) chi_Q)^*(t)`.
pub fn shifted_rearrangement(f: &StepFunction, q: &DyadicCube, c: f64, t: f64) -> Result<f64> {
    check_range("t", t, t > 0.0 && t <= q.measure(), "0 < t <= |Q|")?;
    Ok(rearrangement_of(f.values_in(q)?.into_iter().map(|(v, m)| (v - c, m)), t))
}

/// `sup_a a (|{x in Q : |f| > a}| / |Q|)^{1/p}`.
pub fn weak_lp_norm(f: &StepFunction, q: &DyadicCube, p: f64) -> Result<f64> {
    check_range("p", p, p > 0.0 && p.is_finite(), "0 < p < inf")?;
    let dist = distribution(f.values_in(q)?.into_iter().map(|(v, m)| (v.abs(), m)).collect());
    let mut above = 0.0;
    let mut best = 0.0f64;
    for &(a, m) in dist.iter().rev() {
        above += m;
        best = best.max(a * (above / q.measure()).powf(1.0 / p));
    }
    Ok(best)
}

/// `(|Q|^{-1} int_Q |f|^p)^{1/p}`.
pub fn lp_mean(f: &StepFunction, q: &DyadicCube, p: f64) -> Result<f64> {
    let s: f64 = f.values_in(q)?.iter().map(|(v, m)| v.abs().powf(p) * m).sum();
    Ok((s / q.measure()).powf(1.0 / p))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MedianResult {
    pub lo: f64,
    pub hi: f64,
    /// The minimal median, `lo`.
    pub canonical: f64,
}

impl MedianResult {
    pub fn contains(&self, m: f64) -> bool {
        self.lo <= m && m <= self.hi
    }
}

pub(crate) fn median_of(vals: Vec<(f64, f64)>, total: f64) -> MedianResult {
    let dist = distribution(vals);
    let half = total / 2.0;
    // lo: smallest value v with |{f > v}| <= half
    let mut above = total;
    let mut lo = dist.last().map_or(0.0, |d| d.0);
    for &(v, m) in &dist {
        above -= m;
        if above <= half {
            lo = v;
            break;
        }
    }
    // hi: largest value v with |{f < v}| <= half
    let mut below = total;
    let mut hi = dist.first().map_or(0.0, |d| d.0);
    for &(v, m) in dist.iter().rev() {
        below -= m;
        if below <= half {
            hi = v;
            break;
        }
    }
    MedianResult { lo, hi, canonical: lo }
}

/// The full closed interval of medians of `f` on `q`.
pub fn median(f: &StepFunction, q: &DyadicCube) -> Result<MedianResult> {
    Ok(median_of(f.values_in(q)?, q.measure()))
}

fn check_lambda(lambda: f64) -> Result<()> {
    check_range("lambda", lambda, lambda > 0.0 && lambda < 1.0, "0 < lambda < 1")
}

/// `omega_lambda` from a value distribution: the distance from the midpoint
/// to the ends of the narrowest window of consecutive sorted values whose complement has
/// measure strictly less than `lambda |Q|`.
pub(crate) fn omega_of(vals: Vec<(f64, f64)>, total: f64, lambda: f64) -> f64 {
    let dist = distribution(vals);
    let t = lambda * total;
    let mut best = f64::INFINITY;
    let mut inside = 0.0;
    let mut lo = 0;
    for hi in 0..dist.len() {
        inside += dist[hi].1;
        while total - inside < t {
            // evaluated at the midpoint the way the rearrangement would be
            let (a, b) = (dist[lo].0, dist[hi].0);
            let c = (a + b) / 2.0;
            best = best.min((c - a).max(b - c));
            inside -= dist[lo].1;
            lo += 1;
        }
    }
    if best.is_finite() {
        best
    } else {
        0.0
    }
}

/// Local mean oscillation `omega_lambda(f, Q) = inf_c ((f - c) chi_Q)^*(lambda |Q|)`.
pub fn local_mean_oscillation(f: &StepFunction, q: &DyadicCube, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(omega_of(f.values_in(q)?, q.measure(), lambda))
}

/// Reference evaluation of `omega_lambda` by direct minimization over the
/// finite candidate set of constants (leaf values and pairwise midpoints).
pub fn local_mean_oscillation_brute(f: &StepFunction, q: &DyadicCube, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let vals = f.values_in(q)?;
    let t = lambda * q.measure();
    let mut cands: Vec<f64> = vals.iter().map(|v| v.0).collect();
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            cands.push((vals[i].0 + vals[j].0) / 2.0);
        }
    }
    Ok(cands
        .into_iter()
        .map(|c| rearrangement_of(vals.iter().map(|&(v, m)| (v - c, m)), t))
        .fold(f64::INFINITY, f64::min))
}

/// `(omega_lambda(f,Q), ((f - m_f(Q)) chi_Q)^*(lambda|Q|))` with the
/// canonical median, for `0 < lambda <= 1/2`.
pub fn median_oscillation_bounds(f: &StepFunction, q: &DyadicCube, lambda: f64) -> Result<(f64, f64)> {
    check_range("lambda", lambda, lambda > 0.0 && lambda <= 0.5, "0 < lambda <= 1/2")?;
    let vals = f.values_in(q)?;
    let m = median_of(vals.clone(), q.measure()).canonical;
    let centered = rearrangement_of(vals.iter().map(|&(v, w)| (v - m, w)), lambda * q.measure());
    Ok((omega_of(vals, q.measure(), lambda), centered))
}

/// Dyadic local sharp maximal function
/// `M^{#,d}_{lambda,Q0} f(x) = sup_{x in Q' in D(Q0)} omega_lambda(f, Q')`.
///
/// Returned on the partition of `f`; zero outside `Q0`.
pub fn local_sharp_maximal(f: &StepFunction, q0: &DyadicCube, lambda: f64) -> Result<StepFunction> {
    check_lambda(lambda)?;
    f.with_node_values(&sharp_maximal_table(f, q0, lambda)?)
}

/// Per arena node: running maximum of `omega_lambda` from `Q0` down to the
/// node (zero for nodes not inside `Q0`).
pub(crate) fn sharp_maximal_table(f: &StepFunction, q0: &DyadicCube, lambda: f64) -> Result<Vec<f64>> {
    let start = f.locate(q0)?;
    let mut table = vec![0.0; f.nodes().len()];
    if f.node(start).is_leaf() {
        return Ok(table);
    }
    // pre-order: a parent is always visited before its children
    let mut stack: Vec<(usize, f64)> = vec![(start, 0.0)];
    while let Some((i, above)) = stack.pop() {
        let cube = f.node(i).cube();
        let here = above.max(omega_of(f.values_in(cube)?, cube.measure(), lambda));
        table[i] = here;
        for c in f.children(i) {
            stack.push((c, here));
        }
    }
    Ok(table)
}

pub(crate) fn require_same_dim(f: &StepFunction, q: &DyadicCube) -> Result<()> {
    if f.dim() == q.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: f.dim(), found: q.dim() })
    }
}
