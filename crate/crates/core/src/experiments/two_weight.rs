//! Two-weight stability runs: under a bump condition the ratio
//! `||T f||_{L^p(u)} / ||f||_{L^p(v)}` must stay bounded as the trees deepen.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stream;
use crate::error::{check_range, Error, Result};
use crate::operators::{dyadic_hilbert, dyadic_maximal, square_function, vector_maximal, VectorStepFunction};
use crate::step::StepFunction;
use crate::weights::{
    bp_classify, bump_constant_with_exponent, conjugate, power_weight, weighted_lp_norm, BpVerdict, Weight,
    YoungFunction,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum TwoWeightOperator {
    Maximal,
    Hilbert,
    Square,
    VectorMaximal { q: f64 },
}

impl TwoWeightOperator {
    /// The exponent `s` in `sup_Q ||u^{s/p}||_{A,Q}^{1/s} ||v^{-1/p}||_{B,Q}`.
    pub fn bump_exponent(&self, p: f64) -> f64 {
        match *self {
            TwoWeightOperator::Square if p > 2.0 => 2.0,
            TwoWeightOperator::VectorMaximal { q } if p > q => q,
            _ => 1.0,
        }
    }

    /// Whether the sufficient condition uses the plain `L^p` average on `u`.
    fn power_left(&self, p: f64) -> bool {
        match *self {
            TwoWeightOperator::Maximal => true,
            TwoWeightOperator::Hilbert => false,
            TwoWeightOperator::Square => p <= 2.0,
            TwoWeightOperator::VectorMaximal { q } => p <= q,
        }
    }
}

/// `u(x) = x^{gamma_u}`, `v(x) = x^{gamma_v}`, as in [`power_weight`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerPair {
    pub gamma_u: f64,
    pub gamma_v: f64,
}

impl PowerPair {
    pub fn build(&self, depth: u32) -> Result<(Weight, Weight)> {
        Ok((power_weight(self.gamma_u, depth)?, power_weight(self.gamma_v, depth)?))
    }
}

/// `A(t) = t^{p/s} log(e+t)^{p/s - 1 + delta}` and
/// `B(t) = t^{p'} log(e+t)^{p' - 1 + delta}`, whose associates satisfy
/// `B_{(p/s)'}` and `B_p` for every `delta > 0`.
pub fn log_bump_pair(p: f64, s: f64, delta: f64) -> Result<(YoungFunction, YoungFunction)> {
    let r = p / s;
    let rp = conjugate(p);
    Ok((YoungFunction::log_bump(r, r - 1.0 + delta)?, YoungFunction::log_bump(rp, rp - 1.0 + delta)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DepthRow {
    pub depth: u32,
    pub bump_constant: f64,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoWeightReport {
    pub operator: TwoWeightOperator,
    pub p: f64,
    pub rows: Vec<DepthRow>,
    /// Some ratio more than doubled between consecutive depths.
    pub blow_up: bool,
}

/// Random test functions per depth.
pub const TWO_WEIGHT_TRIALS: usize = 20;

/// For each depth, the bump constant of the pair and the largest ratio over
/// random `f` on the uniform tree of that depth. `a = None` uses the plain
/// `L^p` average on `u`, which is only allowed where the sufficient
/// condition has that form.
pub fn two_weight_singular_check(
    pair: &PowerPair,
    p: f64,
    a: Option<&YoungFunction>,
    b: &YoungFunction,
    op: TwoWeightOperator,
    depths: &[u32],
    seed: u64,
) -> Result<TwoWeightReport> {
    check_range("p", p, p > 1.0 && p.is_finite(), "1 < p < inf")?;
    if let TwoWeightOperator::VectorMaximal { q } = op {
        check_range("q", q, q > 1.0 && q.is_finite(), "1 < q < inf")?;
    }
    let s = op.bump_exponent(p);
    require(&b.associate()?, p, "the associate of B")?;
    let power = YoungFunction::power(p / s)?;
    let a = match a {
        Some(a) => {
            require(&a.associate()?, conjugate(p / s), "the associate of A")?;
            a.clone()
        }
        None if op.power_left(p) => power,
        None => {
            return Err(Error::Precondition(format!("{op:?} at p = {p} needs a bump A on the left")));
        }
    };
    let rows = depths
        .par_iter()
        .enumerate()
        .map(|(i, &depth)| depth_row(pair, p, s, &a, b, op, depth, seed, i as u64))
        .collect::<Result<Vec<_>>>()?;
    let blow_up = rows.windows(2).any(|w| w[1].max_ratio > 2.0 * w[0].max_ratio);
    Ok(TwoWeightReport { operator: op, p, rows, blow_up })
}

fn require(f: &YoungFunction, r: f64, what: &str) -> Result<()> {
    match bp_classify(f, r)? {
        BpVerdict::Satisfied => Ok(()),
        v => Err(Error::Precondition(format!("{what} must satisfy B_{r}, got {v:?}"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn depth_row(
    pair: &PowerPair,
    p: f64,
    s: f64,
    a: &YoungFunction,
    b: &YoungFunction,
    op: TwoWeightOperator,
    depth: u32,
    seed: u64,
    index: u64,
) -> Result<DepthRow> {
    let (u, v) = pair.build(depth)?;
    let bump = bump_constant_with_exponent(&u, &v, p, s, a, b)?;
    let mut rng = stream(seed, index);
    let n = 1usize << depth;
    let random = |rng: &mut rand_chacha::ChaCha8Rng| {
        let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        StepFunction::build_uniform(1, depth, &vals)
    };
    let mut best = 0.0f64;
    for _ in 0..TWO_WEIGHT_TRIALS {
        let f = random(&mut rng)?;
        let (out, input) = match op {
            TwoWeightOperator::Maximal => (dyadic_maximal(&f)?, f),
            TwoWeightOperator::Hilbert => (dyadic_hilbert(&f)?, f),
            TwoWeightOperator::Square => (square_function(&f)?, f),
            TwoWeightOperator::VectorMaximal { q } => {
                let g = random(&mut rng)?;
                let norm = f.zip_with(&g, |x, y| (x.abs().powf(q) + y.abs().powf(q)).powf(1.0 / q))?;
                (vector_maximal(q, &VectorStepFunction::new(vec![f, g])?)?, norm)
            }
        };
        let den = weighted_lp_norm(&input, p, &v)?;
        if den > 0.0 {
            best = best.max(weighted_lp_norm(&out, p, &u)? / den);
        }
    }
    Ok(DepthRow { depth, bump_constant: bump, max_ratio: best })
}
