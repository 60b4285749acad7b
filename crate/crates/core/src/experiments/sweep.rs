//! Exponent sweeps: `log ||T||_{L^p(w)}` against `log [w]_{A_p}` over a
//! one-parameter weight family.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{exponent_fit, stream, Fit};
use crate::error::{Error, Result};
use crate::operators::{
    dyadic_hilbert, dyadic_maximal, haar_multiplier, paraproduct, square_function, vector_maximal, VectorStepFunction,
};
use crate::step::StepFunction;
use crate::weights::{ap_constant, bmo_dyadic_norm, power_weight, weighted_lp_norm, Weight};

/// Random test functions added to the designed one at every sweep point.
pub const RANDOM_TRIALS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepOperator {
    Maximal,
    Hilbert,
    Square,
    VectorMaximal {
        q: f64,
    },
    /// Paraproduct with the symbol `log2(1/x)` normalized to dyadic BMO norm 1.
    Paraproduct,
    /// Haar multiplier with `alpha_I = (-1)^{level(I)}`.
    Multiplier,
}

impl SweepOperator {
    /// The exponent of `[w]_{A_p}` in the known sharp upper bound.
    pub fn upper_exponent(&self, p: f64) -> f64 {
        let dual = 1.0 / (p - 1.0);
        match self {
            SweepOperator::Maximal => dual,
            SweepOperator::Hilbert | SweepOperator::Paraproduct | SweepOperator::Multiplier => dual.max(1.0),
            SweepOperator::Square => dual.max(0.5),
            SweepOperator::VectorMaximal { q } => dual.max(1.0 / q),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            SweepOperator::Maximal => "maximal",
            SweepOperator::Hilbert => "hilbert",
            SweepOperator::Square => "square",
            SweepOperator::VectorMaximal { .. } => "vector_maximal",
            SweepOperator::Paraproduct => "paraproduct",
            SweepOperator::Multiplier => "multiplier",
        }
    }
}

/// A one-parameter family of weights with a designed test function.
pub trait SweepFamily: Sync {
    fn build(&self, p: f64, eps: f64) -> Result<(Weight, StepFunction)>;
}

/// `w(x) = x^{(1-eps)(p-1)}` with the test function `w^{1-p'} ~ x^{-1+eps}`,
/// both as cell averages on geometric shells toward 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Buckley {
    #[serde(default = "default_depth")]
    pub depth: u32,
}

fn default_depth() -> u32 {
    40
}

impl Default for Buckley {
    fn default() -> Self {
        Self { depth: default_depth() }
    }
}

impl SweepFamily for Buckley {
    fn build(&self, p: f64, eps: f64) -> Result<(Weight, StepFunction)> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::OutOfRange { name: "eps", value: eps, expected: "0 < eps < 1" });
        }
        let w = power_weight((1.0 - eps) * (p - 1.0), self.depth)?;
        let f = w.dual(p)?.into_function();
        Ok((w, f))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub ap_constant: f64,
    pub ratio: f64,
    pub log_ap: f64,
    pub log_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub operator: SweepOperator,
    pub p: f64,
    /// Sorted by `ap_constant`.
    pub points: Vec<SweepPoint>,
    /// Present when there are at least four points. The slope is a lower
    /// estimate of the sharp exponent, since every ratio is a lower bound
    /// for the operator norm.
    pub fit: Option<Fit>,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,ap_constant,ratio,log_ap,log_ratio\n");
        for pt in &self.points {
            writeln!(out, "{},{},{},{},{}", pt.epsilon, pt.ap_constant, pt.ratio, pt.log_ap, pt.log_ratio)
                .expect("writing to a String");
        }
        out
    }
}

/// Run `op` over the family at each `eps`. Points are computed in parallel
/// and gathered by index; each point draws its random test functions from
/// its own stream of `seed`.
pub fn sharpness_sweep(
    op: SweepOperator,
    p: f64,
    eps: &[f64],
    family: &dyn SweepFamily,
    seed: u64,
) -> Result<SweepResult> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::OutOfRange { name: "p", value: p, expected: "1 < p < inf" });
    }
    if let SweepOperator::VectorMaximal { q } = op {
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::OutOfRange { name: "q", value: q, expected: "1 < q < inf" });
        }
    }
    let mut points: Vec<SweepPoint> = eps
        .par_iter()
        .enumerate()
        .map(|(i, &e)| sweep_point(op, p, e, family, seed, i as u64))
        .collect::<Result<_>>()?;
    points.sort_by(|a, b| a.ap_constant.total_cmp(&b.ap_constant));
    let xy: Vec<(f64, f64)> = points.iter().map(|pt| (pt.log_ap, pt.log_ratio)).collect();
    let fit = exponent_fit(&xy)?;
    let fit = (points.len() >= 4).then_some(fit);
    Ok(SweepResult { operator: op, p, points, fit })
}

fn sweep_point(
    op: SweepOperator,
    p: f64,
    eps: f64,
    family: &dyn SweepFamily,
    seed: u64,
    index: u64,
) -> Result<SweepPoint> {
    let (w, f) = family.build(p, eps)?;
    let ap = ap_constant(&w, p)?;
    let symbol = match op {
        SweepOperator::Paraproduct => Some(log_symbol(&w)?),
        _ => None,
    };
    let mut rng = stream(seed, index);
    let mut best = ratio(op, p, &w, std::slice::from_ref(&f), symbol.as_ref())?;
    for t in 0..RANDOM_TRIALS {
        let mut perturb = |g: &StepFunction| {
            if t % 2 == 0 {
                g.map(|v| v * (1.0 + rng.gen_range(-0.5..=0.5)))
            } else {
                g.map(|v| v * rng.gen_range(-1.0..=1.0))
            }
        };
        let comps = match op {
            SweepOperator::VectorMaximal { .. } => vec![perturb(&f)?, perturb(&f)?],
            _ => vec![perturb(&f)?],
        };
        best = best.max(ratio(op, p, &w, &comps, symbol.as_ref())?);
    }
    let point = SweepPoint { epsilon: eps, ap_constant: ap, ratio: best, log_ap: ap.ln(), log_ratio: best.ln() };
    for v in [point.ap_constant, point.ratio] {
        if !v.is_finite() {
            return Err(Error::NonFinite(v));
        }
    }
    Ok(point)
}

// ||Op F||_{L^p(w)} / || |F|_q ||_{L^p(w)}; 0 when the input vanishes.
fn ratio(op: SweepOperator, p: f64, w: &Weight, comps: &[StepFunction], b: Option<&StepFunction>) -> Result<f64> {
    let f = &comps[0];
    let (out, input) = match op {
        SweepOperator::Maximal => (dyadic_maximal(f)?, f.clone()),
        SweepOperator::Hilbert => (dyadic_hilbert(f)?, f.clone()),
        SweepOperator::Square => (square_function(f)?, f.clone()),
        SweepOperator::Paraproduct => (paraproduct(b.expect("symbol"), f)?, f.clone()),
        SweepOperator::Multiplier => (haar_multiplier(|q| if q.level() % 2 == 0 { 1.0 } else { -1.0 }, f)?, f.clone()),
        SweepOperator::VectorMaximal { q } => {
            let vf = VectorStepFunction::new(comps.to_vec())?;
            let mut norm = comps[0].map(|v| v.abs().powf(q))?;
            for c in &comps[1..] {
                norm = norm.zip_with(c, |a, v| a + v.abs().powf(q))?;
            }
            (vector_maximal(q, &vf)?, norm.map(|v| v.powf(1.0 / q))?)
        }
    };
    let den = weighted_lp_norm(&input, p, w)?;
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(weighted_lp_norm(&out, p, w)? / den)
}

// log2(1/x) sampled as the shell index, scaled to dyadic BMO norm 1
fn log_symbol(w: &Weight) -> Result<StepFunction> {
    let b = w.function().map_indexed(|i, _| w.function().node(i).cube().level() as f64)?;
    let norm = bmo_dyadic_norm(&b)?;
    if norm == 0.0 {
        return Ok(b);
    }
    b.scale(1.0 / norm)
}
