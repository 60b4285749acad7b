//! Weights, `A_p` and bump characteristics, and dyadic BMO.

mod luxemburg;
mod young;

use rayon::prelude::*;

use crate::cube::DyadicCube;
use crate::error::{check_range, Error, Result};
use crate::step::{common_refinement, StepFunction};

pub(crate) use luxemburg::luxemburg_of;
pub use luxemburg::{luxemburg_norm, luxemburg_norm_bisect};
pub use young::{bp_classify, BpVerdict, YoungDescriptor, YoungFunction};

/// A strictly positive step function.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight(StepFunction);

impl Weight {
    pub fn new(w: StepFunction) -> Result<Self> {
        if let Some(v) = w.leaf_values().into_iter().find(|&v| !(v > 0.0)) {
            return Err(Error::NonPositiveWeight(v));
        }
        Ok(Self(w))
    }

    pub fn function(&self) -> &StepFunction {
        &self.0
    }

    pub fn into_function(self) -> StepFunction {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `w^s` on the same partition.
    pub fn pow(&self, s: f64) -> Result<Self> {
        Weight::new(self.0.map(|v| v.powf(s))?)
    }

    /// The dual weight `sigma = w^{1-p'}`.
    pub fn dual(&self, p: f64) -> Result<Self> {
        check_p(p)?;
        self.pow(1.0 - conjugate(p))
    }
}

pub(crate) fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

fn check_p(p: f64) -> Result<()> {
    check_range("p", p, p > 1.0 && p.is_finite(), "1 < p < inf")
}

/// `[w]_{A_p} = sup_Q <w>_Q <w^{1-p'}>_Q^{p-1}` over dyadic cubes.
///
/// Cubes below the leaves see a constant weight and contribute exactly 1.
pub fn ap_constant(w: &Weight, p: f64) -> Result<f64> {
    let sigma = w.dual(p)?;
    let (wn, sn) = (w.0.nodes(), sigma.0.nodes());
    Ok(wn.par_iter().zip(sn.par_iter()).map(|(a, b)| a.mean() * b.mean().powf(p - 1.0)).reduce(|| 1.0, f64::max))
}

/// `(int |f|^p w)^{1/p}` over the root cube.
pub fn weighted_lp_norm(f: &StepFunction, p: f64, w: &Weight) -> Result<f64> {
    check_range("p", p, p >= 1.0 && p.is_finite(), "1 <= p < inf")?;
    let g = f.zip_with(&w.0, |a, b| a.abs().powf(p) * b)?;
    Ok(g.integral().powf(1.0 / p))
}

/// `||b||_{*,d} = sup_I ( avg_I |b - b_I|^2 )^{1/2}`.
pub fn bmo_dyadic_norm(b: &StepFunction) -> Result<f64> {
    crate::haar::require_dim_one(b)?;
    let nodes = b.nodes();
    Ok((0..nodes.len())
        .into_par_iter()
        .filter(|&i| !nodes[i].is_leaf())
        .map(|i| {
            let node = &nodes[i];
            let m = node.mean();
            let var: f64 = nodes[i..node.end()]
                .iter()
                .filter(|n| n.is_leaf())
                .map(|n| (n.mean() - m).powi(2) * n.cube().measure())
                .sum::<f64>()
                / node.cube().measure();
            var.sqrt()
        })
        .reduce(|| 0.0, f64::max))
}

/// `x^gamma` on `[0,1)`, represented by its exact averages on the shells
/// `[2^{-k-1}, 2^{-k})`, `k < depth`, and on `[0, 2^{-depth})`.
pub fn power_weight(gamma: f64, depth: u32) -> Result<Weight> {
    check_range("gamma", gamma, gamma > -1.0 && gamma.is_finite(), "-1 < gamma < inf")?;
    check_range("depth", depth as f64, (1..crate::cube::MAX_LEVEL).contains(&depth), "1 <= depth < 63")?;
    let g1 = gamma + 1.0;
    // average over [b/2, b) is b^gamma (1 - 2^{-gamma-1}) * 2 / (gamma + 1)
    let shell = if gamma == 0.0 { 1.0 } else { -2.0 * (-g1 * std::f64::consts::LN_2).exp_m1() / g1 };
    let mut leaves = Vec::with_capacity(depth as usize + 1);
    for k in 0..depth {
        let b = crate::cube::pow2(-(k as i32));
        leaves.push((DyadicCube::interval(k + 1, 1)?, b.powf(gamma) * shell));
    }
    let tail = crate::cube::pow2(-(depth as i32)).powf(gamma) / g1;
    leaves.push((DyadicCube::interval(depth, 0)?, tail));
    Weight::new(StepFunction::from_leaves(1, &leaves)?)
}

/// `sup_Q ||u^{1/p}||_{A,Q} ||v^{-1/p}||_{B,Q}`.
pub fn bump_constant(u: &Weight, v: &Weight, p: f64, a: &YoungFunction, b: &YoungFunction) -> Result<f64> {
    bump_constant_with_exponent(u, v, p, 1.0, a, b)
}

/// `sup_Q ||u^{s/p}||_{A,Q}^{1/s} ||v^{-1/p}||_{B,Q}`.
pub fn bump_constant_with_exponent(
    u: &Weight,
    v: &Weight,
    p: f64,
    s: f64,
    a: &YoungFunction,
    b: &YoungFunction,
) -> Result<f64> {
    check_p(p)?;
    check_range("s", s, s > 0.0 && s.is_finite(), "0 < s < inf")?;
    let (uu, vv) = common_refinement(&u.0, &v.0)?;
    let uu = uu.map(|x| x.powf(s / p))?;
    let vv = vv.map(|x| x.powf(-1.0 / p))?;
    let nodes = uu.nodes();
    Ok((0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let q = *nodes[i].cube();
            let gather = |f: &StepFunction| -> Vec<(f64, f64)> {
                let node = f.node(i);
                if node.is_leaf() {
                    vec![(node.mean(), q.measure())]
                } else {
                    f.nodes()[i..node.end()]
                        .iter()
                        .filter(|n| n.is_leaf())
                        .map(|n| (n.mean(), n.cube().measure()))
                        .collect()
                }
            };
            let na = luxemburg_of(a, &gather(&uu), q.measure());
            let nb = luxemburg_of(b, &gather(&vv), q.measure());
            na.powf(1.0 / s) * nb
        })
        .reduce(|| 0.0, f64::max))
}
