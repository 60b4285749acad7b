//! Paraproducts and constant Haar multipliers.

use crate::accumulate::Accumulator;
use crate::cube::DyadicCube;
use crate::error::{Error, Result};
use crate::haar::require_dim_one;
use crate::operators::gshift::paraproduct_terms;
use crate::step::StepFunction;

/// `pi_b f = sum_I f_I <b, h_I> h_I`.
pub fn paraproduct(b: &StepFunction, f: &StepFunction) -> Result<StepFunction> {
    require_dim_one(b)?;
    require_dim_one(f)?;
    let mut acc = Accumulator::on(f);
    paraproduct_terms(b, f, &mut acc)?;
    acc.finish()
}

/// `T_alpha f = sum_I alpha_I <f, h_I> h_I`.
///
/// On the root cube `alpha = 1` gives `f - f_{[0,1)}`, not `f`: the constant
/// term is not in the span of the Haar functions of `[0,1)`.
pub fn haar_multiplier(alpha: impl Fn(&DyadicCube) -> f64, f: &StepFunction) -> Result<StepFunction> {
    require_dim_one(f)?;
    let mut acc = Accumulator::on(f);
    for (i, node) in f.nodes().iter().enumerate() {
        if node.is_leaf() {
            continue;
        }
        let q = *node.cube();
        let a = alpha(&q);
        if !a.is_finite() {
            return Err(Error::NonFinite(a));
        }
        let mut kids = f.children(i);
        let l = f.node(kids.next().expect("two children")).mean();
        let r = f.node(kids.next().expect("two children")).mean();
        let c = a * q.measure().sqrt() * (l - r) / 2.0;
        if c != 0.0 {
            acc.add_haar(q, q.level(), c);
        }
    }
    acc.finish()
}
