//! The one-dimensional Haar system on `[0,1)`.

use crate::accumulate::Accumulator;
use crate::cube::DyadicCube;
use crate::error::{Error, Result};
use crate::step::StepFunction;

pub(crate) fn require_dim_one(f: &StepFunction) -> Result<()> {
    if f.dim() == 1 {
        Ok(())
    } else {
        Err(Error::RequiresDimOne(f.dim()))
    }
}

/// `<f, h_I> = |I|^{1/2} (f_{I-} - f_{I+}) / 2`.
pub fn haar_coefficient(f: &StepFunction, interval: &DyadicCube) -> Result<f64> {
    require_dim_one(f)?;
    if interval.dim() != 1 {
        return Err(Error::RequiresDimOne(interval.dim()));
    }
    let i = f.locate(interval)?;
    if f.node(i).is_leaf() {
        return Ok(0.0);
    }
    let mut kids = f.children(i);
    let left = f.node(kids.next().expect("two children")).mean();
    let right = f.node(kids.next().expect("two children")).mean();
    Ok(interval.measure().sqrt() * (left - right) / 2.0)
}

/// All nonzero-candidate Haar coefficients of `f`: one per internal node,
/// in pre-order.
pub fn haar_coefficients(f: &StepFunction) -> Result<Vec<(DyadicCube, f64)>> {
    require_dim_one(f)?;
    Ok(f.nodes()
        .iter()
        .enumerate()
        .filter(|(_, n)| !n.is_leaf())
        .map(|(i, n)| {
            let mut kids = f.children(i);
            let l = f.node(kids.next().unwrap()).mean();
            let r = f.node(kids.next().unwrap()).mean();
            (*n.cube(), n.cube().measure().sqrt() * (l - r) / 2.0)
        })
        .collect())
}

/// `f_{Q0} + sum_{I in D(Q0)} <f,h_I> h_I`, which equals `f` on `Q0`.
/// The sum only involves intervals inside `Q0`, so the result is zero
/// outside `Q0`.
pub fn haar_reconstruct(f: &StepFunction, q0: &DyadicCube) -> Result<StepFunction> {
    require_dim_one(f)?;
    let start = f.locate(q0)?;
    let mut acc = Accumulator::on(f);
    acc.add(*q0, 0, f.cube_average(q0)?);
    if !f.node(start).is_leaf() {
        for (cube, c) in haar_coefficients(f)? {
            if q0.contains(&cube) {
                acc.add_haar(cube, cube.level(), c);
            }
        }
    }
    acc.finish()
}
