//! Dyadic maximal operators: plain, weighted, vector valued, Orlicz, and
//! the Rubio de Francia iteration built on them.

use rayon::prelude::*;

use crate::cube::DyadicCube;
use crate::error::{check_range, Error, Result};
use crate::step::{common_refinement, StepFunction};
use crate::weights::{conjugate, luxemburg_of, Weight, YoungFunction};

/// `M^d f(x) = sup_{Q ∋ x} avg_Q |f|`.
pub fn dyadic_maximal(f: &StepFunction) -> Result<StepFunction> {
    let g = f.abs();
    let table = g.path_table(0.0, |up, i| up.max(g.node(i).mean()));
    g.with_node_values(&table)
}

/// `M^d_sigma f(x) = sup_{Q ∋ x} sigma(Q)^{-1} int_Q |f| sigma`, on the common
/// refinement of `f` and `sigma`.
pub fn weighted_dyadic_maximal(sigma: &Weight, f: &StepFunction) -> Result<StepFunction> {
    let (ff, ss) = common_refinement(f, sigma.function())?;
    let g = ff.zip_with(&ss, |a, s| a.abs() * s)?;
    let table = g.path_table(0.0, |up, i| up.max(g.node(i).mean() / ss.node(i).mean()));
    g.with_node_values(&table)
}

/// A finite family of step functions on a common root cube.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorStepFunction {
    components: Vec<StepFunction>,
}

impl VectorStepFunction {
    pub fn new(components: Vec<StepFunction>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::Precondition("a vector function needs at least one component".into()));
        };
        let dim = first.dim();
        if let Some(c) = components.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: c.dim() });
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[StepFunction] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    /// Every component multiplied by `chi_q`.
    pub fn restrict(&self, q: &DyadicCube) -> Result<Self> {
        let chi = StepFunction::indicator(q)?;
        let components = self.components.iter().map(|f| f.mul(&chi)).collect::<Result<_>>()?;
        Ok(Self { components })
    }
}

fn check_q(q: f64) -> Result<()> {
    check_range("q", q, q > 1.0 && q.is_finite(), "1 < q < inf")
}

/// `(sum_i (M^d f_i)^q)^{1/q}`.
pub fn vector_maximal(q: f64, f: &VectorStepFunction) -> Result<StepFunction> {
    check_q(q)?;
    let maxes: Vec<StepFunction> = f.components.par_iter().map(dyadic_maximal).collect::<Result<_>>()?;
    let mut acc = maxes[0].map(|v| v.powf(q))?;
    for m in &maxes[1..] {
        acc = acc.zip_with(m, |a, b| a + b.powf(q))?;
    }
    acc.map(|v| v.powf(1.0 / q))
}

/// The part of the vector maximal function coming from cubes that contain
/// `q0`: `K_0 = (sum_i (sup_{Q ⊇ q0} avg_Q |f_i|)^q)^{1/q}`. It is a single
/// number, so `M_q f >= K_0` on all of `q0`.
pub fn vector_maximal_outer(q: f64, f: &VectorStepFunction, q0: &DyadicCube) -> Result<f64> {
    check_q(q)?;
    let mut sum = 0.0;
    for c in &f.components {
        if c.dim() != q0.dim() {
            return Err(Error::DimensionMismatch { expected: c.dim(), found: q0.dim() });
        }
        let g = c.abs();
        let mut best = g.cube_average(q0)?;
        for a in q0.ancestors() {
            best = best.max(g.cube_average(&a)?);
        }
        sum += best.powf(q);
    }
    Ok(sum.powf(1.0 / q))
}

/// `M_A f(x) = sup_{Q ∋ x} ||f||_{A,Q}` over dyadic cubes.
pub fn orlicz_maximal(a: &YoungFunction, f: &StepFunction) -> Result<StepFunction> {
    let nodes = f.nodes();
    let norms: Vec<f64> = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let node = &nodes[i];
            let vals: Vec<(f64, f64)> = if node.is_leaf() {
                vec![(node.mean(), node.cube().measure())]
            } else {
                nodes[i..node.end()].iter().filter(|n| n.is_leaf()).map(|n| (n.mean(), n.cube().measure())).collect()
            };
            luxemburg_of(a, &vals, node.cube().measure())
        })
        .collect();
    let table = f.path_table(0.0, |up, i| up.max(norms[i]));
    f.with_node_values(&table)
}

/// `R h = sum_{k < K} (M^d)^k h / (2 s')^k`, where `s'` bounds the norm of
/// `M^d` on `L^s`. The result satisfies `R h >= h` and `M^d(R h) <= 2 s' R h`.
pub fn rubio_de_francia(h: &StepFunction, s: f64, terms: u32) -> Result<StepFunction> {
    check_range("s", s, s > 1.0 && s.is_finite(), "1 < s < inf")?;
    check_range("K", terms as f64, terms >= 1, "K >= 1")?;
    if let Some(v) = h.leaf_values().into_iter().find(|&v| v < 0.0) {
        return Err(Error::Negative(v));
    }
    let ratio = 1.0 / (2.0 * conjugate(s));
    let mut iterate = h.clone();
    let mut sum = h.clone();
    let mut factor = 1.0;
    for _ in 1..terms {
        iterate = dyadic_maximal(&iterate)?;
        factor *= ratio;
        sum = sum.zip_with(&iterate, |a, b| a + factor * b)?;
    }
    Ok(sum)
}
