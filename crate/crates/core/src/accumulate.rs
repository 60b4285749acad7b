//! Sums of cube-supported constants, materialized as a step function.
//!
//! Operators are expressed as sums of terms `c * chi_Q`. Each term is
//! recorded against its cube together with the level of the cube that
//! generated it, so truncated sums over generator scales can be read off
//! the same accumulator.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::cube::DyadicCube;
use crate::error::Result;
use crate::step::{Decision, StepFunction};

pub(crate) struct Accumulator {
    dim: usize,
    terms: HashMap<DyadicCube, Vec<(u32, f64)>>,
    split: HashSet<DyadicCube>,
}

impl Accumulator {
    /// Output partition is at least as fine as `base`.
    pub(crate) fn on(base: &StepFunction) -> Self {
        let split = base.nodes().iter().filter(|n| !n.is_leaf()).map(|n| *n.cube()).collect();
        Self { dim: base.dim(), terms: HashMap::new(), split }
    }

    /// Add `c * chi_q`, attributed to generator level `scale`.
    pub(crate) fn add(&mut self, q: DyadicCube, scale: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        for a in q.ancestors() {
            if !self.split.insert(a) {
                break;
            }
        }
        self.terms.entry(q).or_default().push((scale, c));
    }

    /// Add `c * h_I` for a one-dimensional interval.
    pub(crate) fn add_haar(&mut self, interval: DyadicCube, scale: u32, c: f64) {
        let h = c * interval.measure().powf(-0.5);
        self.add(interval.left(), scale, h);
        self.add(interval.right(), scale, -h);
    }

    /// The full sum.
    pub(crate) fn finish(&self) -> Result<StepFunction> {
        self.finish_truncated(None)
    }

    /// Sum restricted to generator levels `<= max_scale` (`None` keeps all).
    pub(crate) fn finish_truncated(&self, max_scale: Option<u32>) -> Result<StepFunction> {
        self.materialize(|by_scale| {
            by_scale.iter().take_while(|(&s, _)| max_scale.is_none_or(|m| s <= m)).map(|(_, c)| c).sum()
        })
    }

    /// Pointwise maximum over all truncation levels of the absolute partial
    /// sum, including the empty sum.
    pub(crate) fn finish_maximal(&self) -> Result<StepFunction> {
        self.materialize(|by_scale| {
            let mut partial = 0.0f64;
            let mut best = 0.0f64;
            for c in by_scale.values() {
                partial += c;
                best = best.max(partial.abs());
            }
            best
        })
    }

    // Partial sums are always formed in increasing generator level so that
    // truncated, full and maximal outputs agree bit for bit where they should.
    fn materialize(&self, leaf: impl Fn(&BTreeMap<u32, f64>) -> f64) -> Result<StepFunction> {
        let arity = 1usize << self.dim;
        StepFunction::build_with(self.dim, BTreeMap::<u32, f64>::new(), |cube, mut by_scale| {
            if let Some(t) = self.terms.get(cube) {
                for &(s, c) in t {
                    *by_scale.entry(s).or_insert(0.0) += c;
                }
            }
            Ok(if self.split.contains(cube) {
                Decision::Split(vec![by_scale; arity])
            } else {
                Decision::Leaf(leaf(&by_scale))
            })
        })
    }
}
