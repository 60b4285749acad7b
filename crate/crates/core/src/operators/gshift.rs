//! Generalized Haar shifts `T f = sum_Q <f, g_Q> gamma_Q`, their truncations
//! `T_eps` (cubes with `|Q| >= eps^n`) and the maximal shift `T_*`.

use crate::accumulate::Accumulator;
use crate::cube::DyadicCube;
use crate::error::{Error, Result};
use crate::haar::require_dim_one;
use crate::step::StepFunction;
use crate::weights::bmo_dyadic_norm;

/// The pair `(g_Q, gamma_Q)` attached to one cube, both given as functions
/// on the whole root cube.
#[derive(Clone, Debug, PartialEq)]
pub struct CubePair {
    pub cube: DyadicCube,
    pub g: StepFunction,
    pub gamma: StepFunction,
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Table(Vec<CubePair>),
    /// `g_Q = gamma_Q = h_Q` for every interval.
    Haar,
    /// `g_Q = h_Q`, `gamma_Q = h_{Q-} - h_{Q+}`.
    Hilbert,
    /// `g_Q = |Q|^{-1/2} chi_Q`, `gamma_Q = <b, h_Q> |Q|^{-1/2} h_Q`.
    Paraproduct(StepFunction),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedShiftSpec {
    tau: u32,
    bound: f64,
    kind: Kind,
}

impl GeneralizedShiftSpec {
    /// Finite family of pairs, each checked for support in `Q`, constancy
    /// on subcubes `tau` generations down, and `sup |.| <= C |Q|^{-1/2}`.
    pub fn table(tau: u32, bound: f64, pairs: Vec<CubePair>) -> Result<Self> {
        check_bound(bound)?;
        for (index, p) in pairs.iter().enumerate() {
            for (name, h) in [("g", &p.g), ("gamma", &p.gamma)] {
                if let Err(reason) = check_pair_function(&p.cube, h, tau, bound) {
                    return Err(Error::InvalidShiftEntry { index, reason: format!("{name}: {reason}") });
                }
            }
        }
        Ok(Self { tau, bound, kind: Kind::Table(pairs) })
    }

    /// The Haar multiplier with all symbols equal to one.
    pub fn haar() -> Self {
        Self { tau: 1, bound: 1.0, kind: Kind::Haar }
    }

    /// The dyadic Hilbert transform. Its `gamma_Q` is constant on quarters of
    /// `Q` and has sup norm `sqrt 2 |Q|^{-1/2}`.
    pub fn dyadic_hilbert() -> Self {
        Self { tau: 2, bound: std::f64::consts::SQRT_2, kind: Kind::Hilbert }
    }

    /// The paraproduct with symbol `b`; requires `||b||_{*,d} <= 1`.
    pub fn paraproduct(b: StepFunction) -> Result<Self> {
        require_dim_one(&b)?;
        let norm = bmo_dyadic_norm(&b)?;
        if norm > 1.0 {
            return Err(Error::Precondition(format!("paraproduct symbol has dyadic BMO norm {norm} > 1")));
        }
        Ok(Self { tau: 1, bound: 1.0, kind: Kind::Paraproduct(b) })
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    fn accumulate(&self, f: &StepFunction) -> Result<Accumulator> {
        let mut acc = Accumulator::on(f);
        match &self.kind {
            Kind::Haar | Kind::Hilbert => {
                require_dim_one(f)?;
                for (i, node) in f.nodes().iter().enumerate() {
                    if node.is_leaf() {
                        continue;
                    }
                    let q = *node.cube();
                    let mut kids = f.children(i);
                    let l = f.node(kids.next().expect("two children")).mean();
                    let r = f.node(kids.next().expect("two children")).mean();
                    let c = q.measure().sqrt() * (l - r) / 2.0;
                    if c == 0.0 {
                        continue;
                    }
                    if self.kind == Kind::Haar {
                        acc.add_haar(q, q.level(), c);
                    } else {
                        acc.add_haar(q.left(), q.level(), c);
                        acc.add_haar(q.right(), q.level(), -c);
                    }
                }
            }
            Kind::Paraproduct(b) => {
                require_dim_one(f)?;
                paraproduct_terms(b, f, &mut acc)?;
            }
            Kind::Table(pairs) => {
                for p in pairs {
                    if p.cube.dim() != f.dim() {
                        return Err(Error::DimensionMismatch { expected: f.dim(), found: p.cube.dim() });
                    }
                    let c = f.mul(&p.g)?.integral();
                    if c == 0.0 {
                        continue;
                    }
                    for (leaf, v) in p.gamma.leaves() {
                        if v != 0.0 {
                            acc.add(*leaf, p.cube.level(), c * v);
                        }
                    }
                }
            }
        }
        Ok(acc)
    }
}

pub(crate) fn paraproduct_terms(b: &StepFunction, f: &StepFunction, acc: &mut Accumulator) -> Result<()> {
    for (i, node) in b.nodes().iter().enumerate() {
        if node.is_leaf() {
            continue;
        }
        let q = *node.cube();
        let mut kids = b.children(i);
        let l = b.node(kids.next().expect("two children")).mean();
        let r = b.node(kids.next().expect("two children")).mean();
        let bq = q.measure().sqrt() * (l - r) / 2.0;
        let c = f.cube_average(&q)? * bq;
        if c != 0.0 {
            acc.add_haar(q, q.level(), c);
        }
    }
    Ok(())
}

fn check_bound(bound: f64) -> Result<()> {
    if bound.is_finite() && bound > 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange { name: "bound", value: bound, expected: "0 < C < inf" })
    }
}

fn check_pair_function(q: &DyadicCube, h: &StepFunction, tau: u32, bound: f64) -> std::result::Result<(), String> {
    if h.dim() != q.dim() {
        return Err(format!("dimension {} does not match the cube", h.dim()));
    }
    let limit = bound * q.measure().powf(-0.5) * (1.0 + 1e-12);
    let deep = q.level() + tau;
    for node in h.nodes() {
        let c = node.cube();
        if node.is_leaf() {
            if !q.contains(c) && node.mean() != 0.0 {
                return Err(format!("nonzero value on {c}, which is not inside {q}"));
            }
            if node.mean().abs() > limit {
                return Err(format!("value {} exceeds {limit}", node.mean()));
            }
        } else if q.contains(c) && c.level() >= deep {
            let spread = h.spread_on(c).map_err(|e| e.to_string())?;
            if spread != 0.0 {
                return Err(format!("not constant on {c}, which is {tau} or more generations below {q}"));
            }
        }
    }
    Ok(())
}

/// `T f`, summed over the cubes that can contribute (at or above the leaf
/// level of the relevant function).
pub fn generalized_haar_shift(spec: &GeneralizedShiftSpec, f: &StepFunction) -> Result<StepFunction> {
    spec.accumulate(f)?.finish()
}

/// `T_eps f`: only cubes with `|Q| >= eps^n`.
pub fn truncated_shift(spec: &GeneralizedShiftSpec, f: &StepFunction, eps: f64) -> Result<StepFunction> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::OutOfRange { name: "eps", value: eps, expected: "0 < eps < inf" });
    }
    let acc = spec.accumulate(f)?;
    // |Q| >= eps^n  <=>  2^{-level} >= eps
    if eps > 1.0 {
        return Accumulator::on(f).finish();
    }
    let mut max_level = 0u32;
    while max_level < crate::cube::MAX_LEVEL && crate::cube::pow2(-(max_level as i32 + 1)) >= eps {
        max_level += 1;
    }
    acc.finish_truncated(Some(max_level))
}

/// `T_* f = sup_eps |T_eps f|`, a maximum over finitely many scales.
pub fn maximal_haar_shift(spec: &GeneralizedShiftSpec, f: &StepFunction) -> Result<StepFunction> {
    spec.accumulate(f)?.finish_maximal()
}
