//! Haar shift operators given by a finite coefficient table.

use serde::{Deserialize, Serialize};

use crate::accumulate::Accumulator;
use crate::cube::DyadicCube;
use crate::error::{Error, Result};
use crate::haar::{haar_coefficient, require_dim_one};
use crate::step::StepFunction;

/// One coefficient `a_{Q',Q''}` attached to the cube `Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftEntry {
    #[serde(rename = "Q")]
    pub q: DyadicCube,
    #[serde(rename = "Qp")]
    pub q1: DyadicCube,
    #[serde(rename = "Qpp")]
    pub q2: DyadicCube,
    pub a: f64,
}

/// A Haar shift of index `tau`:
/// `H f = sum_Q sum_{Q',Q''} a_{Q',Q''} <f, h_{Q'}> h_{Q''}` with `Q', Q''`
/// inside `Q` and at most `tau` generations below it, and
/// `|a_{Q',Q''}| <= C (|Q'| |Q''|)^{1/2} / |Q|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HaarShiftSpec {
    tau: u32,
    bound: f64,
    entries: Vec<ShiftEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecRepr {
    tau: u32,
    #[serde(default = "default_bound")]
    bound: f64,
    entries: Vec<ShiftEntry>,
}

fn default_bound() -> f64 {
    1.0
}

impl<'de> Deserialize<'de> for HaarShiftSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SpecRepr::deserialize(d)?;
        HaarShiftSpec::with_bound(r.tau, r.bound, r.entries).map_err(serde::de::Error::custom)
    }
}

impl HaarShiftSpec {
    /// Validated table with the size constant `C = 1`.
    pub fn new(tau: u32, entries: Vec<ShiftEntry>) -> Result<Self> {
        Self::with_bound(tau, 1.0, entries)
    }

    pub fn with_bound(tau: u32, bound: f64, entries: Vec<ShiftEntry>) -> Result<Self> {
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::OutOfRange { name: "bound", value: bound, expected: "0 < C < inf" });
        }
        for (index, e) in entries.iter().enumerate() {
            let bad = |reason: String| Err(Error::InvalidShiftEntry { index, reason });
            if e.q.dim() != 1 || e.q1.dim() != 1 || e.q2.dim() != 1 {
                return bad("Haar shifts use the one-dimensional Haar system".into());
            }
            if !e.a.is_finite() {
                return bad(format!("coefficient {} is not finite", e.a));
            }
            for (name, sub) in [("Qp", &e.q1), ("Qpp", &e.q2)] {
                if !e.q.contains(sub) {
                    return bad(format!("{name} = {sub} is not inside Q = {}", e.q));
                }
                if sub.level() - e.q.level() > tau {
                    return bad(format!("{name} = {sub} is more than {tau} generations below Q = {}", e.q));
                }
            }
            let limit = bound * (e.q1.measure() * e.q2.measure()).sqrt() / e.q.measure();
            if e.a.abs() > limit * (1.0 + 1e-12) {
                return bad(format!("|a| = {} exceeds {limit}", e.a.abs()));
            }
        }
        Ok(Self { tau, bound, entries })
    }

    /// The table of the dyadic Hilbert transform down to intervals of
    /// level `< depth`: `a_{I,I-} = 1`, `a_{I,I+} = -1`. The size constant
    /// is `sqrt 2`, since `|I-| = |I|/2`.
    pub fn dyadic_hilbert(depth: u32) -> Result<Self> {
        let mut entries = Vec::new();
        for level in 0..depth {
            for k in 0..(1u64 << level) {
                let i = DyadicCube::interval(level, k)?;
                entries.push(ShiftEntry { q: i, q1: i, q2: i.left(), a: 1.0 });
                entries.push(ShiftEntry { q: i, q1: i, q2: i.right(), a: -1.0 });
            }
        }
        Self::with_bound(1, std::f64::consts::SQRT_2, entries)
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn entries(&self) -> &[ShiftEntry] {
        &self.entries
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Evaluate a tabulated Haar shift exactly.
pub fn haar_shift(spec: &HaarShiftSpec, f: &StepFunction) -> Result<StepFunction> {
    require_dim_one(f)?;
    let mut acc = Accumulator::on(f);
    for e in &spec.entries {
        let c = haar_coefficient(f, &e.q1)?;
        if c != 0.0 {
            acc.add_haar(e.q2, e.q.level(), e.a * c);
        }
    }
    acc.finish()
}

/// `H^d f = sum_I <f, h_I> (h_{I-} - h_{I+})`.
pub fn dyadic_hilbert(f: &StepFunction) -> Result<StepFunction> {
    require_dim_one(f)?;
    hilbert_accumulator(f).finish()
}

pub(crate) fn hilbert_accumulator(f: &StepFunction) -> Accumulator {
    let mut acc = Accumulator::on(f);
    for (i, node) in f.nodes().iter().enumerate() {
        if node.is_leaf() {
            continue;
        }
        let mut kids = f.children(i);
        let l = f.node(kids.next().expect("two children")).mean();
        let r = f.node(kids.next().expect("two children")).mean();
        let c = node.cube().measure().sqrt() * (l - r) / 2.0;
        if c != 0.0 {
            acc.add_haar(node.cube().left(), node.cube().level(), c);
            acc.add_haar(node.cube().right(), node.cube().level(), -c);
        }
    }
    acc
}
