//! Step functions on adaptive dyadic partitions of `[0,1)^n`.
//!
//! The partition tree is stored as an arena in pre-order. Node `i` owns the
//! contiguous range `i..end` of the arena, so subtrees are slices and the
//! first child of an internal node is always `i + 1`.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::cube::{DyadicCube, MAX_LEVEL};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    cube: DyadicCube,
    end: usize,
    leaf: bool,
    mean: f64,
}

impl Node {
    #[inline]
    pub fn cube(&self) -> &DyadicCube {
        &self.cube
    }

    #[inline]
    pub fn is_leaf(&self) -> bool {
        self.leaf
    }

    /// Exact average of the function over the node's cube. For a leaf this
    /// is the leaf value.
    #[inline]
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// One past the last arena index of this node's subtree.
    #[inline]
    pub fn end(&self) -> usize {
        self.end
    }
}

/// What a builder does with a cube: stop with a value, or split it and hand
/// one state to each child (in child-index order).
pub(crate) enum Decision<S> {
    Leaf(f64),
    Split(Vec<S>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    dim: usize,
    nodes: Vec<Node>,
}

impl StepFunction {
    pub(crate) fn build_with<S>(
        dim: usize,
        init: S,
        mut decide: impl FnMut(&DyadicCube, S) -> Result<Decision<S>>,
    ) -> Result<Self> {
        let root = DyadicCube::root(dim)?;
        let mut nodes = Vec::new();
        build_rec(root, init, &mut decide, &mut nodes)?;
        Ok(Self { dim, nodes })
    }

    /// Build by top-down refinement: `leaf_value` returns `Some(v)` to make
    /// the cube a leaf with value `v`, or `None` to split it.
    pub fn build_adaptive(dim: usize, mut leaf_value: impl FnMut(&DyadicCube) -> Result<Option<f64>>) -> Result<Self> {
        let arity = 1usize << dim;
        Self::build_with(dim, (), |cube, ()| {
            Ok(match leaf_value(cube)? {
                Some(v) => Decision::Leaf(v),
                None => Decision::Split(vec![(); arity]),
            })
        })
    }

    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        Self::build_adaptive(dim, |_| Ok(Some(c)))
    }

    /// Complete tree of depth `level`; `vals` is indexed by the leaves in
    /// lexicographic coordinate order (first coordinate slowest).
    pub fn build_uniform(dim: usize, level: u32, vals: &[f64]) -> Result<Self> {
        if dim == 0 || dim > crate::cube::MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        let total_bits = level as usize * dim;
        if level > MAX_LEVEL || total_bits >= usize::BITS as usize {
            return Err(Error::InvalidPartition(format!("uniform level {level} too deep")));
        }
        let expected = 1usize << total_bits;
        if vals.len() != expected {
            return Err(Error::LengthMismatch { expected, found: vals.len() });
        }
        if let Some(&v) = vals.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(v));
        }
        Self::build_adaptive(dim, |cube| {
            if cube.level() < level {
                return Ok(None);
            }
            let idx = cube.coords().iter().fold(0usize, |acc, &k| (acc << level) | k as usize);
            Ok(Some(vals[idx]))
        })
    }

    /// Build from an explicit list of leaves, which must tile the root cube.
    pub fn from_leaves(dim: usize, leaves: &[(DyadicCube, f64)]) -> Result<Self> {
        let mut values: HashMap<DyadicCube, f64> = HashMap::with_capacity(leaves.len());
        let mut internal: HashSet<DyadicCube> = HashSet::new();
        for (cube, v) in leaves {
            if cube.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: cube.dim() });
            }
            if values.insert(*cube, *v).is_some() {
                return Err(Error::InvalidPartition(format!("duplicate leaf {cube}")));
            }
            for a in cube.ancestors() {
                if !internal.insert(a) {
                    break;
                }
            }
        }
        if let Some(c) = values.keys().find(|c| internal.contains(c)) {
            return Err(Error::InvalidPartition(format!("leaf {c} overlaps a finer leaf")));
        }
        Self::build_adaptive(dim, |cube| {
            if let Some(&v) = values.get(cube) {
                Ok(Some(v))
            } else if internal.contains(cube) {
                Ok(None)
            } else {
                Err(Error::InvalidPartition(format!("cube {cube} is not covered by any leaf")))
            }
        })
    }

    /// The Haar function `h_I = |I|^{-1/2}(chi_{I-} - chi_{I+})` of a
    /// one-dimensional interval.
    pub fn haar(interval: &DyadicCube) -> Result<Self> {
        if interval.dim() != 1 {
            return Err(Error::RequiresDimOne(interval.dim()));
        }
        let h = interval.measure().powf(-0.5);
        let (left, right) = (interval.left(), interval.right());
        Self::build_adaptive(1, |cube| {
            Ok(if cube == &left {
                Some(h)
            } else if cube == &right {
                Some(-h)
            } else if cube.strictly_contains(&left) {
                None
            } else {
                Some(0.0)
            })
        })
    }

    /// Indicator function of a dyadic cube.
    pub fn indicator(q: &DyadicCube) -> Result<Self> {
        Self::build_adaptive(q.dim(), |cube| {
            Ok(if q.contains(cube) {
                Some(1.0)
            } else if cube.strictly_contains(q) {
                None
            } else {
                Some(0.0)
            })
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn root(&self) -> &DyadicCube {
        &self.nodes[0].cube
    }

    /// Arena indices of the children of node `i` (empty for leaves).
    pub fn children(&self, i: usize) -> Children<'_> {
        let node = &self.nodes[i];
        Children { nodes: &self.nodes, next: if node.leaf { node.end } else { i + 1 }, end: node.end }
    }

    pub fn leaves(&self) -> impl Iterator<Item = (&DyadicCube, f64)> + '_ {
        self.nodes.iter().filter(|n| n.leaf).map(|n| (&n.cube, n.mean))
    }

    pub fn leaf_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().enumerate().filter(|(_, n)| n.leaf).map(|(i, _)| i)
    }

    pub fn leaf_values(&self) -> Vec<f64> {
        self.leaves().map(|(_, v)| v).collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.leaf).count()
    }

    /// Deepest leaf level.
    pub fn depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.cube.level()).max().unwrap_or(0)
    }

    /// Arena index of the node equal to `q`, or of the leaf strictly
    /// containing it when `q` lies below the partition.
    pub fn locate(&self, q: &DyadicCube) -> Result<usize> {
        if q.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: q.dim() });
        }
        let mut i = 0;
        loop {
            let node = &self.nodes[i];
            if node.cube == *q || node.leaf {
                return Ok(i);
            }
            let k = node.cube.child_toward(q);
            i = self.children(i).nth(k).expect("internal node has 2^n children");
        }
    }

    /// Exact mean of `f` over `q`.
    pub fn cube_average(&self, q: &DyadicCube) -> Result<f64> {
        Ok(self.nodes[self.locate(q)?].mean)
    }

    pub fn integral_over(&self, q: &DyadicCube) -> Result<f64> {
        Ok(self.cube_average(q)? * q.measure())
    }

    pub fn integral(&self) -> f64 {
        self.nodes[0].mean
    }

    /// Leaf values inside `q` with the measure each occupies in `q`.
    pub fn values_in(&self, q: &DyadicCube) -> Result<Vec<(f64, f64)>> {
        let i = self.locate(q)?;
        let node = &self.nodes[i];
        if node.leaf {
            return Ok(vec![(node.mean, q.measure())]);
        }
        Ok(self.nodes[i..node.end].iter().filter(|n| n.leaf).map(|n| (n.mean, n.cube.measure())).collect())
    }

    pub fn value_at(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        if !self.nodes[0].cube.contains_point(x) {
            return Err(Error::OutsideRoot(format!("{x:?}")));
        }
        let mut i = 0;
        while !self.nodes[i].leaf {
            i = self.children(i).find(|&c| self.nodes[c].cube.contains_point(x)).expect("children tile the parent");
        }
        Ok(self.nodes[i].mean)
    }

    /// Apply `op` to every leaf value, keeping the partition.
    pub fn map(&self, mut op: impl FnMut(f64) -> f64) -> Result<Self> {
        self.map_indexed(|_, v| op(v))
    }

    /// Like [`StepFunction::map`], also passing the arena index of the leaf.
    pub fn map_indexed(&self, mut op: impl FnMut(usize, f64) -> f64) -> Result<Self> {
        // build_with visits cubes in pre-order, the same order as the arena
        let mut idx = 0usize;
        let src = &self.nodes;
        let arity = 1usize << self.dim;
        Self::build_with(self.dim, (), |_, ()| {
            let i = idx;
            idx += 1;
            Ok(if src[i].leaf { Decision::Leaf(op(i, src[i].mean)) } else { Decision::Split(vec![(); arity]) })
        })
    }

    /// Same partition, leaf values taken from a per-node table.
    pub(crate) fn with_node_values(&self, table: &[f64]) -> Result<Self> {
        self.map_indexed(|i, _| table[i])
    }

    /// Running value along each root-to-node path: `table[i] =
    /// step(table[parent], i)`, with `step(init, 0)` at the root.
    pub(crate) fn path_table(&self, init: f64, mut step: impl FnMut(f64, usize) -> f64) -> Vec<f64> {
        let mut table = vec![0.0; self.nodes.len()];
        let mut inherited = vec![init; self.nodes.len()];
        for i in 0..self.nodes.len() {
            let v = step(inherited[i], i);
            table[i] = v;
            for c in self.children(i) {
                inherited[c] = v;
            }
        }
        table
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs).expect("abs of finite values is finite")
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    /// Pointwise combination on the common refinement of both partitions.
    pub fn zip_with(&self, other: &Self, mut op: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Self::build_with(self.dim, (0usize, 0usize), |_, (i, j)| {
            let (a, b) = (&self.nodes[i], &other.nodes[j]);
            if a.leaf && b.leaf {
                return Ok(Decision::Leaf(op(a.mean, b.mean)));
            }
            let ci: Vec<usize> = if a.leaf { vec![i; 1 << self.dim] } else { self.children(i).collect() };
            let cj: Vec<usize> = if b.leaf { vec![j; 1 << self.dim] } else { other.children(j).collect() };
            Ok(Decision::Split(ci.into_iter().zip(cj).collect()))
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Refine this function onto the partition of `other` where that one
    /// is finer; values are unchanged pointwise.
    pub fn refine_like(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, _| a)
    }

    /// Split every leaf `extra` more levels.
    pub fn refine(&self, extra: u32) -> Result<Self> {
        let arity = 1usize << self.dim;
        Self::build_with(self.dim, (0usize, 0u32), |cube, (i, below)| {
            let node = &self.nodes[i];
            if node.leaf {
                if below >= extra || cube.level() >= MAX_LEVEL {
                    Ok(Decision::Leaf(node.mean))
                } else {
                    Ok(Decision::Split(vec![(i, below + 1); arity]))
                }
            } else {
                Ok(Decision::Split(self.children(i).map(|c| (c, 0)).collect()))
            }
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.leaves().map(|(_, v)| v.abs()).fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.leaves().map(|(_, v)| v).fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.leaves().map(|(_, v)| v).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Unweighted `(int |f|^p)^{1/p}` over the root cube, `p >= 1`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let s: f64 = self.leaves().map(|(c, v)| v.abs().powf(p) * c.measure()).sum();
        s.powf(1.0 / p)
    }

    /// Largest difference between two leaf values inside `q`.
    pub fn spread_on(&self, q: &DyadicCube) -> Result<f64> {
        let vals = self.values_in(q)?;
        let lo = vals.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
        let hi = vals.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
        Ok(hi - lo)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Common refinement of two step functions: both outputs share one
/// partition and agree pointwise with their inputs.
pub fn common_refinement(f: &StepFunction, g: &StepFunction) -> Result<(StepFunction, StepFunction)> {
    Ok((f.refine_like(g)?, g.refine_like(f)?))
}

pub struct Children<'a> {
    nodes: &'a [Node],
    next: usize,
    end: usize,
}

impl Iterator for Children<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.next >= self.end {
            return None;
        }
        let i = self.next;
        self.next = self.nodes[i].end;
        Some(i)
    }
}

fn build_rec<S>(
    cube: DyadicCube,
    state: S,
    decide: &mut impl FnMut(&DyadicCube, S) -> Result<Decision<S>>,
    nodes: &mut Vec<Node>,
) -> Result<f64> {
    let idx = nodes.len();
    nodes.push(Node { cube, end: idx + 1, leaf: true, mean: 0.0 });
    match decide(&cube, state)? {
        Decision::Leaf(v) => {
            if !v.is_finite() {
                return Err(Error::NonFinite(v));
            }
            nodes[idx].mean = v;
            Ok(v)
        }
        Decision::Split(states) => {
            if cube.level() >= MAX_LEVEL {
                return Err(Error::InvalidPartition(format!("cannot split {cube} below level {MAX_LEVEL}")));
            }
            if states.len() != cube.arity() {
                return Err(Error::InvalidPartition(format!("split of {cube} produced {} children", states.len())));
            }
            let mut sum = 0.0;
            for (k, s) in states.into_iter().enumerate() {
                sum += build_rec(cube.child(k), s, decide, nodes)?;
            }
            let mean = sum / cube.arity() as f64;
            let end = nodes.len();
            let node = &mut nodes[idx];
            node.leaf = false;
            node.mean = mean;
            node.end = end;
            Ok(mean)
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeafRepr {
    level: u32,
    coords: Vec<u64>,
    value: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRepr {
    dim: usize,
    leaves: Vec<LeafRepr>,
}

impl Serialize for StepFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let leaves =
            self.leaves().map(|(c, v)| LeafRepr { level: c.level(), coords: c.coords().to_vec(), value: v }).collect();
        StepRepr { dim: self.dim, leaves }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = StepRepr::deserialize(d)?;
        let leaves = r
            .leaves
            .iter()
            .map(|l| DyadicCube::new(r.dim, l.level, &l.coords).map(|c| (c, l.value)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        StepFunction::from_leaves(r.dim, &leaves).map_err(D::Error::custom)
    }
}
