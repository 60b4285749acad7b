//! Dyadic cubes of the unit cube `[0,1)^n`.
//!
//! A cube at level `l` with integer coordinates `k` is the product of the
//! half-open intervals `[k_i 2^-l, (k_i + 1) 2^-l)`. Children are ordered
//! lexicographically in their coordinates, which with the first coordinate
//! most significant is the same as ordering them by the child index
//! `sum_i b_i 2^(n-1-i)` where `b_i` is the low bit of the child coordinate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 4;
/// Deepest supported level; coordinates must fit in a `u64`.
pub const MAX_LEVEL: u32 = 63;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCube {
    dim: u8,
    level: u8,
    coords: [u64; MAX_DIM],
}

impl DyadicCube {
    pub fn new(dim: usize, level: u32, coords: &[u64]) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if coords.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: coords.len() });
        }
        if level > MAX_LEVEL {
            return Err(Error::InvalidCube(format!("level {level} exceeds {MAX_LEVEL}")));
        }
        let bound = 1u64 << level;
        if let Some(&k) = coords.iter().find(|&&k| k >= bound) {
            return Err(Error::OutsideRoot(format!("level {level}, coordinate {k} >= 2^{level}")));
        }
        let mut c = [0u64; MAX_DIM];
        c[..dim].copy_from_slice(coords);
        Ok(Self { dim: dim as u8, level: level as u8, coords: c })
    }

    /// The root cube `[0,1)^n`.
    pub fn root(dim: usize) -> Result<Self> {
        Self::new(dim, 0, &vec![0; dim])
    }

    /// One-dimensional dyadic interval `[k 2^-level, (k+1) 2^-level)`.
    pub fn interval(level: u32, k: u64) -> Result<Self> {
        Self::new(1, level, &[k])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn level(&self) -> u32 {
        self.level as u32
    }

    #[inline]
    pub fn coords(&self) -> &[u64] {
        &self.coords[..self.dim as usize]
    }

    /// Lebesgue measure `2^(-level * dim)`.
    #[inline]
    pub fn measure(&self) -> f64 {
        pow2(-((self.level as i32) * (self.dim as i32)))
    }

    #[inline]
    pub fn side(&self) -> f64 {
        pow2(-(self.level as i32))
    }

    /// Number of children, `2^n`.
    #[inline]
    pub fn arity(&self) -> usize {
        1 << self.dim
    }

    pub fn is_root(&self) -> bool {
        self.level == 0
    }

    pub fn parent(&self) -> Option<Self> {
        self.ancestor(1)
    }

    /// The ancestor `tau` generations up, whose measure is `2^(tau n)` times ours.
    pub fn ancestor(&self, tau: u32) -> Option<Self> {
        if tau > self.level() {
            return None;
        }
        let mut c = self.coords;
        for k in c.iter_mut().take(self.dim()) {
            *k >>= tau;
        }
        Some(Self { dim: self.dim, level: self.level - tau as u8, coords: c })
    }

    pub fn ancestor_at_level(&self, level: u32) -> Option<Self> {
        if level > self.level() {
            None
        } else {
            self.ancestor(self.level() - level)
        }
    }

    /// Child with the given index in lexicographic order.
    pub fn child(&self, index: usize) -> Self {
        debug_assert!(index < self.arity());
        debug_assert!(self.level() < MAX_LEVEL);
        let n = self.dim();
        let mut c = self.coords;
        for (i, k) in c.iter_mut().enumerate().take(n) {
            let bit = (index >> (n - 1 - i)) & 1;
            *k = (*k << 1) | bit as u64;
        }
        Self { dim: self.dim, level: self.level + 1, coords: c }
    }

    pub fn children(&self) -> impl Iterator<Item = Self> + '_ {
        (0..self.arity()).map(move |i| self.child(i))
    }

    /// Index of this cube among its parent's children.
    pub fn child_index(&self) -> usize {
        let n = self.dim();
        self.coords().iter().enumerate().fold(0, |acc, (i, &k)| acc | (((k & 1) as usize) << (n - 1 - i)))
    }

    /// Whether `other` is a (not necessarily proper) subcube of `self`.
    pub fn contains(&self, other: &Self) -> bool {
        self.dim == other.dim
            && other.level >= self.level
            && other.ancestor_at_level(self.level()).is_some_and(|a| a == *self)
    }

    pub fn strictly_contains(&self, other: &Self) -> bool {
        other.level > self.level && self.contains(other)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        !self.contains(other) && !other.contains(self)
    }

    /// Child of `self` containing the proper subcube `other`.
    pub fn child_toward(&self, other: &Self) -> usize {
        debug_assert!(self.strictly_contains(other));
        other.ancestor_at_level(self.level() + 1).expect("proper subcube").child_index()
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        let s = self.side();
        x.len() == self.dim()
            && self.coords().iter().zip(x).all(|(&k, &xi)| {
                let lo = k as f64 * s;
                xi >= lo && xi < lo + s
            })
    }

    pub fn lower_corner(&self) -> Vec<f64> {
        let s = self.side();
        self.coords().iter().map(|&k| k as f64 * s).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        let s = self.side();
        self.coords().iter().map(|&k| (k as f64 + 0.5) * s).collect()
    }

    /// Map a cube given in the local coordinates of `self` (its own root is
    /// `self`) to the global grid.
    pub fn embed(&self, local: &Self) -> Result<Self> {
        if local.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: local.dim() });
        }
        let level = self.level() + local.level();
        if level > MAX_LEVEL {
            return Err(Error::InvalidCube(format!("embedded level {level} exceeds {MAX_LEVEL}")));
        }
        let coords: Vec<u64> =
            self.coords().iter().zip(local.coords()).map(|(&k, &j)| (k << local.level()) | j).collect();
        Self::new(self.dim(), level, &coords)
    }

    /// Left half of a one-dimensional interval.
    pub fn left(&self) -> Self {
        debug_assert_eq!(self.dim, 1);
        self.child(0)
    }

    /// Right half of a one-dimensional interval.
    pub fn right(&self) -> Self {
        debug_assert_eq!(self.dim, 1);
        self.child(1)
    }

    /// Ancestors from the parent up to the root.
    pub fn ancestors(&self) -> impl Iterator<Item = Self> + '_ {
        (1..=self.level()).map(move |t| self.ancestor(t).expect("within level"))
    }
}

/// Exact `2^e` for the exponent range of normal doubles.
#[inline]
pub(crate) fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

impl fmt::Debug for DyadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(l={}, k={:?})", self.level, self.coords())
    }
}

impl fmt::Display for DyadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CubeRepr {
    level: u32,
    coords: Vec<u64>,
}

impl Serialize for DyadicCube {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CubeRepr { level: self.level(), coords: self.coords().to_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DyadicCube {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CubeRepr::deserialize(d)?;
        DyadicCube::new(r.coords.len(), r.level, &r.coords).map_err(serde::de::Error::custom)
    }
}
