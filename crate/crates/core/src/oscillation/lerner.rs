//! Median-based stopping-time decomposition of a step function on a cube.
//!
//! Starting from `Q0`, each selected cube `P` gets the exceptional set
//! `E(P) = {x in P : |f - m_f(P)| > alpha_P}` with
//! `alpha_P = ((f - m_f(P)) chi_P)^*(|P|/4)`, and the next generation inside
//! `P` consists of the maximal dyadic `Q` strictly inside `P` that are at
//! least half covered by `E(P)`. Since `|E(P)| < |P|/4` the selected cubes
//! cover less than half of `P`, and every unselected cube is less than half
//! covered, which is what ties the medians of consecutive generations
//! together in the pointwise bound.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{median_of, omega_of, rearrangement_of, require_same_dim, sharp_maximal_table};
use crate::cube::DyadicCube;
use crate::error::{Error, Result};
use crate::step::StepFunction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LernerDecomposition {
    root: DyadicCube,
    /// `generations[k - 1]` holds the cubes `Q_j^k`, sorted.
    generations: Vec<Vec<DyadicCube>>,
}

impl LernerDecomposition {
    pub fn new(root: DyadicCube, generations: Vec<Vec<DyadicCube>>) -> Self {
        Self { root, generations }
    }

    pub fn root(&self) -> &DyadicCube {
        &self.root
    }

    pub fn generations(&self) -> &[Vec<DyadicCube>] {
        &self.generations
    }

    /// `2^{-n-2}`.
    pub fn lambda_n(&self) -> f64 {
        lambda_n(self.root.dim())
    }

    pub fn cubes(&self) -> impl Iterator<Item = &DyadicCube> {
        self.generations.iter().flatten()
    }

    /// `|Omega_k|` for `k >= 1`.
    pub fn omega_measure(&self, k: usize) -> f64 {
        self.generations.get(k.wrapping_sub(1)).map_or(0.0, |g| g.iter().map(DyadicCube::measure).sum())
    }

    /// `|E_j^k| = |Q_j^k| - |Omega_{k+1} cap Q_j^k|`.
    pub fn ground_set_measure(&self, k: usize, q: &DyadicCube) -> f64 {
        let inner: f64 =
            self.generations.get(k).map_or(0.0, |g| g.iter().filter(|c| q.contains(c)).map(DyadicCube::measure).sum());
        q.measure() - inner
    }

    /// Check the structural properties of the decomposition exactly.
    pub fn structure(&self) -> StructureReport {
        let mut r = StructureReport {
            inside_root: true,
            disjoint_generations: true,
            nested: true,
            halving: true,
            ground_sets_large: true,
        };
        for (g, cubes) in self.generations.iter().enumerate() {
            let set: HashSet<DyadicCube> = cubes.iter().copied().collect();
            if set.len() != cubes.len() {
                r.disjoint_generations = false;
            }
            for q in cubes {
                if !self.root.strictly_contains(q) {
                    r.inside_root = false;
                    continue;
                }
                if q.ancestors().take_while(|a| self.root.contains(a)).any(|a| set.contains(&a)) {
                    r.disjoint_generations = false;
                }
                if g > 0 && !self.generations[g - 1].iter().any(|p| p.contains(q)) {
                    r.nested = false;
                }
                let inner: f64 = self
                    .generations
                    .get(g + 1)
                    .map_or(0.0, |next| next.iter().filter(|c| q.contains(c)).map(DyadicCube::measure).sum());
                if 2.0 * inner > q.measure() {
                    r.halving = false;
                }
                if 2.0 * self.ground_set_measure(g + 1, q) < q.measure() {
                    r.ground_sets_large = false;
                }
            }
        }
        r
    }
}

/// Outcome of [`LernerDecomposition::structure`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub inside_root: bool,
    pub disjoint_generations: bool,
    /// `Omega_{k+1}` is contained in `Omega_k`.
    pub nested: bool,
    /// `|Omega_{k+1} cap Q_j^k| <= |Q_j^k| / 2`.
    pub halving: bool,
    /// `|E_j^k| >= |Q_j^k| / 2`.
    pub ground_sets_large: bool,
}

impl StructureReport {
    pub fn holds(&self) -> bool {
        self.inside_root && self.disjoint_generations && self.nested && self.halving && self.ground_sets_large
    }
}

pub(crate) fn lambda_n(dim: usize) -> f64 {
    2f64.powi(-(dim as i32) - 2)
}

/// Build the decomposition of `f` relative to `q0`.
pub fn lerner_decompose(f: &StepFunction, q0: &DyadicCube) -> Result<LernerDecomposition> {
    require_same_dim(f, q0)?;
    let start = f.locate(q0)?;
    let mut generations = Vec::new();
    if f.node(start).cube() != q0 {
        // q0 lies inside a leaf: f is constant there
        return Ok(LernerDecomposition::new(*q0, generations));
    }
    let mut frontier = vec![start];
    loop {
        let mut next = Vec::new();
        for &p in &frontier {
            select_children(f, p, &mut next);
        }
        if next.is_empty() {
            break;
        }
        let mut cubes: Vec<DyadicCube> = next.iter().map(|&i| *f.node(i).cube()).collect();
        cubes.sort();
        generations.push(cubes);
        frontier = next;
    }
    Ok(LernerDecomposition::new(*q0, generations))
}

fn select_children(f: &StepFunction, p: usize, out: &mut Vec<usize>) {
    let node = f.node(p);
    if node.is_leaf() {
        return;
    }
    let cube = node.cube();
    let vals = f.values_in(cube).expect("node cube is inside the root");
    let m = median_of(vals.clone(), cube.measure()).canonical;
    let alpha = rearrangement_of(vals.iter().map(|&(v, w)| (v - m, w)), cube.measure() / 4.0);

    // |Q cap E(P)| for every node Q of the subtree, bottom-up
    let end = node.end();
    let mut covered = vec![0.0; end - p];
    for i in (p..end).rev() {
        let n = f.node(i);
        covered[i - p] = if n.is_leaf() {
            if (n.mean() - m).abs() > alpha {
                n.cube().measure()
            } else {
                0.0
            }
        } else {
            f.children(i).map(|c| covered[c - p]).sum()
        };
    }

    let mut stack: Vec<usize> = f.children(p).collect();
    stack.reverse();
    while let Some(i) = stack.pop() {
        let q = f.node(i).cube();
        if 2.0 * covered[i - p] >= q.measure() {
            out.push(i);
        } else {
            let mut kids: Vec<usize> = f.children(i).collect();
            kids.reverse();
            stack.extend(kids);
        }
    }
}

/// Pointwise comparison of
/// `|f(x) - m_f(Q0)|` against
/// `4 M^{#,d}_{1/4,Q0} f(x) + 4 sum_{k,j} omega_{lambda_n}(f, parent(Q_j^k)) chi_{Q_j^k}(x)`
/// at every leaf inside `Q0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LernerReport {
    /// `max(LHS - RHS)` over leaves; the bound holds when this is `<= 0`
    /// (up to [`LernerReport::TOLERANCE`]).
    pub max_residual: f64,
    /// Largest `LHS / RHS` over leaves with positive right-hand side.
    pub max_ratio: f64,
    pub leaves: usize,
    pub constant: f64,
    pub pass: bool,
}

impl LernerReport {
    pub const TOLERANCE: f64 = 1e-12;
}

pub fn verify_lerner_bound(f: &StepFunction, q0: &DyadicCube, d: &LernerDecomposition) -> Result<LernerReport> {
    require_same_dim(f, q0)?;
    if d.root() != q0 {
        return Err(Error::Precondition(format!("decomposition is rooted at {} but the cube is {q0}", d.root())));
    }
    let constant = 4.0;
    let start = f.locate(q0)?;
    let m0 = f.values_in(q0).map(|v| median_of(v, q0.measure()).canonical)?;

    if f.node(start).cube() != q0 {
        if d.cubes().next().is_some() {
            return Err(Error::Precondition("nonempty decomposition of a constant piece".into()));
        }
        let lhs = (f.node(start).mean() - m0).abs();
        return Ok(LernerReport {
            max_residual: lhs,
            max_ratio: if lhs > 0.0 { f64::INFINITY } else { 0.0 },
            leaves: 1,
            constant,
            pass: lhs <= LernerReport::TOLERANCE,
        });
    }

    let sharp = sharp_maximal_table(f, q0, 0.25)?;
    let lambda = d.lambda_n();
    let mut bump = vec![0.0; f.nodes().len()];
    for q in d.cubes() {
        if !q0.strictly_contains(q) {
            return Err(Error::Precondition(format!("cube {q} is not a proper subcube of {q0}")));
        }
        let i = f.locate(q)?;
        if f.node(i).cube() != q {
            return Err(Error::Precondition(format!("cube {q} is not a node of the partition")));
        }
        let parent = q.parent().expect("proper subcube has a parent");
        bump[i] += omega_of(f.values_in(&parent)?, parent.measure(), lambda);
    }
    // push the sums down to the leaves in pre-order
    let end = f.node(start).end();
    let mut acc = vec![0.0; f.nodes().len()];
    for i in start..end {
        let base = if i == start { 0.0 } else { acc[i] };
        let here = base + bump[i];
        acc[i] = here;
        for c in f.children(i) {
            acc[c] = here;
        }
    }

    let mut max_residual = f64::NEG_INFINITY;
    let mut max_ratio = 0.0f64;
    let mut leaves = 0;
    for i in start..end {
        let n = f.node(i);
        if !n.is_leaf() {
            continue;
        }
        leaves += 1;
        let lhs = (n.mean() - m0).abs();
        let rhs = constant * sharp[i] + constant * acc[i];
        max_residual = max_residual.max(lhs - rhs);
        if rhs > 0.0 {
            max_ratio = max_ratio.max(lhs / rhs);
        } else if lhs > 0.0 {
            max_ratio = f64::INFINITY;
        }
    }
    Ok(LernerReport { max_residual, max_ratio, leaves, constant, pass: max_residual <= LernerReport::TOLERANCE })
}
