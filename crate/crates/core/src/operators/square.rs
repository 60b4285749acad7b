//! The dyadic square function `S_d f = (sum_Q (f_Q - f_{parent Q})^2 chi_Q)^{1/2}`.

use crate::cube::DyadicCube;
use crate::error::Result;
use crate::step::StepFunction;

/// `S_d f`; the sum runs over every dyadic cube strictly inside the root.
pub fn square_function(f: &StepFunction) -> Result<StepFunction> {
    square_function_squared(f)?.map(f64::sqrt)
}

/// `(S_d f)^2`, kept separate to avoid a square root round trip.
pub fn square_function_squared(f: &StepFunction) -> Result<StepFunction> {
    let table = f.path_table(0.0, |above, i| above + jump_squared(f, i));
    f.with_node_values(&table)
}

/// `sum_{Q strictly inside Q0} (f_Q - f_{parent Q})^2 chi_Q`, zero outside `Q0`.
pub fn local_square_sum(f: &StepFunction, q0: &DyadicCube) -> Result<StepFunction> {
    f.locate(q0)?;
    let table = f.path_table(0.0, |above, i| {
        let c = f.node(i).cube();
        if q0.strictly_contains(c) {
            above + jump_squared(f, i)
        } else {
            0.0
        }
    });
    f.with_node_values(&table)
}

// (f_Q - f_{parent Q})^2 for the node's cube; zero at the root.
fn jump_squared(f: &StepFunction, i: usize) -> f64 {
    let node = f.node(i);
    match node.cube().parent() {
        Some(p) => {
            let d = node.mean() - f.cube_average(&p).expect("parent is a node");
            d * d
        }
        None => 0.0,
    }
}
