use serde_json::Value;

use super::model::{FunctionModel, ModelBuilder};
use crate::error::{invalid, Result};
use crate::measures::ProductDistribution;

const IN: usize = ModelBuilder::INPUT;

fn diag(v: &[f64]) -> Vec<Vec<f64>> {
    (0..v.len())
        .map(|i| (0..v.len()).map(|j| if i == j { v[i] } else { 0.0 }).collect())
        .collect()
}

pub fn sigmoid_model() -> FunctionModel {
    let mut b = ModelBuilder::new(1);
    let s = b.sigmoid(IN);
    b.build(s).unwrap()
}

pub fn bounded_linear() -> FunctionModel {
    let mut b = ModelBuilder::new(2);
    let a = b.linear(IN, vec![vec![0.0, 0.4], vec![0.3, 0.8]]);
    let c = b.clamp(a, vec![-2.0; 2], vec![2.0; 2]);
    b.build(c).unwrap()
}

pub const QUAD_TANK_A: [[f64; 4]; 4] = [
    [0.721, 0.0, 0.041, 0.0],
    [0.0, 0.718, 0.0, 0.033],
    [0.0, 0.0, 0.724, 0.0],
    [0.0, 0.0, 0.0, 0.737],
];

pub fn quadruple_tank() -> FunctionModel {
    let mut b = ModelBuilder::new(4);
    let a = b.linear(IN, QUAD_TANK_A.iter().map(|r| r.to_vec()).collect());
    b.build(a).unwrap()
}

pub const NN_LAYER_DIAG: [f64; 10] = [3.0, 1e-3, 5e-3, 7e-3, 3e-2, 1e-3, 1e-3, 1e-3, 1e-3, 1e-3];

pub fn nn_layer() -> FunctionModel {
    let mut b = ModelBuilder::new(10);
    let a = b.linear(IN, diag(&NN_LAYER_DIAG));
    let s = b.sigmoid(a);
    b.build(s).unwrap()
}

pub fn mountain_car() -> FunctionModel {
    let mut b = ModelBuilder::new(2);
    let a = b.affine(IN, vec![vec![1.0, 0.0], vec![1.0, 1.0]], vec![1e-3, 0.0]);
    let c = b.clamp(a, vec![-0.5; 2], vec![1.2; 2]);
    let v = b.select(IN, vec![1]);
    let v3 = b.scale(v, vec![3.0]);
    let cs = b.cos(v3);
    let drift = b.affine(cs, vec![vec![-2.5e-3], vec![0.0]], vec![0.0, 0.0]);
    let out = b.sum(vec![c, drift]);
    b.build(out).unwrap()
}

pub fn dubins_car() -> FunctionModel {
    let mut b = ModelBuilder::new(3);
    let h = b.select(IN, vec![2]);
    let s = b.sin(h);
    let c = b.cos(h);
    let sc = b.concat(vec![s, c]);
    let turn = b.affine(sc, vec![vec![1.5, 0.0], vec![0.0, 1.5], vec![0.0, 0.0]], vec![0.0, 0.0, 0.6]);
    let out = b.sum(vec![IN, turn]);
    b.build(out).unwrap()
}

const TABLE1_DIAG: [f64; 4] = [3.0, 0.001, 1.1, 2.2];

/// Clamped diagonal maps used for the location-selection comparison:
/// clamp(3x, -1, 1) for d = 1 and clamp(diag(..)x, -2, 2) for d = 2..4.
pub fn clamped_diagonal(d: usize) -> Result<FunctionModel> {
    if !(1..=4).contains(&d) {
        return Err(invalid(format!("clamped_diagonal needs d in 1..=4, got {d}")));
    }
    let lim = if d == 1 { 1.0 } else { 2.0 };
    let mut b = ModelBuilder::new(d);
    let a = b.linear(IN, diag(&TABLE1_DIAG[..d]));
    let c = b.clamp(a, vec![-lim; d], vec![lim; d]);
    b.build(c)
}

pub const NN3D_A: [f64; 3] = [3.0, 1.5, 1.2];
pub const NN3D_B: [f64; 3] = [0.5, 1.0, 0.9];

/// sigma(A x + B w) on the stacked input (x, w).
pub fn nn_dynamics_3d() -> FunctionModel {
    let mut b = ModelBuilder::new(6);
    let mut a = vec![vec![0.0; 6]; 3];
    for i in 0..3 {
        a[i][i] = NN3D_A[i];
        a[i][3 + i] = NN3D_B[i];
    }
    let z = b.linear(IN, a);
    let s = b.sigmoid(z);
    b.build(s).unwrap()
}

pub const BUILTIN_NAMES: [&str; 8] = [
    "sigmoid",
    "bounded_linear",
    "quadruple_tank",
    "nn_layer",
    "mountain_car",
    "dubins_car",
    "clamped_diagonal",
    "nn_dynamics_3d",
];

/// Model by name. `clamped_diagonal` reads `{"d": n}` from `params`.
pub fn builtin(name: &str, params: &Value) -> Result<FunctionModel> {
    Ok(match name {
        "sigmoid" => sigmoid_model(),
        "bounded_linear" => bounded_linear(),
        "quadruple_tank" => quadruple_tank(),
        "nn_layer" => nn_layer(),
        "mountain_car" => mountain_car(),
        "dubins_car" => dubins_car(),
        "nn_dynamics_3d" => nn_dynamics_3d(),
        "clamped_diagonal" => {
            let d = params
                .get("d")
                .and_then(Value::as_u64)
                .ok_or_else(|| invalid("clamped_diagonal needs an integer parameter d"))?;
            clamped_diagonal(d as usize)?
        }
        other => return Err(invalid(format!("unknown builtin model {other:?}"))),
    })
}

/// Input distribution paired with each benchmark. Variances, not deviations.
pub fn benchmark_distribution(name: &str, params: &Value) -> Result<ProductDistribution> {
    let (m, v): (Vec<f64>, Vec<f64>) = match name {
        "sigmoid" => (vec![0.2], vec![0.5]),
        "bounded_linear" => (vec![1.5, 2.5], vec![0.4, 0.5]),
        "quadruple_tank" => (vec![1.5, 2.5, -0.5, -1.0], vec![0.001, 0.02, 0.4, 0.01]),
        "nn_layer" => (
            vec![0.0, 1.0, 0.5, -0.7, 0.3, 2.0, -3.0, 0.4, -0.1, 4.0],
            vec![0.0001, 0.5, 0.7, 0.2, 1.5, 2.5, 0.1, 0.5, 0.8, 0.2],
        ),
        "mountain_car" => (vec![0.3, 0.2], vec![0.1, 1e-3]),
        "dubins_car" => (vec![0.3, 0.2, 0.01], vec![0.1, 0.01, 0.001]),
        "nn_dynamics_3d" => (vec![1.5, -1.2, 2.4], vec![0.1, 0.5, 0.2]),
        "clamped_diagonal" => {
            let d = params.get("d").and_then(Value::as_u64).unwrap_or(0) as usize;
            match d {
                1 => (vec![0.0], vec![1.0]),
                2..=4 => (
                    [3.0, 1.0, -0.9, 0.4][..d].to_vec(),
                    [0.02, 0.5, 0.001, 0.2][..d].to_vec(),
                ),
                _ => return Err(invalid("clamped_diagonal needs d in 1..=4")),
            }
        }
        other => return Err(invalid(format!("no distribution for {other:?}"))),
    };
    ProductDistribution::diag_gaussian(&m, &v)
}
