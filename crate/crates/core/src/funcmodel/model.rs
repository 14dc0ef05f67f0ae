use serde::{Deserialize, Serialize};

use super::scalar::{mul_interval, scale_interval, Scalar};
use crate::error::{invalid, Error, Result};
use crate::measures::{Interval, Region};

/// Primitive operation of a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Op {
    /// a is given row by row.
    Affine { a: Vec<Vec<f64>>, b: Vec<f64> },
    Clamp { lo: Vec<f64>, hi: Vec<f64> },
    Sigmoid,
    Sin,
    Cos,
    Scale { s: Vec<f64> },
    Select { indices: Vec<usize> },
    Sum,
    Concat,
    Const { value: Vec<f64> },
}

/// Node `i` of the list has id `i + 1`; id 0 is the model input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    #[serde(flatten)]
    pub op: Op,
    #[serde(default)]
    pub inputs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelJson", into = "ModelJson")]
pub struct FunctionModel {
    input_dim: usize,
    nodes: Vec<Node>,
    output: usize,
    dims: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    input_dim: usize,
    nodes: Vec<Node>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<usize>,
}

impl TryFrom<ModelJson> for FunctionModel {
    type Error = Error;
    fn try_from(j: ModelJson) -> Result<Self> {
        FunctionModel::new(j.input_dim, j.nodes, j.output)
    }
}

impl From<FunctionModel> for ModelJson {
    fn from(m: FunctionModel) -> Self {
        ModelJson {
            input_dim: m.input_dim,
            output: Some(m.output),
            nodes: m.nodes,
        }
    }
}

/// Affine forms in v = x - anchor: lower_a v + lower_b <= h(x) <= upper_a v + upper_b.
#[derive(Debug, Clone, PartialEq)]
struct Forms {
    la: Vec<Vec<f64>>,
    lb: Vec<f64>,
    ua: Vec<Vec<f64>>,
    ub: Vec<f64>,
}

impl Forms {
    fn rows(&self) -> usize {
        self.lb.len()
    }

    fn select(&self, idx: &[usize]) -> Forms {
        Forms {
            la: idx.iter().map(|&i| self.la[i].clone()).collect(),
            lb: idx.iter().map(|&i| self.lb[i]).collect(),
            ua: idx.iter().map(|&i| self.ua[i].clone()).collect(),
            ub: idx.iter().map(|&i| self.ub[i]).collect(),
        }
    }
}

/// Min and max of a . v + b over the box v in `vbox`, with 0 * inf = 0.
fn concretize(a: &[f64], b: f64, vbox: &[Interval]) -> Interval {
    let mut lo = b;
    let mut hi = b;
    for (&c, v) in a.iter().zip(vbox) {
        let r = scale_interval(c, *v);
        lo += r.lo;
        hi += r.hi;
    }
    Interval { lo, hi }
}

fn add_scaled(dst: &mut [f64], src: &[f64], s: f64) {
    if s != 0.0 {
        for (d, x) in dst.iter_mut().zip(src) {
            *d += s * x;
        }
    }
}

fn intersect_or(a: Interval, b: Interval) -> Interval {
    a.intersect(&b).unwrap_or(a)
}

/// Sound linear bounds on f(x) - f(anchor) over a region.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEnclosure {
    pub lower_a: Vec<Vec<f64>>,
    pub lower_b: Vec<f64>,
    pub upper_a: Vec<Vec<f64>>,
    pub upper_b: Vec<f64>,
    pub region: Region,
    pub anchor: Vec<f64>,
}

impl LinearEnclosure {
    /// Lower and upper bounds on f(x) - f(anchor) at x.
    pub fn bounds_at(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let v: Vec<f64> = x.iter().zip(&self.anchor).map(|(a, c)| a - c).collect();
        let dot = |a: &[f64]| a.iter().zip(&v).map(|(p, q)| p * q).sum::<f64>();
        (
            self.lower_a.iter().zip(&self.lower_b).map(|(a, b)| dot(a) + b).collect(),
            self.upper_a.iter().zip(&self.upper_b).map(|(a, b)| dot(a) + b).collect(),
        )
    }

    /// Constant bounds on f(x) - f(anchor) over the region.
    pub fn constant_bounds(&self) -> Vec<Interval> {
        let vbox: Vec<Interval> = self
            .region
            .iter()
            .zip(&self.anchor)
            .map(|(r, c)| Interval { lo: r.lo - c, hi: r.hi - c })
            .collect();
        (0..self.lower_b.len())
            .map(|i| Interval {
                lo: concretize(&self.lower_a[i], self.lower_b[i], &vbox).lo,
                hi: concretize(&self.upper_a[i], self.upper_b[i], &vbox).hi,
            })
            .collect()
    }
}

/// Interval matrix S with h(x) - h(anchor) in S (x - anchor).
pub type SlopeMatrix = Vec<Vec<Interval>>;

/// Per-node results of one pass over a region.
struct Analysis {
    values: Vec<Vec<f64>>,
    ranges: Vec<Vec<Interval>>,
    forms: Vec<Forms>,
}

impl FunctionModel {
    pub fn new(input_dim: usize, nodes: Vec<Node>, output: Option<usize>) -> Result<Self> {
        if input_dim == 0 {
            return Err(invalid("input dimension must be positive"));
        }
        let mut dims = vec![input_dim];
        for (i, node) in nodes.iter().enumerate() {
            let id = i + 1;
            if let Some(&bad) = node.inputs.iter().find(|&&j| j >= id) {
                return Err(invalid(format!("node {id} reads node {bad}, which is not earlier")));
            }
            let ins: Vec<usize> = node.inputs.iter().map(|&j| dims[j]).collect();
            let unary = || -> Result<usize> {
                if ins.len() != 1 {
                    return Err(invalid(format!("node {id} takes exactly one input")));
                }
                Ok(ins[0])
            };
            let same = |n: usize, what: &str| -> Result<()> {
                if n != ins[0] {
                    return Err(Error::DimensionMismatch { expected: ins[0], got: n })
                        .map_err(|e| invalid(format!("node {id} {what}: {e}")));
                }
                Ok(())
            };
            let d = match &node.op {
                Op::Affine { a, b } => {
                    let n = unary()?;
                    if a.is_empty() || a.len() != b.len() {
                        return Err(invalid(format!("node {id}: affine needs matching nonempty a and b")));
                    }
                    if a.iter().any(|r| r.len() != n) {
                        return Err(invalid(format!("node {id}: affine rows must have length {n}")));
                    }
                    if a.iter().flatten().chain(b).any(|v| !v.is_finite()) {
                        return Err(invalid(format!("node {id}: affine entries must be finite")));
                    }
                    a.len()
                }
                Op::Clamp { lo, hi } => {
                    let n = unary()?;
                    same(lo.len(), "clamp lo")?;
                    same(hi.len(), "clamp hi")?;
                    if lo.iter().zip(hi).any(|(l, h)| !(l <= h)) {
                        return Err(invalid(format!("node {id}: clamp needs lo <= hi")));
                    }
                    n
                }
                Op::Sigmoid | Op::Sin | Op::Cos => unary()?,
                Op::Scale { s } => {
                    let n = unary()?;
                    same(s.len(), "scale")?;
                    if s.iter().any(|v| !v.is_finite()) {
                        return Err(invalid(format!("node {id}: scale must be finite")));
                    }
                    n
                }
                Op::Select { indices } => {
                    let n = unary()?;
                    if indices.is_empty() || indices.iter().any(|&k| k >= n) {
                        return Err(invalid(format!("node {id}: select indices out of range")));
                    }
                    indices.len()
                }
                Op::Sum => {
                    if ins.is_empty() || ins.iter().any(|&n| n != ins[0]) {
                        return Err(invalid(format!("node {id}: sum needs inputs of equal dimension")));
                    }
                    ins[0]
                }
                Op::Concat => {
                    if ins.is_empty() {
                        return Err(invalid(format!("node {id}: concat needs inputs")));
                    }
                    ins.iter().sum()
                }
                Op::Const { value } => {
                    if !node.inputs.is_empty() || value.is_empty() {
                        return Err(invalid(format!("node {id}: const takes no inputs and a nonempty value")));
                    }
                    value.len()
                }
            };
            dims.push(d);
        }
        let output = output.unwrap_or(nodes.len());
        if output >= dims.len() {
            return Err(invalid(format!("output node {output} does not exist")));
        }
        Ok(FunctionModel {
            input_dim,
            nodes,
            output,
            dims,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.dims[self.output]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Single affine node reading the input: returns (A, b).
    pub fn as_affine(&self) -> Option<(&[Vec<f64>], &[f64])> {
        match (self.nodes.as_slice(), self.output) {
            ([Node { op: Op::Affine { a, b }, inputs }], 1) if inputs == &[0] => Some((a, b)),
            _ => None,
        }
    }

    fn scalars(&self, node: &Node, n: usize) -> Option<Vec<Scalar>> {
        match &node.op {
            Op::Clamp { lo, hi } => Some(lo.iter().zip(hi).map(|(&l, &h)| Scalar::Clamp(l, h)).collect()),
            Op::Sigmoid => Some(vec![Scalar::Sigmoid; n]),
            Op::Sin => Some(vec![Scalar::Sin; n]),
            Op::Cos => Some(vec![Scalar::Cos; n]),
            Op::Scale { s } => Some(s.iter().map(|&v| Scalar::Scale(v)).collect()),
            _ => None,
        }
    }

    fn check_input(&self, n: usize) -> Result<()> {
        if n != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: n,
            });
        }
        Ok(())
    }

    fn eval_all(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut vals: Vec<Vec<f64>> = Vec::with_capacity(self.nodes.len() + 1);
        vals.push(x.to_vec());
        for node in &self.nodes {
            let v = match &node.op {
                Op::Affine { a, b } => {
                    let y = &vals[node.inputs[0]];
                    a.iter()
                        .zip(b)
                        .map(|(row, bi)| row.iter().zip(y).map(|(p, q)| p * q).sum::<f64>() + bi)
                        .collect()
                }
                Op::Select { indices } => indices.iter().map(|&k| vals[node.inputs[0]][k]).collect(),
                Op::Sum => {
                    let mut s = vals[node.inputs[0]].clone();
                    for &j in &node.inputs[1..] {
                        for (a, b) in s.iter_mut().zip(&vals[j]) {
                            *a += b;
                        }
                    }
                    s
                }
                Op::Concat => node.inputs.iter().flat_map(|&j| vals[j].clone()).collect(),
                Op::Const { value } => value.clone(),
                _ => {
                    let y = &vals[node.inputs[0]];
                    let sc = self.scalars(node, y.len()).expect("elementwise op");
                    y.iter().zip(sc).map(|(&t, g)| g.eval(t)).collect()
                }
            };
            vals.push(v);
        }
        vals
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x.len())?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let mut vals = self.eval_all(x);
        vals.swap_remove(self.output)
    }

    /// Interval bound propagation; each primitive is enclosed exactly.
    pub fn interval_bounds(&self, region: &[Interval]) -> Result<Vec<Interval>> {
        self.check_input(region.len())?;
        let mut ranges: Vec<Vec<Interval>> = vec![region.to_vec()];
        for node in &self.nodes {
            let r = self.ibp_node(node, &ranges);
            ranges.push(r);
        }
        Ok(ranges.swap_remove(self.output))
    }

    fn ibp_node(&self, node: &Node, ranges: &[Vec<Interval>]) -> Vec<Interval> {
        match &node.op {
            Op::Affine { a, b } => {
                let y = &ranges[node.inputs[0]];
                a.iter()
                    .zip(b)
                    .map(|(row, &bi)| {
                        let mut acc = Interval::point(bi);
                        for (&c, iv) in row.iter().zip(y) {
                            let r = scale_interval(c, *iv);
                            acc = Interval { lo: acc.lo + r.lo, hi: acc.hi + r.hi };
                        }
                        acc
                    })
                    .collect()
            }
            Op::Select { indices } => indices.iter().map(|&k| ranges[node.inputs[0]][k]).collect(),
            Op::Sum => {
                let mut s = ranges[node.inputs[0]].clone();
                for &j in &node.inputs[1..] {
                    for (a, b) in s.iter_mut().zip(&ranges[j]) {
                        *a = Interval { lo: a.lo + b.lo, hi: a.hi + b.hi };
                    }
                }
                s
            }
            Op::Concat => node.inputs.iter().flat_map(|&j| ranges[j].clone()).collect(),
            Op::Const { value } => value.iter().map(|&v| Interval::point(v)).collect(),
            _ => {
                let y = &ranges[node.inputs[0]];
                let sc = self.scalars(node, y.len()).expect("elementwise op");
                y.iter().zip(sc).map(|(&iv, g)| g.range(iv)).collect()
            }
        }
    }

    /// One forward pass computing anchor values, tightened node ranges
    /// (interval bounds intersected with the concretized linear forms) and
    /// the linear forms themselves.
    fn analyze(&self, region: &[Interval], anchor: &[f64]) -> Analysis {
        let n = self.input_dim;
        let values = self.eval_all(anchor);
        let vbox: Vec<Interval> = region
            .iter()
            .zip(anchor)
            .map(|(r, c)| Interval { lo: r.lo - c, hi: r.hi - c })
            .collect();
        let ident: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let mut forms = vec![Forms {
            la: ident.clone(),
            lb: anchor.to_vec(),
            ua: ident,
            ub: anchor.to_vec(),
        }];
        let mut ranges: Vec<Vec<Interval>> = vec![region.to_vec()];
        for node in &self.nodes {
            let f = match &node.op {
                Op::Affine { a, b } => {
                    let inp = &forms[node.inputs[0]];
                    let mut out = Forms {
                        la: vec![vec![0.0; n]; a.len()],
                        lb: b.clone(),
                        ua: vec![vec![0.0; n]; a.len()],
                        ub: b.clone(),
                    };
                    for (i, row) in a.iter().enumerate() {
                        for (k, &w) in row.iter().enumerate() {
                            if w > 0.0 {
                                add_scaled(&mut out.la[i], &inp.la[k], w);
                                out.lb[i] += w * inp.lb[k];
                                add_scaled(&mut out.ua[i], &inp.ua[k], w);
                                out.ub[i] += w * inp.ub[k];
                            } else if w < 0.0 {
                                add_scaled(&mut out.la[i], &inp.ua[k], w);
                                out.lb[i] += w * inp.ub[k];
                                add_scaled(&mut out.ua[i], &inp.la[k], w);
                                out.ub[i] += w * inp.lb[k];
                            }
                        }
                    }
                    out
                }
                Op::Select { indices } => forms[node.inputs[0]].select(indices),
                Op::Sum => {
                    let mut s = forms[node.inputs[0]].clone();
                    for &j in &node.inputs[1..] {
                        let o = &forms[j];
                        for i in 0..s.rows() {
                            add_scaled(&mut s.la[i], &o.la[i], 1.0);
                            add_scaled(&mut s.ua[i], &o.ua[i], 1.0);
                            s.lb[i] += o.lb[i];
                            s.ub[i] += o.ub[i];
                        }
                    }
                    s
                }
                Op::Concat => {
                    let mut s = Forms { la: vec![], lb: vec![], ua: vec![], ub: vec![] };
                    for &j in &node.inputs {
                        let o = &forms[j];
                        s.la.extend(o.la.iter().cloned());
                        s.lb.extend(&o.lb);
                        s.ua.extend(o.ua.iter().cloned());
                        s.ub.extend(&o.ub);
                    }
                    s
                }
                Op::Const { value } => Forms {
                    la: vec![vec![0.0; n]; value.len()],
                    lb: value.clone(),
                    ua: vec![vec![0.0; n]; value.len()],
                    ub: value.clone(),
                },
                _ => {
                    let inp = &forms[node.inputs[0]];
                    let y = &ranges[node.inputs[0]];
                    let sc = self.scalars(node, y.len()).expect("elementwise op");
                    let mut out = Forms {
                        la: vec![vec![0.0; n]; y.len()],
                        lb: vec![0.0; y.len()],
                        ua: vec![vec![0.0; n]; y.len()],
                        ub: vec![0.0; y.len()],
                    };
                    for (i, g) in sc.iter().enumerate() {
                        let (a, lo, hi) = g.relax(y[i]);
                        let (src_l, src_u, bl, bu) = if a >= 0.0 {
                            (&inp.la[i], &inp.ua[i], inp.lb[i], inp.ub[i])
                        } else {
                            (&inp.ua[i], &inp.la[i], inp.ub[i], inp.lb[i])
                        };
                        add_scaled(&mut out.la[i], src_l, a);
                        add_scaled(&mut out.ua[i], src_u, a);
                        out.lb[i] = if a == 0.0 { lo } else { a * bl + lo };
                        out.ub[i] = if a == 0.0 { hi } else { a * bu + hi };
                    }
                    out
                }
            };
            let ibp = self.ibp_node(node, &ranges);
            let tight = ibp
                .iter()
                .enumerate()
                .map(|(i, &r)| {
                    let c = Interval {
                        lo: concretize(&f.la[i], f.lb[i], &vbox).lo,
                        hi: concretize(&f.ua[i], f.ub[i], &vbox).hi,
                    };
                    intersect_or(r, c)
                })
                .collect();
            ranges.push(tight);
            forms.push(f);
        }
        Analysis {
            values,
            ranges,
            forms,
        }
    }

    /// Linear enclosure of f(x) - f(anchor) over the region.
    pub fn linear_enclosure(&self, region: &[Interval], anchor: &[f64]) -> Result<LinearEnclosure> {
        self.check_input(region.len())?;
        self.check_input(anchor.len())?;
        let an = self.analyze(region, anchor);
        let f = &an.forms[self.output];
        let fc = &an.values[self.output];
        Ok(LinearEnclosure {
            lower_a: f.la.clone(),
            lower_b: f.lb.iter().zip(fc).map(|(b, v)| b - v).collect(),
            upper_a: f.ua.clone(),
            upper_b: f.ub.iter().zip(fc).map(|(b, v)| b - v).collect(),
            region: region.to_vec(),
            anchor: anchor.to_vec(),
        })
    }

    /// Output range over the region: interval bounds intersected with the
    /// concretized linear enclosure anchored at `anchor`.
    pub fn range(&self, region: &[Interval], anchor: &[f64]) -> Result<Vec<Interval>> {
        self.check_input(region.len())?;
        self.check_input(anchor.len())?;
        let mut an = self.analyze(region, anchor);
        Ok(an.ranges.swap_remove(self.output))
    }

    /// Interval slope matrix on the region. With an anchor c, it encloses the
    /// chord slopes so that f(x) - f(c) is in S (x - c) for x in the region;
    /// without one, it encloses the Jacobian over the region.
    pub fn slope_matrix(&self, region: &[Interval], anchor: Option<&[f64]>) -> Result<SlopeMatrix> {
        self.check_input(region.len())?;
        let n = self.input_dim;
        let (values, ranges) = match anchor {
            Some(c) => {
                self.check_input(c.len())?;
                let an = self.analyze(region, c);
                (Some(an.values), an.ranges)
            }
            None => {
                let mut ranges: Vec<Vec<Interval>> = vec![region.to_vec()];
                for node in &self.nodes {
                    let r = self.ibp_node(node, &ranges);
                    ranges.push(r);
                }
                (None, ranges)
            }
        };
        let zero = Interval::point(0.0);
        let mut mats: Vec<SlopeMatrix> = vec![(0..n)
            .map(|i| (0..n).map(|j| Interval::point(if i == j { 1.0 } else { 0.0 })).collect())
            .collect()];
        for node in &self.nodes {
            let m: SlopeMatrix = match &node.op {
                Op::Affine { a, .. } => {
                    let s = &mats[node.inputs[0]];
                    a.iter()
                        .map(|row| {
                            (0..n)
                                .map(|j| {
                                    let mut acc = zero;
                                    for (k, &w) in row.iter().enumerate() {
                                        let r = scale_interval(w, s[k][j]);
                                        acc = Interval { lo: acc.lo + r.lo, hi: acc.hi + r.hi };
                                    }
                                    acc
                                })
                                .collect()
                        })
                        .collect()
                }
                Op::Select { indices } => indices.iter().map(|&k| mats[node.inputs[0]][k].clone()).collect(),
                Op::Sum => {
                    let mut s = mats[node.inputs[0]].clone();
                    for &j in &node.inputs[1..] {
                        for (row, orow) in s.iter_mut().zip(&mats[j]) {
                            for (a, b) in row.iter_mut().zip(orow) {
                                *a = Interval { lo: a.lo + b.lo, hi: a.hi + b.hi };
                            }
                        }
                    }
                    s
                }
                Op::Concat => node.inputs.iter().flat_map(|&j| mats[j].clone()).collect(),
                Op::Const { value } => vec![vec![zero; n]; value.len()],
                _ => {
                    let src = node.inputs[0];
                    let y = &ranges[src];
                    let sc = self.scalars(node, y.len()).expect("elementwise op");
                    sc.iter()
                        .enumerate()
                        .map(|(i, g)| {
                            let s = match &values {
                                Some(v) => g.chord_range(v[src][i], y[i]),
                                None => g.deriv_range(y[i]),
                            };
                            mats[src][i].iter().map(|&e| mul_interval(s, e)).collect()
                        })
                        .collect()
                }
            };
            mats.push(m);
        }
        Ok(mats.swap_remove(self.output))
    }

    /// Composition bound on the Lipschitz constant under the L_rho norm.
    pub fn composition_lipschitz(&self, rho: u32) -> f64 {
        let mut l = vec![1.0];
        for node in &self.nodes {
            let v = match &node.op {
                Op::Affine { a, .. } => super::induced_norm_rows(a, rho) * l[node.inputs[0]],
                Op::Select { .. } => l[node.inputs[0]],
                Op::Sum => node.inputs.iter().map(|&j| l[j]).sum(),
                Op::Concat => {
                    if rho == 1 {
                        node.inputs.iter().map(|&j| l[j]).sum()
                    } else {
                        node.inputs.iter().map(|&j| l[j] * l[j]).sum::<f64>().sqrt()
                    }
                }
                Op::Const { .. } => 0.0,
                _ => {
                    let n = self.dims[node.inputs[0]];
                    let sc = self.scalars(node, n).expect("elementwise op");
                    sc.iter().map(|g| g.global_slope()).fold(0.0, f64::max) * l[node.inputs[0]]
                }
            };
            l.push(v);
        }
        l[self.output]
    }
}

/// Elementwise magnitude of an interval matrix.
pub fn magnitude(s: &SlopeMatrix) -> Vec<Vec<f64>> {
    s.iter()
        .map(|row| row.iter().map(|e| e.lo.abs().max(e.hi.abs())).collect())
        .collect()
}

/// Builder for models; each method returns the id of the new node.
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    input_dim: usize,
    nodes: Vec<Node>,
}

impl ModelBuilder {
    pub fn new(input_dim: usize) -> Self {
        ModelBuilder {
            input_dim,
            nodes: Vec::new(),
        }
    }

    pub const INPUT: usize = 0;

    pub fn push(&mut self, op: Op, inputs: Vec<usize>) -> usize {
        self.nodes.push(Node { op, inputs });
        self.nodes.len()
    }

    pub fn affine(&mut self, x: usize, a: Vec<Vec<f64>>, b: Vec<f64>) -> usize {
        self.push(Op::Affine { a, b }, vec![x])
    }

    pub fn linear(&mut self, x: usize, a: Vec<Vec<f64>>) -> usize {
        let b = vec![0.0; a.len()];
        self.affine(x, a, b)
    }

    pub fn clamp(&mut self, x: usize, lo: Vec<f64>, hi: Vec<f64>) -> usize {
        self.push(Op::Clamp { lo, hi }, vec![x])
    }

    pub fn sigmoid(&mut self, x: usize) -> usize {
        self.push(Op::Sigmoid, vec![x])
    }

    pub fn sin(&mut self, x: usize) -> usize {
        self.push(Op::Sin, vec![x])
    }

    pub fn cos(&mut self, x: usize) -> usize {
        self.push(Op::Cos, vec![x])
    }

    pub fn scale(&mut self, x: usize, s: Vec<f64>) -> usize {
        self.push(Op::Scale { s }, vec![x])
    }

    pub fn select(&mut self, x: usize, indices: Vec<usize>) -> usize {
        self.push(Op::Select { indices }, vec![x])
    }

    pub fn sum(&mut self, xs: Vec<usize>) -> usize {
        self.push(Op::Sum, xs)
    }

    pub fn concat(&mut self, xs: Vec<usize>) -> usize {
        self.push(Op::Concat, xs)
    }

    pub fn constant(&mut self, value: Vec<f64>) -> usize {
        self.push(Op::Const { value }, vec![])
    }

    /// Appends the nodes of `model` with its input wired to node `x`;
    /// returns the id of the embedded output.
    pub fn embed(&mut self, model: &FunctionModel, x: usize) -> usize {
        let base = self.nodes.len();
        let map = |j: usize| if j == 0 { x } else { base + j };
        for node in &model.nodes {
            self.nodes.push(Node {
                op: node.op.clone(),
                inputs: node.inputs.iter().map(|&j| map(j)).collect(),
            });
        }
        map(model.output)
    }

    pub fn build(self, output: usize) -> Result<FunctionModel> {
        FunctionModel::new(self.input_dim, self.nodes, Some(output))
    }
}
