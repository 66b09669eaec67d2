//! Reverse-mode differentiation over 2-D tensors.
//!
//! Every forward operation is recorded on a tape; `backward` replays the
//! tape in reverse with an analytic rule per operation. One tape covers one
//! forward/backward pass and is confined to a single thread. Gradients
//! accumulate additively into each node; a fresh tape starts from zero.

use std::rc::Rc;

use crate::error::{Error, Result};
use crate::tensor::{CsrMatrix, Tensor};

/// Handle to a tape node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Clone)]
enum Op {
    Leaf,
    MatMul(usize, usize),
    /// Product of a constant symmetric sparse matrix with a tape value.
    SpmmSym(Rc<CsrMatrix>, usize),
    Relu(usize),
    RowL2Normalize(usize),
    MeanRows(usize),
    MaxRows(usize, Vec<usize>),
    Add(usize, usize),
    Scale(usize, f64),
    ConcatRows(Vec<usize>),
    /// NT-Xent loss over two batches of unit-norm rows.
    NtXentUnit { a: usize, o: usize, tau: f64 },
}

struct Node {
    value: Tensor,
    grad: Tensor,
    op: Op,
    requires_grad: bool,
}

#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    fn push(&mut self, value: Tensor, op: Op, requires_grad: bool) -> Var {
        let grad = Tensor::zeros(value.rows(), value.cols());
        self.nodes.push(Node {
            value,
            grad,
            op,
            requires_grad,
        });
        Var(self.nodes.len() - 1)
    }

    /// Differentiable input (parameters).
    pub fn leaf(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf, true)
    }

    /// Non-differentiable input (data); backward skips its gradient.
    pub fn constant(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf, false)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn grad(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].grad
    }

    fn requires(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.nodes[a.0].value.matmul(&self.nodes[b.0].value)?;
        let req = self.requires(a) || self.requires(b);
        Ok(self.push(value, Op::MatMul(a.0, b.0), req))
    }

    pub fn spmm_sym(&mut self, a: Rc<CsrMatrix>, x: Var) -> Result<Var> {
        let value = a.matmul_dense(&self.nodes[x.0].value)?;
        let req = self.requires(x);
        Ok(self.push(value, Op::SpmmSym(a, x.0), req))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let value = {
            let v = &self.nodes[a.0].value;
            Tensor::from_vec(
                v.rows(),
                v.cols(),
                v.data().iter().map(|&x| if x > 0.0 { x } else { 0.0 }).collect(),
            )
        };
        let req = self.requires(a);
        self.push(value, Op::Relu(a.0), req)
    }

    /// Divide every row by its Euclidean norm. Errors on rows with norm
    /// below 1e-12 (collapsed representation).
    pub fn row_l2_normalize(&mut self, a: Var) -> Result<Var> {
        let value = {
            let v = &self.nodes[a.0].value;
            let mut out = v.clone();
            for i in 0..v.rows() {
                let norm = row_norm(v.row(i));
                if norm < 1e-12 {
                    return Err(Error::DegenerateEmbedding { row: i });
                }
                for x in out.row_mut(i) {
                    *x /= norm;
                }
            }
            out
        };
        let req = self.requires(a);
        Ok(self.push(value, Op::RowL2Normalize(a.0), req))
    }

    /// 1 x cols tensor of column means.
    pub fn mean_rows(&mut self, a: Var) -> Result<Var> {
        let v = &self.nodes[a.0].value;
        if v.rows() == 0 {
            return Err(Error::EmptyGraph);
        }
        let (r, c) = v.shape();
        let mut out = vec![0.0; c];
        for i in 0..r {
            for (j, o) in out.iter_mut().enumerate() {
                *o += v.get(i, j);
            }
        }
        for o in out.iter_mut() {
            *o /= r as f64;
        }
        let value = Tensor::from_vec(1, c, out);
        let req = self.requires(a);
        Ok(self.push(value, Op::MeanRows(a.0), req))
    }

    /// 1 x cols tensor of column maxima; gradient routes to the first
    /// maximizing row per column.
    pub fn max_rows(&mut self, a: Var) -> Result<Var> {
        let v = &self.nodes[a.0].value;
        if v.rows() == 0 {
            return Err(Error::EmptyGraph);
        }
        let (r, c) = v.shape();
        let mut out = vec![f64::NEG_INFINITY; c];
        let mut argmax = vec![0usize; c];
        for i in 0..r {
            for j in 0..c {
                let x = v.get(i, j);
                if x > out[j] {
                    out[j] = x;
                    argmax[j] = i;
                }
            }
        }
        let value = Tensor::from_vec(1, c, out);
        let req = self.requires(a);
        Ok(self.push(value, Op::MaxRows(a.0, argmax), req))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.nodes[a.0].value.add(&self.nodes[b.0].value)?;
        let req = self.requires(a) || self.requires(b);
        Ok(self.push(value, Op::Add(a.0, b.0), req))
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        let value = self.nodes[a.0].value.scale(c);
        let req = self.requires(a);
        self.push(value, Op::Scale(a.0, c), req)
    }

    pub fn concat_rows(&mut self, parts: &[Var]) -> Result<Var> {
        if parts.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let cols = self.nodes[parts[0].0].value.cols();
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            let v = &self.nodes[p.0].value;
            if v.cols() != cols {
                return Err(Error::Dim {
                    op: "concat_rows",
                    lhs: (rows, cols),
                    rhs: v.shape(),
                });
            }
            rows += v.rows();
            data.extend_from_slice(v.data());
        }
        let value = Tensor::from_vec(rows, cols, data);
        let req = parts.iter().any(|p| self.requires(*p));
        Ok(self.push(value, Op::ConcatRows(parts.iter().map(|p| p.0).collect()), req))
    }

    /// NT-Xent over batches whose rows are already unit-norm: the anchor
    /// view `a` against the other view `o`, mean over anchors. The
    /// denominator holds the intra-anchor-view terms (k != n) plus all
    /// cross-view terms including the positive; log-sum-exp stabilized.
    pub fn nt_xent_unit(&mut self, a: Var, o: Var, tau: f64) -> Result<Var> {
        if tau <= 0.0 {
            return Err(Error::InvalidConfig(format!("tau must be > 0, got {tau}")));
        }
        let (av, ov) = (&self.nodes[a.0].value, &self.nodes[o.0].value);
        if av.shape() != ov.shape() {
            return Err(Error::Dim {
                op: "nt_xent",
                lhs: av.shape(),
                rhs: ov.shape(),
            });
        }
        let (loss, _, _) = nt_xent_forward(av, ov, tau)?;
        let value = Tensor::from_vec(1, 1, vec![loss]);
        let req = self.requires(a) || self.requires(o);
        Ok(self.push(value, Op::NtXentUnit { a: a.0, o: o.0, tau }, req))
    }

    /// Backpropagate from a 1x1 loss node.
    pub fn backward(&mut self, loss: Var) -> Result<()> {
        let shape = self.nodes[loss.0].value.shape();
        if shape != (1, 1) {
            return Err(Error::Dim {
                op: "backward",
                lhs: shape,
                rhs: (1, 1),
            });
        }
        self.nodes[loss.0].grad.set(0, 0, 1.0);
        for i in (0..=loss.0).rev() {
            if !self.nodes[i].requires_grad {
                continue;
            }
            let op = self.nodes[i].op.clone();
            match op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    let g = self.nodes[i].grad.clone();
                    if self.nodes[a].requires_grad {
                        let ga = g.matmul(&self.nodes[b].value.transpose())?;
                        self.nodes[a].grad.add_assign(&ga);
                    }
                    if self.nodes[b].requires_grad {
                        let gb = self.nodes[a].value.transpose().matmul(&g)?;
                        self.nodes[b].grad.add_assign(&gb);
                    }
                }
                Op::SpmmSym(m, x) => {
                    if self.nodes[x].requires_grad {
                        // A symmetric, so A^T g = A g.
                        let gx = m.matmul_dense(&self.nodes[i].grad)?;
                        self.nodes[x].grad.add_assign(&gx);
                    }
                }
                Op::Relu(a) => {
                    if self.nodes[a].requires_grad {
                        let mask: Vec<f64> = self.nodes[a]
                            .value
                            .data()
                            .iter()
                            .zip(self.nodes[i].grad.data())
                            .map(|(&x, &g)| if x > 0.0 { g } else { 0.0 })
                            .collect();
                        let (r, c) = self.nodes[a].value.shape();
                        self.nodes[a].grad.add_assign(&Tensor::from_vec(r, c, mask));
                    }
                }
                Op::RowL2Normalize(a) => {
                    if self.nodes[a].requires_grad {
                        let (r, c) = self.nodes[a].value.shape();
                        let mut ga = Tensor::zeros(r, c);
                        for row in 0..r {
                            let x = self.nodes[a].value.row(row);
                            let y = self.nodes[i].value.row(row);
                            let g = self.nodes[i].grad.row(row);
                            let norm = row_norm(x);
                            let dot: f64 = g.iter().zip(y).map(|(gi, yi)| gi * yi).sum();
                            let out = ga.row_mut(row);
                            for j in 0..c {
                                out[j] = (g[j] - dot * y[j]) / norm;
                            }
                        }
                        self.nodes[a].grad.add_assign(&ga);
                    }
                }
                Op::MeanRows(a) => {
                    if self.nodes[a].requires_grad {
                        let (r, c) = self.nodes[a].value.shape();
                        let g = self.nodes[i].grad.clone();
                        let inv = 1.0 / r as f64;
                        let mut ga = Tensor::zeros(r, c);
                        for row in 0..r {
                            let out = ga.row_mut(row);
                            for j in 0..c {
                                out[j] = g.get(0, j) * inv;
                            }
                        }
                        self.nodes[a].grad.add_assign(&ga);
                    }
                }
                Op::MaxRows(a, argmax) => {
                    if self.nodes[a].requires_grad {
                        let (r, c) = self.nodes[a].value.shape();
                        let g = self.nodes[i].grad.clone();
                        let mut ga = Tensor::zeros(r, c);
                        for (j, &row) in argmax.iter().enumerate() {
                            ga.set(row, j, g.get(0, j));
                        }
                        self.nodes[a].grad.add_assign(&ga);
                    }
                }
                Op::Add(a, b) => {
                    let g = self.nodes[i].grad.clone();
                    if self.nodes[a].requires_grad {
                        self.nodes[a].grad.add_assign(&g);
                    }
                    if self.nodes[b].requires_grad {
                        self.nodes[b].grad.add_assign(&g);
                    }
                }
                Op::Scale(a, c) => {
                    if self.nodes[a].requires_grad {
                        let ga = self.nodes[i].grad.scale(c);
                        self.nodes[a].grad.add_assign(&ga);
                    }
                }
                Op::ConcatRows(parts) => {
                    let g = self.nodes[i].grad.clone();
                    let mut offset = 0;
                    for p in parts {
                        let (r, c) = self.nodes[p].value.shape();
                        if self.nodes[p].requires_grad {
                            let mut gp = Tensor::zeros(r, c);
                            for row in 0..r {
                                gp.row_mut(row).copy_from_slice(g.row(offset + row));
                            }
                            self.nodes[p].grad.add_assign(&gp);
                        }
                        offset += r;
                    }
                }
                Op::NtXentUnit { a, o, tau } => {
                    let gscalar = self.nodes[i].grad.get(0, 0);
                    let (ga, go) =
                        nt_xent_backward(&self.nodes[a].value, &self.nodes[o].value, tau, gscalar)?;
                    if self.nodes[a].requires_grad {
                        self.nodes[a].grad.add_assign(&ga);
                    }
                    if self.nodes[o].requires_grad {
                        self.nodes[o].grad.add_assign(&go);
                    }
                }
            }
        }
        Ok(())
    }
}

fn row_norm(row: &[f64]) -> f64 {
    row.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Forward NT-Xent on unit-row batches. Returns (loss, per-anchor logD,
/// similarity matrices) so backward can reuse the computation pattern.
fn nt_xent_forward(a: &Tensor, o: &Tensor, tau: f64) -> Result<(f64, Vec<f64>, (Tensor, Tensor))> {
    let n = a.rows();
    let sa = a.matmul(&a.transpose())?;
    let so = a.matmul(&o.transpose())?;
    let mut log_d = vec![0.0; n];
    let mut loss = 0.0;
    for i in 0..n {
        // Stabilize with the max over all denominator terms.
        let mut m = f64::NEG_INFINITY;
        for k in 0..n {
            if k != i {
                m = m.max(sa.get(i, k) / tau);
            }
            m = m.max(so.get(i, k) / tau);
        }
        let mut sum = 0.0;
        for k in 0..n {
            if k != i {
                sum += (sa.get(i, k) / tau - m).exp();
            }
            sum += (so.get(i, k) / tau - m).exp();
        }
        log_d[i] = m + sum.ln();
        loss += log_d[i] - so.get(i, i) / tau;
    }
    Ok((loss / n as f64, log_d, (sa, so)))
}

fn nt_xent_backward(a: &Tensor, o: &Tensor, tau: f64, g: f64) -> Result<(Tensor, Tensor)> {
    let n = a.rows();
    let (_, log_d, (sa, so)) = nt_xent_forward(a, o, tau)?;
    let scale = g / (n as f64 * tau);
    let mut g_sa = Tensor::zeros(n, n);
    let mut g_so = Tensor::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            if k != i {
                g_sa.set(i, k, scale * (sa.get(i, k) / tau - log_d[i]).exp());
            }
            let mut v = scale * (so.get(i, k) / tau - log_d[i]).exp();
            if k == i {
                v -= scale;
            }
            g_so.set(i, k, v);
        }
    }
    // sa = a a^T  => grad_a += (g_sa + g_sa^T) a ; so = a o^T.
    let sym = g_sa.add(&g_sa.transpose())?;
    let mut ga = sym.matmul(a)?;
    ga.add_assign(&g_so.matmul(o)?);
    let go = g_so.transpose().matmul(a)?;
    Ok((ga, go))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_tensor(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Tensor {
        Tensor::from_vec(r, c, (0..r * c).map(|_| rng.gen_range(-1.0..1.0)).collect())
    }

    /// Central finite-difference check of d(sum of loss)/d(entries of input
    /// `which`), against the tape gradient. `f` rebuilds the graph from the
    /// inputs and returns the scalar loss var.
    fn grad_check<F>(inputs: &[Tensor], which: usize, f: F, tol: f64)
    where
        F: Fn(&mut Tape, &[Var]) -> Var,
    {
        let h = 1e-6;
        let mut tape = Tape::new();
        let vars: Vec<Var> = inputs.iter().map(|t| tape.leaf(t.clone())).collect();
        let loss = f(&mut tape, &vars);
        tape.backward(loss).unwrap();
        let analytic = tape.grad(vars[which]).clone();

        for idx in 0..inputs[which].data().len() {
            let eval = |delta: f64| -> f64 {
                let mut shifted: Vec<Tensor> = inputs.to_vec();
                shifted[which].data_mut()[idx] += delta;
                let mut t = Tape::new();
                let vs: Vec<Var> = shifted.iter().map(|x| t.leaf(x.clone())).collect();
                let l = f(&mut t, &vs);
                t.value(l).get(0, 0)
            };
            let fd = (eval(h) - eval(-h)) / (2.0 * h);
            let an = analytic.data()[idx];
            let denom = an.abs().max(fd.abs()).max(1e-4);
            assert!(
                ((an - fd) / denom).abs() < tol,
                "entry {idx}: analytic {an}, fd {fd}"
            );
        }
    }

    /// Sum all entries into a 1x1 loss via mean_rows + matmul with ones.
    fn sum_all(tape: &mut Tape, v: Var) -> Var {
        let (r, c) = tape.value(v).shape();
        let ones_left = tape.constant(Tensor::from_vec(1, r, vec![1.0; r]));
        let ones_right = tape.constant(Tensor::from_vec(c, 1, vec![1.0; c]));
        let row = tape.matmul(ones_left, v).unwrap();
        tape.matmul(row, ones_right).unwrap()
    }

    #[test]
    fn relu_forward() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::from_rows(&[vec![-1.0, 2.0]]));
        let y = tape.relu(x);
        assert_eq!(tape.value(y).data(), &[0.0, 2.0]);

        let neg = tape.leaf(Tensor::from_rows(&[vec![-3.0, -0.5]]));
        let z = tape.relu(neg);
        assert_eq!(tape.value(z).data(), &[0.0, 0.0]);
    }

    #[test]
    fn row_normalize_345() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::from_rows(&[vec![3.0, 4.0]]));
        let y = tape.row_l2_normalize(x).unwrap();
        assert!((tape.value(y).get(0, 0) - 0.6).abs() < 1e-15);
        assert!((tape.value(y).get(0, 1) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn row_normalize_idempotent_on_unit_rows() {
        let mut tape = Tape::new();
        let s = 1.0 / 2.0f64.sqrt();
        let x = tape.leaf(Tensor::from_rows(&[vec![s, s], vec![1.0, 0.0]]));
        let y = tape.row_l2_normalize(x).unwrap();
        for (a, b) in tape.value(y).data().iter().zip(tape.value(x).data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn row_normalize_degenerate() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::from_rows(&[vec![0.0, 0.0]]));
        assert!(matches!(
            tape.row_l2_normalize(x),
            Err(Error::DegenerateEmbedding { row: 0 })
        ));
    }

    #[test]
    fn mean_rows_hand() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::from_rows(&[vec![0.0, 0.0], vec![2.0, 4.0]]));
        let y = tape.mean_rows(x).unwrap();
        assert_eq!(tape.value(y).data(), &[1.0, 2.0]);

        let single = tape.leaf(Tensor::from_rows(&[vec![5.0, -1.0]]));
        let z = tape.mean_rows(single).unwrap();
        assert_eq!(tape.value(z).data(), &[5.0, -1.0]);
    }

    #[test]
    fn matmul_grad_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let a = rand_tensor(&mut rng, 3, 4);
        let b = rand_tensor(&mut rng, 4, 2);
        for which in 0..2 {
            grad_check(
                &[a.clone(), b.clone()],
                which,
                |t, vs| {
                    let c = t.matmul(vs[0], vs[1]).unwrap();
                    sum_all(t, c)
                },
                1e-6,
            );
        }
    }

    #[test]
    fn relu_grad_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        // Bounded away from the kink by at least 1e-3.
        let data: Vec<f64> = (0..12)
            .map(|_| {
                let v: f64 = rng.gen_range(1e-3..1.0);
                if rng.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let x = Tensor::from_vec(3, 4, data);
        grad_check(
            &[x],
            0,
            |t, vs| {
                let y = t.relu(vs[0]);
                sum_all(t, y)
            },
            1e-6,
        );
    }

    #[test]
    fn row_normalize_grad_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let x = rand_tensor(&mut rng, 4, 8);
        grad_check(
            &[x],
            0,
            |t, vs| {
                let y = t.row_l2_normalize(vs[0]).unwrap();
                // Weighted sum so the normalization Jacobian is exercised.
                let w = t.constant(Tensor::from_vec(8, 1, (0..8).map(|i| (i + 1) as f64).collect()));
                let s = t.matmul(y, w).unwrap();
                sum_all(t, s)
            },
            1e-6,
        );
    }

    #[test]
    fn mean_rows_grad_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let x = rand_tensor(&mut rng, 5, 3);
        grad_check(
            &[x],
            0,
            |t, vs| {
                let y = t.mean_rows(vs[0]).unwrap();
                sum_all(t, y)
            },
            1e-6,
        );
    }

    #[test]
    fn randomized_chain_grad_suite() {
        // End-to-end gradients through a small op chain, 100 trials.
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for trial in 0..100 {
            let r = rng.gen_range(2..5);
            let c = rng.gen_range(2..5);
            let x = rand_tensor(&mut rng, r, c);
            let w = rand_tensor(&mut rng, c, 3);
            let _ = trial;
            grad_check(
                &[x, w],
                rng.gen_range(0..2),
                |t, vs| {
                    let h = t.matmul(vs[0], vs[1]).unwrap();
                    let h = t.relu(h);
                    let m = t.mean_rows(h).unwrap();
                    sum_all(t, m)
                },
                1e-4,
            );
        }
    }

    #[test]
    fn spmm_matches_dense_and_grad() {
        let rows = vec![vec![(0, 0.5), (1, 0.5)], vec![(0, 0.5), (1, 0.5)]];
        let csr = Rc::new(CsrMatrix::from_rows(2, &rows));
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let x = rand_tensor(&mut rng, 2, 3);

        let mut tape = Tape::new();
        let xv = tape.leaf(x.clone());
        let y = tape.spmm_sym(csr.clone(), xv).unwrap();
        let dense = csr.to_dense().matmul(&x).unwrap();
        assert_eq!(tape.value(y), &dense);

        let csr2 = csr.clone();
        grad_check(
            &[x],
            0,
            move |t, vs| {
                let y = t.spmm_sym(csr2.clone(), vs[0]).unwrap();
                sum_all(t, y)
            },
            1e-6,
        );
    }

    #[test]
    fn nt_xent_single_pair_is_zero() {
        let mut tape = Tape::new();
        let a = tape.leaf(Tensor::from_rows(&[vec![1.0, 0.0]]));
        let o = tape.leaf(Tensor::from_rows(&[vec![0.0, 1.0]]));
        let l = tape.nt_xent_unit(a, o, 0.5).unwrap();
        assert_eq!(tape.value(l).get(0, 0), 0.0);
    }

    #[test]
    fn nt_xent_grad_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        let a = rand_tensor(&mut rng, 4, 3);
        let o = rand_tensor(&mut rng, 4, 3);
        for which in 0..2 {
            grad_check(
                &[a.clone(), o.clone()],
                which,
                |t, vs| {
                    let an = t.row_l2_normalize(vs[0]).unwrap();
                    let on = t.row_l2_normalize(vs[1]).unwrap();
                    t.nt_xent_unit(an, on, 0.5).unwrap()
                },
                1e-4,
            );
        }
    }

    #[test]
    fn nt_xent_stable_at_low_temperature() {
        let mut rng = ChaCha8Rng::seed_from_u64(49);
        let a = rand_tensor(&mut rng, 6, 4);
        let o = rand_tensor(&mut rng, 6, 4);
        let mut tape = Tape::new();
        let av = tape.leaf(a);
        let ov = tape.leaf(o);
        let an = tape.row_l2_normalize(av).unwrap();
        let on = tape.row_l2_normalize(ov).unwrap();
        let l = tape.nt_xent_unit(an, on, 0.01).unwrap();
        assert!(tape.value(l).get(0, 0).is_finite());
        tape.backward(l).unwrap();
        assert!(tape.grad(av).is_finite());
    }

    #[test]
    fn concat_and_max_rows_grads() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let a = rand_tensor(&mut rng, 2, 3);
        let b = rand_tensor(&mut rng, 3, 3);
        for which in 0..2 {
            grad_check(
                &[a.clone(), b.clone()],
                which,
                |t, vs| {
                    let c = t.concat_rows(&[vs[0], vs[1]]).unwrap();
                    let m = t.max_rows(c).unwrap();
                    sum_all(t, m)
                },
                1e-6,
            );
        }
    }
}
