//! Reverse-mode automatic differentiation over [`Tensor2`] values.

use crate::scalar::Scalar;

use super::layers::Activation;
use super::{ParamId, ParamSet, Tensor2};

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(usize);

#[derive(Debug, Clone)]
enum Op<T> {
    Const,
    Param(ParamId),
    MatMul(Var, Var),
    AddRow(Var, Var),
    Add(Var, Var),
    Mul(Var, Var),
    Scale(Var, T),
    Relu(Var),
    Tanh(Var),
    Exp(Var),
    Sum(Var),
    ConcatCols(Vec<Var>),
    Gather(Vec<Vec<(Var, usize)>>),
    LogSoftmaxMasked(Var, Vec<bool>),
    Pick(Var, usize, usize),
    Transpose(Var),
}

#[derive(Debug, Clone)]
struct Node<T> {
    value: Tensor2<T>,
    op: Op<T>,
}

/// Records a forward computation so gradients can be pulled back through
/// it. Shapes are checked with panics: a mismatch is a programming error in
/// the model, not a runtime condition.
#[derive(Debug, Clone, Default)]
pub struct Tape<T> {
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> Tape<T> {
    pub fn new() -> Self {
        Self { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor2<T> {
        &self.nodes[v.0].value
    }

    /// Value of a 1x1 node.
    pub fn scalar(&self, v: Var) -> T {
        let t = self.value(v);
        assert_eq!(t.shape(), (1, 1), "not a scalar");
        t[(0, 0)]
    }

    fn push(&mut self, value: Tensor2<T>, op: Op<T>) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn constant(&mut self, t: Tensor2<T>) -> Var {
        self.push(t, Op::Const)
    }

    pub fn param(&mut self, params: &ParamSet<T>, id: ParamId) -> Var {
        self.push(params.value(id).clone(), Op::Param(id))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let v = self.value(a).matmul(self.value(b)).expect("matmul shape");
        self.push(v, Op::MatMul(a, b))
    }

    /// Adds the 1xC row `b` to every row of `a`.
    pub fn add_row(&mut self, a: Var, b: Var) -> Var {
        let bv = self.value(b);
        assert_eq!(bv.rows(), 1);
        assert_eq!(bv.cols(), self.value(a).cols());
        let mut v = self.value(a).clone();
        let bv = self.value(b).row(0).to_vec();
        for r in 0..v.rows() {
            for (x, &y) in v.row_mut(r).iter_mut().zip(&bv) {
                *x += y;
            }
        }
        self.push(v, Op::AddRow(a, b))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.value(a).shape(), self.value(b).shape());
        let v = self.value(a).zip_map(self.value(b), |x, y| x + y);
        self.push(v, Op::Add(a, b))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        assert_eq!(self.value(a).shape(), self.value(b).shape());
        let v = self.value(a).zip_map(self.value(b), |x, y| x * y);
        self.push(v, Op::Mul(a, b))
    }

    pub fn scale(&mut self, a: Var, k: T) -> Var {
        let v = self.value(a).map(|x| x * k);
        self.push(v, Op::Scale(a, k))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let v = self.value(a).map(|x| x.max(T::zero()));
        self.push(v, Op::Relu(a))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let v = self.value(a).map(|x| x.tanh());
        self.push(v, Op::Tanh(a))
    }

    pub fn exp(&mut self, a: Var) -> Var {
        let v = self.value(a).map(|x| x.exp());
        self.push(v, Op::Exp(a))
    }

    pub fn activate(&mut self, a: Var, act: Activation) -> Var {
        match act {
            Activation::Relu => self.relu(a),
            Activation::Tanh => self.tanh(a),
            Activation::Identity => a,
        }
    }

    /// Sum of all entries, as a 1x1 value.
    pub fn sum(&mut self, a: Var) -> Var {
        let v = Tensor2::filled(1, 1, self.value(a).sum());
        self.push(v, Op::Sum(a))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        let rows = self.value(parts[0]).rows();
        assert!(parts.iter().all(|&p| self.value(p).rows() == rows));
        let cols: usize = parts.iter().map(|&p| self.value(p).cols()).sum();
        let mut v = Tensor2::zeros(rows, cols);
        for r in 0..rows {
            let mut c0 = 0;
            for &p in parts {
                let src = self.value(p).row(r);
                v.row_mut(r)[c0..c0 + src.len()].copy_from_slice(src);
                c0 += src.len();
            }
        }
        self.push(v, Op::ConcatCols(parts.to_vec()))
    }

    /// Output row `i` is the sum of the listed source rows of `groups[i]`
    /// (zero for an empty group). Each group is summed in sorted order so
    /// the result does not depend on how the caller listed it.
    pub fn gather(&mut self, cols: usize, groups: Vec<Vec<(Var, usize)>>) -> Var {
        let mut groups = groups;
        let mut v = Tensor2::zeros(groups.len(), cols);
        for (i, g) in groups.iter_mut().enumerate() {
            g.sort_unstable();
            for &(src, r) in g.iter() {
                let s = self.nodes[src.0].value.row(r);
                assert_eq!(s.len(), cols);
                for (o, &x) in v.row_mut(i).iter_mut().zip(s) {
                    *o += x;
                }
            }
        }
        self.push(v, Op::Gather(groups))
    }

    /// Row-wise log-softmax of a 1xN row over entries with `mask[i] ==
    /// true`; masked-out entries are exactly 0 in the output.
    pub fn log_softmax_masked(&mut self, a: Var, mask: &[bool]) -> Var {
        let x = self.value(a);
        assert_eq!(x.rows(), 1);
        assert_eq!(x.cols(), mask.len());
        let v = Tensor2::row_vector(log_softmax_masked(x.row(0), mask).expect("non-empty mask"));
        self.push(v, Op::LogSoftmaxMasked(a, mask.to_vec()))
    }

    pub fn transpose(&mut self, a: Var) -> Var {
        let v = self.value(a).transpose();
        self.push(v, Op::Transpose(a))
    }

    /// Entry `(r, c)` as a 1x1 value.
    pub fn pick(&mut self, a: Var, r: usize, c: usize) -> Var {
        let v = Tensor2::filled(1, 1, self.value(a)[(r, c)]);
        self.push(v, Op::Pick(a, r, c))
    }

    /// Pulls `d loss / d param` back from the 1x1 node `loss` and adds it to
    /// the gradient buffers of `params`.
    pub fn backward(&self, loss: Var, params: &mut ParamSet<T>) {
        let n = loss.0 + 1;
        let mut grads: Vec<Option<Tensor2<T>>> = vec![None; n];
        let lv = self.value(loss);
        grads[loss.0] = Some(Tensor2::filled(lv.rows(), lv.cols(), T::one()));

        fn acc<T: Scalar>(grads: &mut [Option<Tensor2<T>>], v: Var, g: Tensor2<T>) {
            match &mut grads[v.0] {
                Some(x) => x.add_assign(&g),
                slot => *slot = Some(g),
            }
        }

        for i in (0..n).rev() {
            let Some(g) = grads[i].take() else { continue };
            let node = &self.nodes[i];
            match &node.op {
                Op::Const => {}
                Op::Param(id) => params.grad_mut(*id).add_assign(&g),
                Op::MatMul(a, b) => {
                    let da = g.matmul(&self.value(*b).transpose()).unwrap();
                    let db = self.value(*a).transpose().matmul(&g).unwrap();
                    acc(&mut grads, *a, da);
                    acc(&mut grads, *b, db);
                }
                Op::AddRow(a, b) => {
                    let mut db = Tensor2::zeros(1, g.cols());
                    for r in 0..g.rows() {
                        for (d, &x) in db.row_mut(0).iter_mut().zip(g.row(r)) {
                            *d += x;
                        }
                    }
                    acc(&mut grads, *b, db);
                    acc(&mut grads, *a, g);
                }
                Op::Add(a, b) => {
                    acc(&mut grads, *b, g.clone());
                    acc(&mut grads, *a, g);
                }
                Op::Mul(a, b) => {
                    let da = g.zip_map(self.value(*b), |x, y| x * y);
                    let db = g.zip_map(self.value(*a), |x, y| x * y);
                    acc(&mut grads, *a, da);
                    acc(&mut grads, *b, db);
                }
                Op::Scale(a, k) => {
                    let k = *k;
                    acc(&mut grads, *a, g.map(|x| x * k));
                }
                Op::Relu(a) => {
                    let d = g.zip_map(self.value(*a), |x, y| if y > T::zero() { x } else { T::zero() });
                    acc(&mut grads, *a, d);
                }
                Op::Tanh(a) => {
                    let d = g.zip_map(&node.value, |x, y| x * (T::one() - y * y));
                    acc(&mut grads, *a, d);
                }
                Op::Exp(a) => {
                    let d = g.zip_map(&node.value, |x, y| x * y);
                    acc(&mut grads, *a, d);
                }
                Op::Sum(a) => {
                    let (r, c) = self.value(*a).shape();
                    acc(&mut grads, *a, Tensor2::filled(r, c, g[(0, 0)]));
                }
                Op::ConcatCols(parts) => {
                    let mut c0 = 0;
                    for &p in parts {
                        let (r, c) = self.value(p).shape();
                        let mut d = Tensor2::zeros(r, c);
                        for row in 0..r {
                            d.row_mut(row).copy_from_slice(&g.row(row)[c0..c0 + c]);
                        }
                        c0 += c;
                        acc(&mut grads, p, d);
                    }
                }
                Op::Gather(groups) => {
                    for (i, grp) in groups.iter().enumerate() {
                        for &(src, r) in grp {
                            let slot = grads[src.0].get_or_insert_with(|| {
                                let (rr, cc) = self.value(src).shape();
                                Tensor2::zeros(rr, cc)
                            });
                            for (d, &x) in slot.row_mut(r).iter_mut().zip(g.row(i)) {
                                *d += x;
                            }
                        }
                    }
                }
                Op::LogSoftmaxMasked(a, mask) => {
                    let y = node.value.row(0);
                    let gs = g.row(0);
                    let total: T = gs.iter().zip(mask).filter(|(_, &m)| m).map(|(&x, _)| x).sum();
                    let d: Vec<T> = (0..mask.len())
                        .map(|i| if mask[i] { gs[i] - y[i].exp() * total } else { T::zero() })
                        .collect();
                    acc(&mut grads, *a, Tensor2::row_vector(d));
                }
                Op::Transpose(a) => acc(&mut grads, *a, g.transpose()),
                Op::Pick(a, r, c) => {
                    let (rr, cc) = self.value(*a).shape();
                    let mut d = Tensor2::zeros(rr, cc);
                    d[(*r, *c)] = g[(0, 0)];
                    acc(&mut grads, *a, d);
                }
            }
        }
    }
}

/// Log-softmax over the unmasked entries; masked entries are 0. `None` when
/// every entry is masked.
pub fn log_softmax_masked<T: Scalar>(logits: &[T], mask: &[bool]) -> Option<Vec<T>> {
    let max = logits
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(&x, _)| x)
        .fold(None, |acc: Option<T>, x| Some(acc.map_or(x, |a| a.max(x))))?;
    let sum: T = logits.iter().zip(mask).filter(|(_, &m)| m).map(|(&x, _)| (x - max).exp()).sum();
    let lse = max + sum.ln();
    Some(logits.iter().zip(mask).map(|(&x, &m)| if m { x - lse } else { T::zero() }).collect())
}
