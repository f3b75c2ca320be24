use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

use super::tape::{Tape, Var};
use super::{NnError, ParamId, ParamSet, Tensor2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    pub fn apply<T: Scalar>(self, x: T) -> T {
        match self {
            Activation::Relu => x.max(T::zero()),
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }
}

/// `activation(x W + b)` without recording gradients.
pub fn dense_forward<T: Scalar>(
    x: &Tensor2<T>,
    w: &Tensor2<T>,
    b: &Tensor2<T>,
    act: Activation,
) -> Result<Tensor2<T>, NnError> {
    if b.shape() != (1, w.cols()) {
        return Err(NnError::Shape(format!("bias {}x{} for {} outputs", b.rows(), b.cols(), w.cols())));
    }
    let mut y = x.matmul(w)?;
    for r in 0..y.rows() {
        for (v, &bb) in y.row_mut(r).iter_mut().zip(b.row(0)) {
            *v = act.apply(*v + bb);
        }
    }
    Ok(y)
}

/// Uniform in `±sqrt(6 / (fan_in + fan_out))`.
pub fn glorot_uniform<T: Scalar, R: Rng + ?Sized>(fan_in: usize, fan_out: usize, rng: &mut R) -> Tensor2<T> {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let data = (0..fan_in * fan_out).map(|_| T::of(rng.random_range(-limit..=limit))).collect();
    Tensor2::from_vec(fan_in, fan_out, data).expect("shape")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dense {
    pub w: ParamId,
    pub b: ParamId,
    pub act: Activation,
}

impl Dense {
    pub fn new<T: Scalar, R: Rng + ?Sized>(
        params: &mut ParamSet<T>,
        name: &str,
        fan_in: usize,
        fan_out: usize,
        act: Activation,
        rng: &mut R,
    ) -> Self {
        let w = params.add(format!("{name}.w"), glorot_uniform(fan_in, fan_out, rng));
        let b = params.add(format!("{name}.b"), Tensor2::zeros(1, fan_out));
        Self { w, b, act }
    }

    pub fn forward<T: Scalar>(&self, tape: &mut Tape<T>, params: &ParamSet<T>, x: Var) -> Var {
        let w = tape.param(params, self.w);
        let b = tape.param(params, self.b);
        let h = tape.matmul(x, w);
        let h = tape.add_row(h, b);
        tape.activate(h, self.act)
    }

    pub fn eval<T: Scalar>(&self, params: &ParamSet<T>, x: &Tensor2<T>) -> Tensor2<T> {
        dense_forward(x, params.value(self.w), params.value(self.b), self.act).expect("shape")
    }
}

/// Stack of dense layers: hidden layers share one activation, the last
/// layer has its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

impl Mlp {
    pub fn new<T: Scalar, R: Rng + ?Sized>(
        params: &mut ParamSet<T>,
        name: &str,
        sizes: &[usize],
        hidden: Activation,
        output: Activation,
        rng: &mut R,
    ) -> Self {
        assert!(sizes.len() >= 2, "an MLP needs input and output sizes");
        let n = sizes.len() - 1;
        let layers = (0..n)
            .map(|i| {
                let act = if i + 1 == n { output } else { hidden };
                Dense::new(params, &format!("{name}.{i}"), sizes[i], sizes[i + 1], act, rng)
            })
            .collect();
        Self { layers }
    }

    pub fn forward<T: Scalar>(&self, tape: &mut Tape<T>, params: &ParamSet<T>, x: Var) -> Var {
        self.layers.iter().fold(x, |h, l| l.forward(tape, params, h))
    }

    pub fn eval<T: Scalar>(&self, params: &ParamSet<T>, x: &Tensor2<T>) -> Tensor2<T> {
        let mut h = x.clone();
        for l in &self.layers {
            h = l.eval(params, &h);
        }
        h
    }
}
