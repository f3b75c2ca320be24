//! Small neural-network substrate: tensors, dense layers, masked softmax,
//! a reverse-mode tape, Adam and a finite-difference gradient checker.

mod checkpoint;
mod layers;
mod tape;
mod tensor;

use thiserror::Error;

use crate::scalar::Scalar;

pub use checkpoint::{read_tensors, write_tensors, CHECKPOINT_HEADER};
pub use layers::{dense_forward, glorot_uniform, Activation, Dense, Mlp};
pub use tape::{log_softmax_masked, Tape, Var};
pub use tensor::Tensor2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("every entry is masked")]
    FullyMasked,
    #[error("checkpoint line {line}: {message}")]
    Checkpoint { line: usize, message: String },
}

/// Index of a tensor inside a [`ParamSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamId(pub usize);

/// Named learnable tensors with matching gradient buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet<T> {
    names: Vec<String>,
    values: Vec<Tensor2<T>>,
    grads: Vec<Tensor2<T>>,
    /// Seed the initial values were drawn with.
    pub seed: u64,
}

impl<T: Scalar> ParamSet<T> {
    pub fn new(seed: u64) -> Self {
        Self { names: Vec::new(), values: Vec::new(), grads: Vec::new(), seed }
    }

    pub fn add(&mut self, name: impl Into<String>, value: Tensor2<T>) -> ParamId {
        let name = name.into();
        assert!(!self.names.contains(&name), "duplicate parameter {name}");
        self.grads.push(Tensor2::zeros(value.rows(), value.cols()));
        self.values.push(value);
        self.names.push(name);
        ParamId(self.values.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.values.len()).map(ParamId)
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn find(&self, name: &str) -> Option<ParamId> {
        self.names.iter().position(|n| n == name).map(ParamId)
    }

    pub fn value(&self, id: ParamId) -> &Tensor2<T> {
        &self.values[id.0]
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut Tensor2<T> {
        &mut self.values[id.0]
    }

    pub fn grad(&self, id: ParamId) -> &Tensor2<T> {
        &self.grads[id.0]
    }

    pub fn grad_mut(&mut self, id: ParamId) -> &mut Tensor2<T> {
        &mut self.grads[id.0]
    }

    pub fn zero_grad(&mut self) {
        self.grads.iter_mut().for_each(|g| g.fill(T::zero()));
    }

    /// Total number of scalar parameters.
    pub fn size(&self) -> usize {
        self.values.iter().map(|v| v.as_slice().len()).sum()
    }

    /// Adds another set's gradients (same layout) into this one.
    pub fn accumulate_grads(&mut self, other: &Self) {
        for (g, o) in self.grads.iter_mut().zip(&other.grads) {
            g.add_assign(o);
        }
    }

    pub fn named_values(&self) -> impl Iterator<Item = (&str, &Tensor2<T>)> {
        self.names.iter().map(String::as_str).zip(&self.values)
    }

    /// Text checkpoint of names, shapes and values.
    pub fn to_text(&self) -> String {
        let mut out = format!("{CHECKPOINT_HEADER}\nseed {}\n", self.seed);
        out.push_str(&write_tensors(self.named_values()));
        out
    }

    /// Loads values saved by [`ParamSet::to_text`] into this (identically
    /// laid out) set.
    pub fn load_text(&mut self, text: &str) -> Result<(), NnError> {
        let mut lines = text.lines().enumerate();
        let bad = |line: usize, m: &str| NnError::Checkpoint { line: line + 1, message: m.to_string() };
        match lines.next() {
            Some((_, h)) if h == CHECKPOINT_HEADER => {}
            Some((i, h)) => return Err(bad(i, &format!("unsupported header {h:?}"))),
            None => return Err(bad(0, "empty checkpoint")),
        }
        let seed = match lines.next() {
            Some((i, l)) => l
                .strip_prefix("seed ")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(i, "expected seed line"))?,
            None => return Err(bad(1, "missing seed")),
        };
        let tensors = read_tensors::<T>(text, 2)?;
        if tensors.len() != self.len() {
            return Err(bad(2, &format!("{} tensors, expected {}", tensors.len(), self.len())));
        }
        for (id, (name, t)) in self.ids().zip(tensors) {
            if name != self.names[id.0] || t.shape() != self.values[id.0].shape() {
                return Err(bad(2, &format!("tensor {name} does not match the model layout")));
            }
            self.values[id.0] = t;
        }
        self.seed = seed;
        Ok(())
    }
}

/// Probabilities over the unmasked entries; masked entries are exactly 0.
pub fn softmax_masked<T: Scalar>(logits: &[T], mask: &[bool]) -> Result<Vec<T>, NnError> {
    if logits.len() != mask.len() {
        return Err(NnError::Shape(format!("{} logits, {} mask entries", logits.len(), mask.len())));
    }
    let lp = log_softmax_masked(logits, mask).ok_or(NnError::FullyMasked)?;
    Ok(lp.into_iter().zip(mask).map(|(l, &m)| if m { l.exp() } else { T::zero() }).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// Adaptive-moment optimizer state for one [`ParamSet`]. `step` descends
/// along the stored gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam<T> {
    pub config: AdamConfig,
    pub t: u64,
    m: Vec<Tensor2<T>>,
    v: Vec<Tensor2<T>>,
}

impl<T: Scalar> Adam<T> {
    pub fn new(params: &ParamSet<T>, config: AdamConfig) -> Self {
        let zeros: Vec<_> = params.values.iter().map(|p| Tensor2::zeros(p.rows(), p.cols())).collect();
        Self { config, t: 0, m: zeros.clone(), v: zeros }
    }

    pub fn step(&mut self, params: &mut ParamSet<T>) {
        self.t += 1;
        let c = self.config;
        let (b1, b2) = (T::of(c.beta1), T::of(c.beta2));
        let bc1 = T::one() - b1.powi(self.t as i32);
        let bc2 = T::one() - b2.powi(self.t as i32);
        let lr = T::of(c.lr);
        let eps = T::of(c.eps);
        for i in 0..params.values.len() {
            let g = params.grads[i].as_slice();
            let m = self.m[i].as_mut_slice();
            let v = self.v[i].as_mut_slice();
            let w = params.values[i].as_mut_slice();
            for k in 0..w.len() {
                m[k] = b1 * m[k] + (T::one() - b1) * g[k];
                v[k] = b2 * v[k] + (T::one() - b2) * g[k] * g[k];
                let mh = m[k] / bc1;
                let vh = v[k] / bc2;
                w[k] -= lr * mh / (vh.sqrt() + eps);
            }
        }
    }

    /// Moments and step count as checkpoint text.
    pub fn to_text(&self, params: &ParamSet<T>) -> String {
        let mut out = format!("{CHECKPOINT_HEADER}\nadam-step {}\n", self.t);
        let named =
            params.names.iter().flat_map(|n| [format!("m.{n}"), format!("v.{n}")]).collect::<Vec<_>>();
        let tensors = self.m.iter().zip(&self.v).flat_map(|(m, v)| [m, v]);
        out.push_str(&write_tensors(named.iter().map(String::as_str).zip(tensors)));
        out
    }

    pub fn load_text(&mut self, text: &str) -> Result<(), NnError> {
        let bad = |line: usize, m: &str| NnError::Checkpoint { line, message: m.to_string() };
        let mut lines = text.lines();
        if lines.next() != Some(CHECKPOINT_HEADER) {
            return Err(bad(1, "unsupported header"));
        }
        self.t = lines
            .next()
            .and_then(|l| l.strip_prefix("adam-step "))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(2, "expected adam-step line"))?;
        let tensors = read_tensors::<T>(text, 2)?;
        if tensors.len() != 2 * self.m.len() {
            return Err(bad(3, "optimizer state does not match the model"));
        }
        let mut it = tensors.into_iter();
        for i in 0..self.m.len() {
            let (_, m) = it.next().unwrap();
            let (_, v) = it.next().unwrap();
            if m.shape() != self.m[i].shape() || v.shape() != self.v[i].shape() {
                return Err(bad(3, "optimizer state shape mismatch"));
            }
            self.m[i] = m;
            self.v[i] = v;
        }
        Ok(())
    }
}

/// Per-parameter comparison of analytic and central-difference gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    /// Parameter name and the largest relative error over its entries.
    pub errors: Vec<(String, f64)>,
    pub tol: f64,
}

impl GradCheckReport {
    pub fn max_error(&self) -> f64 {
        self.errors.iter().map(|e| e.1).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_error() < self.tol
    }
}

/// Relative error with a floor on the denominator so entries whose true
/// gradient is ~0 are judged by absolute error.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Checks the gradients the tape computes for `loss` against central
/// finite differences with step `h`.
pub fn grad_check<T, F>(params: &ParamSet<T>, mut loss: F, h: f64, tol: f64) -> GradCheckReport
where
    T: Scalar,
    F: FnMut(&ParamSet<T>, &mut Tape<T>) -> Var,
{
    let mut analytic = params.clone();
    analytic.zero_grad();
    let mut tape = Tape::new();
    let l = loss(&analytic, &mut tape);
    tape.backward(l, &mut analytic);

    let mut probe = params.clone();
    let mut eval = |p: &ParamSet<T>| {
        let mut tape = Tape::new();
        let l = loss(p, &mut tape);
        tape.scalar(l).as_f64()
    };
    let mut errors = Vec::with_capacity(params.len());
    for id in params.ids() {
        let mut worst = 0.0f64;
        for k in 0..params.value(id).as_slice().len() {
            let x0 = params.value(id).as_slice()[k];
            probe.value_mut(id).as_mut_slice()[k] = x0 + T::of(h);
            let up = eval(&probe);
            probe.value_mut(id).as_mut_slice()[k] = x0 - T::of(h);
            let down = eval(&probe);
            probe.value_mut(id).as_mut_slice()[k] = x0;
            let numeric = (up - down) / (2.0 * h);
            let a = analytic.grad(id).as_slice()[k].as_f64();
            worst = worst.max(relative_error(a, numeric));
        }
        errors.push((params.name(id).to_string(), worst));
    }
    GradCheckReport { errors, tol }
}
