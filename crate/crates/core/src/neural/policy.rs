use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::nn::{log_softmax_masked, Tape, Tensor2, Var};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectMode {
    Sample,
    Greedy,
}

/// A full ordering of the ready set with its log-probability and the summed
/// entropy of every sub-selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Indices into the ready list, in scheduling order.
    pub order: Vec<usize>,
    pub log_prob: f64,
    pub entropy: f64,
}

/// Picks ready tasks one at a time without replacement: at each sub-step the
/// remaining tasks get a masked softmax over their logits and one is
/// sampled (or the most likely one taken, lowest index on ties).
pub fn select_ordering<T: Scalar, R: Rng + ?Sized>(logits: &[T], mode: SelectMode, rng: &mut R) -> Selection {
    let k = logits.len();
    let mut mask = vec![true; k];
    let mut order = Vec::with_capacity(k);
    let mut log_prob = 0.0;
    let mut entropy = 0.0;
    for _ in 0..k {
        let lp: Vec<f64> = log_softmax_masked(logits, &mask)
            .expect("remaining set is non-empty")
            .into_iter()
            .map(|x| x.as_f64())
            .collect();
        entropy -= (0..k).filter(|&i| mask[i]).map(|i| lp[i].exp() * lp[i]).sum::<f64>();
        let pick = match mode {
            SelectMode::Greedy => (0..k)
                .filter(|&i| mask[i])
                .fold(None, |best: Option<usize>, i| match best {
                    Some(b) if logits[b] >= logits[i] => Some(b),
                    _ => Some(i),
                })
                .unwrap(),
            SelectMode::Sample => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut chosen = None;
                let mut last = 0;
                for i in (0..k).filter(|&i| mask[i]) {
                    acc += lp[i].exp();
                    last = i;
                    if u < acc {
                        chosen = Some(i);
                        break;
                    }
                }
                chosen.unwrap_or(last)
            }
        };
        log_prob += lp[pick];
        mask[pick] = false;
        order.push(pick);
    }
    Selection { order, log_prob, entropy }
}

/// Records `log P(order)` and the summed sub-step entropy of a
/// Plackett-Luce ordering on the tape. `logits` is a `1 x k` node.
pub fn ordering_log_prob<T: Scalar>(tape: &mut Tape<T>, logits: Var, order: &[usize]) -> (Var, Var) {
    let k = tape.value(logits).cols();
    assert_eq!(order.len(), k, "ordering must cover every ready task");
    let mut mask = vec![true; k];
    let mut lp_terms = Vec::with_capacity(k);
    let mut h_terms = Vec::with_capacity(k);
    for &pick in order {
        let lp = tape.log_softmax_masked(logits, &mask);
        lp_terms.push(tape.pick(lp, 0, pick));
        let remaining = mask.iter().filter(|&&m| m).count();
        if remaining > 1 {
            let m = tape.constant(Tensor2::row_vector(
                mask.iter().map(|&b| if b { T::one() } else { T::zero() }).collect(),
            ));
            let p = tape.exp(lp);
            let p = tape.mul(p, m);
            let plp = tape.mul(p, lp);
            let s = tape.sum(plp);
            h_terms.push(tape.scale(s, -T::one()));
        }
        mask[pick] = false;
    }
    let log_prob = sum_scalars(tape, &lp_terms);
    let entropy = sum_scalars(tape, &h_terms);
    (log_prob, entropy)
}

/// Sum of 1x1 nodes (zero for an empty list).
pub fn sum_scalars<T: Scalar>(tape: &mut Tape<T>, terms: &[Var]) -> Var {
    let mut groups = terms.iter().map(|&v| (v, 0)).collect::<Vec<_>>();
    groups.sort_unstable();
    tape.gather(1, vec![groups])
}
