//! Reference computations that do not share code paths with the crate.

use rand::Rng;
use skipcache::huffman::{CacheSelection, HuffmanTree};
use skipcache::model::{ExactSigmoid, Matrix, Model};
use skipcache::trainer::{Kernel, NodeCache, SharedModel};

/// Minimum of `sum(w_i * l_i)` over all binary prefix codes, found by
/// enumerating codeword-length vectors that satisfy the Kraft inequality.
/// Heavier words get shorter (or equal) codes in some optimum, so only
/// non-decreasing length vectors over the descending weights are tried.
pub fn min_weighted_code_length(weights: &[u64]) -> u64 {
    let n = weights.len();
    assert!(n >= 2);
    let mut w = weights.to_vec();
    w.sort_unstable_by(|a, b| b.cmp(a));
    let max_len = (n - 1) as u32;

    fn go(w: &[u64], lens: &mut Vec<u32>, min_len: u32, max_len: u32, best: &mut u64) {
        if lens.len() == w.len() {
            // Kraft: sum 2^-l <= 1, scaled by 2^max_len
            let kraft: u64 = lens.iter().map(|&l| 1u64 << (max_len - l)).sum();
            if kraft <= 1u64 << max_len {
                let cost = w.iter().zip(lens.iter()).map(|(&a, &l)| a * l as u64).sum();
                *best = (*best).min(cost);
            }
            return;
        }
        for l in min_len..=max_len {
            lens.push(l);
            go(w, lens, l, max_len, best);
            lens.pop();
        }
    }

    let mut best = u64::MAX;
    go(&w, &mut Vec::new(), 1, max_len, &mut best);
    best
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Hierarchical-softmax log-likelihood of one word path given a context
/// vector: `sum (1 - t) ln s(x.w) + t ln(1 - s(x.w))`.
pub fn log_likelihood(x: &[f64], weights: &[Vec<f64>], turns: &[u8]) -> f64 {
    weights
        .iter()
        .zip(turns)
        .map(|(w, &t)| {
            let f = sigmoid(x.iter().zip(w).map(|(a, b)| a * b).sum());
            if t == 0 {
                f.ln()
            } else {
                (1.0 - f).ln()
            }
        })
        .sum()
}

/// Central differences of `f` at `at`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, at: &[f64], step: f64) -> Vec<f64> {
    let mut p = at.to_vec();
    (0..at.len())
        .map(|i| {
            p[i] = at[i] + step;
            let up = f(&p);
            p[i] = at[i] - step;
            let down = f(&p);
            p[i] = at[i];
            (up - down) / (2.0 * step)
        })
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `||a - b|| / max(||a||, ||b||)`, with a small absolute allowance.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / (norm(a).max(norm(b)) + 1e-6)
}

/// Builds a random instance, applies one kernel update with learning rate
/// 1 and the exact sigmoid, and returns the worst relative error between
/// the applied updates and finite-difference gradients of the
/// log-likelihood.
pub fn gradient_check<R: Rng>(rng: &mut R, vocab: usize, dim: usize, cache_nodes: usize) -> f64 {
    let counts: Vec<u64> = (0..vocab).map(|_| rng.gen_range(1..100)).collect();
    let mut counts = counts;
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let tree = HuffmanTree::from_counts(&counts).unwrap();
    let selection = CacheSelection::select(&tree, cache_nodes);

    let mut uniform = |n: usize| -> Vec<f32> { (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let model = Model {
        input_vectors: Matrix::from_vec(vocab, dim, uniform(vocab * dim)),
        node_weights: Matrix::from_vec(vocab - 1, dim, uniform((vocab - 1) * dim)),
    };
    let center = rng.gen_range(0..vocab) as u32;
    let context = rng.gen_range(0..vocab) as u32;

    let nodes = tree.path_nodes(center).to_vec();
    let turns = tree.path_turns(center).to_vec();
    let x0: Vec<f64> = model.input_vectors.row(context as usize).iter().map(|&v| v as f64).collect();
    let w0: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&n| model.node_weights.row(n as usize).iter().map(|&v| v as f64).collect())
        .collect();

    let shared = SharedModel::from(model.clone());
    let mut cache = NodeCache::new(selection.len(), dim, 1_000_000);
    let mut kernel = Kernel::new(ExactSigmoid, dim);
    kernel.train_pair(center, context, &tree, &selection, &shared, &mut cache, 1.0);
    cache.flush(&shared.node_weights);
    let after = shared.into_model();

    let step = 1e-4;
    let mut worst = 0.0f64;

    let applied_x: Vec<f64> = after
        .input_vectors
        .row(context as usize)
        .iter()
        .zip(&x0)
        .map(|(&new, old)| new as f64 - old)
        .collect();
    let fd_x = central_difference(|x| log_likelihood(x, &w0, &turns), &x0, step);
    worst = worst.max(relative_error(&applied_x, &fd_x));

    for (k, &n) in nodes.iter().enumerate() {
        let applied: Vec<f64> = after
            .node_weights
            .row(n as usize)
            .iter()
            .zip(&w0[k])
            .map(|(&new, old)| new as f64 - old)
            .collect();
        let fd = central_difference(
            |w| {
                let mut ws = w0.clone();
                ws[k] = w.to_vec();
                log_likelihood(&x0, &ws, &turns)
            },
            &w0[k],
            step,
        );
        worst = worst.max(relative_error(&applied, &fd));
    }

    // rows off the path must not move
    for n in 0..vocab - 1 {
        if !nodes.contains(&(n as u32)) {
            assert_eq!(after.node_weights.row(n), model.node_weights.row(n));
        }
    }
    worst
}
