#![allow(dead_code)]

use mmssl::solvers::{AlmState, ModalDictionary};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

pub fn uniform_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

/// `k` unit-column dictionaries sharing `n` atoms in one class, rows drawn from `rows`.
pub fn random_dicts(
    rng: &mut ChaCha8Rng,
    k: usize,
    rows: std::ops::RangeInclusive<usize>,
    n: usize,
) -> Vec<ModalDictionary<f64>> {
    (0..k)
        .map(|_| {
            let m = rng.random_range(rows.clone());
            ModalDictionary::normalized(uniform_matrix(rng, m, n), vec![0..n]).unwrap()
        })
        .collect()
}

/// Random K=3 problem used for the decoupling and convergence checks.
pub fn multimodal_instance(seed: u64) -> (Vec<ModalDictionary<f64>>, Vec<DVector<f64>>) {
    let mut r = rng(seed);
    let n = r.random_range(4..=10);
    let dicts = random_dicts(&mut r, 3, 3..=8, n);
    let ys = dicts.iter().map(|d| uniform_vector(&mut r, d.rows())).collect();
    (dicts, ys)
}

/// Solves the first-order conditions of the similar-part subproblem
///
/// `sum_k ||y_k - D_k (c_k + s_k)||^2 + tau sum_k ||c_k - mean(c)||^2
///  + sum_k (mu/2) ||c_k - r_k||^2 + z_k^T (c_k - r_k)`
///
/// as one dense `Kn x Kn` system.
pub fn stacked_alpha_c(
    dicts: &[DMatrix<f64>],
    ys: &[DVector<f64>],
    alpha_s: &[DVector<f64>],
    state: &AlmState<f64>,
    tau: f64,
) -> Vec<DVector<f64>> {
    let k = dicts.len();
    let n = dicts[0].ncols();
    let mut a = DMatrix::<f64>::zeros(k * n, k * n);
    let mut b = DVector::<f64>::zeros(k * n);
    for i in 0..k {
        let g = dicts[i].transpose() * &dicts[i];
        for l in 0..k {
            for r in 0..n {
                for c in 0..n {
                    let mut v = 0.0;
                    if i == l {
                        v += g[(r, c)];
                        if r == c {
                            v += state.mu / 2.0 + tau;
                        }
                    }
                    if r == c {
                        v -= tau / k as f64;
                    }
                    a[(i * n + r, l * n + c)] = v;
                }
            }
        }
        let rhs = dicts[i].transpose() * (&ys[i] - &dicts[i] * &alpha_s[i])
            + &state.relaxed[i] * (state.mu / 2.0)
            - &state.multipliers[i] / 2.0;
        b.rows_mut(i * n, n).copy_from(&rhs);
    }
    let x = a.lu().solve(&b).expect("stacked system is nonsingular");
    (0..k).map(|i| x.rows(i * n, n).into_owned()).collect()
}

/// AUC as the fraction of (positive, negative) pairs ranked correctly, ties half.
pub fn pairwise_auc(scores: &[f64], labels: &[usize]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (sp, lp) in scores.iter().zip(labels) {
        if *lp != 1 {
            continue;
        }
        for (sn, ln) in scores.iter().zip(labels) {
            if *ln != 0 {
                continue;
            }
            pairs += 1.0;
            if sp > sn {
                wins += 1.0;
            } else if sp == sn {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

pub fn relative_error(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_squared()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y.norm_squared()).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}
