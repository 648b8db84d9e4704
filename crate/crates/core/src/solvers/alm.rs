//! Augmented Lagrangian pieces of the similar-coefficient update.

use nalgebra::{DMatrix, DVector};

use super::linalg::{general_inverse, spd_inverse};
use super::threshold::soft_threshold;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relaxed copies, multipliers and step of the augmented Lagrangian.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmState<T: Real> {
    pub relaxed: Vec<DVector<T>>,
    pub multipliers: Vec<DVector<T>>,
    pub mu: T,
}

impl<T: Real> AlmState<T> {
    pub fn new(modalities: usize, atoms: usize, mu0: T) -> Self {
        Self {
            relaxed: vec![DVector::zeros(atoms); modalities],
            multipliers: vec![DVector::zeros(atoms); modalities],
            mu: mu0,
        }
    }
}

/// `(D^T D + (tau + mu/2) I)^{-1}`.
pub fn precompute_pk<T: Real>(d: &DMatrix<T>, tau: T, mu: T) -> Result<DMatrix<T>> {
    precompute_pk_from_gram(&(d.transpose() * d), tau, mu)
}

pub(crate) fn precompute_pk_from_gram<T: Real>(gram: &DMatrix<T>, tau: T, mu: T) -> Result<DMatrix<T>> {
    if !(mu > T::zero()) {
        return Err(Error::InvalidArgument(format!("mu must be positive, got {mu}")));
    }
    if !(tau >= T::zero()) {
        return Err(Error::InvalidArgument(format!("tau must be non-negative, got {tau}")));
    }
    let n = gram.nrows();
    let shift = tau + mu / T::lit(2.0);
    spd_inverse(gram + DMatrix::identity(n, n) * shift, "P_k system")
}

/// `(I - (tau/K) sum_k P_k)^{-1}` with `K = ps.len()`.
pub fn precompute_q<T: Real>(ps: &[DMatrix<T>], tau: T) -> Result<DMatrix<T>> {
    let first = ps
        .first()
        .ok_or_else(|| Error::InvalidArgument("no P_k matrices".into()))?;
    let n = first.nrows();
    if ps.iter().any(|p| p.shape() != (n, n)) {
        return Err(Error::DimensionMismatch(
            "all P_k must share one square dimension".into(),
        ));
    }
    let mut sum = DMatrix::zeros(n, n);
    for p in ps {
        sum += p;
    }
    let scale = tau / T::from_count(ps.len());
    general_inverse(DMatrix::identity(n, n) - sum * scale, "Q system")
}

/// Closed-form coupled update of every modality's similar part.
///
/// `alpha_c_k = a0_k + (tau/K) P_k Q sum_eta a0_eta` where
/// `a0_k = P_k (D_k^T (y_k - D_k alpha_s_k) + (mu/2) relaxed_k - z_k / 2)`.
pub fn update_alpha_c<T: Real>(
    dicts: &[DMatrix<T>],
    ys: &[DVector<T>],
    alpha_s: &[DVector<T>],
    state: &AlmState<T>,
    tau: T,
) -> Result<Vec<DVector<T>>> {
    let k = dicts.len();
    if k == 0 {
        return Err(Error::InvalidArgument("no dictionaries".into()));
    }
    if ys.len() != k || alpha_s.len() != k || state.relaxed.len() != k || state.multipliers.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "{k} dictionaries but {} samples, {} specific parts, {} relaxed, {} multipliers",
            ys.len(),
            alpha_s.len(),
            state.relaxed.len(),
            state.multipliers.len()
        )));
    }
    let n = dicts[0].ncols();
    for (i, d) in dicts.iter().enumerate() {
        if d.ncols() != n
            || ys[i].len() != d.nrows()
            || alpha_s[i].len() != n
            || state.relaxed[i].len() != n
            || state.multipliers[i].len() != n
        {
            return Err(Error::DimensionMismatch(format!("modality {i} vectors do not match its dictionary")));
        }
    }
    let ps = dicts
        .iter()
        .map(|d| precompute_pk(d, tau, state.mu))
        .collect::<Result<Vec<_>>>()?;
    let q = precompute_q(&ps, tau)?;
    let rhs: Vec<DVector<T>> = (0..k)
        .map(|i| {
            let d = &dicts[i];
            d.transpose() * (&ys[i] - d * &alpha_s[i])
        })
        .collect();
    Ok(coupled_update(&ps, &q, &rhs, state, tau))
}

/// Shared tail of the closed form, given `rhs_k = D_k^T (y_k - D_k alpha_s_k)`.
pub(crate) fn coupled_update<T: Real>(
    ps: &[DMatrix<T>],
    q: &DMatrix<T>,
    rhs: &[DVector<T>],
    state: &AlmState<T>,
    tau: T,
) -> Vec<DVector<T>> {
    let half = T::lit(0.5);
    let k = ps.len();
    let base: Vec<DVector<T>> = (0..k)
        .map(|i| &ps[i] * (&rhs[i] + &state.relaxed[i] * (state.mu * half) - &state.multipliers[i] * half))
        .collect();
    if tau == T::zero() {
        return base;
    }
    let mut total = DVector::zeros(base[0].len());
    for b in &base {
        total += b;
    }
    let coupled = q * total * (tau / T::from_count(k));
    base.into_iter()
        .zip(ps)
        .map(|(b, p)| b + p * &coupled)
        .collect()
}

/// `soft_threshold(alpha_c + z / mu, lambda / mu)`.
pub fn update_alpha_c_relaxed<T: Real>(
    alpha_c: &DVector<T>,
    z: &DVector<T>,
    mu: T,
    lambda: T,
) -> Result<DVector<T>> {
    if !(mu > T::zero()) {
        return Err(Error::InvalidArgument(format!("mu must be positive, got {mu}")));
    }
    soft_threshold(&(alpha_c + z / mu), lambda / mu)
}

/// `z_k += mu (alpha_c_k - relaxed_k)` for every modality, then `mu *= growth`.
pub fn update_multiplier<T: Real>(
    state: &mut AlmState<T>,
    alpha_c: &[DVector<T>],
    relaxed: &[DVector<T>],
    growth: T,
) {
    for ((z, c), r) in state.multipliers.iter_mut().zip(alpha_c).zip(relaxed) {
        *z += (c - r) * state.mu;
    }
    state.mu *= growth;
}
