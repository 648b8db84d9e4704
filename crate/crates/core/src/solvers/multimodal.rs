//! Alternating solver for the similar/specific multi-modal coding problem
//!
//! `sum_k ||y_k - D_k (c_k + s_k)||^2 + tau ||c_k - mean(c)||^2 + lambda (||c_k||_1 + ||s_k||_1)`.

use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector};

use super::alm::{coupled_update, precompute_pk_from_gram, precompute_q, update_alpha_c_relaxed, update_multiplier, AlmState};
use super::ipm::LassoIpm;
use super::linalg::{l1_norm, max_abs};
use super::{CoefficientPair, MmsslConfig, ModalDictionary};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Operators at one value of the ALM step.
#[derive(Debug)]
struct StepOperators<T: Real> {
    ps: Vec<DMatrix<T>>,
    q: DMatrix<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsslSolution<T: Real> {
    pub pairs: Vec<CoefficientPair<T>>,
    /// Final relaxed copies of the similar parts.
    pub relaxed: Vec<DVector<T>>,
    pub iterations: usize,
    pub converged: bool,
    pub objective: T,
    /// `max_k ||c_k - relaxed_k||_inf` after the last ALM step.
    pub primal_residual: T,
    pub mu: T,
}

/// Solver prepared for one set of dictionaries.
///
/// The ALM step follows a fixed schedule, so the per-step `P_k` and `Q` matrices
/// are shared by every sample solved against the same dictionaries.
#[derive(Debug)]
pub struct MmsslSolver<T: Real> {
    ipms: Vec<LassoIpm<T>>,
    config: MmsslConfig<T>,
    atoms: usize,
    cache: Mutex<Vec<Arc<StepOperators<T>>>>,
}

impl<T: Real> MmsslSolver<T> {
    pub fn new(dicts: &[ModalDictionary<T>], config: &MmsslConfig<T>) -> Result<Self> {
        config.validate()?;
        let first = dicts
            .first()
            .ok_or_else(|| Error::InvalidArgument("at least one dictionary is required".into()))?;
        let atoms = first.atoms();
        for (k, d) in dicts.iter().enumerate() {
            if d.atoms() != atoms {
                return Err(Error::DimensionMismatch(format!(
                    "dictionary {k} has {} atoms, dictionary 0 has {atoms}",
                    d.atoms()
                )));
            }
            if d.rows() == 0 || d.atoms() == 0 {
                return Err(Error::InvalidArgument(format!("dictionary {k} is empty")));
            }
        }
        let ipms = dicts
            .iter()
            .enumerate()
            .map(|(k, d)| LassoIpm::new(&d.matrix, config).map_err(|e| e.in_modality(format!("modality {k}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            ipms,
            config: config.clone(),
            atoms,
            cache: Mutex::new(Vec::new()),
        })
    }

    pub fn modalities(&self) -> usize {
        self.ipms.len()
    }

    pub fn config(&self) -> &MmsslConfig<T> {
        &self.config
    }

    fn mu_at(&self, step: usize) -> T {
        let mut mu = self.config.mu0;
        for _ in 0..step {
            mu *= self.config.mu_growth;
        }
        mu
    }

    fn build_operators(&self, mu: T) -> Result<StepOperators<T>> {
        let ps = self
            .ipms
            .iter()
            .map(|ipm| precompute_pk_from_gram(ipm.gram(), self.config.tau, mu))
            .collect::<Result<Vec<_>>>()?;
        let q = precompute_q(&ps, self.config.tau)?;
        Ok(StepOperators { ps, q })
    }

    fn operators(&self, step: usize) -> Result<Arc<StepOperators<T>>> {
        let limit = 4 * self.config.max_outer;
        if step >= limit {
            return Ok(Arc::new(self.build_operators(self.mu_at(step))?));
        }
        let mut cache = self.cache.lock().expect("operator cache poisoned");
        while cache.len() <= step {
            let mu = self.mu_at(cache.len());
            cache.push(Arc::new(self.build_operators(mu)?));
        }
        Ok(Arc::clone(&cache[step]))
    }

    pub fn solve(&self, ys: &[DVector<T>]) -> Result<MmsslSolution<T>> {
        let k = self.ipms.len();
        if ys.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "{k} dictionaries but {} sample vectors",
                ys.len()
            )));
        }
        for (i, (y, ipm)) in ys.iter().zip(&self.ipms).enumerate() {
            if y.len() != ipm.dictionary().nrows() {
                return Err(Error::DimensionMismatch(format!(
                    "modality {i}: sample has {} entries, dictionary has {} rows",
                    y.len(),
                    ipm.dictionary().nrows()
                )));
            }
        }
        let cfg = &self.config;
        let n = self.atoms;
        let dty: Vec<DVector<T>> = ys
            .iter()
            .zip(&self.ipms)
            .map(|(y, ipm)| ipm.dictionary().transpose() * y)
            .collect();

        let mut pairs = vec![CoefficientPair::zeros(n); k];
        let mut state = AlmState::new(k, n, cfg.mu0);
        let mut step = 0usize;
        let mut prev_obj = self.objective(ys, &pairs);
        let mut objective = prev_obj;
        let mut residual = T::zero();
        let mut iterations = 0;
        let mut converged = false;

        for it in 1..=cfg.max_outer {
            iterations = it;
            let mut alm_steps = 0;
            if cfg.alm_inner_loop {
                // each similar-part solve runs its own step schedule; multipliers carry over
                state.mu = cfg.mu0;
                step = 0;
            }
            let rhs: Vec<DVector<T>> = (0..k)
                .map(|i| &dty[i] - self.ipms[i].gram() * &pairs[i].alpha_s)
                .collect();
            loop {
                let ops = self.operators(step)?;
                let alpha_c = coupled_update(&ops.ps, &ops.q, &rhs, &state, cfg.tau);
                let relaxed = alpha_c
                    .iter()
                    .zip(&state.multipliers)
                    .map(|(c, z)| update_alpha_c_relaxed(c, z, state.mu, cfg.lambda))
                    .collect::<Result<Vec<_>>>()?;
                update_multiplier(&mut state, &alpha_c, &relaxed, cfg.mu_growth);
                step += 1;
                residual = alpha_c
                    .iter()
                    .zip(&relaxed)
                    .fold(T::zero(), |acc, (c, r)| acc.max(max_abs(&(c - r))));
                for (pair, c) in pairs.iter_mut().zip(alpha_c) {
                    pair.alpha_c = c;
                }
                state.relaxed = relaxed;
                alm_steps += 1;
                if !cfg.alm_inner_loop || residual < cfg.tol_outer || alm_steps >= cfg.max_outer {
                    break;
                }
            }

            for (i, pair) in pairs.iter_mut().enumerate() {
                let out = self.ipms[i]
                    .solve(&ys[i], &pair.alpha_c, cfg.lambda, Some(&pair.alpha_s))
                    .map_err(|e| e.in_modality(format!("modality {i}")))?;
                pair.alpha_s = out.alpha;
            }

            objective = self.objective(ys, &pairs);
            if !objective.is_finite_value() {
                return Err(Error::NonFinite("objective".into()));
            }
            if (objective - prev_obj).abs() < cfg.tol_outer && residual < cfg.tol_outer {
                converged = true;
                break;
            }
            prev_obj = objective;
        }

        Ok(MmsslSolution {
            pairs,
            relaxed: state.relaxed,
            iterations,
            converged,
            objective,
            primal_residual: residual,
            mu: state.mu,
        })
    }

    fn objective(&self, ys: &[DVector<T>], pairs: &[CoefficientPair<T>]) -> T {
        let dicts: Vec<&DMatrix<T>> = self.ipms.iter().map(|i| i.dictionary()).collect();
        objective_parts(&dicts, ys, pairs, self.config.tau, self.config.lambda)
    }
}

fn objective_parts<T: Real>(
    dicts: &[&DMatrix<T>],
    ys: &[DVector<T>],
    pairs: &[CoefficientPair<T>],
    tau: T,
    lambda: T,
) -> T {
    let mut total = T::zero();
    for ((d, y), p) in dicts.iter().zip(ys).zip(pairs) {
        total += (y - *d * p.combined()).norm_squared() + lambda * (l1_norm(&p.alpha_c) + l1_norm(&p.alpha_s));
    }
    total + tau * similarity_spread(pairs)
}

/// The full multi-modal objective at the given coefficients.
pub fn mmssl_objective<T: Real>(
    dicts: &[ModalDictionary<T>],
    ys: &[DVector<T>],
    pairs: &[CoefficientPair<T>],
    tau: T,
    lambda: T,
) -> T {
    let mats: Vec<&DMatrix<T>> = dicts.iter().map(|d| &d.matrix).collect();
    objective_parts(&mats, ys, pairs, tau, lambda)
}

/// `sum_k ||c_k - mean(c)||^2` over the similar parts.
pub fn similarity_spread<T: Real>(pairs: &[CoefficientPair<T>]) -> T {
    let Some(first) = pairs.first() else {
        return T::zero();
    };
    let mut mean = DVector::zeros(first.alpha_c.len());
    for p in pairs {
        mean += &p.alpha_c;
    }
    mean /= T::from_count(pairs.len());
    pairs
        .iter()
        .fold(T::zero(), |acc, p| acc + (&p.alpha_c - &mean).norm_squared())
}

/// Solves one multi-modal sample from zero initial coefficients.
pub fn mmssl_solve<T: Real>(
    dicts: &[ModalDictionary<T>],
    ys: &[DVector<T>],
    config: &MmsslConfig<T>,
) -> Result<MmsslSolution<T>> {
    MmsslSolver::new(dicts, config)?.solve(ys)
}
