//! The reconstructivity condition as a finite homogeneous linear system.
//!
//! For a step law gamma and an order n, the unknowns are the values
//! J(x_1..x_n) over G^n, and each lag tuple (l_1..l_n) contributes one
//! equation whose coefficient at J(x_1..x_n) is
//!
//!   sum over irreducible tuples (rho_1..rho_n) of
//!     (prod_i d_i) tr((gamma_hat(rho_1)^l_1 ⊗ ... ⊗ gamma_hat(rho_n)^l_n)
//!                     (rho_1(x_1) ⊗ ... ⊗ rho_n(x_n))).
//!
//! Fourier inversion collapses that coefficient to
//! prod_i |G| gamma^(*l_i)(x_i^-1), so the trace construction is always
//! cross-checked against that convolution form. The condition holds exactly
//! when the system has full column rank; lags beyond |G| add no new rows
//! because the span of the convolution powers stabilizes inside the group
//! algebra, which is why the lag bound defaults to |G| and witnesses are
//! audited out to 2|G|.

use num_complex::Complex64;
use serde::Serialize;

use crate::caps::{pow_u128, Caps};
use crate::error::{Error, Result};
use crate::fourier::fourier_transform;
use crate::linalg::ComplexMatrix;
use crate::repr::IrrepSet;
use crate::rng::SplitMix64;
use crate::scenery::GTensor;
use crate::walk::{multi_indices, StepDistribution};

/// Default relative pivot threshold for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Residual budget for null witnesses audited over the extended lag range.
pub const WITNESS_RESIDUAL_TOL: f64 = 1e-8;

/// Internal agreement required between the trace-built matrix and its
/// convolution-factorized form.
const CROSS_CHECK_TOL: f64 = 1e-10;

/// The lag-by-tuple coefficient matrix of the condition system. Rows run
/// over lag tuples in [1, lag_bound]^order with the first lag slowest;
/// columns run over G^order in the same tensor order as [`GTensor`].
#[derive(Debug, Clone)]
pub struct CoefficientMatrix {
    pub group: String,
    pub gamma: Vec<f64>,
    pub order: usize,
    pub lag_bound: usize,
    pub matrix: ComplexMatrix,
}

/// The convolution-factorized matrix: entry((l..), (x..)) =
/// prod_i |G| gamma^(*l_i)(x_i^-1). Row (l_1..l_n) is the flattened outer
/// product of the per-lag vectors, matching the column order of
/// [`build_coefficient_matrix`].
pub fn factorized_matrix(
    gamma: &StepDistribution,
    order: usize,
    lag_bound: usize,
    caps: &Caps,
) -> Result<ComplexMatrix> {
    if order == 0 || lag_bound == 0 {
        return Err(Error::Validation("order and lag bound must be >= 1".into()));
    }
    let group = gamma.group();
    let n = group.order();
    let rows = pow_u128(lag_bound, order);
    let cols = pow_u128(n, order);
    caps.check("coefficient matrix", rows.saturating_mul(cols))?;
    let (rows, cols) = (rows as usize, cols as usize);

    // c_l(x) = |G| gamma^(*l)(x^-1), one vector per lag.
    let mut per_lag: Vec<Vec<f64>> = Vec::with_capacity(lag_bound + 1);
    per_lag.push(Vec::new());
    for l in 1..=lag_bound {
        let conv = gamma.convolution_power(l as u32)?;
        per_lag.push((0..n).map(|x| n as f64 * conv[group.inv(x)]).collect());
    }

    let mut matrix = ComplexMatrix::zeros(rows, cols);
    for (row_idx, lag_tuple) in multi_indices(lag_bound, order).enumerate() {
        // Outer product of the per-lag vectors, first coordinate slowest.
        let mut row = vec![1.0f64];
        for &l0 in &lag_tuple {
            let factor = &per_lag[l0 + 1];
            let mut next = Vec::with_capacity(row.len() * n);
            for &r in &row {
                for &f in factor {
                    next.push(r * f);
                }
            }
            row = next;
        }
        for (col_idx, &v) in row.iter().enumerate() {
            matrix.set(row_idx, col_idx, Complex64::new(v, 0.0));
        }
    }
    Ok(matrix)
}

/// Builds the coefficient matrix by the trace formula over irreducible
/// tuples, then cross-checks it entrywise against [`factorized_matrix`]
/// before returning.
pub fn build_coefficient_matrix(
    set: &IrrepSet,
    gamma: &StepDistribution,
    order: usize,
    lag_bound: usize,
    caps: &Caps,
) -> Result<CoefficientMatrix> {
    if order == 0 || lag_bound == 0 {
        return Err(Error::Validation("order and lag bound must be >= 1".into()));
    }
    let group = set.group();
    if group.order() != gamma.group().order() || **group != **gamma.group() {
        return Err(Error::GroupMismatch);
    }
    let n = group.order();
    let rows_u = pow_u128(lag_bound, order);
    let cols_u = pow_u128(n, order);
    caps.check("coefficient matrix", rows_u.saturating_mul(cols_u))?;
    let (rows, cols) = (rows_u as usize, cols_u as usize);

    // gamma_hat(rho)^l for every irreducible and every lag.
    let gamma_fn = gamma.to_gfunction();
    let mut powers: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(set.len());
    for rep in set.reps() {
        let base = fourier_transform(&gamma_fn, rep)?;
        let mut per_rep = vec![ComplexMatrix::identity(rep.degree)];
        let mut current = base.clone();
        per_rep.push(current.clone());
        for _ in 2..=lag_bound {
            current = current.matmul(&base)?;
            per_rep.push(current.clone());
        }
        powers.push(per_rep);
    }

    let mut matrix = ComplexMatrix::zeros(rows, cols);
    let mut x_tuple = vec![0usize; order];
    for rho in multi_indices(set.len(), order) {
        let degree_product: usize = rho.iter().map(|&r| set.reps()[r].degree).product();

        // rho_1(x_1) ⊗ ... ⊗ rho_n(x_n), cached per column.
        let mut column_blocks: Vec<ComplexMatrix> = Vec::with_capacity(cols);
        for col in 0..cols {
            decode(col, n, &mut x_tuple);
            let mut block: Option<ComplexMatrix> = None;
            for (pos, &x) in x_tuple.iter().enumerate() {
                let factor = set.reps()[rho[pos]].at(x);
                block = Some(match block {
                    None => factor.clone(),
                    Some(b) => b.kron(factor),
                });
            }
            column_blocks.push(block.expect("order >= 1"));
        }

        for (row_idx, lag_tuple) in multi_indices(lag_bound, order).enumerate() {
            let mut power_block: Option<ComplexMatrix> = None;
            for (pos, &r) in rho.iter().enumerate() {
                let factor = &powers[r][lag_tuple[pos] + 1];
                power_block = Some(match power_block {
                    None => factor.clone(),
                    Some(b) => b.kron(factor),
                });
            }
            let power_block = power_block.expect("order >= 1");
            for (col_idx, block) in column_blocks.iter().enumerate() {
                let term = power_block.trace_of_product(block)? * degree_product as f64;
                let v = matrix.get(row_idx, col_idx) + term;
                matrix.set(row_idx, col_idx, v);
            }
        }
    }

    // The two constructions must agree; a gap here means a broken catalog.
    let audit = factorized_matrix(gamma, order, lag_bound, caps)?;
    let gap = matrix.sub(&audit)?.max_abs();
    if gap > CROSS_CHECK_TOL {
        return Err(Error::Validation(format!(
            "coefficient matrix cross-check failed (gap {gap:.3e})"
        )));
    }

    Ok(CoefficientMatrix {
        group: group.name().to_string(),
        gamma: gamma.probs().to_vec(),
        order,
        lag_bound,
        matrix,
    })
}

fn decode(mut index: usize, base: usize, tuple: &mut [usize]) {
    for slot in tuple.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
}

/// Upper bound on the rank of the condition system at any step law: counting
/// the on-or-below-diagonal coefficients after triangularizing every
/// gamma_hat block gives sum over irreducible tuples of D(D+1)/2 with
/// D = prod_i d_i, which collapses to (|G|^n + S^n) / 2 for S = sum_rho d_rho.
/// Strictly below |G|^n as soon as some degree exceeds 1.
pub fn theoretical_rank_bound(set: &IrrepSet, order: usize) -> u128 {
    let g = set.group().order() as u128;
    let s = set.degree_sum() as u128;
    (g.pow(order as u32) + s.pow(order as u32)) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionVerdict {
    ConditionHolds,
    ConditionFails,
}

/// Rank/nullity verdict for one (gamma, order) pair.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub group: String,
    pub gamma: Vec<f64>,
    pub order: usize,
    pub lag_bound: usize,
    pub tolerance: f64,
    pub column_count: usize,
    pub rank: usize,
    pub nullity: usize,
    pub theoretical_rank_bound: u64,
    pub verdict: ConditionVerdict,
    /// Residual of the returned null witness over all lag tuples with entries
    /// up to 2 * lag_bound; absent when the condition holds.
    pub witness_residual: Option<f64>,
}

/// Decides the condition for (gamma, order): builds the system at
/// `lag_bound` (default |G|), ranks it, and when rank-deficient audits one
/// null witness against the doubled lag range.
pub fn condition_report(
    set: &IrrepSet,
    gamma: &StepDistribution,
    order: usize,
    lag_bound: Option<usize>,
    tol: f64,
    caps: &Caps,
) -> Result<ConditionReport> {
    let lag_bound = lag_bound.unwrap_or_else(|| set.group().order());
    let cm = build_coefficient_matrix(set, gamma, order, lag_bound, caps)?;
    let (rank, basis) = cm.matrix.rank_nullspace(tol);
    let cols = cm.matrix.cols();
    let nullity = cols - rank;
    let witness_residual = if nullity > 0 {
        let witness = normalize_witness(&basis[0]);
        Some(audit_witness(gamma, order, lag_bound, &witness, caps)?)
    } else {
        None
    };
    Ok(ConditionReport {
        group: cm.group.clone(),
        gamma: cm.gamma.clone(),
        order,
        lag_bound,
        tolerance: tol,
        column_count: cols,
        rank,
        nullity,
        theoretical_rank_bound: theoretical_rank_bound(set, order) as u64,
        verdict: if nullity == 0 {
            ConditionVerdict::ConditionHolds
        } else {
            ConditionVerdict::ConditionFails
        },
        witness_residual,
    })
}

fn normalize_witness(v: &[Complex64]) -> Vec<Complex64> {
    let mut best = 0usize;
    let mut best_norm = 0.0f64;
    for (i, value) in v.iter().enumerate() {
        if value.norm() > best_norm {
            best = i;
            best_norm = value.norm();
        }
    }
    debug_assert!(best_norm > 0.0, "null basis vectors are never zero");
    let scale = v[best];
    v.iter().map(|x| x / scale).collect()
}

/// Max residual of the witness over every equation with lags in
/// [1, audit_lag_bound]^order, built through the convolution form.
fn audit_witness(
    gamma: &StepDistribution,
    order: usize,
    lag_bound: usize,
    witness: &[Complex64],
    caps: &Caps,
) -> Result<f64> {
    let audit_rows = factorized_matrix(gamma, order, 2 * lag_bound, caps)?;
    Ok(audit_rows.apply_max_abs(witness))
}

/// A nonzero solution of the full lag system, scaled so its largest entry is
/// exactly 1, or `None` when the condition holds. The residual over lags up
/// to 2|G| comes along as a certificate.
pub fn null_witness(
    set: &IrrepSet,
    gamma: &StepDistribution,
    order: usize,
    tol: f64,
    caps: &Caps,
) -> Result<Option<(GTensor, f64)>> {
    let lag_bound = set.group().order();
    let cm = build_coefficient_matrix(set, gamma, order, lag_bound, caps)?;
    let (rank, basis) = cm.matrix.rank_nullspace(tol);
    if rank == cm.matrix.cols() {
        return Ok(None);
    }
    let witness = normalize_witness(&basis[0]);
    let residual = audit_witness(gamma, order, lag_bound, &witness, caps)?;
    let mut tensor = GTensor::zeros(std::sync::Arc::clone(set.group()), order, caps)?;
    tensor.values_mut().copy_from_slice(&witness);
    Ok(Some((tensor, residual)))
}

/// One sampled step law inside a [`RankSurvey`].
#[derive(Debug, Clone, Serialize)]
pub struct SurveyTrial {
    pub gamma_label: String,
    pub rank: usize,
    pub nullity: usize,
    pub witness_residual: Option<f64>,
}

/// Rank statistics across many step laws on one non-abelian group: uniform,
/// every point mass, and seeded random laws. Every trial on a non-abelian
/// group should come back rank-deficient, with rank at most the theoretical
/// bound; the flags record whether that held.
#[derive(Debug, Clone, Serialize)]
pub struct RankSurvey {
    pub group: String,
    pub group_order: usize,
    pub order: usize,
    pub seed: u64,
    pub theoretical_rank_bound: u64,
    pub column_count: usize,
    pub trials: Vec<SurveyTrial>,
    pub min_rank: usize,
    pub max_rank: usize,
    pub all_condition_fails: bool,
    pub all_within_bound: bool,
}

/// Surveys the order-1 condition system over `random_trials` seeded random
/// laws plus the uniform law and every point mass. Rejects abelian groups:
/// there the condition can genuinely hold and the survey would be
/// meaningless.
pub fn rank_deficiency_survey(
    set: &IrrepSet,
    random_trials: usize,
    seed: u64,
    tol: f64,
    caps: &Caps,
) -> Result<RankSurvey> {
    let group = set.group();
    if group.is_abelian() {
        return Err(Error::Validation(format!(
            "rank survey needs a non-abelian group; {} is abelian",
            group.name()
        )));
    }
    let n = group.order();
    let bound = theoretical_rank_bound(set, 1) as u64;
    let mut rng = SplitMix64::new(seed);

    let mut gammas: Vec<(String, StepDistribution)> = Vec::new();
    gammas.push(("uniform".into(), StepDistribution::uniform(std::sync::Arc::clone(group))));
    for x in 0..n {
        gammas.push((
            format!("point:{x}"),
            StepDistribution::point_mass(std::sync::Arc::clone(group), x)?,
        ));
    }
    for t in 0..random_trials {
        gammas.push((
            format!("random:{t}"),
            StepDistribution::random(std::sync::Arc::clone(group), &mut rng),
        ));
    }

    let mut trials = Vec::with_capacity(gammas.len());
    let mut min_rank = usize::MAX;
    let mut max_rank = 0usize;
    let mut all_fail = true;
    let mut all_bounded = true;
    let mut column_count = 0;
    for (label, gamma) in gammas {
        let report = condition_report(set, &gamma, 1, None, tol, caps)?;
        min_rank = min_rank.min(report.rank);
        max_rank = max_rank.max(report.rank);
        all_fail &= report.verdict == ConditionVerdict::ConditionFails;
        all_bounded &= (report.rank as u64) <= bound;
        column_count = report.column_count;
        trials.push(SurveyTrial {
            gamma_label: label,
            rank: report.rank,
            nullity: report.nullity,
            witness_residual: report.witness_residual,
        });
    }

    Ok(RankSurvey {
        group: group.name().to_string(),
        group_order: n,
        order: 1,
        seed,
        theoretical_rank_bound: bound,
        column_count,
        trials,
        min_rank,
        max_rank,
        all_condition_fails: all_fail,
        all_within_bound: all_bounded,
    })
}
