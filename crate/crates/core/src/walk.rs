//! Temporal statistics of a random walk observed through a scenery: the
//! autocorrelation b_f and multispectrum B_f along two independent routes
//! (direct summation against convolution powers, and the trace formula over
//! the irreducibles), exact observation-pattern distributions, and a bounded
//! distinguishability oracle for scenery pairs.
//!
//! The walk is v(t+1) = Z_t v(t) with i.i.d. steps Z_t ~ gamma and v(1)
//! uniform; the uniform law is stationary for every step law, so every
//! statistic here is start-time invariant.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::caps::{pow_u128, Caps};
use crate::error::{Error, Result};
use crate::fourier::{convolution_power, fourier_transform, GFunction};
use crate::group::FiniteGroup;
use crate::linalg::ComplexMatrix;
use crate::repr::IrrepSet;
use crate::rng::SplitMix64;
use crate::scenery::{multispectrum, spatial_autocorrelation, Scenery};

/// Absolute tolerance used when comparing pattern probabilities and moments.
pub const DISTRIBUTION_TOL: f64 = 1e-10;

/// A probability vector over the group: the step law of the walk.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    group: Arc<FiniteGroup>,
    probs: Vec<f64>,
}

impl StepDistribution {
    pub fn new(group: Arc<FiniteGroup>, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != group.order() {
            return Err(Error::InvalidDistribution(format!(
                "{} probabilities for a group of order {}",
                probs.len(),
                group.order()
            )));
        }
        if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::InvalidDistribution(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(StepDistribution { group, probs })
    }

    pub fn uniform(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        StepDistribution {
            group,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(group: Arc<FiniteGroup>, element: usize) -> Result<Self> {
        if element >= group.order() {
            return Err(Error::IndexOutOfRange {
                index: element,
                order: group.order(),
            });
        }
        let mut probs = vec![0.0; group.order()];
        probs[element] = 1.0;
        Ok(StepDistribution { group, probs })
    }

    /// A strictly positive generic law: normalized squared standard normals.
    pub fn random(group: Arc<FiniteGroup>, rng: &mut SplitMix64) -> Self {
        let raw: Vec<f64> = (0..group.order())
            .map(|_| {
                let g = rng.next_gaussian();
                g * g
            })
            .collect();
        let total: f64 = raw.iter().sum();
        StepDistribution {
            group,
            probs: raw.iter().map(|x| x / total).collect(),
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn to_gfunction(&self) -> GFunction {
        GFunction::from_real(Arc::clone(&self.group), &self.probs).expect("length matches")
    }

    /// gamma^(*l) as a real vector, l >= 1.
    pub fn convolution_power(&self, l: u32) -> Result<Vec<f64>> {
        let conv = convolution_power(&self.to_gfunction(), l)?;
        Ok(conv.values().iter().map(|v| v.re).collect())
    }
}

fn check_same_group(f: &Scenery, gamma: &StepDistribution) -> Result<()> {
    if !Arc::ptr_eq(f.group(), gamma.group()) && **f.group() != **gamma.group() {
        return Err(Error::GroupMismatch);
    }
    Ok(())
}

/// Convolution powers for every lag in 1..=max, index l holds gamma^(*l).
fn convolution_powers_up_to(gamma: &StepDistribution, max: u32) -> Result<Vec<Vec<f64>>> {
    let mut out = vec![Vec::new(); (max + 1) as usize];
    let g = gamma.to_gfunction();
    let mut current = g.clone();
    for l in 1..=max {
        if l > 1 {
            current = crate::fourier::convolve(&g, &current)?;
        }
        out[l as usize] = current.values().iter().map(|v| v.re).collect();
    }
    Ok(out)
}

/// b_f(lag) = E f(v(T)) f(v(T+lag)) computed by the direct route
/// (1/|G|) sum_x a_f(x) gamma^(*lag)(x).
pub fn temporal_autocorrelation_direct(
    f: &Scenery,
    gamma: &StepDistribution,
    lag: u32,
) -> Result<f64> {
    check_same_group(f, gamma)?;
    if lag == 0 {
        return Err(Error::Validation("lag must be >= 1".into()));
    }
    let a = spatial_autocorrelation(f);
    let conv = gamma.convolution_power(lag)?;
    let n = f.group().order() as f64;
    Ok(a.values()
        .iter()
        .zip(&conv)
        .map(|(av, cv)| av.re * cv)
        .sum::<f64>()
        / n)
}

/// The same quantity along the spectral route
/// (1/|G|^2) sum_rho d_rho tr(gamma_hat(rho)^lag h_hat(rho)), h(s) = a_f(s^-1).
pub fn temporal_autocorrelation_spectral(
    f: &Scenery,
    gamma: &StepDistribution,
    lag: u32,
    set: &IrrepSet,
) -> Result<f64> {
    check_same_group(f, gamma)?;
    if lag == 0 {
        return Err(Error::Validation("lag must be >= 1".into()));
    }
    let h = spatial_autocorrelation(f).to_gfunction()?.flip();
    let gamma_fn = gamma.to_gfunction();
    let mut acc = Complex64::new(0.0, 0.0);
    for rep in set.reps() {
        let gamma_hat = fourier_transform(&gamma_fn, rep)?;
        let h_hat = fourier_transform(&h, rep)?;
        let powered = gamma_hat.mat_power(lag)?;
        acc += powered.trace_of_product(&h_hat)? * rep.degree as f64;
    }
    let n = f.group().order() as f64;
    Ok((acc / (n * n)).re)
}

/// B_f(lags) = E prod_j f(v(T + lag_1 + ... + lag_j)) (including the factor
/// at T itself), via (1/|G|) sum over G^n of A_f against the per-coordinate
/// convolution powers.
pub fn temporal_multispectrum_direct(
    f: &Scenery,
    gamma: &StepDistribution,
    lags: &[u32],
    caps: &Caps,
) -> Result<f64> {
    check_same_group(f, gamma)?;
    validate_lags(lags)?;
    let n = lags.len();
    let a = multispectrum(f, n, caps)?;
    let max_lag = *lags.iter().max().expect("non-empty");
    let convs = convolution_powers_up_to(gamma, max_lag)?;
    let order = f.group().order();
    Ok(contract_tensor(a.values(), &convs, lags, order, 0, 0, 1.0) / order as f64)
}

/// sum over G^n of tensor(x_1..x_n) prod_i gamma^(*l_i)(x_i), walking the
/// flat tensor once and multiplying weights as the odometer advances.
fn contract_tensor(
    values: &[Complex64],
    convs: &[Vec<f64>],
    lags: &[u32],
    order: usize,
    level: usize,
    base: usize,
    weight: f64,
) -> f64 {
    let conv = &convs[lags[level] as usize];
    let mut acc = 0.0;
    for x in 0..order {
        let w = weight * conv[x];
        let idx = base * order + x;
        if level + 1 == lags.len() {
            acc += values[idx].re * w;
        } else if w != 0.0 {
            acc += contract_tensor(values, convs, lags, order, level + 1, idx, w);
        }
    }
    acc
}

fn validate_lags(lags: &[u32]) -> Result<()> {
    if lags.is_empty() {
        return Err(Error::Validation("at least one lag is required".into()));
    }
    if lags.contains(&0) {
        return Err(Error::Validation("lags must be >= 1".into()));
    }
    Ok(())
}

/// Iterates multi-indices in (0..radix)^len, lexicographically.
pub(crate) fn multi_indices(radix: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = pow_u128(radix, len).min(u128::from(u64::MAX)) as u64;
    (0..total).map(move |mut i| {
        let mut tuple = vec![0usize; len];
        for slot in tuple.iter_mut().rev() {
            *slot = (i % radix as u64) as usize;
            i /= radix as u64;
        }
        tuple
    })
}

/// B_f(lags) through the trace formula over tuples of irreducibles:
/// (1/|G|^(n+1)) sum (prod d_i) tr((gamma_hat^l_1 ⊗ ... ⊗ gamma_hat^l_n)
/// H_hat), with H the argument-flipped multispectrum of f.
pub fn temporal_multispectrum_spectral(
    f: &Scenery,
    gamma: &StepDistribution,
    lags: &[u32],
    set: &IrrepSet,
    caps: &Caps,
) -> Result<f64> {
    check_same_group(f, gamma)?;
    validate_lags(lags)?;
    let n = lags.len();
    let group = f.group();
    let order = group.order();
    let h = multispectrum(f, n, caps)?.flip_arguments();

    // gamma_hat powers per irreducible, up to the largest requested lag.
    let gamma_fn = gamma.to_gfunction();
    let max_lag = *lags.iter().max().expect("non-empty") as usize;
    let mut powers: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(set.len());
    for rep in set.reps() {
        let base = fourier_transform(&gamma_fn, rep)?;
        let mut per_rep = Vec::with_capacity(max_lag + 1);
        per_rep.push(ComplexMatrix::identity(rep.degree)); // unused slot 0
        let mut current = base.clone();
        per_rep.push(current.clone());
        for _ in 2..=max_lag {
            current = current.matmul(&base)?;
            per_rep.push(current.clone());
        }
        powers.push(per_rep);
    }

    let mut acc = Complex64::new(0.0, 0.0);
    let mut tuple_buf = vec![0usize; n];
    for rho in multi_indices(set.len(), n) {
        let degree_product: usize = rho.iter().map(|&r| set.reps()[r].degree).product();
        caps.check("spectral multispectrum block", (degree_product * degree_product) as u128)?;

        // H_hat(rho_1 ⊗ ... ⊗ rho_n) = sum_x H(x) rho_1(x_1) ⊗ ... ⊗ rho_n(x_n)
        let mut h_hat = ComplexMatrix::zeros(degree_product, degree_product);
        for (idx, &hv) in h.values().iter().enumerate() {
            if hv == Complex64::new(0.0, 0.0) {
                continue;
            }
            decode_multi(idx, order, &mut tuple_buf);
            let mut block: Option<ComplexMatrix> = None;
            for (pos, &x) in tuple_buf.iter().enumerate() {
                let factor = set.reps()[rho[pos]].at(x);
                block = Some(match block {
                    None => factor.clone(),
                    Some(b) => b.kron(factor),
                });
            }
            h_hat = h_hat.add(&block.expect("n >= 1").scaled(hv))?;
        }

        // gamma_hat(rho_1)^l_1 ⊗ ... ⊗ gamma_hat(rho_n)^l_n
        let mut power_block: Option<ComplexMatrix> = None;
        for (pos, &r) in rho.iter().enumerate() {
            let factor = &powers[r][lags[pos] as usize];
            power_block = Some(match power_block {
                None => factor.clone(),
                Some(b) => b.kron(factor),
            });
        }
        let power_block = power_block.expect("n >= 1");
        acc += power_block.trace_of_product(&h_hat)? * degree_product as f64;
    }
    let scale = (order as f64).powi(n as i32 + 1);
    Ok((acc / scale).re)
}

fn decode_multi(mut index: usize, base: usize, tuple: &mut [usize]) {
    for slot in tuple.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
}

/// Exact distribution of the first `horizon` observed bits. Patterns index
/// with time 1 in the lowest bit: pattern p has bit (t-1) = observation at
/// time t.
#[derive(Debug, Clone)]
pub struct ObservationDistribution {
    horizon: u32,
    probs: Vec<f64>,
}

impl ObservationDistribution {
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob_of_pattern(&self, bits: &[u8]) -> f64 {
        assert_eq!(bits.len(), self.horizon as usize);
        let idx = bits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (t, &b)| acc | ((b as usize) << t));
        self.probs[idx]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Marginal probability that the observation is 1 at every listed time
    /// (1-based), which is exactly a temporal moment of the scenery.
    pub fn marginal_all_ones(&self, times: &[u32]) -> f64 {
        let mask = times.iter().fold(0usize, |acc, &t| {
            assert!(t >= 1 && t <= self.horizon, "time out of range");
            acc | (1 << (t - 1))
        });
        self.probs
            .iter()
            .enumerate()
            .filter(|(p, _)| p & mask == mask)
            .map(|(_, &v)| v)
            .sum()
    }

    /// Marginal distribution over the first `horizon` bits.
    pub fn restrict(&self, horizon: u32) -> ObservationDistribution {
        assert!(horizon >= 1 && horizon <= self.horizon);
        let mut probs = vec![0.0; 1 << horizon];
        let mask = (1usize << horizon) - 1;
        for (p, &v) in self.probs.iter().enumerate() {
            probs[p & mask] += v;
        }
        ObservationDistribution { horizon, probs }
    }
}

/// Exact forward dynamic program over the walk: carries the sub-probability
/// mass on G consistent with each observed prefix, starting from the uniform
/// law at time 1.
pub fn observation_distribution(
    f: &Scenery,
    gamma: &StepDistribution,
    horizon: u32,
    caps: &Caps,
) -> Result<ObservationDistribution> {
    check_same_group(f, gamma)?;
    if horizon == 0 {
        return Err(Error::Validation("horizon must be >= 1".into()));
    }
    caps.check("observation distribution", pow_u128(2, horizon as usize))?;
    let group = f.group();
    let n = group.order();
    let mut probs = vec![0.0; 1usize << horizon];

    // One step of the walk: a step z moves mass from k to z k.
    let step = |mass: &[f64]| -> Vec<f64> {
        let mut next = vec![0.0; n];
        for (k, &m) in mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for (z, &pz) in gamma.probs().iter().enumerate() {
                if pz != 0.0 {
                    next[group.mul(z, k)] += pz * m;
                }
            }
        }
        next
    };

    fn branch(
        f: &Scenery,
        step: &dyn Fn(&[f64]) -> Vec<f64>,
        mass: Vec<f64>,
        t: u32,
        horizon: u32,
        pattern: usize,
        probs: &mut [f64],
    ) {
        // Split the current mass by the bit observed at time t.
        let mut mass_zero = vec![0.0; mass.len()];
        let mut mass_one = vec![0.0; mass.len()];
        for (k, &m) in mass.iter().enumerate() {
            if f.is_one(k) {
                mass_one[k] = m;
            } else {
                mass_zero[k] = m;
            }
        }
        for (bit, m) in [(0usize, mass_zero), (1usize, mass_one)] {
            let p = pattern | (bit << (t - 1));
            if t == horizon {
                probs[p] = m.iter().sum();
            } else if m.iter().any(|&x| x > 0.0) {
                branch(f, step, step(&m), t + 1, horizon, p, probs);
            }
            // dead branches leave zero probability for the whole subtree
        }
    }

    let initial = vec![1.0 / n as f64; n];
    branch(f, &step, initial, 1, horizon, 0, &mut probs);
    Ok(ObservationDistribution { horizon, probs })
}

/// A seeded trajectory of observed bits, reproducible by construction.
pub fn sample_trajectory(
    f: &Scenery,
    gamma: &StepDistribution,
    horizon: u32,
    seed: u64,
) -> Result<Vec<u8>> {
    check_same_group(f, gamma)?;
    if horizon == 0 {
        return Err(Error::Validation("horizon must be >= 1".into()));
    }
    let group = f.group();
    let mut rng = SplitMix64::new(seed);
    let mut position = rng.next_range(group.order());
    let mut bits = Vec::with_capacity(horizon as usize);
    for t in 1..=horizon {
        bits.push(u8::from(f.is_one(position)));
        if t == horizon {
            break;
        }
        let u = rng.next_f64();
        let mut cumulative = 0.0;
        let mut chosen = group.order() - 1;
        for (z, &p) in gamma.probs().iter().enumerate() {
            cumulative += p;
            if u < cumulative {
                chosen = z;
                break;
            }
        }
        position = group.mul(chosen, position);
    }
    Ok(bits)
}

/// Outcome of comparing two sceneries through the walk.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// The horizon-t pattern distributions already differ.
    Distinguished { horizon: u32, gap: f64 },
    /// No difference up to the stated bounds; says nothing beyond them.
    IndistinguishableUpTo { horizon: u32, order_bound: usize },
}

impl Verdict {
    pub fn is_distinguished(&self) -> bool {
        matches!(self, Verdict::Distinguished { .. })
    }

    pub fn distinguished_horizon(&self) -> Option<u32> {
        match self {
            Verdict::Distinguished { horizon, .. } => Some(*horizon),
            Verdict::IndistinguishableUpTo { .. } => None,
        }
    }
}

/// Full record produced by [`distinguishability_oracle`].
#[derive(Debug, Clone, Serialize)]
pub struct DistinguishReport {
    pub verdict: Verdict,
    pub horizon: u32,
    pub order_bound: usize,
    /// Moments are compared over all lag tuples with entries in 1..=lag_bound.
    pub lag_bound: usize,
    pub support_sizes: (usize, usize),
    /// max |B_f1 - B_f2| per moment order; slot 0 is the single-time marginal
    /// |supp f1|/|G| vs |supp f2|/|G|.
    pub moment_gaps: Vec<f64>,
    pub moments_equal: bool,
    pub max_distribution_gap: f64,
}

/// Compares the observation processes of two sceneries under one step law:
/// exact pattern distributions up to `horizon`, and temporal moments up to
/// `order_bound` with lags up to `lag_bound` (default |G|, past which the
/// convolution powers add nothing new). Verdicts are bounded claims only.
pub fn distinguishability_oracle(
    f1: &Scenery,
    f2: &Scenery,
    gamma: &StepDistribution,
    horizon: u32,
    order_bound: usize,
    lag_bound: Option<usize>,
    caps: &Caps,
) -> Result<DistinguishReport> {
    if !Arc::ptr_eq(f1.group(), f2.group()) && **f1.group() != **f2.group() {
        return Err(Error::GroupMismatch);
    }
    check_same_group(f1, gamma)?;
    let group = f1.group();
    let n = group.order();
    let lag_bound = lag_bound.unwrap_or(n);
    if lag_bound == 0 {
        return Err(Error::Validation("lag bound must be >= 1".into()));
    }

    let obs1 = observation_distribution(f1, gamma, horizon, caps)?;
    let obs2 = observation_distribution(f2, gamma, horizon, caps)?;

    // Scan horizons bottom-up for the first detectable difference.
    let mut verdict = None;
    let mut max_gap = 0.0f64;
    for t in 1..=horizon {
        let m1 = obs1.restrict(t);
        let m2 = obs2.restrict(t);
        let gap = m1
            .probs()
            .iter()
            .zip(m2.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        max_gap = max_gap.max(gap);
        if gap > DISTRIBUTION_TOL && verdict.is_none() {
            verdict = Some(Verdict::Distinguished { horizon: t, gap });
        }
    }

    // Temporal moments, order 0 (single-time marginal) upward. The
    // multispectrum difference is computed once per order and contracted
    // against the convolution powers for every lag tuple.
    let convs = convolution_powers_up_to(gamma, lag_bound as u32)?;
    let mut moment_gaps = Vec::with_capacity(order_bound + 1);
    moment_gaps.push(
        (f1.support_size() as f64 - f2.support_size() as f64).abs() / n as f64,
    );
    for order in 1..=order_bound {
        let delta = multispectrum(f1, order, caps)?.sub(&multispectrum(f2, order, caps)?)?;
        let mut worst = 0.0f64;
        for lags_ix in multi_indices(lag_bound, order) {
            let lags: Vec<u32> = lags_ix.iter().map(|&l| (l + 1) as u32).collect();
            let gap = contract_tensor(delta.values(), &convs, &lags, n, 0, 0, 1.0) / n as f64;
            worst = worst.max(gap.abs());
        }
        moment_gaps.push(worst);
    }
    let moments_equal = moment_gaps.iter().all(|&g| g < DISTRIBUTION_TOL);

    Ok(DistinguishReport {
        verdict: verdict.unwrap_or(Verdict::IndistinguishableUpTo {
            horizon,
            order_bound,
        }),
        horizon,
        order_bound,
        lag_bound,
        support_sizes: (f1.support_size(), f2.support_size()),
        moment_gaps,
        moments_equal,
        max_distribution_gap: max_gap,
    })
}
