//! Scans every pair of scenery shift-classes on a small group, asking two
//! questions about each: does the walk fail to distinguish the pair within
//! the tested bounds, and does the difference of their (argument-flipped)
//! multispectra land in the null space of the condition system? Pairs
//! answering yes to either are the interesting finds; nothing about the
//! answer is assumed in advance.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::caps::Caps;
use crate::condition::{build_coefficient_matrix, WITNESS_RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::repr::IrrepSet;
use crate::scenery::{enumerate_sceneries, multispectrum, shift_equivalent, GTensor, Scenery};
use crate::walk::{distinguishability_oracle, StepDistribution, Verdict};

/// Largest group order the pair scan accepts.
pub const EXPLORE_MAX_ORDER: usize = 8;

/// Everything measured about one pair of shift-class representatives.
#[derive(Debug, Clone, Serialize)]
pub struct PairRecord {
    pub scenery_a: String,
    pub scenery_b: String,
    pub shift_equivalent: bool,
    pub support_sizes: (usize, usize),
    /// max |Delta H| per order 1..=order_bound (0 exactly for shift pairs).
    pub delta_norms: Vec<f64>,
    /// max residual of the condition equations against Delta H, per order.
    pub nullspace_residuals: Vec<f64>,
    /// residual below the witness budget, per order.
    pub delta_in_nullspace: Vec<bool>,
    pub verdict: Verdict,
    /// max |B_f1 - B_f2| per moment order 0..=order_bound, from the oracle.
    pub moment_gaps: Vec<f64>,
    /// not shift-equivalent, yet nothing up to the bounds tells them apart.
    pub flagged_indistinguishable: bool,
    /// some order has a nonzero Delta H inside the null space.
    pub flagged_null_delta: bool,
}

/// Full output of [`explore_open_question`].
#[derive(Debug, Clone, Serialize)]
pub struct ExplorationReport {
    pub group: String,
    pub group_order: usize,
    pub gamma_label: String,
    pub gamma: Vec<f64>,
    pub order_bound: usize,
    pub horizon: u32,
    pub lag_bound: usize,
    pub class_count: usize,
    pub pairs_checked: usize,
    /// Only the flagged pairs; every pair contributes to the counters.
    pub candidates: Vec<PairRecord>,
    pub indistinguishable_pairs: usize,
    pub null_delta_pairs: usize,
    pub consistency_ok: bool,
    /// Cross-check failures, empty on a healthy run.
    pub consistency_violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

/// One scenery per right-shift orbit: the lexicographically smallest
/// bitstring among the shifts, returned in ascending bitstring order.
pub fn shift_class_representatives(group: &Arc<FiniteGroup>) -> Result<Vec<Scenery>> {
    let mut classes: BTreeMap<String, Scenery> = BTreeMap::new();
    for f in enumerate_sceneries(group)? {
        let minimal = (0..group.order())
            .map(|g| f.shifted(g).to_bitstring())
            .min()
            .expect("groups are non-empty");
        classes
            .entry(minimal.clone())
            .or_insert_with(|| Scenery::from_bitstring(Arc::clone(group), &minimal).expect("valid bits"));
    }
    Ok(classes.into_values().collect())
}

/// Runs the full pair scan. For every unordered pair of shift-class
/// representatives: the shift check, Delta H against the condition system at
/// each order up to `order_bound`, and the walk oracle up to `horizon`.
/// Internal cross-checks compare the equation residuals with |G|^(n+1) times
/// the oracle's moment gaps (two routes to the same number) and verify the
/// implications between the flags.
pub fn explore_open_question(
    set: &IrrepSet,
    gamma: &StepDistribution,
    gamma_label: &str,
    order_bound: usize,
    horizon: u32,
    caps: &Caps,
) -> Result<ExplorationReport> {
    let group = set.group();
    let n = group.order();
    if n > EXPLORE_MAX_ORDER {
        return Err(Error::Validation(format!(
            "exploration is guarded to |G| <= {EXPLORE_MAX_ORDER} (|G| = {n})"
        )));
    }
    if order_bound == 0 || horizon == 0 {
        return Err(Error::Validation("order bound and horizon must be >= 1".into()));
    }

    // One condition system per order; pairs only differ in the right-hand
    // tensor, so the matrices are shared across the scan.
    let mut systems = Vec::with_capacity(order_bound);
    for order in 1..=order_bound {
        systems.push(build_coefficient_matrix(set, gamma, order, n, caps)?);
    }

    let classes = shift_class_representatives(group)?;
    // Flipped multispectra per class and order.
    let mut flipped: Vec<Vec<GTensor>> = Vec::with_capacity(classes.len());
    for f in &classes {
        let mut per_order = Vec::with_capacity(order_bound);
        for order in 1..=order_bound {
            per_order.push(multispectrum(f, order, caps)?.flip_arguments());
        }
        flipped.push(per_order);
    }

    let mut candidates = Vec::new();
    let mut violations: Vec<String> = Vec::new();
    let mut pairs_checked = 0usize;
    let mut indistinguishable_pairs = 0usize;
    let mut null_delta_pairs = 0usize;

    for i in 0..classes.len() {
        for j in (i + 1)..classes.len() {
            pairs_checked += 1;
            let (f1, f2) = (&classes[i], &classes[j]);
            let pair_tag = format!("({}, {})", f1.to_bitstring(), f2.to_bitstring());
            let is_shift = shift_equivalent(f1, f2)?.is_some();

            let mut delta_norms = Vec::with_capacity(order_bound);
            let mut residuals = Vec::with_capacity(order_bound);
            let mut in_nullspace = Vec::with_capacity(order_bound);
            for (order_ix, system) in systems.iter().enumerate() {
                let delta = flipped[i][order_ix].sub(&flipped[j][order_ix])?;
                let norm = delta.max_abs();
                let residual = system.matrix.apply_max_abs(delta.values());
                delta_norms.push(norm);
                residuals.push(residual);
                in_nullspace.push(residual < WITNESS_RESIDUAL_TOL);
                if norm == 0.0 && residual > 1e-12 {
                    violations.push(format!(
                        "{pair_tag}: zero Delta H with nonzero residual {residual:.3e} at order {}",
                        order_ix + 1
                    ));
                }
            }

            let oracle = distinguishability_oracle(f1, f2, gamma, horizon, order_bound, None, caps)?;

            // Two routes to the same number: equation residuals vs scaled
            // moment gaps.
            for (order_ix, &residual) in residuals.iter().enumerate() {
                let scaled = oracle.moment_gaps[order_ix + 1]
                    * (n as f64).powi(order_ix as i32 + 2);
                if (residual - scaled).abs() > 1e-7 * (1.0 + residual.max(scaled)) {
                    violations.push(format!(
                        "{pair_tag}: residual {residual:.6e} disagrees with scaled moment gap {scaled:.6e} at order {}",
                        order_ix + 1
                    ));
                }
            }

            if is_shift {
                if delta_norms.iter().any(|&d| d != 0.0) {
                    violations.push(format!("{pair_tag}: shift pair with nonzero Delta H"));
                }
                if oracle.verdict.is_distinguished() {
                    violations.push(format!("{pair_tag}: shift pair distinguished"));
                }
            }

            // Equal supports plus Delta H in every tested null space force
            // moment equality through order_bound, hence pattern equality up
            // to horizon order_bound + 1.
            let support_equal = f1.support_size() == f2.support_size();
            if support_equal && in_nullspace.iter().all(|&b| b) {
                if let Some(t) = oracle.verdict.distinguished_horizon() {
                    if (t as usize) <= order_bound + 1 {
                        violations.push(format!(
                            "{pair_tag}: distinguished at horizon {t} despite null Delta H through order {order_bound}"
                        ));
                    }
                }
            }

            let flagged_indistinguishable = !is_shift && !oracle.verdict.is_distinguished();
            let flagged_null_delta = delta_norms
                .iter()
                .zip(&in_nullspace)
                .any(|(&norm, &inside)| norm > 0.0 && inside);
            if flagged_indistinguishable {
                indistinguishable_pairs += 1;
            }
            if flagged_null_delta {
                null_delta_pairs += 1;
            }
            if flagged_indistinguishable || flagged_null_delta {
                candidates.push(PairRecord {
                    scenery_a: f1.to_bitstring(),
                    scenery_b: f2.to_bitstring(),
                    shift_equivalent: is_shift,
                    support_sizes: (f1.support_size(), f2.support_size()),
                    delta_norms,
                    nullspace_residuals: residuals,
                    delta_in_nullspace: in_nullspace,
                    verdict: oracle.verdict.clone(),
                    moment_gaps: oracle.moment_gaps.clone(),
                    flagged_indistinguishable,
                    flagged_null_delta,
                });
            }
        }
    }

    Ok(ExplorationReport {
        group: group.name().to_string(),
        group_order: n,
        gamma_label: gamma_label.to_string(),
        gamma: gamma.probs().to_vec(),
        order_bound,
        horizon,
        lag_bound: n,
        class_count: classes.len(),
        pairs_checked,
        candidates,
        indistinguishable_pairs,
        null_delta_pairs,
        consistency_ok: violations.is_empty(),
        consistency_violations: violations,
        elapsed_ms: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic, dihedral};
    use crate::repr::irreducible_representations;
    use crate::rng::SplitMix64;

    #[test]
    fn z4_class_representatives() {
        let z4 = cyclic(4).unwrap();
        let classes = shift_class_representatives(&z4).unwrap();
        let names: Vec<String> = classes.iter().map(|c| c.to_bitstring()).collect();
        assert_eq!(names, vec!["0000", "0001", "0011", "0101", "0111", "1111"]);
    }

    #[test]
    fn shift_pair_has_zero_delta() {
        let z4 = cyclic(4).unwrap();
        let f = Scenery::from_bitstring(Arc::clone(&z4), "1100").unwrap();
        let caps = Caps::default();
        for order in 1..=3 {
            let base = multispectrum(&f, order, &caps).unwrap().flip_arguments();
            for g in 0..4 {
                let shifted = multispectrum(&f.shifted(g), order, &caps)
                    .unwrap()
                    .flip_arguments();
                assert_eq!(base.sub(&shifted).unwrap().max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn uniform_walk_on_z4_finds_the_classic_pair() {
        let z4 = cyclic(4).unwrap();
        let set = irreducible_representations(&z4).unwrap();
        let gamma = StepDistribution::uniform(Arc::clone(&z4));
        let report =
            explore_open_question(&set, &gamma, "uniform", 3, 8, &Caps::default()).unwrap();
        assert!(report.consistency_ok, "{:?}", report.consistency_violations);
        assert_eq!(report.class_count, 6);
        assert_eq!(report.pairs_checked, 15);
        // 1100 and 1010 normalize to the class representatives 0011 and 0101.
        let hit = report
            .candidates
            .iter()
            .find(|c| c.scenery_a == "0011" && c.scenery_b == "0101")
            .expect("the equal-support pair must be flagged");
        assert!(!hit.shift_equivalent);
        assert!(hit.flagged_indistinguishable);
        assert!(hit.flagged_null_delta, "uniform-walk deltas sum to zero, hence in-null-space");
        assert!(!hit.verdict.is_distinguished());
    }

    #[test]
    fn generic_walk_on_d3_runs_clean() {
        let d3 = dihedral(3).unwrap();
        let set = irreducible_representations(&d3).unwrap();
        let mut rng = SplitMix64::new(41);
        let gamma = StepDistribution::random(Arc::clone(&d3), &mut rng);
        // Small bounds here; the acceptance suite runs the full defaults.
        let report = explore_open_question(&set, &gamma, "random:41", 2, 5, &Caps::default()).unwrap();
        assert!(report.consistency_ok, "{:?}", report.consistency_violations);
        assert_eq!(report.class_count, 16);
        assert_eq!(report.pairs_checked, 120);
    }

    #[test]
    fn explore_rejects_large_groups() {
        let d5 = dihedral(5).unwrap();
        let set = irreducible_representations(&d5).unwrap();
        let gamma = StepDistribution::uniform(Arc::clone(&d5));
        assert!(explore_open_question(&set, &gamma, "uniform", 2, 4, &Caps::default()).is_err());
    }
}
