//! The Fourier transform on a finite group, its inverse, the Plancherel
//! pairing, and convolution powers.
//!
//! The transform of u at a representation rho is sum_s u(s) rho(s); the
//! inverse reads u(s) = (1/|G|) sum_rho d_rho tr(rho(s^-1) u_hat(rho)).
//! Transforms are direct sums over the group: every group here has order
//! at most 32, so there is nothing to be clever about.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::ComplexMatrix;
use crate::repr::{IrrepSet, Representation};

/// A complex-valued function on the elements of a group.
#[derive(Debug, Clone, PartialEq)]
pub struct GFunction {
    group: Arc<FiniteGroup>,
    values: Vec<Complex64>,
}

impl GFunction {
    pub fn new(group: Arc<FiniteGroup>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::Validation(format!(
                "function has {} values for a group of order {}",
                values.len(),
                group.order()
            )));
        }
        Ok(GFunction { group, values })
    }

    pub fn from_real(group: Arc<FiniteGroup>, values: &[f64]) -> Result<Self> {
        Self::new(
            group,
            values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Builds from [re, im] pairs, the wire form used by the JSON interfaces.
    pub fn from_pairs(group: Arc<FiniteGroup>, values: &[[f64; 2]]) -> Result<Self> {
        Self::new(
            group,
            values.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        )
    }

    /// The indicator of a single element.
    pub fn indicator(group: Arc<FiniteGroup>, element: usize) -> Result<Self> {
        if element >= group.order() {
            return Err(Error::IndexOutOfRange {
                index: element,
                order: group.order(),
            });
        }
        let mut values = vec![Complex64::new(0.0, 0.0); group.order()];
        values[element] = Complex64::new(1.0, 0.0);
        Ok(GFunction { group, values })
    }

    pub fn constant(group: Arc<FiniteGroup>, value: Complex64) -> Self {
        let n = group.order();
        GFunction {
            group,
            values: vec![value; n],
        }
    }

    /// The uniform probability vector 1/|G|.
    pub fn uniform(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        Self::constant(group, Complex64::new(1.0 / n as f64, 0.0))
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, element: usize) -> Complex64 {
        self.values[element]
    }

    /// u(s) -> u(s^-1).
    pub fn flip(&self) -> GFunction {
        let g = &self.group;
        GFunction {
            group: Arc::clone(g),
            values: (0..g.order()).map(|s| self.values[g.inv(s)]).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &GFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn same_group(&self, other: &GFunction) -> Result<()> {
        if !Arc::ptr_eq(&self.group, &other.group) && *self.group != *other.group {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }
}

/// The transform of some function at one irreducible, tagged with its
/// position in the ambient [`IrrepSet`].
#[derive(Debug, Clone)]
pub struct FourierCoefficient {
    pub irrep_index: usize,
    pub degree: usize,
    pub matrix: ComplexMatrix,
}

/// sum_s u(s) rho(s).
pub fn fourier_transform(u: &GFunction, rep: &Representation) -> Result<ComplexMatrix> {
    if rep.matrices.len() != u.group.order() {
        return Err(Error::GroupMismatch);
    }
    let mut acc = ComplexMatrix::zeros(rep.degree, rep.degree);
    for (s, &v) in u.values.iter().enumerate() {
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        acc = acc.add(&rep.at(s).scaled(v))?;
    }
    Ok(acc)
}

/// The transform at every irreducible of the set, in set order.
pub fn fourier_spectrum(u: &GFunction, set: &IrrepSet) -> Result<Vec<FourierCoefficient>> {
    set.reps()
        .iter()
        .enumerate()
        .map(|(i, rep)| {
            Ok(FourierCoefficient {
                irrep_index: i,
                degree: rep.degree,
                matrix: fourier_transform(u, rep)?,
            })
        })
        .collect()
}

/// Fourier inversion: requires exactly one coefficient per irreducible, in
/// set order.
pub fn inverse_fourier(set: &IrrepSet, spectrum: &[FourierCoefficient]) -> Result<GFunction> {
    if spectrum.len() != set.len() {
        return Err(Error::Validation(format!(
            "inversion needs one coefficient per irreducible: got {} of {}",
            spectrum.len(),
            set.len()
        )));
    }
    for (i, (coeff, rep)) in spectrum.iter().zip(set.reps()).enumerate() {
        if coeff.irrep_index != i || coeff.degree != rep.degree || coeff.matrix.rows() != rep.degree {
            return Err(Error::Validation(format!(
                "coefficient {i} does not match irreducible {i} (degree {})",
                rep.degree
            )));
        }
    }
    let group = set.group();
    let n = group.order();
    let mut values = Vec::with_capacity(n);
    for s in 0..n {
        let s_inv = group.inv(s);
        let mut acc = Complex64::new(0.0, 0.0);
        for (coeff, rep) in spectrum.iter().zip(set.reps()) {
            acc += rep.at(s_inv).trace_of_product(&coeff.matrix)? * rep.degree as f64;
        }
        values.push(acc / n as f64);
    }
    GFunction::new(Arc::clone(group), values)
}

/// The spectral side of the Plancherel pairing:
/// (1/|G|) sum_rho d_rho tr(u_hat(rho) v_hat(rho)), which equals the direct
/// pairing sum_x u(x^-1) v(x).
pub fn plancherel_pair(u: &GFunction, v: &GFunction, set: &IrrepSet) -> Result<Complex64> {
    u.same_group(v)?;
    if set.group().order() != u.group.order() {
        return Err(Error::GroupMismatch);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for rep in set.reps() {
        let u_hat = fourier_transform(u, rep)?;
        let v_hat = fourier_transform(v, rep)?;
        acc += u_hat.trace_of_product(&v_hat)? * rep.degree as f64;
    }
    Ok(acc / u.group.order() as f64)
}

/// The direct side of the pairing, for cross-checks.
pub fn direct_pair(u: &GFunction, v: &GFunction) -> Result<Complex64> {
    u.same_group(v)?;
    let g = &u.group;
    Ok((0..g.order())
        .map(|x| u.values[g.inv(x)] * v.values[x])
        .sum())
}

/// One convolution step: (u * v)(k) = sum_s u(s) v(s^-1 k). With steps
/// composed as v(t+1) = z v(t), the law of the displacement over l+1 steps is
/// gamma * (law over l steps), newest factor on the left.
pub fn convolve(u: &GFunction, v: &GFunction) -> Result<GFunction> {
    u.same_group(v)?;
    let g = &u.group;
    let n = g.order();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for s in 0..n {
        let us = u.values[s];
        if us == Complex64::new(0.0, 0.0) {
            continue;
        }
        let s_inv = g.inv(s);
        for k in 0..n {
            values[k] += us * v.values[g.mul(s_inv, k)];
        }
    }
    GFunction::new(Arc::clone(g), values)
}

/// The l-fold convolution power, l >= 1.
pub fn convolution_power(u: &GFunction, l: u32) -> Result<GFunction> {
    if l == 0 {
        return Err(Error::Validation("convolution power requires l >= 1".into()));
    }
    let mut acc = u.clone();
    for _ in 1..l {
        acc = convolve(u, &acc)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic, dihedral, quaternion8};
    use crate::repr::irreducible_representations;
    use crate::rng::SplitMix64;

    fn random_gfunction(group: &Arc<FiniteGroup>, rng: &mut SplitMix64) -> GFunction {
        let values = (0..group.order())
            .map(|_| Complex64::new(rng.next_f64() * 2.0 - 1.0, rng.next_f64() * 2.0 - 1.0))
            .collect();
        GFunction::new(Arc::clone(group), values).unwrap()
    }

    #[test]
    fn indicator_of_identity_transforms_to_identity() {
        let g = dihedral(3).unwrap();
        let set = irreducible_representations(&g).unwrap();
        let delta = GFunction::indicator(Arc::clone(&g), 0).unwrap();
        for rep in set.reps() {
            let hat = fourier_transform(&delta, rep).unwrap();
            assert!(hat.sub(&ComplexMatrix::identity(rep.degree)).unwrap().max_abs() < 1e-14);
        }
    }

    #[test]
    fn constant_function_vanishes_at_nontrivial_irreps() {
        for g in [cyclic(5).unwrap(), dihedral(3).unwrap(), quaternion8()] {
            let set = irreducible_representations(&g).unwrap();
            let ones = GFunction::constant(Arc::clone(&g), Complex64::new(1.0, 0.0));
            for (i, rep) in set.reps().iter().enumerate() {
                let hat = fourier_transform(&ones, rep).unwrap();
                if i == 0 {
                    continue; // trivial irrep sums to |G|
                }
                assert!(hat.max_abs() < 1e-12, "{} irrep {}", g.name(), i);
            }
        }
    }

    #[test]
    fn z3_example_value() {
        // u = (1,1,0) at the character k -> w^k gives 1 + w.
        let g = cyclic(3).unwrap();
        let set = irreducible_representations(&g).unwrap();
        let u = GFunction::from_real(Arc::clone(&g), &[1.0, 1.0, 0.0]).unwrap();
        let hat = fourier_transform(&u, &set.reps()[1]).unwrap();
        let w = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        assert!((hat.get(0, 0) - (Complex64::new(1.0, 0.0) + w)).norm() < 1e-14);
    }

    #[test]
    fn inversion_round_trips() {
        let mut rng = SplitMix64::new(2024);
        for g in [cyclic(4).unwrap(), dihedral(3).unwrap(), quaternion8()] {
            let set = irreducible_representations(&g).unwrap();
            // the identity indicator round-trips...
            let delta = GFunction::indicator(Arc::clone(&g), 0).unwrap();
            let back = inverse_fourier(&set, &fourier_spectrum(&delta, &set).unwrap()).unwrap();
            assert!(back.max_abs_diff(&delta) < 1e-12);
            // ...and so do random functions.
            for _ in 0..10 {
                let u = random_gfunction(&g, &mut rng);
                let back = inverse_fourier(&set, &fourier_spectrum(&u, &set).unwrap()).unwrap();
                assert!(back.max_abs_diff(&u) < 1e-10, "{}", g.name());
            }
        }
    }

    #[test]
    fn zero_spectrum_inverts_to_zero() {
        let g = cyclic(4).unwrap();
        let set = irreducible_representations(&g).unwrap();
        let zero = GFunction::constant(Arc::clone(&g), Complex64::new(0.0, 0.0));
        let back = inverse_fourier(&set, &fourier_spectrum(&zero, &set).unwrap()).unwrap();
        assert!(back.max_abs_diff(&zero) == 0.0);
    }

    #[test]
    fn inversion_rejects_missing_irrep() {
        let g = dihedral(3).unwrap();
        let set = irreducible_representations(&g).unwrap();
        let u = GFunction::indicator(Arc::clone(&g), 1).unwrap();
        let mut spectrum = fourier_spectrum(&u, &set).unwrap();
        spectrum.pop();
        assert!(inverse_fourier(&set, &spectrum).is_err());
    }

    #[test]
    fn plancherel_examples() {
        let g = cyclic(3).unwrap();
        let set = irreducible_representations(&g).unwrap();
        // u = v = indicator of identity pairs to 1.
        let delta = GFunction::indicator(Arc::clone(&g), 0).unwrap();
        let p = plancherel_pair(&delta, &delta, &set).unwrap();
        assert!((p - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        // u = (1,1,0), v uniform: both sides evaluate to 2/3.
        let u = GFunction::from_real(Arc::clone(&g), &[1.0, 1.0, 0.0]).unwrap();
        let v = GFunction::uniform(Arc::clone(&g));
        let spectral = plancherel_pair(&u, &v, &set).unwrap();
        let direct = direct_pair(&u, &v).unwrap();
        assert!((spectral - Complex64::new(2.0 / 3.0, 0.0)).norm() < 1e-13);
        assert!((spectral - direct).norm() < 1e-13);
    }

    #[test]
    fn plancherel_matches_direct_on_random_pairs() {
        let mut rng = SplitMix64::new(99);
        let g = quaternion8();
        let set = irreducible_representations(&g).unwrap();
        for _ in 0..25 {
            let u = random_gfunction(&g, &mut rng);
            let v = random_gfunction(&g, &mut rng);
            let spectral = plancherel_pair(&u, &v, &set).unwrap();
            let direct = direct_pair(&u, &v).unwrap();
            assert!((spectral - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn convolution_examples() {
        // Point mass at the identity is idempotent.
        let g = dihedral(3).unwrap();
        let delta = GFunction::indicator(Arc::clone(&g), 0).unwrap();
        for l in 1..=4 {
            assert!(convolution_power(&delta, l).unwrap().max_abs_diff(&delta) < 1e-15);
        }
        // Z2 with gamma = (1/4, 3/4): gamma*gamma = (5/8, 3/8).
        let z2 = cyclic(2).unwrap();
        let gamma = GFunction::from_real(Arc::clone(&z2), &[0.25, 0.75]).unwrap();
        let squared = convolution_power(&gamma, 2).unwrap();
        assert!((squared.get(0) - Complex64::new(0.625, 0.0)).norm() < 1e-15);
        assert!((squared.get(1) - Complex64::new(0.375, 0.0)).norm() < 1e-15);
        assert!(convolution_power(&gamma, 0).is_err());
    }

    #[test]
    fn convolution_power_matches_spectral_power() {
        let mut rng = SplitMix64::new(5);
        for g in [cyclic(4).unwrap(), dihedral(3).unwrap(), quaternion8()] {
            let set = irreducible_representations(&g).unwrap();
            // random probability vector
            let raw: Vec<f64> = (0..g.order()).map(|_| rng.next_f64() + 0.01).collect();
            let total: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let gamma = GFunction::from_real(Arc::clone(&g), &probs).unwrap();
            for l in 1..=6u32 {
                let conv = convolution_power(&gamma, l).unwrap();
                for rep in set.reps() {
                    let lhs = fourier_transform(&conv, rep).unwrap();
                    let rhs = fourier_transform(&gamma, rep).unwrap().mat_power(l).unwrap();
                    assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-10);
                }
                // probability vectors stay probability vectors
                let total: Complex64 = conv.values().iter().sum();
                assert!((total - Complex64::new(1.0, 0.0)).norm() < 1e-12);
                assert!(conv.values().iter().all(|v| v.re > -1e-12 && v.im.abs() < 1e-12));
            }
        }
    }

    #[test]
    fn transform_is_linear() {
        let g = dihedral(3).unwrap();
        let set = irreducible_representations(&g).unwrap();
        let mut rng = SplitMix64::new(17);
        let u = random_gfunction(&g, &mut rng);
        let v = random_gfunction(&g, &mut rng);
        let alpha = Complex64::new(0.75, -0.5);
        let beta = Complex64::new(-1.25, 2.0);
        let combo = GFunction::new(
            Arc::clone(&g),
            u.values()
                .iter()
                .zip(v.values())
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        )
        .unwrap();
        for rep in set.reps() {
            let lhs = fourier_transform(&combo, rep).unwrap();
            let rhs = fourier_transform(&u, rep)
                .unwrap()
                .scaled(alpha)
                .add(&fourier_transform(&v, rep).unwrap().scaled(beta))
                .unwrap();
            assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn group_mismatch_is_rejected() {
        let z3 = cyclic(3).unwrap();
        let z4 = cyclic(4).unwrap();
        let u = GFunction::uniform(Arc::clone(&z3));
        let v = GFunction::uniform(Arc::clone(&z4));
        assert!(convolve(&u, &v).is_err());
        let set4 = irreducible_representations(&z4).unwrap();
        assert!(fourier_transform(&u, &set4.reps()[1]).is_err());
    }
}
