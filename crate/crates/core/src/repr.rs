//! Complete sets of irreducible complex matrix representations for the
//! built-in group families, verified numerically rather than derived.
//!
//! Constructions:
//! * cyclic(m): the m characters k -> exp(2 pi i j k / m);
//! * dihedral(m): two one-dimensional representations (four when m is even)
//!   plus the standard two-dimensional ones rho_h(r^a) = diag(w^{ha}, w^{-ha}),
//!   rho_h(s r^a) = antidiag(w^{-ha}, w^{ha}) for h = 1 .. ceil(m/2)-1;
//! * quaternion8: four sign characters through the Klein quotient plus the
//!   standard two-dimensional representation by Pauli-like matrices;
//! * direct products: all pairwise tensor products of the factors' sets.

use std::f64::consts::TAU;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Family, FiniteGroup};
use crate::linalg::ComplexMatrix;

/// Default absolute tolerance on matrix-entry residuals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A complex matrix representation: one d x d matrix per group element,
/// indexed by element.
#[derive(Debug, Clone)]
pub struct Representation {
    pub degree: usize,
    pub matrices: Vec<ComplexMatrix>,
}

impl Representation {
    pub fn at(&self, element: usize) -> &ComplexMatrix {
        &self.matrices[element]
    }

    /// The character: traces of the representing matrices.
    pub fn character(&self) -> Vec<Complex64> {
        self.matrices.iter().map(|m| m.trace()).collect()
    }
}

/// A complete set of irreducible representations, one per equivalence class.
#[derive(Debug, Clone)]
pub struct IrrepSet {
    group: Arc<FiniteGroup>,
    reps: Vec<Representation>,
}

impl IrrepSet {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn reps(&self) -> &[Representation] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.reps.iter().map(|r| r.degree).collect()
    }

    /// Sum of d over the set; the rank bounds need it.
    pub fn degree_sum(&self) -> usize {
        self.reps.iter().map(|r| r.degree).sum()
    }
}

/// Residuals from checking that a representation really is a homomorphism.
#[derive(Debug, Clone, Serialize)]
pub struct HomomorphismReport {
    /// max over (a, b) of the entrywise norm of rho(ab) - rho(a) rho(b).
    pub homomorphism_residual: f64,
    /// Entrywise distance of rho(e) from the identity matrix.
    pub identity_residual: f64,
}

impl HomomorphismReport {
    pub fn max_residual(&self) -> f64 {
        self.homomorphism_residual.max(self.identity_residual)
    }
}

/// Checks the homomorphism property over every pair of elements.
pub fn verify_representation(group: &FiniteGroup, rep: &Representation) -> Result<HomomorphismReport> {
    let n = group.order();
    if rep.matrices.len() != n {
        return Err(Error::InvalidRepresentation(format!(
            "expected {n} matrices, found {}",
            rep.matrices.len()
        )));
    }
    if rep.degree == 0 || rep.matrices.iter().any(|m| m.rows() != rep.degree || m.cols() != rep.degree) {
        return Err(Error::InvalidRepresentation(format!(
            "matrices must all be {0} x {0}",
            rep.degree
        )));
    }
    let identity_residual = rep.matrices[0]
        .sub(&ComplexMatrix::identity(rep.degree))?
        .max_abs();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let product = rep.at(a).matmul(rep.at(b))?;
            let residual = rep.at(group.mul(a, b)).sub(&product)?.max_abs();
            worst = worst.max(residual);
        }
    }
    Ok(HomomorphismReport {
        homomorphism_residual: worst,
        identity_residual,
    })
}

/// Outcome of checking that a set of irreducibles is complete: the degree
/// squares must sum to |G| exactly and the characters must be orthonormal
/// under (1/|G|) sum_s chi_i(s) conj(chi_j(s)).
#[derive(Debug, Clone, Serialize)]
pub struct CompletenessReport {
    pub order: usize,
    pub degrees: Vec<usize>,
    pub degree_square_sum: usize,
    /// max over i != j of |<chi_i, chi_j>|.
    pub max_orthogonality_residual: f64,
    /// max over i of |<chi_i, chi_i> - 1|; 0 exactly when every member is
    /// irreducible.
    pub max_irreducibility_residual: f64,
}

impl CompletenessReport {
    pub fn sum_matches(&self) -> bool {
        self.degree_square_sum == self.order
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.sum_matches()
            && self.max_orthogonality_residual < tol
            && self.max_irreducibility_residual < tol
    }
}

pub fn verify_completeness(set: &IrrepSet) -> CompletenessReport {
    let n = set.group.order();
    let characters: Vec<Vec<Complex64>> = set.reps.iter().map(|r| r.character()).collect();
    let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| x * y.conj())
            .sum::<Complex64>()
            / n as f64
    };
    let mut max_orth = 0.0f64;
    let mut max_irr = 0.0f64;
    for i in 0..characters.len() {
        for j in 0..characters.len() {
            let ip = inner(&characters[i], &characters[j]);
            if i == j {
                max_irr = max_irr.max((ip - Complex64::new(1.0, 0.0)).norm());
            } else {
                max_orth = max_orth.max(ip.norm());
            }
        }
    }
    CompletenessReport {
        order: n,
        degrees: set.degrees(),
        degree_square_sum: set.reps.iter().map(|r| r.degree * r.degree).sum(),
        max_orthogonality_residual: max_orth,
        max_irreducibility_residual: max_irr,
    }
}

fn unit_phase(numerator: i64, modulus: usize) -> Complex64 {
    // exp(2 pi i * numerator / modulus) with the argument reduced first, so
    // large products cost no accuracy.
    let m = modulus as i64;
    let reduced = numerator.rem_euclid(m);
    Complex64::from_polar(1.0, TAU * reduced as f64 / modulus as f64)
}

fn scalar(v: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_rows(vec![vec![v]])
}

fn cyclic_irreps(m: usize) -> Vec<Representation> {
    (0..m)
        .map(|j| Representation {
            degree: 1,
            matrices: (0..m)
                .map(|k| scalar(unit_phase((j * k) as i64, m)))
                .collect(),
        })
        .collect()
}

fn dihedral_irreps(m: usize) -> Vec<Representation> {
    let n = 2 * m;
    let mut reps = Vec::new();
    // One-dimensional: trivial and the reflection sign...
    let one_dim = |f: &dyn Fn(usize, usize) -> f64| -> Representation {
        Representation {
            degree: 1,
            matrices: (0..n)
                .map(|i| scalar(Complex64::new(f(i / m, i % m), 0.0)))
                .collect(),
        }
    };
    reps.push(one_dim(&|_, _| 1.0));
    reps.push(one_dim(&|eps, _| if eps == 1 { -1.0 } else { 1.0 }));
    // ...plus two more through the rotation parity when m is even.
    if m % 2 == 0 {
        reps.push(one_dim(&|_, a| if a % 2 == 1 { -1.0 } else { 1.0 }));
        reps.push(one_dim(&|eps, a| if (a + eps) % 2 == 1 { -1.0 } else { 1.0 }));
    }
    // Two-dimensional representations rho_h.
    let h_max = if m % 2 == 0 { m / 2 } else { m.div_ceil(2) };
    for h in 1..h_max {
        let matrices = (0..n)
            .map(|i| {
                let (eps, a) = (i / m, i % m);
                let w = unit_phase((h * a) as i64, m);
                let wbar = unit_phase(-((h * a) as i64), m);
                let zero = Complex64::new(0.0, 0.0);
                if eps == 0 {
                    ComplexMatrix::from_rows(vec![vec![w, zero], vec![zero, wbar]])
                } else {
                    ComplexMatrix::from_rows(vec![vec![zero, wbar], vec![w, zero]])
                }
            })
            .collect();
        reps.push(Representation { degree: 2, matrices });
    }
    reps
}

fn quaternion_irreps() -> Vec<Representation> {
    let mut reps = Vec::new();
    // Sign characters factor through Q8 / {±1} (a Klein four-group): the
    // character indexed by t is +1 on {±1, ±t} and -1 on the other basis axes.
    let chars: [[f64; 8]; 4] = [
        [1.0; 8],
        [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0], // + on ±1, ±i
        [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0], // + on ±1, ±j
        [1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0], // + on ±1, ±k
    ];
    for ch in chars {
        reps.push(Representation {
            degree: 1,
            matrices: ch.iter().map(|&v| scalar(Complex64::new(v, 0.0))).collect(),
        });
    }
    // The two-dimensional representation: 1 -> I, i -> [[i,0],[0,-i]],
    // j -> [[0,1],[-1,0]], k -> [[0,i],[i,0]], and -x -> -rho(x).
    let c = Complex64::new;
    let base = [
        ComplexMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]),
        ComplexMatrix::from_rows(vec![vec![c(0.0, 1.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, -1.0)]]),
        ComplexMatrix::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(-1.0, 0.0), c(0.0, 0.0)]]),
        ComplexMatrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, 1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]),
    ];
    let matrices = (0..8)
        .map(|i| {
            let m = &base[i % 4];
            if i < 4 {
                m.clone()
            } else {
                m.scaled(c(-1.0, 0.0))
            }
        })
        .collect();
    reps.push(Representation { degree: 2, matrices });
    reps
}

fn product_irreps(
    g1: &Arc<FiniteGroup>,
    g2: &Arc<FiniteGroup>,
) -> Result<Vec<Representation>> {
    let set1 = irreducible_representations(g1)?;
    let set2 = irreducible_representations(g2)?;
    let n2 = g2.order();
    let n = g1.order() * n2;
    let mut reps = Vec::with_capacity(set1.len() * set2.len());
    for r1 in set1.reps() {
        for r2 in set2.reps() {
            let matrices = (0..n)
                .map(|i| r1.at(i / n2).kron(r2.at(i % n2)))
                .collect();
            reps.push(Representation {
                degree: r1.degree * r2.degree,
                matrices,
            });
        }
    }
    Ok(reps)
}

/// Builds the complete verified set of irreducible representations for a
/// built-in group. Custom groups have no catalog; load a representation file
/// with [`irreps_from_json`] instead.
pub fn irreducible_representations(group: &Arc<FiniteGroup>) -> Result<IrrepSet> {
    let reps = match group.family() {
        Family::Cyclic(m) => cyclic_irreps(*m),
        Family::Dihedral(m) => dihedral_irreps(*m),
        Family::Quaternion8 => quaternion_irreps(),
        Family::Product(g1, g2) => product_irreps(g1, g2)?,
        Family::Custom => return Err(Error::MissingRepresentations(group.name().to_string())),
    };
    let set = IrrepSet {
        group: Arc::clone(group),
        reps,
    };
    check_catalog(&set)?;
    Ok(set)
}

fn check_catalog(set: &IrrepSet) -> Result<()> {
    for (i, rep) in set.reps.iter().enumerate() {
        let report = verify_representation(&set.group, rep)?;
        if report.max_residual() >= DEFAULT_TOL {
            return Err(Error::InvalidRepresentation(format!(
                "representation {i} fails the homomorphism check (residual {:.3e})",
                report.max_residual()
            )));
        }
    }
    let completeness = verify_completeness(set);
    if !completeness.passes(DEFAULT_TOL) {
        return Err(Error::InvalidRepresentation(format!(
            "set is not complete/orthogonal: sum d^2 = {} vs |G| = {}, residuals {:.3e} / {:.3e}",
            completeness.degree_square_sum,
            completeness.order,
            completeness.max_orthogonality_residual,
            completeness.max_irreducibility_residual,
        )));
    }
    Ok(())
}

/// One representation in the on-disk JSON layout:
/// `{"degree": d, "matrices": [per element -> d rows -> d cols -> [re, im]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepFileEntry {
    pub degree: usize,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Serializes a set to the representation-file format (a JSON list of
/// entries, element index outermost within each entry).
pub fn irreps_to_json(set: &IrrepSet) -> Vec<RepFileEntry> {
    set.reps
        .iter()
        .map(|rep| RepFileEntry {
            degree: rep.degree,
            matrices: rep
                .matrices
                .iter()
                .map(|m| {
                    (0..m.rows())
                        .map(|i| (0..m.cols()).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
                        .collect()
                })
                .collect(),
        })
        .collect()
}

/// Parses a representation file for `group` and verifies every entry plus
/// completeness before returning the set.
pub fn irreps_from_json(group: &Arc<FiniteGroup>, data: &str) -> Result<IrrepSet> {
    let entries: Vec<RepFileEntry> = serde_json::from_str(data)?;
    irreps_from_entries(group, entries)
}

pub fn irreps_from_file(group: &Arc<FiniteGroup>, path: impl AsRef<Path>) -> Result<IrrepSet> {
    let data = std::fs::read_to_string(path)?;
    irreps_from_json(group, &data)
}

pub fn irreps_from_entries(group: &Arc<FiniteGroup>, entries: Vec<RepFileEntry>) -> Result<IrrepSet> {
    let n = group.order();
    let mut reps = Vec::with_capacity(entries.len());
    for (idx, entry) in entries.into_iter().enumerate() {
        if entry.matrices.len() != n {
            return Err(Error::InvalidRepresentation(format!(
                "representation {idx}: expected {n} matrices, found {}",
                entry.matrices.len()
            )));
        }
        let mut matrices = Vec::with_capacity(n);
        for m in &entry.matrices {
            if m.len() != entry.degree || m.iter().any(|row| row.len() != entry.degree) {
                return Err(Error::InvalidRepresentation(format!(
                    "representation {idx}: matrix is not {0} x {0}",
                    entry.degree
                )));
            }
            matrices.push(ComplexMatrix::from_rows(
                m.iter()
                    .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                    .collect(),
            ));
        }
        reps.push(Representation {
            degree: entry.degree,
            matrices,
        });
    }
    let set = IrrepSet {
        group: Arc::clone(group),
        reps,
    };
    check_catalog(&set)?;
    Ok(set)
}

/// Resolves the irreducibles for a group: the built-in catalog when the
/// family is known, otherwise a user-supplied representation file.
pub fn resolve_irreps(group: &Arc<FiniteGroup>, rep_file: Option<&Path>) -> Result<IrrepSet> {
    match rep_file {
        Some(path) => irreps_from_file(group, path),
        None => irreducible_representations(group),
    }
}
