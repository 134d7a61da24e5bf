//! Finite groups as explicit multiplication tables, with the built-in
//! families used throughout: cyclic, dihedral, the quaternion group of
//! order 8, and direct products of those.
//!
//! Conventions (fixed everywhere in this crate):
//! * elements are dense indices `0..|G|`, and index 0 is the identity;
//! * `table[i][j]` is the index of the product `i * j`;
//! * cyclic(m): element k is the residue k, so `table[i][j] = (i+j) mod m`;
//! * dihedral(m), order 2m: indices `0..m` are the rotations `r^a`, indices
//!   `m..2m` are the reflections `s*r^(a-m)`; products follow
//!   `r^a * s = s * r^(-a)`;
//! * quaternion8: element order is `[1, i, j, k, -1, -i, -j, -k]`;
//! * direct products: the pair `(a, b)` gets index `a * |G2| + b`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an element relative to a specific [`FiniteGroup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement(pub usize);

impl GroupElement {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How a group was constructed; drives the representation catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Cyclic(usize),
    Dihedral(usize),
    Quaternion8,
    Product(Arc<FiniteGroup>, Arc<FiniteGroup>),
    Custom,
}

/// A finite group given by its full multiplication table.
///
/// Immutable after construction; share it behind an `Arc`.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    family: Family,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.table == other.table
    }
}

impl Eq for FiniteGroup {}

/// Largest supported group order. The analyses in this crate are exhaustive
/// in |G| or worse, so big tables would only ever time out.
pub const MAX_ORDER: usize = 32;

/// Outcome of checking the group axioms on a multiplication table.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub violations: Vec<String>,
}

impl AxiomReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a raw table for the group axioms: entries in range, identity at
/// index 0, Latin-square rows and columns, existence of inverses, and full
/// associativity over all |G|^3 triples.
pub fn validate_table(table: &[Vec<usize>]) -> AxiomReport {
    let mut violations = Vec::new();
    let n = table.len();
    if n == 0 {
        violations.push("empty table".to_string());
        return AxiomReport { violations };
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            violations.push(format!("row {i} has length {} != order {n}", row.len()));
            return AxiomReport { violations };
        }
        for (j, &v) in row.iter().enumerate() {
            if v >= n {
                violations.push(format!("entry ({i},{j}) = {v} out of range"));
                return AxiomReport { violations };
            }
        }
    }
    // Identity at index 0 on both sides.
    for i in 0..n {
        if table[0][i] != i {
            violations.push(format!("0 * {i} = {} (index 0 is not a left identity)", table[0][i]));
        }
        if table[i][0] != i {
            violations.push(format!("{i} * 0 = {} (index 0 is not a right identity)", table[i][0]));
        }
    }
    // Latin square: every row and column a permutation.
    for i in 0..n {
        let mut seen_row = vec![false; n];
        let mut seen_col = vec![false; n];
        for j in 0..n {
            if seen_row[table[i][j]] {
                violations.push(format!("row {i} repeats element {}", table[i][j]));
            }
            seen_row[table[i][j]] = true;
            if seen_col[table[j][i]] {
                violations.push(format!("column {i} repeats element {}", table[j][i]));
            }
            seen_col[table[j][i]] = true;
        }
    }
    // Inverses: each i has j with i*j = 0.
    for i in 0..n {
        if !(0..n).any(|j| table[i][j] == 0) {
            violations.push(format!("element {i} has no right inverse"));
        }
    }
    // Associativity, exhaustively. Orders here are <= MAX_ORDER, so |G|^3 is
    // at most 32768 triples.
    'assoc: for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    violations.push(format!("associativity fails at ({a},{b},{c})"));
                    break 'assoc;
                }
            }
        }
    }
    AxiomReport { violations }
}

impl FiniteGroup {
    fn from_valid_table(name: String, table: Vec<Vec<usize>>, family: Family) -> Result<Arc<Self>> {
        let report = validate_table(&table);
        if !report.is_valid() {
            return Err(Error::InvalidGroup(report.violations.join("; ")));
        }
        let n = table.len();
        if n > MAX_ORDER {
            return Err(Error::InvalidGroup(format!(
                "order {n} exceeds the supported maximum {MAX_ORDER}"
            )));
        }
        let inverse = (0..n)
            .map(|i| (0..n).find(|&j| table[i][j] == 0).expect("validated"))
            .collect();
        Ok(Arc::new(FiniteGroup {
            name,
            order: n,
            table,
            inverse,
            family,
        }))
    }

    /// Builds a custom group from a raw table. The table is fully validated
    /// and the identity must sit at index 0.
    pub fn from_table(name: impl Into<String>, table: Vec<Vec<usize>>) -> Result<Arc<Self>> {
        Self::from_valid_table(name.into(), table, Family::Custom)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(0)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.order).map(GroupElement)
    }

    /// Checked product of two elements.
    pub fn compose(&self, a: GroupElement, b: GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(GroupElement(self.table[a.0][b.0]))
    }

    /// Checked inverse.
    pub fn inverse(&self, a: GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(GroupElement(self.inverse[a.0]))
    }

    fn check(&self, a: GroupElement) -> Result<()> {
        if a.0 >= self.order {
            return Err(Error::IndexOutOfRange {
                index: a.0,
                order: self.order,
            });
        }
        Ok(())
    }

    /// Unchecked product on raw indices; the hot-path form of [`compose`].
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < self.order && b < self.order);
        self.table[a][b]
    }

    /// Unchecked inverse on raw indices.
    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        debug_assert!(a < self.order);
        self.inverse[a]
    }

    pub fn is_abelian(&self) -> bool {
        self.noncommuting_pair().is_none()
    }

    pub fn noncommuting_pair(&self) -> Option<(usize, usize)> {
        for a in 0..self.order {
            for b in (a + 1)..self.order {
                if self.table[a][b] != self.table[b][a] {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Re-runs the full axiom check on this group's table.
    pub fn verify_axioms(&self) -> AxiomReport {
        validate_table(&self.table)
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn to_json(&self) -> GroupFile {
        GroupFile {
            name: self.name.clone(),
            order: self.order,
            table: self.table.clone(),
        }
    }
}

/// On-disk JSON form of a group: `{"name": ..., "order": m, "table": [[...]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupFile {
    pub name: String,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

/// Parses a group file, insisting that the identity sits at index 0 and that
/// all axioms hold.
pub fn group_from_json(data: &str) -> Result<Arc<FiniteGroup>> {
    let file: GroupFile = serde_json::from_str(data)?;
    if file.table.len() != file.order {
        return Err(Error::InvalidGroup(format!(
            "declared order {} but table has {} rows",
            file.order,
            file.table.len()
        )));
    }
    if file.order >= 1 && (file.table[0].len() != file.order || file.table[0] != (0..file.order).collect::<Vec<_>>()) {
        return Err(Error::InvalidGroup(
            "identity must be the element at index 0 (row 0 must read 0,1,2,...)".into(),
        ));
    }
    FiniteGroup::from_table(file.name, file.table)
}

pub fn group_from_file(path: impl AsRef<Path>) -> Result<Arc<FiniteGroup>> {
    let data = std::fs::read_to_string(path)?;
    group_from_json(&data)
}

/// Cyclic group of order m; element k is the residue k mod m.
pub fn cyclic(m: usize) -> Result<Arc<FiniteGroup>> {
    if m < 1 {
        return Err(Error::UnsupportedFamily("cyclic group needs order >= 1".into()));
    }
    let table = (0..m).map(|i| (0..m).map(|j| (i + j) % m).collect()).collect();
    FiniteGroup::from_valid_table(format!("Z{m}"), table, Family::Cyclic(m))
}

/// Dihedral group of order 2m. dihedral(3) is the symmetric group S_3.
pub fn dihedral(m: usize) -> Result<Arc<FiniteGroup>> {
    if m < 1 {
        return Err(Error::UnsupportedFamily("dihedral group needs m >= 1".into()));
    }
    let n = 2 * m;
    // Element i encodes (eps, a) = (i / m, i % m) meaning s^eps r^a.
    // s^e1 r^a1 * s^e2 r^a2 = s^(e1+e2) r^((-1)^e2 a1 + a2).
    let mut table = vec![vec![0usize; n]; n];
    for i in 0..n {
        let (e1, a1) = (i / m, i % m);
        for j in 0..n {
            let (e2, a2) = (j / m, j % m);
            let eps = (e1 + e2) % 2;
            let rotated = if e2 == 1 { (m - a1) % m } else { a1 };
            table[i][j] = eps * m + (rotated + a2) % m;
        }
    }
    FiniteGroup::from_valid_table(format!("D{m}"), table, Family::Dihedral(m))
}

/// The quaternion group {±1, ±i, ±j, ±k}, in the order [1,i,j,k,-1,-i,-j,-k].
pub fn quaternion8() -> Arc<FiniteGroup> {
    // basis products: b1*b2 = (sign, basis) with 0:1, 1:i, 2:j, 3:k.
    let basis_mul = |a: usize, b: usize| -> (usize, usize) {
        match (a, b) {
            (0, x) => (0, x),
            (x, 0) => (0, x),
            (x, y) if x == y => (1, 0), // i*i = j*j = k*k = -1
            (1, 2) => (0, 3),
            (2, 3) => (0, 1),
            (3, 1) => (0, 2),
            (2, 1) => (1, 3),
            (3, 2) => (1, 1),
            (1, 3) => (1, 2),
            _ => unreachable!(),
        }
    };
    let mut table = vec![vec![0usize; 8]; 8];
    for i in 0..8 {
        let (s1, b1) = (i / 4, i % 4);
        for j in 0..8 {
            let (s2, b2) = (j / 4, j % 4);
            let (s12, b12) = basis_mul(b1, b2);
            table[i][j] = ((s1 + s2 + s12) % 2) * 4 + b12;
        }
    }
    FiniteGroup::from_valid_table("Q8".to_string(), table, Family::Quaternion8)
        .expect("quaternion table is a group")
}

/// Direct product; the pair (a, b) gets index a * |G2| + b.
pub fn direct_product(g1: &Arc<FiniteGroup>, g2: &Arc<FiniteGroup>) -> Result<Arc<FiniteGroup>> {
    let (n1, n2) = (g1.order(), g2.order());
    let n = n1 * n2;
    if n > MAX_ORDER {
        return Err(Error::InvalidGroup(format!(
            "product order {n} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    let mut table = vec![vec![0usize; n]; n];
    for a1 in 0..n1 {
        for b1 in 0..n2 {
            for a2 in 0..n1 {
                for b2 in 0..n2 {
                    let i = a1 * n2 + b1;
                    let j = a2 * n2 + b2;
                    table[i][j] = g1.mul(a1, a2) * n2 + g2.mul(b1, b2);
                }
            }
        }
    }
    FiniteGroup::from_valid_table(
        format!("{}x{}", g1.name(), g2.name()),
        table,
        Family::Product(Arc::clone(g1), Arc::clone(g2)),
    )
}

/// Parses a group descriptor: `Z<m>` / `C<m>` / `cyclic:<m>` for cyclic,
/// `D<m>` / `dihedral:<m>` for dihedral, `Q8` / `quaternion8`, and
/// `x`-joined products such as `Z2xZ2` (left associated).
pub fn parse_group_spec(spec: &str) -> Result<Arc<FiniteGroup>> {
    let trimmed = spec.trim();
    if trimmed.is_empty() {
        return Err(Error::UnsupportedFamily("empty group descriptor".into()));
    }
    let parts: Vec<&str> = trimmed.split('x').collect();
    let mut groups = parts.iter().map(|p| parse_atom(p));
    let first = groups.next().expect("split yields at least one part")?;
    groups.try_fold(first, |acc, g| direct_product(&acc, &g?))
}

fn parse_atom(atom: &str) -> Result<Arc<FiniteGroup>> {
    let a = atom.trim();
    let upper = a.to_ascii_uppercase();
    let parse_m = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| Error::UnsupportedFamily(format!("bad order in group descriptor {a:?}")))
    };
    if upper == "Q8" || upper == "QUATERNION8" {
        return Ok(quaternion8());
    }
    if let Some(rest) = upper.strip_prefix("CYCLIC:") {
        return cyclic(parse_m(rest)?);
    }
    if let Some(rest) = upper.strip_prefix("DIHEDRAL:") {
        return dihedral(parse_m(rest)?);
    }
    if let Some(rest) = upper.strip_prefix('Z').or_else(|| upper.strip_prefix('C')) {
        if rest.chars().all(|c| c.is_ascii_digit()) && !rest.is_empty() {
            return cyclic(parse_m(rest)?);
        }
    }
    if let Some(rest) = upper.strip_prefix('D') {
        if rest.chars().all(|c| c.is_ascii_digit()) && !rest.is_empty() {
            return dihedral(parse_m(rest)?);
        }
    }
    Err(Error::UnsupportedFamily(format!(
        "unknown group descriptor {a:?} (try Z<m>, D<m>, Q8, or products like Z2xZ2)"
    )))
}

/// The fixed roster of built-in groups used by `group list` and the test
/// suites: all have order <= 12.
pub fn builtin_catalog() -> Vec<Arc<FiniteGroup>> {
    let mut out = Vec::new();
    for m in 1..=12 {
        out.push(cyclic(m).expect("cyclic"));
    }
    for m in 1..=6 {
        out.push(dihedral(m).expect("dihedral"));
    }
    out.push(quaternion8());
    let z2 = cyclic(2).unwrap();
    let z3 = cyclic(3).unwrap();
    let z4 = cyclic(4).unwrap();
    let z6 = cyclic(6).unwrap();
    let d3 = dihedral(3).unwrap();
    let v4 = direct_product(&z2, &z2).unwrap();
    out.push(v4.clone());
    out.push(direct_product(&z2, &z4).unwrap());
    out.push(direct_product(&v4, &z2).unwrap());
    out.push(direct_product(&z3, &z3).unwrap());
    out.push(direct_product(&z2, &z6).unwrap());
    out.push(direct_product(&d3, &z2).unwrap());
    out
}

/// The small non-abelian groups worth exploring exhaustively.
pub fn small_nonabelian() -> Vec<Arc<FiniteGroup>> {
    vec![
        dihedral(3).unwrap(),
        dihedral(4).unwrap(),
        quaternion8(),
        dihedral(5).unwrap(),
        dihedral(6).unwrap(),
        direct_product(&dihedral(3).unwrap(), &cyclic(2).unwrap()).unwrap(),
    ]
}
