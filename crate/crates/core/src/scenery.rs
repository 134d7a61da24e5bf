//! Sceneries ({0,1}-valued functions on a group), their shift classes,
//! spatial autocorrelation and multispectrum statistics, and reconstruction
//! of a scenery from its full-order multispectrum.
//!
//! The multispectrum of f at offsets (l_1, ..., l_n) counts the base points
//! k for which f is 1 at k and at every prefix product p_j k, where
//! p_j = l_j ... l_1:
//!
//!   A_f(l_1, ..., l_n) = sum_k f(k) f(p_1 k) ... f(p_n k).
//!
//! Right shifts f(k) -> f(kg) leave every entry fixed, and at order |G| the
//! tensor determines the scenery up to exactly such a shift; that is what
//! [`reconstruct_from_multispectrum`] exploits.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::caps::{pow_u128, Caps};
use crate::error::{Error, Result};
use crate::fourier::GFunction;
use crate::group::{FiniteGroup, GroupElement};

/// Largest group order for which the full-order reconstruction search runs.
pub const RECONSTRUCT_MAX_ORDER: usize = 8;

/// Largest group order for which [`enumerate_sceneries`] will iterate all
/// 2^|G| sceneries.
pub const ENUMERATE_MAX_ORDER: usize = 20;

/// A {0,1}-valued function on the elements of a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenery {
    group: Arc<FiniteGroup>,
    bits: Vec<u8>,
}

impl Scenery {
    pub fn new(group: Arc<FiniteGroup>, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != group.order() {
            return Err(Error::InvalidScenery(format!(
                "{} bits for a group of order {}",
                bits.len(),
                group.order()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidScenery("bits must be 0 or 1".into()));
        }
        Ok(Scenery { group, bits })
    }

    /// Parses a bitstring such as "1100", element-index order.
    pub fn from_bitstring(group: Arc<FiniteGroup>, s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::InvalidScenery(format!(
                    "unexpected character {other:?} in bitstring"
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(group, bits)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn to_bitstring(&self) -> String {
        self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }

    pub fn support_size(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    #[inline]
    pub fn is_one(&self, element: usize) -> bool {
        self.bits[element] == 1
    }

    /// The right shift f(k) -> f(kg).
    pub fn shifted(&self, g: usize) -> Scenery {
        let grp = &self.group;
        Scenery {
            group: Arc::clone(grp),
            bits: (0..grp.order()).map(|k| self.bits[grp.mul(k, g)]).collect(),
        }
    }

    pub fn to_gfunction(&self) -> GFunction {
        GFunction::from_real(
            Arc::clone(&self.group),
            &self.bits.iter().map(|&b| b as f64).collect::<Vec<_>>(),
        )
        .expect("lengths match by construction")
    }

    fn same_group(&self, other: &Scenery) -> Result<()> {
        if !Arc::ptr_eq(&self.group, &other.group) && *self.group != *other.group {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }
}

/// A complex-valued function on n-tuples of group elements, stored flat with
/// the first coordinate slowest: index(x_1..x_n) = ((x_1 |G| + x_2) |G| + ...).
#[derive(Debug, Clone, PartialEq)]
pub struct GTensor {
    group: Arc<FiniteGroup>,
    order: usize,
    values: Vec<Complex64>,
}

impl GTensor {
    pub fn zeros(group: Arc<FiniteGroup>, order: usize, caps: &Caps) -> Result<Self> {
        if order == 0 {
            return Err(Error::Validation("tensor order must be >= 1".into()));
        }
        let cells = pow_u128(group.order(), order);
        caps.check("tensor", cells)?;
        Ok(GTensor {
            group,
            order,
            values: vec![Complex64::new(0.0, 0.0); cells as usize],
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.order);
        tuple.iter().fold(0, |acc, &x| {
            debug_assert!(x < self.group.order());
            acc * self.group.order() + x
        })
    }

    pub fn tuple_of(&self, mut index: usize) -> Vec<usize> {
        let n = self.group.order();
        let mut tuple = vec![0usize; self.order];
        for slot in tuple.iter_mut().rev() {
            *slot = index % n;
            index /= n;
        }
        tuple
    }

    pub fn get(&self, tuple: &[usize]) -> Complex64 {
        self.values[self.index_of(tuple)]
    }

    pub fn set(&mut self, tuple: &[usize], value: Complex64) {
        let idx = self.index_of(tuple);
        self.values[idx] = value;
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Componentwise argument inversion: out(x_1..x_n) = self(x_1^-1..x_n^-1).
    /// An involution, and the identity on groups of exponent 2.
    pub fn flip_arguments(&self) -> GTensor {
        let g = &self.group;
        let mut out = GTensor {
            group: Arc::clone(g),
            order: self.order,
            values: vec![Complex64::new(0.0, 0.0); self.values.len()],
        };
        let mut tuple = vec![0usize; self.order];
        for idx in 0..self.values.len() {
            decode_into(idx, g.order(), &mut tuple);
            let src: Vec<usize> = tuple.iter().map(|&x| g.inv(x)).collect();
            out.values[idx] = self.values[self.index_of(&src)];
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &GTensor) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Order-1 tensors are functions on the group.
    pub fn to_gfunction(&self) -> Result<GFunction> {
        if self.order != 1 {
            return Err(Error::Validation(format!(
                "only order-1 tensors convert to functions (order = {})",
                self.order
            )));
        }
        GFunction::new(Arc::clone(&self.group), self.values.clone())
    }

    /// Elementwise difference; orders and groups must match.
    pub fn sub(&self, other: &GTensor) -> Result<GTensor> {
        if self.order != other.order || self.group.order() != other.group.order() {
            return Err(Error::Validation("tensor order/group mismatch in sub".into()));
        }
        Ok(GTensor {
            group: Arc::clone(&self.group),
            order: self.order,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

fn decode_into(mut index: usize, base: usize, tuple: &mut [usize]) {
    for slot in tuple.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
}

/// On-disk JSON form of a tensor; values are [re, im] pairs, flat, first
/// coordinate slowest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorFile {
    pub schema_version: u32,
    pub group: String,
    pub group_order: usize,
    pub order: usize,
    pub values: Vec<[f64; 2]>,
}

pub fn tensor_to_json(t: &GTensor) -> TensorFile {
    TensorFile {
        schema_version: 1,
        group: t.group().name().to_string(),
        group_order: t.group().order(),
        order: t.order(),
        values: t.values().iter().map(|v| [v.re, v.im]).collect(),
    }
}

pub fn tensor_from_json(group: &Arc<FiniteGroup>, data: &str) -> Result<GTensor> {
    let file: TensorFile = serde_json::from_str(data)?;
    if file.group_order != group.order() {
        return Err(Error::Validation(format!(
            "tensor was computed on a group of order {}, not {}",
            file.group_order,
            group.order()
        )));
    }
    let expected = pow_u128(group.order(), file.order);
    if file.order == 0 || file.values.len() as u128 != expected {
        return Err(Error::Validation(format!(
            "tensor of order {} over a group of order {} needs {} values, found {}",
            file.order,
            group.order(),
            expected,
            file.values.len()
        )));
    }
    Ok(GTensor {
        group: Arc::clone(group),
        order: file.order,
        values: file
            .values
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect(),
    })
}

/// Bit k of mask[p] says whether f(p k) = 1. All the scenery statistics are
/// intersections of these masks.
fn translate_masks(f: &Scenery) -> Vec<u64> {
    let g = f.group();
    let n = g.order();
    (0..n)
        .map(|p| {
            let mut mask = 0u64;
            for k in 0..n {
                if f.is_one(g.mul(p, k)) {
                    mask |= 1 << k;
                }
            }
            mask
        })
        .collect()
}

/// Spatial autocorrelation a_f(l) = sum_k f(k) f(lk), as an order-1 tensor.
/// Integer-valued; a_f(e) is the support size.
pub fn spatial_autocorrelation(f: &Scenery) -> GTensor {
    let masks = translate_masks(f);
    let base = masks[0];
    GTensor {
        group: Arc::clone(f.group()),
        order: 1,
        values: masks
            .iter()
            .map(|&m| Complex64::new((base & m).count_ones() as f64, 0.0))
            .collect(),
    }
}

/// The order-n multispectrum of f. Integer-valued; the all-identity entry is
/// the support size.
pub fn multispectrum(f: &Scenery, order: usize, caps: &Caps) -> Result<GTensor> {
    if order == 0 {
        return Err(Error::Validation("multispectrum order must be >= 1".into()));
    }
    let g = Arc::clone(f.group());
    let n = g.order();
    caps.check("multispectrum", pow_u128(n, order))?;
    let masks = translate_masks(f);
    let mut out = GTensor {
        group: Arc::clone(&g),
        order,
        values: vec![Complex64::new(0.0, 0.0); pow_u128(n, order) as usize],
    };

    // Depth-first over offset tuples, carrying the prefix product p and the
    // set of surviving base points. Empty survivor sets prune whole subtrees
    // (their entries stay zero).
    fn descend(
        g: &FiniteGroup,
        masks: &[u64],
        values: &mut [Complex64],
        depth_left: usize,
        p_prev: usize,
        survivors: u64,
        base_index: usize,
    ) {
        let n = g.order();
        for l in 0..n {
            let p = g.mul(l, p_prev);
            let alive = survivors & masks[p];
            let idx = base_index * n + l;
            if depth_left == 1 {
                values[idx] = Complex64::new(alive.count_ones() as f64, 0.0);
            } else if alive != 0 {
                descend(g, masks, values, depth_left - 1, p, alive, idx);
            }
        }
    }

    if masks[0] != 0 {
        descend(&g, &masks, out.values_mut(), order, 0, masks[0], 0);
    }
    Ok(out)
}

/// Finds a witness g with f1(k) = f2(kg) for all k, searching all |G|
/// candidates in index order.
pub fn shift_equivalent(f1: &Scenery, f2: &Scenery) -> Result<Option<GroupElement>> {
    f1.same_group(f2)?;
    let g = f1.group();
    let n = g.order();
    'candidates: for cand in 0..n {
        for k in 0..n {
            if f1.bits()[k] != f2.bits()[g.mul(k, cand)] {
                continue 'candidates;
            }
        }
        return Ok(Some(GroupElement(cand)));
    }
    Ok(None)
}

/// Number the elements 1..=|G| with the identity last: index 0 maps to |G|,
/// every other element keeps its index.
fn identity_last_number(order: usize, element: usize) -> u64 {
    if element == 0 {
        order as u64
    } else {
        element as u64
    }
}

/// The strictly increasing integer tuple assigned to an offset tuple: the
/// first entry is the number of x_1; each later entry is the smallest integer
/// above its predecessor congruent mod |G| to the number of the prefix
/// product x_j ... x_1. Tuples compare lexicographically.
pub fn assigned_tuple(group: &FiniteGroup, tuple: &[usize]) -> Vec<u64> {
    assert!(!tuple.is_empty(), "assigned_tuple needs at least one offset");
    let n = group.order() as u64;
    let mut out = Vec::with_capacity(tuple.len());
    let mut p = 0usize;
    let mut prev = 0u64;
    for (j, &x) in tuple.iter().enumerate() {
        p = group.mul(x, p);
        let num = identity_last_number(group.order(), p);
        let a = if j == 0 {
            num
        } else {
            let diff = (num % n + n - prev % n) % n;
            prev + if diff == 0 { n } else { diff }
        };
        out.push(a);
        prev = a;
    }
    out
}

/// Rebuilds a scenery from its multispectrum of order |G|.
///
/// Walks the tensor for the positive tuple with the lexicographically
/// smallest assigned tuple, reads the support off its prefix products, and
/// verifies the candidate by recomputing its multispectrum. A tensor no
/// scenery realizes is reported as inconsistent. The result is pinned at
/// base point e, so it recovers any preimage up to a right shift.
pub fn reconstruct_from_multispectrum(a: &GTensor, caps: &Caps) -> Result<Scenery> {
    let group = Arc::clone(a.group());
    let n = group.order();
    if a.order() != n {
        return Err(Error::Validation(format!(
            "reconstruction needs a tensor of order |G| = {n}, got order {}",
            a.order()
        )));
    }
    if n > RECONSTRUCT_MAX_ORDER {
        return Err(Error::Validation(format!(
            "reconstruction is guarded to |G| <= {RECONSTRUCT_MAX_ORDER} (|G| = {n})"
        )));
    }
    let positive = |idx: usize| -> bool {
        let v = a.values()[idx];
        v.re > 0.5 && v.im.abs() < 1e-6
    };

    let verify = |candidate: Scenery| -> Result<Scenery> {
        let recomputed = multispectrum(&candidate, n, caps)?;
        let diff = recomputed.max_abs_diff(a);
        if diff > 1e-6 {
            return Err(Error::InconsistentTensor(format!(
                "no scenery has this multispectrum (candidate {:?} misses by {diff:.3e})",
                candidate.to_bitstring()
            )));
        }
        Ok(candidate)
    };

    // All-identity entry zero forces the all-zero scenery.
    if !positive(0) {
        return verify(Scenery::new(group, vec![0u8; n])?);
    }

    // Greedy descent: at each level try the offsets in increasing assigned
    // number; a prefix padded with identities indexes the tensor directly, and
    // for genuine multispectra a positive padded entry guarantees a positive
    // completion, so the first leaf reached carries the minimal tuple.
    let mut prefix_products = vec![0usize; n + 1];
    let mut assigned = vec![0u64; n + 1];
    let mut prefix_index = 0usize;
    for level in 1..=n {
        let pad = n.pow((n - level) as u32);
        let start = if level == 1 { 1 } else { assigned[level - 1] + 1 };
        let mut advanced = false;
        for value in start..start + n as u64 {
            let number = ((value - 1) % n as u64) + 1;
            let p = if number == n as u64 { 0 } else { number as usize };
            let x = group.mul(p, group.inv(prefix_products[level - 1]));
            let idx = (prefix_index * n + x) * pad;
            if positive(idx) {
                prefix_products[level] = p;
                assigned[level] = value;
                prefix_index = prefix_index * n + x;
                advanced = true;
                break;
            }
        }
        if !advanced {
            return Err(Error::InconsistentTensor(format!(
                "no positive entry extends the prefix at level {level}"
            )));
        }
    }

    // Support: base point e plus the prefix products while the assigned
    // numbers stay below |G|.
    let cutoff = (1..=n).rev().find(|&i| assigned[i] < n as u64).unwrap_or(0);
    let mut bits = vec![0u8; n];
    bits[0] = 1;
    for i in 1..=cutoff {
        bits[prefix_products[i]] = 1;
    }
    verify(Scenery::new(group, bits)?)
}

/// All 2^|G| sceneries in binary-counter order (element 0 is the top bit, so
/// the bitstrings count up 000.., 001.., ...). The first emitted is all-zero.
pub fn enumerate_sceneries(group: &Arc<FiniteGroup>) -> Result<impl Iterator<Item = Scenery>> {
    let n = group.order();
    if n > ENUMERATE_MAX_ORDER {
        return Err(Error::Validation(format!(
            "enumeration is guarded to |G| <= {ENUMERATE_MAX_ORDER} (|G| = {n})"
        )));
    }
    let group = Arc::clone(group);
    Ok((0u64..(1u64 << n)).map(move |counter| {
        let bits = (0..n).map(|i| ((counter >> (n - 1 - i)) & 1) as u8).collect();
        Scenery {
            group: Arc::clone(&group),
            bits,
        }
    }))
}
