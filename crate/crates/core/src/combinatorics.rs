//! Compositions, integer partitions, Ewens probabilities, the inclusion–exclusion
//! polynomial `P_k` and the face weights of the quasi-Bernoulli laws.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::simplex::{DirichletParams, FaceSubset};
use crate::special::{binomial, ln_rising_over_factorial, pochhammer, rising_over_factorial};

/// Default refusal threshold for enumerations.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// Inclusion–exclusion over subsets is refused beyond this many coordinates.
pub const MAX_SUBSET_COORDS: usize = 21;

/// Above this `k`, weights are accumulated in log space.
const LOG_SPACE_K: u64 = 64;

/// Nonnegative integers `(b_0, ..., b_d)` summing to `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    b: Vec<u32>,
    k: u32,
}

impl Composition {
    pub fn new(b: Vec<u32>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::InvalidParams("a composition needs at least one part".into()));
        }
        let k = b.iter().try_fold(0u32, |acc, x| acc.checked_add(*x)).ok_or_else(|| {
            Error::InvalidParams("composition total overflows".into())
        })?;
        Ok(Self { b, k })
    }

    pub fn parts(&self) -> &[u32] {
        &self.b
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Indices of the nonzero parts.
    pub fn support(&self) -> FaceSubset {
        let mask = self
            .b
            .iter()
            .enumerate()
            .filter(|(_, x)| **x > 0)
            .fold(0u64, |m, (i, _)| m | (1 << i));
        FaceSubset::from_mask(mask).expect("composition with k >= 1 has nonempty support")
    }
}

/// Number of compositions of `k` into `parts` parts, `C(k + parts - 1, parts - 1)`.
pub fn composition_count(parts: usize, k: u32) -> u128 {
    let d = parts as u64 - 1;
    binomial(k as u64 + d, d)
}

/// Lazily walks the compositions of `k` into `parts` parts in descending
/// lexicographic order, from `(k, 0, ..., 0)` to `(0, ..., 0, k)`.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Option<Vec<u32>>,
}

impl Compositions {
    pub fn new(parts: usize, k: u32) -> Self {
        assert!(parts >= 1, "need at least one part");
        let mut first = vec![0; parts];
        first[0] = k;
        Self { current: Some(first) }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let cur = self.current.take()?;
        let n = cur.len();
        // rightmost nonzero part that can still shift mass to the right
        if let Some(j) = (0..n.saturating_sub(1)).rev().find(|&j| cur[j] > 0) {
            let mut next = cur.clone();
            let tail: u32 = next[j + 1..].iter().sum();
            next[j] -= 1;
            next[j + 1] = tail + 1;
            for x in next[j + 2..].iter_mut() {
                *x = 0;
            }
            self.current = Some(next);
        }
        Some(cur)
    }
}

/// Every composition of `k` into `parts` parts, in descending lexicographic
/// order. Refuses when there are more than [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_compositions(parts: usize, k: u32) -> Result<Vec<Composition>> {
    enumerate_compositions_capped(parts, k, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_compositions_capped(parts: usize, k: u32, cap: u128) -> Result<Vec<Composition>> {
    if parts == 0 {
        return Err(Error::InvalidParams("need at least one part".into()));
    }
    let count = composition_count(parts, k);
    if count > cap {
        return Err(Error::EnumerationTooLarge { count, cap });
    }
    Ok(Compositions::new(parts, k)
        .map(|b| Composition { b, k })
        .collect())
}

/// Multiplicities `(m_1, ..., m_k)` with `sum j m_j = k`: the portrait of a
/// partition of `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionPortrait {
    m: Vec<u32>,
}

impl PartitionPortrait {
    /// `m[j - 1]` is the number of blocks of size `j`; `k` is `m.len()`.
    pub fn new(m: Vec<u32>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::InvalidParams("a portrait needs k >= 1".into()));
        }
        let weighted: u64 = m
            .iter()
            .enumerate()
            .map(|(j, mj)| (j as u64 + 1) * *mj as u64)
            .sum();
        if weighted != m.len() as u64 {
            return Err(Error::InvalidParams(format!(
                "portrait {m:?} has sum j*m_j = {weighted}, expected {}",
                m.len()
            )));
        }
        Ok(Self { m })
    }

    /// Builds the portrait of the partition with the given block sizes.
    pub fn from_block_sizes(sizes: &[u32]) -> Result<Self> {
        let k: u32 = sizes.iter().sum();
        if k == 0 || sizes.contains(&0) {
            return Err(Error::InvalidParams("block sizes must be positive".into()));
        }
        let mut m = vec![0; k as usize];
        for &s in sizes {
            m[s as usize - 1] += 1;
        }
        Ok(Self { m })
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.m
    }

    /// `m_j` for `j >= 1`.
    pub fn count(&self, j: usize) -> u32 {
        self.m.get(j.wrapping_sub(1)).copied().unwrap_or(0)
    }

    pub fn k(&self) -> u32 {
        self.m.len() as u32
    }

    /// Number of blocks, `sum m_j`.
    pub fn blocks(&self) -> u32 {
        self.m.iter().sum()
    }

    pub fn block_sizes(&self) -> BlockSizes {
        let b = self
            .m
            .iter()
            .enumerate()
            .flat_map(|(j, mj)| std::iter::repeat_n(j as u32 + 1, *mj as usize))
            .collect();
        BlockSizes { b }
    }
}

/// The nondecreasing block-size sequence in which `j` appears `m_j` times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSizes {
    b: Vec<u32>,
}

impl BlockSizes {
    pub fn sizes(&self) -> &[u32] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }
}

/// Number of partitions of `k`, saturating.
pub fn partition_count(k: u32) -> u128 {
    let k = k as usize;
    let mut p = vec![0u128; k + 1];
    p[0] = 1;
    for part in 1..=k {
        for n in part..=k {
            p[n] = p[n].saturating_add(p[n - part]);
        }
    }
    p[k]
}

/// All partitions of `k` as portraits. Ordered lexicographically by the
/// nonincreasing part sequence, so `1+1+...+1` comes first and `k` last.
pub fn enumerate_portraits(k: u32) -> Result<Vec<PartitionPortrait>> {
    enumerate_portraits_capped(k, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_portraits_capped(k: u32, cap: u128) -> Result<Vec<PartitionPortrait>> {
    if k == 0 {
        return Err(Error::InvalidParams("portraits need k >= 1".into()));
    }
    let count = partition_count(k);
    if count > cap {
        return Err(Error::EnumerationTooLarge { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut m = vec![0u32; k as usize];
    portraits_rec(k, k, &mut m, &mut out);
    Ok(out)
}

fn portraits_rec(remaining: u32, max_part: u32, m: &mut [u32], out: &mut Vec<PartitionPortrait>) {
    if remaining == 0 {
        out.push(PartitionPortrait { m: m.to_vec() });
        return;
    }
    for part in 1..=remaining.min(max_part) {
        m[part as usize - 1] += 1;
        portraits_rec(remaining - part, part, m, out);
        m[part as usize - 1] -= 1;
    }
}

/// Mixture weight of `D(b_0, ..., b_d)` in the quasi-Bernoulli law of order
/// `k = sum b_i`: `(k!/(a)_k) prod (a_i)_{b_i}/b_i!`.
pub fn composition_weight(b: &Composition, params: &DirichletParams) -> Result<f64> {
    if b.parts().len() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            found: b.parts().len(),
        });
    }
    let k = b.k() as u64;
    if k <= LOG_SPACE_K {
        let num: f64 = b
            .parts()
            .iter()
            .zip(params.a())
            .map(|(bi, ai)| rising_over_factorial(*ai, *bi as u64))
            .product();
        return Ok(num / rising_over_factorial(params.total(), k));
    }
    let ln_num: f64 = b
        .parts()
        .iter()
        .zip(params.a())
        .map(|(bi, ai)| ln_rising_over_factorial(*ai, *bi as u64))
        .sum();
    Ok((ln_num - ln_rising_over_factorial(params.total(), k)).exp())
}

/// Ewens probability `C(m) a^{sum m_j} / (a)_k` with
/// `C(m) = k! / prod j^{m_j} m_j!`.
pub fn ewens_pmf(m: &PartitionPortrait, a: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParams(format!("Ewens parameter must be positive, got {a}")));
    }
    let k = m.k() as u64;
    if k <= LOG_SPACE_K {
        // k!/(a)_k as a product of ratios
        let mut p: f64 = (0..k).map(|t| (t as f64 + 1.0) / (a + t as f64)).product();
        for (idx, &mj) in m.multiplicities().iter().enumerate() {
            let j = idx as f64 + 1.0;
            for r in 1..=mj {
                p *= a / (j * r as f64);
            }
        }
        return Ok(p);
    }
    let mut ln_p = -ln_rising_over_factorial(a, k);
    for (idx, &mj) in m.multiplicities().iter().enumerate() {
        let j = idx as f64 + 1.0;
        for r in 1..=mj {
            ln_p += (a / (j * r as f64)).ln();
        }
    }
    Ok(ln_p.exp())
}

fn check_subset_coords(n: usize) -> Result<()> {
    if n > MAX_SUBSET_COORDS {
        return Err(Error::TooManyCategories {
            d: n - 1,
            max: MAX_SUBSET_COORDS - 1,
        });
    }
    Ok(())
}

/// `a_S` for every subset mask `S` of `{0, ..., a.len() - 1}`.
fn subset_sums(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut sums = vec![0.0; 1 << n];
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + a[low];
    }
    sums
}

/// `P_k(a_0, ..., a_d) = sum_S (-1)^{d+1-|S|} (a_S)_k` over all subsets,
/// empty set included. Vanishes for `k <= d`.
pub fn pk_polynomial(k: u32, a: &[f64]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::InvalidParams("P_k needs at least one variable".into()));
    }
    let n = a.len();
    check_subset_coords(n)?;
    let sums = subset_sums(a);
    let mut acc = 0.0;
    for (mask, a_s) in sums.iter().enumerate() {
        let sign = if (n - mask.count_ones() as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += sign * pochhammer(*a_s, k as u64);
    }
    Ok(acc)
}

/// Masses `w_T` of the open faces `F_T` under the quasi-Bernoulli law of
/// order `k`, for every nonempty `T`.
///
/// Computed as the Möbius inversion of `T -> (a_T)_k / (a)_k`, which is the
/// same inclusion–exclusion as `P_k((a_i)_{i in T}) / (a)_k` done with a fast
/// subset transform. Faces with more than `k` vertices get exactly zero.
pub fn face_weights(k: u32, params: &DirichletParams) -> Result<BTreeMap<FaceSubset, f64>> {
    if k == 0 {
        return Err(Error::InvalidParams("face weights need k >= 1".into()));
    }
    let n = params.dim();
    check_subset_coords(n)?;
    let denom = pochhammer(params.total(), k as u64);
    let mut w: Vec<f64> = subset_sums(params.a())
        .into_iter()
        .map(|a_s| pochhammer(a_s, k as u64) / denom)
        .collect();
    for bit in 0..n {
        let b = 1usize << bit;
        for mask in 0..(1usize << n) {
            if mask & b != 0 {
                w[mask] -= w[mask ^ b];
            }
        }
    }
    let mut out = BTreeMap::new();
    for (mask, wt) in w.into_iter().enumerate().skip(1) {
        let face = FaceSubset::from_mask(mask as u64)?;
        let value = if face.len() > k as usize { 0.0 } else { wt };
        debug_assert!(value >= -1e-12, "negative face weight {value} on {face}");
        out.insert(face, value);
    }
    Ok(out)
}

/// Sums face weights by face dimension: entry `j` is the total weight of faces
/// with `j + 1` vertices.
pub fn weights_by_dimension(weights: &BTreeMap<FaceSubset, f64>, dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (face, w) in weights {
        out[face.len() - 1] += w;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: &[f64]) -> DirichletParams {
        DirichletParams::new(a.to_vec()).unwrap()
    }

    #[test]
    fn compositions_small_cases() {
        let c: Vec<Vec<u32>> = enumerate_compositions(2, 2)
            .unwrap()
            .into_iter()
            .map(|c| c.parts().to_vec())
            .collect();
        assert_eq!(c, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(enumerate_compositions(3, 2).unwrap().len(), 6);
        let single = enumerate_compositions(1, 5).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].parts(), &[5]);
        assert_eq!(enumerate_compositions(3, 0).unwrap().len(), 1);
    }

    #[test]
    fn compositions_are_strictly_descending() {
        let all = enumerate_compositions(4, 5).unwrap();
        assert_eq!(all.len() as u128, composition_count(4, 5));
        for pair in all.windows(2) {
            assert!(pair[0].parts() > pair[1].parts());
        }
    }

    #[test]
    fn composition_cap_is_enforced() {
        let err = enumerate_compositions_capped(3, 10, 10).unwrap_err();
        assert_eq!(err, Error::EnumerationTooLarge { count: 66, cap: 10 });
        assert!(enumerate_compositions(30, 40).is_err());
    }

    #[test]
    fn portraits_small_cases() {
        let p3: Vec<Vec<u32>> = enumerate_portraits(3)
            .unwrap()
            .iter()
            .map(|p| p.multiplicities().to_vec())
            .collect();
        assert_eq!(p3, vec![vec![3, 0, 0], vec![1, 1, 0], vec![0, 0, 1]]);
        assert_eq!(enumerate_portraits(1).unwrap()[0].multiplicities(), &[1]);
        assert!(enumerate_portraits(0).is_err());
    }

    #[test]
    fn partition_counts_match_enumeration() {
        // brute force: count nonincreasing sequences summing to k
        fn brute(rem: u32, max: u32) -> u64 {
            if rem == 0 {
                return 1;
            }
            (1..=rem.min(max)).map(|p| brute(rem - p, p)).sum()
        }
        for k in 1..=20 {
            let n = enumerate_portraits(k).unwrap().len() as u64;
            assert_eq!(n, brute(k, k));
            assert_eq!(n as u128, partition_count(k));
        }
        assert_eq!(enumerate_portraits(4).unwrap().len(), 5);
        assert_eq!(partition_count(60), 966467);
        assert!(enumerate_portraits(100).is_err());
    }

    #[test]
    fn block_sizes_roundtrip() {
        // 1+1+2+2+2+5 = 13
        let mut m = vec![0; 13];
        m[0] = 2;
        m[1] = 3;
        m[4] = 1;
        let p = PartitionPortrait::new(m).unwrap();
        assert_eq!(p.block_sizes().sizes(), &[1, 1, 2, 2, 2, 5]);
        assert_eq!(p.blocks(), 6);
        assert_eq!(PartitionPortrait::from_block_sizes(&[5, 2, 1, 2, 1, 2]).unwrap(), p);
        assert!(PartitionPortrait::new(vec![1, 1]).is_err());
    }

    #[test]
    fn composition_weight_examples() {
        let p = params(&[0.5, 0.5]);
        let b = Composition::new(vec![2, 0]).unwrap();
        assert!((composition_weight(&b, &p).unwrap() - 0.375).abs() < 1e-15);
        let single = params(&[3.7]);
        let b = Composition::new(vec![6]).unwrap();
        assert!((composition_weight(&b, &single).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn composition_weights_sum_to_one_large_k() {
        // log-space path
        let p = params(&[0.7, 1.3]);
        let total: f64 = enumerate_compositions(2, 100)
            .unwrap()
            .iter()
            .map(|b| composition_weight(b, &p).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-10, "{total}");
    }

    #[test]
    fn ewens_k3_a1() {
        let ps = enumerate_portraits(3).unwrap();
        let probs: Vec<f64> = ps.iter().map(|m| ewens_pmf(m, 1.0).unwrap()).collect();
        let expected = [1.0 / 6.0, 0.5, 1.0 / 3.0];
        for (p, e) in probs.iter().zip(expected) {
            assert!((p - e).abs() < 1e-15);
        }
        let m = PartitionPortrait::new(vec![0, 1]).unwrap();
        assert!((ewens_pmf(&m, 1.0).unwrap() - 0.5).abs() < 1e-15);
        let one = PartitionPortrait::new(vec![1]).unwrap();
        assert_eq!(ewens_pmf(&one, 2.3).unwrap(), 1.0);
        assert!(ewens_pmf(&one, 0.0).is_err());
    }

    #[test]
    fn ewens_k3_a2() {
        let ps = enumerate_portraits(3).unwrap();
        let expected = [8.0 / 24.0, 12.0 / 24.0, 4.0 / 24.0];
        for (m, e) in ps.iter().zip(expected) {
            assert!((ewens_pmf(m, 2.0).unwrap() - e).abs() < 1e-15);
        }
    }

    #[test]
    fn ewens_sums_to_one_log_space() {
        let total: f64 = enumerate_portraits(70)
            .unwrap()
            .iter()
            .map(|m| ewens_pmf(m, 1.5).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-9, "{total}");
    }

    #[test]
    fn pk_examples() {
        assert_eq!(pk_polynomial(1, &[0.3, 0.9]).unwrap(), 0.0);
        assert!((pk_polynomial(2, &[0.4, 1.7]).unwrap() - 2.0 * 0.4 * 1.7).abs() < 1e-14);
        assert!((pk_polynomial(3, &[1.0, 1.0]).unwrap() - 12.0).abs() < 1e-12);
        assert!(pk_polynomial(0, &[1.0; 22]).is_err());
    }

    #[test]
    fn face_weights_half_half_k2() {
        let w = face_weights(2, &params(&[0.5, 0.5])).unwrap();
        let get = |idx: &[usize]| w[&FaceSubset::new(idx, 2).unwrap()];
        assert!((get(&[0]) - 0.375).abs() < 1e-15);
        assert!((get(&[1]) - 0.375).abs() < 1e-15);
        assert!((get(&[0, 1]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn face_weights_k1_is_bernoulli() {
        let p = params(&[1.0, 2.0, 3.0]);
        let w = face_weights(1, &p).unwrap();
        for (face, wt) in &w {
            if face.len() == 1 {
                let i = face.indices()[0];
                assert!((wt - p.a()[i] / 6.0).abs() < 1e-15);
            } else {
                assert_eq!(*wt, 0.0);
            }
        }
    }

    #[test]
    fn face_weights_with_zero_parameter() {
        let w = face_weights(3, &params(&[1.0, 0.0, 2.0])).unwrap();
        for (face, wt) in &w {
            if face.contains(1) {
                assert!(wt.abs() < 1e-15, "{face}: {wt}");
            }
        }
        let total: f64 = w.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
