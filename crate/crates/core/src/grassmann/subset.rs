use std::fmt;

use crate::error::{Error, Result};

/// Largest generator count representable by [`IndexSubset`].
pub const MAX_SUBSET_MODES: usize = 16;

/// A set of generator indices in `1..=m`, stored as a bitmask (index `i` is bit `i-1`).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSubset(u32);

impl IndexSubset {
    pub const EMPTY: IndexSubset = IndexSubset(0);

    pub fn from_bits(bits: u32) -> Self {
        IndexSubset(bits)
    }

    /// Builds a subset from 1-based indices, rejecting anything outside `1..=m`.
    /// Repeated indices are an error: a Grassmann monomial with a repeated factor is
    /// zero and should not be written down.
    pub fn from_indices(indices: &[usize], m: usize) -> Result<Self> {
        let mut bits = 0u32;
        for &i in indices {
            if i == 0 || i > m || i > MAX_SUBSET_MODES {
                return Err(Error::IndexOutOfRange { index: i, m });
            }
            let b = 1u32 << (i - 1);
            if bits & b != 0 {
                return Err(Error::Invalid(format!("index {i} repeated in subset")));
            }
            bits |= b;
        }
        Ok(IndexSubset(bits))
    }

    /// The full set `{1..m}`.
    pub fn full(m: usize) -> Self {
        IndexSubset(if m >= 32 { u32::MAX } else { (1u32 << m) - 1 })
    }

    pub fn singleton(i: usize) -> Self {
        debug_assert!(i >= 1);
        IndexSubset(1u32 << (i - 1))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=32).contains(&i) && self.0 & (1u32 << (i - 1)) != 0
    }

    pub fn max_index(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    pub fn union(self, other: Self) -> Self {
        IndexSubset(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        IndexSubset(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        IndexSubset(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Ascending 1-based indices.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i + 1)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of this set (including empty and itself), in increasing bit order.
    pub fn subsets(self) -> impl Iterator<Item = IndexSubset> {
        let full = self.0;
        let mut sub = 0u32;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = IndexSubset(sub);
            if sub == full {
                done = true;
            } else {
                sub = (sub.wrapping_sub(full)) & full;
            }
            Some(out)
        })
    }
}

impl fmt::Debug for IndexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// `s_Q = |Q|(|Q|-1)/2`, the number of transpositions that reverse an ordered set.
pub fn half_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

pub fn parity(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Number of pairs `(a, b)` with `a ∈ A`, `b ∈ B`, `a > b`.
pub fn inversions(a: IndexSubset, b: IndexSubset) -> usize {
    let mut count = 0;
    let mut bb = b.0;
    while bb != 0 {
        let i = bb.trailing_zeros();
        bb &= bb - 1;
        count += if i >= 31 {
            0
        } else {
            (a.0 >> (i + 1)).count_ones() as usize
        };
    }
    count
}

/// Sign of sorting the concatenation of two ascending, disjoint index lists.
pub fn merge_sign(a: IndexSubset, b: IndexSubset) -> f64 {
    parity(inversions(a, b))
}

/// A normal-ordered monomial `Ψ̄_I Ψ_J`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub bar: IndexSubset,
    pub unbar: IndexSubset,
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        bar: IndexSubset::EMPTY,
        unbar: IndexSubset::EMPTY,
    };

    pub fn new(bar: IndexSubset, unbar: IndexSubset) -> Self {
        Monomial { bar, unbar }
    }

    pub fn from_indices(bar: &[usize], unbar: &[usize], m: usize) -> Result<Self> {
        Ok(Monomial {
            bar: IndexSubset::from_indices(bar, m)?,
            unbar: IndexSubset::from_indices(unbar, m)?,
        })
    }

    /// `ψ̄_i`
    pub fn psibar(i: usize) -> Self {
        Monomial::new(IndexSubset::singleton(i), IndexSubset::EMPTY)
    }

    /// `ψ_i`
    pub fn psi(i: usize) -> Self {
        Monomial::new(IndexSubset::EMPTY, IndexSubset::singleton(i))
    }

    /// `Ψ̄_M Ψ_M`
    pub fn top(m: usize) -> Self {
        let full = IndexSubset::full(m);
        Monomial::new(full, full)
    }

    pub fn degree(self) -> usize {
        self.bar.len() + self.unbar.len()
    }

    pub fn is_even(self) -> bool {
        self.degree().is_multiple_of(2)
    }

    pub fn max_index(self) -> usize {
        self.bar.max_index().max(self.unbar.max_index())
    }

    /// Dense index `bar·2^m + unbar`, used by the accumulation buffers.
    pub fn dense_index(self, m: usize) -> usize {
        ((self.bar.bits() as usize) << m) | self.unbar.bits() as usize
    }

    pub fn from_dense_index(idx: usize, m: usize) -> Self {
        let mask = (1usize << m) - 1;
        Monomial::new(
            IndexSubset::from_bits((idx >> m) as u32),
            IndexSubset::from_bits((idx & mask) as u32),
        )
    }

    /// All `4^m` monomials in dense-index order.
    pub fn all(m: usize) -> impl Iterator<Item = Monomial> {
        (0..1usize << (2 * m)).map(move |i| Monomial::from_dense_index(i, m))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bar.is_empty() && self.unbar.is_empty() {
            return write!(f, "1");
        }
        for i in self.bar.iter() {
            write!(f, "ψ̄{i}")?;
        }
        for j in self.unbar.iter() {
            write!(f, "ψ{j}")?;
        }
        Ok(())
    }
}

/// Product `(Ψ̄_I Ψ_J) ∧ (Ψ̄_K Ψ_L)` in the plain Grassmann algebra, as `(sign, result)`.
/// `None` when the product vanishes.
pub fn wedge(a: Monomial, b: Monomial) -> Option<(f64, Monomial)> {
    if !a.bar.is_disjoint(b.bar) || !a.unbar.is_disjoint(b.unbar) {
        return None;
    }
    let swap = a.unbar.len() * b.bar.len();
    let n = swap + inversions(a.bar, b.bar) + inversions(a.unbar, b.unbar);
    Some((
        parity(n),
        Monomial::new(a.bar.union(b.bar), a.unbar.union(b.unbar)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_roundtrip_and_order() {
        let s = IndexSubset::from_indices(&[3, 1, 5], 5).unwrap();
        assert_eq!(s.to_vec(), vec![1, 3, 5]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(3) && !s.contains(2));
        assert!(IndexSubset::from_indices(&[0], 3).is_err());
        assert!(IndexSubset::from_indices(&[4], 3).is_err());
        assert!(IndexSubset::from_indices(&[2, 2], 3).is_err());
    }

    #[test]
    fn subsets_enumerates_power_set() {
        let s = IndexSubset::from_indices(&[1, 3, 4], 4).unwrap();
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|t| t.difference(s).is_empty()));
        assert_eq!(IndexSubset::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn merge_sign_counts_transpositions() {
        let a = IndexSubset::from_indices(&[2, 4], 4).unwrap();
        let b = IndexSubset::from_indices(&[1, 3], 4).unwrap();
        // 2,4,1,3 -> needs (2,1),(4,1),(4,3) = 3 transpositions
        assert_eq!(inversions(a, b), 3);
        assert_eq!(merge_sign(a, b), -1.0);
        // 1,3,2,4 -> (3,2)
        assert_eq!(inversions(b, a), 1);
    }

    #[test]
    fn wedge_signs() {
        // ψ1 ∧ ψ̄1 = -ψ̄1ψ1
        let (s, r) = wedge(Monomial::psi(1), Monomial::psibar(1)).unwrap();
        assert_eq!(
            (s, r),
            (-1.0, Monomial::from_indices(&[1], &[1], 1).unwrap())
        );
        // ψ̄2 ∧ ψ̄1 = -ψ̄1ψ̄2
        let (s, _) = wedge(Monomial::psibar(2), Monomial::psibar(1)).unwrap();
        assert_eq!(s, -1.0);
        assert!(wedge(Monomial::psi(1), Monomial::psi(1)).is_none());
    }
}
