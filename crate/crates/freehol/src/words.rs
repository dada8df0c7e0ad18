//! Words of the free semigroup 𝔽ₙ⁺ on generators g₁,…,gₙ.
//!
//! Words index both series coefficients and Fock basis vectors. They are
//! stored as compact 1-based letter sequences; inside a fixed length k the
//! lexicographic rank (base-n digits `letter − 1`) gives the flat-array
//! index used by the block storage in [`crate::series`] and
//! [`crate::fock`].

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

/// Hard cap on the number of words materialized per homogeneous level.
/// Exceeding it is an error, never a silent truncation.
pub const ENUMERATION_CAP: u128 = 10_000_000;

/// Element of 𝔽ₙ⁺: a finite sequence of letters in `1..=n`. The empty word
/// is the semigroup identity g₀.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    /// The identity g₀.
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Single-letter word g_j (1-based). Letters are validated against an
    /// alphabet only where an `n` is in scope; see [`Word::new`].
    pub fn letter(j: usize) -> Self {
        debug_assert!(j >= 1 && j <= u8::MAX as usize);
        Word(vec![j as u8])
    }

    /// Build a word from 1-based letters, validating against alphabet size.
    pub fn new(letters: &[usize], n: usize) -> Result<Self> {
        for &l in letters {
            if l < 1 || l > n {
                return Err(Error::LetterOutOfRange { letter: l, n });
            }
        }
        Ok(Word(letters.iter().map(|&l| l as u8).collect()))
    }

    /// The letters, 1-based.
    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    /// |α|, the length.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True for the empty word (a synonym for [`Word::is_identity`]).
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// αβ.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// α̃ = g_{i_k}⋯g_{i_1} for α = g_{i_1}⋯g_{i_k}.
    pub fn reverse(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }

    /// Check all letters lie in `1..=n`.
    pub fn fits_alphabet(&self, n: usize) -> bool {
        self.0.iter().all(|&l| l as usize >= 1 && l as usize <= n)
    }

    /// Lexicographic rank of this word among all words of its length:
    /// the base-n number with digits `letter − 1`.
    pub fn lex_rank(&self, n: usize) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &l| acc * n + (l as usize - 1))
    }

    /// Inverse of [`Word::lex_rank`] at length `k`.
    pub fn from_rank(n: usize, k: usize, mut rank: usize) -> Word {
        let mut v = vec![0u8; k];
        for i in (0..k).rev() {
            v[i] = (rank % n) as u8 + 1;
            rank /= n;
        }
        Word(v)
    }

    /// χ(g_j, m, ω): insert letter j at position m (prepend for m = 0,
    /// append for m = |ω|, interleave otherwise).
    pub fn insert(&self, j: usize, m: usize) -> Result<Word> {
        if m > self.0.len() {
            return Err(Error::PositionOutOfRange {
                m,
                len: self.0.len(),
            });
        }
        debug_assert!(j >= 1 && j <= u8::MAX as usize);
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0[..m]);
        v.push(j as u8);
        v.extend_from_slice(&self.0[m..]);
        Ok(Word(v))
    }

    /// All words obtained by deleting one occurrence of letter j, with
    /// multiplicity (one deletion per occurrence).
    pub fn deletions(&self, j: usize) -> WordMultiset {
        let mut out = WordMultiset::default();
        for (pos, &l) in self.0.iter().enumerate() {
            if l as usize == j {
                let mut v = Vec::with_capacity(self.0.len() - 1);
                v.extend_from_slice(&self.0[..pos]);
                v.extend_from_slice(&self.0[pos + 1..]);
                out.add(Word(v), 1);
            }
        }
        out
    }

    /// Multi-index of letter occurrence counts (p₁,…,pₙ).
    pub fn letter_counts(&self, n: usize) -> MultiIndex {
        let mut p = vec![0usize; n];
        for &l in &self.0 {
            let idx = l as usize - 1;
            if idx < n {
                p[idx] += 1;
            }
        }
        MultiIndex::new(p)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for &l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Number of words of length `k` over `n` letters, as u128 (cap checks).
pub fn level_count(n: usize, k: usize) -> u128 {
    (n as u128).pow(k as u32)
}

/// Number of words of length `k` over `n` letters as usize, after the cap
/// check callers should already have performed.
pub(crate) fn level_len(n: usize, k: usize) -> usize {
    (n as u128).pow(k as u32) as usize
}

/// All nᵏ words of length k in lexicographic order.
pub fn enumerate(n: usize, k: usize) -> Result<Vec<Word>> {
    let count = level_count(n, k);
    if count > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            count,
            cap: ENUMERATION_CAP,
        });
    }
    let count = count as usize;
    let mut out = Vec::with_capacity(count);
    for rank in 0..count {
        out.push(Word::from_rank(n, k, rank));
    }
    Ok(out)
}

/// A finite multiset of words (deletion results and similar).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WordMultiset(BTreeMap<Word, usize>);

impl WordMultiset {
    pub fn add(&mut self, w: Word, mult: usize) {
        if mult > 0 {
            *self.0.entry(w).or_insert(0) += mult;
        }
    }

    pub fn multiplicity(&self, w: &Word) -> usize {
        self.0.get(w).copied().unwrap_or(0)
    }

    /// Total multiplicity.
    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, usize)> {
        self.0.iter().map(|(w, &m)| (w, m))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

/// Guard for exact integer factorials: 20! is the largest fitting u64; we
/// use u128 internally but keep the documented bound conservative.
pub const FACTORIAL_GUARD: usize = 20;

/// Multi-index 𝐩 = (p₁,…,pₙ) of letter counts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(p: Vec<usize>) -> Self {
        MultiIndex(p)
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// |𝐩| = Σ pᵢ.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// 𝐩! = Π pᵢ!, exact. Errors beyond the |𝐩| ≤ 20 guard.
    pub fn factorial(&self) -> Result<u128> {
        self.guard()?;
        Ok(self.0.iter().map(|&p| fact(p)).product())
    }

    /// |𝐩|!/𝐩!, the cardinality of Λ_𝐩, exact.
    pub fn multinomial(&self) -> Result<u128> {
        self.guard()?;
        Ok(fact(self.total()) / self.0.iter().map(|&p| fact(p)).product::<u128>())
    }

    fn guard(&self) -> Result<()> {
        let total = self.total();
        if total > FACTORIAL_GUARD {
            return Err(Error::FactorialGuard {
                total,
                max: FACTORIAL_GUARD,
            });
        }
        Ok(())
    }
}

fn fact(p: usize) -> u128 {
    (1..=p as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(letters: &[usize]) -> Word {
        Word::new(letters, 6).unwrap()
    }

    #[test]
    fn concat_examples() {
        assert_eq!(w(&[1, 2]).concat(&Word::identity()), w(&[1, 2]));
        assert_eq!(Word::identity().concat(&Word::identity()), Word::identity());
        assert_eq!(w(&[1]).concat(&w(&[2, 1])), w(&[1, 2, 1]));
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(w(&[1, 2, 3]).reverse(), w(&[3, 2, 1]));
        assert_eq!(Word::identity().reverse(), Word::identity());
        assert_eq!(w(&[1, 1]).reverse(), w(&[1, 1]));
    }

    #[test]
    fn enumerate_small_levels() {
        assert_eq!(enumerate(2, 0).unwrap(), vec![Word::identity()]);
        assert_eq!(enumerate(2, 1).unwrap(), vec![w(&[1]), w(&[2])]);
        assert_eq!(
            enumerate(2, 2).unwrap(),
            vec![w(&[1, 1]), w(&[1, 2]), w(&[2, 1]), w(&[2, 2])]
        );
    }

    #[test]
    fn enumerate_respects_cap() {
        // 10^8 words of length 8 over 10 letters would blow the cap.
        let err = enumerate(10, 8).unwrap_err();
        assert!(matches!(err, Error::EnumerationCap { .. }));
    }

    #[test]
    fn insertion_cases() {
        assert_eq!(w(&[2]).insert(1, 0).unwrap(), w(&[1, 2]));
        assert_eq!(w(&[2]).insert(1, 1).unwrap(), w(&[2, 1]));
        assert_eq!(w(&[1, 1]).insert(2, 1).unwrap(), w(&[1, 2, 1]));
        assert!(w(&[1]).insert(2, 5).is_err());
    }

    #[test]
    fn deletion_examples() {
        // Deleting Z₁ from Z₁Z₂Z₁Z₁: one copy of g₂g₁g₁, two of g₁g₂g₁.
        let d = w(&[1, 2, 1, 1]).deletions(1);
        assert_eq!(d.multiplicity(&w(&[2, 1, 1])), 1);
        assert_eq!(d.multiplicity(&w(&[1, 2, 1])), 2);
        assert_eq!(d.total(), 3);

        assert!(w(&[1, 1]).deletions(2).is_empty());

        let d = w(&[1]).deletions(1);
        assert_eq!(d.multiplicity(&Word::identity()), 1);
        assert_eq!(d.total(), 1);
    }

    #[test]
    fn letter_count_examples() {
        assert_eq!(w(&[1, 2, 1]).letter_counts(2), MultiIndex::new(vec![2, 1]));
        assert_eq!(
            Word::identity().letter_counts(3),
            MultiIndex::new(vec![0, 0, 0])
        );
    }

    #[test]
    fn lambda_cardinality_small() {
        // Words with counts (1,1) over n = 2: g₁g₂ and g₂g₁.
        let p = MultiIndex::new(vec![1, 1]);
        let members: Vec<Word> = enumerate(2, 2)
            .unwrap()
            .into_iter()
            .filter(|wd| wd.letter_counts(2) == p)
            .collect();
        assert_eq!(members, vec![w(&[1, 2]), w(&[2, 1])]);
        assert_eq!(p.multinomial().unwrap(), 2);
    }

    #[test]
    fn multinomial_matches_exhaustive_enumeration() {
        // card Λ_𝐩 = |𝐩|!/𝐩! for every 𝐩 with |𝐩| ≤ 8, n ≤ 3.
        for n in 1..=3usize {
            for k in 0..=8usize {
                let words = enumerate(n, k).unwrap();
                let mut by_counts: BTreeMap<MultiIndex, usize> = BTreeMap::new();
                for wd in &words {
                    *by_counts.entry(wd.letter_counts(n)).or_insert(0) += 1;
                }
                for (p, card) in by_counts {
                    assert_eq!(p.multinomial().unwrap(), card as u128, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn factorial_guard_trips() {
        let p = MultiIndex::new(vec![21]);
        assert!(matches!(p.factorial(), Err(Error::FactorialGuard { .. })));
        let p = MultiIndex::new(vec![10, 10, 1]);
        assert!(p.multinomial().is_err());
    }

    #[test]
    fn rank_runs_lexicographically() {
        for n in 1..=4usize {
            for k in 0..=4usize {
                let words = enumerate(n, k).unwrap();
                for (rank, wd) in words.iter().enumerate() {
                    assert_eq!(wd.lex_rank(n), rank);
                    assert_eq!(&Word::from_rank(n, k, rank), wd);
                }
            }
        }
    }

    #[test]
    fn insertion_deletion_duality_exhaustive() {
        // For all β with |β| = k and all α with |α| = k+1: the number of
        // positions m with χ(g_j, m, β) = α equals the multiplicity of β
        // among the j-deletions of α.
        for n in 1..=3usize {
            for k in 0..=3usize {
                let betas = enumerate(n, k).unwrap();
                let alphas = enumerate(n, k + 1).unwrap();
                for j in 1..=n {
                    for beta in &betas {
                        for alpha in &alphas {
                            let inserts = (0..=k)
                                .filter(|&m| &beta.insert(j, m).unwrap() == alpha)
                                .count();
                            assert_eq!(inserts, alpha.deletions(j).multiplicity(beta));
                        }
                    }
                }
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_word(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
            proptest::collection::vec(1..=n, 0..=max_len)
                .prop_map(move |ls| Word::new(&ls, n).unwrap())
        }

        proptest! {
            #[test]
            fn concat_associative(a in arb_word(3, 6), b in arb_word(3, 6), c in arb_word(3, 6)) {
                prop_assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
            }

            #[test]
            fn identity_is_neutral(a in arb_word(3, 8)) {
                prop_assert_eq!(a.concat(&Word::identity()), a.clone());
                prop_assert_eq!(Word::identity().concat(&a), a);
            }

            #[test]
            fn reverse_antihomomorphism(a in arb_word(3, 6), b in arb_word(3, 6)) {
                prop_assert_eq!(a.concat(&b).reverse(), b.reverse().concat(&a.reverse()));
                prop_assert_eq!(a.reverse().reverse(), a);
            }

            #[test]
            fn deletions_count_occurrences(a in arb_word(3, 8), j in 1usize..=3) {
                let occurrences = a.letters().iter().filter(|&&l| l as usize == j).count();
                prop_assert_eq!(a.deletions(j).total(), occurrences);
                prop_assert_eq!(a.letter_counts(3).counts()[j - 1], occurrences);
            }
        }
    }
}
