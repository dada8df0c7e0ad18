//! Truncated full Fock space over n letters and the shift operators on it.
//!
//! The space keeps the levels 0..=N of the word basis, ordered by (level,
//! lexicographic rank); the vacuum sits at index 0. Left and right creation
//! operators become partial isometries: a shift that would leave the top
//! level annihilates the vector. Series are realized as dense operators on
//! `C^q ⊗ F` by [`assemble`]; compressing `F(S)` to levels `≤ N` and
//! evaluating `F` on the compressed shifts produce the same matrix, because
//! shifts only move mass upward through the levels.

use crate::error::{Error, Result};
use crate::linalg;
use crate::series::FreeSeries;
use crate::words::{self, Word};
use crate::{C64, CMatrix};

/// Levels 0..=N of the word basis of the full Fock space over n letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedFock {
    n: usize,
    level: usize,
    /// `offset[k]` = index of the first level-k basis vector; an extra final
    /// entry holds the total dimension.
    offset: Vec<usize>,
}

impl TruncatedFock {
    pub fn new(n: usize, level: usize) -> Result<Self> {
        assert!(n >= 1, "alphabet must have at least one letter");
        let mut offset = Vec::with_capacity(level + 2);
        let mut total: u128 = 0;
        for k in 0..=level {
            offset.push(total as usize);
            total += words::level_count(n, k);
            if total > words::ENUMERATION_CAP {
                return Err(Error::EnumerationCap {
                    count: total,
                    cap: words::ENUMERATION_CAP,
                });
            }
        }
        offset.push(total as usize);
        Ok(TruncatedFock { n, level, offset })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Total dimension Σ_{k≤N} nᵏ.
    pub fn dim(&self) -> usize {
        *self.offset.last().unwrap()
    }

    /// Index of the first level-k basis vector.
    pub fn level_offset(&self, k: usize) -> usize {
        self.offset[k]
    }

    /// Index of the basis vector e_w, if w fits in the truncation.
    pub fn basis_rank(&self, w: &Word) -> Option<usize> {
        (w.len() <= self.level && w.fits_alphabet(self.n))
            .then(|| self.offset[w.len()] + w.lex_rank(self.n))
    }

    /// Word labelling basis vector `idx`.
    pub fn basis_word(&self, idx: usize) -> Word {
        let k = self.level_of(idx);
        Word::from_rank(self.n, k, idx - self.offset[k])
    }

    /// Level of basis vector `idx`.
    pub fn level_of(&self, idx: usize) -> usize {
        assert!(idx < self.dim(), "basis index out of range");
        match self.offset.binary_search(&idx) {
            Ok(k) => k.min(self.level),
            Err(k) => k - 1,
        }
    }

    /// Compressed left creation by the word α: `e_β ↦ e_{αβ}` while the
    /// result fits, zero otherwise. `monomial_shift(α)` equals the product
    /// of the single-letter shifts along α.
    pub fn monomial_shift(&self, alpha: &Word) -> CMatrix {
        let dim = self.dim();
        let mut m = CMatrix::zeros(dim, dim);
        let k = alpha.len();
        if k > self.level || !alpha.fits_alphabet(self.n) {
            return m;
        }
        let ra = alpha.lex_rank(self.n);
        for j in 0..=(self.level - k) {
            let len_j = words::level_len(self.n, j);
            let src = self.offset[j];
            let tgt = self.offset[j + k] + ra * len_j;
            for rb in 0..len_j {
                m[(tgt + rb, src + rb)] = C64::new(1.0, 0.0);
            }
        }
        m
    }

    /// Compressed right creation by β: `e_α ↦ e_{αβ}` while it fits.
    pub fn monomial_right_shift(&self, beta: &Word) -> CMatrix {
        let dim = self.dim();
        let mut m = CMatrix::zeros(dim, dim);
        let k = beta.len();
        if k > self.level || !beta.fits_alphabet(self.n) {
            return m;
        }
        let rb = beta.lex_rank(self.n);
        let len_k = words::level_len(self.n, k);
        for j in 0..=(self.level - k) {
            let src = self.offset[j];
            let tgt = self.offset[j + k];
            for ra in 0..words::level_len(self.n, j) {
                m[(tgt + ra * len_k + rb, src + ra)] = C64::new(1.0, 0.0);
            }
        }
        m
    }

    /// The i-th compressed left shift S_i (i is 1-based).
    pub fn left_shift(&self, i: usize) -> Result<CMatrix> {
        let w = Word::new(&[i], self.n)?;
        Ok(self.monomial_shift(&w))
    }

    /// The i-th compressed right shift R_i.
    pub fn right_shift(&self, i: usize) -> Result<CMatrix> {
        let w = Word::new(&[i], self.n)?;
        Ok(self.monomial_right_shift(&w))
    }

    /// All left shifts S_1..S_n.
    pub fn shift_tuple(&self) -> Vec<CMatrix> {
        (1..=self.n)
            .map(|i| self.left_shift(i).expect("letter in range"))
            .collect()
    }

    /// All right shifts R_1..R_n.
    pub fn right_shift_tuple(&self) -> Vec<CMatrix> {
        (1..=self.n)
            .map(|i| self.right_shift(i).expect("letter in range"))
            .collect()
    }

    /// Orthogonal projection onto the levels 0..=k.
    pub fn projection_up_to(&self, k: usize) -> CMatrix {
        let dim = self.dim();
        let cut = self.offset[k.min(self.level) + 1];
        CMatrix::from_fn(dim, dim, |r, c| {
            if r == c && r < cut {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// The vacuum basis vector as a column.
    pub fn vacuum(&self) -> nalgebra::DVector<C64> {
        let mut v = nalgebra::DVector::zeros(self.dim());
        v[0] = C64::new(1.0, 0.0);
        v
    }
}

/// A dense operator on `C^aux ⊗ F` (or `F ⊗ C^aux`; each constructor
/// documents which tensor leg varies fastest).
#[derive(Clone, Debug)]
pub struct FockOperator {
    space: TruncatedFock,
    aux: usize,
    matrix: CMatrix,
}

impl FockOperator {
    pub(crate) fn new(space: TruncatedFock, aux: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), space.dim() * aux);
        debug_assert_eq!(matrix.ncols(), space.dim() * aux);
        FockOperator { space, aux, matrix }
    }

    pub fn space(&self) -> &TruncatedFock {
        &self.space
    }

    /// Dimension of the auxiliary tensor factor.
    pub fn aux(&self) -> usize {
        self.aux
    }

    /// Total (square) matrix dimension `aux · dim(F)`.
    pub fn total_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Operator norm (orientation of the tensor legs is irrelevant).
    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }

    /// Norm of the k-th power without materializing it: above the dense
    /// cutoff the power is applied as k successive mat-vecs inside a power
    /// iteration.
    pub fn power_norm(&self, k: usize) -> f64 {
        if k == 0 {
            return if self.total_dim() == 0 { 0.0 } else { 1.0 };
        }
        if self.total_dim() <= linalg::DENSE_NORM_LIMIT {
            let mut p = self.matrix.clone();
            for _ in 1..k {
                p = &p * &self.matrix;
            }
            linalg::op_norm(&p)
        } else {
            let a = &self.matrix;
            linalg::power_norm_apply(
                self.total_dim(),
                |v| {
                    let mut w = v.clone();
                    for _ in 0..k {
                        w = a * &w;
                    }
                    w
                },
                |v| {
                    let mut w = v.clone();
                    for _ in 0..k {
                        w = a.ad_mul(&w);
                    }
                    w
                },
            )
        }
    }
}

/// Realize the dilated series on the truncated Fock space:
/// `F(r·S) = Σ_{|α| ≤ min(D, N)} r^{|α|} A_(α) ⊗ S_α`.
///
/// Layout: coefficient-major — the operator acts on `C^q ⊗ F`, with matrix
/// index `coefficient_row · dim(F) + fock_rank`. Any tail descriptor on the
/// series is ignored here (this is the stored polynomial part); callers that
/// need tail accounting read it off the series itself.
pub fn assemble(series: &FreeSeries, r: f64, space: &TruncatedFock) -> Result<FockOperator> {
    if series.n() != space.n() {
        return Err(Error::ShapeMismatch(format!(
            "series over {} letters, Fock space over {}",
            series.n(),
            space.n()
        )));
    }
    assert!(r >= 0.0, "dilation radius must be non-negative");
    let q = series.q();
    let n = space.n();
    let dim = space.dim();
    let mut m = CMatrix::zeros(q * dim, q * dim);
    for k in 0..=series.max_degree().min(space.level()) {
        let Some(block) = series.block(k) else {
            continue;
        };
        let rk = C64::new(r.powi(k as i32), 0.0);
        for (ra, a) in block.iter().enumerate() {
            if a.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                continue;
            }
            for j in 0..=(space.level() - k) {
                let len_j = words::level_len(n, j);
                let src = space.level_offset(j);
                let tgt = space.level_offset(j + k) + ra * len_j;
                for rb in 0..len_j {
                    for p in 0..q {
                        for c in 0..q {
                            m[(p * dim + tgt + rb, c * dim + src + rb)] += a[(p, c)] * rk;
                        }
                    }
                }
            }
        }
    }
    Ok(FockOperator::new(space.clone(), q, m))
}

/// `‖F(S^{(N)})‖` — the norm of the series realized at the boundary of the
/// truncated ball. Converges upward to the full boundary norm as N grows.
pub fn boundary_norm(series: &FreeSeries, space: &TruncatedFock) -> Result<f64> {
    Ok(assemble(series, 1.0, space)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TailDescriptor;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    fn w(letters: &[usize]) -> Word {
        Word::new(letters, 4).unwrap()
    }

    #[test]
    fn basis_enumeration_and_indexing() {
        let f = TruncatedFock::new(2, 2).unwrap();
        assert_eq!(f.dim(), 7);
        let expected = [
            Word::identity(),
            w(&[1]),
            w(&[2]),
            w(&[1, 1]),
            w(&[1, 2]),
            w(&[2, 1]),
            w(&[2, 2]),
        ];
        for (idx, word) in expected.iter().enumerate() {
            assert_eq!(f.basis_rank(word), Some(idx));
            assert_eq!(&f.basis_word(idx), word);
            assert_eq!(f.level_of(idx), word.len());
        }
        assert_eq!(f.basis_rank(&w(&[1, 1, 1])), None);
    }

    #[test]
    fn left_shift_action_and_truncation() {
        let f = TruncatedFock::new(2, 2).unwrap();
        let s1 = f.left_shift(1).unwrap();
        // S₁ e_∅ = e_1
        assert_eq!(s1[(1, 0)], one());
        // S₁ e_2 = e_12
        let src = f.basis_rank(&w(&[2])).unwrap();
        let tgt = f.basis_rank(&w(&[1, 2])).unwrap();
        assert_eq!(s1[(tgt, src)], one());
        // Top level is annihilated: the column of e_12 is zero.
        let top = f.basis_rank(&w(&[1, 2])).unwrap();
        assert!(s1.column(top).iter().all(|z| z.re == 0.0 && z.im == 0.0));
    }

    #[test]
    fn shifts_are_partial_isometries_with_orthogonal_ranges() {
        let f = TruncatedFock::new(2, 3).unwrap();
        let shifts = f.shift_tuple();
        let p_below_top = f.projection_up_to(f.level() - 1);
        for (i, si) in shifts.iter().enumerate() {
            for (j, sj) in shifts.iter().enumerate() {
                let prod = si.ad_mul(sj);
                if i == j {
                    assert!((prod - &p_below_top).norm() < 1e-14);
                } else {
                    assert!(prod.norm() < 1e-14);
                }
            }
        }
        // Σ S_i S_iᴴ projects onto the levels 1..=N.
        let mut sum = CMatrix::zeros(f.dim(), f.dim());
        for si in &shifts {
            sum += si * si.adjoint();
        }
        let p_levels_1_up = f.projection_up_to(f.level()) - f.projection_up_to(0);
        assert!((sum - p_levels_1_up).norm() < 1e-14);
    }

    #[test]
    fn monomial_shift_is_product_of_letter_shifts() {
        let f = TruncatedFock::new(2, 3).unwrap();
        for len_a in 0..=2usize {
            for ra in 0..words::level_len(2, len_a) {
                let alpha = Word::from_rank(2, len_a, ra);
                let mut product = CMatrix::identity(f.dim(), f.dim());
                for &l in alpha.letters() {
                    product = &product * &f.left_shift(l as usize).unwrap();
                }
                assert!(
                    (f.monomial_shift(&alpha) - product).norm() < 1e-14,
                    "α = {alpha}"
                );
            }
        }
    }

    #[test]
    fn monomial_shift_concatenates() {
        let f = TruncatedFock::new(2, 4).unwrap();
        for la in 0..=2usize {
            for ra in 0..words::level_len(2, la) {
                for lb in 0..=2usize {
                    for rb in 0..words::level_len(2, lb) {
                        let a = Word::from_rank(2, la, ra);
                        let b = Word::from_rank(2, lb, rb);
                        let lhs = f.monomial_shift(&a.concat(&b));
                        let rhs = &f.monomial_shift(&a) * &f.monomial_shift(&b);
                        assert!((lhs - rhs).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn left_and_right_shifts_commute() {
        let f = TruncatedFock::new(2, 3).unwrap();
        for i in 1..=2 {
            for j in 1..=2 {
                let s = f.left_shift(i).unwrap();
                let r = f.right_shift(j).unwrap();
                assert!((&s * &r - &r * &s).norm() < 1e-14, "i={i}, j={j}");
            }
        }
    }

    #[test]
    fn right_shift_action() {
        let f = TruncatedFock::new(2, 2).unwrap();
        let r2 = f.right_shift(2).unwrap();
        let src = f.basis_rank(&w(&[1])).unwrap();
        let tgt = f.basis_rank(&w(&[1, 2])).unwrap();
        assert_eq!(r2[(tgt, src)], one());
    }

    #[test]
    fn assemble_constant_plus_letter() {
        let f = FreeSeries::scalar_poly(2, &[(Word::identity(), one()), (w(&[1]), one())])
            .unwrap();
        let space = TruncatedFock::new(2, 3).unwrap();
        let op = assemble(&f, 1.0, &space).unwrap();
        let expected = CMatrix::identity(space.dim(), space.dim()) + space.left_shift(1).unwrap();
        assert!((op.matrix() - expected).norm() < 1e-14);
    }

    #[test]
    fn assemble_commutes_with_dilation() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        let mut s = FreeSeries::zero(2, 1, 3);
        for k in 0..=3usize {
            for rank in 0..words::level_len(2, k) {
                s.set_coeff(
                    &Word::from_rank(2, k, rank),
                    CMatrix::from_element(1, 1, C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)),
                )
                .unwrap();
            }
        }
        let space = TruncatedFock::new(2, 4).unwrap();
        let a = assemble(&s, 0.6, &space).unwrap();
        let b = assemble(&s.dilate(0.6), 1.0, &space).unwrap();
        assert!((a.matrix() - b.matrix()).norm() < 1e-13);
    }

    #[test]
    fn homogeneous_norm_equals_block_norm() {
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        for q in [1usize, 2] {
            for k in 1..=3usize {
                let mut s = FreeSeries::zero(2, q, k);
                for rank in 0..words::level_len(2, k) {
                    let m = CMatrix::from_fn(q, q, |_, _| {
                        C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                    });
                    s.set_coeff(&Word::from_rank(2, k, rank), m).unwrap();
                }
                for extra in 0..=2usize {
                    let space = TruncatedFock::new(2, k + extra).unwrap();
                    let norm = assemble(&s, 1.0, &space).unwrap().norm();
                    assert_relative_eq!(norm, s.block_norm(k), max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn norm_is_monotone_in_radius() {
        let mut rng = ChaCha12Rng::seed_from_u64(47);
        let mut s = FreeSeries::zero(2, 1, 4);
        for k in 0..=4usize {
            for rank in 0..words::level_len(2, k) {
                s.set_coeff(
                    &Word::from_rank(2, k, rank),
                    CMatrix::from_element(1, 1, C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)),
                )
                .unwrap();
            }
        }
        let space = TruncatedFock::new(2, 4).unwrap();
        let mut last = 0.0;
        for r in [0.0, 0.2, 0.5, 0.8, 1.0] {
            let norm = assemble(&s, r, &space).unwrap().norm();
            assert!(norm >= last - 1e-12, "r = {r}");
            last = norm;
        }
    }

    #[test]
    fn vacuum_compression_reads_off_constant_term() {
        let mut s = FreeSeries::zero(2, 2, 1);
        let a0 = CMatrix::from_fn(2, 2, |r, c| C64::new((r * 2 + c) as f64, 1.0));
        s.set_coeff(&Word::identity(), a0.clone()).unwrap();
        s.set_coeff(&w(&[2]), CMatrix::identity(2, 2)).unwrap();
        let space = TruncatedFock::new(2, 2).unwrap();
        let op = assemble(&s, 1.0, &space).unwrap();
        let dim = space.dim();
        for p in 0..2 {
            for c in 0..2 {
                assert_eq!(op.matrix()[(p * dim, c * dim)], a0[(p, c)]);
            }
        }
    }

    #[test]
    fn power_norm_of_shift_is_one_until_truncation_kills_it() {
        let space = TruncatedFock::new(2, 4).unwrap();
        let s1 = FreeSeries::letter(2, 1).unwrap();
        let op = assemble(&s1, 1.0, &space).unwrap();
        for k in 1..=4usize {
            assert_relative_eq!(op.power_norm(k), 1.0, max_relative = 1e-12);
        }
        assert!(op.power_norm(5) < 1e-12);
    }

    #[test]
    fn power_norm_matvec_path_matches_dense() {
        let space = TruncatedFock::new(2, 3).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(53);
        let mut s = FreeSeries::zero(2, 1, 2);
        for k in 0..=2usize {
            for rank in 0..words::level_len(2, k) {
                s.set_coeff(
                    &Word::from_rank(2, k, rank),
                    CMatrix::from_element(1, 1, C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)),
                )
                .unwrap();
            }
        }
        let op = assemble(&s, 1.0, &space).unwrap();
        let k = 3;
        let mut dense = op.matrix().clone();
        for _ in 1..k {
            dense = &dense * op.matrix();
        }
        let want = linalg::op_norm(&dense);
        let got = linalg::power_norm_apply(
            op.total_dim(),
            |v| {
                let mut w = v.clone();
                for _ in 0..k {
                    w = op.matrix() * &w;
                }
                w
            },
            |v| {
                let mut w = v.clone();
                for _ in 0..k {
                    w = op.matrix().ad_mul(&w);
                }
                w
            },
        );
        assert_relative_eq!(got, want, max_relative = 1e-9);
    }

    #[test]
    fn assemble_ignores_degrees_beyond_the_level() {
        let s = FreeSeries::scalar_poly(2, &[(w(&[1, 1, 1]), one())])
            .unwrap()
            .with_tail(TailDescriptor::new(1.0, 0.5));
        let space = TruncatedFock::new(2, 2).unwrap();
        let op = assemble(&s, 1.0, &space).unwrap();
        assert!(op.norm() < 1e-14);
    }
}
