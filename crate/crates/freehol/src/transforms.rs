//! Cauchy and Poisson kernels on the truncated Fock scale, the transforms
//! they induce, and pluriharmonic pairs with harmonic conjugation.
//!
//! Two tensor layouts meet here. Kernels live on `F ⊗ C^d` in *Fock-major*
//! order (entry index = fock_rank·d + component), because they are series in
//! the shifts with operator coefficients on the tuple side. Assembled series
//! from [`crate::fock::assemble`] stay *coefficient-major* on `C^q ⊗ F`; the
//! transforms read them blockwise, so the two layouts never have to be
//! reconciled by an explicit permutation.
//!
//! On the truncation every identity in this module is exact linear algebra:
//! the reconstruction operator Σ Sᵢ ⊗ Tᵢ* is nilpotent of order N+1, so the
//! Cauchy kernel is simultaneously a finite Neumann sum and a matrix inverse,
//! and the Poisson kernel's Gram matrix telescopes to I − Φ^{N+1}(I) with no
//! analytic limit involved.

use crate::calculus::{self, OperatorTuple};
use crate::error::{Error, Result};
use crate::fock::{self, FockOperator, TruncatedFock};
use crate::linalg;
use crate::series::FreeSeries;
use crate::words::{self, Word, WordMultiset};
use crate::{C64, CMatrix};

/// Constant terms are accepted as "real" when the skew part of the
/// coefficient stays below this tolerance.
pub const REAL_CONSTANT_TOL: f64 = 1e-12;

fn ensure_same_alphabet(t: &OperatorTuple, space: &TruncatedFock) -> Result<()> {
    if t.n() != space.n() {
        return Err(Error::ShapeMismatch(format!(
            "tuple has {} letters but the Fock space is built over {}",
            t.n(),
            space.n()
        )));
    }
    Ok(())
}

/// Add `m` into the d×d block (bu, bv) of a Fock-major matrix.
fn add_block(out: &mut CMatrix, bu: usize, bv: usize, m: &CMatrix) {
    let d = m.nrows();
    for c in 0..d {
        for r in 0..d {
            out[(bu * d + r, bv * d + c)] += m[(r, c)];
        }
    }
}

/// Word products T_α for all levels 0..=levels, indexed by (level, lex rank).
///
/// With `reversed = false` the entry at (k, rank α) is T_α; with
/// `reversed = true` it is T_{α̃} (the product along the reversed word),
/// which is the coefficient the left Cauchy kernel attaches to S_α.
fn graded_products(t: &OperatorTuple, levels: usize, reversed: bool) -> Vec<Vec<CMatrix>> {
    let n = t.n();
    let d = t.d();
    let mut all = Vec::with_capacity(levels + 1);
    all.push(vec![CMatrix::identity(d, d)]);
    for k in 1..=levels {
        let prev: &Vec<CMatrix> = &all[k - 1];
        let mut next = Vec::with_capacity(prev.len() * n);
        for m in prev {
            for i in 0..n {
                // rank(α·g_i) = rank(α)·n + i, so pushing children in letter
                // order keeps the level in lexicographic rank order.
                next.push(if reversed {
                    t.mat(i + 1) * m
                } else {
                    m * t.mat(i + 1)
                });
            }
        }
        all.push(next);
    }
    all
}

/// The reconstruction operator Σᵢ Sᵢ ⊗ Tᵢ* on the truncation, Fock-major.
///
/// Its powers obey ‖(ΣSᵢ⊗Tᵢ*)ᵏ‖ = ‖Φᵏ(I)‖^{1/2} with Φ(Y) = ΣTᵢYTᵢ*, and it
/// is nilpotent of order N+1 because each factor raises the level by one.
pub fn reconstruction_operator(t: &OperatorTuple, space: &TruncatedFock) -> Result<CMatrix> {
    ensure_same_alphabet(t, space)?;
    let n = space.n();
    let d = t.d();
    let dim = space.dim();
    let mut out = CMatrix::zeros(dim * d, dim * d);
    let adjoints: Vec<CMatrix> = t.mats().iter().map(|m| m.adjoint()).collect();
    for j in 0..space.level() {
        let len_j = words::level_len(n, j);
        let src = space.level_offset(j);
        let tgt = space.level_offset(j + 1);
        for (i, ti) in adjoints.iter().enumerate() {
            for rb in 0..len_j {
                add_block(&mut out, tgt + i * len_j + rb, src + rb, ti);
            }
        }
    }
    Ok(out)
}

/// The Cauchy kernel on the truncation: the inverse of I − ΣSᵢ⊗Tᵢ*.
///
/// Because the reconstruction operator only raises Fock levels, I minus it is
/// unipotent and the inverse equals the finite Neumann sum
/// Σ_{|α|≤N} S_α ⊗ T_{α̃}* exactly; [`cauchy_kernel_neumann`] builds that sum
/// independently for cross-validation.
#[derive(Clone, Debug)]
pub struct CauchyKernel {
    tuple: OperatorTuple,
    space: TruncatedFock,
    matrix: CMatrix,
}

impl CauchyKernel {
    pub fn tuple(&self) -> &OperatorTuple {
        &self.tuple
    }

    pub fn space(&self) -> &TruncatedFock {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }
}

pub fn cauchy_kernel(t: &OperatorTuple, space: &TruncatedFock) -> Result<CauchyKernel> {
    let q = reconstruction_operator(t, space)?;
    let total = q.nrows();
    let m = CMatrix::identity(total, total) - q;
    let matrix = m
        .try_inverse()
        .expect("I minus the reconstruction operator is unipotent, hence invertible");
    Ok(CauchyKernel {
        tuple: t.clone(),
        space: space.clone(),
        matrix,
    })
}

/// The finite Neumann sum Σ_{|α|≤N} S_α ⊗ T_{α̃}*, built term by term.
///
/// Nilpotency of the reconstruction operator makes this equal to the matrix
/// inverse in [`cauchy_kernel`] exactly, not merely up to a truncation tail.
pub fn cauchy_kernel_neumann(t: &OperatorTuple, space: &TruncatedFock) -> Result<CMatrix> {
    ensure_same_alphabet(t, space)?;
    let n = space.n();
    let d = t.d();
    let dim = space.dim();
    let level = space.level();
    let mut out = CMatrix::zeros(dim * d, dim * d);
    let products = graded_products(t, level, true);
    for (k, level_products) in products.iter().enumerate() {
        for (ra, m) in level_products.iter().enumerate() {
            let coeff = m.adjoint();
            for j in 0..=(level - k) {
                let len_j = words::level_len(n, j);
                let src = space.level_offset(j);
                let tgt = space.level_offset(j + k) + ra * len_j;
                for rb in 0..len_j {
                    add_block(&mut out, tgt + rb, src + rb, &coeff);
                }
            }
        }
    }
    Ok(out)
}

/// The right-creation Cauchy kernel Σ_{|β|≤N} R_β ⊗ T_β* = (I − ΣRᵢ⊗Tᵢ*)^{-1}.
///
/// Appending β to a word of lex rank a at level j lands at rank a·n^{|β|} +
/// rank β, which is the arithmetic behind `monomial_right_shift`; this is the
/// kernel paired against boundary operators in the transforms below.
pub fn right_cauchy_kernel(t: &OperatorTuple, space: &TruncatedFock) -> Result<CMatrix> {
    ensure_same_alphabet(t, space)?;
    let n = space.n();
    let d = t.d();
    let dim = space.dim();
    let level = space.level();
    let mut out = CMatrix::zeros(dim * d, dim * d);
    let products = graded_products(t, level, false);
    for (k, level_products) in products.iter().enumerate() {
        let len_k = words::level_len(n, k);
        for (rb, m) in level_products.iter().enumerate() {
            let coeff = m.adjoint();
            for j in 0..=(level - k) {
                let src = space.level_offset(j);
                let tgt = space.level_offset(j + k);
                for ra in 0..words::level_len(n, j) {
                    add_block(&mut out, tgt + ra * len_k + rb, src + ra, &coeff);
                }
            }
        }
    }
    Ok(out)
}

/// The Cauchy column W: C^d → F ⊗ C^d with W y = Σ_{|β|≤N} e_β ⊗ T_β* y.
///
/// This is the right kernel applied to the vacuum slice, built directly from
/// word products in T without forming any shift matrices.
pub fn cauchy_column(t: &OperatorTuple, space: &TruncatedFock) -> Result<CMatrix> {
    ensure_same_alphabet(t, space)?;
    let d = t.d();
    let dim = space.dim();
    let mut out = CMatrix::zeros(dim * d, d);
    let products = graded_products(t, space.level(), false);
    for (k, level_products) in products.iter().enumerate() {
        let base = space.level_offset(k);
        for (rb, m) in level_products.iter().enumerate() {
            let coeff = m.adjoint();
            for c in 0..d {
                for r in 0..d {
                    out[((base + rb) * d + r, c)] = coeff[(r, c)];
                }
            }
        }
    }
    Ok(out)
}

/// The vacuum embedding J: C^d → F ⊗ C^d, J y = e_∅ ⊗ y (Fock-major).
pub fn vacuum_embedding(space: &TruncatedFock, d: usize) -> CMatrix {
    let mut j = CMatrix::zeros(space.dim() * d, d);
    for r in 0..d {
        j[(r, r)] = C64::new(1.0, 0.0);
    }
    j
}

/// Σ_{k≤level} ‖Φᵏ(I)‖^{1/2}: an upper bound for the Cauchy kernel norm on
/// the truncation, itself dominated by 1/(1−‖T‖_row) for strict row
/// contractions.
pub fn cauchy_kernel_norm_bound(t: &OperatorTuple, level: usize) -> f64 {
    1.0 + t
        .phi_norms(level)
        .iter()
        .map(|&v| v.sqrt())
        .sum::<f64>()
}

/// The Cauchy transform of an assembled operator: reading A against the
/// kernel column returns Σ_β A_β T_β per coefficient block.
///
/// Formally this is W*(A ⊗ I_d)J per block. J has its single nonzero block at
/// the vacuum, so the product collapses to the vacuum column of A paired with
/// the adjoint blocks of W; the collapse is an identity, not an
/// approximation. For A = f(S) with f polynomial of degree ≤ N the result is
/// exactly f(T).
pub fn cauchy_transform(t: &OperatorTuple, a: &FockOperator) -> Result<CMatrix> {
    ensure_same_alphabet(t, a.space())?;
    let d = t.d();
    let q = a.aux();
    let dim = a.space().dim();
    let w = cauchy_column(t, a.space())?;
    let am = a.matrix();
    let zero = C64::new(0.0, 0.0);
    let mut out = CMatrix::zeros(q * d, q * d);
    for p in 0..q {
        for c in 0..q {
            for gamma in 0..dim {
                let coef = am[(p * dim + gamma, c * dim)];
                if coef == zero {
                    continue;
                }
                for col in 0..d {
                    for row in 0..d {
                        // (W block γ)* has entries conj(W[γ·d+col, row]).
                        out[(p * d + row, c * d + col)] +=
                            coef * w[(gamma * d + col, row)].conj();
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Derivative representation read off the boundary operator: assembles f(S),
/// then pairs its vacuum column with word derivatives of the monomials at T,
/// where ∂ᵏT_γ/∂T_{i₁}…∂T_{iₖ} is the iterated deletion sum with
/// multiplicities.
///
/// For polynomials of degree ≤ N this equals evaluating the corresponding
/// iterated partial derivative of f at T; the indices are consumed right to
/// left, matching [`crate::derivations::partial_multi`].
pub fn cauchy_derivative_repr(
    t: &OperatorTuple,
    f: &FreeSeries,
    indices: &[usize],
    space: &TruncatedFock,
) -> Result<CMatrix> {
    ensure_same_alphabet(t, space)?;
    if f.q() != 1 {
        return Err(Error::ShapeMismatch(format!(
            "derivative representation needs scalar coefficients, got q = {}",
            f.q()
        )));
    }
    for &j in indices {
        if j == 0 || j > t.n() {
            return Err(Error::LetterOutOfRange { letter: j, n: t.n() });
        }
    }
    let d = t.d();
    let dim = space.dim();
    let a = fock::assemble(f, 1.0, space)?;
    let am = a.matrix();
    let zero = C64::new(0.0, 0.0);
    let mut out = CMatrix::zeros(d, d);
    for idx in 0..dim {
        let coef = am[(idx, 0)];
        if coef == zero {
            continue;
        }
        let gamma = space.basis_word(idx);
        let mut terms = WordMultiset::default();
        terms.add(gamma, 1);
        for &j in indices.iter().rev() {
            let mut next = WordMultiset::default();
            for (w, mult) in terms.iter() {
                for (del, dm) in w.deletions(j).iter() {
                    next.add(del.clone(), mult * dm);
                }
            }
            terms = next;
        }
        for (w, mult) in terms.iter() {
            let p = t.word_product(w)?;
            let scale = coef * C64::new(mult as f64, 0.0);
            out.zip_apply(&p, |o, pv| *o += scale * pv);
        }
    }
    Ok(out)
}

/// The defect operator Δ_T = (I − ΣTᵢTᵢ*)^{1/2} of a row contraction.
///
/// Eigenvalues in [−1e−10, 0) are treated as roundoff and clamped to zero;
/// anything lower means the tuple is not a row contraction and is an error.
pub fn defect_operator(t: &OperatorTuple) -> Result<CMatrix> {
    let d = t.d();
    let mut m = CMatrix::identity(d, d) - t.phi_apply(&CMatrix::identity(d, d));
    linalg::hermitize(&mut m);
    let (root, min_eig) = linalg::psd_sqrt(&m, 1e-10);
    if min_eig < -1e-10 {
        return Err(Error::NotRowContraction { min_eig });
    }
    Ok(root)
}

/// The Poisson kernel K: C^d → F ⊗ C^d with K y = Σ_{|α|≤N} e_α ⊗ Δ_T T_α* y.
///
/// Its Gram matrix telescopes: K*K = I − Φ^{N+1}(I) exactly, so K is an
/// isometry up to the defect ‖Φ^{N+1}(I)‖ ≤ ‖T‖_row^{2(N+1)}.
#[derive(Clone, Debug)]
pub struct PoissonKernel {
    tuple: OperatorTuple,
    space: TruncatedFock,
    delta: CMatrix,
    matrix: CMatrix,
}

pub fn poisson_kernel(t: &OperatorTuple, space: &TruncatedFock) -> Result<PoissonKernel> {
    ensure_same_alphabet(t, space)?;
    let delta = defect_operator(t)?;
    let d = t.d();
    let dim = space.dim();
    let mut matrix = CMatrix::zeros(dim * d, d);
    let products = graded_products(t, space.level(), false);
    for (k, level_products) in products.iter().enumerate() {
        let base = space.level_offset(k);
        for (ra, m) in level_products.iter().enumerate() {
            let block = &delta * m.adjoint();
            for c in 0..d {
                for r in 0..d {
                    matrix[((base + ra) * d + r, c)] = block[(r, c)];
                }
            }
        }
    }
    Ok(PoissonKernel {
        tuple: t.clone(),
        space: space.clone(),
        delta,
        matrix,
    })
}

impl PoissonKernel {
    pub fn tuple(&self) -> &OperatorTuple {
        &self.tuple
    }

    pub fn space(&self) -> &TruncatedFock {
        &self.space
    }

    /// Δ_T, the positive square root of I − ΣTᵢTᵢ*.
    pub fn delta(&self) -> &CMatrix {
        &self.delta
    }

    /// The (dim·d) × d kernel matrix, Fock-major.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// K*K, which equals I − Φ^{N+1}(I) by telescoping.
    pub fn gram(&self) -> CMatrix {
        self.matrix.ad_mul(&self.matrix)
    }

    /// ‖I − K*K‖ = ‖Φ^{N+1}(I)‖, the deviation from being an isometry.
    pub fn isometry_defect(&self) -> f64 {
        let d = self.tuple.d();
        let mut m = CMatrix::identity(d, d) - self.gram();
        linalg::hermitize(&mut m);
        linalg::hermitian_lambda_max(&m).max(0.0)
    }

    /// The Poisson transform P_T(A) = K*(A ⊗ I_d)K, blockwise per
    /// coefficient of A.
    ///
    /// For each coefficient block the congruence contracts the Fock blocks of
    /// K through A: Σ_{α,γ} A[α,γ]·(Δ T_α*)* (Δ T_γ*). Positivity of A is
    /// preserved because each block of the output is a congruence by K.
    pub fn apply(&self, a: &FockOperator) -> Result<CMatrix> {
        if a.space() != &self.space {
            return Err(Error::ShapeMismatch(
                "Poisson kernel and operator live on different truncations".into(),
            ));
        }
        let d = self.tuple.d();
        let q = a.aux();
        let dim = self.space.dim();
        let am = a.matrix();
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let blocks: Vec<CMatrix> = (0..dim)
            .map(|g| self.matrix.view((g * d, 0), (d, d)).into_owned())
            .collect();
        let mut out = CMatrix::zeros(q * d, q * d);
        for p in 0..q {
            for c in 0..q {
                let mut acc = CMatrix::zeros(d, d);
                for alpha in 0..dim {
                    let mut w = CMatrix::zeros(d, d);
                    let mut seen = false;
                    for gamma in 0..dim {
                        let coef = am[(p * dim + alpha, c * dim + gamma)];
                        if coef == zero {
                            continue;
                        }
                        seen = true;
                        w.zip_apply(&blocks[gamma], |o, b| *o += coef * b);
                    }
                    if seen {
                        acc.gemm_ad(one, &blocks[alpha], &w, one);
                    }
                }
                for col in 0..d {
                    for row in 0..d {
                        out[(p * d + row, c * d + col)] = acc[(row, col)];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Poisson transform bundled with kernel construction on A's truncation.
pub fn poisson_transform(t: &OperatorTuple, a: &FockOperator) -> Result<CMatrix> {
    let kernel = poisson_kernel(t, a.space())?;
    kernel.apply(a)
}

/// A pluriharmonic function as a pair of free series: the value at X is
/// holo(X) + anti(X)*.
///
/// The pair is self-adjoint (a "real" pluriharmonic function) when the anti
/// part repeats the holomorphic part with the constant stored once, in the
/// holomorphic half, and that constant is Hermitian. Real parts of free
/// holomorphic functions produce exactly this shape.
#[derive(Clone, Debug, PartialEq)]
pub struct PluriharmonicFunction {
    holo: FreeSeries,
    anti: FreeSeries,
}

fn strip_constant(f: &FreeSeries) -> FreeSeries {
    let mut out = f.clone();
    out.set_coeff(&Word::identity(), CMatrix::zeros(f.q(), f.q()))
        .expect("zeroing the constant term cannot fail");
    out
}

/// Largest entry of the skew part of a constant block, i.e. how far it is
/// from Hermitian.
fn skew_defect(c0: &CMatrix) -> f64 {
    let skew = c0 - c0.adjoint();
    skew.iter().map(|v| v.norm() / 2.0).fold(0.0, f64::max)
}

impl PluriharmonicFunction {
    pub fn new(holo: FreeSeries, anti: FreeSeries) -> Result<Self> {
        if holo.n() != anti.n() || holo.q() != anti.q() {
            return Err(Error::ShapeMismatch(format!(
                "pluriharmonic parts disagree: ({}, {}) letters/size vs ({}, {})",
                holo.n(),
                holo.q(),
                anti.n(),
                anti.q()
            )));
        }
        Ok(PluriharmonicFunction { holo, anti })
    }

    pub fn holo(&self) -> &FreeSeries {
        &self.holo
    }

    pub fn anti(&self) -> &FreeSeries {
        &self.anti
    }

    pub fn n(&self) -> usize {
        self.holo.n()
    }

    pub fn q(&self) -> usize {
        self.holo.q()
    }

    /// True when the pair represents a self-adjoint function: the anti part
    /// equals the holomorphic part with its constant removed, and the
    /// constant is Hermitian. Tail descriptors are not part of the test.
    pub fn is_self_adjoint(&self) -> bool {
        let c0 = self.holo.coeff_or_zero(&Word::identity());
        skew_defect(&c0) <= REAL_CONSTANT_TOL
            && strip_constant(&self.holo).max_coeff_diff(&self.anti) == 0.0
    }

    /// holo(X) + anti(X)*, symmetrized exactly when the pair is self-adjoint.
    pub fn value_at(&self, x: &OperatorTuple) -> Result<CMatrix> {
        let vh = calculus::evaluate(&self.holo, x)?.value;
        let va = calculus::evaluate(&self.anti, x)?.value;
        let mut m = vh + va.adjoint();
        if self.is_self_adjoint() {
            linalg::hermitize(&mut m);
        }
        Ok(m)
    }

    /// The operator holo(rS) + anti(rS)* on the truncation, coefficient-major
    /// on C^q ⊗ F.
    pub fn radial_operator(&self, r: f64, space: &TruncatedFock) -> Result<CMatrix> {
        let h = fock::assemble(&self.holo, r, space)?;
        let a = fock::assemble(&self.anti, r, space)?;
        Ok(h.matrix() + a.matrix().adjoint())
    }

    /// The boundary operator u(S) at r = 1.
    pub fn boundary_operator(&self, space: &TruncatedFock) -> Result<CMatrix> {
        self.radial_operator(1.0, space)
    }

    /// ca·a + cb·b as pluriharmonic pairs. The anti part picks up conjugated
    /// scalars because it enters the value through an adjoint.
    pub fn linear_combination(
        a: &PluriharmonicFunction,
        ca: C64,
        b: &PluriharmonicFunction,
        cb: C64,
    ) -> Result<PluriharmonicFunction> {
        let holo = a.holo.add(&b.holo, ca, cb)?;
        let anti = a.anti.add(&b.anti, ca.conj(), cb.conj())?;
        PluriharmonicFunction::new(holo, anti)
    }

    /// Recover the generating free holomorphic f with Re f = self and
    /// f(0) = constant of the holomorphic half.
    ///
    /// Requires a self-adjoint pair; a non-Hermitian stored constant is
    /// reported as a non-real f(0).
    pub fn generating_series(&self) -> Result<FreeSeries> {
        self.check_real_pair()?;
        let c0 = self.holo.coeff_or_zero(&Word::identity());
        let mut f = self.holo.scale(C64::new(2.0, 0.0));
        f.set_coeff(&Word::identity(), c0)?;
        Ok(f)
    }

    fn check_real_pair(&self) -> Result<CMatrix> {
        if strip_constant(&self.holo).max_coeff_diff(&self.anti) != 0.0 {
            return Err(Error::ShapeMismatch(
                "harmonic conjugation needs a self-adjoint pair \
                 (anti part = holomorphic part without its constant)"
                    .into(),
            ));
        }
        let c0 = self.holo.coeff_or_zero(&Word::identity());
        let im = skew_defect(&c0);
        if im > REAL_CONSTANT_TOL {
            return Err(Error::NonRealConstant { im });
        }
        Ok(c0)
    }
}

/// The real part u = Re F = ½(F + F*) as a pluriharmonic pair.
///
/// The constant of u is the Hermitian part of F(0), stored once in the
/// holomorphic half; any skew part of F(0) does not contribute to Re F and is
/// dropped here.
pub fn pluriharmonic_re(f: &FreeSeries) -> Result<PluriharmonicFunction> {
    let half = f.scale(C64::new(0.5, 0.0));
    let c0 = f.coeff_or_zero(&Word::identity());
    let herm = (&c0 + c0.adjoint()).scale(0.5);
    let mut holo = half.clone();
    holo.set_coeff(&Word::identity(), herm)?;
    let anti = strip_constant(&half);
    PluriharmonicFunction::new(holo, anti)
}

/// Evaluate a pluriharmonic pair at a tuple.
pub fn eval_pluriharmonic(u: &PluriharmonicFunction, t: &OperatorTuple) -> Result<CMatrix> {
    u.value_at(t)
}

/// The harmonic conjugate v of a self-adjoint pair u = Re f, normalized by
/// v(0) = 0, so that u + iv reproduces f.
///
/// v = (f − f*)/(2i) as a pair: both halves equal −i·(holomorphic half of u
/// minus its constant). The generating f must have a real (Hermitian)
/// constant term; the skew defect is reported otherwise. The conjugate is
/// unique only up to an additive real constant, which the v(0) = 0
/// normalization fixes.
pub fn pluriharmonic_conjugate(u: &PluriharmonicFunction) -> Result<PluriharmonicFunction> {
    u.check_real_pair()?;
    let core = strip_constant(&u.holo).scale(C64::new(0.0, -1.0));
    PluriharmonicFunction::new(core.clone(), core)
}

/// Recover f(T) from the boundary operator of u = Re f through the right
/// Cauchy kernel: J*(2C_T(R) − I)*(u(S) ⊗ I_d)J.
///
/// The vacuum embedding J collapses the product to the vacuum block-column of
/// 2C_T(R) − I paired with the vacuum column of u(S); the collapse is exact.
/// For polynomials of degree ≤ N with real constant this equals f(T).
pub fn conjugate_representation_value(
    u: &PluriharmonicFunction,
    t: &OperatorTuple,
    space: &TruncatedFock,
) -> Result<CMatrix> {
    ensure_same_alphabet(t, space)?;
    if u.q() != 1 {
        return Err(Error::ShapeMismatch(format!(
            "boundary recovery needs scalar coefficients, got q = {}",
            u.q()
        )));
    }
    let d = t.d();
    let dim = space.dim();
    let boundary = u.boundary_operator(space)?;
    let cr = right_cauchy_kernel(t, space)?;
    let m = cr.scale(2.0) - CMatrix::identity(dim * d, dim * d);
    let zero = C64::new(0.0, 0.0);
    let mut out = CMatrix::zeros(d, d);
    for gamma in 0..dim {
        let coef = boundary[(gamma, 0)];
        if coef == zero {
            continue;
        }
        for col in 0..d {
            for row in 0..d {
                // ((M block (γ,0))*)[row, col] = conj(M[γ·d + col, row]).
                out[(row, col)] += coef * m[(gamma * d + col, row)].conj();
            }
        }
    }
    Ok(out)
}

/// Minimum eigenvalue of Re F(rS) across a radius grid; nonnegative minima
/// witness positive pluriharmonic behavior on the sampled ball.
pub fn herglotz_minima(
    f: &FreeSeries,
    grid: &[f64],
    space: &TruncatedFock,
) -> Result<Vec<(f64, f64)>> {
    let u = pluriharmonic_re(f)?;
    let mut out = Vec::with_capacity(grid.len());
    for &r in grid {
        let mut m = u.radial_operator(r, space)?;
        linalg::hermitize(&mut m);
        out.push((r, linalg::hermitian_lambda_min(&m)));
    }
    Ok(out)
}

/// Radial boundary behavior of a series over a grid of radii.
#[derive(Clone, Debug)]
pub struct BoundaryReport {
    /// The radii, sorted increasingly.
    pub grid: Vec<f64>,
    /// `gaps[i][j]` bounds ‖F(r_iS) − F(r_jS)‖ for the full series: the
    /// truncated evaluation gap plus the analytic remainder of both radii.
    pub gaps: Vec<Vec<f64>>,
    /// Largest gap bound among pairs in the upper half of the grid — the
    /// sampled modulus of continuity at the boundary.
    pub modulus: f64,
    /// Whether the modulus stayed within the requested tolerance.
    pub continuous_extension: bool,
    /// For polynomials of degree ≤ N, the exact norm of the boundary value
    /// F(S) at r = 1.
    pub boundary_norm: Option<f64>,
}

/// Remainder of the evaluation at radius r that the truncation cannot see:
/// declared blocks beyond the Fock level plus the geometric tail.
fn radial_remainder(f: &FreeSeries, r: f64, level: usize) -> f64 {
    let mut rem = 0.0;
    if f.max_degree() > level {
        let norms = f.block_norms();
        for (k, &bk) in norms.iter().enumerate().skip(level + 1) {
            rem += bk * r.powi(k as i32);
        }
    }
    if let Some(tail) = f.tail() {
        if !tail.is_vacuous() {
            let m = f.max_degree().max(level);
            let x = tail.t * r;
            // Σ_{k>m} c·xᵏ; x < 1 because r < 1 and t ≤ 1 in any sound
            // descriptor reaching this point, but guard anyway.
            if x < 1.0 {
                rem += tail.c * x.powi(m as i32 + 1) / (1.0 - x);
            } else {
                rem = f64::INFINITY;
            }
        }
    }
    rem
}

/// Sample F(rS) across a radius grid and bound the pairwise gaps of the full
/// series, declaring a continuous boundary extension when the modulus over
/// the upper half of the grid stays below `tol`.
///
/// The gap bound is ‖F_N(r_iS) − F_N(r_jS)‖ plus each radius' analytic
/// remainder (unassembled blocks and the tail descriptor), so a `true`
/// verdict is a certificate for the truncated data, while series with block
/// norms that do not decay keep a large modulus and are flagged. The grid
/// must lie in [0, 1); discrimination power comes from grids clustering
/// near 1.
pub fn dirichlet_boundary_check(
    f: &FreeSeries,
    grid: &[f64],
    space: &TruncatedFock,
    tol: f64,
) -> Result<BoundaryReport> {
    if grid.is_empty() {
        return Err(Error::ShapeMismatch("empty radius grid".into()));
    }
    for &r in grid {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::ShapeMismatch(format!(
                "radius {r} outside [0, 1)"
            )));
        }
    }
    let mut radii: Vec<f64> = grid.to_vec();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mats: Vec<CMatrix> = radii
        .iter()
        .map(|&r| Ok(fock::assemble(f, r, space)?.into_matrix()))
        .collect::<Result<_>>()?;
    let rems: Vec<f64> = radii
        .iter()
        .map(|&r| radial_remainder(f, r, space.level()))
        .collect();
    let m = radii.len();
    let mut gaps = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let gap = linalg::op_norm(&(&mats[j] - &mats[i])) + rems[i] + rems[j];
            gaps[i][j] = gap;
            gaps[j][i] = gap;
        }
    }
    let start = m / 2;
    let mut modulus: f64 = 0.0;
    for i in start..m {
        for j in (i + 1)..m {
            modulus = modulus.max(gaps[i][j]);
        }
    }
    let boundary_norm = (f.is_polynomial() && f.max_degree() <= space.level())
        .then(|| fock::boundary_norm(f, space))
        .transpose()?;
    Ok(BoundaryReport {
        grid: radii,
        gaps,
        modulus,
        continuous_extension: modulus <= tol,
        boundary_norm,
    })
}
