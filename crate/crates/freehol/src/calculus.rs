//! Functional calculus: evaluating free series at tuples of matrices, with
//! certified truncation-error bounds, joint spectral data, boundary-norm
//! estimates, radial p-means, a metric on series pairs, and the unitary
//! change-of-variables action.
//!
//! A tuple X = (X_1, …, X_n) of d×d matrices is fed to a series through the
//! monomial products `X_α = X_{i₁}···X_{i_k}`; the completely positive map
//! `Φ(Y) = Σ X_i Y X_iᴴ` controls how fast those products can grow, and all
//! tail accounting runs through `‖Φᵏ(I)‖`.

use crate::error::{Error, Result};
use crate::fock::{assemble, TruncatedFock};
use crate::linalg;
use crate::series::{grids_to_matrix, FreeSeries};
use crate::words::{self, Word};
use crate::{C64, CMatrix};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

/// A tuple (X_1, …, X_n) of square complex matrices of a common size.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTuple {
    n: usize,
    d: usize,
    mats: Vec<CMatrix>,
}

impl OperatorTuple {
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::ShapeMismatch("tuple needs at least one matrix".into()));
        }
        let d = mats[0].nrows();
        if d == 0 {
            return Err(Error::ShapeMismatch("tuple matrices must be non-empty".into()));
        }
        for (i, m) in mats.iter().enumerate() {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::ShapeMismatch(format!(
                    "matrix {} is {}×{}, expected {}×{}",
                    i + 1,
                    m.nrows(),
                    m.ncols(),
                    d,
                    d
                )));
            }
        }
        Ok(OperatorTuple {
            n: mats.len(),
            d,
            mats,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    /// The i-th matrix (1-based, matching letter indices).
    pub fn mat(&self, i: usize) -> &CMatrix {
        &self.mats[i - 1]
    }

    /// Norm of the row [X_1 … X_n] : C^{nd} → C^d, i.e.
    /// `‖Σ X_i X_iᴴ‖^{1/2}`. Strictly less than 1 inside the unit ball.
    pub fn row_norm(&self) -> f64 {
        let mut g = CMatrix::zeros(self.d, self.d);
        for x in &self.mats {
            g.gemm(C64::new(1.0, 0.0), x, &x.adjoint(), C64::new(1.0, 0.0));
        }
        linalg::hermitize(&mut g);
        linalg::hermitian_lambda_max(&g).max(0.0).sqrt()
    }

    /// Every matrix scaled by r.
    pub fn scaled(&self, r: f64) -> OperatorTuple {
        let f = C64::new(r, 0.0);
        OperatorTuple {
            n: self.n,
            d: self.d,
            mats: self.mats.iter().map(|m| m * f).collect(),
        }
    }

    /// The completely positive map Φ(Y) = Σ X_i Y X_iᴴ.
    pub fn phi_apply(&self, y: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.d, self.d);
        for x in &self.mats {
            let xy = x * y;
            out.gemm(C64::new(1.0, 0.0), &xy, &x.adjoint(), C64::new(1.0, 0.0));
        }
        out
    }

    /// `‖Φᵏ(I)‖` for k = 1..=depth, stopping early at an exact zero (a
    /// nilpotent tuple annihilates everything past its order).
    pub fn phi_norms(&self, depth: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(depth);
        let mut y = CMatrix::identity(self.d, self.d);
        for _ in 0..depth {
            y = self.phi_apply(&y);
            linalg::hermitize(&mut y);
            let lam = linalg::hermitian_lambda_max(&y).max(0.0);
            out.push(lam);
            if lam == 0.0 {
                break;
            }
        }
        out
    }

    /// The product X_α along a word (identity for the empty word).
    pub fn word_product(&self, w: &Word) -> Result<CMatrix> {
        if !w.fits_alphabet(self.n) {
            return Err(Error::LetterOutOfRange {
                letter: w.letters().iter().map(|&l| l as usize).max().unwrap_or(0),
                n: self.n,
            });
        }
        let mut p = CMatrix::identity(self.d, self.d);
        for &l in w.letters() {
            p = &p * &self.mats[l as usize - 1];
        }
        Ok(p)
    }
}

/// Growth data `g_k = ‖Φᵏ(I)‖^{1/(2k)}`. The sequence is submultiplicative
/// in the exponent, so its running minimum is a certified upper bound for
/// the limit (the joint spectral radius of the tuple).
#[derive(Clone, Debug)]
pub struct JsrEstimate {
    /// g_1, g_2, … (stops early when an iterate vanishes exactly).
    pub sequence: Vec<f64>,
    /// min of the sequence — an upper bound for the limit.
    pub upper: f64,
    /// Smallest k with Φᵏ(I) = 0, when one was found.
    pub nilpotent_order: Option<usize>,
}

pub fn joint_spectral_data(x: &OperatorTuple, depth: usize) -> JsrEstimate {
    assert!(depth >= 1, "need at least one iterate");
    let norms = x.phi_norms(depth);
    let mut sequence = Vec::with_capacity(norms.len());
    let mut nilpotent_order = None;
    for (idx, &m) in norms.iter().enumerate() {
        let k = idx + 1;
        if m == 0.0 {
            nilpotent_order = Some(k);
            sequence.push(0.0);
            break;
        }
        sequence.push(m.powf(1.0 / (2.0 * k as f64)));
    }
    let upper = sequence.iter().cloned().fold(f64::INFINITY, f64::min);
    JsrEstimate {
        sequence,
        upper,
        nilpotent_order,
    }
}

/// Result of evaluating a series at a tuple.
#[derive(Clone, Debug)]
pub struct Evaluation {
    /// `Σ_{|α| ≤ D} A_(α) ⊗ X_α`, coefficient-major (qd × qd).
    pub value: CMatrix,
    /// Operator norm of `value`.
    pub norm: f64,
    /// Certified bound on the norm of everything the stored degree misses,
    /// when the tail descriptor and the growth of X allow one (always
    /// `Some(0.0)` for polynomials).
    pub tail_bound: Option<f64>,
    /// Row norm of the tuple (diagnostic; < 1 inside the unit ball).
    pub row_norm: f64,
}

impl Evaluation {
    pub fn in_ball(&self) -> bool {
        self.row_norm < 1.0
    }
}

/// Evaluate the stored part of the series at X, walking only the prefixes
/// of words that actually carry coefficients (cost ≈ #nonzero-prefixes·d³).
pub fn evaluate(series: &FreeSeries, x: &OperatorTuple) -> Result<Evaluation> {
    if series.n() != x.n() {
        return Err(Error::ShapeMismatch(format!(
            "series over {} letters, tuple has {}",
            series.n(),
            x.n()
        )));
    }
    let (n, q, d, dmax) = (x.n(), series.q(), x.d(), series.max_degree());
    // Sorted nonzero coefficient ranks per degree, for prefix pruning.
    let nz: Vec<Vec<usize>> = (0..=dmax)
        .map(|k| match series.block(k) {
            None => Vec::new(),
            Some(block) => block
                .iter()
                .enumerate()
                .filter(|(_, m)| m.iter().any(|z| z.re != 0.0 || z.im != 0.0))
                .map(|(rank, _)| rank)
                .collect(),
        })
        .collect();

    let mut acc = CMatrix::zeros(q * d, q * d);
    // Does any stored word of degree ≥ m extend the rank-`rank` prefix?
    let live = |m: usize, rank: usize| -> bool {
        for k in m..=dmax {
            let span = words::level_len(n, k - m);
            let lo = rank * span;
            let i = nz[k].partition_point(|&r| r < lo);
            if i < nz[k].len() && nz[k][i] < lo + span {
                return true;
            }
        }
        false
    };
    // Iterative DFS carrying the monomial product for the current prefix.
    let mut stack: Vec<(usize, usize, CMatrix)> = Vec::new();
    if live(0, 0) {
        stack.push((0, 0, CMatrix::identity(d, d)));
    }
    while let Some((m, rank, p)) = stack.pop() {
        if nz[m].binary_search(&rank).is_ok() {
            let coeff = &series.block(m).unwrap()[rank];
            for pr in 0..q {
                for pc in 0..q {
                    let a = coeff[(pr, pc)];
                    if a.re != 0.0 || a.im != 0.0 {
                        for r in 0..d {
                            for c in 0..d {
                                acc[(pr * d + r, pc * d + c)] += a * p[(r, c)];
                            }
                        }
                    }
                }
            }
        }
        if m < dmax {
            for i in 0..n {
                let crank = rank * n + i;
                if live(m + 1, crank) {
                    stack.push((m + 1, crank, &p * &x.mats[i]));
                }
            }
        }
    }

    let norm = linalg::op_norm(&acc);
    let tail_bound = eval_tail_bound(series, x);
    Ok(Evaluation {
        value: acc,
        norm,
        tail_bound,
        row_norm: x.row_norm(),
    })
}

/// Bound `‖Σ_{|α| > D} A_(α) ⊗ X_α‖ ≤ Σ_{k > D} b_k·‖Φᵏ(I)‖^{1/2}` using the
/// tail descriptor and the submultiplicativity of `‖Φᵏ(I)‖`: choosing any m,
/// `‖Φᵏ(I)‖^{1/2} ≤ K·g_mᵏ`, and the geometric sum closes whenever
/// `t·g_m < 1`. Returns the best bound over m, `None` when no m certifies
/// convergence.
fn eval_tail_bound(series: &FreeSeries, x: &OperatorTuple) -> Option<f64> {
    let tail = match series.tail() {
        None => return Some(0.0),
        Some(t) if t.is_vacuous() => return Some(0.0),
        Some(t) => t,
    };
    let dmax = series.max_degree();
    let depth = (2 * (dmax + 1)).clamp(8, 24);
    let ms = x.phi_norms(depth);
    if let Some(nu) = ms.iter().position(|&m| m == 0.0) {
        // Nilpotent of order ν = nu+1: only degrees D < k < ν contribute.
        let mut sum = 0.0;
        for k in (dmax + 1)..(nu + 1) {
            sum += tail.c * tail.t.powi(k as i32) * ms[k - 1].sqrt();
        }
        return Some(sum);
    }
    let mut best: Option<f64> = None;
    for m in 1..=ms.len() {
        let g = ms[m - 1].powf(1.0 / (2.0 * m as f64));
        if tail.t * g >= 1.0 {
            continue;
        }
        // ‖Φᵏ(I)‖ ≤ ‖Φᵐ(I)‖^⌊k/m⌋·max_{s<m}‖Φˢ(I)‖ gives
        // ‖Φᵏ(I)‖^{1/2} ≤ √V·g^{k−s} with s = k mod m.
        let v = (0..m)
            .map(|s| if s == 0 { 1.0 } else { ms[s - 1] })
            .fold(1.0_f64, f64::max);
        let k_const = v.sqrt() * if g < 1.0 && g > 0.0 {
            g.powi(1 - m as i32)
        } else {
            1.0
        };
        let ratio = tail.t * g;
        let bound = tail.c * k_const * ratio.powi(dmax as i32 + 1) / (1.0 - ratio);
        best = Some(best.map_or(bound, |b: f64| b.min(bound)));
    }
    best
}

/// Boundary-norm estimate from a radial grid on a truncated Fock space.
#[derive(Clone, Debug)]
pub struct HinfEstimate {
    /// (r, ‖F(r·S^{(N)})‖) in the order the grid was given.
    pub per_r: Vec<(f64, f64)>,
    /// max over grid points with r ≤ 1 — a certified lower bound.
    pub lower: f64,
    /// `Σ_k b_k` plus the closed tail sum — a certified upper bound, absent
    /// when the tail ratio prevents summing (t ≥ 1).
    pub upper: Option<f64>,
}

/// Estimate `sup_{0≤r<1} ‖F(rS)‖` by sampling compressions of the shift
/// realization. Each sample is a true lower bound (compressions shrink
/// norms, and the norm is monotone in r), while the coefficient sum with
/// its tail closes from above.
pub fn hinf_norm(series: &FreeSeries, grid: &[f64], level: usize) -> Result<HinfEstimate> {
    let space = TruncatedFock::new(series.n(), level)?;
    let mut per_r = Vec::with_capacity(grid.len());
    let mut lower = 0.0_f64;
    for &r in grid {
        assert!(r >= 0.0, "radius must be non-negative");
        let norm = assemble(series, r, &space)?.norm();
        if r <= 1.0 {
            lower = lower.max(norm);
        }
        per_r.push((r, norm));
    }
    let norms = series.block_norms();
    let mut upper = Some(norms.iter().sum::<f64>());
    if let Some(tail) = series.tail().filter(|t| !t.is_vacuous()) {
        if tail.t < 1.0 {
            let extra = tail.c * tail.t.powi(series.max_degree() as i32 + 1) / (1.0 - tail.t);
            upper = upper.map(|u| u + extra);
        } else {
            upper = None;
        }
    }
    Ok(HinfEstimate {
        per_r,
        lower,
        upper,
    })
}

/// Certified bracket for the radial p-mean
/// `( ∫₀¹ ‖F(r·S^{(N)})‖ᵖ dr )^{1/p}` by left/right Riemann sums — the
/// integrand is nondecreasing in r, so the sums bracket the integral.
#[derive(Clone, Debug)]
pub struct HpBracket {
    pub lower: f64,
    pub upper: f64,
    pub p: f64,
    pub cells: usize,
}

impl HpBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

pub fn hardy_mean(series: &FreeSeries, p: f64, cells: usize, level: usize) -> Result<HpBracket> {
    assert!(p > 0.0, "p-mean needs p > 0");
    assert!(cells >= 1, "need at least one cell");
    let space = TruncatedFock::new(series.n(), level)?;
    // Shared endpoints: M(j/cells) for j = 0..=cells.
    let values: Vec<f64> = (0..=cells)
        .map(|j| {
            let r = j as f64 / cells as f64;
            assemble(series, r, &space).map(|op| op.norm())
        })
        .collect::<Result<_>>()?;
    let h = 1.0 / cells as f64;
    let left: f64 = values[..cells].iter().map(|m| m.powf(p)).sum::<f64>() * h;
    let right: f64 = values[1..].iter().map(|m| m.powf(p)).sum::<f64>() * h;
    Ok(HpBracket {
        lower: left.powf(1.0 / p),
        upper: right.powf(1.0 / p),
        p,
        cells,
    })
}

/// Truncated value of the series metric
/// `ρ(f, g) = Σ_{m≥1} 2^{-m} · ρ_m/(1+ρ_m)` with
/// `ρ_m = ‖(F−G)(r_m·S^{(N)})‖`, `r_m = 1−2^{-m}`. Every term lies in
/// `[0, 2^{-m}]`, so stopping after `terms` summands costs at most
/// `2^{-terms}`, reported as `tail_bound`.
#[derive(Clone, Debug)]
pub struct MetricValue {
    pub value: f64,
    pub tail_bound: f64,
}

pub fn metric_rho(
    f: &FreeSeries,
    g: &FreeSeries,
    terms: usize,
    level: usize,
) -> Result<MetricValue> {
    assert!(terms >= 1, "need at least one term");
    let one = C64::new(1.0, 0.0);
    let diff = f.add(g, one, -one)?;
    let space = TruncatedFock::new(diff.n(), level)?;
    let mut value = 0.0;
    for m in 1..=terms {
        let r = 1.0 - 2f64.powi(-(m as i32));
        let rho = assemble(&diff, r, &space)?.norm();
        value += 2f64.powi(-(m as i32)) * rho / (1.0 + rho);
    }
    Ok(MetricValue {
        value,
        tail_bound: 2f64.powi(-(terms as i32)),
    })
}

const UNITARY_TOL: f64 = 1e-10;

fn check_unitary(u: &CMatrix, n: usize) -> Result<()> {
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "substitution matrix is {}×{}, expected {}×{}",
            u.nrows(),
            u.ncols(),
            n,
            n
        )));
    }
    let defect = (u.ad_mul(u) - CMatrix::identity(n, n)).norm();
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary { defect });
    }
    Ok(())
}

/// Unitary change of variables on tuples: `(β_U X)_j = Σ_i λ_{ij} X_i`.
pub fn unitary_substitution_tuple(x: &OperatorTuple, u: &CMatrix) -> Result<OperatorTuple> {
    check_unitary(u, x.n())?;
    let mut mats = Vec::with_capacity(x.n());
    for j in 0..x.n() {
        let mut b = CMatrix::zeros(x.d(), x.d());
        for i in 0..x.n() {
            b += &x.mats[i] * u[(i, j)];
        }
        mats.push(b);
    }
    OperatorTuple::new(mats)
}

/// Unitary change of variables on series, matching the tuple action:
/// `(β_U F)(X) = F(β_U X)`. Implemented as one contraction of the
/// coefficient tensor per letter position (O(k·n^{k+1}) per degree-k block).
/// Block norms — hence the tail descriptor — are preserved.
pub fn unitary_substitution_series(series: &FreeSeries, u: &CMatrix) -> Result<FreeSeries> {
    check_unitary(u, series.n())?;
    let n = series.n();
    let mut blocks: Vec<Option<Vec<CMatrix>>> = Vec::with_capacity(series.max_degree() + 1);
    for k in 0..=series.max_degree() {
        let Some(src) = series.block(k) else {
            blocks.push(None);
            continue;
        };
        let mut cur: Vec<CMatrix> = src.to_vec();
        for m in 0..k {
            // Contract position m: digit stride n^{k-1-m}.
            let stride = words::level_len(n, k - 1 - m);
            let outer = words::level_len(n, m);
            let mut next = vec![CMatrix::zeros(series.q(), series.q()); cur.len()];
            for hi in 0..outer {
                for lo in 0..stride {
                    let base = hi * stride * n + lo;
                    for i in 0..n {
                        let dst = &mut next[base + i * stride];
                        for j in 0..n {
                            let lam = u[(i, j)];
                            if lam.re != 0.0 || lam.im != 0.0 {
                                *dst += &cur[base + j * stride] * lam;
                            }
                        }
                    }
                }
            }
            cur = next;
        }
        blocks.push(Some(cur));
    }
    Ok(FreeSeries::from_blocks(
        n,
        series.q(),
        series.max_degree(),
        blocks,
        series.tail(),
    ))
}

// ----------------------------------------------------------------------
// Interchange file format (JSON)
// ----------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatrixEntry {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct TupleFile {
    n: usize,
    d: usize,
    mats: Vec<MatrixEntry>,
}

impl OperatorTuple {
    pub fn to_json(&self) -> String {
        let mats = self
            .mats
            .iter()
            .map(|m| {
                let mut re = vec![vec![0.0; self.d]; self.d];
                let mut im = vec![vec![0.0; self.d]; self.d];
                for r in 0..self.d {
                    for c in 0..self.d {
                        re[r][c] = m[(r, c)].re;
                        im[r][c] = m[(r, c)].im;
                    }
                }
                MatrixEntry { re, im }
            })
            .collect();
        let file = TupleFile {
            n: self.n,
            d: self.d,
            mats,
        };
        serde_json::to_string_pretty(&file).expect("tuple serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<OperatorTuple> {
        let file: TupleFile = serde_json::from_str(text)?;
        if file.mats.len() != file.n {
            return Err(Error::InvalidFile {
                kind: "tuple",
                msg: format!("declared n = {} but {} matrices", file.n, file.mats.len()),
            });
        }
        let mats: Vec<CMatrix> = file
            .mats
            .iter()
            .map(|e| grids_to_matrix(&e.re, &e.im, "tuple"))
            .collect::<Result<_>>()?;
        for m in &mats {
            if m.nrows() != file.d || m.ncols() != file.d {
                return Err(Error::InvalidFile {
                    kind: "tuple",
                    msg: format!(
                        "matrix is {}×{}, declared d = {}",
                        m.nrows(),
                        m.ncols(),
                        file.d
                    ),
                });
            }
        }
        OperatorTuple::new(mats)
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<OperatorTuple> {
        let mut text = String::new();
        std::fs::File::open(path)?.read_to_string(&mut text)?;
        OperatorTuple::from_json(&text)
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_json().as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }
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

    fn random_tuple(rng: &mut ChaCha12Rng, n: usize, d: usize, target_row_norm: f64) -> OperatorTuple {
        let mats: Vec<CMatrix> = (0..n)
            .map(|_| {
                CMatrix::from_fn(d, d, |_, _| {
                    C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                })
            })
            .collect();
        let x = OperatorTuple::new(mats).unwrap();
        let rn = x.row_norm();
        x.scaled(target_row_norm / rn)
    }

    fn random_int_poly(rng: &mut ChaCha12Rng, n: usize, d: usize) -> FreeSeries {
        let mut s = FreeSeries::zero(n, 1, d);
        for k in 0..=d {
            for rank in 0..words::level_len(n, k) {
                let re = rng.gen_range(-3..=3) as f64;
                let im = rng.gen_range(-3..=3) as f64;
                if re != 0.0 || im != 0.0 {
                    s.set_coeff(
                        &Word::from_rank(n, k, rank),
                        CMatrix::from_element(1, 1, C64::new(re, im)),
                    )
                    .unwrap();
                }
            }
        }
        s
    }

    #[test]
    fn evaluate_simple_polynomial() {
        // F = 1 + Z₁Z₂ at X₁ = E₁₂, X₂ = E₂₁: X₁X₂ = diag(1, 0).
        let f = FreeSeries::scalar_poly(2, &[(Word::identity(), one()), (w(&[1, 2]), one())])
            .unwrap();
        let x1 = CMatrix::from_fn(2, 2, |r, c| {
            if r == 0 && c == 1 { one() } else { C64::new(0.0, 0.0) }
        });
        let x2 = CMatrix::from_fn(2, 2, |r, c| {
            if r == 1 && c == 0 { one() } else { C64::new(0.0, 0.0) }
        });
        let x = OperatorTuple::new(vec![x1, x2]).unwrap();
        let ev = evaluate(&f, &x).unwrap();
        let expected = CMatrix::from_fn(2, 2, |r, c| {
            if r == c {
                C64::new(if r == 0 { 2.0 } else { 1.0 }, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        assert!((ev.value - expected).norm() < 1e-14);
        assert_eq!(ev.tail_bound, Some(0.0));
    }

    #[test]
    fn evaluate_is_multiplicative() {
        let mut rng = ChaCha12Rng::seed_from_u64(59);
        for _ in 0..5 {
            let f = random_int_poly(&mut rng, 2, 3);
            let g = random_int_poly(&mut rng, 2, 3);
            let x = random_tuple(&mut rng, 2, 3, 0.8);
            let ev_f = evaluate(&f, &x).unwrap().value;
            let ev_g = evaluate(&g, &x).unwrap().value;
            let ev_fg = evaluate(&f.multiply(&g).unwrap(), &x).unwrap().value;
            assert!((&ev_f * &ev_g - ev_fg).norm() < 1e-10);
        }
    }

    #[test]
    fn evaluate_matrix_coefficients_use_coefficient_major_layout() {
        let mut rng = ChaCha12Rng::seed_from_u64(61);
        let a = CMatrix::from_fn(2, 2, |_, _| C64::new(rng.gen::<f64>(), rng.gen::<f64>()));
        let mut f = FreeSeries::zero(2, 2, 1);
        f.set_coeff(&w(&[1]), a.clone()).unwrap();
        let x = random_tuple(&mut rng, 2, 3, 0.9);
        let ev = evaluate(&f, &x).unwrap();
        let expected = a.kronecker(x.mat(1));
        assert!((ev.value - expected).norm() < 1e-13);
    }

    #[test]
    fn evaluate_at_shifts_matches_fock_realization() {
        let mut rng = ChaCha12Rng::seed_from_u64(67);
        let f = random_int_poly(&mut rng, 2, 3);
        let space = TruncatedFock::new(2, 3).unwrap();
        let shifts = OperatorTuple::new(space.shift_tuple()).unwrap();
        let ev = evaluate(&f, &shifts).unwrap();
        let op = assemble(&f, 1.0, &space).unwrap();
        assert!((ev.value - op.matrix()).norm() < 1e-13);
    }

    #[test]
    fn jsr_of_scaled_unitaries_is_their_scale() {
        // X_i = u_i/√2 with u_i unitary: Φ(I) = I, so every g_k = 1/√2·√2…
        // More precisely Φ(Y) = Σ X_i Y X_iᴴ has Φ(I) = (1/2)(u₁u₁ᴴ+u₂u₂ᴴ) = I.
        let u1 = CMatrix::identity(3, 3);
        let theta = 0.7f64;
        let u2 = CMatrix::from_fn(3, 3, |r, c| {
            if r == c {
                C64::new(theta.cos(), theta.sin()).powi(r as i32 + 1)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let s = C64::new(1.0 / 2f64.sqrt(), 0.0);
        let x = OperatorTuple::new(vec![u1 * s, u2 * s]).unwrap();
        let est = joint_spectral_data(&x, 6);
        for g in &est.sequence {
            assert_relative_eq!(*g, 1.0, max_relative = 1e-12);
        }
        assert!(est.nilpotent_order.is_none());
    }

    #[test]
    fn jsr_detects_nilpotent_tuples() {
        // Single 2×2 Jordan cell: Φ²(I) = 0.
        let jordan = CMatrix::from_fn(2, 2, |r, c| {
            if r == 0 && c == 1 { one() } else { C64::new(0.0, 0.0) }
        });
        let x = OperatorTuple::new(vec![jordan]).unwrap();
        let est = joint_spectral_data(&x, 8);
        assert_eq!(est.nilpotent_order, Some(2));
        assert_eq!(est.upper, 0.0);
    }

    #[test]
    fn row_contraction_has_decreasing_iterates() {
        let mut rng = ChaCha12Rng::seed_from_u64(71);
        let x = random_tuple(&mut rng, 3, 4, 0.9);
        let norms = x.phi_norms(8);
        // Φ(I) ≤ row_norm²·I, so norms are ≤ row_norm^{2k} and decreasing.
        for (idx, m) in norms.iter().enumerate() {
            assert!(*m <= 0.9f64.powi(2 * (idx as i32 + 1)) + 1e-12);
        }
    }

    #[test]
    fn tail_bound_dominates_actual_remainder() {
        // F = Σ_k tᵏ Z₁ᵏ stored to degree D with tail (1, t): at the scalar
        // point X₁ = x the remainder is known in closed form.
        let t = 0.5_f64;
        let d = 4;
        let mut f = FreeSeries::zero(2, 1, d);
        for k in 0..=d {
            f.set_coeff(
                &Word::new(&vec![1; k], 2).unwrap(),
                CMatrix::from_element(1, 1, C64::new(t.powi(k as i32), 0.0)),
            )
            .unwrap();
        }
        let f = f.with_tail(TailDescriptor::new(1.0, t));
        let xval = 0.9;
        let x = OperatorTuple::new(vec![
            CMatrix::from_element(1, 1, C64::new(xval, 0.0)),
            CMatrix::zeros(1, 1),
        ])
        .unwrap();
        let ev = evaluate(&f, &x).unwrap();
        let actual_remainder: f64 =
            (t * xval).powi(d as i32 + 1) / (1.0 - t * xval);
        let bound = ev.tail_bound.expect("t·g < 1 certifies here");
        assert!(bound >= actual_remainder - 1e-15);
        assert!(bound < 10.0 * actual_remainder + 1e-12, "bound should be tight-ish");
    }

    #[test]
    fn tail_bound_finite_sum_for_nilpotent_points() {
        let t = 0.9;
        let f = FreeSeries::scalar_poly(2, &[(Word::identity(), one())])
            .unwrap()
            .with_tail(TailDescriptor::new(5.0, t));
        // Nilpotent tuple of order 2: only degree-1 products survive.
        let jordan = CMatrix::from_fn(2, 2, |r, c| {
            if r == 0 && c == 1 { one() } else { C64::new(0.0, 0.0) }
        });
        let x = OperatorTuple::new(vec![jordan.clone(), jordan * C64::new(0.5, 0.0)]).unwrap();
        let bound = evaluate(&f, &x).unwrap().tail_bound.unwrap();
        // Σ_{k=1}^{1} c·tᵏ·‖Φᵏ(I)‖^{1/2}: Φ(I) = 1.25·E₁₁.
        let expected = 5.0 * t * 1.25f64.sqrt();
        assert_relative_eq!(bound, expected, max_relative = 1e-12);
    }

    #[test]
    fn hinf_of_single_letter() {
        let f = FreeSeries::letter(2, 1).unwrap();
        let est = hinf_norm(&f, &[0.5, 0.9, 0.99], 4).unwrap();
        for (r, v) in &est.per_r {
            assert_relative_eq!(*v, *r, max_relative = 1e-12);
        }
        assert_relative_eq!(est.lower, 0.99, max_relative = 1e-12);
        assert_relative_eq!(est.upper.unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn hinf_upper_accounts_for_tail() {
        let f = FreeSeries::scalar_poly(2, &[(w(&[1]), one())])
            .unwrap()
            .with_tail(TailDescriptor::new(1.0, 0.5));
        let est = hinf_norm(&f, &[0.9], 3).unwrap();
        // Σ b_k = 1, tail adds 0.25/0.5 = 0.5.
        assert_relative_eq!(est.upper.unwrap(), 1.5, max_relative = 1e-12);
        let f = f.with_tail(TailDescriptor::new(1.0, 1.0));
        assert!(hinf_norm(&f, &[0.9], 3).unwrap().upper.is_none());
    }

    #[test]
    fn hardy_mean_of_single_letter() {
        // ‖rS₁‖ = r on any truncation with N ≥ 1, so the p-mean is
        // (p+1)^{-1/p}.
        for p in [1.0, 2.0, 4.0] {
            let f = FreeSeries::letter(2, 1).unwrap();
            let bracket = hardy_mean(&f, p, 400, 2).unwrap();
            let exact = (p + 1.0).powf(-1.0 / p);
            assert!(bracket.lower <= exact + 1e-12);
            assert!(bracket.upper >= exact - 1e-12);
            assert!(bracket.width() < 0.01);
        }
    }

    #[test]
    fn hardy_means_increase_with_p() {
        let mut rng = ChaCha12Rng::seed_from_u64(73);
        let f = random_int_poly(&mut rng, 2, 3);
        let b1 = hardy_mean(&f, 1.0, 200, 3).unwrap();
        let b2 = hardy_mean(&f, 2.0, 200, 3).unwrap();
        let b4 = hardy_mean(&f, 4.0, 200, 3).unwrap();
        // Power-mean chain over the probability measure dr on [0,1]:
        // brackets may overlap, so compare certified sides.
        assert!(b1.lower <= b2.upper + 1e-12);
        assert!(b2.lower <= b4.upper + 1e-12);
    }

    #[test]
    fn metric_axioms() {
        let mut rng = ChaCha12Rng::seed_from_u64(79);
        let f = random_int_poly(&mut rng, 2, 3);
        let g = random_int_poly(&mut rng, 2, 3);
        let h = random_int_poly(&mut rng, 2, 3);
        let terms = 10;
        let level = 3;
        let dff = metric_rho(&f, &f, terms, level).unwrap();
        assert_eq!(dff.value, 0.0);
        let fg = metric_rho(&f, &g, terms, level).unwrap().value;
        let gf = metric_rho(&g, &f, terms, level).unwrap().value;
        assert_relative_eq!(fg, gf, max_relative = 1e-12);
        let fh = metric_rho(&f, &h, terms, level).unwrap().value;
        let gh = metric_rho(&g, &h, terms, level).unwrap().value;
        assert!(fg <= fh + gh + 1e-12);
        assert!(metric_rho(&f, &g, terms, level).unwrap().tail_bound <= 2f64.powi(-10));
    }

    fn random_unitary(rng: &mut ChaCha12Rng, n: usize) -> CMatrix {
        // QR of a random complex matrix gives a Haar-ish unitary.
        let a = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let qr = a.qr();
        qr.q()
    }

    #[test]
    fn substitution_preserves_block_norms() {
        let mut rng = ChaCha12Rng::seed_from_u64(83);
        let f = random_int_poly(&mut rng, 3, 3);
        let u = random_unitary(&mut rng, 3);
        let g = unitary_substitution_series(&f, &u).unwrap();
        for k in 0..=3usize {
            assert_relative_eq!(g.block_norm(k), f.block_norm(k), max_relative = 1e-12);
        }
    }

    #[test]
    fn substitution_equivariance_under_evaluation() {
        let mut rng = ChaCha12Rng::seed_from_u64(89);
        for _ in 0..3 {
            let f = random_int_poly(&mut rng, 2, 3);
            let u = random_unitary(&mut rng, 2);
            let x = random_tuple(&mut rng, 2, 3, 0.9);
            let lhs = evaluate(&unitary_substitution_series(&f, &u).unwrap(), &x)
                .unwrap()
                .value;
            let rhs = evaluate(&f, &unitary_substitution_tuple(&x, &u).unwrap())
                .unwrap()
                .value;
            assert!((lhs - rhs).norm() < 1e-11);
        }
    }

    #[test]
    fn substitution_composes_contravariantly() {
        let mut rng = ChaCha12Rng::seed_from_u64(97);
        let x = random_tuple(&mut rng, 3, 2, 0.9);
        let u = random_unitary(&mut rng, 3);
        let v = random_unitary(&mut rng, 3);
        let lhs = unitary_substitution_tuple(&unitary_substitution_tuple(&x, &v).unwrap(), &u)
            .unwrap();
        let rhs = unitary_substitution_tuple(&x, &(&v * &u)).unwrap();
        for i in 1..=3 {
            assert!((lhs.mat(i) - rhs.mat(i)).norm() < 1e-12);
        }
    }

    #[test]
    fn substitution_rejects_non_unitaries() {
        let f = FreeSeries::letter(2, 1).unwrap();
        let not_u = CMatrix::from_element(2, 2, C64::new(0.5, 0.0));
        assert!(matches!(
            unitary_substitution_series(&f, &not_u),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn tuple_json_roundtrip() {
        let mut rng = ChaCha12Rng::seed_from_u64(101);
        let x = random_tuple(&mut rng, 2, 3, 0.9);
        let back = OperatorTuple::from_json(&x.to_json()).unwrap();
        for i in 1..=2 {
            assert!((x.mat(i) - back.mat(i)).norm() < 1e-15);
        }
        let bad = r#"{"n": 2, "d": 2, "mats": [{"re": [[1.0,0.0],[0.0,1.0]], "im": [[0.0,0.0],[0.0,0.0]]}]}"#;
        assert!(OperatorTuple::from_json(bad).is_err());
    }
}
