//! Formal free power series `F = Σ_α A_(α) ⊗ Z_α` with matrix coefficients.
//!
//! Coefficients are stored per homogeneous degree as flat arrays indexed by
//! lexicographic rank (see [`crate::words`]); an absent block is zero. A
//! series is a polynomial when it carries no [`TailDescriptor`]; with one,
//! the descriptor certifies `block_norm(k) ≤ c·tᵏ` for every degree beyond
//! the stored range, which is what makes truncation-error accounting and the
//! rigorous radius bound possible.

use crate::error::{Error, Result};
use crate::linalg;
use crate::words::{self, MultiIndex, Word};
use crate::{C64, CMatrix};
use num_complex::ComplexFloat;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

/// Geometric bound on the block norms beyond the stored degree:
/// `block_norm(k) ≤ c·tᵏ` for all `k > max_degree`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailDescriptor {
    pub c: f64,
    pub t: f64,
}

impl TailDescriptor {
    pub fn new(c: f64, t: f64) -> Self {
        assert!(
            c.is_finite() && t.is_finite() && c >= 0.0 && t >= 0.0,
            "tail descriptor must be finite and non-negative"
        );
        TailDescriptor { c, t }
    }

    /// A tail with no actual content (c = 0 or t = 0) certifies that every
    /// block beyond the stored degree vanishes — i.e. the series is a
    /// polynomial in disguise.
    pub fn is_vacuous(&self) -> bool {
        self.c == 0.0 || self.t == 0.0
    }
}

/// Free power series with `q × q` complex matrix coefficients (q = 1 models
/// scalar series) over the alphabet `1..=n`, stored up to `max_degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeSeries {
    n: usize,
    q: usize,
    max_degree: usize,
    /// `blocks[k]`, when present, has exactly `n^k` entries indexed by
    /// lexicographic rank.
    blocks: Vec<Option<Vec<CMatrix>>>,
    tail: Option<TailDescriptor>,
}

fn mat_is_zero(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

impl FreeSeries {
    /// The zero series of the given shape.
    pub fn zero(n: usize, q: usize, max_degree: usize) -> Self {
        assert!(n >= 1 && q >= 1);
        FreeSeries {
            n,
            q,
            max_degree,
            blocks: vec![None; max_degree + 1],
            tail: None,
        }
    }

    /// Constant series with scalar value `c`.
    pub fn scalar_constant(n: usize, c: C64) -> Self {
        let mut s = FreeSeries::zero(n, 1, 0);
        s.set_coeff(&Word::identity(), CMatrix::from_element(1, 1, c))
            .expect("constant term always fits");
        s
    }

    /// The coordinate series Z_j (scalar coefficient 1 at the single letter).
    pub fn letter(n: usize, j: usize) -> Result<Self> {
        let w = Word::new(&[j], n)?;
        let mut s = FreeSeries::zero(n, 1, 1);
        s.set_coeff(&w, CMatrix::from_element(1, 1, C64::new(1.0, 0.0)))?;
        Ok(s)
    }

    /// Scalar polynomial from `(word, coefficient)` terms; the stored degree
    /// is the longest word's length.
    pub fn scalar_poly(n: usize, terms: &[(Word, C64)]) -> Result<Self> {
        let d = terms.iter().map(|(w, _)| w.len()).max().unwrap_or(0);
        let mut s = FreeSeries::zero(n, 1, d);
        for (w, c) in terms {
            let cur = s
                .coeff(w)
                .map(|m| m[(0, 0)])
                .unwrap_or_else(|| C64::new(0.0, 0.0));
            s.set_coeff(w, CMatrix::from_element(1, 1, cur + c))?;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn tail(&self) -> Option<TailDescriptor> {
        self.tail
    }

    /// A tail that actually constrains something (non-vacuous).
    fn effective_tail(&self) -> Option<TailDescriptor> {
        self.tail.filter(|t| !t.is_vacuous())
    }

    /// True when the series is exactly its stored polynomial part.
    pub fn is_polynomial(&self) -> bool {
        self.effective_tail().is_none()
    }

    pub fn set_tail(&mut self, tail: Option<TailDescriptor>) {
        self.tail = tail;
    }

    pub fn with_tail(mut self, tail: TailDescriptor) -> Self {
        self.tail = Some(tail);
        self
    }

    /// Stored coefficient block of degree `k` (lex-ranked), if present.
    pub fn block(&self, k: usize) -> Option<&[CMatrix]> {
        self.blocks.get(k).and_then(|b| b.as_deref())
    }

    fn ensure_block(&mut self, k: usize) -> Result<&mut Vec<CMatrix>> {
        let count = words::level_count(self.n, k);
        if count > words::ENUMERATION_CAP {
            return Err(Error::EnumerationCap {
                count,
                cap: words::ENUMERATION_CAP,
            });
        }
        let slot = &mut self.blocks[k];
        if slot.is_none() {
            *slot = Some(vec![CMatrix::zeros(self.q, self.q); count as usize]);
        }
        Ok(slot.as_mut().unwrap())
    }

    /// Coefficient at a word, if stored (absent = zero).
    pub fn coeff(&self, w: &Word) -> Option<&CMatrix> {
        if w.len() > self.max_degree || !w.fits_alphabet(self.n) {
            return None;
        }
        let rank = w.lex_rank(self.n);
        self.block(w.len()).map(|b| &b[rank])
    }

    /// Coefficient as an owned matrix, zero when absent.
    pub fn coeff_or_zero(&self, w: &Word) -> CMatrix {
        self.coeff(w)
            .cloned()
            .unwrap_or_else(|| CMatrix::zeros(self.q, self.q))
    }

    /// Set the coefficient at `w` (must fit the alphabet, degree, and shape).
    pub fn set_coeff(&mut self, w: &Word, value: CMatrix) -> Result<()> {
        if !w.fits_alphabet(self.n) {
            return Err(Error::LetterOutOfRange {
                letter: w.letters().iter().map(|&l| l as usize).max().unwrap_or(0),
                n: self.n,
            });
        }
        if w.len() > self.max_degree {
            return Err(Error::ShapeMismatch(format!(
                "word of length {} exceeds stored degree {}",
                w.len(),
                self.max_degree
            )));
        }
        if value.nrows() != self.q || value.ncols() != self.q {
            return Err(Error::ShapeMismatch(format!(
                "coefficient is {}×{}, series wants {}×{}",
                value.nrows(),
                value.ncols(),
                self.q,
                self.q
            )));
        }
        let n = self.n;
        let rank = w.lex_rank(n);
        let block = self.ensure_block(w.len())?;
        block[rank] = value;
        Ok(())
    }

    /// All nonzero stored terms in (degree, rank) order.
    pub fn nonzero_terms(&self) -> Vec<(Word, &CMatrix)> {
        let mut out = Vec::new();
        for k in 0..=self.max_degree {
            if let Some(block) = self.block(k) {
                for (rank, m) in block.iter().enumerate() {
                    if !mat_is_zero(m) {
                        out.push((Word::from_rank(self.n, k, rank), m));
                    }
                }
            }
        }
        out
    }

    /// True when every stored coefficient vanishes and no tail is declared.
    pub fn is_zero(&self) -> bool {
        self.is_polynomial()
            && self
                .blocks
                .iter()
                .flatten()
                .all(|b| b.iter().all(mat_is_zero))
    }

    /// Homogeneous block norms `b_k = ‖Σ_{|α|=k} A_(α)* A_(α)‖^{1/2}` for
    /// k = 0..=max_degree (scalar case: `(Σ |a_α|²)^{1/2}`).
    pub fn block_norms(&self) -> Vec<f64> {
        (0..=self.max_degree).map(|k| self.block_norm(k)).collect()
    }

    /// Single homogeneous block norm b_k.
    pub fn block_norm(&self, k: usize) -> f64 {
        let Some(block) = self.block(k) else {
            return 0.0;
        };
        if self.q == 1 {
            block
                .iter()
                .map(|m| m[(0, 0)].abs().powi(2))
                .sum::<f64>()
                .sqrt()
        } else {
            let mut gram = CMatrix::zeros(self.q, self.q);
            for m in block {
                if !mat_is_zero(m) {
                    gram.gemm_ad(C64::new(1.0, 0.0), m, m, C64::new(1.0, 0.0));
                }
            }
            linalg::hermitize(&mut gram);
            linalg::hermitian_lambda_max(&gram).max(0.0).sqrt()
        }
    }

    /// Linear combination `a·F + b·G`.
    ///
    /// Degree rule: with no (effective) tails the result stores
    /// `max(D_F, D_G)` exactly; any tailed operand caps the result at its
    /// stored degree, and blocks dropped by that cap are absorbed into the
    /// combined tail constant so the descriptor stays honest.
    pub fn add(&self, other: &FreeSeries, a: C64, b: C64) -> Result<FreeSeries> {
        self.check_same_shape(other)?;
        let ta = self.effective_tail();
        let tb = other.effective_tail();
        let d_res = match (&ta, &tb) {
            (None, None) => self.max_degree.max(other.max_degree),
            (Some(_), None) => self.max_degree,
            (None, Some(_)) => other.max_degree,
            (Some(_), Some(_)) => self.max_degree.min(other.max_degree),
        };
        let mut out = FreeSeries::zero(self.n, self.q, d_res);
        for k in 0..=d_res {
            let ba = self.block(k);
            let bb = other.block(k);
            if ba.is_none() && bb.is_none() {
                continue;
            }
            let block = out.ensure_block(k)?;
            if let Some(ba) = ba {
                for (dst, src) in block.iter_mut().zip(ba) {
                    *dst += src * a;
                }
            }
            if let Some(bb) = bb {
                for (dst, src) in block.iter_mut().zip(bb) {
                    *dst += src * b;
                }
            }
        }
        out.tail = match (ta, tb) {
            (None, None) => None,
            _ => {
                let t_res = ta.map_or(0.0, |t| t.t).max(tb.map_or(0.0, |t| t.t));
                let c_res = a.abs() * self.cover_constant(d_res, t_res)
                    + b.abs() * other.cover_constant(d_res, t_res);
                Some(TailDescriptor::new(c_res, t_res))
            }
        };
        Ok(out)
    }

    /// Smallest c such that `block_norm(k) ≤ c·ratioᵏ` holds for every
    /// k > `from`, combining stored blocks above `from` with the declared
    /// tail. Infinite when the series has content there that `ratio` cannot
    /// dominate (ratio = 0 with nonzero blocks).
    fn cover_constant(&self, from: usize, ratio: f64) -> f64 {
        let mut c = match self.effective_tail() {
            // Declared tail covers k > max_degree. Its own ratio t is ≤ the
            // covering ratio by construction at every call site, so the
            // constant carries over.
            Some(t) => {
                debug_assert!(t.t <= ratio);
                t.c
            }
            None => 0.0,
        };
        for k in (from + 1)..=self.max_degree {
            let b = self.block_norm(k);
            if b > 0.0 {
                c = c.max(b / ratio.powi(k as i32));
            }
        }
        c
    }

    /// Cauchy product `F·G`: coefficient `C_(α) = Σ_{α=σβ} A_(σ) B_(β)`.
    ///
    /// Degree rule: polynomial × polynomial stores `D_F + D_G` exactly; a
    /// tailed operand caps the stored degree at its own (all factor blocks
    /// entering a stored coefficient are then known), and the result's tail
    /// is a safe geometric over-estimate of the convolution bound
    /// `b_k(FG) ≤ Σ_{p+q=k} b_p(F) b_q(G)`.
    pub fn multiply(&self, other: &FreeSeries) -> Result<FreeSeries> {
        self.check_same_shape(other)?;
        let ta = self.effective_tail();
        let tb = other.effective_tail();
        let d_res = match (&ta, &tb) {
            (None, None) => self.max_degree + other.max_degree,
            (Some(_), None) => self.max_degree,
            (None, Some(_)) => other.max_degree,
            (Some(_), Some(_)) => self.max_degree.min(other.max_degree),
        };
        let mut out = FreeSeries::zero(self.n, self.q, d_res);
        let n = self.n;
        for k in 0..=d_res {
            // Allocate even for all-zero products so the cap is checked once.
            out.ensure_block(k)?;
            for p in 0..=k.min(self.max_degree) {
                let qd = k - p;
                if qd > other.max_degree {
                    continue;
                }
                let (Some(fa), Some(fb)) = (self.block(p), other.block(qd)) else {
                    continue;
                };
                let stride = words::level_len(n, qd);
                let block = out.blocks[k].as_mut().unwrap();
                for (ra, ma) in fa.iter().enumerate() {
                    if mat_is_zero(ma) {
                        continue;
                    }
                    for (rb, mb) in fb.iter().enumerate() {
                        if mat_is_zero(mb) {
                            continue;
                        }
                        block[ra * stride + rb].gemm(
                            C64::new(1.0, 0.0),
                            ma,
                            mb,
                            C64::new(1.0, 0.0),
                        );
                    }
                }
            }
        }
        out.tail = match (&ta, &tb) {
            (None, None) => None,
            (Some(tg), None) | (None, Some(tg)) => {
                // One factor is a polynomial: the convolution against its
                // finitely many blocks keeps the tailed factor's exact ratio.
                let (tailed, poly) = if ta.is_some() {
                    (self, other)
                } else {
                    (other, self)
                };
                let t = tg.t;
                let c_hat = tailed.cover_constant(0, t).max(tg.c);
                let poly_sum: f64 = (0..=poly.max_degree)
                    .map(|p| {
                        let b = poly.block_norm(p);
                        if b > 0.0 {
                            b / t.powi(p as i32)
                        } else {
                            0.0
                        }
                    })
                    .sum();
                Some(TailDescriptor::new(c_hat * poly_sum, t))
            }
            (Some(tf), Some(tg)) => {
                // Both tailed: b_k(FG) ≤ ĉ_F ĉ_G (k+1) mᵏ with m the larger
                // ratio. A fixed constant cannot absorb (k+1) at ratio m, so
                // the ratio is bumped slightly and the exact finite maximum
                // of (k+1)(m/t')ᵏ is folded into the constant.
                let m = tf.t.max(tg.t);
                let c_f = self.cover_constant(0, m).max(tf.c);
                let c_g = other.cover_constant(0, m).max(tg.c);
                let t_res = m * (d_res as f64 + 3.0) / (d_res as f64 + 2.0);
                let c_res = c_f * c_g * max_linear_geometric(d_res + 1, m / t_res);
                Some(TailDescriptor::new(c_res, t_res))
            }
        };
        Ok(out)
    }

    /// Scale every coefficient by `c`.
    pub fn scale(&self, c: C64) -> FreeSeries {
        let mut out = self.clone();
        for block in out.blocks.iter_mut().flatten() {
            for m in block.iter_mut() {
                *m *= c;
            }
        }
        out.tail = self
            .tail
            .map(|t| TailDescriptor::new(t.c * c.abs(), t.t));
        out
    }

    /// `F_r`: coefficient at α scaled by `r^{|α|}`; tail `(c, t) → (c, r·t)`.
    pub fn dilate(&self, r: f64) -> FreeSeries {
        assert!(r >= 0.0, "dilation radius must be non-negative");
        let mut out = self.clone();
        for (k, block) in out.blocks.iter_mut().enumerate() {
            if let Some(block) = block {
                let f = C64::new(r.powi(k as i32), 0.0);
                for m in block.iter_mut() {
                    *m *= f;
                }
            }
        }
        out.tail = self.tail.map(|t| TailDescriptor::new(t.c, t.t * r));
        out
    }

    /// Conjugate-transpose every coefficient (word index unchanged; the
    /// reversal semantics of adjoint parts live in evaluation, not here).
    pub fn adjoint(&self) -> FreeSeries {
        let mut out = self.clone();
        for block in out.blocks.iter_mut().flatten() {
            for m in block.iter_mut() {
                *m = m.adjoint();
            }
        }
        out
    }

    /// Keep only degrees `0..=d` and drop the tail: the d-th partial sum.
    pub fn truncate_poly(&self, d: usize) -> FreeSeries {
        let d = d.min(self.max_degree);
        let mut out = FreeSeries::zero(self.n, self.q, d);
        for k in 0..=d {
            if let Some(block) = self.block(k) {
                out.blocks[k] = Some(block.to_vec());
            }
        }
        out
    }

    /// Hadamard-type radius data over the degree window `k0..=k1`.
    pub fn radius_estimate(&self, k0: usize, k1: usize) -> Result<RadiusEstimate> {
        if k0 < 1 || k0 > k1 || k1 > self.max_degree {
            return Err(Error::BadWindow {
                k0,
                k1,
                d: self.max_degree,
            });
        }
        let norms = self.block_norms();
        let sequence: Vec<f64> = (k0..=k1)
            .map(|k| norms[k].powf(1.0 / k as f64))
            .collect();
        let window_max = sequence.iter().cloned().fold(0.0, f64::max);
        let point = if window_max > 0.0 {
            1.0 / window_max
        } else {
            f64::INFINITY
        };
        // Rigorous lower bound for the radius, available only with a tail:
        // stored blocks give b_k^{1/k} for every k ≤ D, and beyond D the
        // descriptor gives b_k^{1/k} ≤ c^{1/k}·t ≤ t·max(1,c)^{1/(D+1)}.
        let lower = self.effective_tail().map(|tail| {
            let stored_max = (1..=self.max_degree)
                .map(|k| norms[k].powf(1.0 / k as f64))
                .fold(0.0, f64::max);
            let tail_max = tail.t * tail.c.max(1.0).powf(1.0 / (self.max_degree as f64 + 1.0));
            let denom = stored_max.max(tail_max);
            if denom > 0.0 {
                1.0 / denom
            } else {
                f64::INFINITY
            }
        });
        Ok(RadiusEstimate {
            sequence,
            point,
            lower,
            window: (k0, k1),
            proxy_only: self.effective_tail().is_none(),
        })
    }

    /// Split `F = Σ_{|β|=m} Z_β·Φ_(β)` (requires all coefficients below
    /// degree m to vanish). Returns the Φ series in lex order of β.
    pub fn gleason_decompose(&self, m: usize) -> Result<Vec<(Word, FreeSeries)>> {
        for k in 0..m.min(self.max_degree + 1) {
            if let Some(block) = self.block(k) {
                if block.iter().any(|c| !mat_is_zero(c)) {
                    return Err(Error::LowOrderNonzero { degree: k, m });
                }
            }
        }
        if m > self.max_degree {
            return Err(Error::ShapeMismatch(format!(
                "split degree {m} exceeds stored degree {}",
                self.max_degree
            )));
        }
        let count = words::level_count(self.n, m);
        if count > words::ENUMERATION_CAP {
            return Err(Error::EnumerationCap {
                count,
                cap: words::ENUMERATION_CAP,
            });
        }
        let d_phi = self.max_degree - m;
        let tail_phi = self
            .effective_tail()
            .map(|t| TailDescriptor::new(t.c * t.t.powi(m as i32), t.t));
        let n = self.n;
        let mut out = Vec::with_capacity(count as usize);
        for rb in 0..count as usize {
            let beta = Word::from_rank(n, m, rb);
            let mut phi = FreeSeries::zero(n, self.q, d_phi);
            for k in 0..=d_phi {
                if let Some(src) = self.block(m + k) {
                    let stride = words::level_len(n, k);
                    let dst = phi.ensure_block(k)?;
                    for ra in 0..stride {
                        dst[ra] = src[rb * stride + ra].clone();
                    }
                }
            }
            phi.tail = tail_phi;
            out.push((beta, phi));
        }
        Ok(out)
    }

    /// Maximum absolute entry-wise difference between stored coefficients
    /// (union of blocks; pure polynomial comparison).
    pub fn max_coeff_diff(&self, other: &FreeSeries) -> f64 {
        let d = self.max_degree.max(other.max_degree);
        let mut worst = 0.0_f64;
        for k in 0..=d {
            let count = words::level_len(self.n, k);
            let ba = self.block(k);
            let bb = other.block(k);
            if ba.is_none() && bb.is_none() {
                continue;
            }
            for rank in 0..count {
                let za = ba.map(|b| &b[rank]);
                let zb = bb.map(|b| &b[rank]);
                for r in 0..self.q {
                    for c in 0..self.q {
                        let va = za.map_or(C64::new(0.0, 0.0), |m| m[(r, c)]);
                        let vb = zb.map_or(C64::new(0.0, 0.0), |m| m[(r, c)]);
                        worst = worst.max((va - vb).abs());
                    }
                }
            }
        }
        worst
    }

    fn check_same_shape(&self, other: &FreeSeries) -> Result<()> {
        if self.n != other.n || self.q != other.q {
            return Err(Error::ShapeMismatch(format!(
                "series shapes differ: (n={}, q={}) vs (n={}, q={})",
                self.n, self.q, other.n, other.q
            )));
        }
        Ok(())
    }

    pub(crate) fn from_blocks(
        n: usize,
        q: usize,
        max_degree: usize,
        blocks: Vec<Option<Vec<CMatrix>>>,
        tail: Option<TailDescriptor>,
    ) -> Self {
        debug_assert_eq!(blocks.len(), max_degree + 1);
        FreeSeries {
            n,
            q,
            max_degree,
            blocks,
            tail,
        }
    }
}

/// max over k ≥ k0 of (k+1)·ratioᵏ for 0 ≤ ratio < 1. The map is unimodal
/// with peak near ratio/(1−ratio), so a finite scan suffices.
pub(crate) fn max_linear_geometric(k0: usize, ratio: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&ratio));
    if ratio == 0.0 {
        return if k0 == 0 { 1.0 } else { 0.0 };
    }
    let peak = (ratio / (1.0 - ratio)).ceil() as usize + 2;
    (k0..=k0.max(peak))
        .map(|k| (k as f64 + 1.0) * ratio.powi(k as i32))
        .fold(0.0, f64::max)
}

/// Result of [`FreeSeries::radius_estimate`]: `sequence` holds `b_k^{1/k}`
/// over the window, `point` is the finite-window proxy `1/max sequence`,
/// and `lower` is the rigorous bound available only when a tail certifies
/// the unstored blocks. `proxy_only` flags that nothing is certified.
#[derive(Clone, Debug)]
pub struct RadiusEstimate {
    pub sequence: Vec<f64>,
    pub point: f64,
    pub lower: Option<f64>,
    pub window: (usize, usize),
    pub proxy_only: bool,
}

/// Build the symmetrization of a commutative coefficient table: the scalar
/// series with `c_α = (𝐩!/|𝐩|!)·a_𝐩` for every α with letter counts 𝐩
/// (missing table entries are zero).
pub fn symmetrize(n: usize, max_degree: usize, table: &[(MultiIndex, C64)]) -> Result<FreeSeries> {
    let mut lookup: HashMap<&[usize], C64> = HashMap::new();
    for (p, a) in table {
        if p.n() != n {
            return Err(Error::ShapeMismatch(format!(
                "multi-index has {} entries, alphabet has {}",
                p.n(),
                n
            )));
        }
        *lookup.entry(p.counts()).or_insert(C64::new(0.0, 0.0)) += a;
    }
    let mut out = FreeSeries::zero(n, 1, max_degree);
    for k in 0..=max_degree {
        let count = words::level_count(n, k);
        if count > words::ENUMERATION_CAP {
            return Err(Error::EnumerationCap {
                count,
                cap: words::ENUMERATION_CAP,
            });
        }
        let mut any = false;
        let mut block = vec![CMatrix::zeros(1, 1); count as usize];
        for (rank, m) in block.iter_mut().enumerate() {
            let p = Word::from_rank(n, k, rank).letter_counts(n);
            if let Some(&a) = lookup.get(p.counts()) {
                let card = p.multinomial()? as f64;
                m[(0, 0)] = a / card;
                any = true;
            }
        }
        if any {
            out.blocks[k] = Some(block);
        }
    }
    Ok(out)
}

// ----------------------------------------------------------------------
// Interchange file format (JSON)
// ----------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CoeffEntry {
    word: Vec<usize>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct SeriesFile {
    n: usize,
    q: usize,
    max_degree: usize,
    coeffs: Vec<CoeffEntry>,
    tail: Option<TailDescriptor>,
}

fn matrix_to_grids(m: &CMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut re = vec![vec![0.0; cols]; rows];
    let mut im = vec![vec![0.0; cols]; rows];
    for r in 0..rows {
        for c in 0..cols {
            re[r][c] = m[(r, c)].re;
            im[r][c] = m[(r, c)].im;
        }
    }
    (re, im)
}

pub(crate) fn grids_to_matrix(re: &[Vec<f64>], im: &[Vec<f64>], kind: &'static str) -> Result<CMatrix> {
    let rows = re.len();
    if rows == 0 || im.len() != rows {
        return Err(Error::InvalidFile {
            kind,
            msg: "re/im grids empty or of different heights".into(),
        });
    }
    let cols = re[0].len();
    if cols == 0 {
        return Err(Error::InvalidFile {
            kind,
            msg: "re grid has empty rows".into(),
        });
    }
    for row in re.iter().chain(im.iter()) {
        if row.len() != cols {
            return Err(Error::InvalidFile {
                kind,
                msg: "ragged re/im grid".into(),
            });
        }
    }
    Ok(CMatrix::from_fn(rows, cols, |r, c| {
        C64::new(re[r][c], im[r][c])
    }))
}

impl FreeSeries {
    /// Serialize to the interchange JSON (coefficients in (degree, rank)
    /// order, exact zeros omitted — byte-deterministic for a given series).
    pub fn to_json(&self) -> String {
        let coeffs = self
            .nonzero_terms()
            .into_iter()
            .map(|(w, m)| {
                let (re, im) = matrix_to_grids(m);
                CoeffEntry {
                    word: w.letters().iter().map(|&l| l as usize).collect(),
                    re,
                    im,
                }
            })
            .collect();
        let file = SeriesFile {
            n: self.n,
            q: self.q,
            max_degree: self.max_degree,
            coeffs,
            tail: self.tail,
        };
        serde_json::to_string_pretty(&file).expect("series serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<FreeSeries> {
        let file: SeriesFile = serde_json::from_str(text)?;
        if file.n < 1 || file.q < 1 {
            return Err(Error::InvalidFile {
                kind: "series",
                msg: format!("n = {} and q = {} must be ≥ 1", file.n, file.q),
            });
        }
        let mut s = FreeSeries::zero(file.n, file.q, file.max_degree);
        for entry in &file.coeffs {
            let w = Word::new(&entry.word, file.n)?;
            if w.len() > file.max_degree {
                return Err(Error::InvalidFile {
                    kind: "series",
                    msg: format!("word {w} longer than max_degree {}", file.max_degree),
                });
            }
            if s.coeff(&w).map(|m| !mat_is_zero(m)).unwrap_or(false) {
                return Err(Error::InvalidFile {
                    kind: "series",
                    msg: format!("duplicate coefficient for word {w}"),
                });
            }
            let m = grids_to_matrix(&entry.re, &entry.im, "series")?;
            if m.nrows() != file.q || m.ncols() != file.q {
                return Err(Error::InvalidFile {
                    kind: "series",
                    msg: format!(
                        "coefficient for {w} is {}×{}, expected {}×{}",
                        m.nrows(),
                        m.ncols(),
                        file.q,
                        file.q
                    ),
                });
            }
            s.set_coeff(&w, m)?;
        }
        if let Some(t) = file.tail {
            if !(t.c.is_finite() && t.t.is_finite() && t.c >= 0.0 && t.t >= 0.0) {
                return Err(Error::InvalidFile {
                    kind: "series",
                    msg: "tail constants must be finite and non-negative".into(),
                });
            }
            s.tail = Some(t);
        }
        Ok(s)
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<FreeSeries> {
        let mut text = String::new();
        std::fs::File::open(path)?.read_to_string(&mut text)?;
        FreeSeries::from_json(&text)
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_json().as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}
