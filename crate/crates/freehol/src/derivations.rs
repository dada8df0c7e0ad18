//! Directional derivations ∂_j on free series.
//!
//! `∂_j` removes one occurrence of the letter j from each monomial, summed
//! over the positions where it appears: `∂_j Z_α = Σ_p Z_{α minus p-th
//! letter}` over positions p carrying the letter j. It is linear, satisfies
//! the Leibniz rule, and different letters' derivations commute.
//!
//! Two independent implementations are exposed. The production path builds
//! the coefficient of the derived series at β directly, as the sum of the
//! source coefficients over all insertions of the letter into β — pure rank
//! arithmetic, no word materialization. The deletion path walks the nonzero
//! monomials of a polynomial and distributes each coefficient over its
//! deletions; it exists to cross-check the first.

use crate::error::{Error, Result};
use crate::series::{max_linear_geometric, FreeSeries, TailDescriptor};
use crate::words;
use crate::CMatrix;

/// ∂_j of a series (j is 1-based).
///
/// The stored degree drops by one. A tail `(c, t)` turns into a certified
/// tail for the derivative: each derived block obeys
/// `b_k(∂F) ≤ (k+1)·b_{k+1}(F)` (the k+1 insertion slices are isometric
/// re-indexings), and the linear factor is absorbed by bumping the ratio.
pub fn partial(series: &FreeSeries, j: usize) -> Result<FreeSeries> {
    let n = series.n();
    if j < 1 || j > n {
        return Err(Error::LetterOutOfRange { letter: j, n });
    }
    let d = series.max_degree();
    let tail = series.tail().filter(|t| !t.is_vacuous());
    if d == 0 {
        if tail.is_some() {
            return Err(Error::ShapeMismatch(
                "cannot differentiate a tailed series with no stored degree beyond the constant"
                    .into(),
            ));
        }
        return Ok(FreeSeries::zero(n, series.q(), 0));
    }
    let d_res = d - 1;
    let mut blocks: Vec<Option<Vec<CMatrix>>> = Vec::with_capacity(d_res + 1);
    for k in 0..=d_res {
        let Some(src) = series.block(k + 1) else {
            blocks.push(None);
            continue;
        };
        let count = words::level_len(n, k);
        let mut out = vec![CMatrix::zeros(series.q(), series.q()); count];
        for (rb, dst) in out.iter_mut().enumerate() {
            // β has rank rb; inserting j after position m splits
            // rb = hi·n^{k-m} + lo and targets hi·n^{k-m+1} + (j-1)·n^{k-m} + lo.
            for m in 0..=k {
                let low_span = words::level_len(n, k - m);
                let hi = rb / low_span;
                let lo = rb % low_span;
                let src_rank = hi * low_span * n + (j - 1) * low_span + lo;
                *dst += &src[src_rank];
            }
        }
        blocks.push(Some(out));
    }
    let new_tail = tail.map(|t| {
        let t_res = t.t * (d_res as f64 + 3.0) / (d_res as f64 + 2.0);
        let c_res = t.c * t.t * max_linear_geometric(d, t.t / t_res);
        TailDescriptor::new(c_res, t_res)
    });
    Ok(FreeSeries::from_blocks(
        n,
        series.q(),
        d_res,
        blocks,
        new_tail,
    ))
}

/// ∂_j computed monomial-by-monomial through deletion multisets.
/// Polynomials only — an independent oracle for [`partial`].
pub fn partial_via_deletions(series: &FreeSeries, j: usize) -> Result<FreeSeries> {
    let n = series.n();
    if j < 1 || j > n {
        return Err(Error::LetterOutOfRange { letter: j, n });
    }
    if series.tail().is_some_and(|t| !t.is_vacuous()) {
        return Err(Error::ShapeMismatch(
            "deletion-based derivative is defined for polynomials only".into(),
        ));
    }
    let d_res = series.max_degree().saturating_sub(1);
    let mut out = FreeSeries::zero(n, series.q(), d_res);
    for (alpha, coeff) in series.nonzero_terms() {
        if alpha.is_identity() {
            continue;
        }
        for (word, mult) in alpha.deletions(j).iter() {
            let mut acc = out.coeff_or_zero(word);
            acc += coeff * crate::C64::new(mult as f64, 0.0);
            out.set_coeff(word, acc)?;
        }
    }
    Ok(out)
}

/// Iterated derivation `∂_{i₁}∂_{i₂}…∂_{i_k} F`, applied right to left
/// (the innermost — last — index first). The derivations commute, so the
/// order is a display convention, not a semantic one.
pub fn partial_multi(series: &FreeSeries, indices: &[usize]) -> Result<FreeSeries> {
    let mut cur = series.clone();
    for &j in indices.iter().rev() {
        cur = partial(&cur, j)?;
    }
    Ok(cur)
}
