//! Shared dense linear-algebra helpers (crate-internal).
//!
//! Operator norms are computed as `sqrt(λ_max(AᴴA))`. The Hermitian
//! eigenproblem is solved densely below [`DENSE_NORM_LIMIT`]; above it the
//! norm falls back to a deterministic power iteration on `AᴴA` applied
//! through matrix–vector products only, so large Fock truncations never
//! materialize a second dim² matrix.

use crate::{C64, CMatrix};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Side length up to which norms use a dense Hermitian eigensolve. Above it
/// the power iteration wins by a wide margin: Fock realizations are sparse in
/// structure (often with heavily degenerate top singular values), so a few
/// mat-vec sweeps beat the O(dim³) Gram + eigendecomposition long before the
/// dense path becomes accurate enough to matter.
pub(crate) const DENSE_NORM_LIMIT: usize = 350;

/// Relative stagnation threshold for the power iteration's Rayleigh quotient.
const POWER_TOL: f64 = 1e-13;
/// Consecutive stagnant iterations required before accepting the estimate.
const POWER_PATIENCE: usize = 4;
/// Hard cap on power-iteration steps.
const POWER_MAX_ITERS: usize = 20_000;
/// Fixed seed for the power iteration's start vector (determinism contract).
const POWER_SEED: u64 = 0x9E37_79B9_7F4A_7C15;

/// Largest eigenvalue of a Hermitian matrix (input assumed Hermitian).
pub(crate) fn hermitian_lambda_max(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let eig = m.clone().symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub(crate) fn hermitian_lambda_min(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let eig = m.clone().symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min)
}

/// Replace `m` by its Hermitian part `(m + mᴴ)/2` (cheap roundoff hygiene for
/// products that are Hermitian in exact arithmetic).
pub(crate) fn hermitize(m: &mut CMatrix) {
    let adj = m.adjoint();
    *m += adj;
    *m *= C64::new(0.5, 0.0);
}

/// Operator (spectral) norm of a rectangular complex matrix.
pub(crate) fn op_norm(a: &CMatrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    // Work with the smaller Gram side.
    let (r, c) = (a.nrows(), a.ncols());
    if r.min(c) <= DENSE_NORM_LIMIT {
        let gram = if c <= r { a.ad_mul(a) } else { a * a.adjoint() };
        hermitian_lambda_max(&gram).max(0.0).sqrt()
    } else {
        power_norm(a)
    }
}

/// σ_max via power iteration on AᴴA, touching A only through mat-vecs.
fn power_norm(a: &CMatrix) -> f64 {
    power_norm_apply(a.ncols(), |v| a * v, |w| a.ad_mul(w))
}

/// σ_max of an operator given only through `apply` (A·v) and `apply_adj`
/// (Aᴴ·w), via power iteration on AᴴA from a fixed pseudo-random start.
/// `dim` is the domain dimension (length of the vectors fed to `apply`).
pub(crate) fn power_norm_apply(
    dim: usize,
    apply: impl Fn(&DVector<C64>) -> DVector<C64>,
    apply_adj: impl Fn(&DVector<C64>) -> DVector<C64>,
) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    let mut rng = ChaCha12Rng::seed_from_u64(POWER_SEED);
    let mut v = DVector::from_fn(dim, |_, _| {
        C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let nv = v.norm();
    if nv == 0.0 {
        return 0.0;
    }
    v /= C64::new(nv, 0.0);

    let mut lambda = 0.0_f64;
    let mut stagnant = 0;
    for _ in 0..POWER_MAX_ITERS {
        let w = apply(&v); // A v
        let lam = w.norm_squared(); // vᴴ AᴴA v for unit v
        let u = apply_adj(&w); // Aᴴ (A v)
        let nu = u.norm();
        if nu == 0.0 {
            return 0.0;
        }
        v = u / C64::new(nu, 0.0);
        if (lam - lambda).abs() <= POWER_TOL * lam.max(f64::MIN_POSITIVE) {
            stagnant += 1;
            if stagnant >= POWER_PATIENCE {
                return lam.max(0.0).sqrt();
            }
        } else {
            stagnant = 0;
        }
        lambda = lam;
    }
    lambda.max(0.0).sqrt()
}

/// Hermitian square root of a PSD matrix, clamping eigenvalues in
/// `[-clamp_tol, 0)` to zero. Returns the most negative eigenvalue alongside
/// the root so callers can turn excessive negativity into their own error.
pub(crate) fn psd_sqrt(m: &CMatrix, clamp_tol: f64) -> (CMatrix, f64) {
    let eig = m.clone().symmetric_eigen();
    let min_eig = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
    let d = eig.eigenvalues.len();
    let mut root = CMatrix::zeros(d, d);
    for j in 0..d {
        let lam = eig.eigenvalues[j];
        let s = if lam >= 0.0 {
            lam.sqrt()
        } else if lam >= -clamp_tol {
            0.0
        } else {
            // Caller decides; still produce the clamped root.
            0.0
        };
        let col = eig.eigenvectors.column(j);
        for r in 0..d {
            for c in 0..d {
                root[(r, c)] += col[r] * col[c].conj() * C64::new(s, 0.0);
            }
        }
    }
    (root, min_eig)
}
