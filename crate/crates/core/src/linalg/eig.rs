//! Eigendecompositions: cyclic Jacobi for Hermitian matrices (values and
//! vectors) and a shifted Hessenberg-QR iteration for general complex
//! spectra (values only).

use num_complex::Complex;
use num_traits::Zero;

use super::dense::CMat;
use crate::scalar::{c, cr, real, C, Scalar};
use crate::{Error, Result};

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the unitary matrix whose
/// columns are the matching eigenvectors, so `A = V · diag(λ) · V†`.
/// The strict lower/upper parts are assumed consistent (Hermitian input).
pub fn eigh<T: Scalar>(mat: &CMat<T>) -> Result<(Vec<T>, CMat<T>)> {
    if !mat.is_square() {
        return Err(Error::InvalidArgument("eigh requires a square matrix".into()));
    }
    let n = mat.nrows();
    let mut a = mat.clone();
    let mut v = CMat::identity(n);
    let frob0 = a.frobenius_norm();
    if frob0.is_zero() || n == 1 {
        let vals = (0..n).map(|i| a.get(i, i).re).collect();
        return Ok((vals, v));
    }
    let stop = T::epsilon() * frob0 * real::<T>(n as f64);

    for _sweep in 0..64 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + a.get(p, q).norm_sqr();
            }
        }
        if (off + off).sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                let b = apq.norm();
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                if b <= T::epsilon() * (app.abs() + aqq.abs()) {
                    continue;
                }
                // Phase absorbing the complex off-diagonal, then a real
                // Jacobi rotation zeroing it.
                let phase = apq / cr(b);
                let tau = (aqq - app) / (b + b);
                let t = if tau >= T::zero() {
                    -T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let cth = T::one() / (T::one() + t * t).sqrt();
                let sth = t * cth;

                let jp = cr(cth);
                let jqp = phase.conj() * cr(sth); // J[q][p]
                let jpq = -phase * cr(sth); // J[p][q]

                // A ← A · J
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * jp + akq * jqp);
                    a.set(k, q, akp * jpq + akq * jp);
                }
                // A ← J† · A
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * jp + aqk * jqp.conj());
                    a.set(q, k, apk * jpq.conj() + aqk * jp);
                }
                // V ← V · J
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * jp + vkq * jqp);
                    v.set(k, q, vkp * jpq + vkq * jp);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<T> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap_or(std::cmp::Ordering::Equal));
    let sorted_vals: Vec<T> = order.iter().map(|&i| vals[i]).collect();
    let sorted_v = CMat::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok((sorted_vals, sorted_v))
}

/// Complex Givens rotation zeroing `g` against `f`:
/// `[c, s; -s̄, c] · [f; g] = [r; 0]` with real `c`.
fn givens<T: Scalar>(f: C<T>, g: C<T>) -> (T, C<T>) {
    if g.is_zero() {
        return (T::one(), Complex::zero());
    }
    if f.is_zero() {
        return (T::zero(), g.conj() / cr(g.norm()));
    }
    let fa = f.norm();
    let denom = (fa * fa + g.norm_sqr()).sqrt();
    let cth = fa / denom;
    let s = (f / cr(fa)) * g.conj() / cr(denom);
    (cth, s)
}

/// Reduce to upper Hessenberg form in place by Householder similarity.
fn hessenberg<T: Scalar>(a: &mut CMat<T>) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    let mut w = vec![Complex::<T>::zero(); n];
    for k in 0..n - 2 {
        let mut norm_sq = T::zero();
        for i in k + 1..n {
            norm_sq = norm_sq + a.get(i, k).norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm <= T::epsilon() * a.max_abs() {
            continue;
        }
        let x0 = a.get(k + 1, k);
        let alpha = if x0.is_zero() { cr(-norm) } else { -(x0 / cr(x0.norm())) * cr(norm) };
        // v = x - alpha·e1, normalized into w.
        let mut vnorm_sq = T::zero();
        for i in k + 1..n {
            let vi = if i == k + 1 { a.get(i, k) - alpha } else { a.get(i, k) };
            w[i] = vi;
            vnorm_sq = vnorm_sq + vi.norm_sqr();
        }
        if vnorm_sq <= T::epsilon() * T::epsilon() * norm_sq {
            continue;
        }
        let inv = cr(T::one() / vnorm_sq.sqrt());
        for wi in w.iter_mut().take(n).skip(k + 1) {
            *wi *= inv;
        }
        let two = cr(real::<T>(2.0));
        // A ← (I - 2ww†) A on rows k+1.., columns k..
        for j in k..n {
            let mut dot: C<T> = Complex::zero();
            for i in k + 1..n {
                dot += w[i].conj() * a.get(i, j);
            }
            let dot = dot * two;
            for i in k + 1..n {
                let v = a.get(i, j) - w[i] * dot;
                a.set(i, j, v);
            }
        }
        // A ← A (I - 2ww†) on columns k+1..
        for i in 0..n {
            let mut dot: C<T> = Complex::zero();
            for j in k + 1..n {
                dot += a.get(i, j) * w[j];
            }
            let dot = dot * two;
            for j in k + 1..n {
                let v = a.get(i, j) - dot * w[j].conj();
                a.set(i, j, v);
            }
        }
        for i in k + 2..n {
            a.set(i, k, Complex::zero());
        }
    }
}

/// Eigenvalues of a general complex matrix by shifted QR on the Hessenberg
/// form. No eigenvectors; intended for spectrum checks of moderate sizes.
pub fn eigvals<T: Scalar>(mat: &CMat<T>) -> Result<Vec<C<T>>> {
    if !mat.is_square() {
        return Err(Error::InvalidArgument("eigvals requires a square matrix".into()));
    }
    let n = mat.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = mat.clone();
    hessenberg(&mut h);

    let scale = h.max_abs().max(T::min_positive_value());
    let negligible = |h: &CMat<T>, i: usize| -> bool {
        let s = h.get(i - 1, i - 1).norm() + h.get(i, i).norm();
        let s = if s.is_zero() { scale } else { s };
        h.get(i, i - 1).norm() <= T::epsilon() * s
    };

    let mut hi = n - 1;
    let mut iters_here = 0usize;
    let mut total = 0usize;
    let max_total = 60 * n;
    loop {
        // Deflate converged trailing eigenvalues.
        while hi > 0 && negligible(&h, hi) {
            h.set(hi, hi - 1, Complex::zero());
            hi -= 1;
            iters_here = 0;
        }
        if hi == 0 {
            break;
        }
        let mut lo = hi;
        while lo > 0 && !negligible(&h, lo) {
            lo -= 1;
        }
        if lo > 0 {
            h.set(lo, lo - 1, Complex::zero());
        }

        total += 1;
        iters_here += 1;
        if total > max_total {
            return Err(Error::Solver(format!(
                "eigenvalue QR iteration failed to converge (n = {n})"
            )));
        }

        // Wilkinson shift from the trailing 2×2 block, with an occasional
        // exceptional shift to break symmetry stalls.
        let a = h.get(hi - 1, hi - 1);
        let b = h.get(hi - 1, hi);
        let cc = h.get(hi, hi - 1);
        let d = h.get(hi, hi);
        let mu = if iters_here % 12 == 0 {
            d + c(cc.norm(), cc.norm() * real::<T>(0.5))
        } else {
            let half = cr(real::<T>(0.5));
            let mid = (a - d) * half;
            let disc = (mid * mid + b * cc).sqrt();
            let lam1 = (a + d) * half + disc;
            let lam2 = (a + d) * half - disc;
            if (lam1 - d).norm() <= (lam2 - d).norm() {
                lam1
            } else {
                lam2
            }
        };

        for i in lo..=hi {
            let v = h.get(i, i) - mu;
            h.set(i, i, v);
        }
        let mut rots: Vec<(T, C<T>)> = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (cth, s) = givens(h.get(i, i), h.get(i + 1, i));
            rots.push((cth, s));
            for j in i..n {
                let hij = h.get(i, j);
                let hij1 = h.get(i + 1, j);
                h.set(i, j, hij * cr(cth) + hij1 * s);
                h.set(i + 1, j, -hij * s.conj() + hij1 * cr(cth));
            }
        }
        for (idx, &(cth, s)) in rots.iter().enumerate() {
            let i = lo + idx;
            let top = (i + 2).min(hi + 1);
            for r in 0..top {
                let hri = h.get(r, i);
                let hri1 = h.get(r, i + 1);
                h.set(r, i, hri * cr(cth) + hri1 * s.conj());
                h.set(r, i + 1, -hri * s + hri1 * cr(cth));
            }
        }
        for i in lo..=hi {
            let v = h.get(i, i) + mu;
            h.set(i, i, v);
        }
    }
    Ok((0..n).map(|i| h.get(i, i)).collect())
}
