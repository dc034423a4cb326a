//! Dense matrix exponential by Padé-13 approximation with scaling and
//! squaring. Backs the uniform-grid fast path of density-matrix propagation.

use num_complex::Complex;

use super::dense::{lu_factor, CMat};
use crate::scalar::{cr, real, Scalar};
use crate::Result;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest one-norm handled without scaling by the order-13 approximant.
const THETA13: f64 = 5.371920351148152;

fn one_norm<T: Scalar>(a: &CMat<T>) -> T {
    let mut best = T::zero();
    for j in 0..a.ncols() {
        let mut col = T::zero();
        for i in 0..a.nrows() {
            col = col + a.get(i, j).norm();
        }
        best = best.max(col);
    }
    best
}

/// `exp(A)` for a square complex matrix.
pub fn expm<T: Scalar>(a: &CMat<T>) -> Result<CMat<T>> {
    assert!(a.is_square(), "expm requires a square matrix");
    let n = a.nrows();
    let nrm = one_norm(a).to_f64().unwrap_or(f64::INFINITY);
    let s = if nrm > THETA13 { (nrm / THETA13).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale(cr(real::<T>(0.5f64.powi(s))));

    let id = CMat::identity(n);
    let a2 = scaled.matmul(&scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);
    let b = |k: usize| cr(real::<T>(PADE13[k]));

    let u_inner = a6
        .scale(b(13))
        .add(&a4.scale(b(11)))
        .add(&a2.scale(b(9)));
    let u_poly = a6
        .matmul(&u_inner)
        .add(&a6.scale(b(7)))
        .add(&a4.scale(b(5)))
        .add(&a2.scale(b(3)))
        .add(&id.scale(b(1)));
    let u = scaled.matmul(&u_poly);

    let v_inner = a6
        .scale(b(12))
        .add(&a4.scale(b(10)))
        .add(&a2.scale(b(8)));
    let v = a6
        .matmul(&v_inner)
        .add(&a6.scale(b(6)))
        .add(&a4.scale(b(4)))
        .add(&a2.scale(b(2)))
        .add(&id.scale(b(0)));

    // (V - U) F = (V + U)
    let lhs = v.sub(&u);
    let rhs = v.add(&u);
    let lu = lu_factor(lhs)?;
    let mut f = CMat::zeros(n, n);
    let mut col = vec![Complex::<T>::new(T::zero(), T::zero()); n];
    for j in 0..n {
        for (i, slot) in col.iter_mut().enumerate() {
            *slot = rhs.get(i, j);
        }
        let x = lu.solve(&col);
        for (i, xi) in x.into_iter().enumerate() {
            f.set(i, j, xi);
        }
    }
    for _ in 0..s {
        f = f.matmul(&f);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ode::{integrate_to, OdeOptions};
    use crate::scalar::c;

    type M = CMat<f64>;

    #[test]
    fn expm_zero_is_identity() {
        let e = expm(&M::zeros(4, 4)).unwrap();
        for (x, y) in e.as_slice().iter().zip(M::identity(4).as_slice()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn expm_diagonal() {
        let d = [c(0.3, -2.0), c(-1.5, 0.7), c(4.0, 1.0)];
        let e = expm(&M::diagonal(&d)).unwrap();
        for (i, &z) in d.iter().enumerate() {
            assert!((e.get(i, i) - z.exp()).norm() < 1e-12 * z.exp().norm());
        }
    }

    #[test]
    fn expm_nilpotent() {
        let n = M::from_rows(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let e = expm(&n).unwrap();
        let expect = [c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        for (x, y) in e.as_slice().iter().zip(&expect) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn expm_inverse_property() {
        let mut seed = 0x99u64;
        let rnd = move |seed: &mut u64| {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((*seed >> 33) as f64) / (u32::MAX as f64) - 0.5
        };
        let mut s = seed;
        let a = M::from_fn(6, 6, |_, _| c(rnd(&mut s) * 3.0, rnd(&mut s) * 3.0));
        seed = s;
        let _ = seed;
        let e = expm(&a).unwrap();
        let em = expm(&a.scale(c(-1.0, 0.0))).unwrap();
        let prod = e.matmul(&em);
        for (i, row) in (0..6).map(|i| (i, prod.row(i))) {
            for (j, z) in row.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((z - c(expect, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn expm_agrees_with_integrator() {
        // Columns of exp(A) solve y' = A y from unit vectors.
        let mut s = 0x2024u64;
        let rnd = move |seed: &mut u64| {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((*seed >> 33) as f64) / (u32::MAX as f64) - 0.5
        };
        let mut st = s;
        let a = M::from_fn(5, 5, |_, _| c(rnd(&mut st) * 2.0, rnd(&mut st) * 2.0));
        s = st;
        let _ = s;
        let e = expm(&a).unwrap();
        let opts = OdeOptions { rtol: 1e-11, atol: 1e-13, max_steps: 1_000_000 };
        for j in 0..5 {
            let mut y0 = vec![c(0.0, 0.0); 5];
            y0[j] = c(1.0, 0.0);
            let sol = integrate_to(|y, dy| {
                let v = a.matvec(y);
                dy.copy_from_slice(&v);
            }, &y0, &[0.0, 1.0], &opts)
            .unwrap();
            for i in 0..5 {
                assert!(
                    (sol[1][i] - e.get(i, j)).norm() < 1e-8,
                    "entry ({i},{j}): {} vs {}",
                    sol[1][i],
                    e.get(i, j)
                );
            }
        }
    }
}
