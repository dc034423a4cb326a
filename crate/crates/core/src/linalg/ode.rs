//! Adaptive Dormand-Prince 5(4) integration of autonomous complex ODE
//! systems y' = f(y), with exact landing on a caller-supplied output grid.

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::{cr, real, C, Scalar};
use crate::{Error, Result};

/// Integrator controls. Defaults: rtol 1e-8, atol 1e-12.
#[derive(Clone, Copy, Debug)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
}

impl<T: Scalar> Default for OdeOptions<T> {
    fn default() -> Self {
        Self { rtol: real(1e-8), atol: real(1e-12), max_steps: 20_000_000 }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
// Fifth-order weights (also the last stage row: first-same-as-last scheme).
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-minus-fourth error weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate y' = f(y) from `outputs[0]`, returning the state at every
/// output time. `outputs` must be strictly ascending; the initial state is
/// returned verbatim as the first entry.
pub fn integrate_to<T, F>(
    mut f: F,
    y0: &[C<T>],
    outputs: &[T],
    opts: &OdeOptions<T>,
) -> Result<Vec<Vec<C<T>>>>
where
    T: Scalar,
    F: FnMut(&[C<T>], &mut [C<T>]),
{
    if outputs.is_empty() {
        return Err(Error::InvalidArgument("empty output grid".into()));
    }
    for w in outputs.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidArgument("output grid must be strictly ascending".into()));
        }
    }
    let n = y0.len();
    let mut results = Vec::with_capacity(outputs.len());
    results.push(y0.to_vec());
    if outputs.len() == 1 {
        return Ok(results);
    }

    let mut t = outputs[0];
    let t_end = *outputs.last().unwrap();
    let span = t_end - t;
    let mut y = y0.to_vec();

    let mut k1 = vec![Complex::<T>::zero(); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut k5 = k1.clone();
    let mut k6 = k1.clone();
    let mut k7 = k1.clone();
    let mut ytmp = k1.clone();
    let mut y5 = k1.clone();
    f(&y, &mut k1);

    // Initial step from the right-hand-side magnitude.
    let ynorm = rms(&y);
    let fnorm = rms(&k1);
    let mut h = if fnorm > T::zero() {
        (real::<T>(0.01) * (ynorm + opts.atol) / fnorm).min(span * real(0.1))
    } else {
        span * real(0.1)
    };
    h = h.max(span * real(1e-9));

    let mut out_idx = 1usize;
    let mut steps = 0usize;
    let two = real::<T>(2.0);

    while out_idx < outputs.len() {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Integration {
                tau: t.to_f64().unwrap_or(f64::NAN),
                message: format!("step budget exhausted after {} steps", opts.max_steps),
            });
        }
        let t_target = outputs[out_idx];
        let mut hitting = false;
        if t + h >= t_target {
            h = t_target - t;
            hitting = true;
        }
        if h <= T::epsilon() * real::<T>(16.0) * t.abs().max(T::one()) {
            return Err(Error::Integration {
                tau: t.to_f64().unwrap_or(f64::NAN),
                message: "step size underflow".into(),
            });
        }

        let hc = cr(h);
        for i in 0..n {
            ytmp[i] = y[i] + hc * k1[i] * cr(real(A21));
        }
        f(&ytmp, &mut k2);
        for i in 0..n {
            ytmp[i] = y[i] + hc * (k1[i] * cr(real(A31)) + k2[i] * cr(real(A32)));
        }
        f(&ytmp, &mut k3);
        for i in 0..n {
            ytmp[i] = y[i]
                + hc * (k1[i] * cr(real(A41)) + k2[i] * cr(real(A42)) + k3[i] * cr(real(A43)));
        }
        f(&ytmp, &mut k4);
        for i in 0..n {
            ytmp[i] = y[i]
                + hc * (k1[i] * cr(real(A51))
                    + k2[i] * cr(real(A52))
                    + k3[i] * cr(real(A53))
                    + k4[i] * cr(real(A54)));
        }
        f(&ytmp, &mut k5);
        for i in 0..n {
            ytmp[i] = y[i]
                + hc * (k1[i] * cr(real(A61))
                    + k2[i] * cr(real(A62))
                    + k3[i] * cr(real(A63))
                    + k4[i] * cr(real(A64))
                    + k5[i] * cr(real(A65)));
        }
        f(&ytmp, &mut k6);
        for i in 0..n {
            y5[i] = y[i]
                + hc * (k1[i] * cr(real(B1))
                    + k3[i] * cr(real(B3))
                    + k4[i] * cr(real(B4))
                    + k5[i] * cr(real(B5))
                    + k6[i] * cr(real(B6)));
        }
        f(&y5, &mut k7);

        // Weighted RMS of the embedded error estimate.
        let mut err_acc = T::zero();
        for i in 0..n {
            let e = hc
                * (k1[i] * cr(real(E1))
                    + k3[i] * cr(real(E3))
                    + k4[i] * cr(real(E4))
                    + k5[i] * cr(real(E5))
                    + k6[i] * cr(real(E6))
                    + k7[i] * cr(real(E7)));
            let scale = opts.atol + opts.rtol * y[i].norm().max(y5[i].norm());
            let r = e.norm() / scale;
            err_acc = err_acc + r * r;
        }
        let err = (err_acc / T::from_usize(n).unwrap()).sqrt();

        if err <= T::one() {
            t = if hitting { t_target } else { t + h };
            std::mem::swap(&mut y, &mut y5);
            std::mem::swap(&mut k1, &mut k7);
            if hitting {
                results.push(y.clone());
                out_idx += 1;
            }
        }
        let factor = if err.is_zero() {
            real::<T>(5.0)
        } else {
            (real::<T>(0.9) * err.powf(-T::one() / real::<T>(5.0)))
                .min(real(5.0))
                .max(real(0.2))
        };
        h = h * factor;
        let _ = two;
    }
    Ok(results)
}

fn rms<T: Scalar>(v: &[C<T>]) -> T {
    if v.is_empty() {
        return T::zero();
    }
    (v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b)
        / T::from_usize(v.len()).unwrap())
    .sqrt()
}
