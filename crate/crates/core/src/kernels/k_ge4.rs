//! Rational kernel family with a closed-form 2-cycle at every branching
//! order `k >= 4`.
//!
//! ```text
//! K(t,u;k) = (1 + c_k (t - 1/2)(u - 1/2)) / (a^k (u + 1/2)^k)
//! ```
//!
//! where `c_k` is a ratio of truncated geometric sums and
//! `a = a(k) = (2^(k-1)/(k-1) (1 - 3^-(k-1)))^(1/(k+1))`. The closed-form
//! pair is `f(t) = a (t + 1/2)`, `g = 1`. `|c_k| < 4` keeps the numerator
//! positive; the constant feeds that positivity margin, so it is computed
//! in exact rational arithmetic for `k <= 64`.

use std::sync::Arc;

use num_traits::One;

use crate::grid::{GridFunction, QuadratureRule};
use crate::scalar::Scalar;
use crate::DENSE_SCAN_POINTS;

use super::exact::{int, rat, to_f64, Rat};
use super::{Kernel, KernelError, KernelFamily};

/// `c_k` as an exact rational:
///
/// ```text
/// c_k = 2 (1 - 3^-(k-1)) / ((k-1)/(k-2) (1 - 3^-(k-2)) - 2 (1 - 3^-(k-1)))
/// ```
pub fn k_ge4_c_exact(k: u32) -> Rat {
    assert!(k >= 4, "the family needs k >= 4");
    let third = rat(1, 3);
    let p1 = Rat::one() - pow_rat(&third, k - 1);
    let p2 = Rat::one() - pow_rat(&third, k - 2);
    let ratio = rat(i64::from(k) - 1, i64::from(k) - 2);
    let two = int(2);
    &two * &p1 / (ratio * p2 - two * p1)
}

fn pow_rat(x: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= x.clone();
    }
    acc
}

/// `c_k` in floating point: exact rationals for `k <= 64`, the direct
/// formula beyond.
pub fn k_ge4_c_float<T: Scalar>(k: u32) -> T {
    if k <= 64 {
        T::of(to_f64(&k_ge4_c_exact(k)))
    } else {
        let kf = f64::from(k);
        let p1 = 1.0 - (1.0f64 / 3.0).powi(k as i32 - 1);
        let p2 = 1.0 - (1.0f64 / 3.0).powi(k as i32 - 2);
        T::of(2.0 * p1 / ((kf - 1.0) / (kf - 2.0) * p2 - 2.0 * p1))
    }
}

/// `a(k) = (2^(k-1)/(k-1) (1 - 3^-(k-1)))^(1/(k+1))`.
pub fn k_ge4_coefficient_a<T: Scalar>(k: u32) -> T {
    assert!(k >= 4);
    let kf = T::of(f64::from(k));
    let base = T::of(2.0).powi(k as i32 - 1) / (kf - T::one())
        * (T::one() - T::of(3.0).powi(-(k as i32 - 1)));
    base.powf(T::one() / (kf + T::one()))
}

fn evaluator<T: Scalar>(k: u32) -> Arc<dyn Fn(T, T) -> T + Send + Sync> {
    let c = k_ge4_c_float::<T>(k);
    let a = k_ge4_coefficient_a::<T>(k);
    let ln_a = a.ln();
    let half = T::of(0.5);
    let kf = T::of(f64::from(k));
    // (a (u + 1/2))^-k in log space; the direct power overflows for large k.
    Arc::new(move |t: T, u: T| {
        let numer = T::one() + c * (t - half) * (u - half);
        numer * (-kf * (ln_a + (u + half).ln())).exp()
    })
}

/// Builds the kernel for branching order `k >= 4`. Positivity follows from
/// `|c_k| < 4`; a failed scan is a build bug and is reported as an error.
pub fn k_ge4_kernel<T: Scalar>(
    rule: Arc<QuadratureRule<T>>,
    k: u32,
) -> Result<Kernel<T>, KernelError> {
    if k < 4 {
        return Err(KernelError::InvalidParameter(
            "k_ge4_family requires branching order k >= 4".into(),
        ));
    }
    let mut kernel = Kernel::from_eval(KernelFamily::KGe4 { k }, rule, evaluator::<T>(k))?;
    let scan = kernel.run_scan(DENSE_SCAN_POINTS).clone();
    if !scan.positive {
        return Err(KernelError::NotPositive {
            family: format!("k_ge4_family(k={k})"),
            min: scan.min,
            at: scan.min_at,
        });
    }
    Ok(kernel)
}

/// The closed-form pair `(a(k) (t + 1/2), 1)` solving the order-k
/// Hammerstein system for this kernel.
pub fn k_ge4_closed_forms<T: Scalar>(
    rule: &Arc<QuadratureRule<T>>,
    k: u32,
) -> (GridFunction<T>, GridFunction<T>) {
    let a = k_ge4_coefficient_a::<T>(k);
    let half = T::of(0.5);
    let f = GridFunction::from_fn(Arc::clone(rule), move |t| a * (t + half))
        .with_tag(format!("k_ge4_family(k={k}).f"));
    let g = GridFunction::constant(Arc::clone(rule), T::one()).with_tag("one");
    (f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_traits::Signed;

    #[test]
    fn c4_is_minus_thirteen_quarters_exactly() {
        assert_eq!(k_ge4_c_exact(4), rat(-13, 4));
        assert_eq!(k_ge4_c_float::<f64>(4), -3.25);
    }

    #[test]
    fn c_stays_below_four_in_magnitude() {
        for k in 4..=64 {
            let c = k_ge4_c_exact(k);
            assert!(c.abs() < int(4), "|c_{k}| = {c}");
            // Sharper elimination bound: |c_k| <= 2(k-2)/(k-3).
            let sharper = rat(2 * (i64::from(k) - 2), i64::from(k) - 3);
            assert!(c.abs() <= sharper, "|c_{k}| exceeds 2(k-2)/(k-3)");
        }
    }

    #[test]
    fn float_and_exact_c_agree() {
        for k in [4u32, 10, 33, 64] {
            let exact = to_f64(&k_ge4_c_exact(k));
            let kf = f64::from(k);
            let p1 = 1.0 - (1.0f64 / 3.0).powi(k as i32 - 1);
            let p2 = 1.0 - (1.0f64 / 3.0).powi(k as i32 - 2);
            let float = 2.0 * p1 / ((kf - 1.0) / (kf - 2.0) * p2 - 2.0 * p1);
            assert_abs_diff_eq!(exact, float, epsilon = 1e-12);
        }
    }

    #[test]
    fn a_of_four_matches_direct_evaluation() {
        assert_abs_diff_eq!(
            k_ge4_coefficient_a::<f64>(4),
            (208.0f64 / 81.0).powf(0.2),
            epsilon = 1e-9
        );
    }

    #[test]
    fn kernel_is_positive_and_small_k_is_rejected() {
        let rule = QuadratureRule::<f64>::gauss(32).unwrap();
        assert!(matches!(
            k_ge4_kernel(Arc::clone(&rule), 3),
            Err(KernelError::InvalidParameter(_))
        ));
        let kernel = k_ge4_kernel(rule, 4).unwrap();
        assert!(kernel.scan().unwrap().positive);
    }

    #[test]
    fn log_space_evaluation_matches_direct_power_at_moderate_k() {
        let rule = QuadratureRule::<f64>::gauss(8).unwrap();
        let kernel = k_ge4_kernel(rule, 7).unwrap();
        let c = k_ge4_c_float::<f64>(7);
        let a = k_ge4_coefficient_a::<f64>(7);
        for (t, u) in [(0.0, 0.0), (0.25, 0.8), (1.0, 1.0)] {
            let direct = (1.0 + c * (t - 0.5) * (u - 0.5)) / (a * (u + 0.5)).powi(7);
            assert_abs_diff_eq!(kernel.eval_at(t, u).unwrap(), direct, epsilon = 1e-13);
        }
    }
}
