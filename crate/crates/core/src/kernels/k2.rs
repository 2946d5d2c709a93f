//! Signed-root kernel family with a closed-form 2-cycle at branching
//! order 2.
//!
//! ```text
//! K_n(t,u) = (1 - b_n c_n^3 s(u) (s(u)^2 - 4)^2 s(t)) / (c_n^2 (s(u) + 2)^2)
//! ```
//!
//! with `s(x) = signed_root(x - 1/2, n)`,
//! `b_n = 4^-((n-1)/n) (1 + 2/n)` and
//! `c_n^3 = 1/2 int_{-1/2}^{1/2} du / (2 + signed_root(u, n))^2`.
//! The closed-form pair is `f(t) = c_n (s(t) + 2)`, `g = 1`. Positivity
//! holds for all large root orders `n` but not small ones, so construction
//! is gated on a dense scan.

use std::sync::Arc;

use crate::grid::{dense_grid, signed_root, GridFunction, QuadratureRule};
use crate::scalar::Scalar;
use crate::DENSE_SCAN_POINTS;

use super::{Kernel, KernelError, KernelFamily};

/// `b_n = 4^-((n-1)/n) (1 + 2/n)`; tends to 1/4.
pub fn k2_b_coefficient<T: Scalar>(n: u32) -> T {
    assert!(n >= 1);
    let nf = T::of(f64::from(n));
    T::of(4.0).powf(-(nf - T::one()) / nf) * (T::one() + T::of(2.0) / nf)
}

/// `c_n^3`, computed by quadrature of the defining integral. The integrand
/// has a `|u|^(1/n)` cusp at 0, so the two subintervals are integrated in
/// the substituted variable `v = |u|^(1/n)`, where they are smooth:
///
/// ```text
/// c_n^3 = 1/2 int_0^(2^(-1/n)) n v^(n-1) ((2+v)^-2 + (2-v)^-2) dv
/// ```
pub fn k2_c_cubed<T: Scalar>(n: u32) -> T {
    assert!(n >= 1);
    let rule = QuadratureRule::<T>::gauss(400).expect("static rule");
    let r = T::of(0.5).powf(T::one() / T::of(f64::from(n)));
    let nf = T::of(f64::from(n));
    let two = T::of(2.0);
    // Map [0,1] -> [0,r].
    let integral = rule.integrate_fn(|x| {
        let v = r * x;
        let poly = nf * v.powf(nf - T::one());
        let plus = (two + v).powi(-2);
        let minus = (two - v).powi(-2);
        poly * (plus + minus)
    }) * r;
    T::of(0.5) * integral
}

/// `c_n`, the cube root of [`k2_c_cubed`].
pub fn k2_c_coefficient<T: Scalar>(n: u32) -> T {
    k2_c_cubed::<T>(n).powf(T::one() / T::of(3.0))
}

fn evaluator<T: Scalar>(n: u32) -> Arc<dyn Fn(T, T) -> T + Send + Sync> {
    let b = k2_b_coefficient::<T>(n);
    let c3 = k2_c_cubed::<T>(n);
    let c = c3.powf(T::one() / T::of(3.0));
    let c2 = c * c;
    let half = T::of(0.5);
    let two = T::of(2.0);
    let four = T::of(4.0);
    Arc::new(move |t: T, u: T| {
        let st = signed_root(t - half, n);
        let su = signed_root(u - half, n);
        let numer = T::one() - b * c3 * su * (su * su - four).powi(2) * st;
        let denom = c2 * (su + two).powi(2);
        numer / denom
    })
}

/// Minimum of `K_n` over the dense grid, with its location.
pub fn k2_minimum<T: Scalar>(n: u32, grid_points: usize) -> (T, (T, T)) {
    let eval = evaluator::<T>(n);
    let g: Vec<T> = dense_grid(grid_points);
    let mut min = T::infinity();
    let mut at = (T::zero(), T::zero());
    for &t in &g {
        for &u in &g {
            let v = eval(t, u);
            if v < min {
                min = v;
                at = (t, u);
            }
        }
    }
    (min, at)
}

/// Smallest root order `n <= n_max` whose kernel passes the dense
/// positivity scan.
pub fn k2_smallest_positive_n(n_max: u32, grid_points: usize) -> Option<u32> {
    (1..=n_max).find(|&n| k2_minimum::<f64>(n, grid_points).0 > 0.0)
}

/// Builds the kernel for root order `n`, gated on the dense positivity
/// scan. Small `n` legitimately fail the scan.
pub fn k2_kernel<T: Scalar>(
    rule: Arc<QuadratureRule<T>>,
    n: u32,
) -> Result<Kernel<T>, KernelError> {
    if n < 1 {
        return Err(KernelError::InvalidParameter(
            "k2_family requires root order n >= 1".into(),
        ));
    }
    let mut kernel = Kernel::from_eval(KernelFamily::K2 { n }, rule, evaluator::<T>(n))?;
    let scan = kernel.run_scan(DENSE_SCAN_POINTS).clone();
    if !scan.positive {
        return Err(KernelError::NotPositive {
            family: format!("k2_family(n={n})"),
            min: scan.min,
            at: scan.min_at,
        });
    }
    Ok(kernel)
}

/// The closed-form pair `(c_n (s(t) + 2), 1)` solving the order-2
/// Hammerstein system for this kernel.
pub fn k2_closed_forms<T: Scalar>(
    rule: &Arc<QuadratureRule<T>>,
    n: u32,
) -> (GridFunction<T>, GridFunction<T>) {
    let c = k2_c_coefficient::<T>(n);
    let half = T::of(0.5);
    let two = T::of(2.0);
    let f = GridFunction::from_fn(Arc::clone(rule), move |t| {
        c * (signed_root(t - half, n) + two)
    })
    .with_tag(format!("k2_family(n={n}).f"));
    let g = GridFunction::constant(Arc::clone(rule), T::one()).with_tag("one");
    (f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn b_coefficients_match_direct_evaluation() {
        assert_abs_diff_eq!(k2_b_coefficient::<f64>(1), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(k2_b_coefficient::<f64>(2), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn b_tends_to_one_quarter() {
        // b_64 sits within 0.02 of the limit.
        let b64 = k2_b_coefficient::<f64>(64);
        assert!((b64 - 0.25).abs() < 0.02, "b_64 = {b64}");
        assert!((k2_b_coefficient::<f64>(4096) - 0.25).abs() < 3e-4);
    }

    #[test]
    fn c1_matches_the_antiderivative_oracle() {
        // For n = 1 the defining integral is elementary:
        // 1/2 int_{-1/2}^{1/2} (2+u)^-2 du = 1/2 (1/(3/2) - 1/(5/2)) = 2/15.
        let exact_cubed = 0.5 * (1.0 / 1.5 - 1.0 / 2.5);
        assert_abs_diff_eq!(exact_cubed, 2.0 / 15.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k2_c_cubed::<f64>(1), exact_cubed, epsilon = 1e-12);
        assert_abs_diff_eq!(
            k2_c_coefficient::<f64>(1),
            (2.0f64 / 15.0).powf(1.0 / 3.0),
            epsilon = 1e-9
        );
    }

    #[test]
    fn smallest_positive_root_order_is_two() {
        assert_eq!(k2_smallest_positive_n(8, 401), Some(2));
        let (min1, _) = k2_minimum::<f64>(1, 401);
        assert!(min1 < 0.0, "n = 1 should fail the scan, min = {min1}");
    }

    #[test]
    fn n1_build_fails_with_positivity_diagnostic() {
        let rule = QuadratureRule::<f64>::gauss_split(64).unwrap();
        match k2_kernel(rule, 1) {
            Err(KernelError::NotPositive { min, .. }) => assert!(min < 0.0),
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn n2_kernel_is_positive_with_known_minimum() {
        let rule = QuadratureRule::<f64>::gauss_split(64).unwrap();
        let kernel = k2_kernel(rule, 2).unwrap();
        let scan = kernel.scan().unwrap();
        assert!(scan.positive);
        // Frozen from the dense-grid oracle run.
        assert_abs_diff_eq!(scan.min, 0.032495, epsilon = 1e-5);
    }
}
