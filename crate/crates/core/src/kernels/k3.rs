//! Trigonometric kernel family with a closed-form 2-cycle at branching
//! order 3.
//!
//! ```text
//! K(t,u) = (1 - 22/17 sin(pi(2t-1)/3) sin(pi(2u-1)/3))
//!          / (a^3 (1 + sin(pi(2u-1)/3))^3),      a = (198 sqrt(3) / (5 pi))^(1/4)
//! ```
//!
//! The closed-form pair is `f(t) = a (1 + sin(pi(2t-1)/3))`, `g = 1`.
//! Positivity is immediate: the product of the two sines is bounded by
//! `3/4` in absolute value on `[0,1]^2`, so the numerator stays above
//! `1 - 33/34`.

use std::sync::Arc;

use crate::grid::{GridFunction, QuadratureRule};
use crate::scalar::Scalar;
use crate::DENSE_SCAN_POINTS;

use super::{Kernel, KernelError, KernelFamily};

/// `a = (198 sqrt(3) / (5 pi))^(1/4)`.
pub fn k3_coefficient_a<T: Scalar>() -> T {
    let a4 = T::of(198.0) * T::of(3.0).sqrt() / (T::of(5.0) * T::PI());
    a4.powf(T::of(0.25))
}

fn phase<T: Scalar>(x: T) -> T {
    (T::PI() * (T::of(2.0) * x - T::one()) / T::of(3.0)).sin()
}

fn evaluator<T: Scalar>() -> Arc<dyn Fn(T, T) -> T + Send + Sync> {
    let a = k3_coefficient_a::<T>();
    let a3 = a.powi(3);
    let coupling = T::of(22.0 / 17.0);
    Arc::new(move |t: T, u: T| {
        let st = phase(t);
        let su = phase(u);
        (T::one() - coupling * st * su) / (a3 * (T::one() + su).powi(3))
    })
}

/// Builds the kernel; a failed positivity scan would be a build bug, so it
/// is still reported as an error.
pub fn k3_kernel<T: Scalar>(rule: Arc<QuadratureRule<T>>) -> Result<Kernel<T>, KernelError> {
    let mut kernel = Kernel::from_eval(KernelFamily::K3, rule, evaluator::<T>())?;
    let scan = kernel.run_scan(DENSE_SCAN_POINTS).clone();
    if !scan.positive {
        return Err(KernelError::NotPositive {
            family: "k3_family".into(),
            min: scan.min,
            at: scan.min_at,
        });
    }
    Ok(kernel)
}

/// The closed-form pair `(a (1 + sin(pi(2t-1)/3)), 1)` solving the order-3
/// Hammerstein system for this kernel.
pub fn k3_closed_forms<T: Scalar>(
    rule: &Arc<QuadratureRule<T>>,
) -> (GridFunction<T>, GridFunction<T>) {
    let a = k3_coefficient_a::<T>();
    let f = GridFunction::from_fn(Arc::clone(rule), move |t| a * (T::one() + phase(t)))
        .with_tag("k3_family.f");
    let g = GridFunction::constant(Arc::clone(rule), T::one()).with_tag("one");
    (f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::dense_grid;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fourth_power_of_a_matches_its_definition() {
        let a = k3_coefficient_a::<f64>();
        assert_abs_diff_eq!(
            a.powi(4),
            198.0 * 3.0f64.sqrt() / (5.0 * std::f64::consts::PI),
            epsilon = 1e-12
        );
    }

    #[test]
    fn center_value_is_inverse_cube_of_a() {
        // Both sine factors vanish at t = u = 1/2.
        let rule = QuadratureRule::<f64>::gauss(16).unwrap();
        let kernel = k3_kernel(rule).unwrap();
        let a = k3_coefficient_a::<f64>();
        assert_abs_diff_eq!(
            kernel.eval_at(0.5, 0.5).unwrap(),
            a.powi(-3),
            epsilon = 1e-12
        );
    }

    #[test]
    fn interaction_at_the_center_is_minus_three_log_a() {
        // Both sines vanish at (1/2, 1/2), so K = a^-3 there and the
        // recovered interaction is ln(a^-3) = -3 ln a. Use a Simpson rule,
        // whose node set contains the midpoint.
        let rule = QuadratureRule::<f64>::build(crate::grid::Scheme::CompositeSimpson, 65).unwrap();
        let mid = rule.nodes().iter().position(|&t| t == 0.5).unwrap();
        let kernel = k3_kernel(Arc::clone(&rule)).unwrap();
        let (xi, _) = kernel.to_xi(1.0, 1.0).unwrap();
        let a = k3_coefficient_a::<f64>();
        assert_abs_diff_eq!(xi[mid * rule.len() + mid], -3.0 * a.ln(), epsilon = 1e-12);
    }

    #[test]
    fn kernel_is_positive_and_coupling_is_bounded() {
        let rule = QuadratureRule::<f64>::gauss(16).unwrap();
        let kernel = k3_kernel(rule).unwrap();
        assert!(kernel.scan().unwrap().positive);
        // |sin(pi(2x-1)/3)| <= sin(pi/3) = sqrt(3)/2 on [0,1], so the
        // coupling term is bounded by 22/17 * 3/4 = 33/34 < 1.
        let g: Vec<f64> = dense_grid(1001);
        let bound = g
            .iter()
            .flat_map(|&t| g.iter().map(move |&u| (t, u)))
            .map(|(t, u)| (22.0 / 17.0 * phase::<f64>(t) * phase::<f64>(u)).abs())
            .fold(0.0f64, f64::max);
        assert!(bound <= 33.0 / 34.0 + 1e-12, "bound = {bound}");
    }
}
