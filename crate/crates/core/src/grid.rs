//! Quadrature rules on `[0,1]` and functions sampled at their nodes.
//!
//! All integrals in the crate are evaluated as `sum_i w_i f(t_i)` over a
//! fixed rule, so an operator application is a matrix-weighted sum with
//! predictable error (Nystrom discretization). Catalog kernels with a cusp
//! on the diagonal midline use the split Gauss scheme, which places panel
//! boundaries at the cusp and restores spectral accuracy there.

use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Errors from rule construction and grid-function plumbing.
#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid node count {n} for scheme {scheme}: {reason}")]
    InvalidNodeCount {
        scheme: Scheme,
        n: usize,
        reason: &'static str,
    },
    #[error("value count {got} does not match rule node count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("grid functions are bound to different quadrature rules")]
    RuleMismatch,
    #[error("function asserted positive has value {value} at node index {index}")]
    NotPositive { index: usize, value: f64 },
    #[error("csv row {row}: {reason}")]
    Csv { row: usize, reason: String },
    #[error("csv node {index} does not match the rule node (|dt| = {delta:.3e})")]
    NodeMismatch { index: usize, delta: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Quadrature scheme on `[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Gauss-Legendre with `n` nodes, exact for polynomials of degree `2n-1`.
    GaussLegendre,
    /// Two mirrored Gauss-Legendre panels split at `t = 1/2`, `n/2` nodes
    /// each. Exact for polynomials of degree `n-1`; the panel boundary
    /// absorbs midpoint cusps.
    GaussLegendreSplit,
    /// Composite Simpson on an equispaced grid with an odd number of nodes
    /// (endpoints included), exact for cubics.
    CompositeSimpson,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Scheme::GaussLegendre => "gauss_legendre",
            Scheme::GaussLegendreSplit => "gauss_legendre_split",
            Scheme::CompositeSimpson => "composite_simpson",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gauss_legendre" | "gauss" => Ok(Scheme::GaussLegendre),
            "gauss_legendre_split" | "gauss_split" => Ok(Scheme::GaussLegendreSplit),
            "composite_simpson" | "simpson" => Ok(Scheme::CompositeSimpson),
            other => Err(format!("unknown quadrature scheme `{other}`")),
        }
    }
}

/// Nodes and positive weights on `[0,1]` with `sum_i w_i = 1`.
///
/// `t = 0` is deliberately not required to be a node: the point evaluation
/// needed by the normalized recursion operator is supplied by kernels
/// through a dedicated `K(0, .)` row.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    scheme: Scheme,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> QuadratureRule<T> {
    /// Builds a rule with `n` nodes. Simpson needs an odd `n >= 3`, the
    /// split Gauss scheme an even `n >= 2`, plain Gauss any `n >= 2`.
    pub fn build(scheme: Scheme, n: usize) -> Result<Arc<Self>, GridError> {
        let (nodes, weights) = match scheme {
            Scheme::GaussLegendre => {
                if n < 2 {
                    return Err(GridError::InvalidNodeCount {
                        scheme,
                        n,
                        reason: "gauss_legendre requires at least 2 nodes",
                    });
                }
                gauss_unit_interval::<T>(n)
            }
            Scheme::GaussLegendreSplit => {
                if n < 2 || !n.is_multiple_of(2) {
                    return Err(GridError::InvalidNodeCount {
                        scheme,
                        n,
                        reason: "gauss_legendre_split requires an even count >= 2",
                    });
                }
                gauss_split_at_half::<T>(n)
            }
            Scheme::CompositeSimpson => {
                if n < 3 || n.is_multiple_of(2) {
                    return Err(GridError::InvalidNodeCount {
                        scheme,
                        n,
                        reason: "composite_simpson requires an odd count >= 3",
                    });
                }
                simpson_unit_interval::<T>(n)
            }
        };
        let rule = Self {
            scheme,
            nodes,
            weights,
        };
        debug_assert!(rule.check_invariants());
        Ok(Arc::new(rule))
    }

    /// Gauss-Legendre rule with `n` nodes.
    pub fn gauss(n: usize) -> Result<Arc<Self>, GridError> {
        Self::build(Scheme::GaussLegendre, n)
    }

    /// Split Gauss rule (panels `[0,1/2]` and `[1/2,1]`) with `n` nodes.
    pub fn gauss_split(n: usize) -> Result<Arc<Self>, GridError> {
        Self::build(Scheme::GaussLegendreSplit, n)
    }

    fn check_invariants(&self) -> bool {
        let one = T::one();
        let sum = self.weights.iter().fold(T::zero(), |a, &w| a + w);
        // 1e-12 is the contract at double precision; narrower scalars get
        // the equivalent bound in units of their own epsilon.
        let tol = T::of(1e-12).max(T::epsilon() * T::of_usize(self.nodes.len()) * T::of(8.0));
        let ok_sum = (sum - one).abs() <= tol;
        let ok_order = self
            .nodes
            .windows(2)
            .all(|p| p[0] < p[1] && p[0] >= T::zero() && p[1] <= one);
        let ok_pos = self.weights.iter().all(|&w| w > T::zero());
        ok_sum && ok_order && ok_pos
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Degree up to which polynomials are integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        match self.scheme {
            Scheme::GaussLegendre => 2 * self.len() - 1,
            Scheme::GaussLegendreSplit => self.len() - 1,
            Scheme::CompositeSimpson => 3,
        }
    }

    /// `sum_i w_i f(t_i)` for a pointwise-evaluable integrand.
    pub fn integrate_fn(&self, f: impl Fn(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&t, &w)| acc + w * f(t))
    }

    /// `sum_i w_i v_i` over given node values.
    pub fn integrate_values(&self, values: &[T]) -> T {
        debug_assert_eq!(values.len(), self.len());
        self.weights
            .iter()
            .zip(values)
            .fold(T::zero(), |acc, (&w, &v)| acc + w * v)
    }
}

/// Two rules are interchangeable when they are the same allocation or have
/// identical scheme and nodes.
pub fn same_rule<T: Scalar>(a: &Arc<QuadratureRule<T>>, b: &Arc<QuadratureRule<T>>) -> bool {
    Arc::ptr_eq(a, b) || (a.scheme == b.scheme && a.nodes == b.nodes)
}

/// Gauss-Legendre nodes/weights on `[0,1]`, built by Newton iteration on the
/// Legendre polynomial. Nodes are assembled as mirrored pairs `1/2 +- x/2`
/// with shared weights, so symmetric rules cancel odd-about-1/2 integrands
/// exactly.
fn gauss_unit_interval<T: Scalar>(n: usize) -> (Vec<T>, Vec<T>) {
    let half = T::of(0.5);
    let mut pairs: Vec<(T, T)> = Vec::with_capacity(n);
    for i in 0..n / 2 {
        let (x, w) = legendre_root::<T>(n, i);
        // w is the [-1,1] weight; halve for [0,1].
        pairs.push((half - half * x, half * w));
        pairs.push((half + half * x, half * w));
    }
    if n % 2 == 1 {
        let (_, w) = legendre_root::<T>(n, n / 2);
        pairs.push((half, half * w));
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("nodes are finite"));
    pairs.into_iter().unzip()
}

/// `i`-th root (descending in `x`) of the degree-`n` Legendre polynomial on
/// `[-1,1]` and its Gauss weight.
fn legendre_root<T: Scalar>(n: usize, i: usize) -> (T, T) {
    let nf = T::of_usize(n);
    let mut x = (T::PI() * (T::of_usize(i) + T::of(0.75)) / (nf + T::of(0.5))).cos();
    for _ in 0..100 {
        let (p, d) = legendre_eval::<T>(n, x);
        let dx = p / d;
        x = x - dx;
        if dx.abs() <= T::epsilon() {
            break;
        }
    }
    let (_, d) = legendre_eval::<T>(n, x);
    let w = T::of(2.0) / ((T::one() - x * x) * d * d);
    (x, w)
}

/// Legendre polynomial `P_n` and derivative at `x` by the three-term
/// recurrence.
fn legendre_eval<T: Scalar>(n: usize, x: T) -> (T, T) {
    let mut p_prev = T::one();
    let mut p = x;
    for j in 2..=n {
        let jf = T::of_usize(j);
        let next = ((T::of(2.0) * jf - T::one()) * x * p - (jf - T::one()) * p_prev) / jf;
        p_prev = p;
        p = next;
    }
    let d = T::of_usize(n) * (x * p - p_prev) / (x * x - T::one());
    (p, d)
}

/// Two mirrored Gauss panels on `[0,1/2]` and `[1/2,1]`. The right panel is
/// the exact reflection of the left one, preserving the odd-cancellation
/// property about `t = 1/2`.
fn gauss_split_at_half<T: Scalar>(n: usize) -> (Vec<T>, Vec<T>) {
    let quarter = T::of(0.25);
    let m = n / 2;
    let mut pairs: Vec<(T, T)> = Vec::with_capacity(n);
    // Panel nodes in [-1,1]; map left panel t = 1/4 + x/4, mirror right.
    let mut push_root = |x: T, w: T| {
        let left = quarter + quarter * x;
        let weight = quarter * w;
        pairs.push((left, weight));
        pairs.push((T::one() - left, weight));
    };
    for i in 0..m / 2 {
        let (x, w) = legendre_root::<T>(m, i);
        push_root(x, w);
        push_root(-x, w);
    }
    if m % 2 == 1 {
        if m == 1 {
            // Single-node Gauss panel: midpoint rule.
            push_root(T::zero(), T::of(2.0));
        } else {
            let (x, w) = legendre_root::<T>(m, m / 2);
            push_root(x, w);
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("nodes are finite"));
    pairs.into_iter().unzip()
}

fn simpson_unit_interval<T: Scalar>(n: usize) -> (Vec<T>, Vec<T>) {
    let h = T::one() / T::of_usize(n - 1);
    let third = h / T::of(3.0);
    let nodes: Vec<T> = (0..n).map(|i| T::of_usize(i) * h).collect();
    let weights: Vec<T> = (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                third
            } else if i % 2 == 1 {
                T::of(4.0) * third
            } else {
                T::of(2.0) * third
            }
        })
        .collect();
    (nodes, weights)
}

/// Sign-preserving real `n`-th root: `sign(x) |x|^(1/n)`, with `0 -> 0`.
///
/// For odd `n` this is the usual real root; for even `n` it is the unique
/// real continuation consistent with the odd case, which the kernel catalog
/// relies on for arguments left of the midline.
pub fn signed_root<T: Scalar>(x: T, n: u32) -> T {
    if x == T::zero() {
        return T::zero();
    }
    let r = x.abs().powf(T::one() / T::of(f64::from(n)));
    if x < T::zero() {
        -r
    } else {
        r
    }
}

/// Equispaced scan grid on `[0,1]`, endpoints included.
pub fn dense_grid<T: Scalar>(points: usize) -> Vec<T> {
    assert!(points >= 2, "a scan grid needs at least the two endpoints");
    let step = T::one() / T::of_usize(points - 1);
    let mut g: Vec<T> = (0..points).map(|i| T::of_usize(i) * step).collect();
    g[points - 1] = T::one();
    g
}

/// A function known by its values at the nodes of a quadrature rule, plus an
/// optional analytic value at `t = 0` (Gauss rules exclude the endpoint).
#[derive(Debug, Clone)]
pub struct GridFunction<T> {
    rule: Arc<QuadratureRule<T>>,
    values: Vec<T>,
    at_zero: Option<T>,
    tag: Option<String>,
}

impl<T: Scalar> GridFunction<T> {
    /// Samples `f` at the rule nodes and at `t = 0`.
    pub fn from_fn(rule: Arc<QuadratureRule<T>>, f: impl Fn(T) -> T) -> Self {
        let values = rule.nodes().iter().map(|&t| f(t)).collect();
        let at_zero = Some(f(T::zero()));
        Self {
            rule,
            values,
            at_zero,
            tag: None,
        }
    }

    /// Wraps existing node values.
    pub fn from_values(rule: Arc<QuadratureRule<T>>, values: Vec<T>) -> Result<Self, GridError> {
        if values.len() != rule.len() {
            return Err(GridError::LengthMismatch {
                expected: rule.len(),
                got: values.len(),
            });
        }
        Ok(Self {
            rule,
            values,
            at_zero: None,
            tag: None,
        })
    }

    /// The constant function `c`.
    pub fn constant(rule: Arc<QuadratureRule<T>>, c: T) -> Self {
        let n = rule.len();
        Self {
            rule,
            values: vec![c; n],
            at_zero: Some(c),
            tag: None,
        }
    }

    pub fn with_at_zero(mut self, v: T) -> Self {
        self.at_zero = Some(v);
        self
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }

    pub fn rule(&self) -> &Arc<QuadratureRule<T>> {
        &self.rule
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn at_zero(&self) -> Option<T> {
        self.at_zero
    }

    pub fn tag(&self) -> Option<&str> {
        self.tag.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sum_i w_i f(t_i)`.
    pub fn integrate(&self) -> T {
        self.rule.integrate_values(&self.values)
    }

    /// `max_i |f(t_i)|` (node values only; `t = 0` is an evaluation extra,
    /// not part of the grid norm).
    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// `max_i |f(t_i) - g(t_i)|` over a shared rule.
    pub fn sup_distance(&self, other: &Self) -> Result<T, GridError> {
        if !same_rule(&self.rule, &other.rule) {
            return Err(GridError::RuleMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs())))
    }

    pub fn min_value(&self) -> T {
        self.values.iter().fold(T::infinity(), |a, &v| a.min(v))
    }

    pub fn max_value(&self) -> T {
        self.values
            .iter()
            .fold(T::neg_infinity(), |a, &v| a.max(v))
    }

    /// Errs unless every node value (and the `t = 0` value, when present)
    /// is strictly positive.
    pub fn require_strictly_positive(&self) -> Result<(), GridError> {
        for (i, &v) in self.values.iter().enumerate() {
            if v <= T::zero() || v.is_nan() {
                return Err(GridError::NotPositive {
                    index: i,
                    value: v.as_f64(),
                });
            }
        }
        if let Some(v) = self.at_zero {
            if v <= T::zero() || v.is_nan() {
                return Err(GridError::NotPositive {
                    index: usize::MAX,
                    value: v.as_f64(),
                });
            }
        }
        Ok(())
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.require_strictly_positive().is_ok()
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
            && self.at_zero.is_none_or(|v| v.is_finite())
    }

    /// Applies `op` to every value, including the `t = 0` one. Catalog tags
    /// do not survive a transformation.
    pub fn map(&self, op: impl Fn(T) -> T) -> Self {
        Self {
            rule: Arc::clone(&self.rule),
            values: self.values.iter().map(|&v| op(v)).collect(),
            at_zero: self.at_zero.map(&op),
            tag: None,
        }
    }

    /// Combines two functions over a shared rule.
    pub fn zip_map(&self, other: &Self, op: impl Fn(T, T) -> T) -> Result<Self, GridError> {
        if !same_rule(&self.rule, &other.rule) {
            return Err(GridError::RuleMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        let at_zero = match (self.at_zero, other.at_zero) {
            (Some(a), Some(b)) => Some(op(a, b)),
            _ => None,
        };
        Ok(Self {
            rule: Arc::clone(&self.rule),
            values,
            at_zero,
            tag: None,
        })
    }

    /// Writes `t,value` rows at full double precision.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), GridError> {
        writeln!(out, "t,value")?;
        for (&t, &v) in self.rule.nodes().iter().zip(&self.values) {
            writeln!(out, "{:.16e},{:.16e}", t.as_f64(), v.as_f64())?;
        }
        Ok(())
    }

    /// Reads a `t,value` CSV written by [`write_csv`](Self::write_csv),
    /// validating the nodes against `rule`.
    pub fn read_csv<R: BufRead>(rule: Arc<QuadratureRule<T>>, input: R) -> Result<Self, GridError> {
        let mut values = Vec::with_capacity(rule.len());
        for (row, line) in input.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if row == 0 {
                if trimmed != "t,value" {
                    return Err(GridError::Csv {
                        row,
                        reason: format!("expected header `t,value`, got `{trimmed}`"),
                    });
                }
                continue;
            }
            let mut parts = trimmed.split(',');
            let parse = |s: Option<&str>, row: usize| -> Result<f64, GridError> {
                s.ok_or_else(|| GridError::Csv {
                    row,
                    reason: "missing column".into(),
                })?
                .trim()
                .parse::<f64>()
                .map_err(|e| GridError::Csv {
                    row,
                    reason: e.to_string(),
                })
            };
            let t = parse(parts.next(), row)?;
            let v = parse(parts.next(), row)?;
            let index = values.len();
            if index >= rule.len() {
                return Err(GridError::LengthMismatch {
                    expected: rule.len(),
                    got: index + 1,
                });
            }
            let expected = rule.nodes()[index].as_f64();
            let delta = (t - expected).abs();
            if delta > 1e-12 {
                return Err(GridError::NodeMismatch { index, delta });
            }
            values.push(T::of(v));
        }
        Self::from_values(rule, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn gauss200() -> Arc<QuadratureRule<f64>> {
        QuadratureRule::gauss(200).unwrap()
    }

    #[test]
    fn weights_sum_to_one_for_all_schemes() {
        for rule in [
            QuadratureRule::<f64>::gauss(2).unwrap(),
            QuadratureRule::<f64>::gauss(200).unwrap(),
            QuadratureRule::<f64>::gauss(201).unwrap(),
            QuadratureRule::<f64>::gauss_split(200).unwrap(),
            QuadratureRule::<f64>::build(Scheme::CompositeSimpson, 201).unwrap(),
        ] {
            let sum: f64 = rule.weights().iter().sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
            let one = GridFunction::constant(Arc::clone(&rule), 1.0);
            assert_abs_diff_eq!(one.integrate(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn invalid_node_counts_are_rejected() {
        assert!(QuadratureRule::<f64>::gauss(1).is_err());
        assert!(QuadratureRule::<f64>::gauss_split(5).is_err());
        assert!(QuadratureRule::<f64>::build(Scheme::CompositeSimpson, 4).is_err());
        assert!(QuadratureRule::<f64>::build(Scheme::CompositeSimpson, 1).is_err());
    }

    #[test]
    fn gauss_integrates_square_and_quartic() {
        let rule = QuadratureRule::<f64>::gauss(2).unwrap();
        assert_abs_diff_eq!(rule.integrate_fn(|u| u * u), 1.0 / 3.0, epsilon = 1e-12);
        let rule = gauss200();
        assert_abs_diff_eq!(rule.integrate_fn(|u| u.powi(4)), 0.2, epsilon = 1e-12);
        // Antiderivative oracle: int (u-1/2)^2 du = [(u-1/2)^3/3] = 1/12.
        let expected = (0.5f64.powi(3) - (-0.5f64).powi(3)) / 3.0;
        assert_abs_diff_eq!(
            rule.integrate_fn(|u| (u - 0.5).powi(2)),
            expected,
            epsilon = 1e-12
        );
    }

    #[test]
    fn gauss_exactness_up_to_degree_2n_minus_1() {
        let n = 5;
        let rule = QuadratureRule::<f64>::gauss(n).unwrap();
        assert_eq!(rule.exactness_degree(), 2 * n - 1);
        for p in 0..=(2 * n - 1) {
            let exact = 1.0 / (p as f64 + 1.0);
            assert_abs_diff_eq!(
                rule.integrate_fn(|u| u.powi(p as i32)),
                exact,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn odd_integrand_about_midpoint_cancels_exactly() {
        for rule in [gauss200(), QuadratureRule::gauss_split(200).unwrap()] {
            let v = rule.integrate_fn(|u| signed_root(u - 0.5, 3));
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn signed_root_known_values() {
        assert_abs_diff_eq!(signed_root(-0.125, 3), -0.5, epsilon = 1e-15);
        for n in 1..8 {
            assert_eq!(signed_root(0.0, n), 0.0);
            assert_abs_diff_eq!(signed_root(1.0, n), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn sup_norm_and_distance_basics() {
        let rule = gauss200();
        let c = GridFunction::constant(Arc::clone(&rule), -2.5);
        assert_abs_diff_eq!(c.sup_norm(), 2.5);
        assert_eq!(c.sup_distance(&c).unwrap(), 0.0);

        // f(t) = t: the largest node value is below 1 because 1 is not a
        // Gauss node; grid semantics measure over nodes only.
        let f = GridFunction::from_fn(Arc::clone(&rule), |t| t);
        let last = *rule.nodes().last().unwrap();
        assert!(f.sup_norm() < 1.0);
        assert_eq!(f.sup_norm(), last);

        let other = QuadratureRule::<f64>::gauss(100).unwrap();
        let g = GridFunction::constant(other, 1.0);
        assert!(matches!(
            f.sup_distance(&g),
            Err(GridError::RuleMismatch)
        ));
    }

    #[test]
    fn positivity_check_reports_offending_node() {
        let rule = QuadratureRule::<f64>::gauss(4).unwrap();
        let mut values = vec![1.0; 4];
        values[2] = 0.0;
        let f = GridFunction::from_values(rule, values).unwrap();
        match f.require_strictly_positive() {
            Err(GridError::NotPositive { index: 2, .. }) => {}
            other => panic!("expected NotPositive at index 2, got {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip_preserves_values() {
        let rule = QuadratureRule::<f64>::gauss(16).unwrap();
        let f = GridFunction::from_fn(Arc::clone(&rule), |t| (3.0 * t).sin() + 2.0);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = GridFunction::read_csv(Arc::clone(&rule), buf.as_slice()).unwrap();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn csv_rejects_foreign_nodes() {
        let rule = QuadratureRule::<f64>::gauss(4).unwrap();
        let f = GridFunction::from_fn(Arc::clone(&rule), |t| t);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let other = QuadratureRule::<f64>::gauss(5).unwrap();
        assert!(GridFunction::read_csv(other, buf.as_slice()).is_err());
    }

    #[test]
    fn core_math_instantiates_at_single_precision() {
        let rule = QuadratureRule::<f32>::gauss(32).unwrap();
        let sum: f32 = rule.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-6);
        assert!((rule.integrate_fn(|u| u * u) - 1.0 / 3.0).abs() < 1e-6);
        assert!((signed_root(-0.125f32, 3) + 0.5).abs() < 1e-6);
        let f = GridFunction::from_fn(Arc::clone(&rule), |t: f32| t + 1.0);
        assert!(f.is_strictly_positive());
    }

    proptest! {
        #[test]
        fn signed_root_is_odd(x in -10.0f64..10.0, n in 1u32..8) {
            let a = signed_root(x, n);
            let b = signed_root(-x, n);
            prop_assert!((a + b).abs() <= 1e-15 * a.abs().max(1.0));
        }

        #[test]
        fn sup_distance_is_a_metric(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let rule = QuadratureRule::<f64>::gauss(16).unwrap();
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let vals: Vec<f64> = (0..16).map(|_| rng.gen_range(-5.0..5.0)).collect();
                GridFunction::from_values(Arc::clone(&rule), vals).unwrap()
            };
            let f = mk(&mut rng);
            let g = mk(&mut rng);
            let h = mk(&mut rng);
            let dfg = f.sup_distance(&g).unwrap();
            let dgf = g.sup_distance(&f).unwrap();
            prop_assert_eq!(dfg, dgf);
            let dfh = f.sup_distance(&h).unwrap();
            let dgh = g.sup_distance(&h).unwrap();
            prop_assert!(dfh <= dfg + dgh + 1e-15);
            prop_assert_eq!(f.sup_distance(&f).unwrap(), 0.0);
        }
    }
}
