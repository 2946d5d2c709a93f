//! The boundary-law operators and the normalization maps between their
//! solution forms.
//!
//! * `W f = int K(.,u) f(u) du` (linear), with the extra point value
//!   `(W f)(0)` taken from the kernel's `t = 0` row;
//! * `omega(f) = (W f)(0)`;
//! * `A_k f = ((W f) / (W f)(0))^k`, the normalized recursion step — every
//!   output is pinned to 1 at `t = 0`;
//! * `H_k f = int K(.,u) f^k(u) du`, the Hammerstein operator.
//!
//! A period-2 boundary law is a pair with `A_k f = g, A_k g = f`. Such
//! pairs correspond to solutions of `H_k f = lambda_1 g, H_k g = lambda_2 f`
//! normalized to 1 at `t = 0` (take k-th roots, the lambdas are the omega
//! values), and those in turn rescale to plain 2-cycles `H_k f = g,
//! H_k g = f` by the constants
//!
//! ```text
//! C_1 = lambda_1^(1/(k+1)) (lambda_1 lambda_2)^(1/(k^2-1))
//! C_2 = lambda_2^(1/(k+1)) (lambda_1 lambda_2)^(1/(k^2-1))
//! ```
//!
//! All three forms are carried by [`CyclePair`] with a form tag, and
//! [`cycle_residual`] measures how well a pair satisfies its form's
//! equations.

use thiserror::Error;

use crate::grid::{same_rule, GridError, GridFunction};
use crate::kernels::{Kernel, KernelError};
use crate::scalar::Scalar;

/// Errors from operator application and form conversion.
#[derive(Debug, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("normalization functional omega(f) = {0} is not positive")]
    NonPositiveOmega(f64),
    #[error("{context}: function must be strictly positive")]
    NotPositive { context: &'static str },
    #[error("branching order k = {0} is invalid here: {1}")]
    InvalidOrder(u32, &'static str),
    #[error("pair form {found:?} does not support this operation (expected {expected:?})")]
    WrongForm { expected: PairForm, found: PairForm },
    #[error("a normalized pair must evaluate to 1 at t = 0 (got {0})")]
    NotNormalized(f64),
    #[error("rescaling constants require positive lambdas, got ({0}, {1})")]
    NonPositiveLambda(f64, f64),
}

/// Which system of equations a [`CyclePair`] is a candidate solution of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairForm {
    /// `A_k f = g, A_k g = f`; members are 1 at `t = 0`.
    AForm,
    /// `H_k f = lambda_1 g, H_k g = lambda_2 f`; members are 1 at `t = 0`.
    HammersteinLambda,
    /// `H_k f = g, H_k g = f`.
    Hammerstein,
}

/// A candidate period-2 pair `(f, g)` at branching order `k`, in one of the
/// three equivalent forms, with its verification residuals once computed.
#[derive(Debug, Clone)]
pub struct CyclePair<T> {
    pub f: GridFunction<T>,
    pub g: GridFunction<T>,
    pub k: u32,
    pub form: PairForm,
    /// `(omega(f), omega(g))` of the original recursion pair; present only
    /// for [`PairForm::HammersteinLambda`].
    pub lambda: Option<(T, T)>,
    /// `(sup |H_k f - .|, sup |H_k g - .|)` against the form's right-hand
    /// sides, filled by [`cycle_residual`].
    pub residuals: Option<(T, T)>,
}

impl<T: Scalar> CyclePair<T> {
    /// A pair in recursion form; both members must be strictly positive and
    /// carry the forced value 1 at `t = 0` within `1e-10`.
    pub fn new_a_form(f: GridFunction<T>, g: GridFunction<T>, k: u32) -> Result<Self, OperatorError> {
        for fun in [&f, &g] {
            fun.require_strictly_positive()
                .map_err(|_| OperatorError::NotPositive {
                    context: "recursion-form pair",
                })?;
            let at0 = fun.at_zero().ok_or(OperatorError::NotNormalized(f64::NAN))?;
            if (at0 - T::one()).abs() > T::of(1e-10) {
                return Err(OperatorError::NotNormalized(at0.as_f64()));
            }
        }
        Ok(Self {
            f,
            g,
            k,
            form: PairForm::AForm,
            lambda: None,
            residuals: None,
        })
    }

    /// A pair in plain Hammerstein form.
    pub fn new_hammerstein(f: GridFunction<T>, g: GridFunction<T>, k: u32) -> Self {
        Self {
            f,
            g,
            k,
            form: PairForm::Hammerstein,
            lambda: None,
            residuals: None,
        }
    }

    /// The same candidate with the roles of `f` and `g` exchanged
    /// (residuals and lambdas swap along).
    pub fn swapped(&self) -> Self {
        Self {
            f: self.g.clone(),
            g: self.f.clone(),
            k: self.k,
            form: self.form,
            lambda: self.lambda.map(|(a, b)| (b, a)),
            residuals: self.residuals.map(|(a, b)| (b, a)),
        }
    }

    /// `sup |f - g|`: the separation deciding fixed point vs 2-cycle.
    pub fn separation(&self) -> Result<T, GridError> {
        self.f.sup_distance(&self.g)
    }

    /// Canonical orientation for deduplication: the member with the smaller
    /// value at the first node goes first, ties broken by the second node.
    pub fn canonicalize(&mut self) {
        let fv = self.f.values();
        let gv = self.g.values();
        let swap = match fv[0].partial_cmp(&gv[0]) {
            Some(std::cmp::Ordering::Greater) => true,
            Some(std::cmp::Ordering::Equal) if fv.len() > 1 => fv[1] > gv[1],
            _ => false,
        };
        if swap {
            *self = self.swapped();
        }
    }
}

/// `(W f)(t_i) = sum_j w_j K(t_i, u_j) f(u_j)`, with the `t = 0` value from
/// the kernel's stored row.
pub fn apply_w<T: Scalar>(
    kernel: &Kernel<T>,
    f: &GridFunction<T>,
) -> Result<GridFunction<T>, OperatorError> {
    weighted_kernel_sum(kernel, f, |v| v)
}

fn weighted_kernel_sum<T: Scalar>(
    kernel: &Kernel<T>,
    f: &GridFunction<T>,
    transform: impl Fn(T) -> T,
) -> Result<GridFunction<T>, OperatorError> {
    if !same_rule(kernel.rule(), f.rule()) {
        return Err(GridError::RuleMismatch.into());
    }
    let rule = kernel.rule();
    let weights = rule.weights();
    let weighted: Vec<T> = weights
        .iter()
        .zip(f.values())
        .map(|(&w, &v)| w * transform(v))
        .collect();
    let n = rule.len();
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let row = kernel.row(i);
        let mut acc = T::zero();
        for j in 0..n {
            acc = acc + row[j] * weighted[j];
        }
        values.push(acc);
    }
    let mut at_zero = T::zero();
    for (j, &w) in weighted.iter().enumerate() {
        at_zero = at_zero + kernel.row_zero()[j] * w;
    }
    Ok(GridFunction::from_values(std::sync::Arc::clone(rule), values)
        .expect("value count matches rule")
        .with_at_zero(at_zero))
}

/// `omega(f) = (W f)(0) = int K(0,u) f(u) du`.
pub fn omega<T: Scalar>(kernel: &Kernel<T>, f: &GridFunction<T>) -> Result<T, OperatorError> {
    if !same_rule(kernel.rule(), f.rule()) {
        return Err(GridError::RuleMismatch.into());
    }
    let weights = kernel.rule().weights();
    let mut acc = T::zero();
    for ((&w, &v), &k0) in weights.iter().zip(f.values()).zip(kernel.row_zero()) {
        acc = acc + w * v * k0;
    }
    Ok(acc)
}

/// `(A_k f)(t) = ((W f)(t) / (W f)(0))^k`. The output value at `t = 0` is
/// the ratio of identical quantities, hence exactly 1.
pub fn apply_a<T: Scalar>(
    kernel: &Kernel<T>,
    f: &GridFunction<T>,
    k: u32,
) -> Result<GridFunction<T>, OperatorError> {
    f.require_strictly_positive()
        .map_err(|_| OperatorError::NotPositive {
            context: "recursion operator input",
        })?;
    let wf = apply_w(kernel, f)?;
    let w0 = wf.at_zero().expect("apply_w always sets the t = 0 value");
    if w0 <= T::zero() || w0.is_nan() {
        return Err(OperatorError::NonPositiveOmega(w0.as_f64()));
    }
    Ok(wf.map(|v| (v / w0).powi(k as i32)).with_at_zero(T::one()))
}

/// `(H_k f)(t) = int K(t,u) f^k(u) du`, nodewise quadrature against the
/// kernel matrix; the output also carries its `t = 0` value.
pub fn apply_h<T: Scalar>(
    kernel: &Kernel<T>,
    f: &GridFunction<T>,
    k: u32,
) -> Result<GridFunction<T>, OperatorError> {
    weighted_kernel_sum(kernel, f, |v| v.powi(k as i32))
}

/// Converts a recursion-form pair into the lambda Hammerstein form: members
/// are the k-th roots, the lambdas the omega values of the originals.
pub fn a_to_hammerstein<T: Scalar>(
    kernel: &Kernel<T>,
    pair: &CyclePair<T>,
) -> Result<CyclePair<T>, OperatorError> {
    if pair.form != PairForm::AForm {
        return Err(OperatorError::WrongForm {
            expected: PairForm::AForm,
            found: pair.form,
        });
    }
    if pair.k < 2 {
        return Err(OperatorError::InvalidOrder(
            pair.k,
            "the root map needs k >= 2; at k = 1 the forms coincide",
        ));
    }
    for fun in [&pair.f, &pair.g] {
        fun.require_strictly_positive()
            .map_err(|_| OperatorError::NotPositive {
                context: "root map input",
            })?;
    }
    let lambda1 = omega(kernel, &pair.f)?;
    let lambda2 = omega(kernel, &pair.g)?;
    let inv_k = T::one() / T::of(f64::from(pair.k));
    let f1 = pair.f.map(|v| v.powf(inv_k));
    let g1 = pair.g.map(|v| v.powf(inv_k));
    Ok(CyclePair {
        f: f1,
        g: g1,
        k: pair.k,
        form: PairForm::HammersteinLambda,
        lambda: Some((lambda1, lambda2)),
        residuals: None,
    })
}

/// Scales a lambda-form solution into a plain 2-cycle of the Hammerstein
/// operator by the constants `C_1`, `C_2`.
pub fn rescale_pair<T: Scalar>(
    f: &GridFunction<T>,
    g: &GridFunction<T>,
    lambda1: T,
    lambda2: T,
    k: u32,
) -> Result<CyclePair<T>, OperatorError> {
    if !(lambda1 > T::zero() && lambda2 > T::zero()) {
        return Err(OperatorError::NonPositiveLambda(
            lambda1.as_f64(),
            lambda2.as_f64(),
        ));
    }
    if k < 2 {
        return Err(OperatorError::InvalidOrder(k, "rescaling needs k >= 2"));
    }
    let kf = T::of(f64::from(k));
    let e1 = T::one() / (kf + T::one());
    let e2 = T::one() / (kf * kf - T::one());
    let product = (lambda1 * lambda2).powf(e2);
    let c1 = lambda1.powf(e1) * product;
    let c2 = lambda2.powf(e1) * product;
    Ok(CyclePair::new_hammerstein(
        f.map(|v| v / c1),
        g.map(|v| v / c2),
        k,
    ))
}

/// Residuals of a pair against its form's equations:
///
/// * Hammerstein form: `(sup |H_k f - g|, sup |H_k g - f|)`;
/// * lambda form: the same with right-hand sides `lambda_1 g`, `lambda_2 f`;
/// * recursion form: converted through the root and rescale maps first, so
///   the numbers reported are plain Hammerstein residuals.
///
/// The residuals are stored in the pair and returned.
pub fn cycle_residual<T: Scalar>(
    kernel: &Kernel<T>,
    pair: &mut CyclePair<T>,
) -> Result<(T, T), OperatorError> {
    let (r1, r2) = match pair.form {
        PairForm::Hammerstein => {
            let hf = apply_h(kernel, &pair.f, pair.k)?;
            let hg = apply_h(kernel, &pair.g, pair.k)?;
            (hf.sup_distance(&pair.g)?, hg.sup_distance(&pair.f)?)
        }
        PairForm::HammersteinLambda => {
            let (l1, l2) = pair.lambda.expect("lambda form carries its lambdas");
            let hf = apply_h(kernel, &pair.f, pair.k)?;
            let hg = apply_h(kernel, &pair.g, pair.k)?;
            let r1 = hf.zip_map(&pair.g, |h, g| h - l1 * g)?.sup_norm();
            let r2 = hg.zip_map(&pair.f, |h, f| h - l2 * f)?.sup_norm();
            (r1, r2)
        }
        PairForm::AForm => {
            if pair.k == 1 {
                // No root/rescale chain at k = 1; measure the recursion
                // equations directly.
                let af = apply_a(kernel, &pair.f, 1)?;
                let ag = apply_a(kernel, &pair.g, 1)?;
                (af.sup_distance(&pair.g)?, ag.sup_distance(&pair.f)?)
            } else {
                let lambda_form = a_to_hammerstein(kernel, pair)?;
                let (l1, l2) = lambda_form.lambda.unwrap();
                let mut plain = rescale_pair(&lambda_form.f, &lambda_form.g, l1, l2, pair.k)?;
                cycle_residual(kernel, &mut plain)?
            }
        }
    };
    pair.residuals = Some((r1, r2));
    Ok((r1, r2))
}
