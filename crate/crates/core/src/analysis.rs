//! Quantitative conditions on kernels and structural checks on candidate
//! pairs: extremes, the uniqueness condition, the a-priori solution band,
//! sign changes, and the shifted-norm inequality.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridError, GridFunction};
use crate::kernels::{Kernel, KernelError, KernelFamily, ScanSource};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("kernel is not positive (minimum {min:.6e}); extremes are undefined")]
    NotPositive { min: f64 },
    #[error("branching order k = {0} is invalid here: {1}")]
    InvalidOrder(u32, &'static str),
    #[error("shifted-norm inequality requires a sign-changing function")]
    NoSignChange,
}

/// Verdict of the uniqueness condition. The condition is sufficient only:
/// failing it proves nothing, hence the deliberately weak second variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `(M/m)^k - (m/M)^k < 1/k`: no period-2 pair with `f != g` exists.
    NoPeriod2Guaranteed,
    /// The condition fails; existence is not decided either way.
    Inconclusive,
}

/// Kernel extremes and the uniqueness-condition verdict, as serialized to
/// report files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelReport {
    #[serde(flatten)]
    pub family: KernelFamily,
    pub k: u32,
    #[serde(rename = "M")]
    pub max: f64,
    #[serde(rename = "m")]
    pub min: f64,
    pub ratio: f64,
    pub uniqueness_lhs: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    /// Number of points per axis of the scan grid (dense grid for catalog
    /// kernels, node count for file kernels).
    pub scan_grid: usize,
    pub scan_source: ScanSource,
}

/// Kernel extremes `(M, m)` over the dense grid (catalog kernels) or the
/// node matrix plus `t = 0` row (file kernels). Errs when the scan finds a
/// non-positive value.
pub fn extremes<T: Scalar>(kernel: &Kernel<T>, grid_points: usize) -> Result<(T, T), AnalysisError> {
    let scan = kernel.positivity_scan(grid_points);
    if !scan.positive {
        return Err(AnalysisError::NotPositive { min: scan.min });
    }
    Ok((T::of(scan.max), T::of(scan.min)))
}

/// Evaluates the uniqueness condition `(M/m)^k - (m/M)^k < 1/k` at
/// branching order `k >= 2`.
pub fn uniqueness_condition<T: Scalar>(
    kernel: &Kernel<T>,
    k: u32,
    grid_points: usize,
) -> Result<KernelReport, AnalysisError> {
    if k < 2 {
        return Err(AnalysisError::InvalidOrder(
            k,
            "the uniqueness condition is stated for k >= 2",
        ));
    }
    let scan = kernel.positivity_scan(grid_points);
    if !scan.positive {
        return Err(AnalysisError::NotPositive { min: scan.min });
    }
    let (max, min) = (scan.max, scan.min);
    let ratio = max / min;
    let lhs = ratio.powi(k as i32) - ratio.recip().powi(k as i32);
    let threshold = 1.0 / f64::from(k);
    let verdict = if lhs < threshold {
        Verdict::NoPeriod2Guaranteed
    } else {
        Verdict::Inconclusive
    };
    Ok(KernelReport {
        family: kernel.family(),
        k,
        max,
        min,
        ratio,
        uniqueness_lhs: lhs,
        threshold,
        verdict,
        scan_grid: scan.grid_points,
        scan_source: scan.source,
    })
}

/// The a-priori enclosure every solution of the plain Hammerstein system
/// must lie in, together with the membership result for one function.
#[derive(Debug, Clone, Copy)]
pub struct BandCheck<T> {
    pub lower: T,
    pub upper: T,
    pub pass: bool,
}

/// Band membership with the stated slack `1e-9` absorbing quadrature error:
/// `lower = (m/M) M^(-1/(k-1))`, `upper = (M/m) m^(-1/(k-1))`.
pub fn pk_band_with_extremes<T: Scalar>(
    max: T,
    min: T,
    k: u32,
    f: &GridFunction<T>,
) -> Result<BandCheck<T>, AnalysisError> {
    if k < 2 {
        return Err(AnalysisError::InvalidOrder(
            k,
            "the solution band has exponent 1/(k-1)",
        ));
    }
    let e = T::one() / (T::of(f64::from(k)) - T::one());
    let lower = min / max * max.powf(-e);
    let upper = max / min * min.powf(-e);
    let slack = T::of(1e-9);
    let pass = f
        .values()
        .iter()
        .all(|&v| v >= lower - slack && v <= upper + slack);
    Ok(BandCheck { lower, upper, pass })
}

/// Band membership against freshly scanned kernel extremes.
pub fn pk_band<T: Scalar>(
    kernel: &Kernel<T>,
    k: u32,
    f: &GridFunction<T>,
    grid_points: usize,
) -> Result<BandCheck<T>, AnalysisError> {
    let (max, min) = extremes(kernel, grid_points)?;
    pk_band_with_extremes(max, min, k, f)
}

/// True iff `f - g` takes both a positive and a negative value on the
/// nodes. Every genuine 2-cycle must produce a sign change.
pub fn sign_change<T: Scalar>(
    f: &GridFunction<T>,
    g: &GridFunction<T>,
) -> Result<bool, AnalysisError> {
    let diff = f.zip_map(g, |a, b| a - b)?;
    let has_pos = diff.values().iter().any(|&v| v > T::zero());
    let has_neg = diff.values().iter().any(|&v| v < T::zero());
    Ok(has_pos && has_neg)
}

/// Shifted-norm inequality for sign-changing functions: for every shift
/// `a`, `sup |phi - a| >= 1/2 sup |phi|`. Checks all supplied shifts and
/// errs when `phi` does not change sign on the nodes (the inequality's
/// hypothesis).
pub fn shift_norm_check<T: Scalar>(
    phi: &GridFunction<T>,
    shifts: &[T],
) -> Result<bool, AnalysisError> {
    let has_pos = phi.values().iter().any(|&v| v > T::zero());
    let has_neg = phi.values().iter().any(|&v| v < T::zero());
    if !(has_pos && has_neg) {
        return Err(AnalysisError::NoSignChange);
    }
    let half_norm = T::of(0.5) * phi.sup_norm();
    Ok(shifts.iter().all(|&a| {
        let shifted = phi.map(|v| v - a).sup_norm();
        shifted >= half_norm
    }))
}
