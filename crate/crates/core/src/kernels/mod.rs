//! Kernel families for the boundary-law equations.
//!
//! A kernel is a positive function `K(t,u)` on `[0,1]^2`, stored as its
//! matrix over the quadrature nodes plus the `K(0, .)` row that the
//! normalized recursion operator needs. Catalog kernels also carry an
//! evaluator for arbitrary points, which the dense positivity scans and
//! extreme searches use; file-backed kernels are restricted to nodes.
//!
//! The catalog: a generic `exp(J beta xi)` builder, three families with
//! closed-form 2-cycles at branching orders 2, 3 and >= 4, and a
//! moment-matched polynomial family carrying two distinct 2-cycles for all
//! sufficiently large branching orders.

pub mod exact;
mod four_cycle;
mod k2;
mod k3;
mod k_ge4;

pub use four_cycle::{
    find_k0, four_cycle_closed_forms, four_cycle_deviation_bound, four_cycle_kernel,
    four_cycle_min_max, k1_k2_abs_min, BTargetAssignment, MomentSystem,
};
pub use k2::{
    k2_b_coefficient, k2_c_coefficient, k2_c_cubed, k2_closed_forms, k2_kernel, k2_minimum,
    k2_smallest_positive_n,
};
pub use k3::{k3_closed_forms, k3_coefficient_a, k3_kernel};
pub use k_ge4::{
    k_ge4_c_exact, k_ge4_c_float, k_ge4_closed_forms, k_ge4_coefficient_a, k_ge4_kernel,
};

use std::io::{BufRead, Write};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{dense_grid, GridError, QuadratureRule, Scheme};
use crate::scalar::Scalar;

/// Errors from kernel construction, validation and IO.
#[derive(Debug, Error)]
pub enum KernelError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("interaction strength J must be nonzero")]
    ZeroCoupling,
    #[error("inverse temperature beta must be positive, got {0}")]
    InvalidTemperature(f64),
    #[error("kernel value is not finite at (t,u) = ({t}, {u})")]
    NonFinite { t: f64, u: f64 },
    #[error("kernel {family} is not positive: min {min:.6e} at (t,u) = ({:.4}, {:.4})", at.0, at.1)]
    NotPositive {
        family: String,
        min: f64,
        at: (f64, f64),
    },
    #[error("kernel entry {value:.6e} at (t,u) = ({:.4}, {:.4}) is not positive; logarithm undefined", at.0, at.1)]
    NonPositiveEntry { value: f64, at: (f64, f64) },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("moment matrix {0} is singular, the polynomial system has no solution")]
    SingularMomentMatrix(&'static str),
    #[error("neither right-hand-side assignment reproduces the 2-cycle identities; oracle residuals {0:.3e} / {1:.3e}")]
    AssignmentUndecided(f64, f64),
    #[error("file-backed kernels evaluate only at quadrature nodes and t = 0")]
    MissingEvaluator,
    #[error("kernel csv row {row}: {reason}")]
    Csv { row: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Kernel family and its defining parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelFamily {
    /// `K(t,u) = exp(J beta xi(t,u))` for a bounded interaction `xi`.
    #[serde(rename = "generic_xi")]
    GenericXi { j: f64, beta: f64 },
    /// Signed-root family with a 2-cycle at branching order 2; positive for
    /// all root orders `n` past a scan-determined threshold.
    #[serde(rename = "k2_family")]
    K2 { n: u32 },
    /// Trigonometric family with a 2-cycle at branching order 3.
    #[serde(rename = "k3_family")]
    K3,
    /// Rational family with a 2-cycle at each branching order `k >= 4`.
    #[serde(rename = "k_ge4_family")]
    KGe4 { k: u32 },
    /// Moment-matched polynomial family with two distinct 2-cycles for all
    /// sufficiently large `k`.
    #[serde(rename = "four_cycle_family")]
    FourCycle { k: u32 },
    /// Loaded from a CSV matrix; node evaluation only.
    #[serde(rename = "file")]
    File,
}

impl KernelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::GenericXi { .. } => "generic_xi",
            KernelFamily::K2 { .. } => "k2_family",
            KernelFamily::K3 => "k3_family",
            KernelFamily::KGe4 { .. } => "k_ge4_family",
            KernelFamily::FourCycle { .. } => "four_cycle_family",
            KernelFamily::File => "file",
        }
    }
}

impl std::fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelFamily::GenericXi { j, beta } => write!(f, "generic_xi(J={j}, beta={beta})"),
            KernelFamily::K2 { n } => write!(f, "k2_family(n={n})"),
            KernelFamily::K3 => write!(f, "k3_family"),
            KernelFamily::KGe4 { k } => write!(f, "k_ge4_family(k={k})"),
            KernelFamily::FourCycle { k } => write!(f, "four_cycle_family(k={k})"),
            KernelFamily::File => write!(f, "file"),
        }
    }
}

/// Where a positivity scan took its samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanSource {
    /// Equispaced dense grid on `[0,1]^2` (catalog kernels).
    DenseGrid,
    /// Node matrix plus the `t = 0` row (file kernels).
    NodeMatrix,
}

/// Result of a positivity scan, kept with the kernel and in sidecar files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityScan {
    pub source: ScanSource,
    pub grid_points: usize,
    pub min: f64,
    pub max: f64,
    pub min_at: (f64, f64),
    pub positive: bool,
}

/// A kernel over a fixed quadrature rule.
pub struct Kernel<T> {
    family: KernelFamily,
    rule: Arc<QuadratureRule<T>>,
    /// Row-major `N x N` matrix, entry `(i,j) = K(t_i, u_j)`.
    matrix: Vec<T>,
    /// `K(0, u_j)`.
    row_zero: Vec<T>,
    eval: Option<Arc<dyn Fn(T, T) -> T + Send + Sync>>,
    scan: Option<PositivityScan>,
}

impl<T: Scalar> std::fmt::Debug for Kernel<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Kernel")
            .field("family", &self.family)
            .field("nodes", &self.rule.len())
            .field("evaluable", &self.eval.is_some())
            .field("scan", &self.scan)
            .finish()
    }
}

impl<T: Scalar> Clone for Kernel<T> {
    fn clone(&self) -> Self {
        Self {
            family: self.family,
            rule: Arc::clone(&self.rule),
            matrix: self.matrix.clone(),
            row_zero: self.row_zero.clone(),
            eval: self.eval.clone(),
            scan: self.scan.clone(),
        }
    }
}

impl<T: Scalar> Kernel<T> {
    /// Builds the node matrix and `t = 0` row from a pointwise evaluator.
    pub fn from_eval(
        family: KernelFamily,
        rule: Arc<QuadratureRule<T>>,
        eval: Arc<dyn Fn(T, T) -> T + Send + Sync>,
    ) -> Result<Self, KernelError> {
        let nodes = rule.nodes().to_vec();
        let n = nodes.len();
        let mut matrix = Vec::with_capacity(n * n);
        for &t in &nodes {
            for &u in &nodes {
                let v = eval(t, u);
                if !v.is_finite() {
                    return Err(KernelError::NonFinite {
                        t: t.as_f64(),
                        u: u.as_f64(),
                    });
                }
                matrix.push(v);
            }
        }
        let mut row_zero = Vec::with_capacity(n);
        for &u in &nodes {
            let v = eval(T::zero(), u);
            if !v.is_finite() {
                return Err(KernelError::NonFinite {
                    t: 0.0,
                    u: u.as_f64(),
                });
            }
            row_zero.push(v);
        }
        Ok(Self {
            family,
            rule,
            matrix,
            row_zero,
            eval: Some(eval),
            scan: None,
        })
    }

    /// Wraps a precomputed node matrix and `t = 0` row (file kernels and
    /// grid-sampled interactions).
    pub fn from_matrix(
        family: KernelFamily,
        rule: Arc<QuadratureRule<T>>,
        matrix: Vec<T>,
        row_zero: Vec<T>,
    ) -> Result<Self, KernelError> {
        let n = rule.len();
        if matrix.len() != n * n {
            return Err(GridError::LengthMismatch {
                expected: n * n,
                got: matrix.len(),
            }
            .into());
        }
        if row_zero.len() != n {
            return Err(GridError::LengthMismatch {
                expected: n,
                got: row_zero.len(),
            }
            .into());
        }
        if let Some(pos) = matrix.iter().position(|v| !v.is_finite()) {
            let (i, j) = (pos / n, pos % n);
            return Err(KernelError::NonFinite {
                t: rule.nodes()[i].as_f64(),
                u: rule.nodes()[j].as_f64(),
            });
        }
        if let Some(j) = row_zero.iter().position(|v| !v.is_finite()) {
            return Err(KernelError::NonFinite {
                t: 0.0,
                u: rule.nodes()[j].as_f64(),
            });
        }
        Ok(Self {
            family,
            rule,
            matrix,
            row_zero,
            eval: None,
            scan: None,
        })
    }

    /// `K(t,u) = exp(J beta xi(t,u))` from a pointwise interaction.
    pub fn from_xi_fn(
        rule: Arc<QuadratureRule<T>>,
        xi: impl Fn(T, T) -> T + Send + Sync + 'static,
        j: f64,
        beta: f64,
    ) -> Result<Self, KernelError> {
        if j == 0.0 {
            return Err(KernelError::ZeroCoupling);
        }
        if beta <= 0.0 || beta.is_nan() {
            return Err(KernelError::InvalidTemperature(beta));
        }
        let jb = T::of(j * beta);
        let eval = Arc::new(move |t: T, u: T| (jb * xi(t, u)).exp());
        Self::from_eval(KernelFamily::GenericXi { j, beta }, rule, eval)
    }

    /// `K = exp(J beta xi)` from node samples of the interaction
    /// (`xi_matrix` row-major over nodes, `xi_row_zero` the `t = 0` row).
    pub fn from_xi_grid(
        rule: Arc<QuadratureRule<T>>,
        xi_matrix: &[T],
        xi_row_zero: &[T],
        j: f64,
        beta: f64,
    ) -> Result<Self, KernelError> {
        if j == 0.0 {
            return Err(KernelError::ZeroCoupling);
        }
        if beta <= 0.0 || beta.is_nan() {
            return Err(KernelError::InvalidTemperature(beta));
        }
        let n = rule.len();
        if let Some(pos) = xi_matrix.iter().position(|v| !v.is_finite()) {
            let (i, jj) = (pos / n.max(1), pos % n.max(1));
            return Err(KernelError::NonFinite {
                t: rule.nodes().get(i).map_or(f64::NAN, |v| v.as_f64()),
                u: rule.nodes().get(jj).map_or(f64::NAN, |v| v.as_f64()),
            });
        }
        let jb = T::of(j * beta);
        let matrix = xi_matrix.iter().map(|&x| (jb * x).exp()).collect();
        let row_zero = xi_row_zero.iter().map(|&x| (jb * x).exp()).collect();
        Self::from_matrix(KernelFamily::GenericXi { j, beta }, rule, matrix, row_zero)
    }

    /// Recovers the interaction `xi = ln K / (J beta)` on nodes; the second
    /// component is the `t = 0` row.
    pub fn to_xi(&self, j: f64, beta: f64) -> Result<(Vec<T>, Vec<T>), KernelError> {
        if j == 0.0 {
            return Err(KernelError::ZeroCoupling);
        }
        if beta <= 0.0 || beta.is_nan() {
            return Err(KernelError::InvalidTemperature(beta));
        }
        let n = self.rule.len();
        let jb = T::of(j * beta);
        let mut xi_matrix = Vec::with_capacity(n * n);
        for (pos, &v) in self.matrix.iter().enumerate() {
            if v <= T::zero() || v.is_nan() {
                let (i, jj) = (pos / n, pos % n);
                return Err(KernelError::NonPositiveEntry {
                    value: v.as_f64(),
                    at: (
                        self.rule.nodes()[i].as_f64(),
                        self.rule.nodes()[jj].as_f64(),
                    ),
                });
            }
            xi_matrix.push(v.ln() / jb);
        }
        let mut xi_row_zero = Vec::with_capacity(n);
        for (jj, &v) in self.row_zero.iter().enumerate() {
            if v <= T::zero() || v.is_nan() {
                return Err(KernelError::NonPositiveEntry {
                    value: v.as_f64(),
                    at: (0.0, self.rule.nodes()[jj].as_f64()),
                });
            }
            xi_row_zero.push(v.ln() / jb);
        }
        Ok((xi_matrix, xi_row_zero))
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn rule(&self) -> &Arc<QuadratureRule<T>> {
        &self.rule
    }

    pub fn len(&self) -> usize {
        self.rule.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rule.is_empty()
    }

    /// Node matrix entry `K(t_i, u_j)`.
    pub fn value(&self, i: usize, j: usize) -> T {
        self.matrix[i * self.rule.len() + j]
    }

    /// `K(t_i, .)` over the nodes.
    pub fn row(&self, i: usize) -> &[T] {
        let n = self.rule.len();
        &self.matrix[i * n..(i + 1) * n]
    }

    /// `K(0, .)` over the nodes.
    pub fn row_zero(&self) -> &[T] {
        &self.row_zero
    }

    pub fn matrix(&self) -> &[T] {
        &self.matrix
    }

    /// Evaluates at an arbitrary point; errs for file-backed kernels.
    pub fn eval_at(&self, t: T, u: T) -> Result<T, KernelError> {
        match &self.eval {
            Some(f) => Ok(f(t, u)),
            None => Err(KernelError::MissingEvaluator),
        }
    }

    pub fn has_evaluator(&self) -> bool {
        self.eval.is_some()
    }

    /// Scans for the minimum and maximum: over the dense grid when an
    /// evaluator is available, otherwise over the node matrix and `t = 0`
    /// row.
    pub fn positivity_scan(&self, grid_points: usize) -> PositivityScan {
        match &self.eval {
            Some(eval) => {
                let g: Vec<T> = dense_grid(grid_points);
                let eval = Arc::clone(eval);
                let (min, max, min_at) = g
                    .par_iter()
                    .map(|&t| {
                        let mut mn = T::infinity();
                        let mut mx = T::neg_infinity();
                        let mut at = (T::zero(), T::zero());
                        for &u in &g {
                            let v = eval(t, u);
                            if v < mn {
                                mn = v;
                                at = (t, u);
                            }
                            if v > mx {
                                mx = v;
                            }
                        }
                        (mn, mx, at)
                    })
                    .reduce(
                        || (T::infinity(), T::neg_infinity(), (T::zero(), T::zero())),
                        |a, b| {
                            let (mn, at) = if a.0 <= b.0 { (a.0, a.2) } else { (b.0, b.2) };
                            (mn, a.1.max(b.1), at)
                        },
                    );
                PositivityScan {
                    source: ScanSource::DenseGrid,
                    grid_points,
                    min: min.as_f64(),
                    max: max.as_f64(),
                    min_at: (min_at.0.as_f64(), min_at.1.as_f64()),
                    positive: min > T::zero(),
                }
            }
            None => {
                let n = self.rule.len();
                let mut mn = T::infinity();
                let mut mx = T::neg_infinity();
                let mut at = (T::zero(), T::zero());
                for (pos, &v) in self.matrix.iter().enumerate() {
                    if v < mn {
                        mn = v;
                        let (i, j) = (pos / n, pos % n);
                        at = (self.rule.nodes()[i], self.rule.nodes()[j]);
                    }
                    mx = mx.max(v);
                }
                for (j, &v) in self.row_zero.iter().enumerate() {
                    if v < mn {
                        mn = v;
                        at = (T::zero(), self.rule.nodes()[j]);
                    }
                    mx = mx.max(v);
                }
                PositivityScan {
                    source: ScanSource::NodeMatrix,
                    grid_points: n,
                    min: mn.as_f64(),
                    max: mx.as_f64(),
                    min_at: (at.0.as_f64(), at.1.as_f64()),
                    positive: mn > T::zero(),
                }
            }
        }
    }

    /// Runs and stores a positivity scan.
    pub fn run_scan(&mut self, grid_points: usize) -> &PositivityScan {
        let scan = self.positivity_scan(grid_points);
        self.scan = Some(scan);
        self.scan.as_ref().unwrap()
    }

    pub fn scan(&self) -> Option<&PositivityScan> {
        self.scan.as_ref()
    }

    /// Writes the node matrix as CSV: a header row with the `u` nodes, then
    /// one row per `t` value. The first data row is the stored `t = 0` row.
    pub fn write_matrix_csv<W: Write>(&self, mut out: W) -> Result<(), KernelError> {
        let nodes = self.rule.nodes();
        let mut header = String::from("t\\u");
        for &u in nodes {
            header.push_str(&format!(",{:.16e}", u.as_f64()));
        }
        writeln!(out, "{header}")?;
        let write_row = |t: f64, row: &[T], out: &mut W| -> Result<(), KernelError> {
            let mut line = format!("{t:.16e}");
            for &v in row {
                line.push_str(&format!(",{:.16e}", v.as_f64()));
            }
            writeln!(out, "{line}")?;
            Ok(())
        };
        write_row(0.0, &self.row_zero, &mut out)?;
        for (i, &t) in nodes.iter().enumerate() {
            write_row(t.as_f64(), self.row(i), &mut out)?;
        }
        Ok(())
    }

    /// Reads a kernel matrix written by
    /// [`write_matrix_csv`](Self::write_matrix_csv), producing a file-backed
    /// kernel bound to `rule`.
    pub fn read_matrix_csv<R: BufRead>(
        rule: Arc<QuadratureRule<T>>,
        input: R,
    ) -> Result<Self, KernelError> {
        let n = rule.len();
        let mut lines = input.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or(KernelError::Csv {
                row: 0,
                reason: "empty file".into(),
            })
            .and_then(|(i, l)| l.map(|l| (i, l)).map_err(KernelError::Io))?;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.len() != n + 1 {
            return Err(KernelError::Csv {
                row: 0,
                reason: format!("expected {} columns, got {}", n + 1, cols.len()),
            });
        }
        for (j, col) in cols[1..].iter().enumerate() {
            let u: f64 = col.trim().parse().map_err(|e| KernelError::Csv {
                row: 0,
                reason: format!("bad node: {e}"),
            })?;
            if (u - rule.nodes()[j].as_f64()).abs() > 1e-12 {
                return Err(GridError::NodeMismatch {
                    index: j,
                    delta: (u - rule.nodes()[j].as_f64()).abs(),
                }
                .into());
            }
        }
        let mut row_zero: Option<Vec<T>> = None;
        let mut matrix: Vec<T> = Vec::with_capacity(n * n);
        let mut data_rows = 0usize;
        for (rownum, line) in lines {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let mut parts = trimmed.split(',');
            let t: f64 = parts
                .next()
                .unwrap()
                .trim()
                .parse()
                .map_err(|e| KernelError::Csv {
                    row: rownum,
                    reason: format!("bad t: {e}"),
                })?;
            let values: Vec<T> = parts
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map(T::of)
                        .map_err(|e| KernelError::Csv {
                            row: rownum,
                            reason: e.to_string(),
                        })
                })
                .collect::<Result<_, _>>()?;
            if values.len() != n {
                return Err(KernelError::Csv {
                    row: rownum,
                    reason: format!("expected {} values, got {}", n, values.len()),
                });
            }
            if data_rows == 0 {
                if t != 0.0 {
                    return Err(KernelError::Csv {
                        row: rownum,
                        reason: "first data row must carry t = 0".into(),
                    });
                }
                row_zero = Some(values);
            } else {
                let expected = rule.nodes()[data_rows - 1].as_f64();
                if (t - expected).abs() > 1e-12 {
                    return Err(GridError::NodeMismatch {
                        index: data_rows - 1,
                        delta: (t - expected).abs(),
                    }
                    .into());
                }
                matrix.extend(values);
            }
            data_rows += 1;
        }
        if data_rows != n + 1 {
            return Err(KernelError::Csv {
                row: data_rows,
                reason: format!("expected {} data rows, got {}", n + 1, data_rows),
            });
        }
        Self::from_matrix(KernelFamily::File, rule, matrix, row_zero.unwrap())
    }

    /// Metadata sidecar describing the kernel build.
    pub fn metadata(&self) -> KernelMetadata {
        KernelMetadata {
            family: self.family,
            scheme: self.rule.scheme(),
            nodes: self.rule.len(),
            scan: self.scan.clone(),
        }
    }
}

/// Sidecar JSON accompanying an exported kernel matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelMetadata {
    #[serde(flatten)]
    pub family: KernelFamily,
    pub scheme: Scheme,
    pub nodes: usize,
    pub scan: Option<PositivityScan>,
}

/// Builtin interaction expressions for `generic_xi` kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "xi")]
pub enum XiExpr {
    /// `xi = 0`; the kernel degenerates to the constant 1.
    Zero,
    /// `xi(t,u) = t u`.
    Product,
    /// Random bounded symmetric polynomial
    /// `sum c_pq (t^p u^q + t^q u^p)/2`, `p,q <= 2`, coefficients uniform in
    /// `[-1,1]` drawn from a seeded generator.
    RandomSymmetric { seed: u64 },
}

impl XiExpr {
    /// Materializes the expression as a closure.
    pub fn materialize<T: Scalar>(self) -> Arc<dyn Fn(T, T) -> T + Send + Sync> {
        match self {
            XiExpr::Zero => Arc::new(|_, _| T::zero()),
            XiExpr::Product => Arc::new(|t, u| t * u),
            XiExpr::RandomSymmetric { seed } => {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let coeffs: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
                Arc::new(move |t: T, u: T| {
                    let mut acc = T::zero();
                    let half = T::of(0.5);
                    for p in 0..3usize {
                        for q in 0..3usize {
                            let c = T::of(coeffs[3 * p + q]);
                            let sym =
                                t.powi(p as i32) * u.powi(q as i32)
                                    + t.powi(q as i32) * u.powi(p as i32);
                            acc = acc + c * half * sym;
                        }
                    }
                    acc
                })
            }
        }
    }

    /// Builds the `exp(J beta xi)` kernel on a rule.
    pub fn kernel<T: Scalar>(
        self,
        rule: Arc<QuadratureRule<T>>,
        j: f64,
        beta: f64,
    ) -> Result<Kernel<T>, KernelError> {
        if j == 0.0 {
            return Err(KernelError::ZeroCoupling);
        }
        if beta <= 0.0 || beta.is_nan() {
            return Err(KernelError::InvalidTemperature(beta));
        }
        let jb = T::of(j * beta);
        let xi = self.materialize::<T>();
        let eval = Arc::new(move |t: T, u: T| (jb * xi(t, u)).exp());
        Kernel::from_eval(KernelFamily::GenericXi { j, beta }, rule, eval)
    }
}

/// One catalog listing entry.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub parameters: &'static str,
    pub branching_order: &'static str,
    pub guarantee: &'static str,
}

/// The five constructible families with the guarantee each realizes.
pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "generic_xi",
            parameters: "xi in {zero, product, random_symmetric(seed)}, J != 0, beta > 0",
            branching_order: "any k >= 1",
            guarantee: "no closed form; uniqueness condition decides when no period-2 pair can exist",
        },
        CatalogEntry {
            name: "k2_family",
            parameters: "root order n >= 1 (positivity holds past a scan threshold)",
            branching_order: "k = 2",
            guarantee: "at least two periodic Gibbs measures on the order-2 Cayley tree",
        },
        CatalogEntry {
            name: "k3_family",
            parameters: "none",
            branching_order: "k = 3",
            guarantee: "at least two periodic Gibbs measures on the order-3 Cayley tree",
        },
        CatalogEntry {
            name: "k_ge4_family",
            parameters: "branching order k >= 4",
            branching_order: "k >= 4",
            guarantee: "at least two periodic Gibbs measures on the order-k Cayley tree",
        },
        CatalogEntry {
            name: "four_cycle_family",
            parameters: "branching order k >= 2 (positive past the scanned threshold k0)",
            branching_order: "k >= k0",
            guarantee: "at least four periodic Gibbs measures on the order-k Cayley tree",
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn rule(n: usize) -> Arc<QuadratureRule<f64>> {
        QuadratureRule::gauss(n).unwrap()
    }

    #[test]
    fn zero_interaction_gives_constant_one() {
        let k = XiExpr::Zero.kernel::<f64>(rule(16), 1.0, 1.0).unwrap();
        assert!(k.matrix().iter().all(|&v| v == 1.0));
        assert!(k.row_zero().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn product_interaction_hits_e_at_the_corner() {
        let k = XiExpr::Product.kernel::<f64>(rule(16), 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            k.eval_at(1.0, 1.0).unwrap(),
            std::f64::consts::E,
            epsilon = 1e-12
        );
    }

    #[test]
    fn zero_coupling_is_rejected() {
        assert!(matches!(
            XiExpr::Product.kernel::<f64>(rule(8), 0.0, 1.0),
            Err(KernelError::ZeroCoupling)
        ));
        assert!(matches!(
            XiExpr::Product.kernel::<f64>(rule(8), 1.0, -2.0),
            Err(KernelError::InvalidTemperature(_))
        ));
    }

    #[test]
    fn xi_round_trip_through_log() {
        let r = rule(12);
        let k = XiExpr::RandomSymmetric { seed: 42 }
            .kernel::<f64>(Arc::clone(&r), 2.0, 0.5)
            .unwrap();
        let (xi_m, xi_0) = k.to_xi(2.0, 0.5).unwrap();
        let back = Kernel::from_xi_grid(Arc::clone(&r), &xi_m, &xi_0, 2.0, 0.5).unwrap();
        for (a, b) in k.matrix().iter().zip(back.matrix()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        for (a, b) in k.row_zero().iter().zip(back.row_zero()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn to_xi_rejects_nonpositive_kernels() {
        let r = rule(4);
        let mut m = vec![1.0; 16];
        m[5] = -0.25;
        let k = Kernel::from_matrix(KernelFamily::File, Arc::clone(&r), m, vec![1.0; 4]).unwrap();
        assert!(matches!(
            k.to_xi(1.0, 1.0),
            Err(KernelError::NonPositiveEntry { .. })
        ));
    }

    #[test]
    fn non_finite_interactions_are_rejected() {
        let r = rule(4);
        let mut xi = vec![0.0; 16];
        xi[3] = f64::NAN;
        assert!(matches!(
            Kernel::from_xi_grid(Arc::clone(&r), &xi, &[0.0; 4], 1.0, 1.0),
            Err(KernelError::NonFinite { .. })
        ));
    }

    #[test]
    fn dense_scan_monotone_product_kernel() {
        let k = XiExpr::Product.kernel::<f64>(rule(16), 1.0, 1.0).unwrap();
        let scan = k.positivity_scan(101);
        assert!(scan.positive);
        assert_abs_diff_eq!(scan.min, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(scan.max, std::f64::consts::E, epsilon = 1e-12);
    }

    #[test]
    fn matrix_csv_round_trip_and_file_restrictions() {
        let r = rule(8);
        let k = XiExpr::Product.kernel::<f64>(Arc::clone(&r), 1.0, 1.0).unwrap();
        let mut buf = Vec::new();
        k.write_matrix_csv(&mut buf).unwrap();
        let back = Kernel::read_matrix_csv(Arc::clone(&r), buf.as_slice()).unwrap();
        assert_eq!(back.family(), KernelFamily::File);
        for (a, b) in k.matrix().iter().zip(back.matrix()) {
            assert_eq!(a, b);
        }
        for (a, b) in k.row_zero().iter().zip(back.row_zero()) {
            assert_eq!(a, b);
        }
        assert!(matches!(
            back.eval_at(0.3, 0.3),
            Err(KernelError::MissingEvaluator)
        ));
        let scan = back.positivity_scan(101);
        assert_eq!(scan.source, ScanSource::NodeMatrix);
    }

    #[test]
    fn catalog_lists_exactly_five_families() {
        let entries = catalog();
        assert_eq!(entries.len(), 5);
        let k3 = entries.iter().find(|e| e.name == "k3_family").unwrap();
        assert!(k3
            .guarantee
            .contains("at least two periodic Gibbs measures"));
        let four = entries
            .iter()
            .find(|e| e.name == "four_cycle_family")
            .unwrap();
        assert!(four
            .guarantee
            .contains("at least four periodic Gibbs measures"));
    }

    proptest! {
        #[test]
        fn generic_xi_kernels_are_positive(seed in 0u64..500) {
            let k = XiExpr::RandomSymmetric { seed }
                .kernel::<f64>(rule(8), 1.0, 1.0)
                .unwrap();
            prop_assert!(k.matrix().iter().all(|&v| v > 0.0));
            let scan = k.positivity_scan(51);
            prop_assert!(scan.positive);
        }
    }
}
