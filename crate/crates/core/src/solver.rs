//! Multistart fixed-point search for period-2 pairs, deduplication and
//! classification of what it finds, and residual verification of the
//! catalog's closed forms.
//!
//! The iteration runs in recursion form, `f <- (1-theta) f + theta A_k(A_k f)`,
//! which renormalizes every step and so cannot drift in scale. Converged
//! candidates are converted through the root and rescale maps and verified
//! as plain Hammerstein 2-cycles before they are reported; a candidate
//! whose converted residuals exceed the verification tolerance is a failed
//! start, not a solution. Absence from the result is never a non-existence
//! claim — only the uniqueness condition can assert that.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::grid::{GridError, GridFunction, QuadratureRule, Scheme};
use crate::kernels::{
    four_cycle_closed_forms, four_cycle_kernel, k2_closed_forms, k2_kernel, k3_closed_forms,
    k3_kernel, k_ge4_closed_forms, k_ge4_kernel, Kernel, KernelError, KernelFamily, MomentSystem,
};
use crate::operators::{apply_a, cycle_residual, CyclePair, OperatorError};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("family {0} has no closed-form catalog entries")]
    NoCatalog(String),
}

/// Solver settings; the defaults match the reporting conventions used
/// throughout the crate.
#[derive(Debug, Clone)]
pub struct SolverConfig<T> {
    pub k: u32,
    pub max_iterations: usize,
    /// Convergence threshold on the successive sup-distance.
    pub tolerance: T,
    /// Damping factor in `(0, 1]`; 1 is the undamped map. Oscillation
    /// detection drops it to 0.5 automatically.
    pub damping: T,
    /// Number of seeded random positive starts.
    pub random_starts: usize,
    /// Relative perturbation applied to the extra noisy copies of catalog
    /// starts.
    pub perturbation: T,
    /// Include the catalog closed forms as starts when the kernel family
    /// has them.
    pub include_catalog: bool,
    /// Pairs closer than this (and members of a pair) are considered equal.
    pub dedup_radius: T,
    /// Residual bound a converted candidate must meet to be reported.
    pub verify_tolerance: T,
    pub seed: u64,
}

impl<T: Scalar> SolverConfig<T> {
    pub fn new(k: u32) -> Self {
        Self {
            k,
            max_iterations: 2000,
            tolerance: T::of(1e-10),
            damping: T::one(),
            random_starts: 8,
            perturbation: T::of(0.01),
            include_catalog: true,
            dedup_radius: T::of(1e-4),
            verify_tolerance: T::of(1e-6),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.k < 1 {
            return Err(SolverError::InvalidConfig("k must be positive".into()));
        }
        if self.tolerance <= T::zero() || self.tolerance.is_nan() {
            return Err(SolverError::InvalidConfig(
                "tolerance must be positive".into(),
            ));
        }
        if self.damping <= T::zero() || self.damping > T::one() || self.damping.is_nan() {
            return Err(SolverError::InvalidConfig(
                "damping must lie in (0, 1]".into(),
            ));
        }
        if self.dedup_radius <= self.tolerance || self.dedup_radius.is_nan() {
            return Err(SolverError::InvalidConfig(
                "dedup radius must exceed the convergence tolerance".into(),
            ));
        }
        Ok(())
    }
}

/// Why a start produced no reported pair.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum StartFailure {
    /// No convergence within the iteration budget.
    MaxIterations { last_delta: f64 },
    /// The normalization functional lost positivity.
    NonPositiveIntermediate { iteration: usize },
    /// An iterate stopped being finite.
    NonFinite { iteration: usize },
    /// Converged, but the converted Hammerstein residuals are too large.
    Unverified { residual: f64 },
    /// The start itself was unusable.
    BadStart { message: String },
}

/// Fixed point (`f = g` within the dedup radius) or genuine 2-cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairClass {
    FixedPoint,
    TwoCycle,
}

/// One verified, deduplicated solution.
#[derive(Debug, Clone)]
pub struct SolvedPair<T> {
    /// Recursion-form pair, canonically oriented, with converted
    /// Hammerstein residuals stored.
    pub pair: CyclePair<T>,
    pub class: PairClass,
    pub iterations: usize,
    pub start_label: String,
    pub separation: T,
}

/// Outcome of a multistart run.
#[derive(Debug)]
pub struct SolveResult<T> {
    pub pairs: Vec<SolvedPair<T>>,
    pub failures: Vec<(String, StartFailure)>,
    pub start_count: usize,
}

/// One fixed-point iteration run from `f0`. Returns the recursion-form pair
/// with converted residuals and the iteration count.
pub fn iterate_pair<T: Scalar>(
    kernel: &Kernel<T>,
    f0: &GridFunction<T>,
    config: &SolverConfig<T>,
) -> Result<(CyclePair<T>, usize), StartFailure> {
    if f0.require_strictly_positive().is_err() {
        return Err(StartFailure::BadStart {
            message: "start is not strictly positive".into(),
        });
    }
    let k = config.k;
    let step = |f: &GridFunction<T>, it: usize| -> Result<GridFunction<T>, StartFailure> {
        let once = apply_a(kernel, f, k).map_err(|e| classify(e, it))?;
        let twice = apply_a(kernel, &once, k).map_err(|e| classify(e, it))?;
        if !twice.all_finite() {
            return Err(StartFailure::NonFinite { iteration: it });
        }
        Ok(twice)
    };

    let mut theta = config.damping;
    let mut f = f0.clone();
    let mut prev_diff: Option<GridFunction<T>> = None;
    let mut oscillations = 0usize;
    let mut last_delta = T::infinity();
    for it in 0..config.max_iterations {
        let mapped = step(&f, it)?;
        let next = if theta == T::one() {
            mapped
        } else {
            f.zip_map(&mapped, |a, b| (T::one() - theta) * a + theta * b)
                .expect("same rule")
        };
        let diff = next.zip_map(&f, |a, b| a - b).expect("same rule");
        last_delta = diff.sup_norm();
        if last_delta < config.tolerance {
            // One clean (undamped) step pins the value at t = 0 to exactly
            // 1 before the pair is assembled.
            let f_final = step(&next, it)?;
            let g_final = apply_a(kernel, &f_final, k).map_err(|e| classify(e, it))?;
            let mut pair =
                CyclePair::new_a_form(f_final, g_final, k).map_err(|e| StartFailure::BadStart {
                    message: e.to_string(),
                })?;
            cycle_residual(kernel, &mut pair).map_err(|e| StartFailure::BadStart {
                message: e.to_string(),
            })?;
            return Ok((pair, it + 1));
        }
        // Sign-alternating successive differences signal oscillation; relax
        // the damping once.
        if let Some(prev) = &prev_diff {
            let dot = diff
                .values()
                .iter()
                .zip(prev.values())
                .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
            if dot < T::zero() {
                oscillations += 1;
                if oscillations >= 3 && theta == T::one() {
                    theta = T::of(0.5);
                    oscillations = 0;
                }
            } else {
                oscillations = 0;
            }
        }
        prev_diff = Some(diff);
        f = next;
    }
    Err(StartFailure::MaxIterations {
        last_delta: last_delta.as_f64(),
    })
}

fn classify(e: OperatorError, iteration: usize) -> StartFailure {
    match e {
        OperatorError::NonPositiveOmega(_) | OperatorError::NotPositive { .. } => {
            StartFailure::NonPositiveIntermediate { iteration }
        }
        other => StartFailure::BadStart {
            message: other.to_string(),
        },
    }
}

/// A closed-form pair `(f, g)` and the branching order it solves.
pub type CatalogPair<T> = (GridFunction<T>, GridFunction<T>, u32);

/// The catalog closed forms for the kernel's family on its own rule, in
/// plain Hammerstein form, paired with the order they solve.
pub fn catalog_pairs<T: Scalar>(kernel: &Kernel<T>) -> Option<Vec<CatalogPair<T>>> {
    let rule = kernel.rule();
    match kernel.family() {
        KernelFamily::K2 { n } => {
            let (f, g) = k2_closed_forms(rule, n);
            Some(vec![(f, g, 2)])
        }
        KernelFamily::K3 => {
            let (f, g) = k3_closed_forms(rule);
            Some(vec![(f, g, 3)])
        }
        KernelFamily::KGe4 { k } => {
            let (f, g) = k_ge4_closed_forms(rule, k);
            Some(vec![(f, g, k)])
        }
        KernelFamily::FourCycle { k } => {
            let pairs = four_cycle_closed_forms(rule, k);
            Some(pairs.into_iter().map(|(f, g)| (f, g, k)).collect())
        }
        KernelFamily::GenericXi { .. } | KernelFamily::File => None,
    }
}

/// Recursion-form start derived from a Hammerstein-form function:
/// `(f / f(0))^k`.
fn a_form_start<T: Scalar>(f: &GridFunction<T>, k: u32) -> Option<GridFunction<T>> {
    let f0 = f.at_zero()?;
    if f0 <= T::zero() || f0.is_nan() {
        return None;
    }
    Some(f.map(|v| (v / f0).powi(k as i32)).with_at_zero(T::one()))
}

fn random_positive<T: Scalar>(
    rule: &Arc<QuadratureRule<T>>,
    rng: &mut ChaCha8Rng,
) -> GridFunction<T> {
    let coeffs: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    GridFunction::from_fn(Arc::clone(rule), move |t: T| {
        let mut acc = T::zero();
        for j in 0..3usize {
            let freq = T::of(f64::from(j as u32 + 1)) * T::PI();
            let damp = T::of(1.0 / f64::from(j as u32 + 1));
            acc = acc
                + damp
                    * (T::of(coeffs[2 * j]) * (freq * t).cos()
                        + T::of(coeffs[2 * j + 1]) * (freq * t).sin());
        }
        acc.exp()
    })
}

fn perturbed<T: Scalar>(
    f: &GridFunction<T>,
    relative: T,
    rng: &mut ChaCha8Rng,
) -> GridFunction<T> {
    let noise: Vec<f64> = (0..f.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let values: Vec<T> = f
        .values()
        .iter()
        .zip(&noise)
        .map(|(&v, &n)| v * (T::one() + relative * T::of(n)))
        .collect();
    let mut out = GridFunction::from_values(Arc::clone(f.rule()), values).expect("same rule");
    if let Some(z) = f.at_zero() {
        out = out.with_at_zero(z);
    }
    out
}

/// Assembles the start set: the constant 1, the catalog closed forms in
/// both orientations (exact and noisily perturbed), and seeded random
/// positive functions.
fn build_starts<T: Scalar>(
    kernel: &Kernel<T>,
    config: &SolverConfig<T>,
) -> Vec<(String, GridFunction<T>)> {
    let rule = kernel.rule();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut starts: Vec<(String, GridFunction<T>)> = Vec::new();
    starts.push((
        "constant_one".into(),
        GridFunction::constant(Arc::clone(rule), T::one()),
    ));
    if config.include_catalog {
        if let Some(pairs) = catalog_pairs(kernel) {
            for (idx, (f, g, pair_k)) in pairs.iter().enumerate() {
                if *pair_k != config.k {
                    continue;
                }
                for (side, fun) in [("f", f), ("g", g)] {
                    if let Some(start) = a_form_start(fun, config.k) {
                        let noisy = perturbed(&start, config.perturbation, &mut rng);
                        starts.push((format!("catalog_{idx}_{side}"), start));
                        starts.push((format!("catalog_{idx}_{side}_perturbed"), noisy));
                    }
                }
            }
        }
    }
    for i in 0..config.random_starts {
        starts.push((format!("random_{i}"), random_positive(rule, &mut rng)));
    }
    starts
}

/// Runs the multistart search: iterate every start, verify converged
/// candidates through the conversion chain, deduplicate up to swap, and
/// classify. Deterministic for a fixed config and seed.
pub fn find_cycles<T: Scalar>(
    kernel: &Kernel<T>,
    config: &SolverConfig<T>,
) -> Result<SolveResult<T>, SolverError> {
    config.validate()?;
    let starts = build_starts(kernel, config);
    let start_count = starts.len();

    type Outcome<T> = (String, Result<(CyclePair<T>, usize), StartFailure>);
    let outcomes: Vec<Outcome<T>> = starts
        .into_par_iter()
        .map(|(label, f0)| {
            let outcome = iterate_pair(kernel, &f0, config);
            (label, outcome)
        })
        .collect();

    let mut pairs: Vec<SolvedPair<T>> = Vec::new();
    let mut failures: Vec<(String, StartFailure)> = Vec::new();
    for (label, outcome) in outcomes {
        let (mut pair, iterations) = match outcome {
            Ok(v) => v,
            Err(f) => {
                failures.push((label, f));
                continue;
            }
        };
        let (r1, r2) = pair.residuals.expect("iterate_pair stores residuals");
        let worst = r1.max(r2);
        if worst > config.verify_tolerance {
            failures.push((label, StartFailure::Unverified {
                residual: worst.as_f64(),
            }));
            continue;
        }
        pair.canonicalize();
        let separation = pair.separation()?;
        let duplicate = pairs.iter().any(|existing| {
            let df = existing.pair.f.sup_distance(&pair.f).unwrap_or(T::infinity());
            let dg = existing.pair.g.sup_distance(&pair.g).unwrap_or(T::infinity());
            df.max(dg) < config.dedup_radius
        });
        if duplicate {
            continue;
        }
        let class = if separation < config.dedup_radius {
            PairClass::FixedPoint
        } else {
            PairClass::TwoCycle
        };
        pairs.push(SolvedPair {
            pair,
            class,
            iterations,
            start_label: label,
            separation,
        });
    }
    Ok(SolveResult {
        pairs,
        failures,
        start_count,
    })
}

/// Residuals of one closed-form pair at a given resolution.
#[derive(Debug, Clone, Serialize)]
pub struct PairVerification {
    pub label: String,
    pub k: u32,
    pub residuals: (f64, f64),
    pub residuals_doubled: (f64, f64),
    pub pass: bool,
}

/// Verification report for a catalog family: residuals of every closed
/// form at `n` nodes and at `2n` nodes.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub family: String,
    pub nodes: usize,
    pub tolerance: f64,
    pub entries: Vec<PairVerification>,
    pub pass: bool,
}

/// The quadrature scheme a catalog family should be verified on. The
/// signed-root family has a midline cusp, so it gets the split rule; the
/// others are smooth and take plain Gauss.
pub fn preferred_scheme(family: &KernelFamily) -> Scheme {
    match family {
        KernelFamily::K2 { .. } => Scheme::GaussLegendreSplit,
        _ => Scheme::GaussLegendre,
    }
}

/// Builds the catalog kernel for `family` on a fresh rule with `nodes`
/// nodes of its preferred scheme.
pub fn build_catalog_kernel<T: Scalar>(
    family: &KernelFamily,
    nodes: usize,
) -> Result<Kernel<T>, SolverError> {
    let rule = QuadratureRule::<T>::build(preferred_scheme(family), nodes)?;
    match family {
        KernelFamily::K2 { n } => Ok(k2_kernel(rule, *n)?),
        KernelFamily::K3 => Ok(k3_kernel(rule)?),
        KernelFamily::KGe4 { k } => Ok(k_ge4_kernel(rule, *k)?),
        KernelFamily::FourCycle { k } => {
            let system = MomentSystem::solve()?;
            Ok(four_cycle_kernel(rule, *k, &system)?)
        }
        other => Err(SolverError::NoCatalog(other.name().into())),
    }
}

/// Verifies the closed-form pairs of a catalog family at two quadrature
/// resolutions (`nodes` and `2 nodes`). `pass` requires every residual at
/// the base resolution to stay below `tolerance`.
pub fn verify_catalog<T: Scalar>(
    family: &KernelFamily,
    nodes: usize,
    tolerance: f64,
) -> Result<VerificationReport, SolverError> {
    let kernel = build_catalog_kernel::<T>(family, nodes)?;
    let kernel2 = build_catalog_kernel::<T>(family, nodes * 2)?;
    let base = catalog_pairs(&kernel).ok_or_else(|| SolverError::NoCatalog(family.name().into()))?;
    let doubled = catalog_pairs(&kernel2).expect("same family has the same catalog");

    let mut entries = Vec::new();
    for ((f, g, k), (f2, g2, _)) in base.into_iter().zip(doubled) {
        let label = f.tag().unwrap_or("pair").to_string();
        let mut pair = CyclePair::new_hammerstein(f, g, k);
        let (r1, r2) = cycle_residual(&kernel, &mut pair)?;
        let mut pair2 = CyclePair::new_hammerstein(f2, g2, k);
        let (d1, d2) = cycle_residual(&kernel2, &mut pair2)?;
        let pass = r1.as_f64() < tolerance && r2.as_f64() < tolerance;
        entries.push(PairVerification {
            label,
            k,
            residuals: (r1.as_f64(), r2.as_f64()),
            residuals_doubled: (d1.as_f64(), d2.as_f64()),
            pass,
        });
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(VerificationReport {
        family: family.name().into(),
        nodes,
        tolerance,
        entries,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::XiExpr;
    use crate::operators::PairForm;

    fn constant_kernel(rule: &Arc<QuadratureRule<f64>>, c: f64) -> Kernel<f64> {
        let n = rule.len();
        Kernel::from_matrix(
            KernelFamily::File,
            Arc::clone(rule),
            vec![c; n * n],
            vec![c; n],
        )
        .unwrap()
    }

    #[test]
    fn constant_kernel_collapses_every_start_to_one() {
        let rule = QuadratureRule::<f64>::gauss(48).unwrap();
        let kernel = constant_kernel(&rule, 1.0);
        for k in [1u32, 2, 5] {
            let config = SolverConfig::new(k).with_seed(3);
            let f0 = GridFunction::from_fn(Arc::clone(&rule), |t| 0.5 + t * t);
            let (pair, iterations) = iterate_pair(&kernel, &f0, &config).unwrap();
            assert!(iterations <= 2, "took {iterations} iterations");
            assert_eq!(pair.form, PairForm::AForm);
            let one = GridFunction::constant(Arc::clone(&rule), 1.0);
            assert!(pair.f.sup_distance(&one).unwrap() < 1e-12);
            assert!(pair.g.sup_distance(&one).unwrap() < 1e-12);
        }
    }

    #[test]
    fn nonpositive_start_is_rejected() {
        let rule = QuadratureRule::<f64>::gauss(16).unwrap();
        let kernel = constant_kernel(&rule, 1.0);
        let config = SolverConfig::new(2);
        let f0 = GridFunction::constant(Arc::clone(&rule), -1.0);
        assert!(matches!(
            iterate_pair(&kernel, &f0, &config),
            Err(StartFailure::BadStart { .. })
        ));
    }

    #[test]
    fn config_validation_catches_bad_fields() {
        let mut config = SolverConfig::<f64>::new(2);
        config.damping = 1.5;
        assert!(config.validate().is_err());
        let mut config = SolverConfig::<f64>::new(2);
        config.dedup_radius = 1e-12;
        assert!(config.validate().is_err());
    }

    #[test]
    fn trig_family_search_finds_its_cycle_from_perturbed_starts() {
        let kernel = build_catalog_kernel::<f64>(&KernelFamily::K3, 200).unwrap();
        let mut config = SolverConfig::new(3).with_seed(7);
        config.random_starts = 2;
        let result = find_cycles(&kernel, &config).unwrap();
        let cycles: Vec<_> = result
            .pairs
            .iter()
            .filter(|p| p.class == PairClass::TwoCycle)
            .collect();
        assert!(!cycles.is_empty(), "no 2-cycle found");
        // The reported cycle matches the catalog closed form in recursion
        // form (canonical orientation puts the constant side first when it
        // has the smaller first-node value).
        let (f, g, _) = catalog_pairs(&kernel).unwrap().remove(0);
        let f0 = f.at_zero().unwrap();
        let catalog_a = f.map(|v| (v / f0).powi(3));
        let g0 = g.at_zero().unwrap();
        let catalog_b = g.map(|v| (v / g0).powi(3));
        let found = cycles[0];
        let direct = found.pair.f.sup_distance(&catalog_a).unwrap().max(
            found.pair.g.sup_distance(&catalog_b).unwrap(),
        );
        let swapped = found.pair.f.sup_distance(&catalog_b).unwrap().max(
            found.pair.g.sup_distance(&catalog_a).unwrap(),
        );
        assert!(
            direct.min(swapped) < 1e-6,
            "found cycle differs from catalog: {:.3e}",
            direct.min(swapped)
        );
    }

    #[test]
    fn swapped_catalog_starts_deduplicate_to_one_cycle() {
        let kernel = build_catalog_kernel::<f64>(&KernelFamily::KGe4 { k: 4 }, 150).unwrap();
        let mut config = SolverConfig::new(4).with_seed(1);
        config.random_starts = 0;
        let result = find_cycles(&kernel, &config).unwrap();
        let cycles: Vec<_> = result
            .pairs
            .iter()
            .filter(|p| p.class == PairClass::TwoCycle)
            .collect();
        assert_eq!(cycles.len(), 1, "swap orientations must deduplicate");
    }

    #[test]
    fn signed_root_family_search_finds_the_catalog_cycle() {
        let kernel = build_catalog_kernel::<f64>(&KernelFamily::K2 { n: 2 }, 150).unwrap();
        let mut config = SolverConfig::new(2).with_seed(4);
        config.random_starts = 1;
        let result = find_cycles(&kernel, &config).unwrap();
        let (f, g, _) = catalog_pairs(&kernel).unwrap().remove(0);
        let f0 = f.at_zero().unwrap();
        let catalog_a = f.map(|v| (v / f0).powi(2));
        let g0 = g.at_zero().unwrap();
        let catalog_b = g.map(|v| (v / g0).powi(2));
        let hit = result
            .pairs
            .iter()
            .filter(|p| p.class == PairClass::TwoCycle)
            .any(|p| {
                let direct = p
                    .pair
                    .f
                    .sup_distance(&catalog_a)
                    .unwrap()
                    .max(p.pair.g.sup_distance(&catalog_b).unwrap());
                let swapped = p
                    .pair
                    .f
                    .sup_distance(&catalog_b)
                    .unwrap()
                    .max(p.pair.g.sup_distance(&catalog_a).unwrap());
                direct.min(swapped) < 1e-6
            });
        assert!(hit, "catalog cycle not found: {:?}", result.pairs.len());
    }

    #[test]
    fn moment_family_at_its_threshold_reports_constant_and_both_cycles() {
        let kernel =
            build_catalog_kernel::<f64>(&KernelFamily::FourCycle { k: 100 }, 200).unwrap();
        let mut config = SolverConfig::new(100).with_seed(11);
        config.random_starts = 1;
        let result = find_cycles(&kernel, &config).unwrap();
        let cycles = result
            .pairs
            .iter()
            .filter(|p| p.class == PairClass::TwoCycle)
            .count();
        assert!(cycles >= 2, "expected both closed cycles, got {cycles}");
        let one = GridFunction::constant(Arc::clone(kernel.rule()), 1.0);
        let constant_found = result
            .pairs
            .iter()
            .filter(|p| p.class == PairClass::FixedPoint)
            .any(|p| p.pair.f.sup_distance(&one).unwrap() < 1e-6);
        assert!(constant_found, "constant fixed point missing");
    }

    #[test]
    fn determinism_same_seed_same_result() {
        let kernel = XiExpr::RandomSymmetric { seed: 5 }
            .kernel::<f64>(QuadratureRule::gauss(48).unwrap(), 1.0, 1.0)
            .unwrap();
        let mut config = SolverConfig::new(2).with_seed(99);
        config.random_starts = 4;
        let a = find_cycles(&kernel, &config).unwrap();
        let b = find_cycles(&kernel, &config).unwrap();
        assert_eq!(a.pairs.len(), b.pairs.len());
        assert_eq!(a.failures.len(), b.failures.len());
        for (pa, pb) in a.pairs.iter().zip(&b.pairs) {
            assert_eq!(pa.start_label, pb.start_label);
            assert_eq!(pa.iterations, pb.iterations);
            assert_eq!(pa.pair.f.sup_distance(&pb.pair.f).unwrap(), 0.0);
            assert_eq!(pa.pair.g.sup_distance(&pb.pair.g).unwrap(), 0.0);
        }
    }

    #[test]
    fn kernels_certified_cycle_free_yield_only_fixed_points() {
        // Cross-module consistency with the uniqueness condition: when the
        // verdict guarantees no period-2 pair, the search must not produce
        // one.
        use crate::analysis::{uniqueness_condition, Verdict};
        let rule = QuadratureRule::<f64>::gauss(96).unwrap();
        let kernel = XiExpr::Product
            .kernel::<f64>(Arc::clone(&rule), 0.01, 1.0)
            .unwrap();
        let report = uniqueness_condition(&kernel, 2, 501).unwrap();
        assert_eq!(report.verdict, Verdict::NoPeriod2Guaranteed);
        let mut config = SolverConfig::new(2).with_seed(21);
        config.random_starts = 4;
        let result = find_cycles(&kernel, &config).unwrap();
        assert!(!result.pairs.is_empty());
        for pair in &result.pairs {
            assert_eq!(pair.class, PairClass::FixedPoint);
        }
    }

    #[test]
    fn order_one_random_kernels_produce_only_fixed_points() {
        // Small in-module version; the acceptance suite runs 50 kernels.
        let rule = QuadratureRule::<f64>::gauss(96).unwrap();
        for seed in 0..5u64 {
            let kernel = XiExpr::RandomSymmetric { seed }
                .kernel::<f64>(Arc::clone(&rule), 1.0, 1.0)
                .unwrap();
            let mut config = SolverConfig::new(1).with_seed(seed);
            config.random_starts = 3;
            let result = find_cycles(&kernel, &config).unwrap();
            assert!(!result.pairs.is_empty());
            for pair in &result.pairs {
                assert_eq!(pair.class, PairClass::FixedPoint);
                assert!(pair.separation < 1e-6);
            }
        }
    }

    #[test]
    fn verify_catalog_reports_small_residuals_for_the_rational_family() {
        let report = verify_catalog::<f64>(&KernelFamily::KGe4 { k: 4 }, 100, 1e-6).unwrap();
        assert!(report.pass);
        for entry in &report.entries {
            assert!(entry.residuals.0 < 1e-6 && entry.residuals.1 < 1e-6);
            // Residuals shrink with resolution or sit below the floor.
            let floor = 1e-10;
            assert!(
                entry.residuals_doubled.0 <= entry.residuals.0 || entry.residuals_doubled.0 < floor
            );
            assert!(
                entry.residuals_doubled.1 <= entry.residuals.1 || entry.residuals_doubled.1 < floor
            );
        }
    }

    #[test]
    fn verify_catalog_rejects_families_without_closed_forms() {
        assert!(matches!(
            verify_catalog::<f64>(&KernelFamily::File, 50, 1e-6),
            Err(SolverError::NoCatalog(_))
        ));
    }
}
