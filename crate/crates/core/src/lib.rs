//! Numerical machinery for period-2 boundary laws of nearest-neighbor spin
//! models with spin space `[0,1]` on Cayley trees.
//!
//! A model is described by a positive kernel `K(t,u) = exp(J beta xi(t,u))`
//! on the unit square. Period-2 boundary laws are pairs `(f, g)` of positive
//! functions exchanged by the normalized recursion operator, or equivalently
//! 2-cycles of the Hammerstein operator
//!
//! ```text
//! (H_k f)(t) = int_0^1 K(t,u) f^k(u) du
//! ```
//!
//! where `k` is the branching order of the tree. This crate provides
//!
//! * quadrature rules and grid-sampled functions ([`grid`]),
//! * a catalog of kernel families with closed-form 2-cycles ([`kernels`]),
//! * the recursion/Hammerstein operators and the normalization maps
//!   connecting their solution sets ([`operators`]),
//! * quantitative checks: kernel extremes, the uniqueness condition ruling
//!   out 2-cycles, a-priori solution bands, sign-change tests ([`analysis`]),
//! * a deterministic multistart fixed-point solver and residual verification
//!   of the catalog's closed forms ([`solver`]).
//!
//! Core numerics are generic over the floating-point scalar via
//! [`Scalar`]; `f64` aliases are exported at the crate root.

pub mod analysis;
pub mod grid;
pub mod kernels;
pub mod operators;
pub mod scalar;
pub mod solver;

pub use scalar::Scalar;

/// Default scalar type used by the command-line tools and reports.
pub type Real = f64;

/// `f64` quadrature rule.
pub type Rule = grid::QuadratureRule<Real>;
/// `f64` grid-sampled function.
pub type Function = grid::GridFunction<Real>;
/// `f64` kernel.
pub type Kernel = kernels::Kernel<Real>;
/// `f64` candidate 2-cycle.
pub type CyclePair = operators::CyclePair<Real>;

/// Side length of the dense evaluation grid used for positivity scans and
/// kernel extremes (equispaced on `[0,1]`, endpoints included).
pub const DENSE_SCAN_POINTS: usize = 1001;
