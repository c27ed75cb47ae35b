//! Exact-arithmetic engine for real surfaces in complex 2-space carrying a
//! parabolic complex tangent: the pair of holomorphic involutions attached
//! to such a surface, the unique normalized formal transformation
//! conjugating that pair to its linear models, the Bernoulli difference
//! operator together with the linearized equation it inverts, and a
//! divergence certificate for a canonical family of perturbations computed
//! by two independent routes and cross-checked coefficient by coefficient.
//!
//! All coefficient arithmetic is exact over the Gaussian rationals; floating
//! point appears only in reports (root estimates, slope fits, timings).
//! Layers, bottom up:
//!
//! * [`scalar`] — exact complex-rational scalars and the Bernoulli
//!   coefficient table.
//! * [`series`] — dense truncated bivariate power series over those scalars.
//! * [`germ`] — two-component map germs: composition, inversion, implicit
//!   solves, divided differences.
//! * [`linsolve`] — exact Gauss-Jordan elimination.
//! * [`surface`] — defining coefficient families, structural validation,
//!   generators, and the coefficient-root metric.
//! * [`involution`] — the involution pair of a surface and its
//!   certification.
//! * [`normalform`] — the unique normalized conjugating transform, the
//!   triangularity audit, and the staged perturbation search.
//! * [`linearized`] — the Bernoulli operator, the difference equation,
//!   closed-form coefficient families, and the divergence certificate.
//! * [`report`], [`config`] — machine-readable outputs and run
//!   configuration.

pub mod config;
pub mod error;
pub mod germ;
pub mod involution;
pub mod linearized;
pub mod linsolve;
pub mod normalform;
pub mod report;
pub mod scalar;
pub mod series;
pub mod surface;
