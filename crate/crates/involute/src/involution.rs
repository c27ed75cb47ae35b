//! Construction and certification of the involution pair attached to a
//! surface, together with the derived composition data used downstream.
//!
//! In the complexified coordinates `(z, w)` the first involution is defined
//! implicitly: its first component `z'` solves
//!
//! ```text
//! z' = -z - 2w + D[r_w](z', z; w)
//! ```
//!
//! where `r_w` is the derivative of the surface polynomial in its second
//! slot and `D` is the two-point divided difference in the first slot. The
//! equation is solved degree by degree as a fixed point. Everything is then
//! transported to the real model coordinates `(x, y) = (z + w, z - w)`,
//! where the second involution is the conjugate-reflected copy of the first
//! and the pair is certified against the exact identities it must satisfy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::germ::{divided_difference, implicit_solve, map_compose, MapGerm};
use crate::scalar::GaussRational;
use crate::series::{Series2, VARS_XY, VARS_ZW};
use crate::surface::Surface;

fn c(n: i64) -> GaussRational {
    GaussRational::from_int(n)
}

fn half(n: i64) -> GaussRational {
    GaussRational::from_ratio(n, 2)
}

/// First involution in `(z, w)` coordinates: `(z, w) -> (z', w)` with `z'`
/// solving the implicit equation. The fixed-point solver asserts
/// stabilization, which is exactly the statement that `z'` satisfies the
/// equation to the requested degree.
pub fn tau1_zw(surface: &Surface, n: usize) -> Result<MapGerm> {
    // A surface monomial of degree m first appears in the solved component
    // at degree m - 2 (the divided difference of the derivative drops one
    // degree, the division by the fixed-direction form another), so the
    // component through degree n needs the exact polynomial through degree
    // n + 2. The surface polynomial is exact, so extending is lossless.
    let r = surface.to_series_trunc(("s", "w"), n + 2);
    let r_w = r.d_second();
    let mut linear = Series2::zero(n, VARS_ZW);
    linear.set(1, 0, c(-1));
    linear.set(0, 1, c(-2));
    let z = Series2::var_first(n, VARS_ZW);
    let solved = implicit_solve(&linear, |cur| divided_difference(&r_w, cur, &z))?;
    Ok(MapGerm::new(solved, Series2::var_second(n, VARS_ZW)))
}

/// The nonlinear deviation `q = z' + z + 2w` of the first involution in
/// `(z, w)` coordinates.
pub fn q_deviation_zw(tau1_zw: &MapGerm) -> Series2 {
    let n = tau1_zw.trunc();
    let mut lin = Series2::zero(n, VARS_ZW);
    lin.set(1, 0, c(1));
    lin.set(0, 1, c(2));
    tau1_zw.comp1().add(&lin)
}

/// The lowest-order (linear-in-surface) part of `q`:
/// `Lq = -[r_w(-z - 2w, w) - r_w(z, w)] / (2z + 2w)`, computed by exact
/// polynomial division with a remainder check.
pub fn lq_series(surface: &Surface, n: usize) -> Result<Series2> {
    let r = surface.to_series_trunc(VARS_ZW, n + 2);
    let r_w = r.d_second();
    let sub = r_w.compose_linear(&c(-1), &c(-2), &c(0), &c(1));
    let num = sub.sub(&r_w);
    Ok(num.divide_by_linear_form(&c(2), &c(2))?.neg())
}

/// Transport a `(z, w)` germ to the model coordinates
/// `(x, y) = (z + w, z - w)` by exact conjugation with the coordinate
/// change.
pub fn germ_to_xy(m: &MapGerm) -> MapGerm {
    let n = m.trunc();
    // C: (z, w) -> (z + w, z - w), components written in (z, w).
    let fwd = MapGerm::linear(n, VARS_ZW, c(1), c(1), c(1), c(-1));
    // C^{-1}: (x, y) -> ((x + y)/2, (x - y)/2), components written in (x, y).
    let back = MapGerm::linear(n, VARS_XY, half(1), half(1), half(1), half(-1));
    map_compose(&map_compose(&fwd, m), &back)
}

/// Second involution from the first by the antiholomorphic reflection
/// `(x, y) -> (conj x, -conj y)`: conjugate all coefficients, substitute
/// `y -> -y`, and flip the sign of the second component.
pub fn tau2_from_tau1(t1: &MapGerm) -> MapGerm {
    let comp1 = t1.comp1().conj_coeffs().substitute_signs(1, -1);
    let comp2 = t1.comp2().conj_coeffs().substitute_signs(1, -1).neg();
    MapGerm::new(comp1, comp2)
}

/// The two linear model reflections `(-x, -2x + y)` and `(-x, 2x + y)`.
pub fn model_tau1_linear(n: usize) -> MapGerm {
    MapGerm::linear(n, VARS_XY, c(-1), c(0), c(-2), c(1))
}

pub fn model_tau2_linear(n: usize) -> MapGerm {
    MapGerm::linear(n, VARS_XY, c(-1), c(0), c(2), c(1))
}

/// Exact identities every constructed pair must satisfy. All fields must be
/// `true`; a `false` anywhere indicates an engine bug, not bad input.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CertificationReport {
    /// `tau1 o tau1 = id` exactly to the truncation.
    pub involutive_tau1: bool,
    /// `tau2 o tau2 = id` exactly to the truncation.
    pub involutive_tau2: bool,
    /// Linear parts equal the model reflections.
    pub linear_parts_model: bool,
    /// Both components of `tau1` deviate from the model by the same series.
    pub deviation_components_equal_tau1: bool,
    /// The `tau2` deviations satisfy `g2 = -f2`.
    pub deviation_components_opposite_tau2: bool,
    /// Deviations vanish on the axis `x = 0` (the fixed curve survives).
    pub fixed_axis_clean: bool,
}

impl CertificationReport {
    pub fn all_pass(&self) -> bool {
        self.involutive_tau1
            && self.involutive_tau2
            && self.linear_parts_model
            && self.deviation_components_equal_tau1
            && self.deviation_components_opposite_tau2
            && self.fixed_axis_clean
    }
}

/// A certified involution pair in model coordinates, with the deviations
/// from the linear reflections exposed.
#[derive(Debug, Clone)]
pub struct InvolutionPair {
    tau1: MapGerm,
    tau2: MapGerm,
    report: CertificationReport,
}

impl InvolutionPair {
    pub fn tau1(&self) -> &MapGerm {
        &self.tau1
    }

    pub fn tau2(&self) -> &MapGerm {
        &self.tau2
    }

    pub fn trunc(&self) -> usize {
        self.tau1.trunc()
    }

    pub fn report(&self) -> &CertificationReport {
        &self.report
    }

    /// `f1 = tau1_1 + x`: first-component deviation of the first involution.
    pub fn f1(&self) -> Series2 {
        self.tau1
            .comp1()
            .add(&Series2::var_first(self.trunc(), VARS_XY))
    }

    /// `g1 = tau1_2 + 2x - y`.
    pub fn g1(&self) -> Series2 {
        self.tau1
            .comp2()
            .sub(model_tau1_linear(self.trunc()).comp2())
    }

    /// `f2 = tau2_1 + x`.
    pub fn f2(&self) -> Series2 {
        self.tau2
            .comp1()
            .add(&Series2::var_first(self.trunc(), VARS_XY))
    }

    /// `g2 = tau2_2 - 2x - y`.
    pub fn g2(&self) -> Series2 {
        self.tau2
            .comp2()
            .sub(model_tau2_linear(self.trunc()).comp2())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "tau1": self.tau1.to_json_value(),
            "tau2": self.tau2.to_json_value(),
            "certification": serde_json::to_value(&self.report).expect("report to json"),
        })
    }
}

/// Run all certification checks on a candidate pair.
pub fn certify(tau1: &MapGerm, tau2: &MapGerm) -> CertificationReport {
    let n = tau1.trunc();
    let involutive_tau1 = map_compose(tau1, tau1).is_identity();
    let involutive_tau2 = map_compose(tau2, tau2).is_identity();
    let linear_parts_model = tau1.linear_part() == model_tau1_linear(n).linear_part()
        && tau2.linear_part() == model_tau2_linear(n).linear_part();

    let f1 = tau1.comp1().add(&Series2::var_first(n, VARS_XY));
    let g1 = tau1.comp2().sub(model_tau1_linear(n).comp2());
    let f2 = tau2.comp1().add(&Series2::var_first(n, VARS_XY));
    let g2 = tau2.comp2().sub(model_tau2_linear(n).comp2());

    CertificationReport {
        involutive_tau1,
        involutive_tau2,
        linear_parts_model,
        deviation_components_equal_tau1: f1 == g1,
        deviation_components_opposite_tau2: g2 == f2.neg(),
        fixed_axis_clean: f1.divisible_by_first_var() && f2.divisible_by_first_var(),
    }
}

/// Full pipeline: implicit solve in `(z, w)`, transport to `(x, y)`,
/// reflect, certify. Certification failure is an internal error (the
/// identities hold for every valid surface).
pub fn pair_from_surface(surface: &Surface, n: usize) -> Result<InvolutionPair> {
    let t1_zw = tau1_zw(surface, n)?;
    let tau1 = germ_to_xy(&t1_zw);
    let tau2 = tau2_from_tau1(&tau1);
    let report = certify(&tau1, &tau2);
    if !report.all_pass() {
        return Err(Error::internal(format!(
            "involution pair failed certification: {report:?}"
        )));
    }
    Ok(InvolutionPair { tau1, tau2, report })
}

/// The composition `sigma = tau1 o tau2` split as
/// `sigma = (x + G1, 4x + y + G2)`, assembled twice (directly, and from the
/// deviation identities) and cross-checked.
#[derive(Debug, Clone)]
pub struct SigmaData {
    pub sigma: MapGerm,
    pub g1: Series2,
    pub g2: Series2,
}

pub fn sigma_data(pair: &InvolutionPair) -> Result<SigmaData> {
    let n = pair.trunc();
    let sigma = map_compose(pair.tau1(), pair.tau2());

    let expected_linear = MapGerm::linear(n, VARS_XY, c(1), c(0), c(4), c(1)).linear_part();
    if sigma.linear_part() != expected_linear {
        return Err(Error::internal("composition has the wrong linear part"));
    }

    let g1 = sigma.comp1().sub(&Series2::var_first(n, VARS_XY));
    let mut shear = Series2::var_second(n, VARS_XY);
    shear.set(1, 0, c(4));
    let g2 = sigma.comp2().sub(&shear);

    // Independent assembly from the deviation identities:
    // G1 = -f2 + f1 o tau2,  G2 = -3 f2 + f1 o tau2.
    let f1 = pair.f1();
    let f2 = pair.f2();
    let f1_tau2 = pair.tau2().substitute_into(&f1);
    let g1_alt = f1_tau2.sub(&f2);
    let g2_alt = f1_tau2.sub(&f2.scale(&c(3)));
    if g1 != g1_alt || g2 != g2_alt {
        return Err(Error::internal(
            "composition deviations disagree between the direct and identity routes",
        ));
    }

    if !g1.divisible_by_first_var() {
        return Err(Error::internal(
            "first composition deviation is not divisible by the first variable",
        ));
    }

    Ok(SigmaData { sigma, g1, g2 })
}

/// The linear-in-surface slice generator `A`: the series with
/// `2x * A = r_w(az) - r_w(bz) + conj-route terms` evaluated along the two
/// reflected directions, divided exactly by `2x`. Computed by two
/// independent routes (four-term substitution of `r_w`, and substitution of
/// the divided form `Lq`) which must agree exactly.
pub fn a_series(surface: &Surface, n: usize) -> Result<Series2> {
    let r = surface.to_series_trunc(VARS_ZW, n + 3);
    let r_w = r.d_second();
    let rb_w = r_w.conj_coeffs();

    // Four evaluations of the derivative along linear arguments in (x, y).
    let t1 = r_w.compose_linear(&half(5), &half(1), &half(-3), &half(-1));
    let t2 = r_w.compose_linear(&half(1), &half(1), &half(-3), &half(-1));
    let t3 = rb_w.compose_linear(&half(-3), &half(-1), &half(1), &half(1));
    let t4 = rb_w.compose_linear(&half(1), &half(-1), &half(1), &half(1));
    let num = t1
        .sub(&t2)
        .add(&t3)
        .sub(&t4)
        .reduce_trunc(n + 1)
        .with_vars(VARS_XY);
    let a = num.divide_by_linear_form(&c(2), &c(0))?;

    // Independent route through Lq.
    let lq = lq_series(surface, n + 1)?;
    let lqb = lq.conj_coeffs();
    let s1 = lq.compose_linear(&half(1), &half(1), &half(-3), &half(-1));
    let s2 = lqb.compose_linear(&half(1), &half(-1), &half(1), &half(1));
    let a_alt = s1.sub(&s2).reduce_trunc(n).with_vars(VARS_XY);
    if a != a_alt {
        return Err(Error::internal(
            "linear-slice series disagree between the four-term and divided-form routes",
        ));
    }
    Ok(a)
}
