//! Modulation norms, Bernstein-type Schatten bounds, Sobolev seminorms,
//! B-splines and derivative-bound inequalities.

pub mod spline;

pub use spline::{bspline_eval, difference_op, difference_op_1d, spline_identity, BSpline, SplineIdentity};
pub mod bounds;

pub use bounds::{
    band_stats, fderest_report, generator_sobolev, lemma1_report, lemma_a1_report, prop_a2_report, random_trig_polynomial,
    BandStats, BoundReport, BoxDomain, DEFAULT_BAND,
};
pub mod norms;

pub use norms::{
    bernstein_gap, bernstein_threshold, derivative_field, envelope_schatten_report, local_schatten_report, modulation_norm,
    mp_schatten_gap, poincare_report, region_lp, sobolev_seminorm, sup_envelope, LocalReport, LocalSetting, Region,
    ThresholdedReport, Window,
};
