//! Witness ratio series, exponent fits, and the finite inequalities behind
//! rapid decay of degree `s`.

mod fit;
mod heredity;
mod lemmas;
mod proof;
mod report;
mod series;
mod zseries;


pub use fit::{
    delocalize_constant, fit_exponent, fit_growth, fit_log_log, rd_constant_series, rd_constant_series_with,
    ConstantSeries, DivergenceRule, ExponentFit, Side, Verdict,
};
pub use heredity::{verify_heredity, HeredityCheck, HeredityEntry};
pub use lemmas::{
    harmonic_sphere_sum, verify_doubling, verify_lemma_one, verify_lemma_one_sweep, verify_lemma_two_finite,
    DoublingCheck, HarmonicSum, IntegralDiagnostic, LemmaOneCheck, LemmaOneSweep, LemmaTwoCheck,
    CONVERGING_INCREMENT_RATIO,
};
pub use proof::{contradiction_trace, zeta, ContradictionReport, ConvergentStep, ProofParameters, WeightedStep};
pub use report::{build_report, RdReport, ReportConfig, DEFAULT_FIT_START};
pub use series::{ratio_series, RatioSeries, SeriesEntry, Witness};
pub use zseries::{build_z_series, z_l2_bounds, ZL2Bounds, ZSeries};
