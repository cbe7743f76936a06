//! Trimmed, normalized importance weights and the tuning schedules
//! `c_n`, `d_n`, `b_n`, `K_n`.

mod importance;
mod schedule;

pub use importance::{
    build_weights, fit_gaussian_importance, fit_gaussian_importance_on, raw_importance,
    trimmed_importance, GaussianLaw, GaussianRatio, ImportanceModel, KnownImportance,
};
pub use schedule::{
    compute_bn, compute_cn, compute_dn, compute_kn, ResolvedSchedule, ScheduleConfig, ScheduleMode,
};
