//! Exact arithmetic for the Takagi function and its level sets.

pub mod bv;
pub mod cli;
pub mod error;
pub mod eval;
pub mod local;
pub mod numbers;
pub mod omega;

pub use error::{Error, Result};
pub use eval::{takagi_exact, takagi_fraction, takagi_fraction_of, takagi_of, takagi_partial, takagi_series, SelfAffineFrame, SeriesKind};
pub use local::{blocks, enumerate_members, equivalent, flip_block, infinite_level_family, level_half_family, local_level_set, Cardinality, LocalLevelSetDesc};
pub use numbers::{format_rat, parse_rat, rat, BalanceKind, BalanceSet, BinExp, DigitProfile, Fraction, Rat, Tail};
pub use omega::{
    catalan, cover_measure_bound, enumerate_breakpoints, enumerate_gap_intervals, in_omega_l, monotone_approximants, project_omega_l, Breakpoint,
    Direction, GapInterval,
};
pub use bv::{
    coarea_integral, flattened_takagi, local_level_count_estimate, mean_local_level_count, sample_pl, takagi_singular, total_variation,
    upper_set_perimeter, FunctionTag, PlFunction,
};
