//! Pole catalogues, signal synthesis, characteristic times and the
//! p-relevant/p-irrelevant split.

mod catalogue;
mod signal;
mod timescales;

pub use catalogue::{KhalfinTail, Mode, Pole, PoleCatalogue};
pub use signal::{
    check_grid, coincidence_check, eval_catalogue, preferred_signal, synthesize, uniform_grid, Coincidence,
    Rendering, Signal, GRID_UNIFORMITY_TOL,
};
pub use timescales::{
    decoherence_time, model1_times, model2_times, DecoherenceRule, RuleKind, TimescaleReport, TwoPoleTimes,
};
