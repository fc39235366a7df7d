//! Zero-point field synthesis.
//!
//! The random background radiation is represented at the particle as a
//! finite sum of modes, `F(t) = sum_l h_l (u_l cos w_l t + v_l sin w_l t)`,
//! with `u_l, v_l` independent standard normals and weights set by the
//! one-sided force spectral density `hbar m tau w^3 / pi`. The complex mode
//! amplitudes are `a_l = (u_l + i v_l) / 2`, distributed as
//! `(2/pi) exp(-2 |a_l|^2)`.

mod boost;
mod io;
mod modes;
mod realization;
mod spectrum;

pub use boost::{
    bin_spectrum, boost_samples, boost_spectrum_check, draw_power_law_modes, BoostBin, BoostReport,
    BoostSample, BOOST_ANALYSIS_BAND, BOOST_SAMPLING_BAND,
};
pub use io::{read_realization_csv, write_boost_csv, write_periodogram_csv, write_realization_csv};
pub use modes::{build_mode_set, build_mode_set_with_density, FrequencyStrategy, Mode, ModeSet};
pub use realization::{
    sample_vacuum_amplitudes, sample_vacuum_amplitudes_in_stream, FieldRealization,
};
pub use spectrum::{estimate_spectrum, Periodogram};
