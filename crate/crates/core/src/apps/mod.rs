//! Applications: extreme-value kernels ([`evt`]) and the Haar measure of a
//! Popa group ([`haar`]).

pub mod evt;
pub mod haar;

pub use evt::{evt_a, evt_e, evt_goldie_residual, fit_e, gev_cdf, gev_type, read_evt_csv, EvtFit, EvtParams, FitOptions, GevType};
pub use haar::{haar_density, haar_invariance_check, haar_invariance_check_with, haar_measure_mc, HaarEstimate, HaarJob, Side};
