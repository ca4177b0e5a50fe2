//! Digital nets, Walsh figures of merit, and randomized quasi-Monte Carlo.
//!
//! The crate centers on one quantity: the root-mean-square integration error
//! of a digitally shifted digital net, which for `n`-digit discretized
//! integrands factors exactly through the net's dual and a digit-weighted
//! figure of merit. The modules split along that derivation:
//!
//! - [`net`] — digital nets over `Z_b^{s×n}`, enumeration, duality;
//! - [`weight`] — digit weights (Dick, Hamming, their sum, custom matrices);
//! - [`wafom`] — the figure of merit, via dual enumeration, a MacWilliams
//!   inversion over the net itself, and a high-precision reference path;
//! - [`integrands`] — the eight test functions with exact integrals and
//!   derivative bounds;
//! - [`oracle`] — brute-force group-level identities (DFT, Poisson
//!   summation, exact shift variance) used to validate everything else;
//! - [`qmc`] — randomized QMC integration with digital shifts;
//! - [`search`] — simulated annealing and random search for low-merit nets;
//! - [`experiments`] — the scatter/correlation and comparison studies;
//! - [`io`] — the net file format and the external-matrix ingestion adapter.

pub mod accum;
pub mod error;
pub mod experiments;
pub mod integrands;
pub mod io;
pub mod net;
pub mod oracle;
pub mod qmc;
pub mod rng;
pub mod search;
pub mod wafom;
pub mod weight;

pub use error::{Error, Result};
pub use experiments::{
    comparison_csv, comparison_experiment, comparison_table, correlation,
    merit_error_correlation, scatter_csv, scatter_experiment, ComparisonRow, NetLabel,
    ScatterRecord,
};
pub use integrands::{Integrand, Smoothness, FN_IDS};
pub use io::{
    ingest_net, ingest_net_str, read_net, read_net_str, read_weights, read_weights_str,
    write_net, write_net_str,
};
pub use oracle::{
    kh_rmse_check, poisson_check, shifted_fourier_check, variance_exact,
    walsh_coefficient_bound_check, FourierTable, GroupFunction, PoissonCheck,
};
pub use qmc::{
    plain_error, qmc_integrate, rmse_estimate, rmse_estimate_fn, rmse_estimate_lane,
    rmse_multi_lane, sample_shift, sample_shift_with, QmcEstimate, RmseReport,
};
pub use net::{
    dual, enumerate_points, phi, psi, random_net, random_net_strict, random_net_strict_with,
    random_net_with, shift, DigitMatrix, DigitalNet, DigitalShift, DualNet, NetParams,
};
pub use search::{
    anneal, anneal_checkpointed, anneal_resume, neighbor_with, random_search, AnnealConfig,
    SearchResult, SearchStats,
};
pub use wafom::{
    wafom_dual_bruteforce, wafom_highprec, wafom_inversion, FastWafomEngine, Method, WafomEngine,
    WafomValue,
};
pub use weight::{weight_of, WeightKind, WeightSpec};
