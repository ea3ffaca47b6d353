//! Prediction, classification, and numerical verification of sustained
//! belief oscillations in multi-topic nonlinear opinion dynamics on signed
//! networks.
//!
//! The pipeline: build signed communication and belief-system graphs
//! ([`signed_graph`]), compose their spectra into the Jacobian spectrum of
//! the coupled dynamics ([`spectral`]), locate the indecision-breaking
//! threshold and evaluate the Hopf criticality coefficient and the predicted
//! period/phase/amplitude pattern ([`bifurcation`]), integrate the full
//! nonlinear dynamics ([`dynamics`]), and measure the realized oscillation to
//! check it against the prediction ([`analysis`]).

pub mod analysis;
pub mod bifurcation;
pub mod error;
pub mod model;
pub mod signed_graph;
pub mod spectral;

#[path = "dynamics/mod.rs"]
pub mod dynamics;

pub use analysis::{
    circular_distance, compare, discard_transient, measure_oscillation, CompareVerdict,
    ComparisonReport, OscillationMeasurement, ToleranceSet,
};
pub use bifurcation::{
    check_assumption1, classify_graphs, compute_k, critical_attention, criticality_from_b,
    hopf_coefficient_b, normalize_hopf_eigenvectors, oscillation_threshold, predict_for_model,
    predict_oscillation, ClassificationReason, Criticality, GraphClassification, HopfEigenvectors,
    HopfReport, KResult, ThresholdGain, Verdict,
};
pub use dynamics::{integrate, random_initial, rhs, SimulationSettings, Trajectory, TrajectoryMeta};
pub use error::{CoreError, Result};
pub use model::{Model, ModelParams, SaturationSpec};
pub use signed_graph::{
    find_switching_to_eventually_positive, signed_cycle, switch_graph, SignedGraph, SwitchingSigns,
};
pub use spectral::{
    compose_eta, compose_jacobian_spectrum, eig, eta_contribution, form_jacobian,
    has_strong_perron_frobenius, is_eventually_positive, leading_eigenvalues, ComposedEig,
    EigenPair, Spectrum,
};
