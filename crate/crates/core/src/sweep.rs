//! Tabulation of a qubit scenario over a time grid.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{reduced_dynamics, Scenario};
use crate::error::{Error, Result};
use crate::kraus::{general_qubit_kraus, verify_channel};
use crate::state::{density_to_bloch, trace_distance, DensityMatrix};
use crate::DEFAULT_TOL;

/// Column names, in order. Downstream tooling matches on this exact line.
pub const SWEEP_HEADER: &str = "t,r(t),theta(t),phi(t),r_t,delta_rho_maxnorm,completeness_residual,reconstruction_residual,trace_distance_analytic_vs_numeric";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: f64,
    /// Bloch coordinates of the numerically evolved reduced state.
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    /// Closed-form Bloch radius (CNOT scenario) or the numeric one (custom).
    pub r_t: f64,
    pub delta_rho_maxnorm: f64,
    /// Worst completeness residual over the Kraus sets checked at this `t`.
    pub completeness_residual: f64,
    /// Worst `‖Σ M ρ_0 M† − ρ(t)‖_max` over the same sets.
    pub reconstruction_residual: f64,
    /// CNOT: closed-form state vs joint evolution. Custom: Kraus output vs
    /// joint evolution.
    pub trace_distance_analytic_vs_numeric: f64,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        [
            self.t,
            self.r,
            self.theta,
            self.phi,
            self.r_t,
            self.delta_rho_maxnorm,
            self.completeness_residual,
            self.reconstruction_residual,
            self.trace_distance_analytic_vs_numeric,
        ]
        .iter()
        .map(|x| format!("{x:.11e}"))
        .collect::<Vec<_>>()
        .join(",")
    }

    /// True when every residual column is within `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.completeness_residual <= tol
            && self.reconstruction_residual <= tol
            && self.trace_distance_analytic_vs_numeric <= tol
    }
}

/// `steps` equally spaced points from `start` to `end` inclusive.
pub fn grid(start: f64, end: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 steps, got {steps}")));
    }
    if !(start.is_finite() && end.is_finite()) || start == end {
        return Err(Error::InvalidArgument("degenerate grid".into()));
    }
    let h = (end - start) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| if k == steps - 1 { end } else { start + h * k as f64 })
        .collect())
}

fn sweep_point(scenario: &Scenario, t: f64) -> Result<SweepRow> {
    let h = scenario.hamiltonian();
    let initial = scenario.initial_state();
    let dynamics = reduced_dynamics(&h, &initial, t)?;
    let (rho_0, rho_t) = (&dynamics.rho_0, &dynamics.rho_t);
    let bloch = density_to_bloch(rho_t)?;

    let general = general_qubit_kraus(rho_0, rho_t)?;
    let report = verify_channel(&general, rho_0, rho_t)?;
    let mut completeness = report.completeness_residual;
    let mut reconstruction = report.reconstruction_residual;

    let (r_t, distance) = match scenario {
        Scenario::Cnot(sc) => {
            let analytic = sc.analytic_kraus(t)?;
            let analytic_report = verify_channel(&analytic, &sc.initial_reduced(), rho_t)?;
            completeness = completeness.max(analytic_report.completeness_residual);
            reconstruction = reconstruction.max(analytic_report.reconstruction_residual);
            (sc.r_t(t), trace_distance(&sc.analytic_rho(t), rho_t)?)
        }
        Scenario::Custom { .. } => {
            let out = DensityMatrix::new(general.apply_matrix(rho_0.matrix())?, 10.0 * DEFAULT_TOL)?;
            (bloch.r, trace_distance(&out, rho_t)?)
        }
    };

    Ok(SweepRow {
        t,
        r: bloch.r,
        theta: bloch.theta,
        phi: bloch.phi,
        r_t,
        delta_rho_maxnorm: dynamics.delta_rho.norm_max(),
        completeness_residual: completeness,
        reconstruction_residual: reconstruction,
        trace_distance_analytic_vs_numeric: distance,
    })
}

/// Evaluates every grid point (in parallel); rows come back in grid order.
/// The scenario's system must be a qubit.
pub fn sweep(scenario: &Scenario, times: &[f64]) -> Result<Vec<SweepRow>> {
    let (d_i, _) = scenario.initial_state().dims();
    if d_i != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: d_i,
        });
    }
    times.par_iter().map(|&t| sweep_point(scenario, t)).collect()
}
