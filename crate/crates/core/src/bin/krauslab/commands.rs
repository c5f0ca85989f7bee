use std::fmt;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use krauslab::dynamics::{factor_local_unitary, reduced_dynamics, Scenario};
use krauslab::io::{self, KrausJson, MatrixJson};
use krauslab::kraus::{
    closed_form_qubit_kraus, general_qubit_kraus, measure_prepare_kraus, unitary_remix, verify_channel,
};
use krauslab::state::{validate_density, DensityMatrix};
use krauslab::sweep::{self, SWEEP_HEADER};
use krauslab::{random, ChannelReport, ComplexMatrix, Error, KrausSet};

use crate::{Cli, Command, Format, Method};

#[derive(Debug)]
pub enum Failure {
    /// Exit 2: unreadable, malformed or invalid input.
    Input(String),
    /// Exit 1: computation ran but a check failed.
    Numeric(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Numeric(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(msg) => write!(f, "invalid input: {msg}"),
            Failure::Numeric(msg) => write!(f, "check failed: {msg}"),
        }
    }
}

fn input<T>(what: &Path, r: krauslab::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Input(format!("{}: {e}", what.display())))
}

fn numeric<T>(r: krauslab::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Numeric(e.to_string()))
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    io::to_json_string(value).map_err(|e| Failure::Numeric(e.to_string()))
}

/// Writes the primary output to `--out` if given, stdout otherwise.
fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn report_text(cli: &Cli, report: &ChannelReport) -> Result<String, Failure> {
    match cli.format {
        Some(Format::Csv) => Ok(format!(
            "completeness_residual,reconstruction_residual,choi_min_eigenvalue,output_trace_residual,output_min_eigenvalue\n{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
            report.completeness_residual,
            report.reconstruction_residual,
            report.choi_min_eigenvalue,
            report.output_trace_residual,
            report.output_min_eigenvalue
        )),
        _ => json(report),
    }
}

fn judge(report: &ChannelReport, tol: f64) -> Result<(), Failure> {
    if report.passes(tol) {
        Ok(())
    } else {
        Err(Failure::Numeric(format!("channel residuals exceed tolerance {tol:e}")))
    }
}

fn load_state(path: &Path, tol: f64) -> Result<DensityMatrix, Failure> {
    input(path, io::load_state(path, tol))
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(Failure::Input(format!("tolerance must be positive, got {}", cli.tol)));
    }
    match &cli.command {
        Command::Validate { state } => validate(cli, state),
        Command::Kraus { rho0, rhot, method } => kraus(cli, rho0, rhot, *method),
        Command::Evolve { scenario, t } => evolve(cli, scenario, *t),
        Command::Verify { kraus, rho0, rhot } => verify(cli, kraus, rho0, rhot),
        Command::Sweep {
            scenario,
            t_start,
            t_end,
            steps,
        } => run_sweep(cli, scenario, *t_start, *t_end, *steps),
        Command::Remix { kraus, unitary } => remix(cli, kraus, unitary.as_deref()),
        Command::Factor { unitary, dims } => factor(cli, unitary, (dims[0], dims[1])),
    }
}

#[derive(Serialize)]
struct ValidateOutput {
    valid: bool,
    violations: Vec<String>,
    eigenvalues: Vec<f64>,
}

fn validate(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let parsed = input(path, io::read_json::<io::StateJson>(path))?;
    let state = match (parsed.bloch, parsed.matrix) {
        (None, Some(m)) => {
            let m = input(path, ComplexMatrix::try_from(m))?;
            validate_density(&m, cli.tol)
        }
        (bloch, matrix) => Ok(input(path, io::StateJson { bloch, matrix }.into_state(cli.tol))?),
    };
    match state {
        Ok(d) => emit(
            cli,
            &json(&ValidateOutput {
                valid: true,
                violations: vec![],
                eigenvalues: d.eigenvalues(),
            })?,
        ),
        Err(report) => {
            emit(
                cli,
                &json(&ValidateOutput {
                    valid: false,
                    violations: report.violations.iter().map(|v| v.to_string()).collect(),
                    eigenvalues: vec![],
                })?,
            )?;
            Err(Failure::Input(format!("{}: {report}", path.display())))
        }
    }
}

#[derive(Serialize)]
struct KrausOutput {
    kraus: KrausJson,
    report: ChannelReport,
}

fn kraus(cli: &Cli, rho0_path: &Path, rhot_path: &Path, method: Method) -> Result<(), Failure> {
    let rho0 = load_state(rho0_path, cli.tol)?;
    let rhot = load_state(rhot_path, cli.tol)?;
    if rho0.dim() != rhot.dim() {
        return Err(Failure::Input(format!(
            "state dimensions differ: {} vs {}",
            rho0.dim(),
            rhot.dim()
        )));
    }
    if method != Method::MeasurePrepare && rho0.dim() != 2 {
        return Err(Failure::Input(format!(
            "method {method:?} needs qubit states; use measure-prepare for dimension {}",
            rho0.dim()
        )));
    }
    let k = numeric(match method {
        Method::General => general_qubit_kraus(&rho0, &rhot),
        Method::ClosedForm => rho0
            .to_bloch()
            .and_then(|b0| rhot.to_bloch().and_then(|bt| closed_form_qubit_kraus(&b0, &bt))),
        Method::MeasurePrepare => measure_prepare_kraus(&rho0, &rhot),
    })?;
    let report = numeric(verify_channel(&k, &rho0, &rhot))?;
    match &cli.out {
        Some(path) => {
            input(path, io::write_json(path, &KrausJson::from(&k)))?;
            println!("{}", report_text(cli, &report)?);
        }
        None => println!(
            "{}",
            json(&KrausOutput {
                kraus: KrausJson::from(&k),
                report,
            })?
        ),
    }
    judge(&report, cli.tol)
}

#[derive(Serialize)]
struct EvolveOutput {
    t: f64,
    rho_t: MatrixJson,
    delta_rho: MatrixJson,
    rho_cor: MatrixJson,
    factorable_part: MatrixJson,
    delta_rho_maxnorm: f64,
    decomposition_residual: f64,
}

fn evolve(cli: &Cli, path: &Path, t: f64) -> Result<(), Failure> {
    let scenario = input(path, io::load_scenario(path, cli.tol))?;
    let d = numeric(reduced_dynamics(&scenario.hamiltonian(), &scenario.initial_state(), t))?;
    emit(
        cli,
        &json(&EvolveOutput {
            t,
            rho_t: d.rho_t.matrix().into(),
            delta_rho: (&d.delta_rho).into(),
            rho_cor: (&d.correlation).into(),
            factorable_part: (&d.factorable_part).into(),
            delta_rho_maxnorm: d.delta_rho.norm_max(),
            decomposition_residual: d.decomposition_residual,
        })?,
    )?;
    if d.decomposition_residual > cli.tol {
        return Err(Failure::Numeric(format!(
            "decomposition residual {:e} exceeds {:e}",
            d.decomposition_residual, cli.tol
        )));
    }
    Ok(())
}

fn verify(cli: &Cli, kraus_path: &Path, rho0_path: &Path, rhot_path: &Path) -> Result<(), Failure> {
    let k = input(kraus_path, io::load_kraus(kraus_path))?;
    let rho0 = load_state(rho0_path, cli.tol)?;
    let rhot = load_state(rhot_path, cli.tol)?;
    if k.d_in() != rho0.dim() || k.d_out() != rhot.dim() {
        return Err(Failure::Input(format!(
            "Kraus set is {}->{} but states have dimensions {} and {}",
            k.d_in(),
            k.d_out(),
            rho0.dim(),
            rhot.dim()
        )));
    }
    let report = numeric(verify_channel(&k, &rho0, &rhot))?;
    emit(cli, &report_text(cli, &report)?)?;
    judge(&report, cli.tol)
}

fn run_sweep(cli: &Cli, path: &Path, start: f64, end: f64, steps: usize) -> Result<(), Failure> {
    let scenario: Scenario = input(path, io::load_scenario(path, cli.tol))?;
    let times = sweep::grid(start, end, steps).map_err(|e| Failure::Input(e.to_string()))?;
    let rows = match sweep::sweep(&scenario, &times) {
        Err(e @ Error::DimensionMismatch { .. }) => return Err(Failure::Input(e.to_string())),
        other => numeric(other)?,
    };
    let text = match cli.format {
        Some(Format::Json) => json(&rows)?,
        _ => {
            let mut lines = vec![SWEEP_HEADER.to_string()];
            lines.extend(rows.iter().map(|r| r.to_csv()));
            lines.join("\n")
        }
    };
    emit(cli, &text)?;
    let failed = rows.iter().filter(|r| !r.passes(cli.tol)).count();
    if failed > 0 {
        return Err(Failure::Numeric(format!(
            "{failed} of {} grid points exceed tolerance {:e}",
            rows.len(),
            cli.tol
        )));
    }
    Ok(())
}

fn remix(cli: &Cli, kraus_path: &Path, unitary_path: Option<&Path>) -> Result<(), Failure> {
    let k = input(kraus_path, io::load_kraus(kraus_path))?;
    let v = match unitary_path {
        Some(p) => {
            let v = input(p, io::load_matrix(p))?;
            input(p, v.ensure_unitary(cli.tol).map(|_| v))?
        }
        None => random::haar_unitary(&mut ChaCha8Rng::seed_from_u64(cli.seed), k.len()),
    };
    if !v.is_square() || v.rows() < k.len() {
        return Err(Failure::Input(format!(
            "unitary is {}x{} but the set has {} operators",
            v.rows(),
            v.cols(),
            k.len()
        )));
    }
    let mixed: KrausSet = numeric(unitary_remix(&k, &v))?;
    emit(cli, &json(&KrausJson::from(&mixed))?)?;
    let res = mixed.completeness_residual();
    if res > cli.tol {
        return Err(Failure::Numeric(format!("completeness residual {res:e} exceeds {:e}", cli.tol)));
    }
    Ok(())
}

#[derive(Serialize)]
struct FactorOutput {
    factorable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    system: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    environment: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
}

fn factor(cli: &Cli, path: &Path, dims: (usize, usize)) -> Result<(), Failure> {
    let u = input(path, io::load_matrix(path))?;
    input(path, u.ensure_unitary(cli.tol.max(1e-9)))?;
    if u.rows() != dims.0 * dims.1 {
        return Err(Failure::Input(format!(
            "{}x{} unitary does not split as {}x{}",
            u.rows(),
            u.cols(),
            dims.0,
            dims.1
        )));
    }
    match factor_local_unitary(&u, dims, cli.tol) {
        Some((a, b)) => {
            let residual = u.max_diff(&a.kron(&b)).map_err(|e| Failure::Numeric(e.to_string()))?;
            emit(
                cli,
                &json(&FactorOutput {
                    factorable: true,
                    system: Some((&a).into()),
                    environment: Some((&b).into()),
                    residual: Some(residual),
                })?,
            )
        }
        None => {
            emit(
                cli,
                &json(&FactorOutput {
                    factorable: false,
                    system: None,
                    environment: None,
                    residual: None,
                })?,
            )?;
            Err(Failure::Numeric("unitary is not a local product".into()))
        }
    }
}
