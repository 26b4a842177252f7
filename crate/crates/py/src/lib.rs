//! Python module `qudit`: protocol runs, witnesses, the oracle comparison
//! and coupling constants.

use pyo3::exceptions::{PyMemoryError, PyValueError};
use pyo3::prelude::*;

use qudit_net::analytic::gie_moments;
use qudit_net::gid::{gid_moments_with, GidSchedule, LocalKernel, Orientation};
use qudit_net::oracle::{checked_size, evolve_diagonal, moment_table, GlobalState};
use qudit_net::params::{self, Barrier, DoubleWellSpec, Grid};
use qudit_net::protocol::{self, GidOptions};
use qudit_net::spin::{css_x, EnsembleDim};
use qudit_net::Tolerances;

fn py_err(e: qudit_net::Error) -> PyErr {
    match e {
        qudit_net::Error::SizeCap { .. } => PyMemoryError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Hamiltonian couplings. With `dimensionless` set, times are `chi_nloc t`.
#[pyclass(skip_from_py_object, get_all, set_all, module = "qudit")]
#[derive(Clone, Copy)]
pub struct Couplings {
    pub chi_cont: f64,
    pub chi_loc: f64,
    pub chi_nloc: f64,
    pub dimensionless: bool,
}

#[pymethods]
impl Couplings {
    #[new]
    #[pyo3(signature = (chi_cont=0.0, chi_loc=0.0, chi_nloc=1.0, dimensionless=true))]
    fn new(chi_cont: f64, chi_loc: f64, chi_nloc: f64, dimensionless: bool) -> Self {
        Self { chi_cont, chi_loc, chi_nloc, dimensionless }
    }

    fn __repr__(&self) -> String {
        format!(
            "Couplings(chi_cont={}, chi_loc={}, chi_nloc={}, dimensionless={})",
            self.chi_cont,
            self.chi_loc,
            self.chi_nloc,
            if self.dimensionless { "True" } else { "False" }
        )
    }
}

impl From<&Couplings> for qudit_net::Couplings {
    fn from(c: &Couplings) -> Self {
        Self { chi_cont: c.chi_cont, chi_loc: c.chi_loc, chi_nloc: c.chi_nloc, dimensionless: c.dimensionless }
    }
}

fn core_couplings(c: Option<PyRef<'_, Couplings>>) -> qudit_net::Couplings {
    c.map(|c| (&*c).into()).unwrap_or_else(qudit_net::Couplings::dimensionless_nonlocal)
}

/// One time point of a witness series. The `*_tilde` fields and `f_loc` are
/// `None` unless the reduced state was computed.
#[pyclass(skip_from_py_object, get_all, frozen, module = "qudit")]
#[derive(Clone, Copy)]
pub struct WitnessRecord {
    pub tau: f64,
    pub xi2_loc: f64,
    pub xi2_col: f64,
    pub gamma_loc: f64,
    pub f_col: f64,
    pub c1: f64,
    pub c2: f64,
    pub f_loc: Option<f64>,
    pub c1_tilde: Option<f64>,
    pub c2_tilde: Option<f64>,
}

impl From<&qudit_net::metrology::WitnessRecord> for WitnessRecord {
    fn from(r: &qudit_net::metrology::WitnessRecord) -> Self {
        Self {
            tau: r.tau,
            xi2_loc: r.xi2_loc,
            xi2_col: r.xi2_col,
            gamma_loc: r.gamma_loc,
            f_col: r.f_col,
            c1: r.c1,
            c2: r.c2,
            f_loc: r.f_loc,
            c1_tilde: r.c1_tilde,
            c2_tilde: r.c2_tilde,
        }
    }
}

#[pymethods]
impl WitnessRecord {
    fn __repr__(&self) -> String {
        format!("WitnessRecord(tau={}, c1={}, c2={})", self.tau, self.c1, self.c2)
    }
}

/// A dephasing-protocol point: the witnesses plus the schedule angles.
#[pyclass(skip_from_py_object, get_all, frozen, module = "qudit")]
#[derive(Clone, Copy)]
pub struct GidRecord {
    pub witness: WitnessRecord,
    /// Time since the rotation; negative on the preparation segment.
    pub tau_post: f64,
    pub beta: f64,
    pub theta: f64,
    pub theta0: f64,
    pub purity: Option<f64>,
}

#[pymethods]
impl GidRecord {
    #[getter]
    fn tau(&self) -> f64 {
        self.witness.tau
    }

    fn __repr__(&self) -> String {
        format!("GidRecord(tau={}, xi2_loc={}, c2={})", self.witness.tau, self.witness.xi2_loc, self.witness.c2)
    }
}

fn dim(n: usize) -> PyResult<EnsembleDim> {
    EnsembleDim::new(n).map_err(py_err)
}

/// Entangling sequence from coherent states on `m` ensembles of `n` atoms.
#[pyfunction]
#[pyo3(signature = (n, m, taus, couplings=None, tilde=false))]
fn run_gie(py: Python<'_>, n: usize, m: usize, taus: Vec<f64>, couplings: Option<PyRef<'_, Couplings>>, tilde: bool) -> PyResult<Vec<WitnessRecord>> {
    let c = core_couplings(couplings);
    let d = dim(n)?;
    let records = py.detach(|| protocol::run_gie(d, m, &c, &taus, tilde)).map_err(py_err)?;
    Ok(records.iter().map(WitnessRecord::from).collect())
}

/// Twist for `tau_rot`, rotate (by `theta`, or so the squeezed quadrature
/// makes angle `beta` with z), then evolve under the nonlocal coupling.
/// Returns `(schedule, records)` with the schedule as a dict.
#[pyfunction]
#[pyo3(signature = (n, m, tau_rot, taus, beta=None, theta=None, prep_points=0, reduced=false))]
#[allow(clippy::too_many_arguments)]
fn run_gid(
    py: Python<'_>,
    n: usize,
    m: usize,
    tau_rot: f64,
    taus: Vec<f64>,
    beta: Option<f64>,
    theta: Option<f64>,
    prep_points: usize,
    reduced: bool,
) -> PyResult<(std::collections::BTreeMap<String, f64>, Vec<GidRecord>)> {
    let orientation = match (beta, theta) {
        (Some(b), None) => Orientation::Beta(b),
        (None, Some(t)) => Orientation::Theta(t),
        _ => return Err(PyValueError::new_err("give exactly one of beta or theta")),
    };
    let d = dim(n)?;
    let schedule = GidSchedule { tau_rot, orientation };
    let (res, records) =
        py.detach(|| protocol::run_gid(d, m, &schedule, &taus, GidOptions { prep_points, reduced })).map_err(py_err)?;
    let meta = [
        ("tau_rot", res.tau_rot),
        ("theta", res.theta),
        ("theta0", res.theta0),
        ("beta", res.beta),
        ("degenerate", if res.degenerate { 1.0 } else { 0.0 }),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_owned(), v))
    .collect();
    let records = records
        .iter()
        .map(|r| GidRecord {
            witness: (&r.witness).into(),
            tau_post: r.tau_post,
            beta: r.beta,
            theta: r.theta,
            theta0: r.theta0,
            purity: r.purity,
        })
        .collect();
    Ok((meta, records))
}

/// First post-rotation time at which `xi2_loc` reaches 1, or `None`.
#[pyfunction]
fn dephasing_time(records: Vec<PyRef<'_, GidRecord>>) -> Option<f64> {
    let core: Vec<protocol::GidRecord> = records
        .iter()
        .map(|r| {
            let w = &r.witness;
            protocol::GidRecord {
                witness: qudit_net::metrology::WitnessRecord {
                    tau: w.tau,
                    xi2_loc: w.xi2_loc,
                    xi2_col: w.xi2_col,
                    gamma_loc: w.gamma_loc,
                    f_col: w.f_col,
                    c1: w.c1,
                    c2: w.c2,
                    f_loc: w.f_loc,
                    c1_tilde: w.c1_tilde,
                    c2_tilde: w.c2_tilde,
                },
                tau_post: r.tau_post,
                beta: r.beta,
                theta: r.theta,
                theta0: r.theta0,
                purity: r.purity,
            }
        })
        .collect();
    protocol::dephasing_time(&core)
}

/// `(exponent, prefactor)` of a power law `y = prefactor * x^exponent`.
#[pyfunction]
fn log_log_fit(x: Vec<f64>, y: Vec<f64>) -> PyResult<(f64, f64)> {
    let (slope, intercept) = protocol::log_log_fit(&x, &y).map_err(py_err)?;
    Ok((slope, intercept.exp()))
}

/// Largest absolute difference between the closed-form moments of the
/// entangling sequence and the brute-force state, over `taus`.
#[pyfunction]
#[pyo3(signature = (n, m, taus, couplings=None))]
fn oracle_deviation_gie(n: usize, m: usize, taus: Vec<f64>, couplings: Option<PyRef<'_, Couplings>>) -> PyResult<f64> {
    let c = core_couplings(couplings);
    let d = dim(n)?;
    checked_size(d, m, Tolerances::DEFAULT.oracle_cap).map_err(py_err)?;
    let css = GlobalState::uniform(&css_x(d), m).map_err(py_err)?;
    Ok(taus.iter().fold(0.0, |worst: f64, &t| {
        let exact = moment_table(&evolve_diagonal(&css, &c, t), t);
        worst.max(gie_moments(d, m, &c, t).max_abs_diff(&exact))
    }))
}

/// Same comparison for the dephasing sequence after the rotation.
#[pyfunction]
#[pyo3(signature = (n, m, tau_rot, taus, theta))]
fn oracle_deviation_gid(n: usize, m: usize, tau_rot: f64, taus: Vec<f64>, theta: f64) -> PyResult<f64> {
    let d = dim(n)?;
    checked_size(d, m, Tolerances::DEFAULT.oracle_cap).map_err(py_err)?;
    let res = GidSchedule { tau_rot, orientation: Orientation::Theta(theta) }.resolve(d).map_err(py_err)?;
    let st = GlobalState::uniform(&res.rotated, m).map_err(py_err)?;
    let kernel = LocalKernel::new(&res.rotated);
    let nl = qudit_net::Couplings::dimensionless_nonlocal();
    Ok(taus.iter().fold(0.0, |worst: f64, &tau| {
        let exact = moment_table(&evolve_diagonal(&st, &nl, tau), tau);
        worst.max(gid_moments_with(&kernel, m, tau).max_abs_diff(&exact))
    }))
}

/// Nonlocal coupling (rad/s) between two clocks with energy splitting
/// `delta_e` (J) at distance `d` (m).
#[pyfunction]
fn cgb_coupling(delta_e: f64, d: f64) -> PyResult<f64> {
    params::cgb_coupling(delta_e, d).map_err(py_err)
}

/// `{chi_loc, chi_nloc, chi_nz}` in rad/s for two interferometers of mass
/// `mass` (kg), near-arm distance `d` and arm separation `d_prime` (m).
#[pyfunction]
fn bmv_couplings(mass: f64, d: f64, d_prime: f64) -> PyResult<std::collections::BTreeMap<String, f64>> {
    let b = params::bmv_couplings(mass, d, d_prime).map_err(py_err)?;
    Ok([("chi_loc", b.chi_loc), ("chi_nloc", b.chi_nloc), ("chi_nz", b.chi_nz)].into_iter().map(|(k, v)| (k.to_owned(), v)).collect())
}

/// Couplings (rad/s) of two identical double wells, the second displaced by
/// `displacement` (m). Trap frequencies in Hz; a Gaussian barrier of height
/// `barrier_hz` (Hz) and width `barrier_width` (m) when both are given.
/// `c_dd` defaults to `mu0 muB^2`.
#[pyfunction]
#[pyo3(signature = (mass_amu, trap_hz, displacement, barrier_hz=None, barrier_width=None, c_dd=None, grid_points=512))]
fn double_well_couplings(
    py: Python<'_>,
    mass_amu: f64,
    trap_hz: [f64; 3],
    displacement: [f64; 3],
    barrier_hz: Option<f64>,
    barrier_width: Option<f64>,
    c_dd: Option<f64>,
    grid_points: usize,
) -> PyResult<std::collections::BTreeMap<String, f64>> {
    use params::constants::{AMU, HBAR};
    use std::f64::consts::PI;
    let mass = mass_amu * AMU;
    let [wx, wy, wz] = trap_hz.map(|f| 2.0 * PI * f);
    let barrier = match (barrier_hz, barrier_width) {
        (None, None) => Barrier::None,
        (Some(h), Some(w)) => Barrier::Gaussian { height: 2.0 * PI * HBAR * h, width: w },
        _ => return Err(PyValueError::new_err("give both barrier_hz and barrier_width, or neither")),
    };
    let ell = (HBAR / (mass * wx)).sqrt();
    let spec = DoubleWellSpec {
        mass,
        omega_x: wx,
        omega_y: wy,
        omega_z: wz,
        barrier,
        grid: Grid { x_min: -9.0 * ell, x_max: 9.0 * ell, n_points: grid_points },
    };
    let c_dd = c_dd.unwrap_or_else(params::couplings::c_dd_bohr);
    let r = py
        .detach(|| {
            let modes = params::solve_double_well(&spec)?;
            params::couplings_dw(&modes, &modes, displacement, mass, c_dd).map(|r| (r, modes.e_ex - modes.e_gs))
        })
        .map_err(py_err)?;
    let (r, gap) = r;
    Ok([
        ("chi_cont_per_a0", r.chi_cont_per_a0),
        ("chi_loc", r.chi_loc),
        ("chi_nloc", r.chi_nloc),
        ("chi_nz_ab", r.chi_nz_ab),
        ("chi_nz_ba", r.chi_nz_ba),
        ("tunnel_splitting_hz", gap / (2.0 * PI * HBAR)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_owned(), v))
    .collect())
}

#[pymodule]
fn qudit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Couplings>()?;
    m.add_class::<WitnessRecord>()?;
    m.add_class::<GidRecord>()?;
    m.add_function(wrap_pyfunction!(run_gie, m)?)?;
    m.add_function(wrap_pyfunction!(run_gid, m)?)?;
    m.add_function(wrap_pyfunction!(dephasing_time, m)?)?;
    m.add_function(wrap_pyfunction!(log_log_fit, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_deviation_gie, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_deviation_gid, m)?)?;
    m.add_function(wrap_pyfunction!(cgb_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(bmv_couplings, m)?)?;
    m.add_function(wrap_pyfunction!(double_well_couplings, m)?)?;
    Ok(())
}
