use std::path::{Path, PathBuf};

use qudit_net::analytic::gie_moments;
use qudit_net::gid::{gid_moments_with, LocalKernel};
use qudit_net::oracle::{apply_local, checked_size, evolve_diagonal, moment_table, GlobalState};
use qudit_net::params::couplings::{c_dd_bohr, CouplingResult};
use qudit_net::params::{bmv_couplings, cgb_coupling, couplings_dw, solve_double_well};
use qudit_net::protocol::{dephasing_time, log_log_fit, run_gid, run_gie, GidOptions, GidRecord};
use qudit_net::spin::Rotator;
use qudit_net::{css_x, Axis, Couplings, Tolerances};
use serde_json::{json, Value};

use crate::config::{Format, Kind, ParamsConfig, RunConfig, SweepParameter, Validated};
use crate::output::{emit, table_json, to_destination, write_csv, write_json, Table};
use crate::CliError;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Common {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

/// Result of one protocol run, ready to be written.
pub struct RunOutput {
    pub table: Table,
    pub meta: Value,
    /// Post-rotation records of a dephasing run, used by sweeps.
    pub gid: Option<Vec<GidRecord>>,
}

fn destination(common: &Common, configured: &Option<PathBuf>) -> Option<PathBuf> {
    common.out.clone().or_else(|| configured.clone())
}

fn format_for(common: &Common, configured: Option<Format>, path: Option<&Path>) -> Format {
    common
        .format
        .or(configured)
        .or_else(|| path.and_then(|p| p.extension()).filter(|e| *e == "json").map(|_| Format::Json))
        .unwrap_or(Format::Csv)
}

pub fn run_validated(v: &Validated, cfg: &RunConfig, seed: Option<u64>) -> Result<RunOutput, CliError> {
    let mut meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "seed": seed,
    });
    match v.kind {
        Kind::Gie => {
            if v.tilde && v.dim.atoms() > v.reduced_cap {
                return Err(CliError::Config(format!(
                    "metrology.compute_tilde: N = {} exceeds metrology.reduced_cap = {}",
                    v.dim.atoms(),
                    v.reduced_cap
                )));
            }
            let records = run_gie(v.dim, v.sites, &v.couplings, &v.taus, v.tilde)?;
            Ok(RunOutput { table: Table::gie(&records, v.tilde), meta, gid: None })
        }
        Kind::Gid => {
            let schedule = v.schedule.expect("validated dephasing config has a schedule");
            let opts = GidOptions { prep_points: v.prep_points, reduced: v.tilde && v.dim.atoms() <= v.reduced_cap };
            let (res, records) = run_gid(v.dim, v.sites, &schedule, &v.taus, opts)?;
            meta["schedule"] = json!({
                "tau_rot": res.tau_rot,
                "theta": res.theta,
                "theta0": res.theta0,
                "beta": res.beta,
                "degenerate": res.degenerate,
            });
            let post = records.iter().filter(|r| r.tau_post >= 0.0).cloned().collect();
            Ok(RunOutput { table: Table::gid(&records, v.tilde), meta, gid: Some(post) })
        }
    }
}

pub fn run(cfg: &RunConfig, common: &Common) -> Result<(), CliError> {
    let v = cfg.validate().map_err(CliError::Config)?;
    let out = run_validated(&v, cfg, common.seed)?;
    let path = destination(common, &cfg.output.path);
    let format = format_for(common, cfg.output.format, path.as_deref());
    let kind = if v.kind == Kind::Gie { "gie" } else { "gid" };
    emit(path.as_deref(), format, &out.table, kind, out.meta)
}

/// Largest deviation between the fast engine and the brute-force oracle over the configured grid.
pub fn oracle_deviation(v: &Validated) -> Result<(f64, usize), CliError> {
    checked_size(v.dim, v.sites, Tolerances::DEFAULT.oracle_cap)?;
    let css = GlobalState::uniform(&css_x(v.dim), v.sites)?;
    let mut worst: f64 = 0.0;
    match v.kind {
        Kind::Gie => {
            for &t in &v.taus {
                let exact = moment_table(&evolve_diagonal(&css, &v.couplings, t), t);
                worst = worst.max(gie_moments(v.dim, v.sites, &v.couplings, t).max_abs_diff(&exact));
            }
        }
        Kind::Gid => {
            let schedule = v.schedule.expect("validated dephasing config has a schedule");
            let rotator = Rotator::new(v.dim);
            let res = schedule.resolve_with(&rotator)?;
            // Independent preparation: twist on the full product state, then rotate every site.
            let twist = Couplings { chi_cont: 0.0, chi_loc: 1.0, chi_nloc: 0.0, dimensionless: true };
            let mut st = evolve_diagonal(&css, &twist, res.tau_rot);
            let u = rotator.unitary(Axis::X, res.theta);
            for site in 0..v.sites {
                st = apply_local(&st, site, &u)?;
            }
            let kernel = LocalKernel::new(&res.rotated);
            let nl = Couplings::dimensionless_nonlocal();
            for &tau in &v.taus {
                let exact = moment_table(&evolve_diagonal(&st, &nl, tau), tau);
                worst = worst.max(gid_moments_with(&kernel, v.sites, tau).max_abs_diff(&exact));
            }
        }
    }
    Ok((worst, v.taus.len()))
}

pub fn oracle_check(cfg: &RunConfig, common: &Common) -> Result<(), CliError> {
    let v = cfg.validate().map_err(CliError::Config)?;
    let (worst, points) = oracle_deviation(&v)?;
    let tolerance = Tolerances::DEFAULT.oracle_agreement;
    let pass = worst <= tolerance;
    let report = json!({
        "kind": if v.kind == Kind::Gie { "gie" } else { "gid" },
        "n": v.dim.atoms(),
        "m": v.sites,
        "points": points,
        "max_deviation": worst,
        "tolerance": tolerance,
        "pass": pass,
    });
    let path = destination(common, &cfg.output.path);
    to_destination(path.as_deref(), |out| write_json(&report, out))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Validation(format!("engine deviates from oracle by {worst:.3e} (tolerance {tolerance:.0e})")))
    }
}

fn coupling_json(c: &CouplingResult) -> Value {
    let (cont_hz, loc_hz, nloc_hz) = c.in_hz();
    json!({
        "integrals": {
            "i_contact": c.i_contact,
            "d_self": c.d_self,
            "d_lr": c.d_lr,
            "d_lalb": c.d_lalb,
            "d_rarb": c.d_rarb,
            "d_ralb": c.d_ralb,
            "d_larb": c.d_larb,
        },
        "rad_per_s": {
            "chi_cont_per_a0": c.chi_cont_per_a0,
            "chi_loc": c.chi_loc,
            "chi_nloc": c.chi_nloc,
            "chi_nz_ab": c.chi_nz_ab,
            "chi_nz_ba": c.chi_nz_ba,
        },
        "hz": {
            "chi_cont_per_a0": cont_hz,
            "chi_loc": loc_hz,
            "chi_nloc": nloc_hz,
            "chi_nz_ab": c.chi_nz_ab / (2.0 * std::f64::consts::PI),
            "chi_nz_ba": c.chi_nz_ba / (2.0 * std::f64::consts::PI),
        },
        "cancelling_a_over_a0": c.cancelling_scattering_length(),
    })
}

/// Dimensionless time of the smallest `C1` for two ensembles of `n` atoms
/// under the pure nonlocal coupling.
pub fn witness_minimum(n: usize) -> Result<(f64, f64), CliError> {
    let dim = qudit_net::EnsembleDim::new(n)?;
    let stop = 6.0 / n as f64;
    let taus: Vec<f64> = (1..=3000).map(|k| stop * k as f64 / 3000.0).collect();
    let records = run_gie(dim, 2, &Couplings::dimensionless_nonlocal(), &taus, false)?;
    let best = records.iter().min_by(|a, b| a.c1.total_cmp(&b.c1)).expect("grid is not empty");
    Ok((best.tau, best.c1))
}

pub fn params_report(cfg: &ParamsConfig) -> Result<Value, CliError> {
    let mut report = json!({ "version": env!("CARGO_PKG_VERSION") });
    let mut computed_hz = None;
    if let Some(dw) = &cfg.double_well {
        let spec = dw.spec().map_err(CliError::Config)?;
        let modes = solve_double_well(&spec)?;
        report["double_well"] = json!({
            "e_gs": modes.e_gs,
            "e_ex": modes.e_ex,
            "tunnel_splitting_hz": (modes.e_ex - modes.e_gs) / (2.0 * std::f64::consts::PI * qudit_net::params::constants::HBAR),
            "overlap_lr": modes.overlap(),
            "sigma_y": modes.sigma_y,
            "sigma_z": modes.sigma_z,
        });
        if let Some(geo) = &cfg.geometry {
            let c_dd = geo.c_dd.unwrap_or_else(c_dd_bohr);
            let c = couplings_dw(&modes, &modes, geo.displacement, spec.mass, c_dd)?;
            report["couplings"] = coupling_json(&c);
            computed_hz = Some(c.in_hz().2);
            report["c_dd"] = json!(c_dd);
        }
    } else if cfg.geometry.is_some() {
        return Err(CliError::Config("geometry: requires a double_well section".into()));
    }
    if let Some(cgb) = &cfg.cgb {
        let chi = cgb_coupling(cgb.delta_e, cgb.d).map_err(|e| CliError::Config(format!("cgb: {e}")))?;
        report["cgb"] = json!({ "chi_nloc": chi, "chi_nloc_hz": chi / (2.0 * std::f64::consts::PI) });
    }
    if let Some(bmv) = &cfg.bmv {
        let b = bmv_couplings(bmv.mass, bmv.d, bmv.d_prime).map_err(|e| CliError::Config(format!("bmv: {e}")))?;
        report["bmv"] = json!({ "chi_loc": b.chi_loc, "chi_nloc": b.chi_nloc, "chi_nz": b.chi_nz });
    }
    if let Some(tm) = &cfg.t_min {
        let hz = tm.chi_nloc_hz.or(computed_hz).ok_or_else(|| {
            CliError::Config("t_min: give chi_nloc_hz or a double_well and geometry section".into())
        })?;
        if !(hz.is_finite() && hz != 0.0) {
            return Err(CliError::Config("t_min: nonlocal coupling must be finite and nonzero".into()));
        }
        let (tau, c1) = witness_minimum(tm.n)?;
        // The same number read as cycles per second or as an angular rate.
        report["t_min"] = json!({
            "n": tm.n,
            "tau_min": tau,
            "c1_min": c1,
            "chi_nloc_hz": hz,
            "seconds": tau / (2.0 * std::f64::consts::PI * hz.abs()),
            "seconds_if_value_is_rad_per_s": tau / hz.abs(),
        });
    }
    Ok(report)
}

pub fn params(cfg: &ParamsConfig, common: &Common) -> Result<(), CliError> {
    let report = params_report(cfg)?;
    let path = destination(common, &cfg.output.path);
    to_destination(path.as_deref(), |out| write_json(&report, out))
}

/// Summary of one sweep point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: usize,
    pub error: Option<String>,
    pub min_c1: Option<(f64, f64)>,
    pub min_c2: Option<(f64, f64)>,
    pub tau_deph: Option<f64>,
}

fn minimum(table: &Table, column: &str) -> Option<(f64, f64)> {
    let taus = table.column("tau")?;
    let vals = table.column(column)?;
    taus.iter()
        .zip(&vals)
        .filter_map(|(t, v)| Some(((*v)?, (*t)?)))
        .fold(None, |best: Option<(f64, f64)>, p| match best {
            Some(b) if b.0 <= p.0 => Some(b),
            _ => Some(p),
        })
}

fn point_config(cfg: &RunConfig, parameter: SweepParameter, value: usize, scale: bool) -> RunConfig {
    let mut c = cfg.clone();
    c.sweep = None;
    match parameter {
        SweepParameter::N => {
            if scale {
                let f = cfg.ensemble.n as f64 / value as f64;
                c.protocol.tau_grid.start *= f;
                c.protocol.tau_grid.stop *= f;
            }
            c.ensemble.n = value;
        }
        SweepParameter::M => c.ensemble.m = value,
    }
    c
}

fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "sweep".into());
    path.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

pub fn sweep(cfg: &RunConfig, common: &Common) -> Result<(), CliError> {
    let sw = cfg.sweep.clone().ok_or_else(|| CliError::Config("sweep: section required".into()))?;
    if sw.values.is_empty() {
        return Err(CliError::Config("sweep.values: must not be empty".into()));
    }
    let path = destination(common, &cfg.output.path)
        .ok_or_else(|| CliError::Config("sweep: an output path is required (--out or output.path)".into()))?;
    let format = format_for(common, cfg.output.format, Some(&path));
    let ext = if format == Format::Json { "json" } else { "csv" };
    let label = if sw.parameter == SweepParameter::N { "n" } else { "m" };

    // Validate every point before running any.
    let points: Vec<(usize, RunConfig)> = sw
        .values
        .iter()
        .map(|&v| (v, point_config(cfg, sw.parameter, v, sw.scale_tau_with_n)))
        .collect();
    let validated: Vec<Result<Validated, String>> = points.iter().map(|(_, c)| c.validate()).collect();
    if let Some((v, Err(e))) = points.iter().zip(&validated).map(|((v, _), r)| (v, r)).find(|(_, r)| r.is_err()) {
        return Err(CliError::Config(format!("sweep value {v}: {e}")));
    }

    let mut rows = vec![];
    for ((value, c), v) in points.iter().zip(validated) {
        let v = v.expect("checked above");
        let row = match run_validated(&v, c, common.seed) {
            Ok(out) => {
                let kind = if v.kind == Kind::Gie { "gie" } else { "gid" };
                emit(Some(&sibling(&path, &format!("{label}{value}"), ext)), format, &out.table, kind, out.meta)?;
                SweepRow {
                    value: *value,
                    error: None,
                    min_c1: minimum(&out.table, "c1"),
                    min_c2: minimum(&out.table, "c2"),
                    tau_deph: out.gid.as_deref().and_then(dephasing_time),
                }
            }
            Err(e) => SweepRow { value: *value, error: Some(e.to_string()), min_c1: None, min_c2: None, tau_deph: None },
        };
        rows.push(row);
    }

    let fit = |pick: &dyn Fn(&SweepRow) -> Option<f64>| -> Option<(f64, f64)> {
        let (x, y): (Vec<f64>, Vec<f64>) = rows.iter().filter_map(|r| Some((r.value as f64, pick(r)?))).unzip();
        if x.len() < 2 {
            return None;
        }
        log_log_fit(&x, &y).ok()
    };
    let deph_fit = fit(&|r| r.tau_deph);
    let c2_fit = fit(&|r| r.min_c2.map(|m| m.1));

    let columns = [label, "tau_deph", "min_c1", "tau_min_c1", "min_c2", "tau_min_c2"];
    let table = Table {
        columns: columns.iter().map(|s| s.to_string()).collect(),
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    Some(r.value as f64),
                    r.tau_deph,
                    r.min_c1.map(|m| m.0),
                    r.min_c1.map(|m| m.1),
                    r.min_c2.map(|m| m.0),
                    r.min_c2.map(|m| m.1),
                ]
            })
            .collect(),
    };
    let fit_json = |f: Option<(f64, f64)>| f.map(|(s, c)| json!({ "exponent": s, "prefactor": c.exp() }));
    let summary = json!({
        "parameter": label,
        "tau_deph_fit": fit_json(deph_fit),
        "tau_min_c2_fit": fit_json(c2_fit),
        "failures": rows.iter().filter_map(|r| r.error.as_ref().map(|e| json!({ "value": r.value, "error": e }))).collect::<Vec<_>>(),
    });
    match format {
        Format::Json => {
            let mut doc = table_json(&table, "sweep", json!({ "version": env!("CARGO_PKG_VERSION"), "config": cfg }));
            doc["summary"] = summary.clone();
            to_destination(Some(&path), |out| write_json(&doc, out))?;
        }
        Format::Csv => {
            to_destination(Some(&path), |out| write_csv(&table, out))?;
            to_destination(Some(&sibling(&path, "fit", "json")), |out| write_json(&summary, out))?;
        }
    }
    let failed: Vec<String> = rows.iter().filter_map(|r| r.error.as_ref().map(|e| format!("{}={}: {e}", label, r.value))).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{} sweep point(s) failed: {}", failed.len(), failed.join("; "))))
    }
}
