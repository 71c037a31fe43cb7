//! Convergence studies: the lid-driven cavity table and the manufactured
//! solution rates, with CSV/JSON persistence.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::CornerConvention;
use crate::elements::ElementPair;
use crate::error::{Error, Result};
use crate::field::FeFunction;
use crate::mesh::{build_uniform_square_mesh, Mesh};
use crate::postprocess::{compute_eoc, mms_solve, successive_l4_error, MmsErrors};
use crate::solver::{newton_solve, NewtonConfig, NewtonReport};
use crate::vtk::export_vtk;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StudyKind {
    #[default]
    Cavity,
    Mms,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub kind: StudyKind,
    pub pair: ElementPair,
    /// Subdivisions per side; each level doubles the previous one.
    pub levels: Vec<usize>,
    pub nu: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub corner: CornerConvention,
    pub out: Option<PathBuf>,
    pub json: Option<PathBuf>,
    /// Directory receiving one VTK file per level.
    pub vtk: Option<PathBuf>,
    /// Solve all levels concurrently (higher peak memory).
    pub parallel_levels: bool,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            kind: StudyKind::Cavity,
            pair: ElementPair::TaylorHood,
            levels: vec![16, 32, 64, 128],
            nu: 1.0,
            tol: 1e-9,
            max_iter: 50,
            corner: CornerConvention::Leaky,
            out: None,
            json: None,
            vtk: None,
            parallel_levels: false,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::InvalidInput("no levels given".into()));
        }
        if self.levels[0] == 0 {
            return Err(Error::ZeroSubdivisions);
        }
        if self.kind == StudyKind::Cavity && self.levels[0] % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "cavity levels need an even coarsest n_div (its half is solved too), got {}",
                self.levels[0]
            )));
        }
        if let Some(w) = self.levels.windows(2).find(|w| w[1] != 2 * w[0]) {
            return Err(Error::InvalidInput(format!("levels must double: {} -> {}", w[0], w[1])));
        }
        self.newton().validate()
    }

    pub fn newton(&self) -> NewtonConfig {
        NewtonConfig {
            nu: self.nu,
            tol: self.tol,
            max_iter: self.max_iter,
            pair: self.pair,
            corner: self.corner,
            ..Default::default()
        }
    }
}

/// One row of the cavity table. `e_l4` on a level with `n_div = n` is the
/// distance between the solutions on levels `n / 2` and `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub nv: usize,
    pub h: f64,
    pub e_l4: f64,
    pub eoc: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MmsRow {
    pub nv: usize,
    pub h: f64,
    pub e_h1_u: f64,
    pub eoc_h1_u: Option<f64>,
    pub e_l2_u: f64,
    pub eoc_l2_u: Option<f64>,
    pub e_l2_p: f64,
    pub eoc_l2_p: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub n_div: usize,
    pub nv: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Final relative H1 increment.
    pub last_increment: Option<f64>,
    pub convergence_order: Option<f64>,
}

impl LevelSummary {
    fn of(mesh: &Mesh, report: &NewtonReport) -> Self {
        LevelSummary {
            n_div: mesh.n_div().unwrap_or(0),
            nv: mesh.n_vertices(),
            iterations: report.iterations,
            converged: report.converged,
            last_increment: report.relative_increments.last().copied(),
            convergence_order: report.convergence_order(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub rows: Vec<ConvergenceRow>,
    pub mms_rows: Vec<MmsRow>,
    /// Newton summaries, including the extra coarse level of a cavity
    /// study.
    pub levels: Vec<LevelSummary>,
    pub notes: Vec<String>,
}

impl StudyResult {
    pub fn eoc(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.eoc).collect()
    }
}

fn eoc_column(errors: &[f64], hs: &[f64]) -> Result<Vec<Option<f64>>> {
    if errors.len() < 2 {
        return Ok(vec![None; errors.len()]);
    }
    Ok(std::iter::once(None).chain(compute_eoc(errors, hs)?.into_iter().map(Some)).collect())
}

fn notes(config: &StudyConfig) -> Vec<String> {
    let mut notes = vec![format!("viscosity nu = {} (configurable; default 1)", config.nu)];
    if config.kind == StudyKind::Cavity {
        notes.push(format!(
            "e_l4 on level n compares levels n/2 and n; level {} solved as the extra coarse level",
            config.levels.first().map_or(0, |n| n / 2)
        ));
    }
    notes
}

fn solve_level(config: &StudyConfig, n_div: usize) -> Result<(Arc<Mesh>, NewtonReport)> {
    let mesh = Arc::new(build_uniform_square_mesh(n_div)?);
    let report = newton_solve(&config.newton(), &mesh)?;
    if !report.converged {
        return Err(Error::StudyFailed {
            n_div,
            reason: format!(
                "Newton iteration {} after {} iterations",
                if report.diverged { "diverged" } else { "did not converge" },
                report.iterations
            ),
        });
    }
    if let Some(dir) = &config.vtk {
        let name = format!("cavity_{}_{}_n{n_div}.vtk", config.pair, config.corner);
        export_vtk(&report.velocity, &report.pressure, &dir.join(name))?;
    }
    Ok((mesh, report))
}

/// Cavity table: solves every level plus the level with half the coarsest
/// `n_div`, then reports successive L4 errors and their orders. The row of
/// level `n` carries `||u_{n/2} - u_n||_{L4}` and the mesh size of level `n`.
pub fn run_cavity_study(config: &StudyConfig) -> Result<StudyResult> {
    if config.kind != StudyKind::Cavity {
        return Err(Error::InvalidInput("not a cavity study".into()));
    }
    config.validate()?;
    if let Some(dir) = &config.vtk {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut all = vec![config.levels[0] / 2];
    all.extend(&config.levels);

    let mut rows = Vec::with_capacity(config.levels.len());
    let mut levels = Vec::with_capacity(all.len());
    let mut push_error = |coarse: &FeFunction, fine: &(Arc<Mesh>, NewtonReport)| -> Result<()> {
        let e = successive_l4_error(coarse, &fine.1.velocity).map_err(|e| Error::StudyFailed {
            n_div: fine.0.n_div().unwrap_or(0),
            reason: e.to_string(),
        })?;
        rows.push(ConvergenceRow {
            nv: fine.0.n_vertices(),
            h: fine.0.h(),
            e_l4: e,
            eoc: None,
        });
        Ok(())
    };
    if config.parallel_levels {
        let solved: Vec<_> = all.par_iter().map(|&n| solve_level(config, n)).collect::<Result<_>>()?;
        for w in solved.windows(2) {
            push_error(&w[0].1.velocity, &w[1])?;
        }
        levels.extend(solved.iter().map(|(m, r)| LevelSummary::of(m, r)));
    } else {
        // keep only the previous level alive
        let mut prev: Option<(Arc<Mesh>, NewtonReport)> = None;
        for &n in &all {
            let cur = solve_level(config, n)?;
            levels.push(LevelSummary::of(&cur.0, &cur.1));
            if let Some(p) = &prev {
                push_error(&p.1.velocity, &cur)?;
            }
            prev = Some(cur);
        }
    }
    let errors: Vec<f64> = rows.iter().map(|r| r.e_l4).collect();
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    for (row, eoc) in rows.iter_mut().zip(eoc_column(&errors, &hs)?) {
        row.eoc = eoc;
    }
    Ok(StudyResult {
        config: config.clone(),
        rows,
        mms_rows: vec![],
        levels,
        notes: notes(config),
    })
}

/// Manufactured-solution rates in the H1 and L2 velocity and L2 pressure
/// norms.
pub fn run_mms_study(config: &StudyConfig) -> Result<StudyResult> {
    if config.kind != StudyKind::Mms {
        return Err(Error::InvalidInput("not a manufactured-solution study".into()));
    }
    config.validate()?;
    if let Some(dir) = &config.vtk {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let newton = config.newton();
    let level = |n: usize| -> Result<MmsErrors> {
        let (errors, report) = mms_solve(&newton, n)?;
        if let Some(dir) = &config.vtk {
            let name = format!("mms_{}_n{n}.vtk", config.pair);
            export_vtk(&report.velocity, &report.pressure, &dir.join(name))?;
        }
        Ok(errors)
    };
    let errs: Vec<MmsErrors> = if config.parallel_levels {
        config.levels.par_iter().map(|&n| level(n)).collect::<Result<_>>()?
    } else {
        config.levels.iter().map(|&n| level(n)).collect::<Result<_>>()?
    };
    let hs: Vec<f64> = errs.iter().map(|e| e.h).collect();
    let column = |f: fn(&MmsErrors) -> f64| eoc_column(&errs.iter().map(f).collect::<Vec<_>>(), &hs);
    let (c1, c2, c3) = (column(|e| e.h1_semi_velocity)?, column(|e| e.l2_velocity)?, column(|e| e.l2_pressure)?);
    let mms_rows = errs
        .iter()
        .enumerate()
        .map(|(i, e)| MmsRow {
            nv: e.nv,
            h: e.h,
            e_h1_u: e.h1_semi_velocity,
            eoc_h1_u: c1[i],
            e_l2_u: e.l2_velocity,
            eoc_l2_u: c2[i],
            e_l2_p: e.l2_pressure,
            eoc_l2_p: c3[i],
        })
        .collect();
    let levels = errs
        .iter()
        .map(|e| LevelSummary {
            n_div: e.n_div,
            nv: e.nv,
            iterations: e.newton_iterations,
            converged: true,
            last_increment: None,
            convergence_order: None,
        })
        .collect();
    Ok(StudyResult {
        config: config.clone(),
        rows: vec![],
        mms_rows,
        levels,
        notes: notes(config),
    })
}

pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    match config.kind {
        StudyKind::Cavity => run_cavity_study(config),
        StudyKind::Mms => run_mms_study(config),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            _ => Err(Error::InvalidInput(format!("unknown export format '{s}'"))),
        }
    }
}

/// `%g`-style formatting with 6 significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    // rounding may bump the exponent (9.999995 -> 10.0000)
    let sci = format!("{x:.5e}");
    let exp = sci.split('e').nth(1).and_then(|e| e.parse::<i32>().ok()).unwrap_or(exp);
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..6).contains(&exp) {
        trim(format!("{x:.*}", (5 - exp).max(0) as usize))
    } else {
        let (m, _) = sci.split_once('e').unwrap();
        format!("{}e{}{:02}", trim(m.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

struct Csv<'a>(&'a StudyResult);

impl fmt::Display for Csv<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map(sig6).unwrap_or_default();
        match self.0.config.kind {
            StudyKind::Cavity => {
                writeln!(f, "nv,h,e_l4,eoc")?;
                for r in &self.0.rows {
                    writeln!(f, "{},{},{},{}", r.nv, sig6(r.h), sig6(r.e_l4), opt(r.eoc))?;
                }
            }
            StudyKind::Mms => {
                writeln!(f, "nv,h,e_h1_u,eoc_h1_u,e_l2_u,eoc_l2_u,e_l2_p,eoc_l2_p")?;
                for r in &self.0.mms_rows {
                    writeln!(
                        f,
                        "{},{},{},{},{},{},{},{}",
                        r.nv,
                        sig6(r.h),
                        sig6(r.e_h1_u),
                        opt(r.eoc_h1_u),
                        sig6(r.e_l2_u),
                        opt(r.eoc_l2_u),
                        sig6(r.e_l2_p),
                        opt(r.eoc_l2_p)
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// CSV text of a study (6 significant digits).
pub fn to_csv(result: &StudyResult) -> String {
    Csv(result).to_string()
}

/// Writes `result` as CSV or as lossless JSON.
pub fn export_results(result: &StudyResult, format: ExportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ExportFormat::Csv => to_csv(result),
        ExportFormat::Json => serde_json::to_string_pretty(result)?,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
