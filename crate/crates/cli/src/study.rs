//! Study orchestration: independent solves run on a rayon pool and are
//! gathered in parameter order.

use std::path::PathBuf;
use std::time::Instant;

use cylspec_core::eigen::SolverOptions;
use cylspec_core::geometry::{CrossSectionSpec, Direction};
use cylspec_core::spectral::{
    decay_profile_unchecked, fit_slope, gap_condition_holds, refine_sweep, solve_cross_section_with, solve_full,
    solve_reduced, solve_slab, sweep_plan, upper_bound_quotient, BoundaryMode, CrossSectionResult, Discretization,
    SweepResult,
};
use cylspec_core::Error;
use rayon::prelude::*;

use crate::config::{BcConfig, ConfigError, StudyConfig, StudyKind};
use crate::dump;
use crate::record::{Provenance, Reference, Row, StudyRecord};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Record failed cells as NaN rows and continue.
    pub keep_going: bool,
    /// Write meshes and matrices of full-cylinder solves here.
    pub dump_dir: Option<PathBuf>,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct StudyOutcome {
    pub record: StudyRecord,
    pub summary: String,
}

/// Runs a validated configuration. Solver failures end up in the record;
/// only configuration problems are returned as errors.
pub fn run_study(cfg: &StudyConfig, kind: StudyKind, opts: &RunOptions) -> Result<StudyOutcome, ConfigError> {
    if let Some(k) = cfg.study.kind {
        if k != kind {
            return Err(ConfigError(format!("config declares study.kind = \"{k}\" but `{kind}` was requested")));
        }
    }
    cfg.validate()?;
    match opts.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| ConfigError(format!("cannot start {n} worker threads: {e}")))?
            .install(|| Runner::new(cfg, kind, opts)?.run()),
        None => Runner::new(cfg, kind, opts)?.run(),
    }
}

struct Runner<'a> {
    cfg: &'a StudyConfig,
    opts: &'a RunOptions,
    cross: CrossSectionSpec,
    a: cylspec_core::coefficient::CoefficientField,
    disc: Discretization,
    solver: SolverOptions,
    record: StudyRecord,
}

fn timed<T>(f: impl FnOnce() -> Result<T, Error>) -> (Result<T, Error>, f64) {
    let t = Instant::now();
    let r = f();
    (r, t.elapsed().as_secs_f64())
}

fn names(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}_{i}")).collect()
}

fn reference(name: &str, value: f64) -> Reference {
    Reference {
        name: name.to_string(),
        value,
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.10}")
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a StudyConfig, kind: StudyKind, opts: &'a RunOptions) -> Result<Self, ConfigError> {
        let source = serde_json::to_string(cfg).expect("config serializes");
        let provenance = Provenance::new(&source, cfg.solver.seed);
        let record = StudyRecord {
            id: format!("{}-{}", kind.name(), &provenance.config_sha256[..12]),
            kind,
            config: cfg.clone(),
            parameter_name: String::new(),
            value_names: Vec::new(),
            residual_names: Vec::new(),
            rows: Vec::new(),
            references: Vec::new(),
            derived: Vec::new(),
            provenance,
            failure: None,
        };
        Ok(Self {
            cfg,
            opts,
            cross: cfg.cross()?,
            a: cfg.coefficient()?,
            disc: cfg.discretization(),
            solver: cfg.solver_options(),
            record,
        })
    }

    fn run(mut self) -> Result<StudyOutcome, ConfigError> {
        let summary = match self.record.kind {
            StudyKind::CrossSection => self.cross_section(),
            StudyKind::Reduced => self.reduced(),
            StudyKind::Sweep => self.sweep(),
            StudyKind::Full => self.full(),
            StudyKind::Convergence => self.convergence(),
            StudyKind::Decay => self.decay()?,
            StudyKind::UpperBound => self.upper_bound(),
            StudyKind::DirichletBracket => self.dirichlet_bracket(),
        };
        self.record.sort_rows();
        let mut summary = summary;
        if let Some(f) = &self.record.failure {
            summary.push_str(&format!("\nFAILED: {f}"));
        } else if self.record.any_failed() {
            summary.push_str("\nFAILED: some cells failed (NaN rows)");
        }
        Ok(StudyOutcome {
            record: self.record,
            summary,
        })
    }

    fn stopped(&self) -> bool {
        self.record.failure.is_some()
    }

    /// Pushes rows for computed cells. Without `keep_going` the first failure
    /// (in parameter order) becomes the record failure and later cells are
    /// dropped. Returns the successful results, aligned with `params`.
    fn gather<T>(
        &mut self,
        series: &str,
        params: &[f64],
        results: Vec<(Result<T, Error>, f64)>,
        to_row: impl Fn(&T) -> (Vec<f64>, Vec<f64>, usize),
    ) -> Vec<Option<T>> {
        let widths = (self.record.value_names.len(), self.record.residual_names.len());
        let mut out = Vec::with_capacity(params.len());
        for (&p, (r, secs)) in params.iter().zip(results) {
            if self.stopped() {
                out.push(None);
                continue;
            }
            match r {
                Ok(v) => {
                    let (values, residuals, dofs) = to_row(&v);
                    self.record.rows.push(Row {
                        series: series.to_string(),
                        parameter: p,
                        values,
                        residuals,
                        dofs,
                        wall_time: secs,
                        failed: None,
                    });
                    out.push(Some(v));
                }
                Err(e) => {
                    let msg = format!("{series} at {} = {p}: {e}", self.record.parameter_name);
                    self.record.rows.push(Row::failure(series, p, widths, e.to_string()));
                    if !self.opts.keep_going {
                        self.record.failure = Some(msg);
                    }
                    out.push(None);
                }
            }
        }
        out
    }

    fn set_columns(&mut self, parameter: &str, values: Vec<String>, residuals: Vec<String>) {
        self.record.parameter_name = parameter.to_string();
        self.record.value_names = values;
        self.record.residual_names = residuals;
    }

    /// `μ₁` on the cross-section mesh matched to the study discretization.
    fn mu1(&mut self) -> Option<CrossSectionResult> {
        let iv = self.cross.intervals()[0];
        let n = self.disc.xi_cells(iv.1 - iv.0);
        match solve_cross_section_with(&self.cross, &self.a, n, self.disc.family, &self.solver) {
            Ok(cs) => {
                self.record.references.push(reference("mu1", cs.mu1));
                Some(cs)
            }
            Err(e) => {
                self.record.failure = Some(format!("cross-section solve: {e}"));
                None
            }
        }
    }

    fn cross_section(&mut self) -> String {
        let divisions = self.cfg.divisions();
        self.set_columns("n", vec!["mu1".into(), "gap_indicator".into()], vec!["residual".into()]);
        let (cross, a, family, solver) = (&self.cross, &self.a, self.disc.family, &self.solver);
        let results: Vec<_> = divisions
            .par_iter()
            .map(|&n| timed(|| solve_cross_section_with(cross, a, n, family, solver)))
            .collect();
        let params: Vec<f64> = divisions.iter().map(|&n| n as f64).collect();
        let sols = self.gather("mu1", &params, results, |cs| {
            (vec![cs.mu1, cs.gap_indicator], vec![cs.residual], cs.dofs)
        });
        let done: Vec<&CrossSectionResult> = sols.iter().flatten().collect();
        let Some(finest) = done.last() else {
            return "cross-section study produced no values".into();
        };
        self.record.references.push(reference("mu1", finest.mu1));
        let gap = gap_condition_holds(finest, None);
        self.record.derived.push(reference("gap_indicator", finest.gap_indicator));
        self.record.derived.push(reference("gap_condition", if gap { 1.0 } else { 0.0 }));
        if done.len() >= 3 && sols.iter().all(Option::is_some) {
            let k = done.len();
            let (a0, a1, a2) = (done[k - 3].mu1, done[k - 2].mu1, done[k - 1].mu1);
            let ratio = (params[k - 2] / params[k - 3]).ln();
            self.record.derived.push(reference("observed_rate", ((a0 - a1) / (a1 - a2)).ln() / ratio));
        }
        let prediction = if gap {
            "gap: lim λ_ℓ < μ₁"
        } else {
            "no gap: λ_ℓ = μ₁"
        };
        format!(
            "μ₁ = {} (n = {}), gap_indicator = {:.3e}; prediction: {prediction}",
            fmt(finest.mu1),
            params[done.len() - 1],
            finest.gap_indicator
        )
    }

    fn direction_label(d: &Direction) -> String {
        if d.dim() == 1 {
            if d.components()[0] > 0.0 { "+1".into() } else { "-1".into() }
        } else {
            format!("theta={:.6}", d.angle())
        }
    }

    fn reduced(&mut self) -> String {
        let dirs = match self.cfg.directions() {
            Ok(d) => d,
            Err(e) => return e.0,
        };
        let lengths = self.cfg.lengths();
        self.set_columns("length", vec!["z".into()], vec!["residual".into()]);
        let mu1 = self.mu1().map(|c| c.mu1);
        let (a, cross, disc, solver) = (&self.a, &self.cross, &self.disc, &self.solver);
        let results: Vec<_> = dirs
            .par_iter()
            .map(|d| timed(|| solve_reduced(a, d, cross, &lengths, disc, solver)))
            .collect();
        let mut lines = Vec::new();
        for (d, (r, secs)) in dirs.iter().zip(results) {
            let series = format!("Z {}", Self::direction_label(d));
            let per_cell = match r {
                Ok(res) => (0..lengths.len())
                    .map(|i| Ok((res.values[i], res.residuals[i], res.dofs[i])))
                    .zip(std::iter::repeat(secs / lengths.len() as f64))
                    .collect::<Vec<_>>(),
                Err(e) => vec![(Err(e), secs)],
            };
            let params = if per_cell.len() == lengths.len() { lengths.clone() } else { vec![lengths[0]] };
            let vals = self.gather(&series, &params, per_cell, |&(v, r, n)| (vec![v], vec![r], n));
            if let Some(Some((z, _, _))) = vals.last() {
                let prev = vals.len().checked_sub(2).and_then(|i| vals[i]).map(|t| t.0);
                let rel = prev.map(|p| (p - z).abs() / z.abs()).unwrap_or(f64::NAN);
                self.record.derived.push(reference(&format!("z_extrap {}", Self::direction_label(d)), *z));
                self.record.derived.push(reference(&format!("relative_change {}", Self::direction_label(d)), rel));
                lines.push(format!(
                    "Z^ν({}) ≈ {} (relative change {:.2e}, {})",
                    Self::direction_label(d),
                    fmt(*z),
                    rel,
                    if rel <= cylspec_core::spectral::REDUCED_REL_TOL { "converged" } else { "not converged" }
                ));
            }
            if self.stopped() {
                break;
            }
        }
        if let (Some(sizes), false) = (self.cfg.study.slab_sizes.clone(), self.stopped()) {
            for d in &dirs {
                let (a, cross, disc, solver) = (&self.a, &self.cross, &self.disc, &self.solver);
                let results: Vec<_> = sizes
                    .par_iter()
                    .map(|&k| timed(|| solve_slab(a, d, cross, k, disc, solver)))
                    .collect();
                let series = format!("s {}", Self::direction_label(d));
                self.gather(&series, &sizes, results, |s| (vec![s.value], vec![s.residual], s.dofs));
            }
        }
        if let Some(m) = mu1 {
            lines.push(format!("μ₁ = {}", fmt(m)));
        }
        lines.join("\n")
    }

    /// Grid sweep (plus optional refinement); returns the sweep minimum.
    fn sweep_rows(&mut self) -> Option<SweepResult> {
        let m = self.a.m();
        let plan = match sweep_plan(m, self.cfg.samples()) {
            Ok(p) => p,
            Err(e) => {
                self.record.failure = Some(e.to_string());
                return None;
            }
        };
        let lengths = self.cfg.lengths();
        let (a, cross, disc, solver) = (&self.a, &self.cross, &self.disc, &self.solver);
        let results: Vec<_> = plan
            .par_iter()
            .map(|d| timed(|| solve_reduced(a, d, cross, &lengths, disc, solver)))
            .collect();
        let params: Vec<f64> = plan
            .iter()
            .map(|d| if m == 1 { d.components()[0] } else { d.angle() })
            .collect();
        let last = lengths.len() - 1;
        let vals = self.gather("grid", &params, results, |r| {
            (vec![r.extrapolated], vec![r.residuals[last]], r.dofs[last])
        });
        let samples: Vec<(Direction, f64)> = plan
            .iter()
            .zip(&vals)
            .filter_map(|(d, v)| v.as_ref().map(|r| (d.clone(), r.extrapolated)))
            .collect();
        if samples.is_empty() || self.stopped() {
            return None;
        }
        let mut sweep = SweepResult::from_samples(samples).ok()?;
        if self.cfg.study.refine.unwrap_or(false) && m == 2 {
            let before = sweep.refined.len();
            let (a, cross, disc, solver) = (&self.a, &self.cross, &self.disc, &self.solver);
            let mut residuals = Vec::new();
            let refined = refine_sweep(sweep.clone(), |d| {
                let r = solve_reduced(a, d, cross, &lengths, disc, solver)?;
                residuals.push((r.residuals[last], r.dofs[last]));
                Ok(r.extrapolated)
            });
            match refined {
                Ok(s) => {
                    for ((d, v), (res, dofs)) in s.refined[before..].iter().zip(&residuals) {
                        self.record.rows.push(Row {
                            series: "refined".into(),
                            parameter: d.angle(),
                            values: vec![*v],
                            residuals: vec![*res],
                            dofs: *dofs,
                            wall_time: 0.0,
                            failed: None,
                        });
                    }
                    sweep = s;
                }
                Err(e) => self.record.failure = Some(format!("sweep refinement: {e}")),
            }
        }
        self.record.references.push(reference("min_z", sweep.min_value));
        let arg = if m == 1 { sweep.argmin_direction.components()[0] } else { sweep.argmin_direction.angle() };
        self.record.derived.push(reference("argmin", arg));
        self.record.derived.push(reference("max_adjacent_jump", sweep.max_adjacent_jump()));
        Some(sweep)
    }

    fn sweep(&mut self) -> String {
        let param = if self.a.m() == 1 { "nu" } else { "theta" };
        self.set_columns(param, vec!["z".into()], vec!["residual".into()]);
        let mu1 = self.mu1().map(|c| c.mu1);
        let Some(s) = self.sweep_rows() else {
            return "direction sweep failed".into();
        };
        let arg = Self::direction_label(&s.argmin_direction);
        let mut out = format!("min_ν Z^ν = {} at {arg}", fmt(s.min_value));
        if let Some(m) = mu1 {
            out.push_str(&format!(", μ₁ = {}, gap vs μ₁ = {:.6e}", fmt(m), m - s.min_value));
        }
        out
    }

    fn full_rows(&mut self, series: &str, scales: &[f64], k: usize, mode: BoundaryMode) -> Vec<Option<Vec<f64>>> {
        let cap = self.cfg.solver.dof_cap;
        let cyls: Vec<_> = match scales.iter().map(|&l| self.cfg.cylinder(l)).collect::<Result<Vec<_>, _>>() {
            Ok(c) => c,
            Err(e) => {
                self.record.failure = Some(e.0);
                return vec![None; scales.len()];
            }
        };
        let (a, disc, solver) = (&self.a, &self.disc, &self.solver);
        let dump = self.opts.dump_dir.clone();
        let results: Vec<_> = cyls
            .par_iter()
            .map(|cyl| {
                timed(|| {
                    let sol = solve_full(cyl, a, k, disc, mode, solver, Some(cap))?;
                    if let Some(dir) = &dump {
                        write_dumps(dir, series, cyl.scale, &sol)
                            .map_err(|e| Error::InvalidArgument(format!("dump failed: {e}")))?;
                    }
                    Ok((sol.eigen.values, sol.eigen.residuals, sol.pair.n()))
                })
            })
            .collect();
        self.gather(series, scales, results, |(v, r, n)| (v.clone(), r.clone(), *n))
            .into_iter()
            .map(|o| o.map(|t| t.0))
            .collect()
    }

    fn full(&mut self) -> String {
        let k = self.cfg.k();
        let (mode, name) = match self.cfg.study.bc.unwrap_or(BcConfig::Mixed) {
            BcConfig::Mixed => (BoundaryMode::Mixed, "lambda"),
            BcConfig::Dirichlet => (BoundaryMode::Dirichlet, "sigma"),
        };
        self.set_columns("scale", names(name, k), names("residual", k));
        let mu1 = self.mu1().map(|c| c.mu1);
        let scales = self.cfg.scales();
        let vals = self.full_rows(name, &scales, k, mode);
        let mut out: Vec<String> = scales
            .iter()
            .zip(&vals)
            .filter_map(|(l, v)| v.as_ref().map(|v| format!("{name}_{l} = {}", fmt(v[0]))))
            .collect();
        if let Some(m) = mu1 {
            out.push(format!("μ₁ = {}", fmt(m)));
        }
        out.join(", ")
    }

    fn convergence(&mut self) -> String {
        let k = self.cfg.k();
        let param = if self.a.m() == 1 { "nu" } else { "theta" };
        self.set_columns("scale", names("lambda", k), names("residual", k));
        let Some(cs) = self.mu1() else {
            return "cross-section solve failed".into();
        };
        let scales = self.cfg.scales();
        let vals = self.full_rows("lambda", &scales, k, BoundaryMode::Mixed);
        if self.stopped() {
            return format!("μ₁ = {}", fmt(cs.mu1));
        }
        // direction sweep rows share the value column (Z in place of λ¹)
        let full_rows = std::mem::take(&mut self.record.rows);
        let saved = (self.record.parameter_name.clone(), self.record.value_names.clone(), self.record.residual_names.clone());
        self.set_columns(param, vec!["z".into()], vec!["residual".into()]);
        let sweep = self.sweep_rows();
        let sweep_rows: Vec<Row> = std::mem::take(&mut self.record.rows)
            .into_iter()
            .map(|mut r| {
                r.series = format!("z {}", r.series);
                r.values.resize(k, f64::NAN);
                r.residuals.resize(k, f64::NAN);
                r
            })
            .collect();
        self.record.rows = full_rows;
        self.record.rows.extend(sweep_rows);
        self.record.parameter_name = saved.0;
        self.record.value_names = saved.1;
        self.record.residual_names = saved.2;
        let last = scales.iter().zip(&vals).rev().find_map(|(l, v)| v.as_ref().map(|v| (*l, v[0])));
        let mut out = Vec::new();
        if let Some(s) = &sweep {
            out.push(format!("min_ν Z^ν = {}", fmt(s.min_value)));
        }
        if let Some((l, lam)) = last {
            out.push(format!("λ_{l} = {}", fmt(lam)));
            out.push(format!("gap vs μ₁ = {:.6e}", cs.mu1 - lam));
            self.record.derived.push(reference("gap", cs.mu1 - lam));
            if let Some(s) = &sweep {
                let rel = (lam - s.min_value).abs() / s.min_value;
                self.record.derived.push(reference("relative_difference", rel));
                out.push(format!("|λ − min Z|/min Z = {rel:.3e}"));
            }
        }
        out.push(format!("μ₁ = {}", fmt(cs.mu1)));
        out.join(", ")
    }

    fn decay(&mut self) -> Result<String, ConfigError> {
        let l = self.cfg.single_scale();
        let radii = self.cfg.radii();
        self.set_columns(
            "radius",
            vec!["mass".into(), "gradient_mass".into(), "measure_fraction".into()],
            vec!["residual".into()],
        );
        let Some(cs) = self.mu1() else {
            return Ok("cross-section solve failed".into());
        };
        let control = self.cfg.study.control.unwrap_or(false);
        if !control && !gap_condition_holds(&cs, None) {
            return Err(ConfigError(format!("{} (set study.control = true for a control run)", Error::DecayHypotheses)));
        }
        let cyl = self.cfg.cylinder(l)?;
        let (r, secs) = timed(|| decay_profile_unchecked(&cyl, &self.a, &radii, &self.disc, &self.solver));
        match r {
            Ok(p) => {
                for (i, &rad) in radii.iter().enumerate() {
                    self.record.rows.push(Row {
                        series: "mass".into(),
                        parameter: rad,
                        values: vec![p.masses[i], p.gradient_masses[i], p.measure_fractions[i]],
                        residuals: vec![p.residual],
                        dofs: p.dofs,
                        wall_time: secs,
                        failed: None,
                    });
                }
                self.record.derived.push(reference("slope", p.slope));
                self.record.derived.push(reference("raw_slope", p.raw_slope));
                self.record.derived.push(reference("total_mass", p.total_mass));
                self.record.derived.push(reference("eigenvalue", p.eigenvalue));
                Ok(format!(
                    "ℓ = {l}: λ = {}, fitted log-slope {:.4} (raw {:.4}), total mass {:.12}",
                    fmt(p.eigenvalue),
                    p.slope,
                    p.raw_slope,
                    p.total_mass
                ))
            }
            Err(e) => {
                let widths = (3, 1);
                self.record.rows.push(Row::failure("mass", radii[0], widths, e.to_string()));
                self.record.failure = Some(format!("decay profile: {e}"));
                Ok(String::new())
            }
        }
    }

    fn upper_bound(&mut self) -> String {
        let l = self.cfg.single_scale();
        let face = self.cfg.study.face.unwrap_or(0);
        let sizes = self.cfg.sizes();
        self.set_columns("size", vec!["quotient".into(), "z_k".into()], vec!["residual".into()]);
        if self.mu1().is_none() {
            return "cross-section solve failed".into();
        }
        let cyl = match self.cfg.cylinder(l) {
            Ok(c) => c,
            Err(e) => {
                self.record.failure = Some(e.0);
                return String::new();
            }
        };
        let (a, disc, solver, cross) = (self.a.clone(), self.disc.clone(), self.solver.clone(), self.cross.clone());
        let (a, disc, solver) = (&a, &disc, &solver);
        let results: Vec<_> = sizes
            .par_iter()
            .map(|&k| timed(|| upper_bound_quotient(&cyl, a, face, k, disc, solver)))
            .collect();
        let ubs = self.gather("quotient", &sizes, results, |u| {
            (vec![u.quotient, u.reduced_value], vec![u.reduced_residual], u.dofs)
        });
        if self.stopped() {
            return String::new();
        }
        let nu = cyl.base.face_normal(face);
        let lengths = self.cfg.lengths();
        let cap = self.cfg.solver.dof_cap;
        let (full, reduced) = rayon::join(
            || solve_full(&cyl, a, 1, disc, BoundaryMode::Mixed, solver, Some(cap)),
            || solve_reduced(a, &nu, &cross, &lengths, disc, solver),
        );
        let mut out = Vec::new();
        match full {
            Ok(f) => {
                self.record.references.push(reference("lambda", f.eigen.values[0]));
                out.push(format!("λ_{l} = {}", fmt(f.eigen.values[0])));
            }
            Err(e) => self.record.failure = Some(format!("full solve: {e}")),
        }
        match reduced {
            Ok(r) => {
                self.record.references.push(reference("z_extrap", r.extrapolated));
                out.push(format!("Z^ν = {}", fmt(r.extrapolated)));
            }
            Err(e) => self.record.failure = Some(format!("reduced solve: {e}")),
        }
        for (k, u) in sizes.iter().zip(&ubs) {
            if let Some(u) = u {
                out.push(format!("q(K={k}) = {}", fmt(u.quotient)));
            }
        }
        out.join(", ")
    }

    fn dirichlet_bracket(&mut self) -> String {
        let k = self.cfg.k();
        self.set_columns("scale", names("sigma", k), names("residual", k));
        let Some(cs) = self.mu1() else {
            return "cross-section solve failed".into();
        };
        let scales = self.cfg.scales();
        let vals = self.full_rows("sigma", &scales, k, BoundaryMode::Dirichlet);
        let mut out = vec![format!("μ₁ = {}", fmt(cs.mu1))];
        let pts: Vec<(f64, f64)> = scales
            .iter()
            .zip(&vals)
            .filter_map(|(l, v)| v.as_ref().map(|v| (*l, v[0] - cs.mu1)))
            .collect();
        for (l, d) in &pts {
            out.push(format!("σ_{l} − μ₁ = {d:.6e}"));
        }
        if pts.len() >= 2 && pts.iter().all(|p| p.1 > 0.0) {
            let x: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
            let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
            let e = fit_slope(&x, &y);
            self.record.derived.push(reference("exponent", e));
            out.push(format!("log-log exponent {e:.4}"));
        }
        out.join(", ")
    }
}

fn write_dumps(
    dir: &std::path::Path,
    series: &str,
    scale: f64,
    sol: &cylspec_core::spectral::FullSolution,
) -> std::io::Result<()> {
    use std::fs::File;
    use std::io::BufWriter;
    std::fs::create_dir_all(dir)?;
    let tag = format!("{series}_l{scale}");
    dump::write_mesh(&sol.mesh, BufWriter::new(File::create(dir.join(format!("mesh_{tag}.txt")))?))?;
    dump::write_matrix(&sol.pair.stiffness, BufWriter::new(File::create(dir.join(format!("stiffness_{tag}.txt")))?))?;
    dump::write_matrix(&sol.pair.mass, BufWriter::new(File::create(dir.join(format!("mass_{tag}.txt")))?))?;
    Ok(())
}
