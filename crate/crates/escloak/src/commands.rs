//! The subcommands. Each returns the rendered primary output plus any
//! side files; the caller writes them.

use std::path::PathBuf;

use escloak_core::asymptotics::log_spaced;
use escloak_core::design::{best_run, bare_objective, optimize_seeded, seed_sequence, DesignResult, OptimizeOptions};
use escloak_core::farfield::{
    far_field_amplitude, plane_wave_gammas, quadrature_parts, parseval_parts, total_scattering_strength,
};
use escloak_core::harmonics::SphericalDirection;
use escloak_core::medium::{LayerStack, Material};
use escloak_core::scattering::{
    direct_solve_oracle, esc_table, solution_distance, solve_modes, EscPair, EscTable,
};
use escloak_core::transform::{cloak_at, RadialMap};
use escloak_core::{Complex64, ModeKind};
use log::info;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RunConfig, DEFAULT_ORDER, DEFAULT_SEEDS};
use crate::error::CliError;
use crate::output::{json, num, CsvTable, Format};

pub const FARFIELD_COLUMNS: [&str; 14] = [
    "theta", "phi", "up_r_re", "up_r_im", "up_theta_re", "up_theta_im", "up_phi_re", "up_phi_im", "us_r_re",
    "us_r_im", "us_theta_re", "us_theta_im", "us_phi_re", "us_phi_im",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub log: bool,
}

impl OmegaRange {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let ok = self.lo.is_finite() && self.hi.is_finite() && self.lo > 0.0 && self.hi >= self.lo && self.count >= 1;
        if !ok {
            return Err(CliError::config("--omega-range", "need 0 < LO <= HI and N >= 1"));
        }
        if self.count == 1 {
            return Ok(vec![self.lo]);
        }
        Ok(if self.log {
            log_spaced(self.lo, self.hi, self.count)
        } else {
            (0..self.count).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64).collect()
        })
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    pub config: Option<RunConfig>,
    pub format: Format,
    pub seed: Option<u64>,
    pub omega: Option<f64>,
    pub omega_range: Option<OmegaRange>,
    pub order: Option<usize>,
    pub eps: Option<f64>,
    pub n_theta: usize,
    pub n_phi: usize,
    pub n_r: usize,
    pub r_max: f64,
    pub tables: Option<PathBuf>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            config: None,
            format: Format::Csv,
            seed: None,
            omega: None,
            omega_range: None,
            order: None,
            eps: None,
            n_theta: 18,
            n_phi: 36,
            n_r: 40,
            r_max: 2.5,
            tables: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Output {
    pub body: String,
    pub side_files: Vec<(PathBuf, String)>,
}

impl Output {
    fn body(body: String) -> Self {
        Self { body, side_files: Vec::new() }
    }
}

impl Options {
    fn config(&self) -> Result<&RunConfig, CliError> {
        self.config.as_ref().ok_or_else(|| CliError::config("--config", "this subcommand needs a config file"))
    }

    fn order(&self, default: usize) -> usize {
        self.order.or(self.config.as_ref().and_then(|c| c.order)).unwrap_or(default)
    }

    fn single_omega(&self) -> Result<f64, CliError> {
        let w = self.omega.or(self.config.as_ref().and_then(|c| c.omega)).unwrap_or(1.0);
        if w.is_finite() && w > 0.0 {
            Ok(w)
        } else {
            Err(CliError::config("omega", format!("must be finite and positive, got {w}")))
        }
    }

    fn omegas(&self) -> Result<Vec<f64>, CliError> {
        match &self.omega_range {
            Some(r) => r.grid(),
            None => Ok(vec![self.single_omega()?]),
        }
    }
}

#[derive(Serialize)]
struct RowJson {
    n: usize,
    pair: String,
    re: f64,
    im: f64,
    abs: f64,
}

#[derive(Serialize)]
struct TableJson {
    omega: f64,
    order: usize,
    rows: Vec<RowJson>,
}

fn table_json(t: &EscTable) -> TableJson {
    let rows = t
        .rows
        .iter()
        .flat_map(|r| {
            r.entries().map(move |(p, w)| RowJson { n: r.n, pair: p.to_string(), re: w.re, im: w.im, abs: w.norm() })
        })
        .collect();
    TableJson { omega: t.omega, order: t.order(), rows }
}

fn tables_csv(tables: &[EscTable]) -> Result<String, CliError> {
    let mut csv = CsvTable::new(&["omega", "n", "pair", "re", "im", "abs"]);
    for t in tables {
        for r in &t.rows {
            for (p, w) in r.entries() {
                csv.push(vec![num(t.omega), r.n.to_string(), p.to_string(), num(w.re), num(w.im), num(w.norm())]);
            }
        }
    }
    csv.render()
}

fn tables_for(stack: &LayerStack, omegas: &[f64], order: usize) -> Result<Vec<EscTable>, CliError> {
    omegas.par_iter().map(|&w| esc_table(stack, w, order).map_err(CliError::from)).collect()
}

pub fn compute(opts: &Options) -> Result<Output, CliError> {
    let stack = opts.config()?.stack()?;
    let order = opts.order(DEFAULT_ORDER);
    let omegas = opts.omegas()?;
    info!("computing ESC tables at {} frequencies, T = {order}", omegas.len());
    let tables = tables_for(&stack, &omegas, order)?;
    Ok(Output::body(match opts.format {
        Format::Csv => tables_csv(&tables)?,
        Format::Json => {
            #[derive(Serialize)]
            struct Doc {
                tables: Vec<TableJson>,
            }
            json(&Doc { tables: tables.iter().map(table_json).collect() })?
        }
    }))
}

#[derive(Serialize)]
struct SweepPoint {
    omega: f64,
    strength: f64,
    strength_bare_ratio: f64,
}

pub fn sweep(opts: &Options) -> Result<Output, CliError> {
    let cfg = opts.config()?;
    let stack = cfg.stack()?;
    let bare = stack.bare();
    let wave = cfg.incident_wave()?;
    let order = opts.order(DEFAULT_ORDER);
    let omegas = match &opts.omega_range {
        Some(r) => r.grid()?,
        None => return Err(CliError::config("--omega-range", "sweep needs LO HI N")),
    };
    info!("sweeping {} frequencies in [{}, {}]", omegas.len(), omegas[0], omegas[omegas.len() - 1]);
    let bg = *stack.background();
    let results: Vec<(EscTable, SweepPoint)> = omegas
        .par_iter()
        .map(|&w| {
            let t = esc_table(&stack, w, order)?;
            let tb = esc_table(&bare, w, order)?;
            let s = total_scattering_strength(&plane_wave_gammas(&t, &wave, &bg, order)?, &bg, w)?;
            let sb = total_scattering_strength(&plane_wave_gammas(&tb, &wave, &bg, order)?, &bg, w)?;
            Ok((t, SweepPoint { omega: w, strength: s, strength_bare_ratio: s / sb }))
        })
        .collect::<Result<_, CliError>>()?;
    let (tables, summary): (Vec<EscTable>, Vec<SweepPoint>) = results.into_iter().unzip();
    let mut out = match opts.format {
        Format::Csv => {
            let mut csv = CsvTable::new(&["omega", "strength", "strength_bare_ratio"]);
            for p in &summary {
                csv.push(vec![num(p.omega), num(p.strength), num(p.strength_bare_ratio)]);
            }
            Output::body(csv.render()?)
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc {
                summary: Vec<SweepPoint>,
                tables: Vec<TableJson>,
            }
            let tj = tables.iter().map(table_json).collect();
            Output::body(json(&Doc { summary, tables: tj })?)
        }
    };
    if let Some(path) = &opts.tables {
        out.side_files.push((path.clone(), tables_csv(&tables)?));
    }
    Ok(out)
}

#[derive(Serialize)]
struct OptimizeDoc<'a> {
    omega: f64,
    order: usize,
    radii: &'a [f64],
    background: Material,
    seed: u64,
    bare_objective: f64,
    best: BestRun<'a>,
    runs: &'a [DesignResult],
}

#[derive(Serialize)]
struct BestRun<'a> {
    seed: Option<u64>,
    materials: &'a [Material],
    objective_trace: &'a [f64],
    final_objective: f64,
    ratio_to_bare: f64,
}

pub fn optimize(opts: &Options) -> Result<Output, CliError> {
    let cfg = opts.config()?;
    let omega = opts.single_omega()?;
    let order = opts.order(DEFAULT_ORDER);
    let problem = cfg.design_problem(omega, order)?;
    let base = opts.seed.or(cfg.seed).unwrap_or(0);
    let count = cfg.seeds.unwrap_or(DEFAULT_SEEDS);
    if count == 0 {
        return Err(CliError::config("seeds", "need at least one start"));
    }
    let mut o = OptimizeOptions::default();
    if let Some(m) = cfg.max_iters {
        o.max_iters = m;
    }
    info!("optimizing {} layer(s) from {count} seeded starts (base seed {base})", problem.layer_count());
    let seeds = seed_sequence(base, count);
    let runs: Vec<DesignResult> = seeds
        .par_iter()
        .map(|&s| optimize_seeded(&problem, s, &o).map_err(CliError::from))
        .collect::<Result<_, _>>()?;
    let bare = bare_objective(&problem)?;
    let best = &runs[best_run(&runs).expect("at least one run")];
    info!("best objective {} (bare {bare})", best.final_objective);
    Ok(Output::body(match opts.format {
        Format::Json => json(&OptimizeDoc {
            omega,
            order,
            radii: problem.radii(),
            background: *problem.background(),
            seed: base,
            bare_objective: bare,
            best: BestRun {
                seed: best.seed,
                materials: &best.materials,
                objective_trace: &best.objective_trace,
                final_objective: best.final_objective,
                ratio_to_bare: best.final_objective / bare,
            },
            runs: &runs,
        })?,
        Format::Csv => {
            let mut header: Vec<String> =
                ["seed", "final_objective", "ratio_to_bare", "status", "iterations"].map(String::from).to_vec();
            for l in 1..=problem.layer_count() {
                header.extend([format!("lambda_{l}"), format!("mu_{l}"), format!("rho_{l}")]);
            }
            let mut csv = CsvTable::new(&header);
            for r in &runs {
                let status = serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from));
                let mut row = vec![
                    r.seed.map(|s| s.to_string()).unwrap_or_default(),
                    num(r.final_objective),
                    num(r.final_objective / bare),
                    status.unwrap_or_default(),
                    r.iterations.to_string(),
                ];
                for m in &r.materials {
                    row.extend([num(m.lambda), num(m.mu), num(m.rho)]);
                }
                csv.push(row);
            }
            csv.render()?
        }
    }))
}

#[derive(Serialize)]
struct Sample {
    theta: f64,
    phi: f64,
    u_p: [[f64; 2]; 3],
    u_s: [[f64; 2]; 3],
}

fn pairs(v: &[Complex64; 3]) -> [[f64; 2]; 3] {
    v.map(|z| [z.re, z.im])
}

pub fn farfield(opts: &Options) -> Result<Output, CliError> {
    let cfg = opts.config()?;
    let stack = cfg.stack()?;
    let wave = cfg.incident_wave()?;
    let omega = opts.single_omega()?;
    let order = opts.order(DEFAULT_ORDER);
    if opts.n_theta == 0 || opts.n_phi == 0 {
        return Err(CliError::config("--n-theta/--n-phi", "grid sizes must be positive"));
    }
    let bg = *stack.background();
    let table = esc_table(&stack, omega, order)?;
    let gammas = plane_wave_gammas(&table, &wave, &bg, order)?;
    let grid: Vec<(f64, f64)> = (0..opts.n_theta)
        .flat_map(|i| {
            let th = core::f64::consts::PI * (i as f64 + 0.5) / opts.n_theta as f64;
            (0..opts.n_phi).map(move |j| (th, 2.0 * core::f64::consts::PI * j as f64 / opts.n_phi as f64))
        })
        .collect();
    let samples: Vec<Sample> = grid
        .par_iter()
        .map(|&(th, ph)| {
            let d = SphericalDirection::new(th, ph).map_err(|e| CliError::Numerical(e.to_string()))?;
            let f = far_field_amplitude(&gammas, &d, &bg, omega)?;
            Ok(Sample { theta: th, phi: ph, u_p: pairs(&f.u_p.0), u_s: pairs(&f.u_s.0) })
        })
        .collect::<Result<_, CliError>>()?;
    Ok(Output::body(match opts.format {
        Format::Csv => {
            let mut csv = CsvTable::new(&FARFIELD_COLUMNS);
            for s in &samples {
                let mut row = vec![num(s.theta), num(s.phi)];
                for v in s.u_p.iter().chain(&s.u_s) {
                    row.extend([num(v[0]), num(v[1])]);
                }
                csv.push(row);
            }
            csv.render()?
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc {
                omega: f64,
                order: usize,
                strength: f64,
                samples: Vec<Sample>,
            }
            let strength = total_scattering_strength(&gammas, &bg, omega)?;
            json(&Doc { omega, order, strength, samples })?
        }
    }))
}

pub fn transform_field_header() -> Vec<String> {
    let mut h: Vec<String> = ["x1", "x2", "x3", "rho"].map(String::from).to_vec();
    for i in 1..=3 {
        for j in 1..=3 {
            for k in 1..=3 {
                for l in 1..=3 {
                    h.push(format!("c{i}{j}{k}{l}"));
                }
            }
        }
    }
    h
}

pub fn transform_field(opts: &Options) -> Result<Output, CliError> {
    let cfg = opts.config()?;
    let stack = cfg.stack()?;
    let eps = opts.eps.or(cfg.eps).unwrap_or(0.1);
    RadialMap::blow_up(eps)?;
    if opts.n_r == 0 || opts.n_theta == 0 || !(opts.r_max.is_finite() && opts.r_max > 0.0) {
        return Err(CliError::config("--n-r/--n-theta/--r-max", "grid must be nonempty with positive extent"));
    }
    let points: Vec<[f64; 3]> = (0..opts.n_theta)
        .flat_map(|j| {
            let th = core::f64::consts::PI * (j as f64 + 0.5) / opts.n_theta as f64;
            (0..opts.n_r).map(move |i| {
                let r = opts.r_max * (i as f64 + 0.5) / opts.n_r as f64;
                [r * th.sin(), 0.0, r * th.cos()]
            })
        })
        .collect();
    let fields: Vec<Option<(Vec<f64>, f64)>> = points
        .par_iter()
        .map(|&x| Ok(cloak_at(&stack, eps, x)?.map(|p| (p.tensor.entries.to_vec(), p.rho))))
        .collect::<Result<_, CliError>>()?;
    let kept: Vec<([f64; 3], Vec<f64>, f64)> =
        points.into_iter().zip(fields).filter_map(|(x, f)| f.map(|(c, r)| (x, c, r))).collect();
    info!("{} grid points outside the cavity", kept.len());
    Ok(Output::body(match opts.format {
        Format::Csv => {
            let mut csv = CsvTable::new(&transform_field_header());
            for (x, c, rho) in &kept {
                let mut row: Vec<String> = x.iter().map(|v| num(*v)).collect();
                row.push(num(*rho));
                row.extend(c.iter().map(|v| num(*v)));
                csv.push(row);
            }
            csv.render()?
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Point {
                x: [f64; 3],
                rho: f64,
                c: Vec<f64>,
            }
            #[derive(Serialize)]
            struct Doc {
                eps: f64,
                points: Vec<Point>,
            }
            let points = kept.into_iter().map(|(x, c, rho)| Point { x, rho, c }).collect();
            json(&Doc { eps, points })?
        }
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn verify_stack(stack: &LayerStack, omega: f64, order: usize) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    let mut diff: f64 = 0.0;
    let mut resid: f64 = 0.0;
    for n in 0..=order {
        for inc in ModeKind::ALL {
            if n == 0 && inc != ModeKind::L {
                continue;
            }
            let a = solve_modes(stack, omega, n, inc)?;
            let b = direct_solve_oracle(stack, omega, n, inc)?;
            diff = diff.max(solution_distance(&a, &b));
            resid = resid.max(a.residual).max(b.residual);
        }
    }
    out.push(Check {
        name: "oracle".into(),
        pass: diff < 1e-9 && resid < 1e-10,
        detail: format!("transfer vs direct {diff:.2e} (<1e-9), residual {resid:.2e} (<1e-10)"),
    });
    let t = esc_table(stack, omega, order)?;
    let zeros = t.rows.iter().all(|r| {
        EscPair::all()
            .filter(|p| !EscPair::coupled(r.n).contains(p))
            .all(|p| r.get(p) == Complex64::new(0.0, 0.0))
    });
    out.push(Check { name: "structural-zeros".into(), pass: zeros, detail: format!("uncoupled pairs exactly zero: {zeros}") });
    let sym = t.rows.iter().skip(1).map(|r| (r.w_nl() - r.w_ln()).norm() / r.w_nl().norm().max(1e-300)).fold(0.0, f64::max);
    out.push(Check { name: "coupling-symmetry".into(), pass: sym < 1e-10, detail: format!("|W_NL - W_LN|/|W_NL| {sym:.2e} (<1e-10)") });
    let mut scale: f64 = 0.0;
    for s in [0.5, 2.0] {
        let ts = esc_table(&stack.scaled(s)?, omega / s, order)?;
        for (a, b) in ts.rows.iter().zip(&t.rows) {
            for (p, w) in b.entries() {
                scale = scale.max((a.get(p) / s - w).norm() / w.norm().max(1.0));
            }
        }
    }
    out.push(Check {
        name: "scaling".into(),
        pass: scale < 1e-10,
        detail: format!("W(s stack, w/s) = s W(stack, w) for s in {{0.5, 2}}: {scale:.2e} (<1e-10)"),
    });
    let bg = *stack.background();
    let wave = escloak_core::farfield::IncidentWave::pressure([0.0, 0.0, 1.0])?;
    let g = plane_wave_gammas(&t, &wave, &bg, order)?;
    let (p, s) = parseval_parts(&g, &bg, omega)?;
    let (qp, qs) = quadrature_parts(&g, &bg, omega, order + 8)?;
    let par = ((p - qp).abs() / p.max(1e-300)).max((s - qs).abs() / s.max(1e-300));
    out.push(Check { name: "parseval".into(), pass: par < 1e-8, detail: format!("quadrature vs coefficients {par:.2e} (<1e-8)") });
    Ok(out)
}

pub fn verify(opts: &Options) -> Result<(Output, usize), CliError> {
    let stacks: Vec<(String, LayerStack)> = match &opts.config {
        Some(c) => vec![("config".into(), c.stack()?)],
        None => vec![
            ("bare".into(), LayerStack::bare_cavity(Material::unit(), 1.0)?),
            (
                "one-layer".into(),
                LayerStack::with_default_radii(Material::unit(), vec![Material::new(2.9, 0.7, 0.9)?])?,
            ),
        ],
    };
    let order = opts.order(4);
    let omegas = opts.omegas()?;
    let jobs: Vec<(String, &LayerStack, f64)> =
        stacks.iter().flat_map(|(n, s)| omegas.iter().map(move |&w| (n.clone(), s, w))).collect();
    let checks: Vec<Vec<Check>> = jobs
        .par_iter()
        .map(|(name, s, w)| {
            let mut c = verify_stack(s, *w, order)?;
            for k in &mut c {
                k.name = format!("{name} omega={w} {}", k.name);
            }
            Ok(c)
        })
        .collect::<Result<_, CliError>>()?;
    let checks: Vec<Check> = checks.into_iter().flatten().collect();
    let failed = checks.iter().filter(|c| !c.pass).count();
    let body = match opts.format {
        Format::Json => json(&checks)?,
        Format::Csv => {
            let mut s = String::new();
            for c in &checks {
                s.push_str(&format!("{} {}: {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail));
            }
            s.push_str(&format!("{} of {} checks passed\n", checks.len() - failed, checks.len()));
            s
        }
    };
    Ok((Output::body(body), failed))
}
