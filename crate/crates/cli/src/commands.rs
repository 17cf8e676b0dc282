use mdtgn::conservation::{
    cone_charge_report, delgado_report, field_bound_report, gauss_residual_layer, lorenz_report, ConeRegion,
};
use mdtgn::dirac::{free_solution, global_solve, SolutionHistory};
use mdtgn::estimates::{check_data_inequalities, check_identities, random_suite};
use mdtgn::norms::{d_norm, envelope_norm, n_norm, x_norm, y_norm, Component};
use mdtgn::study::{cone_residuals, cross_scheme, fitted_order, gauge_discrepancy, lorenz_sup, GaugeDiscrepancy, OrderFit};
use mdtgn::{build_grid, CheckReport, Complex64, Direction, GridFunction};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::output::OutDir;

/// Below this every discrepancy is rounding noise and an order fit is
/// meaningless.
const ROUNDOFF_FLOOR: f64 = 1e-12;

pub struct Context<'a> {
    pub config: &'a RunConfig,
    pub out: &'a OutDir,
    pub plot_data: bool,
}

fn order_report(name: &str, dx: &[f64], values: Vec<f64>, min_order: f64) -> CheckReport {
    let peak = values.iter().copied().fold(0.0, f64::max);
    if peak <= ROUNDOFF_FLOOR {
        return CheckReport::inequality(
            format!("order {name}"),
            peak,
            ROUNDOFF_FLOOR,
            0.0,
            0.0,
            format!("all values at rounding level: dx = {dx:?}, values = {values:?}"),
        );
    }
    match OrderFit::new(name, dx, values.clone()) {
        Ok(fit) => fit.report(min_order),
        Err(e) => CheckReport::inequality(format!("order {name}"), min_order, f64::NAN, 0.0, 0.0, e.to_string()),
    }
}

/// The failing report with the smallest relative margin, or the tightest
/// passing one, labelled with how many reports it stands for.
fn worst(reports: Vec<CheckReport>) -> Option<CheckReport> {
    let n = reports.len();
    let failures = reports.iter().filter(|r| !r.pass).count();
    let mut w = reports
        .into_iter()
        .min_by(|a, b| a.pass.cmp(&b.pass).then(a.relative_margin().total_cmp(&b.relative_margin())))?;
    w.context = format!("{}; worst of {n}, {failures} failing", w.context);
    Some(w)
}

fn finish_solution(ctx: &Context, sol: &SolutionHistory) -> Result<()> {
    ctx.out.write_json("meta.json", &sol.meta)?;
    if ctx.config.dump_fields {
        ctx.out.write_fields("fields.csv", sol)?;
    }
    if ctx.plot_data {
        ctx.out.write_plot_data(sol)?;
    }
    Ok(())
}

pub fn simulate(ctx: &Context) -> Result<Vec<CheckReport>> {
    let cfg = ctx.config;
    let (_, sol) = cfg.scenario().solve(cfg.grid.dx, &cfg.solver)?;
    finish_solution(ctx, &sol)?;
    Ok(Vec::new())
}

/// Cone identities on a lattice of backward cones with apex at `T`.
fn cone_reports(sol: &SolutionHistory, n_cones: usize) -> Result<Vec<CheckReport>> {
    let grid = sol.grid();
    let k = grid.n_t;
    if n_cones == 0 || grid.n_x < 2 * k + 1 {
        return Ok(Vec::new());
    }
    let (lo, hi) = (k, grid.n_x - 1 - k);
    let mut out = Vec::new();
    for c in 0..n_cones {
        let i = lo + (hi - lo) * c / (n_cones.max(2) - 1);
        let cone = ConeRegion::at(&sol.spinor, grid.x(i as isize), grid.t(k))?;
        for quarter in 1..=4 {
            out.extend(cone_charge_report(&sol.spinor, cone, cone.t0 * quarter / 4)?);
        }
    }
    Ok(out)
}

fn field_reports(sol: &SolutionHistory, f: &GridFunction<Complex64>, g: &GridFunction<Complex64>) -> Vec<CheckReport> {
    let layers = sol.grid().layers();
    let per_layer: Vec<Vec<CheckReport>> = (0..layers).map(|k| field_bound_report(&sol.em, f, g, k)).collect();
    (0..3)
        .filter_map(|j| worst(per_layer.iter().map(|l| l[j].clone()).collect()))
        .collect()
}

pub fn verify(ctx: &Context) -> Result<Vec<CheckReport>> {
    let cfg = ctx.config;
    let (data, sol) = cfg.scenario().solve(cfg.grid.dx, &cfg.solver)?;
    let mut reports = cone_reports(&sol, cfg.verify.n_cones)?;
    let layers = sol.grid().layers();
    reports.extend(worst((0..layers).map(|k| gauss_residual_layer(&sol.em, &sol.spinor, k).1).collect()));
    reports.push(lorenz_report(&sol.spinor, &sol.em.data.e0, sol.em.coupling));
    reports.extend(field_reports(&sol, &data.f, &data.g));
    if cfg.verify.gauge {
        let dxs = [cfg.grid.dx, cfg.grid.dx / 2.0];
        let runs = dxs
            .iter()
            .map(|&dx| gauge_discrepancy(&cfg.scenario(), dx, &cfg.solver))
            .collect::<mdtgn::Result<Vec<_>>>()?;
        reports.extend(gauge_reports(&dxs, &runs, cfg.verify.min_order));
    }
    ctx.out.write_json("meta.json", &sol.meta)?;
    if ctx.plot_data {
        ctx.out.write_plot_data(&sol)?;
    }
    Ok(reports)
}

fn gauge_reports(dxs: &[f64], runs: &[GaugeDiscrepancy], min_order: f64) -> Vec<CheckReport> {
    let pick = |f: fn(&GaugeDiscrepancy) -> f64| runs.iter().map(f).collect::<Vec<_>>();
    vec![
        order_report("gauge |u|", dxs, pick(|d| d.u_modulus), min_order),
        order_report("gauge |v|", dxs, pick(|d| d.v_modulus), min_order),
        order_report("gauge E", dxs, pick(|d| d.e_field), min_order),
    ]
}

pub fn estimates(ctx: &Context) -> Result<Vec<CheckReport>> {
    let est = &ctx.config.estimates;
    let summary = random_suite(&est.fields, est.n_trials)?;
    ctx.out.write_json("suite.json", &summary)?;
    let mut reports = summary.reports();
    reports.push(summary.summary_report());
    Ok(reports)
}

#[derive(Serialize)]
struct NormRow {
    name: String,
    value: f64,
}

pub fn norms(ctx: &Context) -> Result<Vec<CheckReport>> {
    let cfg = ctx.config;
    let (grid, data) = cfg.scenario().build(cfg.grid.dx)?;
    let t = cfg.grid.t;
    let free = free_solution(&data.f, &data.g, &grid)?;
    let h = grid.dx;
    let row = |name: &str, value: f64| NormRow {
        name: name.into(),
        value,
    };
    let table = vec![
        row("D(f)", d_norm(&data.f, t)?),
        row("D(g)", d_norm(&data.g, t)?),
        row("L2(f)", data.f.l2_norm()),
        row("L2(g)", data.g.l2_norm()),
        row("X+(free u)", x_norm(&free, Component::U)),
        row("X-(free v)", x_norm(&free, Component::V)),
        row("envelope+(free u)", envelope_norm(&free, Component::U).value),
        row("envelope-(free v)", envelope_norm(&free, Component::V).value),
        row("N+(free u)", n_norm(&free.u, Direction::Plus, h)),
        row("N-(free v)", n_norm(&free.v, Direction::Minus, h)),
        row("Y+(free u)", y_norm(&free, Component::U)),
        row("Y-(free v)", y_norm(&free, Component::V)),
    ];
    ctx.out.write_json("norms.json", &table)?;
    let mut reports = check_identities(&data.f, &data.g, t)?;
    let a = grid.x(grid.nearest_index(0.0) as isize);
    for f in [&data.f, &data.g] {
        reports.extend(check_data_inequalities(f, t, a, t)?);
    }
    Ok(reports)
}

#[derive(Serialize)]
struct GaugeRow {
    dx: f64,
    #[serde(flatten)]
    discrepancy: GaugeDiscrepancy,
}

pub fn gauge(ctx: &Context) -> Result<Vec<CheckReport>> {
    let cfg = ctx.config;
    let dxs = [cfg.grid.dx, cfg.grid.dx / 2.0, cfg.grid.dx / 4.0];
    let runs = dxs
        .iter()
        .map(|&dx| gauge_discrepancy(&cfg.scenario(), dx, &cfg.solver))
        .collect::<mdtgn::Result<Vec<_>>>()?;
    let rows: Vec<GaugeRow> = dxs.iter().zip(&runs).map(|(&dx, &discrepancy)| GaugeRow { dx, discrepancy }).collect();
    ctx.out.write_json("gauge.json", &rows)?;
    Ok(gauge_reports(&dxs, &runs, cfg.verify.min_order))
}

#[derive(Serialize)]
struct Series {
    name: String,
    dx: Vec<f64>,
    values: Vec<f64>,
    /// Absent when a value is exactly zero.
    order: Option<f64>,
}

pub fn convergence(ctx: &Context) -> Result<Vec<CheckReport>> {
    let cfg = ctx.config;
    let conv = &cfg.convergence;
    let scenario = cfg.scenario();
    let align = conv.dx.iter().copied().fold(0.0, f64::max);
    let (mut cone, mut flux, mut lorenz, mut cross) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &dx in &conv.dx {
        let (_, sol) = scenario.solve(dx, &cfg.solver)?;
        let (c, f) = cone_residuals(&sol, conv.n_cones, align)?;
        cone.push(c);
        flux.push(f);
        lorenz.push(lorenz_sup(&sol));
        cross.push(cross_scheme(&scenario, dx, &cfg.solver)?.0);
    }
    let series: Vec<Series> = [("LocalCharge", cone), ("LocalCharge2", flux), ("Lorenz", lorenz), ("Picard vs split-step", cross)]
        .into_iter()
        .map(|(name, values)| Series {
            name: name.into(),
            dx: conv.dx.clone(),
            order: fitted_order(&conv.dx, &values).ok(),
            values,
        })
        .collect();
    ctx.out.write_json("convergence.json", &series)?;
    Ok(series
        .into_iter()
        .map(|s| order_report(&s.name, &s.dx, s.values, conv.min_order))
        .collect())
}

pub fn global(ctx: &Context) -> Result<Vec<CheckReport>> {
    let cfg = ctx.config;
    let grid = build_grid(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.dx, cfg.tau)?;
    let data = cfg.data.sample(&grid, cfg.model.charge_coupling())?;
    let sol = global_solve(&data, &cfg.model, cfg.tau, &cfg.grid_spec(), &cfg.solver)?;
    finish_solution(ctx, &sol)?;
    let seg = sol.meta.segment_steps.first().copied().unwrap_or(grid.n_t);
    let rep = delgado_report(&sol.spinor, &data.f, &data.g, cfg.model.mass, seg as f64 * grid.dx)?;
    let mut reports = vec![rep.phi_check.clone()];
    reports.extend(worst(rep.bound_checks));
    reports.extend(field_reports(&sol, &data.f, &data.g));
    Ok(reports)
}
