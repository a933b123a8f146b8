//! One function per run mode, each producing a [`Table`].

use super::config::{Mode, ModelSpec, RunConfig};
use super::table::Table;
use crate::composite::{composite_profile, default_window, depth_difference, mullins_reference};
use crate::error::{Error, Result};
use crate::layers::{corner_combination, corner_solutions_yc, CornerSpec};
use crate::material::{nondimensionalize, ModelParams};
use crate::oracle::{solve, Snapshot, SolverConfig};

pub fn run_mode(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    let model = cfg.reduced()?;
    match cfg.mode {
        Mode::Params => params(cfg, &model),
        Mode::Profile => profile(cfg, &model),
        Mode::DepthSeries => depth_series(cfg, &model),
        Mode::Corner => corner(cfg, &model),
        Mode::Oracle => oracle(cfg, &model),
        Mode::Compare => compare(cfg, &model),
    }
}

/// Reduced parameters scaled on L0 = (Bt)^{1/4}, with t = Bt/B.
fn scaled_at(model: &ModelSpec, bt: f64) -> Result<(ModelParams, f64)> {
    let t = bt / model.b;
    Ok((nondimensionalize(model.b, model.alpha, model.m, t)?, t))
}

fn linspace(hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| hi * i as f64 / (n - 1) as f64)
}

fn params(cfg: &RunConfig, model: &ModelSpec) -> Result<Table> {
    let mut t = Table::new(&["Bt_m4", "B_m4_per_s", "alpha_m2", "m", "L0_m", "alpha_hat", "exceeds_small_slope"]);
    let small = |p: f64| if p >= crate::material::SMALL_SLOPE_LIMIT { 1.0 } else { 0.0 };
    if cfg.times.is_empty() {
        t.push(vec![f64::NAN, model.b, model.alpha, model.m, f64::NAN, f64::NAN, small(model.m)]);
    }
    for &bt in &cfg.times {
        let (p, _) = scaled_at(model, bt)?;
        t.push(vec![bt, p.b, p.alpha, p.m, p.l0, p.alpha_hat, small(p.m)]);
    }
    Ok(t)
}

fn profile(cfg: &RunConfig, model: &ModelSpec) -> Result<Table> {
    let mut t = Table::new(&["Bt_m4", "x_m", "y_mullins_m", "y_composite_m"]);
    for &bt in &cfg.times {
        let (p, time) = scaled_at(model, bt)?;
        let xmax = cfg.xmax.unwrap_or_else(|| default_window(time, &p));
        for x in linspace(xmax, cfg.samples) {
            t.push(vec![bt, x, mullins_reference(x, time, &p)?, composite_profile(x, time, &p, &cfg.expansion)?]);
        }
    }
    Ok(t)
}

fn depth_series(cfg: &RunConfig, model: &ModelSpec) -> Result<Table> {
    let mut t = Table::new(&[
        "Bt_m4",
        "alpha_m2",
        "depth_mullins_m",
        "depth_composite_m",
        "depth_difference_m",
        "relative_effect",
    ]);
    let alphas = if cfg.alphas.is_empty() { vec![model.alpha] } else { cfg.alphas.clone() };
    for &alpha in &alphas {
        let m = ModelSpec { alpha, ..*model };
        for &bt in &cfg.times {
            let (p, time) = scaled_at(&m, bt)?;
            let d0 = mullins_reference(0.0, time, &p)?.abs();
            let dc = composite_profile(0.0, time, &p, &cfg.expansion)?.abs();
            let dd = depth_difference(time, &p)?;
            t.push(vec![bt, alpha, d0, dc, dd, dd / d0]);
        }
    }
    Ok(t)
}

fn corner(cfg: &RunConfig, model: &ModelSpec) -> Result<Table> {
    let (p, _) = scaled_at(model, cfg.times[0])?;
    let base = cfg.expansion.corner.unwrap_or(CornerSpec { gamma: 1.0, ..CornerSpec::default() });
    let spec = CornerSpec { alpha_hat: p.alpha_hat, b: 1.0, ..base };
    spec.validate()?;
    let tau = cfg.corner_tau;
    let scale = tau.powf(1.0 / 6.0);
    let mut t = Table::new(&["w", "y_c1", "y_c2", "y_c3", "y_c4", "y_c5", "y_c6", "y_c"]);
    for w in linspace(cfg.xmax.unwrap_or(20.0), cfg.samples) {
        let zeta = w * scale;
        let mut row = vec![w];
        for j in 1..=6 {
            row.push(corner_solutions_yc(j, zeta, tau, &spec)?);
        }
        row.push(corner_combination(zeta, tau, &spec)?);
        t.push(row);
    }
    t.note("alpha_hat", p.alpha_hat);
    t.note("r", spec.r);
    t.note("gamma", spec.gamma);
    t.note("amplitude_flagged", if spec.amplitude_flagged() { 1.0 } else { 0.0 });
    Ok(t)
}

/// Oracle run scaled on the latest time: t̂_final = 1, snapshots at Bt/Bt_max.
fn oracle_run(cfg: &RunConfig, model: &ModelSpec) -> Result<(ModelParams, f64, Vec<Snapshot>)> {
    let bt_ref = cfg.times.iter().cloned().fold(f64::MIN, f64::max);
    let (p, _) = scaled_at(model, bt_ref)?;
    let mut sc = match &cfg.solver {
        Some(s) => SolverConfig { alpha_hat: p.alpha_hat, m: p.m, t_final: 1.0, ..s.clone() },
        None => SolverConfig::for_run(p.alpha_hat, p.m, 1.0),
    };
    let mut snaps: Vec<f64> = cfg.times.iter().map(|bt| bt / bt_ref).filter(|s| *s < 1.0).collect();
    snaps.sort_by(f64::total_cmp);
    snaps.dedup();
    sc.snapshots = snaps;
    Ok((p, bt_ref, solve(&sc)?))
}

fn stride(nodes: usize, samples: usize) -> usize {
    nodes.div_ceil(samples).max(1)
}

fn oracle(cfg: &RunConfig, model: &ModelSpec) -> Result<Table> {
    let (p, bt_ref, snaps) = oracle_run(cfg, model)?;
    let mut t = Table::new(&["Bt_m4", "x_m", "y_oracle_m"]);
    for s in &snaps {
        let bt = s.profile.time * bt_ref;
        let k = stride(s.profile.heights.len(), cfg.samples);
        for (i, y) in s.profile.heights.iter().enumerate().step_by(k) {
            t.push(vec![bt, s.profile.x(i) * p.l0, y * p.l0]);
        }
        t.note(format!("mass_scaled[Bt={bt:e}]"), s.mass);
        t.note(format!("energy_scaled[Bt={bt:e}]"), s.energy);
    }
    Ok(t)
}

fn compare(cfg: &RunConfig, model: &ModelSpec) -> Result<Table> {
    let (p, bt_ref, snaps) = oracle_run(cfg, model)?;
    let mut t = Table::new(&["Bt_m4", "x_m", "y_mullins_m", "y_composite_m", "y_oracle_m"]);
    for s in &snaps {
        let bt = s.profile.time * bt_ref;
        let time = bt / p.b;
        let k = stride(s.profile.heights.len(), cfg.samples);
        let mut sup: f64 = 0.0;
        let mut depth: f64 = 0.0;
        for (i, y) in s.profile.heights.iter().enumerate() {
            let x = s.profile.x(i) * p.l0;
            let yc = composite_profile(x, time, &p, &cfg.expansion)?;
            let yo = y * p.l0;
            sup = sup.max((yc - yo).abs());
            if i == 0 {
                depth = yo.abs();
            }
            if i % k == 0 {
                t.push(vec![bt, x, mullins_reference(x, time, &p)?, yc, yo]);
            }
        }
        if depth == 0.0 {
            return Err(Error::Domain("oracle groove has zero depth; nothing to compare".into()));
        }
        t.note(format!("sup_composite_minus_oracle_over_depth[Bt={bt:e}]"), sup / depth);
    }
    Ok(t)
}
