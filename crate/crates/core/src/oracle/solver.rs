//! θ-scheme for y_t = α̂ y⁽⁶⁾ − y⁽⁴⁾ on [0, L] in scaled variables (B = 1).
//!
//! Unknowns are node heights plus ghost nodes on both ends. The root
//! conditions y_xx = 0, y_x − α̂ y_xxx = m/2 and y_xxx − α̂ y⁽⁵⁾ = 0 close the
//! left ghosts; the far end is clamped flat (y = y_x = y_xx = 0). With α̂ = 0
//! the equation is fourth order and y_xx(0) = 0 is dropped.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::banded::{BandedLu, BandedMatrix};
use super::stencil::integer_stencil;
use crate::error::{Error, Result};

pub const MIN_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub length: f64,
    pub nx: usize,
}

impl Grid {
    pub fn new(length: f64, nx: usize) -> Self {
        Self { length, nx }
    }

    /// Grid with spacing at most `dx` covering `length`.
    pub fn with_spacing(length: f64, dx: f64) -> Self {
        let nx = ((length / dx).ceil() as usize + 1).max(MIN_NODES);
        Self { length, nx }
    }

    pub fn dx(&self) -> f64 {
        self.length / (self.nx - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: Grid,
    pub dt: f64,
    /// 1 is backward Euler, 1/2 Crank–Nicolson.
    pub theta: f64,
    pub t_final: f64,
    pub alpha_hat: f64,
    pub m: f64,
    /// Output times in (0, t_final]; t_final is always reported.
    #[serde(default)]
    pub snapshots: Vec<f64>,
    /// One-sided 8-point stencils for y_xxx and y⁽⁵⁾ in the flux row.
    #[serde(default)]
    pub high_order_flux: bool,
    /// Leading backward-Euler steps that damp the start-up transient of θ < 1.
    #[serde(default)]
    pub startup_implicit_steps: usize,
}

impl SolverConfig {
    /// Defaults sized from the layer width: dx = min(√α̂/8, L/255), L = 8 t^{1/4}.
    pub fn for_run(alpha_hat: f64, m: f64, t_final: f64) -> Self {
        let length = 8.0 * t_final.powf(0.25);
        let dx = if alpha_hat > 0.0 { (alpha_hat.sqrt() / 8.0).min(length / 255.0) } else { length / 255.0 };
        Self {
            grid: Grid::with_spacing(length, dx),
            dt: t_final / 2000.0,
            theta: 1.0,
            t_final,
            alpha_hat,
            m,
            snapshots: Vec::new(),
            high_order_flux: false,
            startup_implicit_steps: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if g.nx < MIN_NODES {
            return Err(Error::Config(format!("nx = {} below the minimum {MIN_NODES}", g.nx)));
        }
        if !(g.length > 0.0 && g.length.is_finite()) {
            return Err(Error::Config(format!("domain length {} must be positive", g.length)));
        }
        if !(self.alpha_hat >= 0.0 && self.alpha_hat.is_finite()) {
            return Err(Error::Config(format!("alpha_hat = {} must be finite and ≥ 0", self.alpha_hat)));
        }
        if !self.m.is_finite() {
            return Err(Error::Config("m must be finite".into()));
        }
        if self.alpha_hat > 0.0 && g.dx() > self.alpha_hat.sqrt() / 4.0 {
            return Err(Error::Config(format!(
                "dx = {:.3e} does not resolve the layer width sqrt(alpha_hat) = {:.3e} (need dx ≤ sqrt(alpha_hat)/4)",
                g.dx(),
                self.alpha_hat.sqrt()
            )));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("t_final = {} must be positive", self.t_final)));
        }
        let need = 8.0 * self.t_final.powf(0.25);
        if g.length < need * (1.0 - 1e-12) {
            return Err(Error::Config(format!(
                "domain length {} shorter than 8 t_final^(1/4) = {need}",
                g.length
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(0.5..=1.0).contains(&self.theta) {
            return Err(Error::Config(format!("theta = {} outside [1/2, 1]", self.theta)));
        }
        let mut prev = 0.0;
        for &s in &self.snapshots {
            if !(s > prev && s <= self.t_final) {
                return Err(Error::Config(format!(
                    "snapshot times must increase within (0, t_final]; got {s}"
                )));
            }
            prev = s;
        }
        Ok(())
    }

    fn output_times(&self) -> Vec<f64> {
        let mut out = self.snapshots.clone();
        if out.last().map_or(true, |&t| t < self.t_final) {
            out.push(self.t_final);
        }
        out
    }
}

/// Heights at one time: nodes x_i = i·dx plus the ghost values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub time: f64,
    pub dx: f64,
    pub heights: Vec<f64>,
    /// Ghosts left of x = 0, nearest the boundary last.
    pub ghosts_left: Vec<f64>,
    /// Ghosts right of x = L, nearest the boundary first.
    pub ghosts_right: Vec<f64>,
}

impl Profile {
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn abscissae(&self) -> Vec<f64> {
        (0..self.heights.len()).map(|i| self.x(i)).collect()
    }

    /// Ghosts and nodes in one array, with the index of node 0.
    pub fn extended(&self) -> (Vec<f64>, usize) {
        let mut v = Vec::with_capacity(self.ghosts_left.len() + self.heights.len() + self.ghosts_right.len());
        v.extend_from_slice(&self.ghosts_left);
        v.extend_from_slice(&self.heights);
        v.extend_from_slice(&self.ghosts_right);
        (v, self.ghosts_left.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Layout {
    left: usize,
    right: usize,
    nodes: usize,
}

impl Layout {
    fn for_alpha(alpha_hat: f64, nodes: usize) -> Self {
        if alpha_hat > 0.0 {
            Self { left: 3, right: 2, nodes }
        } else {
            Self { left: 2, right: 1, nodes }
        }
    }

    fn len(&self) -> usize {
        self.left + self.nodes + self.right
    }

    fn col(&self, node: i64) -> usize {
        let c = self.left as i64 + node;
        debug_assert!(c >= 0 && (c as usize) < self.len());
        c as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
enum RowKind {
    /// Discretized α̂ y⁽⁶⁾ − y⁽⁴⁾ at a node.
    Evolution,
    /// Boundary relation row · y = rhs, imposed at the new time level.
    Constraint { rhs: f64 },
}

#[derive(Debug, Clone, PartialEq)]
struct Row {
    kind: RowKind,
    entries: Vec<(usize, f64)>,
}

impl Row {
    fn dot(&self, y: &[f64]) -> f64 {
        self.entries.iter().map(|&(c, w)| w * y[c]).sum()
    }
}

/// Spatial operator and boundary rows on the ghost-extended unknown vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialOperator {
    layout: Layout,
    rows: Vec<Row>,
    kl: usize,
    ku: usize,
}

fn stencil_row(layout: &Layout, center: i64, lo: i64, weights: &[f64], scale: f64) -> Vec<(usize, f64)> {
    weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w != 0.0)
        .map(|(k, w)| (layout.col(center + lo + k as i64), w * scale))
        .collect()
}

fn merge(mut a: Vec<(usize, f64)>, b: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    for (c, w) in b {
        match a.iter_mut().find(|(ac, _)| *ac == c) {
            Some(e) => e.1 += w,
            None => a.push((c, w)),
        }
    }
    a.sort_by_key(|e| e.0);
    a
}

/// Builds the operator rows. Boundary rows stay in natural units: scaling
/// them by powers of dx leaves them tiny next to the evolution rows and
/// costs digits in the factorization.
pub fn assemble_operator(config: &SolverConfig) -> Result<SpatialOperator> {
    config.validate()?;
    let n = config.grid.nx;
    let h = config.grid.dx();
    let a = config.alpha_hat;
    let layout = Layout::for_alpha(a, n);
    let last = n as i64 - 1;
    let mut rows: Vec<Row> = Vec::with_capacity(layout.len());
    let d1 = integer_stencil(1, -1, 1);
    let d2 = integer_stencil(2, -1, 1);
    let d3 = integer_stencil(3, -2, 2);
    let d4 = integer_stencil(4, -2, 2);

    let (h2, h3, h4) = (h * h, h.powi(3), h.powi(4));
    let constraint = |rhs: f64, entries| Row { kind: RowKind::Constraint { rhs }, entries };

    if a > 0.0 {
        let d5 = integer_stencil(5, -3, 3);
        let d6 = integer_stencil(6, -3, 3);
        let (h5, h6) = (h.powi(5), h.powi(6));
        // curvature, slope, flux: ordered so each row's reach stays in band
        rows.push(constraint(0.0, stencil_row(&layout, 0, -1, &d2, 1.0 / h2)));
        rows.push(constraint(
            0.5 * config.m,
            merge(stencil_row(&layout, 0, -1, &d1, 1.0 / h), stencil_row(&layout, 0, -2, &d3, -a / h3)),
        ));
        let flux = if config.high_order_flux {
            let d3w = integer_stencil(3, -3, 4);
            let d5w = integer_stencil(5, -3, 4);
            merge(stencil_row(&layout, 0, -3, &d3w, 1.0 / h3), stencil_row(&layout, 0, -3, &d5w, -a / h5))
        } else {
            merge(stencil_row(&layout, 0, -2, &d3, 1.0 / h3), stencil_row(&layout, 0, -3, &d5, -a / h5))
        };
        rows.push(constraint(0.0, flux));
        for i in 0..last {
            let entries = merge(stencil_row(&layout, i, -3, &d6, a / h6), stencil_row(&layout, i, -2, &d4, -1.0 / h4));
            rows.push(Row { kind: RowKind::Evolution, entries });
        }
        rows.push(constraint(0.0, vec![(layout.col(last), 1.0)]));
        // y_xx(L) on the 2h-wide stencil reaches the outer ghost
        rows.push(constraint(0.0, stencil_row(&layout, last, -2, &[1.0, 0.0, -2.0, 0.0, 1.0], 0.25 / h2)));
        rows.push(constraint(0.0, stencil_row(&layout, last, -1, &d1, 1.0 / h)));
    } else {
        rows.push(constraint(0.5 * config.m, stencil_row(&layout, 0, -1, &d1, 1.0 / h)));
        rows.push(constraint(0.0, stencil_row(&layout, 0, -2, &d3, 1.0 / h3)));
        for i in 0..last {
            rows.push(Row { kind: RowKind::Evolution, entries: stencil_row(&layout, i, -2, &d4, -1.0 / h4) });
        }
        rows.push(constraint(0.0, vec![(layout.col(last), 1.0)]));
        rows.push(constraint(0.0, stencil_row(&layout, last, -1, &d1, 1.0 / h)));
    }
    debug_assert_eq!(rows.len(), layout.len());

    let (mut kl, mut ku) = (0usize, 0usize);
    for (r, row) in rows.iter().enumerate() {
        for &(c, _) in &row.entries {
            if c < r {
                kl = kl.max(r - c);
            } else {
                ku = ku.max(c - r);
            }
        }
    }
    Ok(SpatialOperator { layout, rows, kl, ku })
}

impl SpatialOperator {
    pub fn dim(&self) -> usize {
        self.layout.len()
    }

    /// Total band width kl + ku + 1 of the step matrix.
    pub fn bandwidth(&self) -> usize {
        self.kl + self.ku + 1
    }

    pub fn ghosts(&self) -> (usize, usize) {
        (self.layout.left, self.layout.right)
    }

    /// Row-wise products on a full (ghost-extended) vector: the discrete
    /// α̂ y⁽⁶⁾ − y⁽⁴⁾ on evolution rows, the boundary left-hand sides elsewhere.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.dim());
        self.rows.iter().map(|r| r.dot(y)).collect()
    }

    /// Boundary rows only: left-hand side minus right-hand side, with the
    /// row index.
    pub fn constraint_residuals(&self, y: &[f64]) -> Vec<(usize, f64)> {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| match r.kind {
                RowKind::Constraint { rhs } => Some((i, r.dot(y) - rhs)),
                RowKind::Evolution => None,
            })
            .collect()
    }

    /// Indices of the evolution rows paired with their node.
    pub fn evolution_nodes(&self) -> Vec<(usize, usize)> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.kind == RowKind::Evolution)
            .map(|(i, r)| {
                let center = r.entries.iter().map(|e| e.0).sum::<usize>() / r.entries.len();
                (i, center - self.layout.left)
            })
            .collect()
    }

    fn step_matrix(&self, dt: f64, theta: f64) -> BandedMatrix {
        let mut mat = BandedMatrix::zeros(self.dim(), self.kl, self.ku);
        for (i, row) in self.rows.iter().enumerate() {
            match row.kind {
                RowKind::Constraint { .. } => {
                    for &(c, w) in &row.entries {
                        mat.add(i, c, w);
                    }
                }
                RowKind::Evolution => {
                    let node = self.evolution_node(row);
                    mat.add(i, node, 1.0);
                    for &(c, w) in &row.entries {
                        mat.add(i, c, -theta * dt * w);
                    }
                }
            }
        }
        mat
    }

    fn evolution_node(&self, row: &Row) -> usize {
        // centered stencils: the middle entry is the node itself
        let (lo, hi) = (row.entries.first().unwrap().0, row.entries.last().unwrap().0);
        (lo + hi) / 2
    }

    fn step_rhs(&self, y: &[f64], dt: f64, theta: f64) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| match row.kind {
                RowKind::Constraint { rhs } => rhs,
                RowKind::Evolution => {
                    let node = self.evolution_node(row);
                    y[node] + (1.0 - theta) * dt * row.dot(y)
                }
            })
            .collect()
    }

    fn to_profile(&self, y: &[f64], time: f64, dx: f64) -> Profile {
        let l = self.layout;
        Profile {
            time,
            dx,
            ghosts_left: y[..l.left].to_vec(),
            heights: y[l.left..l.left + l.nodes].to_vec(),
            ghosts_right: y[l.left + l.nodes..].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub profile: Profile,
    pub mass: f64,
    /// Excess free energy per unit γ_i + γ_s (see `diagnostics::energy`).
    pub energy: f64,
}

/// Time stepper holding one LU factorization per distinct step size.
#[derive(Debug, Clone)]
pub struct Solver {
    config: SolverConfig,
    operator: SpatialOperator,
    factors: HashMap<(u64, u64), BandedLu>,
    state: Vec<f64>,
    time: f64,
    steps_taken: usize,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Result<Self> {
        let operator = assemble_operator(&config)?;
        let state = vec![0.0; operator.dim()];
        Ok(Self { config, operator, factors: HashMap::new(), state, time: 0.0, steps_taken: 0 })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn operator(&self) -> &SpatialOperator {
        &self.operator
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn cached_factorizations(&self) -> usize {
        self.factors.len()
    }

    pub fn profile(&self) -> Profile {
        self.operator.to_profile(&self.state, self.time, self.config.grid.dx())
    }

    /// Advances one step of size `dt`.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let theta = if self.steps_taken < self.config.startup_implicit_steps { 1.0 } else { self.config.theta };
        let key = (dt.to_bits(), theta.to_bits());
        if !self.factors.contains_key(&key) {
            let lu = self.operator.step_matrix(dt, theta).factor()?;
            self.factors.insert(key, lu);
        }
        let rhs = self.operator.step_rhs(&self.state, dt, theta);
        let lu = &self.factors[&key];
        let next = lu.solve(&rhs);
        self.steps_taken += 1;
        if let Some(bad) = next.iter().position(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                step: self.steps_taken,
                time: self.time + dt,
                detail: format!("non-finite value at unknown {bad}"),
            });
        }
        self.state = next;
        self.time += dt;
        Ok(())
    }

    /// Marches to `t` with steps no longer than the configured dt; the last
    /// interval is split evenly so `t` is hit exactly.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        let span = t - self.time;
        if span <= 0.0 {
            return Ok(());
        }
        let count = ((span / self.config.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let dt = span / count as f64;
        let start = self.time;
        for k in 1..=count {
            self.step(dt)?;
            self.time = start + k as f64 * dt;
        }
        self.time = t;
        Ok(())
    }

    fn snapshot(&self) -> Snapshot {
        let profile = self.profile();
        let mass = super::diagnostics::mass(&profile);
        let energy = super::diagnostics::energy(&profile, &super::diagnostics::Scales::scaled(self.config.m, self.config.alpha_hat)).excess;
        Snapshot { profile, mass, energy }
    }

    /// Runs to t_final from a flat start, recording the snapshot times.
    pub fn run(mut self) -> Result<Vec<Snapshot>> {
        let mut out = Vec::new();
        for t in self.config.output_times() {
            self.advance_to(t)?;
            out.push(self.snapshot());
        }
        Ok(out)
    }
}

/// Solves from a flat initial surface and returns the snapshots in time order.
pub fn solve(config: &SolverConfig) -> Result<Vec<Snapshot>> {
    Solver::new(config.clone())?.run()
}
