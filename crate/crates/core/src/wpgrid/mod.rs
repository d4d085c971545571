//! Smoothed home win probability surface `p(T, L)`.
//!
//! Every second `T` of every historical game contributes one observation
//! to the unit cell `(T, L)` of the lead `L` at that second. The estimate at
//! `(T, L)` pools the observed games over the window
//! `[T - h_t, T + h_t] x [L - h_l, L + h_l]` and adds a Beta prior of
//! pseudo-games: each unit cell in the window adds ten, all wins when the
//! cell's lead is above +20, all losses below -20, and an even split
//! otherwise. The posterior mean and standard deviation are stored per cell.

mod probit;

pub use probit::{end_of_period_samples, fit_probit, probit_wp, ProbitBaseline, ProbitSample, ProbitSurface};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pbp::{GameLog, OVERTIME_SECS, REGULATION_SECS};

/// Anything that maps a game state to a home win probability.
pub trait WinProbability {
    fn win_probability(&self, elapsed_sec: u32, lead: i32) -> f64;
}

/// Extent of the `(T, L)` grid. Queries outside it clamp to the edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridAxes {
    pub t_max: u32,
    pub lead_min: i32,
    pub lead_max: i32,
}

impl GridAxes {
    pub fn new(t_max: u32, lead_min: i32, lead_max: i32) -> Result<Self> {
        if lead_min > lead_max {
            return Err(Error::InvalidArgument(format!("lead range [{lead_min}, {lead_max}]")));
        }
        Ok(GridAxes { t_max, lead_min, lead_max })
    }

    /// Regulation plus `max_overtimes` five-minute periods, leads in [-60, 60].
    pub fn with_overtimes(max_overtimes: u32) -> Self {
        GridAxes {
            t_max: REGULATION_SECS + OVERTIME_SECS * max_overtimes,
            lead_min: -60,
            lead_max: 60,
        }
    }

    pub fn n_t(&self) -> usize {
        self.t_max as usize + 1
    }

    pub fn n_l(&self) -> usize {
        (self.lead_max - self.lead_min) as usize + 1
    }

    pub fn len(&self) -> usize {
        self.n_t() * self.n_l()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn clamp_t(&self, t: u32) -> u32 {
        t.min(self.t_max)
    }

    pub fn clamp_lead(&self, lead: i32) -> i32 {
        lead.clamp(self.lead_min, self.lead_max)
    }

    /// Flat index of a cell; arguments are clamped first.
    pub fn index(&self, t: u32, lead: i32) -> usize {
        let t = self.clamp_t(t) as usize;
        let l = (self.clamp_lead(lead) - self.lead_min) as usize;
        t * self.n_l() + l
    }

    pub fn contains(&self, t: u32, lead: i32) -> bool {
        t <= self.t_max && (self.lead_min..=self.lead_max).contains(&lead)
    }
}

impl Default for GridAxes {
    fn default() -> Self {
        GridAxes::with_overtimes(5)
    }
}

/// Smoothing window half-widths in seconds and points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub ht: u32,
    pub hl: u32,
}

impl Default for Window {
    fn default() -> Self {
        Window { ht: 3, hl: 2 }
    }
}

/// Pseudo-games added per unit cell and the lead beyond which they are
/// all wins (or all losses).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoGames {
    pub per_cell: f64,
    pub threshold: i32,
}

impl Default for PseudoGames {
    fn default() -> Self {
        PseudoGames {
            per_cell: 10.0,
            threshold: 20,
        }
    }
}

impl PseudoGames {
    /// `(wins, losses)` added to one unit cell with lead `lead`.
    pub fn cell(&self, lead: i32) -> (f64, f64) {
        if lead > self.threshold {
            (self.per_cell, 0.0)
        } else if lead < -self.threshold {
            (0.0, self.per_cell)
        } else {
            (self.per_cell / 2.0, self.per_cell / 2.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridConfig {
    pub window: Window,
    pub pseudo: PseudoGames,
}

/// Per unit cell: games observed (`total`) and home wins among them (`wins`).
#[derive(Debug, Clone, PartialEq)]
pub struct CountGrid {
    pub axes: GridAxes,
    pub total: Vec<u32>,
    pub wins: Vec<u32>,
}

impl CountGrid {
    pub fn empty(axes: GridAxes) -> Self {
        CountGrid {
            axes,
            total: vec![0; axes.len()],
            wins: vec![0; axes.len()],
        }
    }

    /// `(n, N)` of one unit cell.
    pub fn cell(&self, t: u32, lead: i32) -> (u32, u32) {
        let i = self.axes.index(t, lead);
        (self.wins[i], self.total[i])
    }

    /// Record one game: its state at every second `0..=end_sec`.
    pub fn add_game(&mut self, log: &GameLog) {
        for (t, lead) in log.lead_timeline().into_iter().enumerate() {
            let i = self.axes.index(t as u32, lead);
            self.total[i] += 1;
            if log.home_won {
                self.wins[i] += 1;
            }
        }
    }

    fn merge(mut self, other: CountGrid) -> CountGrid {
        for (a, b) in self.total.iter_mut().zip(other.total) {
            *a += b;
        }
        for (a, b) in self.wins.iter_mut().zip(other.wins) {
            *a += b;
        }
        self
    }
}

/// Count game states over all logs. Leads beyond the axes clamp to the
/// boundary cell and seconds beyond `t_max` to the last column.
pub fn accumulate_counts(logs: &[GameLog], axes: GridAxes) -> CountGrid {
    logs.par_iter()
        .fold(
            || CountGrid::empty(axes),
            |mut acc, log| {
                acc.add_game(log);
                acc
            },
        )
        .reduce(|| CountGrid::empty(axes), CountGrid::merge)
}

fn window_ranges(axes: &GridAxes, t: u32, lead: i32, window: Window) -> (std::ops::RangeInclusive<u32>, std::ops::RangeInclusive<i32>) {
    let t0 = t.saturating_sub(window.ht);
    let t1 = t.saturating_add(window.ht).min(axes.t_max);
    let l0 = (lead - window.hl as i32).max(axes.lead_min);
    let l1 = (lead + window.hl as i32).min(axes.lead_max);
    (t0..=t1, l0..=l1)
}

/// Prior pseudo-wins and pseudo-losses `(alpha, beta)` for the window
/// centred on `(t, lead)`. Cells outside the axes contribute nothing.
pub fn pseudo_counts(axes: &GridAxes, t: u32, lead: i32, window: Window, pseudo: PseudoGames) -> (f64, f64) {
    let (ts, ls) = window_ranges(axes, t, lead, window);
    let width = f64::from(ts.end() - ts.start() + 1);
    ls.map(|l| pseudo.cell(l))
        .fold((0.0, 0.0), |(a, b), (w, l)| (a + w * width, b + l * width))
}

/// Observed `(n_w, N_w)` summed over the in-bounds cells of the window.
pub fn window_counts(counts: &CountGrid, t: u32, lead: i32, window: Window) -> (u64, u64) {
    let axes = &counts.axes;
    let (ts, ls) = window_ranges(axes, t, lead, window);
    let mut n = 0u64;
    let mut total = 0u64;
    for tt in ts {
        for l in ls.clone() {
            let i = axes.index(tt, l);
            n += u64::from(counts.wins[i]);
            total += u64::from(counts.total[i]);
        }
    }
    (n, total)
}

/// Beta posterior mean and standard deviation after `n_w` wins in `n_total`
/// games under a `Beta(alpha, beta)` prior.
pub fn estimate_cell(n_w: u64, n_total: u64, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    if n_w > n_total {
        return Err(Error::InvalidArgument(format!("{n_w} wins in {n_total} games")));
    }
    if !(alpha >= 0.0 && beta >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative prior ({alpha}, {beta})")));
    }
    if alpha + beta <= 0.0 {
        return Err(Error::Degenerate("pseudo-count prior has alpha + beta = 0".into()));
    }
    let a = n_w as f64 + alpha;
    let b = (n_total - n_w) as f64 + beta;
    let s = a + b;
    let mean = a / s;
    let sd = (a * b / (s * s * (s + 1.0))).sqrt();
    Ok((mean, sd))
}

/// Smoothed surface: per unit cell the raw counts and the posterior
/// mean/sd of the windowed estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct WinProbGrid {
    pub counts: CountGrid,
    pub phat: Vec<f64>,
    pub psd: Vec<f64>,
}

impl WinProbGrid {
    pub fn axes(&self) -> GridAxes {
        self.counts.axes
    }

    /// `(phat, psd)` at a cell, clamping the query to the axes.
    pub fn cell(&self, t: u32, lead: i32) -> (f64, f64) {
        let i = self.counts.axes.index(t, lead);
        (self.phat[i], self.psd[i])
    }
}

impl WinProbability for WinProbGrid {
    fn win_probability(&self, elapsed_sec: u32, lead: i32) -> f64 {
        self.phat[self.counts.axes.index(elapsed_sec, lead)]
    }
}

/// Apply the windowed Beta-Binomial estimator at every cell.
pub fn build_grid(counts: CountGrid, config: GridConfig) -> Result<WinProbGrid> {
    if !(config.pseudo.per_cell > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "pseudo-games per cell must be positive, got {}",
            config.pseudo.per_cell
        )));
    }
    let axes = counts.axes;
    let n_l = axes.n_l();
    let cells: Vec<(f64, f64)> = (0..axes.n_t())
        .into_par_iter()
        .flat_map_iter(|t| {
            let counts = &counts;
            (0..n_l).map(move |li| {
                let t = t as u32;
                let lead = axes.lead_min + li as i32;
                let (n, total) = window_counts(counts, t, lead, config.window);
                let (alpha, beta) = pseudo_counts(&axes, t, lead, config.window, config.pseudo);
                estimate_cell(n, total, alpha, beta).expect("positive prior and consistent counts")
            })
        })
        .collect();
    let (phat, psd) = cells.into_iter().unzip();
    Ok(WinProbGrid { counts, phat, psd })
}
