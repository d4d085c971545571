//! Synthetic seasons with known effects.
//!
//! Each team scores by a per-second Bernoulli process. While a set of ten
//! players is on court the home and away scoring rates are multiplied by
//! `1 + k*e` and `1 - k*e` (clamped to [0.1, 1.9]), where `k` is
//! [`SimConfig::effect_scale`] and
//! `e = mu + sum(theta home) - sum(theta away) + tau_home - tau_away + sigma*z`
//! with one standard normal `z` per shift. With the default constants a
//! shift's win-probability change has mean close to `e`.

use chrono::{Duration, NaiveDate};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pbp::{player_key, team_key, EventKind, GameEvent, GameLog, Side, OVERTIME_SECS, REGULATION_SECS};
use crate::seed::derive_indexed;

/// Scoring events per team per second; about 94 points per team per game.
pub const DEFAULT_SCORING_RATE: f64 = 0.0155;
/// Rate multiplier per unit of shift effect.
pub const DEFAULT_EFFECT_SCALE: f64 = 6.0;
/// Probabilities of 1, 2 and 3 point scores.
pub const POINT_PROBS: [f64; 3] = [0.1, 0.7, 0.2];

const PERIOD_SECS: u32 = REGULATION_SECS / 4;
const RATE_FACTOR_BOUNDS: (f64, f64) = (0.1, 1.9);

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_teams: usize,
    pub roster_size: usize,
    pub n_games: usize,
    pub mu: f64,
    /// Player effects, team-major: `theta[t * roster_size + k]`.
    pub theta: Vec<f64>,
    pub tau: Vec<f64>,
    /// Sd of the per-shift effect noise.
    pub sigma: f64,
    /// Expected shifts per regulation game.
    pub shifts_per_game: f64,
    pub scoring_rate: f64,
    pub effect_scale: f64,
    /// Overtimes played before a tie is broken by a final free throw.
    pub max_overtimes: u32,
    /// Season label; games start on 29 October of this year.
    pub season: i32,
    pub seed: u64,
}

impl SimConfig {
    /// A league with every effect zero.
    pub fn new(n_teams: usize, roster_size: usize, n_games: usize, seed: u64) -> Self {
        Self {
            n_teams,
            roster_size,
            n_games,
            mu: 0.0,
            theta: vec![0.0; n_teams * roster_size],
            tau: vec![0.0; n_teams],
            sigma: 0.0,
            shifts_per_game: 31.0,
            scoring_rate: DEFAULT_SCORING_RATE,
            effect_scale: DEFAULT_EFFECT_SCALE,
            max_overtimes: 5,
            season: 2013,
            seed,
        }
    }

    /// Set player effects to `+scale` for half of each roster and `-scale`
    /// for the rest (random halves), and team effects to alternating
    /// `+team_scale` / `-team_scale`.
    pub fn with_split_effects(mut self, scale: f64, team_scale: f64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(derive_indexed(self.seed, "effects", 0));
        for t in 0..self.n_teams {
            let mut signs: Vec<f64> = (0..self.roster_size)
                .map(|k| if k < self.roster_size / 2 { scale } else { -scale })
                .collect();
            signs.shuffle(&mut rng);
            self.theta[t * self.roster_size..(t + 1) * self.roster_size].copy_from_slice(&signs);
            self.tau[t] = if t % 2 == 0 { team_scale } else { -team_scale };
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n_teams < 2 {
            return bad(format!("n_teams {} < 2", self.n_teams));
        }
        if self.roster_size < 5 {
            return bad(format!("roster_size {} < 5", self.roster_size));
        }
        if self.theta.len() != self.n_teams * self.roster_size || self.tau.len() != self.n_teams {
            return bad("effect vectors do not match league size".into());
        }
        if !(self.shifts_per_game >= 4.0 && self.shifts_per_game < REGULATION_SECS as f64) {
            return bad(format!("shifts_per_game {}", self.shifts_per_game));
        }
        if !(self.scoring_rate > 0.0 && self.scoring_rate < 0.5) {
            return bad(format!("scoring_rate {}", self.scoring_rate));
        }
        if !(self.sigma >= 0.0 && self.effect_scale >= 0.0) {
            return bad("sigma and effect_scale must be non-negative".into());
        }
        let finite = [self.mu, self.sigma, self.effect_scale].into_iter().chain(self.theta.iter().copied()).chain(self.tau.iter().copied());
        if !finite.into_iter().all(f64::is_finite) {
            return bad("non-finite effect".into());
        }
        Ok(())
    }

    pub fn team_id(t: usize) -> String {
        format!("T{t:02}")
    }

    pub fn player_id(t: usize, k: usize) -> String {
        format!("T{t:02}P{k:02}")
    }
}

/// True parameter values keyed by coefficient name.
#[derive(Debug, Clone, PartialEq)]
pub struct Truth {
    pub mu: f64,
    pub sigma: f64,
    pub coefficients: Vec<(String, f64)>,
}

impl Truth {
    fn from_config(c: &SimConfig) -> Self {
        let mut coefficients = Vec::with_capacity(c.theta.len() + c.tau.len());
        for t in 0..c.n_teams {
            for k in 0..c.roster_size {
                coefficients.push((player_key(&SimConfig::player_id(t, k)), c.theta[t * c.roster_size + k]));
            }
        }
        for t in 0..c.n_teams {
            coefficients.push((team_key(&SimConfig::team_id(t)), c.tau[t]));
        }
        Self {
            mu: c.mu,
            sigma: c.sigma,
            coefficients,
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.coefficients.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Simulate `config.n_games` games. Games are independent given the config
/// and each uses its own derived seed.
pub fn generate_season(config: &SimConfig) -> Result<(Vec<GameLog>, Truth)> {
    config.validate()?;
    let pairs: Vec<(usize, usize)> = (0..config.n_teams)
        .flat_map(|h| (0..config.n_teams).filter(move |&a| a != h).map(move |a| (h, a)))
        .collect();
    let per_day = config.n_games.div_ceil(160).max(1);
    let opening = NaiveDate::from_ymd_opt(config.season, 10, 29)
        .ok_or_else(|| Error::InvalidArgument(format!("season {}", config.season)))?;
    let logs = (0..config.n_games)
        .into_par_iter()
        .map(|g| {
            let (h, a) = pairs[g % pairs.len()];
            let date = opening + Duration::days((g / per_day) as i64);
            let mut rng = ChaCha20Rng::seed_from_u64(derive_indexed(config.seed, "game", g as u64));
            simulate_game(config, g, date, h, a, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((logs, Truth::from_config(config)))
}

struct Court {
    on: Vec<usize>,
    bench: Vec<usize>,
}

impl Court {
    fn new<R: Rng>(roster: usize, rng: &mut R) -> Self {
        let mut all: Vec<usize> = (0..roster).collect();
        all.shuffle(rng);
        let bench = all.split_off(5);
        Self { on: all, bench }
    }
}

struct GameBuilder<'a> {
    config: &'a SimConfig,
    game_id: String,
    teams: [usize; 2],
    events: Vec<GameEvent>,
    score: [u32; 2],
}

impl GameBuilder<'_> {
    fn push(&mut self, period: u32, t: u32, kind: EventKind, side: Side, pin: Option<String>, pout: Option<String>, points: u32) {
        self.events.push(GameEvent {
            game_id: self.game_id.clone(),
            period,
            elapsed_sec: t,
            kind,
            side,
            player_in: pin,
            player_out: pout,
            points,
            home_score: self.score[0],
            away_score: self.score[1],
            line: 0,
        });
    }

    fn player(&self, side: usize, k: usize) -> String {
        SimConfig::player_id(self.teams[side], k)
    }

    fn effect(&self, courts: &[Court; 2], z: f64) -> f64 {
        let c = self.config;
        let sum = |side: usize| -> f64 {
            courts[side].on.iter().map(|&k| c.theta[self.teams[side] * c.roster_size + k]).sum()
        };
        c.mu + sum(0) - sum(1) + c.tau[self.teams[0]] - c.tau[self.teams[1]] + c.sigma * z
    }

    fn score<R: Rng>(&mut self, side: usize, period: u32, t: u32, rng: &mut R) {
        let u: f64 = rng.random();
        let points = if u < POINT_PROBS[0] {
            1
        } else if u < POINT_PROBS[0] + POINT_PROBS[1] {
            2
        } else {
            3
        };
        self.score[side] += points;
        let s = if side == 0 { Side::Home } else { Side::Away };
        self.push(period, t, EventKind::Score, s, None, None, points);
    }
}

fn simulate_game<R: Rng>(c: &SimConfig, g: usize, date: NaiveDate, home: usize, away: usize, rng: &mut R) -> Result<GameLog> {
    let mut b = GameBuilder {
        config: c,
        game_id: format!("S{}G{:05}", c.season, g),
        teams: [home, away],
        events: Vec::new(),
        score: [0, 0],
    };
    let mut courts = [Court::new(c.roster_size, rng), Court::new(c.roster_size, rng)];
    let sub_prob = (c.shifts_per_game - 4.0) / REGULATION_SECS as f64;
    let (lo, hi) = RATE_FACTOR_BOUNDS;

    b.push(1, 0, EventKind::PeriodStart, Side::None, None, None, 0);
    for (side, s) in [(0, Side::Home), (1, Side::Away)] {
        for i in 0..5 {
            let p = b.player(side, courts[side].on[i]);
            b.push(1, 0, EventKind::Substitution, s, Some(p), None, 0);
        }
    }

    let mut period = 1u32;
    let mut start = 0u32;
    loop {
        let len = if period <= 4 { PERIOD_SECS } else { OVERTIME_SECS };
        let end = start + len;
        let mut z: f64 = rng.sample(StandardNormal);
        let mut e = b.effect(&courts, z);
        for t in start + 1..=end {
            let rates = [
                c.scoring_rate * (1.0 + c.effect_scale * e).clamp(lo, hi),
                c.scoring_rate * (1.0 - c.effect_scale * e).clamp(lo, hi),
            ];
            for side in 0..2 {
                if rng.random::<f64>() < rates[side] {
                    b.score(side, period, t, rng);
                }
            }
            if t < end && rng.random::<f64>() < sub_prob {
                substitute(&mut b, &mut courts, period, t, rng);
                z = rng.sample(StandardNormal);
                e = b.effect(&courts, z);
            }
        }
        let last_allowed = period >= 4 + c.max_overtimes;
        if b.score[0] == b.score[1] && last_allowed {
            let side = rng.random_range(0..2);
            b.score[side] += 1;
            let s = if side == 0 { Side::Home } else { Side::Away };
            b.push(period, end, EventKind::Score, s, None, None, 1);
        }
        b.push(period, end, EventKind::PeriodEnd, Side::None, None, None, 0);
        if period >= 4 && b.score[0] != b.score[1] {
            b.push(period, end, EventKind::GameEnd, Side::None, None, None, 0);
            break;
        }
        period += 1;
        start = end;
        b.push(period, start, EventKind::PeriodStart, Side::None, None, None, 0);
    }

    let GameBuilder { game_id, events, .. } = b;
    GameLog::from_events(game_id, date, SimConfig::team_id(home), SimConfig::team_id(away), events)
}

/// Swap one to three players of a random side with bench players.
fn substitute<R: Rng>(b: &mut GameBuilder<'_>, courts: &mut [Court; 2], period: u32, t: u32, rng: &mut R) {
    let side = rng.random_range(0..2);
    let court = &mut courts[side];
    let k = rng.random_range(1..=3).min(court.bench.len());
    if k == 0 {
        return;
    }
    let outs = index::sample(rng, 5, k);
    let ins = index::sample(rng, court.bench.len(), k);
    let s = if side == 0 { Side::Home } else { Side::Away };
    let mut swaps = Vec::with_capacity(k);
    for (o, i) in outs.iter().zip(ins.iter()) {
        swaps.push((o, i, court.on[o], court.bench[i]));
    }
    for &(o, i, out_p, in_p) in &swaps {
        court.on[o] = in_p;
        court.bench[i] = out_p;
    }
    for (_, _, out_p, in_p) in swaps {
        let pin = b.player(side, in_p);
        let pout = b.player(side, out_p);
        b.push(period, t, EventKind::Substitution, s, Some(pin), Some(pout), 0);
    }
}
