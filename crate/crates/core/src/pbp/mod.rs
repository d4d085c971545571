//! Play-by-play events, lineup reconstruction, shift segmentation and the
//! regression dataset.

mod dataset;
mod parse;
mod shifts;

pub use dataset::{build_dataset, player_key, team_key, RegressionDataset, SparseRow};
pub use parse::{parse_events, EVENT_COLUMNS};
pub use shifts::{segment_shifts, Shift};

use chrono::{Datelike, NaiveDate};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Seconds in regulation (four 12-minute periods).
pub const REGULATION_SECS: u32 = 2880;
/// Seconds added by each overtime period.
pub const OVERTIME_SECS: u32 = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    PeriodStart,
    PeriodEnd,
    Substitution,
    Score,
    GameEnd,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::PeriodStart => "period_start",
            EventKind::PeriodEnd => "period_end",
            EventKind::Substitution => "substitution",
            EventKind::Score => "score",
            EventKind::GameEnd => "game_end",
        }
    }
}

impl FromStr for EventKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "period_start" => EventKind::PeriodStart,
            "period_end" => EventKind::PeriodEnd,
            "substitution" => EventKind::Substitution,
            "score" => EventKind::Score,
            "game_end" => EventKind::GameEnd,
            other => return Err(other.to_string()),
        })
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Home,
    Away,
    None,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Home => "home",
            Side::Away => "away",
            Side::None => "none",
        }
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "home" => Side::Home,
            "away" => Side::Away,
            "none" | "" => Side::None,
            other => return Err(other.to_string()),
        })
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of the event stream.
#[derive(Debug, Clone, PartialEq)]
pub struct GameEvent {
    pub game_id: String,
    pub period: u32,
    pub elapsed_sec: u32,
    pub kind: EventKind,
    pub side: Side,
    pub player_in: Option<String>,
    pub player_out: Option<String>,
    pub points: u32,
    pub home_score: u32,
    pub away_score: u32,
    /// Source line, 0 when the event was not read from a file.
    pub line: u64,
}

/// A validated game: the ordered events plus the facts derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct GameLog {
    pub game_id: String,
    pub date: NaiveDate,
    pub home_team: String,
    pub away_team: String,
    pub events: Vec<GameEvent>,
    pub home_won: bool,
    pub home_starters: [String; 5],
    pub away_starters: [String; 5],
    /// Elapsed second at which the game ended.
    pub end_sec: u32,
    /// Elapsed seconds of the period boundaries strictly inside the game.
    pub period_breaks: Vec<u32>,
}

impl GameLog {
    /// Home lead after every event at or before each second, for `0..=end_sec`.
    pub fn lead_timeline(&self) -> Vec<i32> {
        let mut leads = Vec::with_capacity(self.end_sec as usize + 1);
        let mut lead = 0i32;
        let mut events = self.events.iter().peekable();
        for t in 0..=self.end_sec {
            while let Some(e) = events.next_if(|e| e.elapsed_sec <= t) {
                lead = e.home_score as i32 - e.away_score as i32;
            }
            leads.push(lead);
        }
        leads
    }

    pub fn final_score(&self) -> (u32, u32) {
        self.events
            .last()
            .map(|e| (e.home_score, e.away_score))
            .unwrap_or((0, 0))
    }

    pub fn season(&self) -> i32 {
        season_of(self.date)
    }
}

/// Season label of a date: the calendar year in which the season began.
/// Games from August onwards belong to that year's season.
pub fn season_of(date: NaiveDate) -> i32 {
    if date.month() >= 8 {
        date.year()
    } else {
        date.year() - 1
    }
}

/// Inclusive range of season labels, written `2011` or `2011-2013`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeasonRange {
    pub first: i32,
    pub last: i32,
}

impl SeasonRange {
    pub fn contains(&self, season: i32) -> bool {
        (self.first..=self.last).contains(&season)
    }
}

impl FromStr for SeasonRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("season range `{s}`"));
        let (a, b) = match s.split_once('-') {
            Some((a, b)) => (a, b),
            None => (s, s),
        };
        let first: i32 = a.trim().parse().map_err(|_| bad())?;
        let last: i32 = b.trim().parse().map_err(|_| bad())?;
        if first > last {
            return Err(bad());
        }
        Ok(SeasonRange { first, last })
    }
}

/// Keep games in `seasons` (if given) played on or before `before` (if given).
pub fn filter_logs(
    logs: &[GameLog],
    seasons: Option<SeasonRange>,
    before: Option<NaiveDate>,
) -> Vec<GameLog> {
    logs.iter()
        .filter(|g| seasons.is_none_or(|r| r.contains(g.season())))
        .filter(|g| before.is_none_or(|d| g.date <= d))
        .cloned()
        .collect()
}
