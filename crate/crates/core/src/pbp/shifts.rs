use chrono::NaiveDate;

use super::{EventKind, GameLog, Side};
use crate::wpgrid::WinProbability;

/// A maximal interval `[start_sec, end_sec)` with ten fixed players.
#[derive(Debug, Clone, PartialEq)]
pub struct Shift {
    pub game_id: String,
    pub date: NaiveDate,
    pub home_team: String,
    pub away_team: String,
    pub index: usize,
    pub start_sec: u32,
    pub end_sec: u32,
    pub home_players: [String; 5],
    pub away_players: [String; 5],
    pub lead_start: i32,
    pub lead_end: i32,
    pub wp_start: f64,
    pub wp_end: f64,
    /// Change in home win probability, `wp_end - wp_start`.
    pub y: f64,
}

impl Shift {
    pub fn duration(&self) -> u32 {
        self.end_sec - self.start_sec
    }
}

/// Cut a game into shifts and evaluate the win probability at both ends.
///
/// Boundaries fall on every second with a substitution and on every period
/// break. All substitutions recorded at one second form a single boundary,
/// and game state at a boundary second includes every event logged at that
/// second, so points scored at a boundary count towards the shift that ends
/// there.
pub fn segment_shifts<W: WinProbability + ?Sized>(log: &GameLog, wp: &W) -> Vec<Shift> {
    let mut bounds: Vec<u32> = vec![0, log.end_sec];
    bounds.extend(log.period_breaks.iter().copied());
    bounds.extend(
        log.events
            .iter()
            .filter(|e| e.kind == EventKind::Substitution && e.player_out.is_some())
            .map(|e| e.elapsed_sec)
            .filter(|&t| t > 0 && t < log.end_sec),
    );
    bounds.sort_unstable();
    bounds.dedup();

    let leads = log.lead_timeline();
    let mut home = log.home_starters.clone();
    let mut away = log.away_starters.clone();
    let mut events = log.events.iter().peekable();

    bounds
        .windows(2)
        .enumerate()
        .map(|(index, w)| {
            let (start, end) = (w[0], w[1]);
            while let Some(e) = events.next_if(|e| e.elapsed_sec <= start) {
                if let (EventKind::Substitution, Some(out), Some(inn)) =
                    (e.kind, e.player_out.as_ref(), e.player_in.as_ref())
                {
                    let court = if e.side == Side::Home { &mut home } else { &mut away };
                    if let Some(slot) = court.iter_mut().find(|p| *p == out) {
                        *slot = inn.clone();
                    }
                }
            }
            let lead_start = leads[start as usize];
            let lead_end = leads[end as usize];
            let wp_start = wp.win_probability(start, lead_start);
            let wp_end = wp.win_probability(end, lead_end);
            Shift {
                game_id: log.game_id.clone(),
                date: log.date,
                home_team: log.home_team.clone(),
                away_team: log.away_team.clone(),
                index,
                start_sec: start,
                end_sec: end,
                home_players: home.clone(),
                away_players: away.clone(),
                lead_start,
                lead_end,
                wp_start,
                wp_end,
                y: wp_end - wp_start,
            }
        })
        .collect()
}
