use std::collections::{HashMap, HashSet};
use std::io::Read;

use chrono::NaiveDate;

use super::{EventKind, GameEvent, GameLog, Side};
use crate::error::{Error, Result};

/// Column order of the event CSV.
pub const EVENT_COLUMNS: [&str; 13] = [
    "game_id",
    "date",
    "period",
    "elapsed_sec",
    "event_kind",
    "team_side",
    "player_in",
    "player_out",
    "points",
    "home_score",
    "away_score",
    "home_team",
    "away_team",
];

struct RawGame {
    date: NaiveDate,
    home_team: String,
    away_team: String,
    events: Vec<GameEvent>,
}

/// Parse an event CSV into validated games, in order of first appearance.
pub fn parse_events<R: Read>(input: R) -> Result<Vec<GameLog>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let headers = reader.headers()?.clone();
    for (i, want) in EVENT_COLUMNS.iter().enumerate() {
        match headers.get(i) {
            Some(h) if h == *want => {}
            Some(h) => {
                return Err(Error::malformed(
                    1,
                    format!("column {} is `{h}`, expected `{want}`", i + 1),
                ))
            }
            None => return Err(Error::MissingColumn((*want).to_string())),
        }
    }

    let mut order: Vec<String> = Vec::new();
    let mut games: HashMap<String, RawGame> = HashMap::new();

    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != EVENT_COLUMNS.len() {
            return Err(Error::malformed(
                line,
                format!("expected {} fields, found {}", EVENT_COLUMNS.len(), record.len()),
            ));
        }
        let field = |i: usize| record.get(i).unwrap_or("");
        let num = |i: usize| -> Result<u32> {
            field(i).parse::<u32>().map_err(|_| {
                Error::malformed(line, format!("{} `{}` is not a non-negative integer", EVENT_COLUMNS[i], field(i)))
            })
        };
        let opt = |i: usize| {
            let s = field(i);
            (!s.is_empty()).then(|| s.to_string())
        };

        let game_id = field(0).to_string();
        if game_id.is_empty() {
            return Err(Error::malformed(line, "empty game_id"));
        }
        let date = NaiveDate::parse_from_str(field(1), "%Y-%m-%d")
            .map_err(|_| Error::malformed(line, format!("bad date `{}`", field(1))))?;
        let kind: EventKind = field(4).parse().map_err(|kind| Error::UnknownEventKind { line, kind })?;
        let side: Side = field(5)
            .parse()
            .map_err(|s| Error::malformed(line, format!("bad team_side `{s}`")))?;
        let event = GameEvent {
            game_id: game_id.clone(),
            period: num(2)?,
            elapsed_sec: num(3)?,
            kind,
            side,
            player_in: opt(6),
            player_out: opt(7),
            points: if field(8).is_empty() { 0 } else { num(8)? },
            home_score: num(9)?,
            away_score: num(10)?,
            line,
        };
        let home_team = field(11).to_string();
        let away_team = field(12).to_string();

        match games.get_mut(&game_id) {
            Some(g) => {
                if g.date != date || g.home_team != home_team || g.away_team != away_team {
                    return Err(Error::malformed(
                        line,
                        format!("game {game_id}: date or teams differ from earlier rows"),
                    ));
                }
                g.events.push(event);
            }
            None => {
                order.push(game_id.clone());
                games.insert(
                    game_id,
                    RawGame {
                        date,
                        home_team,
                        away_team,
                        events: vec![event],
                    },
                );
            }
        }
    }

    order
        .into_iter()
        .map(|id| {
            let g = games.remove(&id).expect("indexed game");
            GameLog::from_events(id, g.date, g.home_team, g.away_team, g.events)
        })
        .collect()
}

impl GameLog {
    /// Validate an ordered event stream and derive lineups, outcome and period breaks.
    pub fn from_events(
        game_id: String,
        date: NaiveDate,
        home_team: String,
        away_team: String,
        events: Vec<GameEvent>,
    ) -> Result<GameLog> {
        let lineup_err = |message: String| Error::Lineup {
            game_id: game_id.clone(),
            message,
        };
        let game_err = |message: String| Error::InvalidGame {
            game_id: game_id.clone(),
            message,
        };

        if home_team.is_empty() || away_team.is_empty() || home_team == away_team {
            return Err(game_err(format!("invalid teams `{home_team}` vs `{away_team}`")));
        }

        let mut home_on: Vec<String> = Vec::with_capacity(5);
        let mut away_on: Vec<String> = Vec::with_capacity(5);
        let mut seen_home: HashSet<String> = HashSet::new();
        let mut seen_away: HashSet<String> = HashSet::new();
        let mut home_starters: Vec<String> = Vec::new();
        let mut away_starters: Vec<String> = Vec::new();
        let (mut home_score, mut away_score) = (0u32, 0u32);
        let mut last_elapsed = 0u32;
        let mut last_period = 1u32;
        let mut period_ends: Vec<u32> = Vec::new();
        let mut game_end: Option<u32> = None;
        let mut lineups_complete = false;

        for e in &events {
            if e.game_id != game_id {
                return Err(game_err(format!("line {}: event belongs to game {}", e.line, e.game_id)));
            }
            if e.elapsed_sec < last_elapsed {
                return Err(Error::NonMonotoneClock {
                    game_id: game_id.clone(),
                    line: e.line,
                    from: last_elapsed,
                    to: e.elapsed_sec,
                });
            }
            if e.period == 0 || e.period < last_period {
                return Err(game_err(format!("line {}: period {} out of order", e.line, e.period)));
            }
            if game_end.is_some() {
                return Err(game_err(format!("line {}: event after game_end", e.line)));
            }
            last_elapsed = e.elapsed_sec;
            last_period = e.period;

            if e.kind != EventKind::Score && e.points != 0 {
                return Err(game_err(format!("line {}: points on a {} event", e.line, e.kind)));
            }

            let starters_phase = e.elapsed_sec == 0
                && matches!(e.kind, EventKind::PeriodStart | EventKind::Substitution)
                && e.player_out.is_none();
            if !starters_phase && !lineups_complete {
                check_starters(&home_on, &away_on).map_err(lineup_err)?;
                lineups_complete = true;
            }

            match e.kind {
                EventKind::Substitution => {
                    let (on, seen, other_seen) = match e.side {
                        Side::Home => (&mut home_on, &mut seen_home, &seen_away),
                        Side::Away => (&mut away_on, &mut seen_away, &seen_home),
                        Side::None => {
                            return Err(lineup_err(format!("line {}: substitution without team_side", e.line)))
                        }
                    };
                    let Some(player_in) = e.player_in.as_ref() else {
                        return Err(lineup_err(format!("line {}: substitution without player_in", e.line)));
                    };
                    if other_seen.contains(player_in) {
                        return Err(lineup_err(format!(
                            "line {}: player {player_in} already played for the other side",
                            e.line
                        )));
                    }
                    match e.player_out.as_ref() {
                        None => {
                            // starter declaration
                            if e.elapsed_sec != 0 || lineups_complete {
                                return Err(lineup_err(format!(
                                    "line {}: substitution without player_out after tip-off",
                                    e.line
                                )));
                            }
                            if on.len() == 5 {
                                return Err(lineup_err(format!(
                                    "line {}: more than five {} starters",
                                    e.line, e.side
                                )));
                            }
                            if on.contains(player_in) {
                                return Err(lineup_err(format!(
                                    "line {}: starter {player_in} declared twice",
                                    e.line
                                )));
                            }
                            on.push(player_in.clone());
                            seen.insert(player_in.clone());
                            match e.side {
                                Side::Home => home_starters.push(player_in.clone()),
                                _ => away_starters.push(player_in.clone()),
                            }
                        }
                        Some(player_out) => {
                            let Some(pos) = on.iter().position(|p| p == player_out) else {
                                return Err(lineup_err(format!(
                                    "line {}: player_out not on court ({player_out})",
                                    e.line
                                )));
                            };
                            if on.contains(player_in) {
                                return Err(lineup_err(format!(
                                    "line {}: player_in already on court ({player_in})",
                                    e.line
                                )));
                            }
                            on[pos] = player_in.clone();
                            seen.insert(player_in.clone());
                        }
                    }
                }
                EventKind::Score => {
                    match e.side {
                        Side::Home => home_score += e.points,
                        Side::Away => away_score += e.points,
                        Side::None => {
                            return Err(game_err(format!("line {}: score without team_side", e.line)))
                        }
                    }
                    if e.points == 0 {
                        return Err(game_err(format!("line {}: score event with zero points", e.line)));
                    }
                }
                EventKind::PeriodEnd => period_ends.push(e.elapsed_sec),
                EventKind::GameEnd => game_end = Some(e.elapsed_sec),
                EventKind::PeriodStart => {}
            }

            if e.home_score != home_score || e.away_score != away_score {
                return Err(game_err(format!(
                    "line {}: running score {}-{} does not match {}-{}",
                    e.line, e.home_score, e.away_score, home_score, away_score
                )));
            }
        }

        if !lineups_complete {
            check_starters(&home_on, &away_on).map_err(lineup_err)?;
        }

        let end_sec = game_end
            .or_else(|| period_ends.last().copied())
            .ok_or_else(|| game_err("no game_end or period_end event".to_string()))?;
        if end_sec == 0 {
            return Err(game_err("game has zero length".to_string()));
        }
        if home_score == away_score {
            return Err(game_err(format!("game ended tied {home_score}-{away_score}")));
        }

        let mut period_breaks: Vec<u32> = period_ends.into_iter().filter(|&t| t > 0 && t < end_sec).collect();
        period_breaks.dedup();

        let to_array = |v: Vec<String>| -> [String; 5] { v.try_into().expect("five starters") };
        Ok(GameLog {
            game_id,
            date,
            home_team,
            away_team,
            events,
            home_won: home_score > away_score,
            home_starters: to_array(home_starters),
            away_starters: to_array(away_starters),
            end_sec,
            period_breaks,
        })
    }
}

fn check_starters(home: &[String], away: &[String]) -> std::result::Result<(), String> {
    if home.len() != 5 {
        return Err(format!("expected 5 home starters, found {}", home.len()));
    }
    if away.len() != 5 {
        return Err(format!("expected 5 away starters, found {}", away.len()));
    }
    Ok(())
}
