use std::collections::{BTreeSet, HashMap};

use super::Shift;
use crate::error::{Error, Result};

/// Coefficient name of a player column.
pub fn player_key(id: &str) -> String {
    format!("player:{id}")
}

/// Coefficient name of a team column.
pub fn team_key(id: &str) -> String {
    format!("team:{id}")
}

/// Nonzero entries of one design row, sorted by column.
pub type SparseRow = Vec<(usize, f64)>;

/// Shift-level regression data: response `y` and a sparse design whose
/// first `n_players` columns are player indicators followed by team
/// indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDataset {
    pub columns: Vec<String>,
    pub n_players: usize,
    pub rows: Vec<SparseRow>,
    pub y: Vec<f64>,
    index: HashMap<String, usize>,
}

impl RegressionDataset {
    /// Assemble a dataset from explicit columns and rows.
    pub fn new(columns: Vec<String>, n_players: usize, rows: Vec<SparseRow>, y: Vec<f64>) -> Result<Self> {
        if rows.len() != y.len() {
            return Err(Error::InvalidArgument(format!(
                "{} design rows but {} responses",
                rows.len(),
                y.len()
            )));
        }
        if n_players > columns.len() {
            return Err(Error::InvalidArgument("n_players exceeds column count".into()));
        }
        let p = columns.len();
        for (i, row) in rows.iter().enumerate() {
            if row.iter().any(|&(c, _)| c >= p) {
                return Err(Error::InvalidArgument(format!("row {i} references a column beyond {p}")));
            }
            if row.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(Error::InvalidArgument(format!("row {i} columns not strictly increasing")));
            }
        }
        let index = columns.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect::<HashMap<_, _>>();
        if index.len() != p {
            return Err(Error::InvalidArgument("duplicate column names".into()));
        }
        Ok(RegressionDataset {
            columns,
            n_players,
            rows,
            y,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn n_teams(&self) -> usize {
        self.columns.len() - self.n_players
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Dense copy of row `i`.
    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.p()];
        for &(c, v) in &self.rows[i] {
            out[c] = v;
        }
        out
    }

    /// Same design with the response replaced.
    pub fn with_response(&self, y: Vec<f64>) -> Result<Self> {
        Self::new(self.columns.clone(), self.n_players, self.rows.clone(), y)
    }

    /// Keep only the listed rows, in the given order.
    pub fn select_rows(&self, keep: &[usize]) -> Self {
        RegressionDataset {
            columns: self.columns.clone(),
            n_players: self.n_players,
            rows: keep.iter().map(|&i| self.rows[i].clone()).collect(),
            y: keep.iter().map(|&i| self.y[i]).collect(),
            index: self.index.clone(),
        }
    }
}

/// Signed indicator regression rows from scored shifts.
///
/// Home players and the home team get `+1`, away players and the away team
/// `-1`. Columns are sorted by id within the player and team blocks.
pub fn build_dataset(shifts: &[Shift]) -> Result<RegressionDataset> {
    if shifts.is_empty() {
        return Err(Error::Empty("no shifts to build a dataset from".into()));
    }
    let players: BTreeSet<&str> = shifts
        .iter()
        .flat_map(|s| s.home_players.iter().chain(s.away_players.iter()))
        .map(String::as_str)
        .collect();
    let teams: BTreeSet<&str> = shifts
        .iter()
        .flat_map(|s| [s.home_team.as_str(), s.away_team.as_str()])
        .collect();

    let mut columns: Vec<String> = players.iter().map(|p| player_key(p)).collect();
    let n_players = columns.len();
    columns.extend(teams.iter().map(|t| team_key(t)));
    let player_col: HashMap<&str, usize> = players.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let team_col: HashMap<&str, usize> = teams.iter().enumerate().map(|(i, t)| (*t, n_players + i)).collect();

    let rows = shifts
        .iter()
        .map(|s| {
            let mut row: SparseRow = Vec::with_capacity(12);
            row.extend(s.home_players.iter().map(|p| (player_col[p.as_str()], 1.0)));
            row.extend(s.away_players.iter().map(|p| (player_col[p.as_str()], -1.0)));
            row.push((team_col[s.home_team.as_str()], 1.0));
            row.push((team_col[s.away_team.as_str()], -1.0));
            row.sort_by_key(|&(c, _)| c);
            row
        })
        .collect();
    let y = shifts.iter().map(|s| s.y).collect();
    RegressionDataset::new(columns, n_players, rows, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn shift(home: [&str; 5], away: [&str; 5], wp: (f64, f64)) -> Shift {
        Shift {
            game_id: "g".into(),
            date: NaiveDate::from_ymd_opt(2013, 11, 1).unwrap(),
            home_team: "HOM".into(),
            away_team: "AWY".into(),
            index: 0,
            start_sec: 0,
            end_sec: 60,
            home_players: home.map(String::from),
            away_players: away.map(String::from),
            lead_start: 0,
            lead_end: 0,
            wp_start: wp.0,
            wp_end: wp.1,
            y: wp.1 - wp.0,
        }
    }

    const H: [&str; 5] = ["h1", "h2", "h3", "h4", "h5"];
    const A: [&str; 5] = ["a1", "a2", "a3", "a4", "a5"];

    #[test]
    fn response_is_wp_change() {
        let d = build_dataset(&[shift(H, A, (0.56, 0.72))]).unwrap();
        assert!((d.y[0] - 0.16).abs() < 1e-12);
    }

    #[test]
    fn signed_indicators() {
        let d = build_dataset(&[shift(H, A, (0.5, 0.5)), shift(["h1", "h2", "h3", "h4", "h6"], A, (0.5, 0.5))]).unwrap();
        let row = d.dense_row(0);
        assert_eq!(row[d.column("player:h1").unwrap()], 1.0);
        assert_eq!(row[d.column("player:a3").unwrap()], -1.0);
        assert_eq!(row[d.column("player:h6").unwrap()], 0.0);
        assert_eq!(row[d.column("team:HOM").unwrap()], 1.0);
        assert_eq!(row[d.column("team:AWY").unwrap()], -1.0);
        assert_eq!(d.n_players, 11);
        assert_eq!(d.n_teams(), 2);
        for r in &d.rows {
            assert_eq!(r.len(), 12);
            let players: f64 = r.iter().filter(|(c, _)| *c < d.n_players).map(|(_, v)| v).sum();
            let teams: f64 = r.iter().filter(|(c, _)| *c >= d.n_players).map(|(_, v)| v).sum();
            assert_eq!(players, 0.0);
            assert_eq!(teams, 0.0);
        }
    }

    #[test]
    fn empty_shift_list_is_an_error() {
        assert!(matches!(build_dataset(&[]), Err(Error::Empty(_))));
    }
}
