//! CSV readers and writers for every pipeline artifact.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a file back yields bit-identical values.

use std::io::{Read, Write};

use chrono::NaiveDate;

use crate::blasso::PosteriorDraws;
use crate::error::{Error, Result};
use crate::metrics::ImpactSummary;
use crate::pbp::{GameLog, RegressionDataset, Shift, EVENT_COLUMNS};
use crate::simgen::Truth;
use crate::wpgrid::{CountGrid, GridAxes, WinProbGrid};

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(w)
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn check_header(headers: &csv::StringRecord, want: &[&str]) -> Result<()> {
    for (i, w) in want.iter().enumerate() {
        match headers.get(i) {
            Some(h) if h == *w => {}
            _ => return Err(Error::MissingColumn((*w).to_string())),
        }
    }
    Ok(())
}

fn field<'a>(record: &'a csv::StringRecord, i: usize) -> Result<&'a str> {
    record
        .get(i)
        .ok_or_else(|| Error::malformed(line_of(record), format!("missing field {}", i + 1)))
}

fn parse<T: std::str::FromStr>(record: &csv::StringRecord, i: usize, what: &str) -> Result<T> {
    let s = field(record, i)?;
    s.parse()
        .map_err(|_| Error::malformed(line_of(record), format!("{what} `{s}` is not a valid number")))
}

fn opt(s: &Option<String>) -> &str {
    s.as_deref().unwrap_or("")
}

/// Write games in the event CSV format.
pub fn write_events<W: Write>(logs: &[GameLog], w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(EVENT_COLUMNS)?;
    for log in logs {
        let date = log.date.format("%Y-%m-%d").to_string();
        for e in &log.events {
            out.write_record([
                e.game_id.as_str(),
                &date,
                &e.period.to_string(),
                &e.elapsed_sec.to_string(),
                e.kind.as_str(),
                e.side.as_str(),
                opt(&e.player_in),
                opt(&e.player_out),
                &e.points.to_string(),
                &e.home_score.to_string(),
                &e.away_score.to_string(),
                &log.home_team,
                &log.away_team,
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub const GRID_COLUMNS: [&str; 6] = ["T", "L", "N", "n", "phat", "psd"];

/// One row per cell, T-major.
pub fn write_grid<W: Write>(grid: &WinProbGrid, w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(GRID_COLUMNS)?;
    let axes = grid.axes();
    for t in 0..=axes.t_max {
        for lead in axes.lead_min..=axes.lead_max {
            let i = axes.index(t, lead);
            out.write_record([
                t.to_string(),
                lead.to_string(),
                grid.counts.total[i].to_string(),
                grid.counts.wins[i].to_string(),
                grid.phat[i].to_string(),
                grid.psd[i].to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_grid<R: Read>(r: R) -> Result<WinProbGrid> {
    let mut rdr = reader(r);
    check_header(rdr.headers()?, &GRID_COLUMNS)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push((
            parse::<u32>(&rec, 0, "T")?,
            parse::<i32>(&rec, 1, "L")?,
            parse::<u32>(&rec, 2, "N")?,
            parse::<u32>(&rec, 3, "n")?,
            parse::<f64>(&rec, 4, "phat")?,
            parse::<f64>(&rec, 5, "psd")?,
            line_of(&rec),
        ));
    }
    if rows.is_empty() {
        return Err(Error::Empty("grid file has no rows".into()));
    }
    let t_max = rows.iter().map(|r| r.0).max().unwrap_or(0);
    let lead_min = rows.iter().map(|r| r.1).min().unwrap_or(0);
    let lead_max = rows.iter().map(|r| r.1).max().unwrap_or(0);
    let axes = GridAxes::new(t_max, lead_min, lead_max)?;
    if rows.len() != axes.len() {
        return Err(Error::InvalidArgument(format!(
            "grid file has {} rows, axes need {}",
            rows.len(),
            axes.len()
        )));
    }
    let mut counts = CountGrid::empty(axes);
    let mut phat = vec![f64::NAN; axes.len()];
    let mut psd = vec![f64::NAN; axes.len()];
    for (t, lead, n_total, n_win, p, s, line) in rows {
        let i = axes.index(t, lead);
        if !phat[i].is_nan() {
            return Err(Error::malformed(line, format!("duplicate cell ({t}, {lead})")));
        }
        if n_win > n_total || !(0.0..=1.0).contains(&p) || !(s >= 0.0) {
            return Err(Error::malformed(line, format!("invalid cell ({t}, {lead})")));
        }
        counts.total[i] = n_total;
        counts.wins[i] = n_win;
        phat[i] = p;
        psd[i] = s;
    }
    Ok(WinProbGrid { counts, phat, psd })
}

/// Dense export: `y`, then one signed column per player, then per team.
pub fn write_dataset<W: Write>(data: &RegressionDataset, w: W) -> Result<()> {
    let mut out = writer(w);
    let mut header = vec!["y".to_string()];
    header.extend(data.columns.iter().cloned());
    out.write_record(&header)?;
    for i in 0..data.n() {
        let mut rec = vec![data.y[i].to_string()];
        rec.extend(data.dense_row(i).into_iter().map(|v| v.to_string()));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_dataset<R: Read>(r: R) -> Result<RegressionDataset> {
    let mut rdr = reader(r);
    let headers = rdr.headers()?.clone();
    check_header(&headers, &["y"])?;
    let columns: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let n_players = columns.iter().take_while(|c| c.starts_with("player:")).count();
    if columns[n_players..].iter().any(|c| !c.starts_with("team:")) {
        return Err(Error::InvalidArgument(
            "dataset columns must be player:* columns followed by team:* columns".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != headers.len() {
            return Err(Error::malformed(line_of(&rec), format!("expected {} fields", headers.len())));
        }
        y.push(parse::<f64>(&rec, 0, "y")?);
        let mut row = Vec::new();
        for j in 0..columns.len() {
            let v: f64 = parse(&rec, j + 1, &columns[j])?;
            if v != 0.0 {
                row.push((j, v));
            }
        }
        rows.push(row);
    }
    RegressionDataset::new(columns, n_players, rows, y)
}

/// `mu`, `sigma2`, then one column per coefficient; one row per draw.
pub fn write_draws<W: Write>(draws: &PosteriorDraws, w: W) -> Result<()> {
    let mut out = writer(w);
    let mut header = vec!["mu".to_string(), "sigma2".to_string()];
    header.extend(draws.names().iter().cloned());
    out.write_record(&header)?;
    for s in 0..draws.n_draws() {
        let mut rec = vec![draws.mu[s].to_string(), draws.sigma2[s].to_string()];
        rec.extend(draws.draw(s).iter().map(|v| v.to_string()));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_draws<R: Read>(r: R) -> Result<PosteriorDraws> {
    let mut rdr = reader(r);
    let headers = rdr.headers()?.clone();
    check_header(&headers, &["mu", "sigma2"])?;
    let names: Vec<String> = headers.iter().skip(2).map(str::to_string).collect();
    let (mut mu, mut sigma2, mut coefs) = (Vec::new(), Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != headers.len() {
            return Err(Error::malformed(line_of(&rec), format!("expected {} fields", headers.len())));
        }
        mu.push(parse(&rec, 0, "mu")?);
        sigma2.push(parse(&rec, 1, "sigma2")?);
        for j in 0..names.len() {
            coefs.push(parse(&rec, j + 2, &names[j])?);
        }
    }
    if mu.is_empty() {
        return Err(Error::Empty("draws file has no rows".into()));
    }
    PosteriorDraws::new(names, mu, sigma2, coefs, Vec::new())
}

pub const SHIFT_COLUMNS: [&str; 22] = [
    "game_id", "date", "home_team", "away_team", "index", "start_sec", "end_sec",
    "home_1", "home_2", "home_3", "home_4", "home_5",
    "away_1", "away_2", "away_3", "away_4", "away_5",
    "lead_start", "lead_end", "wp_start", "wp_end", "y",
];

pub fn write_shifts<W: Write>(shifts: &[Shift], w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(SHIFT_COLUMNS)?;
    for s in shifts {
        let mut rec = vec![
            s.game_id.clone(),
            s.date.format("%Y-%m-%d").to_string(),
            s.home_team.clone(),
            s.away_team.clone(),
            s.index.to_string(),
            s.start_sec.to_string(),
            s.end_sec.to_string(),
        ];
        rec.extend(s.home_players.iter().cloned());
        rec.extend(s.away_players.iter().cloned());
        rec.extend([
            s.lead_start.to_string(),
            s.lead_end.to_string(),
            s.wp_start.to_string(),
            s.wp_end.to_string(),
            s.y.to_string(),
        ]);
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_shifts<R: Read>(r: R) -> Result<Vec<Shift>> {
    let mut rdr = reader(r);
    check_header(rdr.headers()?, &SHIFT_COLUMNS)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let s = |i: usize| field(&rec, i).map(str::to_string);
        let players = |from: usize| -> Result<[String; 5]> {
            Ok([s(from)?, s(from + 1)?, s(from + 2)?, s(from + 3)?, s(from + 4)?])
        };
        let date = NaiveDate::parse_from_str(field(&rec, 1)?, "%Y-%m-%d")
            .map_err(|_| Error::malformed(line_of(&rec), "bad date"))?;
        out.push(Shift {
            game_id: s(0)?,
            date,
            home_team: s(2)?,
            away_team: s(3)?,
            index: parse(&rec, 4, "index")?,
            start_sec: parse(&rec, 5, "start_sec")?,
            end_sec: parse(&rec, 6, "end_sec")?,
            home_players: players(7)?,
            away_players: players(12)?,
            lead_start: parse(&rec, 17, "lead_start")?,
            lead_end: parse(&rec, 18, "lead_end")?,
            wp_start: parse(&rec, 19, "wp_start")?,
            wp_end: parse(&rec, 20, "wp_end")?,
            y: parse(&rec, 21, "y")?,
        });
    }
    Ok(out)
}

/// Truth rows: `mu`, `sigma`, then every coefficient.
pub fn write_truth<W: Write>(truth: &Truth, w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["coefficient", "true_value"])?;
    out.write_record(["mu".to_string(), truth.mu.to_string()])?;
    out.write_record(["sigma".to_string(), truth.sigma.to_string()])?;
    for (name, v) in &truth.coefficients {
        out.write_record([name.clone(), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_truth<R: Read>(r: R) -> Result<Truth> {
    let mut rdr = reader(r);
    check_header(rdr.headers()?, &["coefficient", "true_value"])?;
    let (mut mu, mut sigma, mut coefficients) = (None, None, Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let name = field(&rec, 0)?.to_string();
        let v: f64 = parse(&rec, 1, &name)?;
        match name.as_str() {
            "mu" => mu = Some(v),
            "sigma" => sigma = Some(v),
            _ => coefficients.push((name, v)),
        }
    }
    Ok(Truth {
        mu: mu.ok_or_else(|| Error::MissingColumn("mu".into()))?,
        sigma: sigma.ok_or_else(|| Error::MissingColumn("sigma".into()))?,
        coefficients,
    })
}

pub const IMPACT_COLUMNS: [&str; 6] = ["player", "mean", "sd", "score", "frac_positive", "n_shifts"];

/// Impact scores with each player's shift count.
pub fn write_impact_scores<W: Write>(rows: &[(ImpactSummary, usize)], w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(IMPACT_COLUMNS)?;
    for (s, n) in rows {
        out.write_record([
            s.id.clone(),
            s.post_mean.to_string(),
            s.post_sd.to_string(),
            s.impact_score.to_string(),
            s.frac_positive.to_string(),
            n.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_impact_scores<R: Read>(r: R) -> Result<Vec<(ImpactSummary, usize)>> {
    let mut rdr = reader(r);
    check_header(rdr.headers()?, &IMPACT_COLUMNS)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        out.push((
            ImpactSummary {
                id: field(&rec, 0)?.to_string(),
                post_mean: parse(&rec, 1, "mean")?,
                post_sd: parse(&rec, 2, "sd")?,
                impact_score: parse(&rec, 3, "score")?,
                frac_positive: parse(&rec, 4, "frac_positive")?,
            },
            parse(&rec, 5, "n_shifts")?,
        ));
    }
    Ok(out)
}

/// Write a numeric table with the given header.
pub fn write_table<W: Write>(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>, w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::InvalidArgument(format!(
                "row has {} fields, header has {}",
                row.len(),
                header.len()
            )));
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Read a table written by [`write_table`], checking the header.
pub fn read_table<R: Read>(header: &[&str], r: R) -> Result<Vec<Vec<String>>> {
    let mut rdr = reader(r);
    check_header(rdr.headers()?, header)?;
    rdr.records()
        .map(|rec| Ok(rec?.iter().map(str::to_string).collect()))
        .collect()
}
