//! Model checks: response transformations, binned spread, reweighting,
//! residuals and chain autocorrelation.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use wpimpact::diagnostics::{
    acf, binned_sd, equal_bins, histogram, residual_diagnostics, reweight_dataset, reweighted_variant,
    transform_response, LogitPolicy, ResponseTag, DEFAULT_BINS,
};
use wpimpact::io;

use crate::config::{invalid, ConfigFile};
use crate::pipeline::{create, open};
use crate::OutDir;

#[derive(Args, Debug)]
pub struct DiagnoseArgs {
    /// Dataset written by `build`
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Shifts written by `build`, row-aligned with the dataset
    #[arg(long)]
    shifts: Option<PathBuf>,
    /// Draws written by `fit`; enables residual and autocorrelation output
    #[arg(long)]
    draws: Option<PathBuf>,
    #[command(flatten)]
    out: OutDir,
    /// Equal-width start-probability bins [default: 10]
    #[arg(long)]
    bins: Option<usize>,
    /// Also reweight to this binned sd and write dataset_reweighted.csv
    #[arg(long)]
    target_sd: Option<f64>,
    /// Largest autocorrelation lag [default: 50]
    #[arg(long)]
    max_lag: Option<usize>,
    /// Histogram bins for responses and residuals [default: 40]
    #[arg(long)]
    hist_bins: Option<usize>,
}

pub fn diagnose(a: &DiagnoseArgs, cfg: &ConfigFile) -> Result<()> {
    let dir = a.out.resolve(cfg)?;
    let data_path: PathBuf = cfg.require(a.dataset.clone(), "dataset")?;
    let data = io::read_dataset(open(&data_path)?).with_context(|| format!("reading dataset {}", data_path.display()))?;
    let shift_path: PathBuf = cfg.require(a.shifts.clone(), "shifts")?;
    let shifts = io::read_shifts(open(&shift_path)?).with_context(|| format!("reading shifts {}", shift_path.display()))?;
    if shifts.len() != data.n() {
        return Err(invalid(format!("{} shifts but {} dataset rows", shifts.len(), data.n())));
    }
    if let Some(i) = (0..data.n()).find(|&i| data.y[i] != shifts[i].y) {
        return Err(invalid(format!("shift {} response does not match dataset row {i}", shifts[i].index)));
    }
    let n_bins = cfg.or(a.bins, "bins", DEFAULT_BINS)?;
    if n_bins == 0 {
        return Err(invalid("--bins must be at least 1".into()));
    }
    let hist_bins = cfg.or(a.hist_bins, "hist-bins", 40)?;
    let edges = equal_bins(n_bins);
    let wp_start: Vec<f64> = shifts.iter().map(|s| s.wp_start).collect();
    let wp_end: Vec<f64> = shifts.iter().map(|s| s.wp_end).collect();

    let variants = [ResponseTag::Y1, ResponseTag::Y2, ResponseTag::Y3]
        .into_iter()
        .map(|t| transform_response(&wp_start, &wp_end, t, LogitPolicy::Clamp))
        .collect::<wpimpact::Result<Vec<_>>>()?;
    io::write_table(
        &["game_id", "index", "wp_start", "wp_end", "y1", "y2", "y3"],
        shifts.iter().enumerate().map(|(i, s)| {
            let mut row = vec![s.game_id.clone(), s.index.to_string(), s.wp_start.to_string(), s.wp_end.to_string()];
            row.extend(variants.iter().map(|v| v.values[i].to_string()));
            row
        }),
        create(&dir, "responses.csv")?,
    )?;

    let mut sd_rows = Vec::new();
    let mut hist_rows = Vec::new();
    for v in &variants {
        for b in binned_sd(&v.values, &wp_start, &edges)? {
            sd_rows.push(vec![
                v.tag.to_string(),
                b.lo.to_string(),
                b.hi.to_string(),
                b.count.to_string(),
                b.sd.map(|s| s.to_string()).unwrap_or_default(),
            ]);
        }
        for h in histogram(&v.values, hist_bins)? {
            hist_rows.push(vec![v.tag.to_string(), h.lo.to_string(), h.hi.to_string(), h.count.to_string()]);
        }
    }

    for tag in [ResponseTag::Y4, ResponseTag::Y5, ResponseTag::Y6] {
        let (variant, reweighted) = reweighted_variant(&data, &wp_start, &edges, tag)?;
        io::write_dataset(&reweighted, create(&dir, &format!("dataset_{tag}.csv"))?)?;
        for b in binned_sd(&variant.values, &wp_start, &edges)? {
            sd_rows.push(vec![
                tag.to_string(),
                b.lo.to_string(),
                b.hi.to_string(),
                b.count.to_string(),
                b.sd.map(|s| s.to_string()).unwrap_or_default(),
            ]);
        }
    }
    if let Some(target) = cfg.opt(a.target_sd, "target-sd")? {
        let (reweighted, _) = reweight_dataset(&data, &wp_start, &edges, target)?;
        io::write_dataset(&reweighted, create(&dir, "dataset_reweighted.csv")?)?;
    }
    io::write_table(&["variant", "lo", "hi", "count", "sd"], sd_rows, create(&dir, "binned_sd.csv")?)?;

    if let Some(path) = cfg.opt(a.draws.clone(), "draws")? {
        let draws = io::read_draws(open(&path)?).with_context(|| format!("reading draws {}", path.display()))?;
        let res = residual_diagnostics(&data, &draws)?;
        io::write_table(
            &["row", "fitted", "residual"],
            res.fitted
                .iter()
                .zip(&res.residuals)
                .enumerate()
                .map(|(i, (f, r))| vec![i.to_string(), f.to_string(), r.to_string()]),
            create(&dir, "residuals.csv")?,
        )?;
        io::write_table(
            &["theoretical", "raw", "studentized"],
            res.qq
                .iter()
                .map(|q| vec![q.theoretical.to_string(), q.raw.to_string(), q.studentized.to_string()]),
            create(&dir, "qq.csv")?,
        )?;
        for h in histogram(&res.residuals, hist_bins)? {
            hist_rows.push(vec!["residual".into(), h.lo.to_string(), h.hi.to_string(), h.count.to_string()]);
        }

        let max_lag = cfg.or(a.max_lag, "max-lag", 50)?.min(draws.n_draws().saturating_sub(2));
        let mut series: Vec<(String, Vec<f64>)> = vec![("mu".into(), draws.mu.clone()), ("sigma2".into(), draws.sigma2.clone())];
        series.extend(draws.names().iter().enumerate().map(|(j, n)| (n.clone(), draws.column(j))));
        let mut acf_rows = Vec::new();
        for (name, xs) in &series {
            for (k, r) in acf(xs, max_lag)?.into_iter().enumerate() {
                acf_rows.push(vec![name.clone(), (k + 1).to_string(), r.to_string()]);
            }
        }
        io::write_table(&["parameter", "lag", "acf"], acf_rows, create(&dir, "acf.csv")?)?;
    }
    io::write_table(&["series", "lo", "hi", "count"], hist_rows, create(&dir, "histograms.csv")?)?;

    println!("{} shifts, {} bins -> {}", data.n(), n_bins, dir.display());
    for v in &variants {
        let (m, s) = wpimpact::metrics::mean_sd(&v.values);
        println!("  {}: mean {m:.5} sd {s:.5}", v.tag);
    }
    Ok(())
}
