use super::{summarize, ImpactSummary};
use crate::blasso::PosteriorDraws;
use crate::error::{Error, Result};

/// Share of draws in which coefficient `a` is strictly greater than `b`.
pub fn exceedance_prob(draws: &PosteriorDraws, a: &str, b: &str) -> Result<f64> {
    let ia = draws.index_of(a)?;
    let ib = draws.index_of(b)?;
    let wins = (0..draws.n_draws())
        .filter(|&s| {
            let d = draws.draw(s);
            d[ia] > d[ib]
        })
        .count();
    Ok(wins as f64 / draws.n_draws() as f64)
}

/// Impact Score of one coefficient.
pub fn impact_score(draws: &PosteriorDraws, id: &str) -> Result<ImpactSummary> {
    summarize(id, &draws.column_by_name(id)?)
}

/// Impact Scores of the named coefficients, or of every coefficient when
/// `ids` is `None`, sorted by decreasing score.
pub fn impact_scores(draws: &PosteriorDraws, ids: Option<&[String]>) -> Result<Vec<ImpactSummary>> {
    let names: Vec<&String> = match ids {
        Some(ids) => ids.iter().collect(),
        None => draws.names().iter().collect(),
    };
    let mut out = names
        .into_iter()
        .map(|n| impact_score(draws, n))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| b.impact_score.total_cmp(&a.impact_score));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub id: String,
    pub avg_rank: f64,
    /// Probability this effect exceeds that of the next entry; `None` for the last.
    pub p_next: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeamRanking {
    pub team: String,
    pub entries: Vec<RankEntry>,
}

/// Within-roster ranks for every draw (1 = largest effect), ties broken by
/// coefficient index.
fn draw_ranks(draws: &PosteriorDraws, cols: &[usize]) -> Vec<Vec<usize>> {
    let k = cols.len();
    let mut order: Vec<usize> = (0..k).collect();
    (0..draws.n_draws())
        .map(|s| {
            let d = draws.draw(s);
            order.sort_by(|&x, &y| d[cols[y]].total_cmp(&d[cols[x]]).then(cols[x].cmp(&cols[y])));
            let mut ranks = vec![0; k];
            for (r, &m) in order.iter().enumerate() {
                ranks[m] = r + 1;
            }
            ranks
        })
        .collect()
}

/// Impact Ranking: average within-roster rank over draws, ordered best first,
/// with the probability that each player's effect beats the next one's.
pub fn impact_ranking(draws: &PosteriorDraws, team: &str, roster: &[String]) -> Result<TeamRanking> {
    if roster.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "roster of {team} has {} players, need at least 2",
            roster.len()
        )));
    }
    let cols = roster.iter().map(|id| draws.index_of(id)).collect::<Result<Vec<_>>>()?;
    let mut dedup = cols.clone();
    dedup.sort_unstable();
    dedup.dedup();
    if dedup.len() != cols.len() {
        return Err(Error::InvalidArgument(format!("roster of {team} lists a player twice")));
    }
    let k = roster.len();
    let mut sums = vec![0usize; k];
    for ranks in draw_ranks(draws, &cols) {
        for (acc, r) in sums.iter_mut().zip(ranks) {
            *acc += r;
        }
    }
    let s = draws.n_draws() as f64;
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sums[a].cmp(&sums[b]).then(cols[a].cmp(&cols[b])));

    let mut entries = Vec::with_capacity(k);
    for (pos, &m) in order.iter().enumerate() {
        let p_next = match order.get(pos + 1) {
            Some(&next) => Some(exceedance_prob(draws, &roster[m], &roster[next])?),
            None => None,
        };
        entries.push(RankEntry {
            id: roster[m].clone(),
            avg_rank: sums[m] as f64 / s,
            p_next,
        });
    }
    Ok(TeamRanking {
        team: team.to_string(),
        entries,
    })
}

/// Equal-tailed credible interval of a coefficient's rank among `ids`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankInterval {
    pub id: String,
    pub lower: usize,
    pub upper: usize,
    /// Number of draws in which this coefficient ranked first.
    pub times_first: usize,
}

/// League-wide rank intervals at credibility `level` (e.g. 0.95).
pub fn rank_intervals(draws: &PosteriorDraws, ids: &[String], level: f64) -> Result<Vec<RankInterval>> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("credibility level {level}")));
    }
    let cols = ids.iter().map(|id| draws.index_of(id)).collect::<Result<Vec<_>>>()?;
    let all = draw_ranks(draws, &cols);
    let tail = (1.0 - level) / 2.0;
    Ok((0..ids.len())
        .map(|m| {
            let mut r: Vec<usize> = all.iter().map(|ranks| ranks[m]).collect();
            r.sort_unstable();
            let n = r.len();
            let lo = ((tail * n as f64).floor() as usize).min(n - 1);
            let hi = (((1.0 - tail) * n as f64).ceil() as usize).saturating_sub(1).min(n - 1);
            RankInterval {
                id: ids[m].clone(),
                lower: r[lo],
                upper: r[hi],
                times_first: r.iter().filter(|&&x| x == 1).count(),
            }
        })
        .collect())
}
