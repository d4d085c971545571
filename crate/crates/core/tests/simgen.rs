use wpimpact::pbp::segment_shifts;
use wpimpact::simgen::{generate_season, SimConfig};
use wpimpact::wpgrid::{accumulate_counts, build_grid, GridAxes, GridConfig};

#[test]
fn shifts_per_game_match_the_target() {
    let (logs, _) = generate_season(&SimConfig::new(6, 12, 200, 21)).unwrap();
    let grid = build_grid(accumulate_counts(&logs, GridAxes::default()), GridConfig::default()).unwrap();
    let total: usize = logs.iter().map(|l| segment_shifts(l, &grid).len()).sum();
    let mean = total as f64 / logs.len() as f64;
    assert!((28.0..=34.0).contains(&mean), "mean shifts per game {mean}");
}

#[test]
fn null_league_home_win_rate_is_even() {
    let (logs, _) = generate_season(&SimConfig::new(6, 10, 1000, 4)).unwrap();
    let wins = logs.iter().filter(|l| l.home_won).count() as f64;
    let n = logs.len() as f64;
    let se = (0.25 / n).sqrt();
    assert!((wins / n - 0.5).abs() < 3.0 * se, "home win rate {}", wins / n);
}

#[test]
fn games_score_like_basketball() {
    let (logs, _) = generate_season(&SimConfig::new(4, 10, 200, 8)).unwrap();
    let pts: f64 = logs.iter().map(|l| l.final_score()).map(|(h, a)| (h + a) as f64).sum::<f64>() / logs.len() as f64;
    assert!((160.0..=220.0).contains(&pts), "points per game {pts}");
    assert!(logs.iter().all(|l| l.end_sec >= 2880 && (l.end_sec - 2880) % 300 == 0));
}

/// Win fraction of team 0 over team 1 when one of its players has effect `theta`.
fn win_fraction(theta: f64) -> (usize, usize) {
    let mut c = SimConfig::new(2, 8, 2000, 77);
    c.theta[0] = theta;
    let (logs, _) = generate_season(&c).unwrap();
    let wins = logs
        .iter()
        .filter(|l| (l.home_team == "T00") == l.home_won)
        .count();
    (wins, logs.len())
}

#[test]
fn a_better_player_wins_more() {
    let (w0, n) = win_fraction(0.0);
    let (w1, _) = win_fraction(0.02);
    let (w2, _) = win_fraction(0.04);
    let p = |w: usize| w as f64 / n as f64;
    // one-sided two-proportion z test at the 1% level
    let z = |a: usize, b: usize| {
        let pool = (a + b) as f64 / (2 * n) as f64;
        (p(b) - p(a)) / (2.0 * pool * (1.0 - pool) / n as f64).sqrt()
    };
    assert!(z(w0, w1) > 2.326, "{} -> {}", p(w0), p(w1));
    assert!(z(w1, w2) > 2.326, "{} -> {}", p(w1), p(w2));
}
