//! Deterministic report rendering: a medal-table text view and a
//! machine-readable CSV with the per-instance breakdown.

use crate::score::{points_str, Ranking, ScoreTable};
use crate::track::TrackConfig;

pub fn render_text(cfg: &TrackConfig, ranking: &Ranking, table: &ScoreTable) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "Track {} — goal: {}, cpu {}s, wall {}s (scale {})\n",
        cfg.track.name(),
        cfg.track.goal(),
        cfg.cpu_seconds,
        cfg.wall_seconds,
        cfg.scale
    ));
    out.push_str("rank  solver                team        points\n");
    for e in &ranking.entries {
        out.push_str(&format!(
            "{:>4}  {:<20}  {:<10}  {:>6}\n",
            e.rank, e.solver, e.team, e.points
        ));
    }
    if !ranking.excluded.is_empty() {
        out.push_str("-- not ranked --\n");
        for (solver, reason) in &ranking.excluded {
            out.push_str(&format!("      {solver}: {reason}\n"));
        }
    }
    if !table.flags.is_empty() {
        out.push_str("-- validation findings --\n");
        for f in &table.flags {
            out.push_str(&format!("      {f}\n"));
        }
    }
    out
}

/// CSV with one row per (solver, instance) award; header only when empty.
pub fn render_csv(table: &ScoreTable) -> String {
    let mut out = String::from("solver,instance,points\n");
    for (solver, instance, halves) in &table.breakdown {
        out.push_str(&format!("{solver},{instance},{}\n", points_str(*halves)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::RankEntry;
    use crate::track::{Track, TrackConfig};

    #[test]
    fn empty_ranking_yields_header_only_csv() {
        let csv = render_csv(&ScoreTable::default());
        assert_eq!(csv, "solver,instance,points\n");
    }

    #[test]
    fn rows_follow_ranking_order() {
        let cfg = TrackConfig::new(Track::Cop, 1.0);
        let ranking = Ranking {
            track: "COP".into(),
            entries: vec![
                RankEntry {
                    rank: 1,
                    solver: "a".into(),
                    team: "t1".into(),
                    family: "a".into(),
                    halves: 5,
                    points: "2.5".into(),
                },
                RankEntry {
                    rank: 1,
                    solver: "b".into(),
                    team: "t2".into(),
                    family: "b".into(),
                    halves: 5,
                    points: "2.5".into(),
                },
            ],
            excluded: vec![("c".into(), "off-competition".into())],
        };
        let text = render_text(&cfg, &ranking, &ScoreTable::default());
        let a = text.find("   1  a").unwrap();
        let b = text.find("   1  b").unwrap();
        assert!(a < b);
        assert!(text.contains("c: off-competition"));
    }
}
