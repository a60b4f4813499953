//! Competition scoring and ranking.
//!
//! Satisfaction tracks award one point per instance a solver decides.
//! Optimization tracks award, per instance: 1 for a (trusted) proof of
//! unsatisfiability, 1 for a validated optimum, 0 for a bound beaten by some
//! competitor; holders of the best bound without an optimality claim take 1
//! when nobody proved that bound optimal and 0.5 otherwise.
//!
//! Ranking proceeds in three fixed filter steps: drop off-competition
//! solvers, keep one best variant per family and team, and in mini tracks
//! drop solvers whose family took a podium place in the corresponding main
//! track. Scores are then recomputed over the survivors.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::runs::{ObjSense, RunRecord, RunStatus, SolverMeta};
use crate::track::Track;

/// Points kept in half-point units.
pub type Halves = u32;

pub fn points_str(halves: Halves) -> String {
    if halves % 2 == 0 {
        format!("{}", halves / 2)
    } else {
        format!("{}.5", halves / 2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScoreTable {
    /// Total halves per solver, sorted by solver id.
    pub totals: Vec<(String, Halves)>,
    /// Per-(solver, instance) award in halves, sorted.
    pub breakdown: Vec<(String, String, Halves)>,
    /// Cross-claim findings (inconsistent optima, refuted claims).
    pub flags: Vec<String>,
}

impl ScoreTable {
    pub fn total_of(&self, solver: &str) -> Halves {
        self.totals
            .iter()
            .find(|(s, _)| s == solver)
            .map(|(_, h)| *h)
            .unwrap_or(0)
    }

    pub fn award_of(&self, solver: &str, instance: &str) -> Halves {
        self.breakdown
            .iter()
            .find(|(s, i, _)| s == solver && i == instance)
            .map(|(_, _, h)| *h)
            .unwrap_or(0)
    }

    fn from_awards(awards: BTreeMap<(String, String), Halves>, flags: Vec<String>) -> ScoreTable {
        let mut totals: BTreeMap<String, Halves> = BTreeMap::new();
        let mut breakdown: Vec<(String, String, Halves)> = Vec::new();
        for ((solver, instance), h) in awards {
            *totals.entry(solver.clone()).or_insert(0) += h;
            breakdown.push((solver, instance, h));
        }
        breakdown.sort();
        ScoreTable {
            totals: totals.into_iter().collect(),
            breakdown,
            flags,
        }
    }
}

/// Downgrades claims that other validated runs contradict: an UNSAT claim
/// cannot stand next to a checker-valid witness, and an optimality claim
/// cannot stand next to a strictly better validated bound.
pub fn cross_validate(runs: &mut [RunRecord]) -> Vec<String> {
    let mut flags = Vec::new();
    let mut by_instance: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, r) in runs.iter().enumerate() {
        by_instance.entry(r.instance.clone()).or_default().push(i);
    }
    for (instance, ids) in by_instance {
        let has_witness = ids.iter().any(|&i| {
            matches!(
                runs[i].status,
                RunStatus::Sat | RunStatus::Optimum | RunStatus::Bound
            )
        });
        if has_witness {
            for &i in &ids {
                if runs[i].status == RunStatus::Unsat {
                    let solver = runs[i].solver.clone();
                    runs[i].status = RunStatus::Invalid;
                    runs[i].flags.push("unsat-contradicted-by-witness".into());
                    flags.push(format!(
                        "{instance}: UNSAT claim by {solver} contradicted by a validated witness"
                    ));
                }
            }
        }
        let sense = ids.iter().find_map(|&i| runs[i].objective_sense);
        let better = |a: i64, b: i64| match sense {
            Some(ObjSense::Maximize) => a > b,
            _ => a < b,
        };
        let best_bound = ids
            .iter()
            .filter(|&&i| matches!(runs[i].status, RunStatus::Optimum | RunStatus::Bound))
            .filter_map(|&i| runs[i].bound)
            .fold(None, |acc: Option<i64>, b| match acc {
                Some(a) if better(a, b) || a == b => Some(a),
                _ => Some(b),
            });
        if let Some(best) = best_bound {
            for &i in &ids {
                if runs[i].status == RunStatus::Optimum {
                    let b = runs[i].bound.expect("validated optimum carries a bound");
                    if better(best, b) {
                        let solver = runs[i].solver.clone();
                        runs[i].status = RunStatus::Invalid;
                        runs[i].flags.push("inconsistent-optimum".into());
                        flags.push(format!(
                            "{instance}: optimum {b} claimed by {solver} but bound {best} exists"
                        ));
                    }
                }
            }
        }
    }
    flags
}

/// One point per instance decided (a solution exhibited or unsatisfiability
/// indicated). Points are not exclusive between solvers.
pub fn score_csp(runs: &[RunRecord]) -> ScoreTable {
    let mut runs = runs.to_vec();
    let flags = cross_validate(&mut runs);
    let mut awards = BTreeMap::new();
    for r in &runs {
        let h = match r.status {
            RunStatus::Sat | RunStatus::Unsat => 2,
            _ => 0,
        };
        awards.insert((r.solver.clone(), r.instance.clone()), h);
    }
    ScoreTable::from_awards(awards, flags)
}

/// Optimization scoring per the rules above.
pub fn score_cop(runs: &[RunRecord]) -> ScoreTable {
    let mut runs = runs.to_vec();
    let flags = cross_validate(&mut runs);

    let mut by_instance: BTreeMap<String, Vec<&RunRecord>> = BTreeMap::new();
    for r in &runs {
        by_instance.entry(r.instance.clone()).or_default().push(r);
    }

    let mut awards = BTreeMap::new();
    for (instance, group) in by_instance {
        let sense = group.iter().find_map(|r| r.objective_sense);
        let better = |a: i64, b: i64| match sense {
            Some(ObjSense::Maximize) => a > b,
            _ => a < b,
        };
        let best_bound = group
            .iter()
            .filter(|r| matches!(r.status, RunStatus::Optimum | RunStatus::Bound))
            .filter_map(|r| r.bound)
            .fold(None, |acc: Option<i64>, b| match acc {
                Some(a) if better(a, b) || a == b => Some(a),
                _ => Some(b),
            });
        let optimum_proved = group
            .iter()
            .any(|r| r.status == RunStatus::Optimum && r.bound == best_bound);
        for r in group {
            let h = match r.status {
                RunStatus::Unsat => 2,
                RunStatus::Optimum => 2,
                RunStatus::Bound => match (r.bound, best_bound) {
                    (Some(b), Some(best)) if b == best => {
                        if optimum_proved {
                            1
                        } else {
                            2
                        }
                    }
                    _ => 0,
                },
                _ => 0,
            };
            awards.insert((r.solver.clone(), instance.clone()), h);
        }
    }
    ScoreTable::from_awards(awards, flags)
}

pub fn score_for(track: Track, runs: &[RunRecord]) -> ScoreTable {
    if track.optimizing() {
        score_cop(runs)
    } else {
        score_csp(runs)
    }
}

/// Picks the best variant of one family by scoring the variants against
/// each other only. Ties break on the count of full-point awards, then on
/// the lexicographically smallest id.
pub fn select_best_variant(track: Track, family_runs: &[RunRecord], variants: &[String]) -> String {
    assert!(!variants.is_empty());
    let runs: Vec<RunRecord> = family_runs
        .iter()
        .filter(|r| variants.contains(&r.solver))
        .cloned()
        .collect();
    let table = score_for(track, &runs);
    let mut best: Option<(&String, Halves, usize)> = None;
    for v in variants {
        let total = table.total_of(v);
        let fulls = table
            .breakdown
            .iter()
            .filter(|(s, _, h)| s == v && *h == 2)
            .count();
        let candidate = (v, total, fulls);
        best = Some(match best {
            None => candidate,
            Some(cur) => {
                let (cv, ct, cf) = cur;
                if total > ct
                    || (total == ct && fulls > cf)
                    || (total == ct && fulls == cf && v < cv)
                {
                    candidate
                } else {
                    cur
                }
            }
        });
    }
    best.unwrap().0.clone()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RankError {
    #[error("mini track {0} needs the corresponding main-track ranking")]
    MissingMainRanking(String),
    #[error("unknown solver {0} in run records")]
    UnknownSolver(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankEntry {
    pub rank: usize,
    pub solver: String,
    pub team: String,
    pub family: String,
    pub halves: Halves,
    pub points: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Ranking {
    pub track: String,
    pub entries: Vec<RankEntry>,
    /// (solver, reason) pairs removed before scoring.
    pub excluded: Vec<(String, String)>,
}

impl Ranking {
    pub fn podium_families(&self) -> BTreeSet<String> {
        self.entries
            .iter()
            .filter(|e| e.rank <= 3)
            .map(|e| e.family.clone())
            .collect()
    }
}

/// Full ranking pipeline for one track. Returns the ranking and the score
/// table computed over the solvers that survived the filters.
pub fn rank_track(
    runs: &[RunRecord],
    metas: &[SolverMeta],
    track: Track,
    main_ranking: Option<&Ranking>,
) -> Result<(Ranking, ScoreTable), RankError> {
    let meta_of = |id: &str| -> Result<&SolverMeta, RankError> {
        metas
            .iter()
            .find(|m| m.id == id)
            .ok_or_else(|| RankError::UnknownSolver(id.to_string()))
    };
    for r in runs {
        meta_of(&r.solver)?;
    }
    let mut excluded: Vec<(String, String)> = Vec::new();
    let mut alive: BTreeSet<String> = runs.iter().map(|r| r.solver.clone()).collect();
    for m in metas {
        alive.insert(m.id.clone());
    }

    // step 1: off-competition solvers are discarded
    for m in metas {
        if m.off_competition && alive.remove(&m.id) {
            excluded.push((m.id.clone(), "off-competition".to_string()));
        }
    }

    // step 2: one best variant per (team, family)
    let mut families: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    for id in &alive {
        let m = meta_of(id)?;
        families
            .entry((m.team.clone(), m.family_id().to_string()))
            .or_default()
            .push(id.clone());
    }
    for ((_, family), mut variants) in families {
        if variants.len() < 2 {
            continue;
        }
        variants.sort();
        let best = select_best_variant(track, runs, &variants);
        for v in variants {
            if v != best {
                alive.remove(&v);
                excluded.push((v, format!("variant of {family}; best is {best}")));
            }
        }
    }

    // step 3: mini tracks drop families on the main-track podium
    if track.main_track().is_some() {
        let main =
            main_ranking.ok_or_else(|| RankError::MissingMainRanking(track.name().to_string()))?;
        let podium = main.podium_families();
        let snapshot: Vec<String> = alive.iter().cloned().collect();
        for id in snapshot {
            let fam = meta_of(&id)?.family_id().to_string();
            if podium.contains(&fam) {
                alive.remove(&id);
                excluded.push((id, format!("family {fam} on the main-track podium")));
            }
        }
    }

    // final scores over the survivors only
    let final_runs: Vec<RunRecord> = runs
        .iter()
        .filter(|r| alive.contains(&r.solver))
        .cloned()
        .collect();
    let table = score_for(track, &final_runs);

    let mut scored: Vec<(String, Halves)> = alive
        .iter()
        .map(|id| (id.clone(), table.total_of(id)))
        .collect();
    scored.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut entries = Vec::with_capacity(scored.len());
    for (i, (solver, halves)) in scored.iter().enumerate() {
        // ex-aequo: identical totals share the better rank
        let rank = 1 + scored.iter().take(i).filter(|(_, h)| h > halves).count();
        let m = meta_of(solver)?;
        entries.push(RankEntry {
            rank,
            solver: solver.clone(),
            team: m.team.clone(),
            family: m.family_id().to_string(),
            halves: *halves,
            points: points_str(*halves),
        });
    }
    excluded.sort();
    Ok((
        Ranking {
            track: track.name().to_string(),
            entries,
            excluded,
        },
        table,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(solver: &str, instance: &str, status: RunStatus, bound: Option<i64>) -> RunRecord {
        let mut r = RunRecord::new(solver, instance, status);
        r.bound = bound;
        r.objective_sense = Some(ObjSense::Minimize);
        r
    }

    #[test]
    fn csp_points_count_decided_instances() {
        let runs = vec![
            run("a", "i1", RunStatus::Sat, None),
            run("a", "i2", RunStatus::Unsat, None),
            run("a", "i3", RunStatus::Unknown, None),
        ];
        let t = score_csp(&runs);
        assert_eq!(t.total_of("a"), 4); // 2 points
    }

    #[test]
    fn csp_points_are_not_exclusive() {
        let runs = vec![
            run("a", "i1", RunStatus::Sat, None),
            run("b", "i1", RunStatus::Sat, None),
        ];
        let t = score_csp(&runs);
        assert_eq!(t.total_of("a"), 2);
        assert_eq!(t.total_of("b"), 2);
    }

    #[test]
    fn cop_best_bound_halved_by_optimum_proof() {
        // S best bound 10, T proved optimum 10: S 0.5, T 1
        let runs = vec![
            run("s", "i", RunStatus::Bound, Some(10)),
            run("t", "i", RunStatus::Optimum, Some(10)),
        ];
        let t = score_cop(&runs);
        assert_eq!(t.total_of("s"), 1);
        assert_eq!(t.total_of("t"), 2);
    }

    #[test]
    fn cop_worse_bound_scores_zero() {
        // minimization: 10 beats 12
        let runs = vec![
            run("s", "i", RunStatus::Bound, Some(12)),
            run("t", "i", RunStatus::Bound, Some(10)),
        ];
        let t = score_cop(&runs);
        assert_eq!(t.total_of("s"), 0);
        assert_eq!(t.total_of("t"), 2);
    }

    #[test]
    fn cop_unsat_proof_scores_one() {
        let runs = vec![run("s", "i", RunStatus::Unsat, None)];
        let t = score_cop(&runs);
        assert_eq!(t.total_of("s"), 2);
    }

    #[test]
    fn shared_best_bound_without_proof_pays_both() {
        let runs = vec![
            run("s", "i", RunStatus::Bound, Some(7)),
            run("t", "i", RunStatus::Bound, Some(7)),
            run("u", "i", RunStatus::Bound, Some(9)),
        ];
        let t = score_cop(&runs);
        assert_eq!(t.total_of("s"), 2);
        assert_eq!(t.total_of("t"), 2);
        assert_eq!(t.total_of("u"), 0);
    }

    #[test]
    fn inconsistent_optimum_is_invalidated() {
        let runs = vec![
            run("s", "i", RunStatus::Optimum, Some(12)),
            run("t", "i", RunStatus::Bound, Some(10)),
        ];
        let t = score_cop(&runs);
        assert_eq!(t.total_of("s"), 0);
        // with the claim gone, t holds the best bound and nobody proved it
        assert_eq!(t.total_of("t"), 2);
        assert!(!t.flags.is_empty());
    }

    #[test]
    fn unsat_next_to_witness_is_invalidated() {
        let runs = vec![
            run("s", "i", RunStatus::Unsat, None),
            run("t", "i", RunStatus::Bound, Some(3)),
        ];
        let t = score_cop(&runs);
        assert_eq!(t.total_of("s"), 0);
        assert_eq!(t.total_of("t"), 2);
    }

    #[test]
    fn maximization_flips_bound_comparisons() {
        let mut a = run("s", "i", RunStatus::Bound, Some(12));
        let mut b = run("t", "i", RunStatus::Bound, Some(10));
        a.objective_sense = Some(ObjSense::Maximize);
        b.objective_sense = Some(ObjSense::Maximize);
        let t = score_cop(&[a, b]);
        assert_eq!(t.total_of("s"), 2);
        assert_eq!(t.total_of("t"), 0);
    }

    #[test]
    fn best_variant_head_to_head() {
        let runs = vec![
            run("a1", "i1", RunStatus::Bound, Some(5)),
            run("a2", "i1", RunStatus::Bound, Some(7)),
            run("a1", "i2", RunStatus::Unsat, None),
            run("a2", "i2", RunStatus::Unknown, None),
        ];
        let best = select_best_variant(Track::Cop, &runs, &["a1".to_string(), "a2".to_string()]);
        assert_eq!(best, "a1");
    }

    #[test]
    fn variant_tie_breaks_lexicographically() {
        let runs = vec![
            run("b", "i1", RunStatus::Unsat, None),
            run("a", "i1", RunStatus::Unsat, None),
        ];
        let best = select_best_variant(Track::Cop, &runs, &["b".to_string(), "a".to_string()]);
        assert_eq!(best, "a");
    }

    #[test]
    fn ex_aequo_shares_rank_and_skips_next() {
        let runs = vec![
            run("a", "i1", RunStatus::Unsat, None),
            run("b", "i1", RunStatus::Unsat, None),
            run("c", "i1", RunStatus::Unknown, None),
        ];
        let metas = vec![
            SolverMeta::new("a", "t1"),
            SolverMeta::new("b", "t2"),
            SolverMeta::new("c", "t3"),
        ];
        let (ranking, _) = rank_track(&runs, &metas, Track::Cop, None).unwrap();
        let ranks: Vec<(usize, &str)> = ranking
            .entries
            .iter()
            .map(|e| (e.rank, e.solver.as_str()))
            .collect();
        assert_eq!(ranks, vec![(1, "a"), (1, "b"), (3, "c")]);
    }

    #[test]
    fn mini_track_requires_main_ranking() {
        let runs = vec![run("a", "i1", RunStatus::Unsat, None)];
        let metas = vec![SolverMeta::new("a", "t1")];
        assert_eq!(
            rank_track(&runs, &metas, Track::MiniCop, None),
            Err(RankError::MissingMainRanking("MiniCOP".into()))
        );
    }
}
