//! Competition tracks and their resource budgets.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Track {
    #[serde(rename = "CSP")]
    Csp,
    #[serde(rename = "COP")]
    Cop,
    #[serde(rename = "FastCOP")]
    FastCop,
    #[serde(rename = "ParCOP")]
    ParCop,
    #[serde(rename = "MiniCSP")]
    MiniCsp,
    #[serde(rename = "MiniCOP")]
    MiniCop,
}

impl Track {
    pub fn parse(s: &str) -> Option<Track> {
        match s {
            "CSP" => Some(Track::Csp),
            "COP" => Some(Track::Cop),
            "FastCOP" => Some(Track::FastCop),
            "ParCOP" => Some(Track::ParCop),
            "MiniCSP" => Some(Track::MiniCsp),
            "MiniCOP" => Some(Track::MiniCop),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Track::Csp => "CSP",
            Track::Cop => "COP",
            Track::FastCop => "FastCOP",
            Track::ParCop => "ParCOP",
            Track::MiniCsp => "MiniCSP",
            Track::MiniCop => "MiniCOP",
        }
    }

    /// Best-solution tracks are scored with the optimization rules.
    pub fn optimizing(self) -> bool {
        !matches!(self, Track::Csp | Track::MiniCsp)
    }

    pub fn goal(self) -> &'static str {
        if self.optimizing() {
            "best solution"
        } else {
            "one solution"
        }
    }

    /// The main track whose podium excludes solvers from a mini track.
    pub fn main_track(self) -> Option<Track> {
        match self {
            Track::MiniCsp => Some(Track::Csp),
            Track::MiniCop => Some(Track::Cop),
            _ => None,
        }
    }
}

impl fmt::Display for Track {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-track budgets, scaled by a single factor for desk-size runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackConfig {
    pub track: Track,
    pub cpu_seconds: f64,
    pub wall_seconds: f64,
    pub scale: f64,
}

impl TrackConfig {
    pub fn new(track: Track, scale: f64) -> TrackConfig {
        // sequential tracks: 30 min cpu / 45 min wall; the fast track is a
        // tenth of that; the parallel track allocates 4 cpus for 30 min wall
        let (cpu, wall) = match track {
            Track::Csp | Track::Cop | Track::MiniCsp | Track::MiniCop => (1800.0, 2700.0),
            Track::FastCop => (180.0, 270.0),
            Track::ParCop => (7200.0, 1800.0),
        };
        TrackConfig {
            track,
            cpu_seconds: cpu,
            wall_seconds: wall,
            scale,
        }
    }

    pub fn scaled_cpu(&self) -> f64 {
        self.cpu_seconds * self.scale
    }

    pub fn scaled_wall(&self) -> f64 {
        self.wall_seconds * self.scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budgets_per_track() {
        for t in [Track::Csp, Track::Cop, Track::MiniCsp, Track::MiniCop] {
            let c = TrackConfig::new(t, 1.0);
            assert_eq!((c.cpu_seconds, c.wall_seconds), (1800.0, 2700.0));
        }
        let fast = TrackConfig::new(Track::FastCop, 1.0);
        assert_eq!((fast.cpu_seconds, fast.wall_seconds), (180.0, 270.0));
        let scaled = TrackConfig::new(Track::Cop, 0.01);
        assert!((scaled.scaled_cpu() - 18.0).abs() < 1e-9);
        assert!((scaled.scaled_wall() - 27.0).abs() < 1e-9);
    }

    #[test]
    fn mini_tracks_point_at_their_main() {
        assert_eq!(Track::MiniCop.main_track(), Some(Track::Cop));
        assert_eq!(Track::MiniCsp.main_track(), Some(Track::Csp));
        assert_eq!(Track::Cop.main_track(), None);
    }
}
