//! Pursuer occupancy heatmaps accumulated over episode logs.

use std::io::Write;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::geometry::{Vec2, WORLD_MAX, WORLD_MIN};
use crate::sim::EpisodeLog;

use super::MetricsError;

pub const MIN_HEATMAP_RESOLUTION: usize = 8;

/// Raw visit counts, `counts[[row, col]]` with rows along y (bottom row
/// first) and columns along x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub resolution: usize,
    pub counts: Array2<u64>,
}

impl Heatmap {
    pub fn new(resolution: usize) -> Result<Self, MetricsError> {
        if resolution < MIN_HEATMAP_RESOLUTION {
            return Err(MetricsError::InvalidArgument(format!(
                "heatmap resolution must be >= {MIN_HEATMAP_RESOLUTION}, got {resolution}"
            )));
        }
        Ok(Self {
            resolution,
            counts: Array2::zeros((resolution, resolution)),
        })
    }

    fn cell(&self, p: Vec2) -> (usize, usize) {
        let idx = |c: f64| {
            let f = (c - WORLD_MIN) / (WORLD_MAX - WORLD_MIN) * self.resolution as f64;
            (f.floor().max(0.0) as usize).min(self.resolution - 1)
        };
        (idx(p.y), idx(p.x))
    }

    pub fn add_point(&mut self, p: Vec2) {
        let c = self.cell(p);
        self.counts[c] += 1;
    }

    /// Every pursuer position of every recorded step.
    pub fn add_log(&mut self, log: &EpisodeLog) {
        for s in &log.steps {
            for p in &s.pursuers {
                self.add_point(p.position);
            }
        }
    }

    pub fn merge(&mut self, other: &Heatmap) -> Result<(), MetricsError> {
        if other.resolution != self.resolution {
            return Err(MetricsError::DimensionMismatch);
        }
        self.counts += &other.counts;
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.counts.sum()
    }

    /// Counts scaled by the busiest cell into `[0, 1]`.
    pub fn density(&self) -> Array2<f64> {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        if max == 0 {
            return Array2::zeros(self.counts.dim());
        }
        self.counts.mapv(|c| c as f64 / max as f64)
    }

    /// Density rows top (largest y) first, comma separated.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let d = self.density();
        for row in d.outer_iter().rev() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Plain (ASCII) PGM with 255 grey levels, top row first.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let d = self.density();
        writeln!(w, "P2\n{} {}\n255", self.resolution, self.resolution)?;
        for row in d.outer_iter().rev() {
            let line: Vec<String> = row.iter().map(|v| ((v * 255.0).round() as u8).to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Accumulate pursuer visits across logs.
pub fn heatmap_accumulate(logs: &[EpisodeLog], resolution: usize) -> Result<Heatmap, MetricsError> {
    if logs.is_empty() {
        return Err(MetricsError::EmptySet);
    }
    let mut h = Heatmap::new(resolution)?;
    for log in logs {
        h.add_log(log);
    }
    Ok(h)
}
