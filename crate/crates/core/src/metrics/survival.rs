//! Kaplan-Meier survival curves and the two-sample log-rank test.

use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use super::MetricsError;

/// One subject: time of the event or of censoring, and whether the event
/// (capture) was observed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub time: f64,
    pub captured: bool,
}

impl Observation {
    pub fn captured(time: f64) -> Self {
        Self { time, captured: true }
    }

    pub fn censored(time: f64) -> Self {
        Self { time, captured: false }
    }
}

impl From<(usize, bool)> for Observation {
    fn from((time, captured): (usize, bool)) -> Self {
        Self {
            time: time as f64,
            captured,
        }
    }
}

/// Product-limit step function. Row `i` covers every subject whose
/// observation time equals `times[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    pub events: Vec<usize>,
    pub censored: Vec<usize>,
    pub at_risk: Vec<usize>,
    /// Survival just after `times[i]`.
    pub survival: Vec<f64>,
    pub horizon: f64,
}

impl SurvivalCurve {
    /// `S(t)`: product over observation times `<= t`.
    pub fn survival_at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&ti| ti <= t);
        if k == 0 {
            1.0
        } else {
            self.survival[k - 1]
        }
    }

    pub fn n_subjects(&self) -> usize {
        self.at_risk.first().copied().unwrap_or(0)
    }

    /// `time,survival_probability` at every integer step from 0 to the
    /// horizon.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "time,survival_probability")?;
        for t in 0..=(self.horizon.floor() as usize) {
            writeln!(w, "{},{}", t, self.survival_at(t as f64))?;
        }
        Ok(())
    }
}

fn validate(obs: &[Observation], horizon: Option<f64>) -> Result<(), MetricsError> {
    for o in obs {
        if !o.time.is_finite() || o.time < 0.0 {
            return Err(MetricsError::InvalidArgument(format!("invalid time {}", o.time)));
        }
        if let Some(h) = horizon {
            if o.time > h {
                return Err(MetricsError::InvalidArgument(format!(
                    "time {} beyond horizon {h}",
                    o.time
                )));
            }
        }
    }
    Ok(())
}

/// Kaplan-Meier estimate. Subjects still alive at the horizon should be
/// passed as censored at the horizon. Captures sharing a time form one
/// event time; censoring at an event time is applied after the event.
pub fn kaplan_meier(observations: &[Observation], horizon: f64) -> Result<SurvivalCurve, MetricsError> {
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(MetricsError::InvalidArgument(format!("invalid horizon {horizon}")));
    }
    validate(observations, Some(horizon))?;
    let mut sorted: Vec<Observation> = observations.to_vec();
    sorted.sort_by(|a, b| a.time.total_cmp(&b.time));

    let mut curve = SurvivalCurve {
        times: Vec::new(),
        events: Vec::new(),
        censored: Vec::new(),
        at_risk: Vec::new(),
        survival: Vec::new(),
        horizon,
    };
    let mut n = sorted.len();
    let mut s = 1.0;
    let mut k = 0;
    while k < sorted.len() {
        let t = sorted[k].time;
        let (mut d, mut c) = (0, 0);
        while k < sorted.len() && sorted[k].time == t {
            if sorted[k].captured {
                d += 1;
            } else {
                c += 1;
            }
            k += 1;
        }
        if d > 0 {
            s *= 1.0 - d as f64 / n as f64;
        }
        curve.times.push(t);
        curve.events.push(d);
        curve.censored.push(c);
        curve.at_risk.push(n);
        curve.survival.push(s);
        n -= d + c;
    }
    Ok(curve)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRank {
    pub chi_square: f64,
    pub p_value: f64,
    pub observed_a: f64,
    pub expected_a: f64,
    pub variance: f64,
    /// No events in either group, or zero variance.
    pub degenerate: bool,
}

/// Upper tail of the chi-square distribution with one degree of freedom.
pub fn chi_square_1_sf(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        gamma_ur(0.5, x / 2.0)
    }
}

/// Mantel-Haenszel log-rank test of two groups.
pub fn log_rank(group_a: &[Observation], group_b: &[Observation]) -> Result<LogRank, MetricsError> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(MetricsError::EmptySet);
    }
    validate(group_a, None)?;
    validate(group_b, None)?;

    let mut event_times: Vec<f64> = group_a
        .iter()
        .chain(group_b)
        .filter(|o| o.captured)
        .map(|o| o.time)
        .collect();
    event_times.sort_by(f64::total_cmp);
    event_times.dedup();

    let at_risk = |g: &[Observation], t: f64| g.iter().filter(|o| o.time >= t).count() as f64;
    let deaths = |g: &[Observation], t: f64| g.iter().filter(|o| o.captured && o.time == t).count() as f64;

    let (mut observed, mut expected, mut variance) = (0.0, 0.0, 0.0);
    for &t in &event_times {
        let (na, nb) = (at_risk(group_a, t), at_risk(group_b, t));
        let (da, db) = (deaths(group_a, t), deaths(group_b, t));
        let (n, d) = (na + nb, da + db);
        observed += da;
        expected += d * na / n;
        if n > 1.0 {
            variance += na * nb * d * (n - d) / (n * n * (n - 1.0));
        }
    }
    if event_times.is_empty() || variance <= 0.0 {
        return Ok(LogRank {
            chi_square: 0.0,
            p_value: 1.0,
            observed_a: observed,
            expected_a: expected,
            variance,
            degenerate: true,
        });
    }
    let chi_square = (observed - expected).powi(2) / variance;
    Ok(LogRank {
        chi_square,
        p_value: chi_square_1_sf(chi_square),
        observed_a: observed,
        expected_a: expected,
        variance,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_captures_flat() {
        let obs: Vec<_> = (0..5).map(|_| Observation::censored(40.0)).collect();
        let c = kaplan_meier(&obs, 40.0).unwrap();
        for t in 0..=40 {
            assert_eq!(c.survival_at(t as f64), 1.0);
        }
    }

    #[test]
    fn single_event() {
        let c = kaplan_meier(&[Observation::captured(1.0), Observation::censored(40.0)], 40.0).unwrap();
        assert_eq!(c.survival_at(0.0), 1.0);
        assert_eq!(c.survival_at(1.0), 0.5);
    }

    #[test]
    fn hand_product_limit() {
        // d = 2 at t = 3 with n = 10, then d = 1 at t = 5 with n = 8; the
        // subject censored at t = 5 leaves after the event
        let mut obs = vec![Observation::captured(3.0), Observation::captured(3.0)];
        obs.push(Observation::captured(5.0));
        obs.push(Observation::censored(5.0));
        obs.extend((0..6).map(|_| Observation::censored(10.0)));
        let c = kaplan_meier(&obs, 10.0).unwrap();
        assert_eq!(c.at_risk[..2], [10, 8]);
        assert_eq!(c.survival_at(5.0), (1.0 - 2.0 / 10.0) * (1.0 - 1.0 / 8.0));
        assert!((c.survival_at(5.0) - 0.7).abs() < 1e-15);
        assert_eq!(c.survival_at(4.9), 0.8);
        for i in 1..c.times.len() {
            assert_eq!(c.at_risk[i], c.at_risk[i - 1] - c.events[i - 1] - c.censored[i - 1]);
        }
    }

    #[test]
    fn censoring_before_event_shrinks_risk_set() {
        let mut obs = vec![Observation::captured(3.0), Observation::captured(3.0)];
        obs.push(Observation::censored(4.0));
        obs.push(Observation::captured(5.0));
        obs.extend((0..6).map(|_| Observation::censored(10.0)));
        let c = kaplan_meier(&obs, 10.0).unwrap();
        assert_eq!(c.at_risk[..3], [10, 8, 7]);
        assert_eq!(c.survival_at(5.0), 0.8 * (1.0 - 1.0 / 7.0));
    }

    #[test]
    fn rejects_bad_times() {
        assert!(kaplan_meier(&[Observation::captured(-1.0)], 40.0).is_err());
        assert!(kaplan_meier(&[Observation::captured(41.0)], 40.0).is_err());
    }

    #[test]
    fn csv_shape() {
        let c = kaplan_meier(&[Observation::captured(2.0)], 4.0).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.contains("2,0\n"));
    }

    #[test]
    fn identical_groups() {
        let g: Vec<_> = [1.0, 3.0, 3.0, 7.0].iter().map(|&t| Observation::captured(t)).collect();
        let r = log_rank(&g, &g).unwrap();
        assert_eq!(r.chi_square, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn no_events_degenerate() {
        let g = [Observation::censored(40.0)];
        let r = log_rank(&g, &g).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn chi_square_textbook_quantiles() {
        assert!((chi_square_1_sf(3.841458820694124) - 0.05).abs() < 1e-12);
        assert!((chi_square_1_sf(6.634896601021214) - 0.01).abs() < 1e-12);
        assert!((chi_square_1_sf(10.827566170662733) - 0.001).abs() < 1e-12);
    }
}
