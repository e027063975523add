//! Discrete-time, continuous-space pursuit-evasion arena.
//!
//! Agents live in the square `[-1, 1]^2`, move at a fixed speed cap along a
//! commanded heading each step, and an evader is captured once any pursuer is
//! within the capture radius. Episodes are fully deterministic given the
//! scenario, the policies, the initial states and the seed.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vec2;

pub const MIN_PURSUERS: usize = 2;
pub const MAX_PURSUERS: usize = 5;
pub const MIN_EVADERS: usize = 1;
pub const MAX_EVADERS: usize = 5;

pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_HORIZON: usize = 40;
pub const DEFAULT_CAPTURE_RADIUS: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid game type {0}")]
    InvalidGameType(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("expected {expected} {what}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("policy failed: {0}")]
    Policy(String),
    #[error("episode log I/O: {0}")]
    Io(String),
}

/// Position and velocity of one agent.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AgentState {
    pub position: Vec2,
    pub velocity: Vec2,
}

impl AgentState {
    pub fn at(x: f64, y: f64) -> Self {
        Self {
            position: Vec2::new(x, y),
            velocity: Vec2::ZERO,
        }
    }

    pub fn new(position: Vec2, velocity: Vec2) -> Self {
        Self { position, velocity }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameKind {
    OneVsMany,
    ManyVsMany,
}

/// Team sizes of a game, written `PxE` (e.g. `4x2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GameType {
    pub n_pursuers: usize,
    pub n_evaders: usize,
}

impl GameType {
    pub fn new(n_pursuers: usize, n_evaders: usize) -> Result<Self, SimError> {
        let gt = Self {
            n_pursuers,
            n_evaders,
        };
        gt.validate()?;
        Ok(gt)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(MIN_PURSUERS..=MAX_PURSUERS).contains(&self.n_pursuers)
            || !(MIN_EVADERS..=MAX_EVADERS).contains(&self.n_evaders)
        {
            return Err(SimError::InvalidGameType(format!(
                "{self} (pursuers must be {MIN_PURSUERS}-{MAX_PURSUERS}, evaders {MIN_EVADERS}-{MAX_EVADERS})"
            )));
        }
        Ok(())
    }

    pub fn kind(&self) -> GameKind {
        if self.n_evaders == 1 {
            GameKind::OneVsMany
        } else {
            GameKind::ManyVsMany
        }
    }

    /// The twelve game types evaluated by the pipeline: 2-5 pursuers against a
    /// single evader, and 4-5 pursuers against 2-5 evaders.
    pub fn standard_set() -> Vec<GameType> {
        let mut out = Vec::with_capacity(12);
        for p in 2..=5 {
            out.push(GameType {
                n_pursuers: p,
                n_evaders: 1,
            });
        }
        for p in 4..=5 {
            for e in 2..=5 {
                out.push(GameType {
                    n_pursuers: p,
                    n_evaders: e,
                });
            }
        }
        out
    }
}

impl fmt::Display for GameType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_pursuers, self.n_evaders)
    }
}

impl FromStr for GameType {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SimError::InvalidGameType(s.to_string());
        let (p, e) = s
            .trim()
            .split_once(['x', 'X', 'v'])
            .ok_or_else(bad)?;
        let p: usize = p.trim().parse().map_err(|_| bad())?;
        let e: usize = e.trim().parse().map_err(|_| bad())?;
        GameType::new(p, e)
    }
}

/// Everything that parameterizes one game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub game_type: GameType,
    pub pursuer_speed: f64,
    pub evader_speed: f64,
    pub capture_radius: f64,
    pub dt: f64,
    pub horizon: usize,
}

impl Scenario {
    /// Default scenario for a game type. One-vs-many games use a faster
    /// evader (speed ratio 2); many-vs-many games use ratio 1/2.
    pub fn for_game_type(game_type: GameType) -> Self {
        let (pursuer_speed, evader_speed) = match game_type.kind() {
            GameKind::OneVsMany => (0.5, 1.0),
            GameKind::ManyVsMany => (1.0, 0.5),
        };
        Self {
            game_type,
            pursuer_speed,
            evader_speed,
            capture_radius: DEFAULT_CAPTURE_RADIUS,
            dt: DEFAULT_DT,
            horizon: DEFAULT_HORIZON,
        }
    }

    pub fn kind(&self) -> GameKind {
        self.game_type.kind()
    }

    /// gamma = v_E / v_P
    pub fn speed_ratio(&self) -> f64 {
        self.evader_speed / self.pursuer_speed
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.game_type.validate()?;
        let bad = |m: String| Err(SimError::InvalidScenario(m));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if !(self.capture_radius.is_finite() && self.capture_radius > 0.0) {
            return bad(format!(
                "capture radius must be > 0, got {}",
                self.capture_radius
            ));
        }
        if !(self.pursuer_speed > 0.0 && self.evader_speed > 0.0)
            || !self.pursuer_speed.is_finite()
            || !self.evader_speed.is_finite()
        {
            return bad("speeds must be positive and finite".into());
        }
        if self.horizon == 0 {
            return bad("horizon must be at least one step".into());
        }
        let gamma = self.speed_ratio();
        match self.kind() {
            GameKind::OneVsMany if gamma <= 1.0 => {
                bad(format!("one-vs-many games need a faster evader, gamma = {gamma}"))
            }
            GameKind::ManyVsMany if (gamma - 0.5).abs() > 1e-12 => {
                bad(format!("many-vs-many games use gamma = 1/2, got {gamma}"))
            }
            _ => Ok(()),
        }
    }
}

/// The pursuer team's initial states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub pursuers: Vec<AgentState>,
    pub capture_radius: f64,
    pub game_type: GameType,
}

impl Configuration {
    pub fn new(
        pursuers: Vec<AgentState>,
        capture_radius: f64,
        game_type: GameType,
    ) -> Result<Self, SimError> {
        let c = Self {
            pursuers,
            capture_radius,
            game_type,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.game_type.validate()?;
        if self.pursuers.len() != self.game_type.n_pursuers {
            return Err(SimError::DimensionMismatch {
                what: "pursuers",
                expected: self.game_type.n_pursuers,
                got: self.pursuers.len(),
            });
        }
        if let Some(p) = self.pursuers.iter().find(|p| !p.position.in_world()) {
            return Err(SimError::InvalidScenario(format!(
                "pursuer position ({}, {}) outside the world",
                p.position.x, p.position.y
            )));
        }
        Ok(())
    }

    pub fn positions(&self) -> Vec<Vec2> {
        self.pursuers.iter().map(|p| p.position).collect()
    }
}

/// Per-agent command for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Command {
    /// Stay in place with zero velocity.
    Hold,
    /// Move at the agent's speed cap along this heading (radians).
    Heading(f64),
}

/// Read-only snapshot handed to policies.
#[derive(Debug, Clone, Copy)]
pub struct WorldView<'a> {
    pub scenario: &'a Scenario,
    pub step: usize,
    pub pursuers: &'a [AgentState],
    /// `None` for evaders that have been captured.
    pub evaders: &'a [Option<AgentState>],
}

impl WorldView<'_> {
    pub fn live_evaders(&self) -> impl Iterator<Item = (usize, &AgentState)> + '_ {
        self.evaders
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.as_ref().map(|e| (i, e)))
    }
}

pub trait PursuerPolicy {
    /// One command per pursuer.
    fn pursuer_commands(
        &mut self,
        view: &WorldView<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Command>, SimError>;
}

pub trait EvaderPolicy {
    /// One command per evader slot; entries for captured evaders are ignored.
    fn evader_commands(
        &mut self,
        view: &WorldView<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Command>, SimError>;
}

/// Agents that never move.
#[derive(Debug, Clone, Copy, Default)]
pub struct Stationary;

impl PursuerPolicy for Stationary {
    fn pursuer_commands(
        &mut self,
        view: &WorldView<'_>,
        _rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Command>, SimError> {
        Ok(vec![Command::Hold; view.pursuers.len()])
    }
}

impl EvaderPolicy for Stationary {
    fn evader_commands(
        &mut self,
        view: &WorldView<'_>,
        _rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Command>, SimError> {
        Ok(vec![Command::Hold; view.evaders.len()])
    }
}

/// Forward-Euler step along `heading`, clamped to the world square.
pub fn integrate_step(state: AgentState, heading: f64, speed: f64, dt: f64) -> AgentState {
    let velocity = Vec2::from_angle(heading) * speed;
    AgentState {
        position: (state.position + velocity * dt).clamp_to_world(),
        velocity,
    }
}

fn apply_command(state: AgentState, cmd: Command, speed: f64, dt: f64) -> AgentState {
    match cmd {
        Command::Hold => AgentState {
            position: state.position,
            velocity: Vec2::ZERO,
        },
        Command::Heading(h) if h.is_finite() => integrate_step(state, h, speed, dt),
        Command::Heading(_) => AgentState {
            position: state.position,
            velocity: Vec2::ZERO,
        },
    }
}

/// Indices (ascending) of evaders within `capture_radius` of any pursuer.
pub fn detect_captures(
    pursuers: &[AgentState],
    evaders: &[AgentState],
    capture_radius: f64,
) -> Vec<usize> {
    evaders
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            pursuers
                .iter()
                .any(|p| p.position.distance(e.position) <= capture_radius)
        })
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureEvent {
    pub evader: usize,
    /// Closest pursuer at the moment of capture.
    pub pursuer: usize,
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub pursuers: Vec<AgentState>,
    pub evaders: Vec<Option<AgentState>>,
    #[serde(default)]
    pub events: Vec<CaptureEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub scenario: Scenario,
    pub seed: u64,
    pub steps: Vec<StepRecord>,
}

#[derive(Serialize, Deserialize)]
struct LogHeader {
    scenario: Scenario,
    seed: u64,
}

impl EpisodeLog {
    pub fn terminal_step(&self) -> usize {
        self.steps.last().map_or(0, |s| s.step)
    }

    pub fn captures(&self) -> impl Iterator<Item = &CaptureEvent> + '_ {
        self.steps.iter().flat_map(|s| s.events.iter())
    }

    pub fn capture_step(&self, evader: usize) -> Option<usize> {
        self.captures().find(|c| c.evader == evader).map(|c| c.step)
    }

    /// One `(time, captured)` observation per evader; survivors are censored
    /// at the horizon.
    pub fn survival_observations(&self) -> Vec<(usize, bool)> {
        (0..self.scenario.game_type.n_evaders)
            .map(|e| match self.capture_step(e) {
                Some(t) => (t, true),
                None => (self.scenario.horizon, false),
            })
            .collect()
    }

    /// Header line followed by one JSON object per step.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<(), SimError> {
        let io = |e: std::io::Error| SimError::Io(e.to_string());
        let header = LogHeader {
            scenario: self.scenario.clone(),
            seed: self.seed,
        };
        serde_json::to_writer(&mut w, &header).map_err(|e| SimError::Io(e.to_string()))?;
        w.write_all(b"\n").map_err(io)?;
        for s in &self.steps {
            serde_json::to_writer(&mut w, s).map_err(|e| SimError::Io(e.to_string()))?;
            w.write_all(b"\n").map_err(io)?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self, SimError> {
        let mut lines = r.lines();
        let first = lines
            .next()
            .ok_or_else(|| SimError::Io("empty episode log".into()))?
            .map_err(|e| SimError::Io(e.to_string()))?;
        let header: LogHeader =
            serde_json::from_str(&first).map_err(|e| SimError::Io(e.to_string()))?;
        let mut steps = Vec::new();
        for line in lines {
            let line = line.map_err(|e| SimError::Io(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            steps.push(serde_json::from_str(&line).map_err(|e| SimError::Io(e.to_string()))?);
        }
        Ok(Self {
            scenario: header.scenario,
            seed: header.seed,
            steps,
        })
    }
}

/// Run one game until every evader is captured or the horizon is reached.
pub fn run_episode(
    scenario: &Scenario,
    pursuer_policy: &mut dyn PursuerPolicy,
    evader_policy: &mut dyn EvaderPolicy,
    initial_config: &Configuration,
    evader_init: &[AgentState],
    rng_seed: u64,
) -> Result<EpisodeLog, SimError> {
    scenario.validate()?;
    let gt = scenario.game_type;
    if initial_config.pursuers.len() != gt.n_pursuers {
        return Err(SimError::DimensionMismatch {
            what: "pursuers",
            expected: gt.n_pursuers,
            got: initial_config.pursuers.len(),
        });
    }
    if evader_init.len() != gt.n_evaders {
        return Err(SimError::DimensionMismatch {
            what: "evaders",
            expected: gt.n_evaders,
            got: evader_init.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut pursuers: Vec<AgentState> = initial_config
        .pursuers
        .iter()
        .map(|p| AgentState {
            position: p.position.clamp_to_world(),
            velocity: p.velocity,
        })
        .collect();
    let mut evaders: Vec<Option<AgentState>> = evader_init
        .iter()
        .map(|e| {
            Some(AgentState {
                position: e.position.clamp_to_world(),
                velocity: e.velocity,
            })
        })
        .collect();
    let mut frozen = vec![false; gt.n_pursuers];

    let mut steps = Vec::with_capacity(scenario.horizon + 1);
    let events = capture_pass(scenario, &pursuers, &evaders, 0, &mut frozen);
    steps.push(StepRecord {
        step: 0,
        pursuers: pursuers.clone(),
        evaders: evaders.clone(),
        events: events.clone(),
    });
    for ev in &events {
        evaders[ev.evader] = None;
    }

    for k in 0..scenario.horizon {
        if evaders.iter().all(Option::is_none) {
            break;
        }
        let view = WorldView {
            scenario,
            step: k,
            pursuers: &pursuers,
            evaders: &evaders,
        };
        let p_cmds = pursuer_policy.pursuer_commands(&view, &mut rng)?;
        let e_cmds = evader_policy.evader_commands(&view, &mut rng)?;
        if p_cmds.len() != gt.n_pursuers {
            return Err(SimError::Policy(format!(
                "pursuer policy returned {} commands for {} pursuers",
                p_cmds.len(),
                gt.n_pursuers
            )));
        }
        if e_cmds.len() != gt.n_evaders {
            return Err(SimError::Policy(format!(
                "evader policy returned {} commands for {} evaders",
                e_cmds.len(),
                gt.n_evaders
            )));
        }

        for (i, p) in pursuers.iter_mut().enumerate() {
            let cmd = if frozen[i] { Command::Hold } else { p_cmds[i] };
            *p = apply_command(*p, cmd, scenario.pursuer_speed, scenario.dt);
        }
        for (e, cmd) in evaders.iter_mut().zip(&e_cmds) {
            if let Some(state) = e {
                *state = apply_command(*state, *cmd, scenario.evader_speed, scenario.dt);
            }
        }

        let step = k + 1;
        let events = capture_pass(scenario, &pursuers, &evaders, step, &mut frozen);
        steps.push(StepRecord {
            step,
            pursuers: pursuers.clone(),
            evaders: evaders.clone(),
            events: events.clone(),
        });
        for ev in &events {
            evaders[ev.evader] = None;
        }
    }

    Ok(EpisodeLog {
        scenario: scenario.clone(),
        seed: rng_seed,
        steps,
    })
}

fn capture_pass(
    scenario: &Scenario,
    pursuers: &[AgentState],
    evaders: &[Option<AgentState>],
    step: usize,
    frozen: &mut [bool],
) -> Vec<CaptureEvent> {
    let mut out = Vec::new();
    for (j, e) in evaders.iter().enumerate() {
        let Some(e) = e else { continue };
        let (captor, d) = pursuers
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.position.distance(e.position)))
            .fold((usize::MAX, f64::INFINITY), |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            });
        if d <= scenario.capture_radius {
            out.push(CaptureEvent {
                evader: j,
                pursuer: captor,
                step,
            });
            if scenario.kind() == GameKind::OneVsMany {
                frozen[captor] = true;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: Vec2, b: Vec2) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn integrate_axis_aligned() {
        let s = integrate_step(AgentState::at(0.0, 0.0), 0.0, 1.0, 0.05);
        assert!(close(s.position, Vec2::new(0.05, 0.0)));
        assert!(close(s.velocity, Vec2::new(1.0, 0.0)));
    }

    #[test]
    fn integrate_clamps_to_world() {
        let s = integrate_step(AgentState::at(0.99, 0.0), 0.0, 1.0, 0.05);
        assert!(close(s.position, Vec2::new(1.0, 0.0)));
    }

    #[test]
    fn integrate_north() {
        let s = integrate_step(AgentState::at(0.0, 0.0), FRAC_PI_2, 0.5, 0.1);
        assert!(close(s.position, Vec2::new(0.0, 0.05)));
        assert!(close(s.velocity, Vec2::new(0.0, 0.5)));
    }

    #[test]
    fn capture_radius_is_inclusive() {
        let rho = 0.1;
        let p = [AgentState::at(0.0, 0.0)];
        assert_eq!(detect_captures(&p, &[AgentState::at(0.0, rho)], rho), vec![0]);
        assert!(detect_captures(&p, &[AgentState::at(0.0, 2.0 * rho)], rho).is_empty());
    }

    #[test]
    fn capture_only_nearby_evader() {
        let rho = 0.1;
        let p = [AgentState::at(-0.5, -0.5), AgentState::at(0.5, 0.5)];
        let e = [AgentState::at(0.0, 0.0), AgentState::at(0.55, 0.45)];
        // all four pairwise distances: 0.707, 0.707, 1.41, 0.0707
        let mut oracle = Vec::new();
        for (j, ev) in e.iter().enumerate() {
            if p.iter().any(|pp| {
                let dx = pp.position.x - ev.position.x;
                let dy = pp.position.y - ev.position.y;
                (dx * dx + dy * dy).sqrt() <= rho
            }) {
                oracle.push(j);
            }
        }
        assert_eq!(oracle, vec![1]);
        assert_eq!(detect_captures(&p, &e, rho), oracle);
        assert_eq!(detect_captures(&p, &e, rho), detect_captures(&p, &e, rho));
    }

    #[test]
    fn game_type_parse_and_validate() {
        let gt: GameType = "4x2".parse().unwrap();
        assert_eq!(gt, GameType::new(4, 2).unwrap());
        assert_eq!(gt.to_string(), "4x2");
        assert!("6x1".parse::<GameType>().is_err());
        assert!("4x0".parse::<GameType>().is_err());
        assert!("nonsense".parse::<GameType>().is_err());
        assert_eq!(GameType::standard_set().len(), 12);
    }

    #[test]
    fn scenario_speed_ratio_rules() {
        let one = Scenario::for_game_type(GameType::new(3, 1).unwrap());
        assert!(one.validate().is_ok());
        assert!(one.speed_ratio() > 1.0);
        let many = Scenario::for_game_type(GameType::new(4, 2).unwrap());
        assert!(many.validate().is_ok());
        assert_eq!(many.speed_ratio(), 0.5);
        let mut bad = one.clone();
        bad.evader_speed = 0.25;
        assert!(bad.validate().is_err());
        let mut bad = many;
        bad.dt = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn episode_dimension_mismatch() {
        let sc = Scenario::for_game_type(GameType::new(2, 1).unwrap());
        let cfg = Configuration {
            pursuers: vec![AgentState::at(0.0, 0.0)],
            capture_radius: 0.1,
            game_type: sc.game_type,
        };
        let err = run_episode(
            &sc,
            &mut Stationary,
            &mut Stationary,
            &cfg,
            &[AgentState::at(0.5, 0.5)],
            1,
        )
        .unwrap_err();
        assert!(matches!(err, SimError::DimensionMismatch { .. }));
    }

    #[test]
    fn capture_at_step_zero() {
        let sc = Scenario::for_game_type(GameType::new(2, 1).unwrap());
        let cfg = Configuration::new(
            vec![AgentState::at(0.0, 0.0), AgentState::at(0.5, 0.5)],
            sc.capture_radius,
            sc.game_type,
        )
        .unwrap();
        let log = run_episode(
            &sc,
            &mut Stationary,
            &mut Stationary,
            &cfg,
            &[AgentState::at(0.05, 0.0)],
            7,
        )
        .unwrap();
        assert_eq!(log.capture_step(0), Some(0));
        assert_eq!(log.terminal_step(), 0);
        assert_eq!(log.survival_observations(), vec![(0, true)]);
    }

    #[test]
    fn stationary_runs_to_horizon_and_censors() {
        let sc = Scenario::for_game_type(GameType::new(4, 2).unwrap());
        let cfg = Configuration::new(
            (0..4).map(|i| AgentState::at(-0.9 + 0.1 * i as f64, -0.9)).collect(),
            sc.capture_radius,
            sc.game_type,
        )
        .unwrap();
        let ev = [AgentState::at(0.8, 0.8), AgentState::at(0.7, 0.9)];
        let log = run_episode(&sc, &mut Stationary, &mut Stationary, &cfg, &ev, 3).unwrap();
        assert_eq!(log.steps.len(), sc.horizon + 1);
        assert_eq!(log.terminal_step(), sc.horizon);
        assert_eq!(
            log.survival_observations(),
            vec![(sc.horizon, false), (sc.horizon, false)]
        );
    }

    #[test]
    fn jsonl_round_trip() {
        let sc = Scenario::for_game_type(GameType::new(2, 1).unwrap());
        let cfg = Configuration::new(
            vec![AgentState::at(0.0, 0.0), AgentState::at(0.5, 0.5)],
            sc.capture_radius,
            sc.game_type,
        )
        .unwrap();
        let log = run_episode(
            &sc,
            &mut Stationary,
            &mut Stationary,
            &cfg,
            &[AgentState::at(-0.5, 0.2)],
            11,
        )
        .unwrap();
        let mut buf = Vec::new();
        log.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), log.steps.len() + 1);
        let back = EpisodeLog::read_jsonl(buf.as_slice()).unwrap();
        assert_eq!(back, log);
    }
}
