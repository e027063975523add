//! Control laws for pursuers and evaders, plus the policy adapters that plug
//! them into [`crate::sim::run_episode`].

pub mod grid;
pub mod hungarian;
pub mod hybrid;
pub mod one_vs_many;

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::Vec2;
use crate::sim::{Command, EvaderPolicy, GameKind, PursuerPolicy, SimError, WorldView};

pub use grid::{courant_number, hji_update, upwind_gradient, Role, ValueGrid, DEFAULT_RESOLUTION};
pub use hungarian::{hungarian_assign, Assignment};
pub use hybrid::{
    avoidance_vector, bearing_angles, evader_escape_control, hybrid_cost_matrix,
    pursuer_hybrid_control,
};
pub use one_vs_many::{evader_weakest_link, pursuer_intercept_heading, weakest_link, WeakestLink};

/// Default blend between geometric and value-function terms.
pub const DEFAULT_ALPHA: f64 = 0.5;
/// Avoidance radius as a multiple of the capture radius.
pub const DEFAULT_AVOID_FACTOR: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("weakest link needs at least 2 pursuers, got {0}")]
    TooFewPursuers(usize),
    #[error("interception is singular for speed ratio {0}")]
    SingularSpeedRatio(f64),
    #[error("invalid value grid: {0}")]
    InvalidGrid(String),
    #[error("CFL condition violated (Courant number {0:.4} > 1)")]
    CflViolation(f64),
    #[error("invalid cost matrix: {0}")]
    InvalidCost(String),
    #[error("no live evaders")]
    NoEvaders,
    #[error("blend weight must lie in [0, 1], got {0}")]
    InvalidWeight(f64),
}

impl From<ControlError> for SimError {
    fn from(e: ControlError) -> Self {
        SimError::Policy(e.to_string())
    }
}

fn heading_or_hold(u: Vec2) -> Command {
    if u == Vec2::ZERO {
        Command::Hold
    } else {
        Command::Heading(u.angle())
    }
}

/// One-vs-many pursuers steering at the interception aim point of the
/// nearest live evader.
#[derive(Debug, Clone, Copy, Default)]
pub struct InterceptPursuers;

impl PursuerPolicy for InterceptPursuers {
    fn pursuer_commands(
        &mut self,
        view: &WorldView<'_>,
        _rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Command>, SimError> {
        let sc = view.scenario;
        let gamma = sc.speed_ratio();
        view.pursuers
            .iter()
            .map(|p| {
                let nearest = view
                    .live_evaders()
                    .map(|(_, e)| e.position)
                    .min_by(|a, b| p.position.distance(*a).total_cmp(&p.position.distance(*b)));
                match nearest {
                    None => Ok(Command::Hold),
                    Some(e) if p.position.distance(e) <= sc.capture_radius => Ok(Command::Hold),
                    Some(e) => Ok(Command::Heading(pursuer_intercept_heading(
                        p.position,
                        e,
                        gamma,
                        sc.capture_radius,
                    )?)),
                }
            })
            .collect()
    }
}

/// Evader slipping through the weakest pursuer pair.
#[derive(Debug, Clone, Copy, Default)]
pub struct WeakestLinkEvader;

impl EvaderPolicy for WeakestLinkEvader {
    fn evader_commands(
        &mut self,
        view: &WorldView<'_>,
        _rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Command>, SimError> {
        let pursuers: Vec<Vec2> = view.pursuers.iter().map(|p| p.position).collect();
        view.evaders
            .iter()
            .map(|e| match e {
                None => Ok(Command::Hold),
                Some(e) => Ok(Command::Heading(evader_weakest_link(e.position, &pursuers)?)),
            })
            .collect()
    }
}

/// Many-vs-many pursuers: value grid seeded from the live evaders, one HJI
/// step, Hungarian assignment on the hybrid cost, then the blended control.
#[derive(Debug, Clone)]
pub struct HybridPursuers {
    pub alpha: f64,
    pub resolution: usize,
    /// Last assignment, indexed into the full evader list.
    pub last_assignment: Option<Vec<Option<usize>>>,
}

impl Default for HybridPursuers {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            resolution: DEFAULT_RESOLUTION,
            last_assignment: None,
        }
    }
}

impl HybridPursuers {
    /// Value grid used by the pursuers this step.
    pub fn value_grid(&self, view: &WorldView<'_>) -> Result<ValueGrid, ControlError> {
        let sc = view.scenario;
        let targets: Vec<Vec2> = view.live_evaders().map(|(_, e)| e.position).collect();
        let seed = ValueGrid::distance_field(self.resolution, &targets, sc.capture_radius)?;
        hji_update(&seed, sc.dt, sc.pursuer_speed, sc.evader_speed)
    }
}

impl PursuerPolicy for HybridPursuers {
    fn pursuer_commands(
        &mut self,
        view: &WorldView<'_>,
        _rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Command>, SimError> {
        let live: Vec<(usize, Vec2)> = view.live_evaders().map(|(i, e)| (i, e.position)).collect();
        if live.is_empty() {
            self.last_assignment = Some(vec![None; view.pursuers.len()]);
            return Ok(vec![Command::Hold; view.pursuers.len()]);
        }
        let grid = self.value_grid(view)?;
        let pursuers: Vec<Vec2> = view.pursuers.iter().map(|p| p.position).collect();
        let evaders: Vec<Vec2> = live.iter().map(|(_, e)| *e).collect();
        let cost = hybrid_cost_matrix(&pursuers, &evaders, &grid, self.alpha)?;
        let assignment = hungarian_assign(&cost)?;

        let commands = pursuers
            .iter()
            .zip(&assignment.targets)
            .map(|(p, t)| match t {
                Some(k) => heading_or_hold(pursuer_hybrid_control(*p, evaders[*k], &grid, self.alpha)),
                None => Command::Hold,
            })
            .collect();
        self.last_assignment = Some(
            assignment
                .targets
                .iter()
                .map(|t| t.map(|k| live[k].0))
                .collect(),
        );
        Ok(commands)
    }
}

/// Many-vs-many evaders: ascend a value grid seeded from the pursuers'
/// distance-to-capture while pushing away from pursuers inside the
/// avoidance radius.
#[derive(Debug, Clone)]
pub struct EscapeEvaders {
    pub avoid_factor: f64,
    pub resolution: usize,
}

impl Default for EscapeEvaders {
    fn default() -> Self {
        Self {
            avoid_factor: DEFAULT_AVOID_FACTOR,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

impl EvaderPolicy for EscapeEvaders {
    fn evader_commands(
        &mut self,
        view: &WorldView<'_>,
        _rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Command>, SimError> {
        let sc = view.scenario;
        let pursuers: Vec<Vec2> = view.pursuers.iter().map(|p| p.position).collect();
        let seed = ValueGrid::distance_field(self.resolution, &pursuers, sc.capture_radius)?;
        let grid = hji_update(&seed, sc.dt, sc.pursuer_speed, sc.evader_speed)?;
        let r_avoid = self.avoid_factor * sc.capture_radius;
        Ok(view
            .evaders
            .iter()
            .map(|e| match e {
                None => Command::Hold,
                Some(e) => heading_or_hold(evader_escape_control(e.position, &pursuers, &grid, r_avoid)),
            })
            .collect())
    }
}

/// The paper's controllers for a game kind.
pub fn default_policies(kind: GameKind) -> (Box<dyn PursuerPolicy + Send>, Box<dyn EvaderPolicy + Send>) {
    match kind {
        GameKind::OneVsMany => (Box::new(InterceptPursuers), Box::new(WeakestLinkEvader)),
        GameKind::ManyVsMany => (
            Box::new(HybridPursuers::default()),
            Box::new(EscapeEvaders::default()),
        ),
    }
}
