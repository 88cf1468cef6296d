//! Constant-bearing intercept geometry and straight-line track generation.
//!
//! Both vehicles move in the plane at fixed speeds. An agent holds a constant
//! heading; the CNA picks a single heading that brings it to the same point
//! at the same time. The three positions (CNA start, agent start, intercept
//! point) form a triangle whose interior angles follow from the sine law,
//! which gives the intercept heading and the continuous time-to-intercept in
//! closed form. Head-on and tail-chase configurations collapse the triangle
//! and are handled by dedicated branches.

use crate::error::{Error, Result};

/// Angular tolerance for detecting the head-on / tail-chase branches, where
/// the sine-law expression degenerates to 0/0.
const DEGENERATE_ANGLE_TOL: f64 = 1e-9;

/// A point or displacement in the plane, in length units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector along `angle` radians.
    pub fn from_angle(angle: f64) -> Self {
        Vec2 {
            x: angle.cos(),
            y: angle.sin(),
        }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product of two in-plane vectors.
    pub fn cross_z(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

/// An agent with a known straight-line nominal trajectory and an initial
/// position variance.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentSpec {
    /// Identifier, unique and positive within a scenario. Task id `i` aids
    /// the agent with `id == i`.
    pub id: usize,
    pub start: Vec2,
    /// Heading in radians.
    pub heading: f64,
    /// Speed in LU/TU; must be positive.
    pub speed: f64,
    /// Initial position variance in LU^2.
    pub initial_variance: f64,
}

impl AgentSpec {
    /// Nominal position at discrete step `k`.
    pub fn position_at(&self, step: usize, dt: f64) -> Vec2 {
        self.position_at_time(step as f64 * dt)
    }

    /// Nominal position at continuous time `t` (TU from mission start).
    pub fn position_at_time(&self, t: f64) -> Vec2 {
        self.start + Vec2::from_angle(self.heading) * (self.speed * t)
    }
}

/// The aid vehicle: faster than every agent it is expected to intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnaSpec {
    pub start: Vec2,
    /// Speed in LU/TU.
    pub speed: f64,
}

/// Solution of the constant-bearing intercept problem.
///
/// `beta_agent`, `beta_cna` and `alpha` are the interior angles of the
/// intercept triangle at the agent, the CNA, and the intercept point. In the
/// generic branch they satisfy `alpha + beta_agent + beta_cna = pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterceptSolution {
    /// CNA heading in radians, normalized to (-pi, pi].
    pub heading: f64,
    /// Continuous time to intercept, in TU.
    pub tau: f64,
    /// Point where both vehicles meet after `tau`.
    pub point: Vec2,
    pub beta_agent: f64,
    pub beta_cna: f64,
    pub alpha: f64,
}

impl InterceptSolution {
    /// Discrete step at which the aiding measurement is delivered, if the
    /// intercept begins at `current_step`.
    pub fn aiding_step(&self, current_step: usize, dt: f64) -> usize {
        discretize_arrival(self.tau, current_step, dt)
    }
}

/// Normalize an angle to (-pi, pi].
pub fn normalize_angle(angle: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut a = angle % two_pi;
    if a <= -std::f64::consts::PI {
        a += two_pi;
    } else if a > std::f64::consts::PI {
        a -= two_pi;
    }
    a
}

/// Minimum-time constant-heading intercept of a constant-velocity agent.
///
/// Requires `cna_speed > agent_speed`; the speed ratio below one guarantees
/// the intercept triangle closes for every agent heading. If the two
/// positions coincide the intercept is immediate and the CNA adopts the
/// agent's heading.
pub fn solve_intercept(
    cna_pos: Vec2,
    cna_speed: f64,
    agent_pos: Vec2,
    agent_heading: f64,
    agent_speed: f64,
) -> Result<InterceptSolution> {
    if !(cna_pos.is_finite() && agent_pos.is_finite()) {
        return Err(Error::NonFinite {
            context: "intercept positions",
        });
    }
    if !(cna_speed.is_finite() && agent_speed.is_finite() && agent_heading.is_finite()) {
        return Err(Error::NonFinite {
            context: "intercept speeds/heading",
        });
    }
    if cna_speed <= agent_speed || agent_speed < 0.0 {
        return Err(Error::SpeedRatio {
            cna_speed,
            agent_speed,
        });
    }

    let offset = agent_pos - cna_pos;
    let distance = offset.norm();
    if distance == 0.0 {
        return Ok(InterceptSolution {
            heading: normalize_angle(agent_heading),
            tau: 0.0,
            point: cna_pos,
            beta_agent: 0.0,
            beta_cna: 0.0,
            alpha: std::f64::consts::PI,
        });
    }

    let bearing = offset.y.atan2(offset.x);
    let speed_ratio = agent_speed / cna_speed;
    // Signed angle from the line of sight to the agent's heading.
    let los_offset = normalize_angle(agent_heading - bearing);

    if los_offset.abs() <= DEGENERATE_ANGLE_TOL {
        // Tail chase: the agent moves directly away from the CNA.
        return Ok(InterceptSolution {
            heading: bearing,
            tau: distance / (cna_speed - agent_speed),
            point: cna_pos + Vec2::from_angle(bearing) * (distance * cna_speed / (cna_speed - agent_speed)),
            beta_agent: std::f64::consts::PI,
            beta_cna: 0.0,
            alpha: 0.0,
        });
    }
    if (std::f64::consts::PI - los_offset.abs()).abs() <= DEGENERATE_ANGLE_TOL {
        // Head-on: the agent moves directly toward the CNA.
        return Ok(InterceptSolution {
            heading: bearing,
            tau: distance / (cna_speed + agent_speed),
            point: cna_pos + Vec2::from_angle(bearing) * (distance * cna_speed / (cna_speed + agent_speed)),
            beta_agent: 0.0,
            beta_cna: 0.0,
            alpha: std::f64::consts::PI,
        });
    }

    // Interior angle at the agent between the line back to the CNA and the
    // agent's travel direction.
    let beta_agent = std::f64::consts::PI - los_offset.abs();
    let sin_beta_agent = beta_agent.sin();
    let beta_cna = (speed_ratio * sin_beta_agent).asin();
    let alpha = std::f64::consts::PI - beta_agent - beta_cna;
    // Sine law with the CNA-side speed; equal to d sin(beta_cna) /
    // (agent_speed sin(alpha)) but stays defined as agent_speed -> 0.
    let tau = distance * sin_beta_agent / (cna_speed * alpha.sin());

    // Lead to the side the agent's path crosses; +1 on the (unreachable)
    // exact-zero cross product.
    let sign = Vec2::from_angle(bearing).cross_z(Vec2::from_angle(agent_heading));
    let lead = if sign < 0.0 { -1.0 } else { 1.0 };
    let heading = normalize_angle(bearing + lead * beta_cna);
    let point = cna_pos + Vec2::from_angle(heading) * (cna_speed * tau);

    Ok(InterceptSolution {
        heading,
        tau,
        point,
        beta_agent,
        beta_cna,
        alpha,
    })
}

/// Nominal noise-free trajectory of an agent: `horizon + 1` positions, one
/// per step.
pub fn propagate_track(spec: &AgentSpec, horizon: usize, dt: f64) -> Vec<Vec2> {
    (0..=horizon).map(|k| spec.position_at(k, dt)).collect()
}

/// Map a continuous time-to-intercept onto the discrete step grid.
///
/// The arrival is rounded up: the speed bound is an inequality, so the CNA
/// absorbs the fractional remainder by shortening its final motion step and
/// is exactly collocated with the agent at the returned step.
pub fn discretize_arrival(tau: f64, current_step: usize, dt: f64) -> usize {
    debug_assert!(tau >= 0.0 && dt > 0.0);
    current_step + (tau / dt).ceil() as usize
}
