use std::fmt;
use std::sync::Arc;

use nalgebra::Rotation2;

use crate::geometry::{GeometryError, OrientedBoundary, Point, Vector};

/// A user-supplied boundary motion `D(x, t)`.
pub trait CustomMotion: Send + Sync {
    fn position(&self, x: &Point, t: f64) -> Point;
    /// Inverse of `position` at time `t`.
    fn inverse(&self, y: &Point, t: f64) -> Point;
    /// `∂D/∂t` at `(x, t)`.
    fn velocity(&self, x: &Point, t: f64) -> Vector;
}

/// Motion of the boundary, `D(·, 0)` being the identity.
#[derive(Clone)]
pub enum BoundaryMotion {
    /// `D(x, t) = x + c t`.
    Translation { velocity: Vector },
    /// `D(x, t) = x₀ + R(ωt)(x − x₀) + A sin(ω_x t)`.
    RigidRotationOscillation {
        center: Point,
        omega: f64,
        amplitude: Vector,
        omega_x: f64,
    },
    /// `D(x, φ_t(t))` with the ramp `φ_t` of exponent `gamma` acting until `t_a`.
    TimeRamp {
        inner: Box<BoundaryMotion>,
        gamma: f64,
        t_a: f64,
    },
    Custom(Arc<dyn CustomMotion>),
}

impl fmt::Debug for BoundaryMotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryMotion::Translation { velocity } => {
                f.debug_struct("Translation").field("velocity", velocity).finish()
            }
            BoundaryMotion::RigidRotationOscillation {
                center,
                omega,
                amplitude,
                omega_x,
            } => f
                .debug_struct("RigidRotationOscillation")
                .field("center", center)
                .field("omega", omega)
                .field("amplitude", amplitude)
                .field("omega_x", omega_x)
                .finish(),
            BoundaryMotion::TimeRamp { inner, gamma, t_a } => f
                .debug_struct("TimeRamp")
                .field("inner", inner)
                .field("gamma", gamma)
                .field("t_a", t_a)
                .finish(),
            BoundaryMotion::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Ramp `φ_t`: zero initial velocity, unit velocity after `t_a`.
pub fn ramp_time(t: f64, gamma: f64, t_a: f64) -> f64 {
    if t < t_a {
        t_a / gamma * (t / t_a).powf(gamma)
    } else {
        (t - t_a) + t_a / gamma
    }
}

fn ramp_rate(t: f64, gamma: f64, t_a: f64) -> f64 {
    if t < t_a {
        (t / t_a).powf(gamma - 1.0)
    } else {
        1.0
    }
}

impl BoundaryMotion {
    pub fn identity() -> Self {
        BoundaryMotion::Translation {
            velocity: Vector::zeros(),
        }
    }

    pub fn position(&self, x: &Point, t: f64) -> Point {
        match self {
            BoundaryMotion::Translation { velocity } => x + velocity * t,
            BoundaryMotion::RigidRotationOscillation {
                center,
                omega,
                amplitude,
                omega_x,
            } => center + Rotation2::new(omega * t) * (x - center) + amplitude * (omega_x * t).sin(),
            BoundaryMotion::TimeRamp { inner, gamma, t_a } => inner.position(x, ramp_time(t, *gamma, *t_a)),
            BoundaryMotion::Custom(m) => m.position(x, t),
        }
    }

    pub fn inverse(&self, y: &Point, t: f64) -> Point {
        match self {
            BoundaryMotion::Translation { velocity } => y - velocity * t,
            BoundaryMotion::RigidRotationOscillation {
                center,
                omega,
                amplitude,
                omega_x,
            } => center + Rotation2::new(-omega * t) * (y - amplitude * (omega_x * t).sin() - center),
            BoundaryMotion::TimeRamp { inner, gamma, t_a } => inner.inverse(y, ramp_time(t, *gamma, *t_a)),
            BoundaryMotion::Custom(m) => m.inverse(y, t),
        }
    }

    pub fn velocity(&self, x: &Point, t: f64) -> Vector {
        match self {
            BoundaryMotion::Translation { velocity } => *velocity,
            BoundaryMotion::RigidRotationOscillation {
                center,
                omega,
                amplitude,
                omega_x,
            } => {
                let r = Rotation2::new(omega * t) * (x - center);
                Vector::new(-r.y, r.x) * *omega + amplitude * (omega_x * (omega_x * t).cos())
            }
            BoundaryMotion::TimeRamp { inner, gamma, t_a } => {
                inner.velocity(x, ramp_time(t, *gamma, *t_a)) * ramp_rate(t, *gamma, *t_a)
            }
            BoundaryMotion::Custom(m) => m.velocity(x, t),
        }
    }

    /// Displacement `D(D(t_ref)⁻¹ x̂, t) − x̂` of a point `x̂` of the boundary at `t_ref`.
    pub fn displacement(&self, x: &Point, t_ref: f64, t: f64) -> Vector {
        let x0 = self.inverse(x, t_ref);
        self.position(&x0, t) - x
    }

    /// Time derivative of [`displacement`](Self::displacement).
    pub fn displacement_rate(&self, x: &Point, t_ref: f64, t: f64) -> Vector {
        self.velocity(&self.inverse(x, t_ref), t)
    }

    /// Image `D(t)(B₀)` of the initial boundary.
    pub fn boundary_at(&self, initial: &OrientedBoundary, t: f64) -> Result<OrientedBoundary, GeometryError> {
        initial.mapped(|x| self.position(x, t))
    }
}

/// Evaluator of the Dirichlet data `û_D` of one slab.
#[derive(Debug, Clone)]
pub struct DirichletData {
    motion: BoundaryMotion,
    t_ref: f64,
}

/// Boundary displacement data for the slab whose reference configuration is
/// the boundary at `t_ref`; it vanishes at `t_ref`.
pub fn dirichlet_data(motion: &BoundaryMotion, t_ref: f64) -> DirichletData {
    DirichletData {
        motion: motion.clone(),
        t_ref,
    }
}

impl DirichletData {
    pub fn eval(&self, x: &Point, t: f64) -> Vector {
        self.motion.displacement(x, self.t_ref, t)
    }

    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }
}
