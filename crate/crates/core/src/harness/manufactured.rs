use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Matrix2;

use crate::assembly::{ExactSolution, ModelProblem, NeumannParts};
use crate::geometry::{Point, Vector};

/// `u(x, t) = sin(παt/T) sin(πx/L₁) sin(πy/L₂)` for the convection-diffusion
/// equation with constant diffusion `mu` and advection `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedSolution {
    pub alpha: f64,
    pub t_end: f64,
    pub lengths: [f64; 2],
    pub mu: f64,
    pub advection: Vector,
}

impl ManufacturedSolution {
    fn k(&self) -> [f64; 2] {
        [PI / self.lengths[0], PI / self.lengths[1]]
    }

    fn omega(&self) -> f64 {
        PI * self.alpha / self.t_end
    }

    pub fn value(&self, x: &Point, t: f64) -> f64 {
        let k = self.k();
        (self.omega() * t).sin() * (k[0] * x.x).sin() * (k[1] * x.y).sin()
    }

    pub fn time_derivative(&self, x: &Point, t: f64) -> f64 {
        let k = self.k();
        let w = self.omega();
        w * (w * t).cos() * (k[0] * x.x).sin() * (k[1] * x.y).sin()
    }

    pub fn gradient(&self, x: &Point, t: f64) -> Vector {
        let k = self.k();
        let s = (self.omega() * t).sin();
        Vector::new(
            k[0] * (k[0] * x.x).cos() * (k[1] * x.y).sin(),
            k[1] * (k[0] * x.x).sin() * (k[1] * x.y).cos(),
        ) * s
    }

    pub fn hessian(&self, x: &Point, t: f64) -> Matrix2<f64> {
        let k = self.k();
        let s = (self.omega() * t).sin();
        let (sx, cx) = ((k[0] * x.x).sin(), (k[0] * x.x).cos());
        let (sy, cy) = ((k[1] * x.y).sin(), (k[1] * x.y).cos());
        Matrix2::new(
            -k[0] * k[0] * sx * sy,
            k[0] * k[1] * cx * cy,
            k[0] * k[1] * cx * cy,
            -k[1] * k[1] * sx * sy,
        ) * s
    }

    /// `f = ∂_t u + w·∇u − μΔu`.
    pub fn source(&self, x: &Point, t: f64) -> f64 {
        self.time_derivative(x, t) + self.advection.dot(&self.gradient(x, t)) - self.mu * self.hessian(x, t).trace()
    }

    pub fn exact(&self) -> ExactSolution {
        let (a, b, c) = (*self, *self, *self);
        ExactSolution {
            value: Arc::new(move |x, t| a.value(x, t)),
            gradient: Arc::new(move |x, t| b.gradient(x, t)),
            hessian: Arc::new(move |x, t| c.hessian(x, t)),
        }
    }

    /// Dirichlet data and initial state taken from `u`; every boundary part is Dirichlet.
    pub fn problem(&self, c0: f64) -> ModelProblem {
        let (a, b, d) = (*self, *self, *self);
        let w = self.advection;
        ModelProblem {
            mu: self.mu,
            advection: (w != Vector::zeros()).then(|| Arc::new(move |_: &Point, _: f64| w) as _),
            source: Arc::new(move |x, t| a.source(x, t)),
            dirichlet: Arc::new(move |x, t| b.value(x, t)),
            neumann: Arc::new(|_, _| 0.0),
            initial: Arc::new(move |x, t| d.value(x, t)),
            neumann_parts: NeumannParts::default(),
            c0,
        }
    }
}
