use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::vector::Vec3;

pub type ScalarField = Arc<dyn Fn(Vec3) -> f64 + Send + Sync>;
pub type GradientField = Arc<dyn Fn(Vec3) -> Vec3 + Send + Sync>;

/// Step used for central-difference gradients at `x`.
pub fn fd_step(x: Vec3) -> f64 {
    1e-5 * (1.0 + x.norm())
}

/// Zero set of a scalar field, restricted to the closed ball of radius
/// `clip_radius` about the origin.
#[derive(Clone)]
pub struct ImplicitSurface {
    field: ScalarField,
    gradient: Option<GradientField>,
    clip_radius: f64,
}

impl fmt::Debug for ImplicitSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImplicitSurface")
            .field("analytic_gradient", &self.gradient.is_some())
            .field("clip_radius", &self.clip_radius)
            .finish()
    }
}

impl ImplicitSurface {
    pub fn new<F>(field: F, clip_radius: f64) -> Result<Self>
    where
        F: Fn(Vec3) -> f64 + Send + Sync + 'static,
    {
        if !(clip_radius > 0.0) || !clip_radius.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "clip radius must be positive, got {clip_radius}"
            )));
        }
        Ok(ImplicitSurface {
            field: Arc::new(field),
            gradient: None,
            clip_radius,
        })
    }

    pub fn with_gradient<G>(mut self, gradient: G) -> Self
    where
        G: Fn(Vec3) -> Vec3 + Send + Sync + 'static,
    {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn with_clip_radius(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "clip radius must be positive, got {r}"
            )));
        }
        self.clip_radius = r;
        Ok(self)
    }

    /// The same level set moved by `offset`.
    pub fn translated(&self, offset: Vec3) -> Self {
        let field = self.field.clone();
        let gradient = self.gradient.clone();
        ImplicitSurface {
            field: Arc::new(move |x| field(x - offset)),
            gradient: gradient.map(|g| Arc::new(move |x| g(x - offset)) as GradientField),
            clip_radius: self.clip_radius,
        }
    }

    #[inline]
    pub fn value(&self, x: Vec3) -> f64 {
        (self.field)(x)
    }

    pub fn clip_radius(&self) -> f64 {
        self.clip_radius
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    /// Analytic gradient when available, otherwise central differences.
    pub fn gradient(&self, x: Vec3) -> Vec3 {
        match &self.gradient {
            Some(g) => g(x),
            None => self.fd_gradient(x),
        }
    }

    pub fn fd_gradient(&self, x: Vec3) -> Vec3 {
        let h = fd_step(x);
        let d = |e: Vec3| (self.value(x + h * e) - self.value(x - h * e)) / (2.0 * h);
        Vec3::new(d(Vec3::X), d(Vec3::Y), d(Vec3::Z))
    }
}
