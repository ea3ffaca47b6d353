//! Model parameters and the bound (communication graph, belief system,
//! parameters) triple that the analysis and simulation layers operate on.

use nalgebra::DMatrix;

use crate::error::{CoreError, Result};
use crate::signed_graph::SignedGraph;

/// Odd bounded saturation from the scaled-tanh family `S(y) = a tanh(b y)`
/// with `a b = 1`, so `S(0) = 0`, `S'(0) = 1`, `S''(0) = 0`, and
/// `S'''(0) = -2 b^2 != 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationSpec {
    scale: f64,
    slope: f64,
}

impl SaturationSpec {
    pub fn new(scale: f64, slope: f64) -> Result<Self> {
        if !(scale > 0.0) || !(slope > 0.0) {
            return Err(CoreError::Parameter(format!(
                "saturation scale and slope must be positive, got a={scale}, b={slope}"
            )));
        }
        if (scale * slope - 1.0).abs() > 1e-12 {
            return Err(CoreError::Parameter(format!(
                "saturation must satisfy a*b = 1 so that S'(0) = 1, got a*b = {}",
                scale * slope
            )));
        }
        Ok(Self { scale, slope })
    }

    /// `S_1(y) = tanh(y)`.
    pub fn tanh_unit() -> Self {
        Self { scale: 1.0, slope: 1.0 }
    }

    /// `S_2(y) = tanh(2y) / 2`.
    pub fn half_tanh_double() -> Self {
        Self { scale: 0.5, slope: 2.0 }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        self.scale * (self.slope * y).tanh()
    }

    /// `S'''(0) = -2 a b^3 = -2 b^2` (using `a b = 1`).
    pub fn third_derivative_at_zero(&self) -> f64 {
        -2.0 * self.scale * self.slope.powi(3)
    }

    /// `sup |S| = a`.
    pub fn bound(&self) -> f64 {
        self.scale
    }
}

/// Gains of the belief update law.
///
/// `d` is resistance, `u` attention, `alpha` self-reinforcement, `beta`
/// belief-system adherence, `gamma` social imitation, and `delta` ideological
/// commitment. `s1` saturates same-topic input, `s2` each cross-topic term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub d: f64,
    pub u: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub s1: SaturationSpec,
    pub s2: SaturationSpec,
}

impl ModelParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        d: f64,
        u: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta: f64,
        s1: SaturationSpec,
        s2: SaturationSpec,
    ) -> Result<Self> {
        let p = Self { d, u, alpha, beta, gamma, delta, s1, s2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0) || !self.d.is_finite() {
            return Err(CoreError::Parameter(format!("d must be positive, got {}", self.d)));
        }
        for (name, v) in [
            ("u", self.u),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(CoreError::Parameter(format!("{name} must be nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    /// Copy with a different attention level.
    pub fn with_u(&self, u: f64) -> Result<Self> {
        let mut p = *self;
        p.u = u;
        p.validate()?;
        Ok(p)
    }
}

/// A communication graph, a belief-system graph (or the trivial single-topic
/// system), and the model parameters, bound together for analysis and
/// simulation.
#[derive(Debug, Clone)]
pub struct Model {
    a_a: DMatrix<f64>,
    a_o: DMatrix<f64>,
    single_topic: bool,
    params: ModelParams,
}

impl Model {
    /// Binds graphs and parameters. With `belief_system = None` the model is
    /// single-topic: the belief-system matrix degenerates to the 1x1 identity
    /// and `beta`, `delta` must be zero (cross-topic terms do not exist).
    pub fn new(communication: &SignedGraph, belief_system: Option<&SignedGraph>, params: ModelParams) -> Result<Self> {
        params.validate()?;
        let a_a = communication.adjacency().clone();
        let (a_o, single_topic) = match belief_system {
            Some(g) => (g.adjacency().clone(), false),
            None => {
                if params.beta != 0.0 || params.delta != 0.0 {
                    return Err(CoreError::Parameter(
                        "single-topic model requires beta = delta = 0".into(),
                    ));
                }
                (DMatrix::from_element(1, 1, 1.0), true)
            }
        };
        Ok(Self { a_a, a_o, single_topic, params })
    }

    pub fn n_agents(&self) -> usize {
        self.a_a.nrows()
    }

    pub fn n_topics(&self) -> usize {
        self.a_o.nrows()
    }

    pub fn dimension(&self) -> usize {
        self.n_agents() * self.n_topics()
    }

    pub fn communication_matrix(&self) -> &DMatrix<f64> {
        &self.a_a
    }

    pub fn belief_system_matrix(&self) -> &DMatrix<f64> {
        &self.a_o
    }

    pub fn is_single_topic(&self) -> bool {
        self.single_topic
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn set_u(&mut self, u: f64) -> Result<()> {
        self.params = self.params.with_u(u)?;
        Ok(())
    }

    /// Jacobian of the dynamics at the neutral equilibrium for attention `u`.
    pub fn jacobian_at_origin(&self, u: f64) -> DMatrix<f64> {
        crate::spectral::form_jacobian(&self.a_a, &self.a_o, &self.params, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signed_graph::SignedGraph;

    #[test]
    fn saturation_family_invariants() {
        let s1 = SaturationSpec::tanh_unit();
        let s2 = SaturationSpec::half_tanh_double();
        for s in [s1, s2] {
            assert_eq!(s.eval(0.0), 0.0);
            // S'(0) = 1 and S''(0) = 0 by central differences.
            let h = 1e-5;
            let d1 = (s.eval(h) - s.eval(-h)) / (2.0 * h);
            assert!((d1 - 1.0).abs() < 1e-9);
            let d2 = (s.eval(h) - 2.0 * s.eval(0.0) + s.eval(-h)) / (h * h);
            assert!(d2.abs() < 1e-9);
            // S'''(0) by central differences on +-h, +-2h.
            let d3 = (s.eval(2.0 * h) - 2.0 * s.eval(h) + 2.0 * s.eval(-h) - s.eval(-2.0 * h)) / (2.0 * h * h * h);
            assert!((d3 - s.third_derivative_at_zero()).abs() < 1e-4 * s.third_derivative_at_zero().abs());
            // Odd and bounded.
            for y in [-3.0, -0.7, 0.3, 10.0] {
                assert_eq!(s.eval(-y), -s.eval(y));
                assert!(s.eval(y).abs() <= s.bound());
            }
        }
        assert_eq!(s1.third_derivative_at_zero(), -2.0);
        assert_eq!(s2.third_derivative_at_zero(), -8.0);
    }

    #[test]
    fn saturation_rejects_bad_scales() {
        assert!(SaturationSpec::new(0.5, 1.0).is_err());
        assert!(SaturationSpec::new(-1.0, -1.0).is_err());
        assert!(SaturationSpec::new(2.0, 0.5).is_ok());
    }

    #[test]
    fn params_validation() {
        let s1 = SaturationSpec::tanh_unit();
        let s2 = SaturationSpec::half_tanh_double();
        assert!(ModelParams::new(0.0, 1.0, 0.1, 0.0, 0.1, 0.0, s1, s2).is_err());
        assert!(ModelParams::new(1.0, -1.0, 0.1, 0.0, 0.1, 0.0, s1, s2).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.1, 0.0, -0.1, 0.0, s1, s2).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.1, 0.0, 0.1, 0.0, s1, s2).is_ok());
    }

    #[test]
    fn single_topic_requires_zero_cross_gains() {
        let g = SignedGraph::from_edges(2, &[(1, 2, 1.0), (2, 1, -1.0)]).unwrap();
        let s1 = SaturationSpec::tanh_unit();
        let s2 = SaturationSpec::half_tanh_double();
        let bad = ModelParams::new(1.0, 1.0, 0.1, 0.25, 0.1, 0.0, s1, s2).unwrap();
        assert!(Model::new(&g, None, bad).is_err());
        let good = ModelParams::new(1.0, 1.0, 0.1, 0.0, 0.1, 0.0, s1, s2).unwrap();
        let m = Model::new(&g, None, good).unwrap();
        assert_eq!(m.n_topics(), 1);
        assert_eq!(m.dimension(), 2);
        assert!(m.is_single_topic());
    }
}
