use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by the dynamics, classification and spectrum
/// code. Reports embed the effective values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed excess of the boundary modulus over 1 in self-map validation.
    pub self_map: f64,
    /// Band `|1 - |z|| < boundary` classifying a fixed point as boundary.
    pub boundary: f64,
    /// Relative tolerance of the Krein-form automorphism test.
    pub automorphism: f64,
    /// `||lambda| - 1| < unimodular` counts an eigenvalue as unimodular.
    pub unimodular: f64,
    /// Contractive eigenvalues must satisfy `|lambda| < 1 - gap`.
    pub gap: f64,
    /// `alpha >= 1 - parabolic` classifies a non-elliptic map as parabolic.
    pub parabolic: f64,
    /// Slack allowed above 1 for the dilation at a Denjoy-Wolff point.
    pub dilation_slack: f64,
    /// Agreement required between the Jacobian dilation and the radial
    /// difference quotient.
    pub radial_agreement: f64,
    /// Residual `|phi(z) - z|` accepted for a fixed point.
    pub fixed_point: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            self_map: 1e-9,
            boundary: 1e-8,
            automorphism: 1e-9,
            unimodular: 1e-8,
            gap: 1e-6,
            parabolic: 1e-8,
            dilation_slack: 1e-6,
            radial_agreement: 1e-4,
            fixed_point: 1e-9,
        }
    }
}
