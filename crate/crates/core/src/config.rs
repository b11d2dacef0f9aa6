//! Pipeline configuration and tolerances.

use serde::Serialize;

/// Tolerances and options for the analysis pipeline.
///
/// Residual tolerances are scaled at the point of use by `1 + scale`, where
/// `scale` is the magnitude of the quantities entering the check.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisConfig {
    /// Structure-equation and torsion-consistency residual tolerance.
    pub tol_connection: f64,
    /// Identity-system residual tolerance (Eqs. of the prolongation order).
    pub tol_identity: f64,
    /// Classification threshold for flag decisions.
    pub tol_classify: f64,
    /// Determinant magnitude below which a point is degenerate.
    #[serde(skip)]
    pub tol_degenerate: f64,
    /// Jet truncation order for the web function lift.
    pub jet_order: usize,
    /// Optional second frame row (c1, c2) for the specialized frame.
    #[serde(skip)]
    pub frame_row2: Option<(f64, f64)>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            tol_connection: 1e-9,
            tol_identity: 1e-8,
            tol_classify: 1e-7,
            tol_degenerate: 1e-12,
            jet_order: 4,
            frame_row2: None,
        }
    }
}

impl AnalysisConfig {
    /// Threshold for classification flags: |residual| < tol * (1 + scale).
    pub fn classify_threshold(&self, scale: f64) -> f64 {
        self.tol_classify * (1.0 + scale)
    }

    /// Tolerances must be positive and the jet order high enough for the
    /// third prolongation order.
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("tol_connection", self.tol_connection),
            ("tol_identity", self.tol_identity),
            ("tol_classify", self.tol_classify),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if self.jet_order < 4 {
            return Err(format!(
                "jet_order must be at least 4 for the full pipeline, got {}",
                self.jet_order
            ));
        }
        Ok(())
    }
}
