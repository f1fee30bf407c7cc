//! A complete run description: source, filter pair, detector, grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{Detector, FilterPair};
use crate::grid::SpectralGrid;
use crate::spectra::JointGaussianSource;

/// Everything the analytic and Monte Carlo engines need for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub source: JointGaussianSource,
    pub pair: FilterPair,
    pub detector: Detector,
    pub grid: SpectralGrid,
}

impl Scenario {
    pub fn new(
        source: JointGaussianSource,
        pair: FilterPair,
        detector: Detector,
        grid: SpectralGrid,
    ) -> Self {
        Self {
            source,
            pair,
            detector,
            grid,
        }
    }

    /// Enforce the grid-adequacy rule: the domain must be long enough to
    /// hold the widest correlation feature and sampled finely enough to
    /// resolve the narrowest one. Violations are hard errors naming the
    /// offending ratio; silent aliasing would corrupt every downstream
    /// comparison.
    pub fn check_grid_adequacy(&self) -> Result<()> {
        let tau_c = self.source.time_scale();
        let tg = self.detector.response_time();
        let widest = tau_c.max(tg);
        let narrowest = if tg > 0.0 { tau_c.min(tg) } else { tau_c };

        let span_ratio = self.grid.total_time() / widest;
        if span_ratio < 16.0 {
            return Err(Error::GridResolution {
                ratio: "T/max(tau_c, Tg)",
                bound: ">=",
                actual: span_ratio,
                required: 16.0,
            });
        }
        let step_ratio = narrowest / self.grid.dt();
        if step_ratio < 16.0 {
            return Err(Error::GridResolution {
                ratio: "min(tau_c, Tg)/dt",
                bound: ">=",
                actual: step_ratio,
                required: 16.0,
            });
        }
        Ok(())
    }
}
