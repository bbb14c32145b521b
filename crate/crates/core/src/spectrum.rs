//! Sampled multifractal spectra shared by the level-set and interval-map
//! computations.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSample {
    pub alpha: f64,
    pub value: f64,
    /// Minimizing tilt in the dual formula.
    pub q_star: f64,
    /// Short description of the maximizing measure.
    pub maximizer_id: String,
    /// Set when `alpha` fell outside the slopes the data can resolve.
    pub flagged: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SpectrumCurve {
    pub samples: Vec<SpectrumSample>,
}

impl SpectrumCurve {
    /// Midpoint concavity on consecutive triples of an equally spaced grid,
    /// ignoring flagged samples. Returns the worst violation (<= 0 is fine).
    pub fn concavity_defect(&self) -> f64 {
        let s: Vec<&SpectrumSample> = self.samples.iter().filter(|s| !s.flagged).collect();
        s.windows(3)
            .map(|w| {
                let (a, b, c) = (w[0], w[1], w[2]);
                // value at b compared with the chord through a and c
                let lam = (b.alpha - a.alpha) / (c.alpha - a.alpha);
                (1.0 - lam) * a.value + lam * c.value - b.value
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
