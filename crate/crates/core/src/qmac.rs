//! Two-user quantized multiple-access channel.
//!
//! User 1 sends from a unit-energy QAM alphabet and user 2 from the same
//! alphabet rotated by θ; each user has power 1 and the SNR per user is
//! `1/σ²`. For a fixed θ the achievable region is the pentagon
//! `R₁ ≤ I(x₁;r|x₂)`, `R₂ ≤ I(x₂;r|x₁)`, `R₁ + R₂ ≤ I(x₁,x₂;r)`.

use rayon::prelude::*;

use crate::dmc::{quantized_channel, NoiseModel};
use crate::error::{Error, Result};
use crate::infotheory::mutual_informations;
use crate::quantizer::{QuantizerKind, QuantizerSpec};
use crate::region::RegionPolygon;
use crate::signals::SignalSet;

#[derive(Debug, Clone, PartialEq)]
pub struct QmacScenario {
    /// Unit-energy alphabet of user 1; user 2 uses it rotated by θ.
    pub base: SignalSet,
    pub snr_db: f64,
    pub quantizer: QuantizerSpec,
    /// Candidate rotation angles, radians.
    pub thetas: Vec<f64>,
}

/// MAC pentagon for one rotation angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pentagon {
    pub r1_max: f64,
    pub r2_max: f64,
    pub sum_max: f64,
    pub theta: f64,
}

impl Pentagon {
    /// True when the sum constraint is looser than both single-user
    /// constraints combined, or tighter than either alone.
    pub fn is_degenerate(&self) -> bool {
        self.sum_max > self.r1_max + self.r2_max + 1e-10
            || self.sum_max < self.r1_max.max(self.r2_max) - 1e-10
    }

    /// Corner vertices `(0,0), (R₁,0), (R₁, S−R₁), (S−R₂, R₂), (0,R₂)`,
    /// clipped to the first quadrant.
    pub fn region_polygon(&self) -> RegionPolygon {
        let r1 = self.r1_max.min(self.sum_max).max(0.0);
        let r2 = self.r2_max.min(self.sum_max).max(0.0);
        let s = self.sum_max.max(0.0);
        RegionPolygon::from_vertices(vec![
            (0.0, 0.0),
            (r1, 0.0),
            (r1, (s - r1).clamp(0.0, r2)),
            ((s - r2).clamp(0.0, r1), r2),
            (0.0, r2),
        ])
    }
}

impl QmacScenario {
    pub fn new(base: SignalSet, snr_db: f64, quantizer: QuantizerSpec, thetas: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::InvalidParameter("θ grid must be nonempty".into()));
        }
        Ok(Self {
            base,
            snr_db,
            quantizer,
            thetas,
        })
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::from_snr_db(1.0, self.snr_db)
    }

    /// Pentagon at `theta` with the scenario's quantizer.
    pub fn pentagon(&self, theta: f64) -> Result<Pentagon> {
        self.pentagon_with(theta, self.quantizer.kind)
    }

    /// Pentagon at `theta` with the quantizer family overridden.
    pub fn pentagon_with(&self, theta: f64, kind: QuantizerKind) -> Result<Pentagon> {
        let x2 = self.base.rotate(theta);
        let table = quantized_channel(&self.base, &x2, self.quantizer.with_kind(kind), self.noise()?)?;
        let mi = mutual_informations(&table);
        Ok(Pentagon {
            r1_max: mi.i_x1_r_given_x2,
            r2_max: mi.i_x2_r_given_x1,
            sum_max: mi.i_x1x2_r,
            theta,
        })
    }

    /// Pentagons over the whole θ grid, in grid order.
    pub fn sweep(&self) -> Result<Vec<Pentagon>> {
        self.thetas.par_iter().map(|&t| self.pentagon(t)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaOpt {
    pub theta: f64,
    pub pentagon: Pentagon,
    pub sweep: Vec<Pentagon>,
}

/// Values within this many bits of the maximum count as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Index of the largest value; near-ties (within [`TIE_TOLERANCE`]) go to
/// the earliest index, so mirror-image angles resolve to the smaller one.
pub(crate) fn argmax_first(values: impl IntoIterator<Item = f64>) -> Option<usize> {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.iter().position(|&v| v >= max - TIE_TOLERANCE)
}

/// Grid argmax of the sum rate over θ; ties toward the smaller angle.
pub fn theta_opt(sc: &QmacScenario) -> Result<ThetaOpt> {
    let sweep = sc.sweep()?;
    let best = argmax_first(sweep.iter().map(|p| p.sum_max))
        .ok_or_else(|| Error::InvalidParameter("θ grid must be nonempty".into()))?;
    Ok(ThetaOpt {
        theta: sweep[best].theta,
        pentagon: sweep[best],
        sweep,
    })
}

/// Convex hull of the union of pentagons over the sweep.
pub fn hull_over_theta(sweep: &[Pentagon]) -> RegionPolygon {
    let vertices: Vec<(f64, f64)> = sweep
        .iter()
        .flat_map(|p| p.region_polygon().vertices().to_vec())
        .collect();
    RegionPolygon::from_vertices(vertices)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pent(r1: f64, r2: f64, s: f64) -> Pentagon {
        Pentagon {
            r1_max: r1,
            r2_max: r2,
            sum_max: s,
            theta: 0.0,
        }
    }

    #[test]
    fn polygon_corners() {
        assert_eq!(
            pent(1.0, 1.0, 2.0).region_polygon().vertices(),
            &[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]
        );
        assert_eq!(
            pent(1.0, 1.0, 1.5).region_polygon().vertices(),
            &[(0.0, 0.0), (0.0, 1.0), (0.5, 1.0), (1.0, 0.5), (1.0, 0.0)]
        );
        let v = pent(2.0, 1.0, 2.2).region_polygon();
        assert!(v.is_vertex((2.0, 0.2), 1e-12) && v.is_vertex((1.2, 1.0), 1e-12));
        assert!(!pent(1.0, 1.0, 1.5).is_degenerate());
        assert!(pent(1.0, 1.0, 2.5).is_degenerate());
    }

    #[test]
    fn identical_alphabets_give_symmetric_pentagon() {
        let sc = QmacScenario::new(SignalSet::qam(16).unwrap(), 15.0, QuantizerSpec::uniform(2), vec![0.0]).unwrap();
        let p = sc.pentagon(0.0).unwrap();
        assert!((p.r1_max - p.r2_max).abs() < 1e-12);
    }

    #[test]
    fn pure_noise_carries_nothing() {
        let sc = QmacScenario::new(SignalSet::qam(16).unwrap(), -40.0, QuantizerSpec::uniform(3), vec![0.3]).unwrap();
        let p = sc.pentagon(0.3).unwrap();
        assert!(p.r1_max < 1e-3 && p.r2_max < 1e-3 && p.sum_max < 1e-3);
    }

    #[test]
    fn single_theta_grid() {
        let sc = QmacScenario::new(SignalSet::qam(4).unwrap(), 10.0, QuantizerSpec::uniform(2), vec![0.0]).unwrap();
        let t = theta_opt(&sc).unwrap();
        assert_eq!(t.theta, 0.0);
        assert_eq!(t.pentagon, sc.pentagon(0.0).unwrap());
    }

    #[test]
    fn argmax_prefers_first_tie() {
        assert_eq!(argmax_first([1.0, 3.0, 3.0, 2.0]), Some(1));
        assert_eq!(argmax_first(Vec::<f64>::new()), None);
        assert_eq!(argmax_first([1.0, 3.0 - 1e-13, 3.0]), Some(1));
        assert_eq!(argmax_first([1.0, 3.0 - 1e-9, 3.0]), Some(2));
    }

    #[test]
    fn pentagon_bounds() {
        let sc = QmacScenario::new(SignalSet::qam(16).unwrap(), 15.0, QuantizerSpec::uniform(2), vec![0.0]).unwrap();
        for deg in [0.0f64, 10.0, 33.0] {
            let p = sc.pentagon(deg.to_radians()).unwrap();
            assert!(p.sum_max <= p.r1_max + p.r2_max + 1e-10);
            assert!(p.sum_max <= 4.0 + 1e-12);
        }
    }
}
