//! Two-user quantized broadcast channel.
//!
//! The transmitter sends `x₁ + x₂` with powers `αP` and `(1-α)P`; each
//! receiver quantizes its own noisy copy. Quantization breaks degradedness,
//! so neither receiver is guaranteed to decode the other user's message
//! more easily. Two schemes give achievable points:
//!
//! * scheme 1: user 1 decodes successively, so `R₂` is capped at
//!   `min{I(x₂;r₂), I(x₂;r₁)}` and `R₁ = I(x₁;r₁|x₂)`;
//! * scheme 2: the mirror image, `R₁ = min{I(x₁;r₁), I(x₁;r₂)}` and
//!   `R₂ = I(x₂;r₂|x₁)`.
//!
//! The region is the convex hull (time sharing) of both schemes' points over
//! the α and θ sweeps, closed with the origin.
//!
//! For reference, the classical degraded Gaussian broadcast region with
//! `σ₁² < σ₂²` is `R₁ ≤ I(x₁;y₁|x₂)`, `R₂ ≤ I(x₂;y₂)`. It is not used here.

use rayon::prelude::*;

use crate::dmc::{quantized_channel, NoiseModel};
use crate::error::{Error, Result};
use crate::infotheory::{mutual_informations, MiReport};
use crate::quantizer::QuantizerSpec;
use crate::region::{Provenance, RatePoint, RegionPolygon, Scheme};
use crate::signals::SignalSet;

#[derive(Debug, Clone, PartialEq)]
pub struct QbcScenario {
    /// Unit-energy alphabet of user 1.
    pub user1: SignalSet,
    /// Unit-energy alphabet of user 2, before rotation.
    pub user2: SignalSet,
    pub power: f64,
    pub snr1_db: f64,
    pub snr2_db: f64,
    pub receiver1: QuantizerSpec,
    pub receiver2: QuantizerSpec,
    pub alphas: Vec<f64>,
    /// Rotation angles of user 2's alphabet, radians.
    pub thetas: Vec<f64>,
}

/// `0, step, 2·step, ..., 1` (the last point is always exactly 1).
pub fn alpha_grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step).round() as usize;
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

/// `0°, step, ..., max_deg` converted to radians.
pub fn theta_grid_deg(step_deg: f64, max_deg: f64) -> Vec<f64> {
    let n = (max_deg / step_deg + 1e-9).floor() as usize;
    (0..=n).map(|i| (i as f64 * step_deg).to_radians()).collect()
}

impl QbcScenario {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.thetas.is_empty() {
            return Err(Error::InvalidParameter("α and θ grids must be nonempty".into()));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::InvalidParameter(format!("α = {a} outside [0, 1]")));
        }
        if !(self.power > 0.0) {
            return Err(Error::InvalidParameter("total power must be positive".into()));
        }
        Ok(())
    }

    /// 4-QAM to both users, 1-bit uniform quantizers, SNR1 = 10 dB,
    /// SNR2 = 7 dB, no rotation.
    pub fn table1() -> Self {
        let q4 = SignalSet::qam(4).expect("4-QAM");
        Self {
            user1: q4.clone(),
            user2: q4,
            power: 1.0,
            snr1_db: 10.0,
            snr2_db: 7.0,
            receiver1: QuantizerSpec::uniform(1),
            receiver2: QuantizerSpec::uniform(1),
            alphas: vec![0.2, 0.4, 0.6, 0.8],
            thetas: vec![0.0],
        }
    }

    /// Mutual informations at both receivers for one `(α, θ)`.
    pub fn evaluate(&self, alpha: f64, theta: f64) -> Result<QbcEvaluation> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("α = {alpha} outside [0, 1]")));
        }
        let x1 = self.user1.scale_to_power(alpha * self.power)?;
        let x2 = self.user2.rotate(theta).scale_to_power((1.0 - alpha) * self.power)?;
        let n1 = NoiseModel::from_snr_db(self.power, self.snr1_db)?;
        let n2 = NoiseModel::from_snr_db(self.power, self.snr2_db)?;
        let receiver1 = mutual_informations(&quantized_channel(&x1, &x2, self.receiver1, n1)?);
        let receiver2 = mutual_informations(&quantized_channel(&x1, &x2, self.receiver2, n2)?);
        Ok(QbcEvaluation {
            alpha,
            theta,
            receiver1,
            receiver2,
        })
    }

    /// The scenario with the two users' roles exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            user1: self.user2.clone(),
            user2: self.user1.clone(),
            power: self.power,
            snr1_db: self.snr2_db,
            snr2_db: self.snr1_db,
            receiver1: self.receiver2,
            receiver2: self.receiver1,
            alphas: self.alphas.iter().map(|a| 1.0 - a).collect(),
            thetas: self.thetas.clone(),
        }
    }
}

/// Both receivers' mutual informations at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QbcEvaluation {
    pub alpha: f64,
    pub theta: f64,
    pub receiver1: MiReport,
    pub receiver2: MiReport,
}

impl QbcEvaluation {
    pub fn scheme1(&self) -> RatePoint {
        RatePoint {
            r1: self.receiver1.i_x1_r_given_x2,
            r2: self.receiver2.i_x2_r.min(self.receiver1.i_x2_r),
            provenance: Provenance {
                scheme: Scheme::One,
                alpha: self.alpha,
                theta: self.theta,
            },
        }
    }

    pub fn scheme2(&self) -> RatePoint {
        RatePoint {
            r1: self.receiver1.i_x1_r.min(self.receiver2.i_x1_r),
            r2: self.receiver2.i_x2_r_given_x1,
            provenance: Provenance {
                scheme: Scheme::Two,
                alpha: self.alpha,
                theta: self.theta,
            },
        }
    }
}

pub fn scheme1_rates(sc: &QbcScenario, alpha: f64, theta: f64) -> Result<RatePoint> {
    Ok(sc.evaluate(alpha, theta)?.scheme1())
}

pub fn scheme2_rates(sc: &QbcScenario, alpha: f64, theta: f64) -> Result<RatePoint> {
    Ok(sc.evaluate(alpha, theta)?.scheme2())
}

#[derive(Debug, Clone, PartialEq)]
pub struct QbcRegion {
    /// Scheme-1 and scheme-2 points, θ outer, α inner, scheme 1 first.
    pub points: Vec<RatePoint>,
    pub hull: RegionPolygon,
}

impl QbcRegion {
    pub fn on_hull(&self, p: &RatePoint) -> bool {
        self.hull.is_vertex((p.r1, p.r2), 1e-12)
    }
}

/// Sweeps α and θ, evaluates both schemes, and hulls the result.
pub fn region(sc: &QbcScenario) -> Result<QbcRegion> {
    sc.validate()?;
    let grid: Vec<(f64, f64)> = sc
        .thetas
        .iter()
        .flat_map(|&t| sc.alphas.iter().map(move |&a| (a, t)))
        .collect();
    let evals: Vec<QbcEvaluation> = grid
        .par_iter()
        .map(|&(a, t)| sc.evaluate(a, t))
        .collect::<Result<_>>()?;
    let points: Vec<RatePoint> = evals.iter().flat_map(|e| [e.scheme1(), e.scheme2()]).collect();
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.r1, p.r2)).collect();
    Ok(QbcRegion {
        hull: RegionPolygon::rate_region(&pairs),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let a = alpha_grid(0.05);
        assert_eq!(a.len(), 21);
        assert_eq!(a[0], 0.0);
        assert_eq!(a[20], 1.0);
        assert!((a[7] - 0.35).abs() < 1e-15);
        let t = theta_grid_deg(1.0, 89.0);
        assert_eq!(t.len(), 90);
        assert!((t[89] - 89f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn silent_users_get_zero_rate() {
        let sc = QbcScenario::table1();
        let p = scheme1_rates(&sc, 1.0, 0.0).unwrap();
        assert!(p.r2.abs() < 1e-12);
        let p = scheme1_rates(&sc, 0.0, 0.0).unwrap();
        assert!(p.r1.abs() < 1e-12);
    }

    #[test]
    fn scheme2_at_zero_alpha_is_full_power_single_user() {
        let sc = QbcScenario::table1();
        let e = sc.evaluate(0.0, 0.0).unwrap();
        let p = e.scheme2();
        assert!(p.r1.abs() < 1e-12);
        assert!((p.r2 - e.receiver2.i_x2_r).abs() < 1e-12);
    }

    #[test]
    fn three_point_hull() {
        let mut sc = QbcScenario::table1();
        sc.snr2_db = sc.snr1_db;
        sc.alphas = vec![0.5];
        let r = region(&sc).unwrap();
        assert_eq!(r.points.len(), 2);
        for p in &r.points {
            assert!(r.hull.contains((p.r1, p.r2), 1e-12));
        }
        assert!(r.hull.vertices().len() <= 5);
        assert_eq!(r.hull.vertices()[0], (0.0, 0.0));
    }

    #[test]
    fn min_rule_holds_over_sweep() {
        let mut sc = QbcScenario::table1();
        sc.alphas = alpha_grid(0.1);
        for &a in &sc.alphas {
            let e = sc.evaluate(a, 0.0).unwrap();
            let s1 = e.scheme1();
            assert!(s1.r2 <= e.receiver1.i_x2_r && s1.r2 <= e.receiver2.i_x2_r);
            let s2 = e.scheme2();
            assert!(s2.r1 <= e.receiver1.i_x1_r && s2.r1 <= e.receiver2.i_x1_r);
        }
    }

    #[test]
    fn swapping_users_transposes_schemes() {
        let mut sc = QbcScenario::table1();
        sc.user1 = SignalSet::qam(16).unwrap();
        sc.receiver1 = QuantizerSpec::uniform(2);
        for a in [0.1, 0.45, 0.7] {
            let e = sc.evaluate(a, 0.0).unwrap();
            let s = sc.swapped().evaluate(1.0 - a, 0.0).unwrap();
            let (p, q) = (e.scheme1(), s.scheme2());
            assert!((p.r1 - q.r2).abs() < 1e-12 && (p.r2 - q.r1).abs() < 1e-12);
        }
    }
}
