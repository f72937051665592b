//! Finite complex signal sets: QAM construction, rotation, power scaling,
//! and the pairwise sum set seen by a receiver.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Equiprobable finite complex constellation.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSet {
    points: Vec<Complex64>,
}

impl SignalSet {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidAlphabet("signal set must be nonempty".into()));
        }
        if points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::InvalidAlphabet("signal points must be finite".into()));
        }
        Ok(Self { points })
    }

    /// Unit-energy square QAM with `m_squared = M²` points, `M` even.
    ///
    /// Points are enumerated row-major over the PAM indices `(u, v)`, each
    /// running over `-(M-1), ..., -1, 1, ..., M-1`.
    pub fn qam(m_squared: usize) -> Result<Self> {
        let m = (m_squared as f64).sqrt().round() as usize;
        if m * m != m_squared || m < 2 || !m.is_multiple_of(2) {
            return Err(Error::InvalidAlphabet(format!(
                "{m_squared} is not the square of an even PAM order"
            )));
        }
        let pam: Vec<f64> = (0..m).map(|i| (2 * i) as f64 - (m - 1) as f64).collect();
        // Average energy of the raw grid is 2(M²-1)/3.
        let scale = (2.0 * (m_squared as f64 - 1.0) / 3.0).sqrt().recip();
        let points = pam
            .iter()
            .flat_map(|&u| pam.iter().map(move |&v| Complex64::new(u * scale, v * scale)))
            .collect();
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Average energy `(1/N) Σ |x|²`.
    pub fn energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    /// Multiplies every point by `e^{jθ}`.
    pub fn rotate(&self, theta: f64) -> Self {
        let phasor = Complex64::from_polar(1.0, theta);
        Self {
            points: self.points.iter().map(|&p| p * phasor).collect(),
        }
    }

    /// Rescales the set so its average energy equals `power`.
    pub fn scale_to_power(&self, power: f64) -> Result<Self> {
        if !(power >= 0.0) || !power.is_finite() {
            return Err(Error::InvalidParameter(format!("power {power} must be finite and >= 0")));
        }
        if power == 0.0 {
            return Ok(Self {
                points: vec![Complex64::new(0.0, 0.0); self.points.len()],
            });
        }
        let energy = self.energy();
        if energy == 0.0 {
            return Err(Error::DegenerateAlphabet(power));
        }
        let gain = (power / energy).sqrt();
        Ok(Self {
            points: self.points.iter().map(|&p| p * gain).collect(),
        })
    }
}

/// All `N₁·N₂` pairwise sums, kept as a multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct SumSet {
    points: Vec<Complex64>,
}

/// Largest absolute in-phase and quadrature components of a sum set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extents {
    pub in_phase: f64,
    pub quadrature: f64,
}

/// Sum set ordered with the first set's index outer, the second's inner.
pub fn sum_set(first: &SignalSet, second: &SignalSet) -> SumSet {
    let points = first
        .points
        .iter()
        .flat_map(|&a| second.points.iter().map(move |&b| a + b))
        .collect();
    SumSet { points }
}

impl SumSet {
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn extents(&self) -> Extents {
        self.points.iter().fold(
            Extents {
                in_phase: 0.0,
                quadrature: 0.0,
            },
            |acc, p| Extents {
                in_phase: acc.in_phase.max(p.re.abs()),
                quadrature: acc.quadrature.max(p.im.abs()),
            },
        )
    }
}
