//! Scalar b-bit quantizers as explicit monotone partitions of the real line.
//!
//! Both families scale their input by the sum-set extent `X`. The uniform
//! quantizer has interior cell width `2X/(2^b - 1)`. The power-law family
//! places its positive boundaries at `X (2k/(2^b - 1))^p` and mirrors them
//! onto the negative axis, so `p = 1` recovers the uniform cells.
//!
//! The branch with the largest interior `ζ` and the positive clip branch are
//! kept as a single cell with level `+1` (and likewise on the negative side),
//! so every quantizer has exactly `2^b` cells and each output level has a
//! single interval as its preimage.

use std::io::Write;

use crate::error::{Error, Result};
use crate::signals::Extents;

pub const MAX_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantizerKind {
    Uniform,
    /// Power-law non-uniform quantizer with exponent `p ≥ 1`.
    Power(f64),
}

impl QuantizerKind {
    pub fn exponent(&self) -> f64 {
        match self {
            Self::Uniform => 1.0,
            Self::Power(p) => *p,
        }
    }
}

/// Half-open cell `[lower, upper)` mapped to `level`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl Cell {
    pub fn contains(&self, y: f64) -> bool {
        self.lower <= y && y < self.upper
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer {
    bits: u32,
    extent: f64,
    kind: QuantizerKind,
    cells: Vec<Cell>,
}

fn check_args(bits: u32, extent: f64) -> Result<()> {
    if bits == 0 || bits > MAX_BITS {
        return Err(Error::InvalidParameter(format!(
            "quantizer resolution must be in 1..={MAX_BITS} bits, got {bits}"
        )));
    }
    if !(extent > 0.0) || !extent.is_finite() {
        return Err(Error::DegenerateExtent(extent));
    }
    Ok(())
}

fn cells_from(boundaries: &[f64], levels: &[f64]) -> Vec<Cell> {
    debug_assert_eq!(boundaries.len() + 1, levels.len());
    levels
        .iter()
        .enumerate()
        .map(|(i, &level)| Cell {
            lower: if i == 0 { f64::NEG_INFINITY } else { boundaries[i - 1] },
            upper: boundaries.get(i).copied().unwrap_or(f64::INFINITY),
            level,
        })
        .collect()
}

impl Quantizer {
    pub fn new(kind: QuantizerKind, bits: u32, extent: f64) -> Result<Self> {
        match kind {
            QuantizerKind::Uniform => Self::uniform(bits, extent),
            QuantizerKind::Power(p) => Self::nonuniform(bits, extent, p),
        }
    }

    pub fn uniform(bits: u32, extent: f64) -> Result<Self> {
        check_args(bits, extent)?;
        let denom = ((1u64 << bits) - 1) as f64;
        let half = (1i64 << (bits - 1)) - 1;
        // ζ changes at y = X·2k/(2^b-1); levels (2ζ+1)/(2^b-1) between the clips.
        let boundaries: Vec<f64> = (-half..=half)
            .map(|k| extent * (2 * k) as f64 / denom)
            .collect();
        let mut levels = Vec::with_capacity(1 << bits);
        levels.push(-1.0);
        levels.extend((-half..half).map(|z| (2 * z + 1) as f64 / denom));
        levels.push(1.0);
        Ok(Self {
            bits,
            extent,
            kind: QuantizerKind::Uniform,
            cells: cells_from(&boundaries, &levels),
        })
    }

    pub fn nonuniform(bits: u32, extent: f64, p: f64) -> Result<Self> {
        check_args(bits, extent)?;
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "non-uniform exponent p must be finite and >= 1, got {p}"
            )));
        }
        let denom = ((1u64 << bits) - 1) as f64;
        let half = (1usize << (bits - 1)) - 1;
        let positive: Vec<f64> = (1..=half)
            .map(|k| extent * (2.0 * k as f64 / denom).powf(p))
            .collect();
        let positive_levels: Vec<f64> = (0..half)
            .map(|z| 0.5 * ((2.0 * z as f64 / denom).powf(p) + (2.0 * (z + 1) as f64 / denom).powf(p)))
            .chain(std::iter::once(1.0))
            .collect();

        let mut boundaries: Vec<f64> = positive.iter().rev().map(|b| -b).collect();
        boundaries.push(0.0);
        boundaries.extend_from_slice(&positive);
        let mut levels: Vec<f64> = positive_levels.iter().rev().map(|l| -l).collect();
        levels.extend_from_slice(&positive_levels);
        Ok(Self {
            bits,
            extent,
            kind: QuantizerKind::Power(p),
            cells: cells_from(&boundaries, &levels),
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn kind(&self) -> QuantizerKind {
        self.kind
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Finite cell boundaries in increasing order.
    pub fn boundaries(&self) -> Vec<f64> {
        self.cells[1..].iter().map(|c| c.lower).collect()
    }

    pub fn levels(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.level).collect()
    }

    /// Index of the cell containing `y`.
    pub fn cell_index(&self, y: f64) -> usize {
        // First cell whose upper bound exceeds y; the last upper is +∞.
        self.cells.partition_point(|c| c.upper <= y)
    }

    pub fn quantize(&self, y: f64) -> f64 {
        self.cells[self.cell_index(y)].level
    }

    /// The interval `[lower, upper)` that maps to the given level index.
    pub fn preimage(&self, index: usize) -> Result<(f64, f64)> {
        self.cells
            .get(index)
            .map(|c| (c.lower, c.upper))
            .ok_or(Error::IndexOutOfRange {
                index,
                len: self.cells.len(),
            })
    }

    /// Writes `lower,upper,level` rows with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "lower,upper,level")?;
        for c in &self.cells {
            writeln!(
                out,
                "{},{},{}",
                crate::report::fmt_sig(c.lower),
                crate::report::fmt_sig(c.upper),
                crate::report::fmt_sig(c.level)
            )?;
        }
        Ok(())
    }
}

/// Quantizer family and resolution, instantiated once the sum-set extents
/// of a particular input pair are known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerSpec {
    pub kind: QuantizerKind,
    pub bits: u32,
}

impl QuantizerSpec {
    pub fn new(kind: QuantizerKind, bits: u32) -> Self {
        Self { kind, bits }
    }

    pub fn uniform(bits: u32) -> Self {
        Self::new(QuantizerKind::Uniform, bits)
    }

    pub fn with_kind(self, kind: QuantizerKind) -> Self {
        Self { kind, ..self }
    }

    pub fn complex(&self, extents: Extents) -> Result<ComplexQuantizer> {
        Ok(ComplexQuantizer::new(
            Quantizer::new(self.kind, self.bits, extents.in_phase)?,
            Quantizer::new(self.kind, self.bits, extents.quadrature)?,
        ))
    }
}

/// Product of two scalar quantizers acting on the real and imaginary parts.
///
/// Output index `k = i·2^{b_Q} + q` for in-phase cell `i` and quadrature cell `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexQuantizer {
    pub in_phase: Quantizer,
    pub quadrature: Quantizer,
}

impl ComplexQuantizer {
    pub fn new(in_phase: Quantizer, quadrature: Quantizer) -> Self {
        Self {
            in_phase,
            quadrature,
        }
    }

    pub fn output_count(&self) -> usize {
        self.in_phase.len() * self.quadrature.len()
    }

    pub fn output_index(&self, in_phase_index: usize, quadrature_index: usize) -> usize {
        in_phase_index * self.quadrature.len() + quadrature_index
    }

    pub fn output_levels(&self) -> Vec<num_complex::Complex64> {
        self.in_phase
            .cells()
            .iter()
            .flat_map(|i| {
                self.quadrature
                    .cells()
                    .iter()
                    .map(move |q| num_complex::Complex64::new(i.level, q.level))
            })
            .collect()
    }

    pub fn quantize(&self, y: num_complex::Complex64) -> usize {
        self.output_index(self.in_phase.cell_index(y.re), self.quadrature.cell_index(y.im))
    }
}
