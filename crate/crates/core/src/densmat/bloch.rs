use super::DensityMatrix;
use crate::error::{Error, Result};

/// Point in the Bloch ball for a 2×2 density `½(I + xX + yY + zZ)`.
///
/// Real symmetric densities always have `y = 0`, so they live in the `xz`
/// disc. Diagonal densities sit on the `z` axis; pure states sit on the
/// unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    /// For `ρ = [[a, b], [b, 1−a]]` returns `(2b, 0, 2a−1)`.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::WrongDimension(rho.dim()));
        }
        let a = rho.entry(0, 0);
        let d = rho.entry(1, 1);
        let b = rho.entry(0, 1);
        Ok(Self {
            x: 2.0 * b,
            y: 0.0,
            z: a - d,
        })
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

fn sweep_grid(points: usize) -> Result<impl Iterator<Item = (usize, f64)>> {
    if points < 2 {
        return Err(Error::InvalidConfig(format!("a sweep needs at least 2 points, got {points}")));
    }
    Ok((0..points).map(move |k| (k, k as f64 / (points - 1) as f64)))
}

/// `diag(θ, 1−θ)` for `points` evenly spaced `θ ∈ [0, 1]`: the `z` axis.
pub fn diagonal_sweep(points: usize) -> Result<Vec<(String, DensityMatrix)>> {
    sweep_grid(points)?
        .map(|(k, theta)| {
            let rho = DensityMatrix::diagonal_density(&[theta, 1.0 - theta])?;
            Ok((format!("diagonal-{k}"), rho))
        })
        .collect()
}

/// Pure states on `(cos t, sin t)` for `points` evenly spaced
/// `t ∈ [0, π/2]`: the arc of the unit circle with `x ≥ 0`.
pub fn pure_positive_sweep(points: usize) -> Result<Vec<(String, DensityMatrix)>> {
    sweep_grid(points)?
        .map(|(k, s)| {
            let t = s * std::f64::consts::FRAC_PI_2;
            let rho = DensityMatrix::pure_state(&[t.cos(), t.sin().max(0.0)])?;
            Ok((format!("pure-positive-{k}"), rho))
        })
        .collect()
}
