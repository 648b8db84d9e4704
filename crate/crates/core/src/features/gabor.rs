//! Gabor filter bank and the max-response texture value of a square block.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Side of the square blocks texture is measured on.
pub const TEXTURE_BLOCK_SIDE: usize = 64;

/// How the second rotated coordinate is formed.
///
/// `Sheared` uses `y' = -x sin(theta) + y`; `Standard` uses `y' = -x sin(theta) + y cos(theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaborRotation {
    #[default]
    Sheared,
    Standard,
}

impl std::str::FromStr for GaborRotation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sheared" => Ok(GaborRotation::Sheared),
            "standard" => Ok(GaborRotation::Standard),
            other => Err(Error::InvalidArgument(format!("unknown Gabor rotation {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaborBank<T: Real> {
    pub orientations: Vec<T>,
    pub gamma: T,
    pub sigma: T,
    pub wavelength: T,
    pub kernel_side: usize,
    pub rotation: GaborRotation,
}

impl<T: Real> Default for GaborBank<T> {
    /// Four orientations at 45 degree spacing, gamma 0.5, sigma 4, wavelength 8, 17x17 kernel.
    fn default() -> Self {
        Self {
            orientations: [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0]
                .into_iter()
                .map(T::lit)
                .collect(),
            gamma: T::lit(0.5),
            sigma: T::lit(4.0),
            wavelength: T::lit(8.0),
            kernel_side: 17,
            rotation: GaborRotation::Sheared,
        }
    }
}

impl<T: Real> GaborBank<T> {
    pub fn validate(&self) -> Result<()> {
        if self.orientations.is_empty() {
            return Err(Error::InvalidArgument("Gabor bank needs at least one orientation".into()));
        }
        if !(self.sigma > T::zero()) || !(self.wavelength > T::zero()) {
            return Err(Error::InvalidArgument(
                "Gabor sigma and wavelength must be positive".into(),
            ));
        }
        if self.kernel_side % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "Gabor kernel side must be odd, got {}",
                self.kernel_side
            )));
        }
        Ok(())
    }
}

/// Kernel sampled on integer offsets from the center; element `(row, col)` sits at
/// `y = row - half`, `x = col - half`.
pub fn gabor_kernel<T: Real>(theta: T, bank: &GaborBank<T>) -> DMatrix<T> {
    let side = bank.kernel_side;
    let half = (side / 2) as isize;
    let (sin, cos) = (theta.sin(), theta.cos());
    let two = T::lit(2.0);
    let two_pi = T::two_pi();
    DMatrix::from_fn(side, side, |row, col| {
        let y = T::lit((row as isize - half) as f64);
        let x = T::lit((col as isize - half) as f64);
        let xr = x * cos + y * sin;
        let yr = match bank.rotation {
            GaborRotation::Sheared => -x * sin + y,
            GaborRotation::Standard => -x * sin + y * cos,
        };
        let envelope = ((xr * xr + bank.gamma * bank.gamma * yr * yr) / (-two * bank.sigma * bank.sigma)).exp();
        envelope * (two_pi * xr / bank.wavelength).cos()
    })
}

/// Same-size 2-D convolution with zero padding outside the input.
pub fn convolve_same<T: Real>(input: &DMatrix<T>, kernel: &DMatrix<T>) -> DMatrix<T> {
    let (rows, cols) = input.shape();
    let (kr, kc) = kernel.shape();
    let (hr, hc) = ((kr / 2) as isize, (kc / 2) as isize);
    DMatrix::from_fn(rows, cols, |r, c| {
        let mut acc = T::zero();
        for i in 0..kr {
            let rr = r as isize + hr - i as isize;
            if rr < 0 || rr >= rows as isize {
                continue;
            }
            for j in 0..kc {
                let cc = c as isize + hc - j as isize;
                if cc < 0 || cc >= cols as isize {
                    continue;
                }
                acc += kernel[(i, j)] * input[(rr as usize, cc as usize)];
            }
        }
        acc
    })
}

/// Element-wise maximum over all orientation responses.
pub fn max_response<T: Real>(block: &DMatrix<T>, bank: &GaborBank<T>) -> DMatrix<T> {
    let mut fr: Option<DMatrix<T>> = None;
    for &theta in &bank.orientations {
        let response = convolve_same(block, &gabor_kernel(theta, bank));
        fr = Some(match fr {
            None => response,
            Some(acc) => acc.zip_map(&response, |a, b| if b > a { b } else { a }),
        });
    }
    fr.unwrap_or_else(|| DMatrix::zeros(block.nrows(), block.ncols()))
}

/// Mean of the max-response map over a 64x64 block.
pub fn texture_value<T: Real>(block: &DMatrix<T>, bank: &GaborBank<T>) -> Result<T> {
    bank.validate()?;
    if block.shape() != (TEXTURE_BLOCK_SIDE, TEXTURE_BLOCK_SIDE) {
        return Err(Error::DimensionMismatch(format!(
            "texture block must be {0}x{0}, got {1}x{2}",
            TEXTURE_BLOCK_SIDE,
            block.nrows(),
            block.ncols()
        )));
    }
    let fr = max_response(block, bank);
    Ok(fr.sum() / T::from_count(fr.len()))
}
