//! sRGB to CIEXYZ to CIELAB conversion and palette quantization.

use serde::{Deserialize, Serialize};

use super::Modality;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Linear sRGB to CIEXYZ matrix, row-major.
pub const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124, 0.3576, 0.1805],
    [0.2126, 0.7152, 0.0722],
    [0.0193, 0.1192, 0.9505],
];

/// Breakpoint between the cube-root and linear branches of the LAB transfer function.
pub const LAB_EPSILON: f64 = 0.008856;

/// Default L coefficient; the CIE value is 116.
pub const LAB_L_COEFFICIENT_DEFAULT: f64 = 166.0;
pub const LAB_L_COEFFICIENT_CIE: f64 = 116.0;

pub fn rgb_to_xyz<T: Real>(rgb: [T; 3]) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for (row, coeffs) in out.iter_mut().zip(RGB_TO_XYZ.iter()) {
        *row = T::lit(coeffs[0]) * rgb[0] + T::lit(coeffs[1]) * rgb[1] + T::lit(coeffs[2]) * rgb[2];
    }
    out
}

/// The white point obtained by mapping sRGB (1, 1, 1) through [`RGB_TO_XYZ`].
pub fn default_white<T: Real>() -> [T; 3] {
    rgb_to_xyz([T::one(); 3])
}

/// LAB transfer function: cube root above [`LAB_EPSILON`], linear below.
pub fn lab_f<T: Real>(x: T) -> T {
    if x > T::lit(LAB_EPSILON) {
        x.cbrt()
    } else {
        T::lit(7.787) * x + T::lit(16.0 / 116.0)
    }
}

pub fn xyz_to_lab<T: Real>(xyz: [T; 3], white: [T; 3], l_coefficient: T) -> Result<[T; 3]> {
    if white.iter().any(|w| !(*w > T::zero())) {
        return Err(Error::InvalidArgument(format!(
            "white point components must be positive, got {:?}",
            white
        )));
    }
    let fx = lab_f(xyz[0] / white[0]);
    let fy = lab_f(xyz[1] / white[1]);
    let fz = lab_f(xyz[2] / white[2]);
    Ok([
        l_coefficient * fy - T::lit(16.0),
        T::lit(500.0) * (fx - fy),
        T::lit(200.0) * (fy - fz),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaletteEntry {
    pub name: String,
    #[serde(rename = "L")]
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

/// Ordered set of reference LAB colors for one modality.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorPalette {
    pub modality: Modality,
    pub entries: Vec<PaletteEntry>,
}

impl ColorPalette {
    pub fn new(modality: Modality, entries: Vec<PaletteEntry>) -> Result<Self> {
        let expected = modality.palette_size();
        if entries.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "{} palette needs {} entries, got {}",
                modality,
                expected,
                entries.len()
            )));
        }
        for (i, e) in entries.iter().enumerate() {
            if entries[..i].iter().any(|p| p.name == e.name) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate palette entry name {:?}",
                    e.name
                )));
            }
            if !(e.l.is_finite() && e.a.is_finite() && e.b.is_finite()) {
                return Err(Error::NonFinite(format!("palette entry {:?}", e.name)));
            }
        }
        Ok(Self { modality, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Fraction of pixels whose nearest palette color (Euclidean in LAB) is each entry.
///
/// Ties go to the lowest palette index.
pub fn quantize_colors<T: Real>(pixels: &[[T; 3]], palette: &[PaletteEntry]) -> Result<Vec<T>> {
    if pixels.is_empty() {
        return Err(Error::EmptyColorRegion);
    }
    if palette.is_empty() {
        return Err(Error::InvalidArgument("palette is empty".into()));
    }
    let refs: Vec<[T; 3]> = palette
        .iter()
        .map(|e| [T::lit(e.l), T::lit(e.a), T::lit(e.b)])
        .collect();
    let mut counts = vec![0usize; refs.len()];
    for px in pixels {
        let mut best = 0;
        let mut best_d = T::max_value().unwrap_or_else(T::one);
        for (j, r) in refs.iter().enumerate() {
            let d = (px[0] - r[0]).powi(2) + (px[1] - r[1]).powi(2) + (px[2] - r[2]).powi(2);
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        counts[best] += 1;
    }
    let total = T::from_count(pixels.len());
    Ok(counts.into_iter().map(|c| T::from_count(c) / total).collect())
}
