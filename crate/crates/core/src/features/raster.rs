//! Image and mask containers plus PPM/PGM loading.

use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major sRGB image with channels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage<T: Real> {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[T; 3]>,
}

impl<T: Real> RgbImage<T> {
    pub fn new(width: usize, height: usize, pixels: Vec<[T; 3]>) -> Result<Self> {
        if width * height != pixels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} image needs {} pixels, got {}",
                width,
                height,
                width * height,
                pixels.len()
            )));
        }
        if pixels
            .iter()
            .flatten()
            .any(|c| !(*c >= T::zero() && *c <= T::one()))
        {
            return Err(Error::InvalidArgument("image channels must lie in [0, 1]".into()));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> [T; 3]) -> Result<Self> {
        let pixels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, pixels)
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [T; 3] {
        self.pixels[y * self.width + x]
    }

    /// Loads a binary P6 PPM, dividing each channel by 255.
    pub fn load_ppm(path: &Path) -> Result<Self> {
        let img = image::ImageReader::open(path)
            .map_err(|e| Error::io(path, e))?
            .with_guessed_format()
            .map_err(|e| Error::io(path, e))?
            .decode()
            .map_err(|e| Error::format(path, e))?
            .into_rgb8();
        let (w, h) = img.dimensions();
        let scale = T::lit(255.0);
        let pixels = img
            .pixels()
            .map(|p| p.0.map(|c| T::from_count(c as usize) / scale))
            .collect();
        Self::new(w as usize, h as usize, pixels)
    }
}

/// Row-major boolean mask; `true` marks foreground.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    pub width: usize,
    pub height: usize,
    pub values: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, values: Vec<bool>) -> Result<Self> {
        if width * height != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} mask needs {} values, got {}",
                width,
                height,
                width * height,
                values.len()
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let values = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self {
            width,
            height,
            values,
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.values[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.values.iter().filter(|v| **v).count()
    }

    /// Foreground coordinates `(x, y)` in row-major order.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v)
            .map(move |(i, _)| (i % self.width, i / self.width))
    }

    pub fn mirrored(&self) -> Self {
        Self::from_fn(self.width, self.height, |x, y| self.get(self.width - 1 - x, y))
    }

    pub fn union(&self, other: &BinaryMask) -> Result<Self> {
        if (self.width, self.height) != (other.width, other.height) {
            return Err(Error::DimensionMismatch("masks differ in size".into()));
        }
        Ok(Self::from_fn(self.width, self.height, |x, y| {
            self.get(x, y) || other.get(x, y)
        }))
    }

    /// Loads a binary P5 PGM; zero is background, anything else foreground.
    pub fn load_pgm(path: &Path) -> Result<Self> {
        let img = image::ImageReader::open(path)
            .map_err(|e| Error::io(path, e))?
            .with_guessed_format()
            .map_err(|e| Error::io(path, e))?
            .decode()
            .map_err(|e| Error::format(path, e))?
            .into_luma8();
        let (w, h) = img.dimensions();
        let values = img.pixels().map(|p| p.0[0] != 0).collect();
        Self::new(w as usize, h as usize, values)
    }
}

/// Copies a `side x side` window whose top-left corner is `(x, y)`.
pub fn crop<T: Real>(channel: &DMatrix<T>, x: usize, y: usize, side: usize) -> DMatrix<T> {
    channel.view((y, x), (side, side)).clone_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn ppm_and_pgm_load() {
        let dir = tempfile::tempdir().unwrap();
        let ppm = dir.path().join("a.ppm");
        let mut f = std::fs::File::create(&ppm).unwrap();
        f.write_all(b"P6\n2 1\n255\n").unwrap();
        f.write_all(&[255, 0, 51, 0, 255, 0]).unwrap();
        drop(f);
        let img = RgbImage::<f64>::load_ppm(&ppm).unwrap();
        assert_eq!((img.width, img.height), (2, 1));
        assert_eq!(img.pixel(0, 0), [1.0, 0.0, 0.2]);
        assert_eq!(img.pixel(1, 0), [0.0, 1.0, 0.0]);

        let pgm = dir.path().join("m.pgm");
        let mut f = std::fs::File::create(&pgm).unwrap();
        f.write_all(b"P5\n3 1\n255\n").unwrap();
        f.write_all(&[0, 7, 255]).unwrap();
        drop(f);
        let mask = BinaryMask::load_pgm(&pgm).unwrap();
        assert_eq!(mask.values, vec![false, true, true]);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = RgbImage::<f64>::load_ppm(Path::new("/nonexistent/x.ppm")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/x.ppm"));
    }

    #[test]
    fn out_of_range_channel_rejected() {
        assert!(RgbImage::new(1, 1, vec![[1.5, 0.0, 0.0]]).is_err());
        assert!(RgbImage::new(2, 1, vec![[0.5, 0.0, 0.0]]).is_err());
    }
}
