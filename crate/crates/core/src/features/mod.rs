//! Per-modality feature extraction: color ratios, Gabor texture and shape geometry.

pub mod color;
pub mod gabor;
pub mod geometry;
pub mod raster;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use self::color::{
    default_white, quantize_colors, rgb_to_xyz, xyz_to_lab, ColorPalette, PaletteEntry,
};
pub use self::gabor::{gabor_kernel, texture_value, GaborBank, GaborRotation};
pub use self::geometry::{sublingual_geometry, tongue_geometry};
pub use self::raster::{BinaryMask, RgbImage};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Tongue,
    Face,
    Sublingual,
}

/// Lengths of the color, texture and geometry parts of one modality's vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureLayout {
    pub color: usize,
    pub texture: usize,
    pub geometry: usize,
}

impl FeatureLayout {
    pub fn total(&self) -> usize {
        self.color + self.texture + self.geometry
    }
}

impl Modality {
    pub const ALL: [Modality; 3] = [Modality::Tongue, Modality::Face, Modality::Sublingual];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Modality::Tongue => "tongue",
            Modality::Face => "face",
            Modality::Sublingual => "sublingual",
        }
    }

    pub fn palette_size(self) -> usize {
        match self {
            Modality::Tongue => 12,
            Modality::Face | Modality::Sublingual => 6,
        }
    }

    /// Number of 64x64 texture blocks; zero when the modality has no texture part.
    pub fn block_count(self) -> usize {
        match self {
            Modality::Tongue => 8,
            Modality::Face => 4,
            Modality::Sublingual => 0,
        }
    }

    pub fn layout(self) -> FeatureLayout {
        match self {
            Modality::Tongue => FeatureLayout {
                color: 12,
                texture: 9,
                geometry: 13,
            },
            Modality::Face => FeatureLayout {
                color: 24,
                texture: 5,
                geometry: 0,
            },
            Modality::Sublingual => FeatureLayout {
                color: 6,
                texture: 0,
                geometry: 6,
            },
        }
    }

    pub fn dimension(self) -> usize {
        self.layout().total()
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tongue" => Ok(Modality::Tongue),
            "face" => Ok(Modality::Face),
            "sublingual" => Ok(Modality::Sublingual),
            other => Err(Error::InvalidArgument(format!("unknown modality {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalFeatureVector<T: Real> {
    pub modality: Modality,
    pub values: Vec<T>,
}

/// Concatenates color, texture and geometry parts in that order after checking
/// each part against the modality's layout.
pub fn assemble_modal_vector<T: Real>(
    color: &[T],
    texture: Option<&[T]>,
    geometry: Option<&[T]>,
    modality: Modality,
) -> Result<ModalFeatureVector<T>> {
    let layout = modality.layout();
    let texture = texture.unwrap_or(&[]);
    let geometry = geometry.unwrap_or(&[]);
    for (name, part, expected) in [
        ("color", color, layout.color),
        ("texture", texture, layout.texture),
        ("geometry", geometry, layout.geometry),
    ] {
        if part.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{modality} {name} part must have length {expected}, got {}",
                part.len()
            )));
        }
    }
    let tol = T::lit(1e-9).max(T::default_epsilon() * T::lit(1e3));
    for chunk in color.chunks(modality.palette_size()) {
        if chunk.iter().any(|c| *c < T::zero() || *c > T::one()) {
            return Err(Error::InvalidArgument(format!(
                "{modality} color ratios must lie in [0, 1]"
            )));
        }
        let sum = chunk.iter().fold(T::zero(), |acc, c| acc + *c);
        if (sum - T::one()).abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "{modality} color ratios must sum to 1, got {sum}"
            )));
        }
    }
    let values = color.iter().chain(texture).chain(geometry).copied().collect();
    Ok(ModalFeatureVector { modality, values })
}

/// Top-left corners of square texture blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub side: usize,
    pub blocks: Vec<[usize; 2]>,
}

impl BlockSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::format(path, e))
    }

    pub fn validate(&self, width: usize, height: usize, expected_blocks: usize) -> Result<()> {
        if self.side != gabor::TEXTURE_BLOCK_SIDE {
            return Err(Error::InvalidArgument(format!(
                "block side must be {}, got {}",
                gabor::TEXTURE_BLOCK_SIDE,
                self.side
            )));
        }
        if self.blocks.len() != expected_blocks {
            return Err(Error::InvalidArgument(format!(
                "expected {expected_blocks} blocks, got {}",
                self.blocks.len()
            )));
        }
        for (index, &[x, y]) in self.blocks.iter().enumerate() {
            if x + self.side > width || y + self.side > height {
                return Err(Error::BlockOutOfBounds {
                    index,
                    x,
                    y,
                    side: self.side,
                    width,
                    height,
                });
            }
        }
        Ok(())
    }
}

pub fn load_palette(path: &Path, modality: Modality) -> Result<ColorPalette> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let entries: Vec<PaletteEntry> =
        serde_json::from_str(&text).map_err(|e| Error::format(path, e))?;
    ColorPalette::new(modality, entries).map_err(|e| Error::format(path, e))
}

/// Settings shared by every extraction pipeline.
#[derive(Debug, Clone)]
pub struct FeatureOptions<T: Real> {
    pub white: [T; 3],
    pub lab_l_coefficient: T,
    pub bank: GaborBank<T>,
}

impl<T: Real> Default for FeatureOptions<T> {
    fn default() -> Self {
        Self {
            white: default_white(),
            lab_l_coefficient: T::lit(color::LAB_L_COEFFICIENT_DEFAULT),
            bank: GaborBank::default(),
        }
    }
}

fn to_lab<T: Real>(rgb: [T; 3], opts: &FeatureOptions<T>) -> Result<[T; 3]> {
    xyz_to_lab(rgb_to_xyz(rgb), opts.white, opts.lab_l_coefficient)
}

/// LAB L channel of the whole image as a `height x width` matrix.
pub fn luminance<T: Real>(image: &RgbImage<T>, opts: &FeatureOptions<T>) -> Result<DMatrix<T>> {
    let mut out = DMatrix::zeros(image.height, image.width);
    for y in 0..image.height {
        for x in 0..image.width {
            out[(y, x)] = to_lab(image.pixel(x, y), opts)?[0];
        }
    }
    Ok(out)
}

fn region_lab<T: Real>(
    image: &RgbImage<T>,
    pixels: impl Iterator<Item = (usize, usize)>,
    opts: &FeatureOptions<T>,
) -> Result<Vec<[T; 3]>> {
    pixels.map(|(x, y)| to_lab(image.pixel(x, y), opts)).collect()
}

fn check_mask_size<T: Real>(image: &RgbImage<T>, mask: &BinaryMask) -> Result<()> {
    if (image.width, image.height) != (mask.width, mask.height) {
        return Err(Error::DimensionMismatch(format!(
            "mask is {}x{} but image is {}x{}",
            mask.width, mask.height, image.width, image.height
        )));
    }
    Ok(())
}

fn block_textures<T: Real>(
    image: &RgbImage<T>,
    blocks: &BlockSpec,
    opts: &FeatureOptions<T>,
    modality: Modality,
) -> Result<Vec<T>> {
    blocks.validate(image.width, image.height, modality.block_count())?;
    let lum = luminance(image, opts)?;
    let mut values = blocks
        .blocks
        .iter()
        .map(|&[x, y]| texture_value(&raster::crop(&lum, x, y, blocks.side), &opts.bank))
        .collect::<Result<Vec<T>>>()?;
    let mean = values.iter().fold(T::zero(), |a, v| a + *v) / T::from_count(values.len());
    values.push(mean);
    Ok(values)
}

/// Eight tongue block texture values followed by their mean.
pub fn tongue_texture<T: Real>(
    image: &RgbImage<T>,
    blocks: &BlockSpec,
    opts: &FeatureOptions<T>,
) -> Result<Vec<T>> {
    block_textures(image, blocks, opts, Modality::Tongue)
}

/// Four face block texture values followed by their mean.
pub fn face_texture<T: Real>(
    image: &RgbImage<T>,
    blocks: &BlockSpec,
    opts: &FeatureOptions<T>,
) -> Result<Vec<T>> {
    block_textures(image, blocks, opts, Modality::Face)
}

pub fn extract_tongue<T: Real>(
    image: &RgbImage<T>,
    mask: &BinaryMask,
    palette: &ColorPalette,
    blocks: &BlockSpec,
    opts: &FeatureOptions<T>,
) -> Result<ModalFeatureVector<T>> {
    check_mask_size(image, mask)?;
    let lab = region_lab(image, mask.foreground(), opts)?;
    let color = quantize_colors(&lab, &palette.entries)?;
    let texture = tongue_texture(image, blocks, opts)?;
    let geometry = tongue_geometry(mask)?;
    assemble_modal_vector(&color, Some(&texture), Some(&geometry), Modality::Tongue)
}

/// Face color is quantized per block, giving one palette histogram per block.
pub fn extract_face<T: Real>(
    image: &RgbImage<T>,
    palette: &ColorPalette,
    blocks: &BlockSpec,
    opts: &FeatureOptions<T>,
) -> Result<ModalFeatureVector<T>> {
    blocks.validate(image.width, image.height, Modality::Face.block_count())?;
    let side = blocks.side;
    let mut color = Vec::with_capacity(Modality::Face.layout().color);
    for &[bx, by] in &blocks.blocks {
        let coords = (by..by + side).flat_map(|y| (bx..bx + side).map(move |x| (x, y)));
        let lab = region_lab(image, coords, opts)?;
        color.extend(quantize_colors(&lab, &palette.entries)?);
    }
    let texture = face_texture(image, blocks, opts)?;
    assemble_modal_vector(&color, Some(&texture), None, Modality::Face)
}

/// Color is measured over the union of both vein masks.
pub fn extract_sublingual<T: Real>(
    image: &RgbImage<T>,
    left: &BinaryMask,
    right: &BinaryMask,
    palette: &ColorPalette,
    opts: &FeatureOptions<T>,
) -> Result<ModalFeatureVector<T>> {
    check_mask_size(image, left)?;
    check_mask_size(image, right)?;
    let both = left.union(right)?;
    let lab = region_lab(image, both.foreground(), opts)?;
    let color = quantize_colors(&lab, &palette.entries)?;
    let geometry = sublingual_geometry(left, right)?;
    assemble_modal_vector(&color, None, Some(&geometry), Modality::Sublingual)
}
