//! Shape descriptors computed from binary masks.

use std::collections::VecDeque;

use super::raster::BinaryMask;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const TONGUE_GEOMETRY_LEN: usize = 13;
pub const SUBLINGUAL_GEOMETRY_LEN: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct BoundingBox {
    min_x: usize,
    max_x: usize,
    min_y: usize,
    max_y: usize,
}

impl BoundingBox {
    fn width(&self) -> usize {
        self.max_x - self.min_x + 1
    }

    fn height(&self) -> usize {
        self.max_y - self.min_y + 1
    }
}

fn bounding_box(mask: &BinaryMask) -> Option<BoundingBox> {
    mask.foreground().fold(None, |acc, (x, y)| {
        Some(match acc {
            None => BoundingBox {
                min_x: x,
                max_x: x,
                min_y: y,
                max_y: y,
            },
            Some(b) => BoundingBox {
                min_x: b.min_x.min(x),
                max_x: b.max_x.max(x),
                min_y: b.min_y.min(y),
                max_y: b.max_y.max(y),
            },
        })
    })
}

/// Number of 8-connected foreground components.
pub fn component_count(mask: &BinaryMask) -> usize {
    let (w, h) = (mask.width, mask.height);
    let mut seen = vec![false; mask.values.len()];
    let mut queue = VecDeque::new();
    let mut components = 0;
    for start in 0..mask.values.len() {
        if !mask.values[start] || seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if mask.values[j] && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    components
}

/// Thirteen tongue shape features, in order: width, length, length-width ratio,
/// smaller half-distance, center distance, center distance ratio, area, circle area,
/// circle area ratio, square area, square area ratio, triangle area, triangle area ratio.
///
/// Width and length are the bounding-box extents. The circle is the one inscribed in
/// the bounding box, the square has the longer extent as side, and the triangle has the
/// box's width as base and length as height. Center distance runs from the box center
/// to the foreground centroid. Every ratio is `area / shape area` or a distance over length.
pub fn tongue_geometry<T: Real>(mask: &BinaryMask) -> Result<Vec<T>> {
    let bbox = bounding_box(mask).ok_or_else(|| Error::EmptyMask("tongue mask".into()))?;
    let components = component_count(mask);
    if components != 1 {
        return Err(Error::DisconnectedMask { components });
    }

    let width = T::from_count(bbox.width());
    let length = T::from_count(bbox.height());
    let two = T::lit(2.0);
    let area_count = mask.count();
    let area = T::from_count(area_count);

    let (sx, sy) = mask
        .foreground()
        .fold((0usize, 0usize), |(sx, sy), (x, y)| (sx + x, sy + y));
    let cx = T::from_count(sx) / area;
    let cy = T::from_count(sy) / area;
    let bx = T::from_count(bbox.min_x + bbox.max_x) / two;
    let by = T::from_count(bbox.min_y + bbox.max_y) / two;
    let center_distance = ((cx - bx).powi(2) + (cy - by).powi(2)).sqrt();

    let short = width.min(length);
    let long = width.max(length);
    let circle = T::pi() * (short / two).powi(2);
    let square = long * long;
    let triangle = width * length / two;

    Ok(vec![
        width,
        length,
        length / width,
        short / two,
        center_distance,
        center_distance / length,
        area,
        circle,
        area / circle,
        square,
        area / square,
        triangle,
        area / triangle,
    ])
}

/// Length, width and length ratio of each side vein, left side first.
///
/// Length is the larger bounding-box extent, width the smaller, and the ratio is
/// length over image height.
pub fn sublingual_geometry<T: Real>(left: &BinaryMask, right: &BinaryMask) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(SUBLINGUAL_GEOMETRY_LEN);
    for (side, mask) in [("left", left), ("right", right)] {
        let bbox =
            bounding_box(mask).ok_or_else(|| Error::EmptyMask(format!("{side} vein mask")))?;
        let major = bbox.width().max(bbox.height());
        let minor = bbox.width().min(bbox.height());
        out.push(T::from_count(major));
        out.push(T::from_count(minor));
        out.push(T::from_count(major) / T::from_count(mask.height));
    }
    Ok(out)
}
