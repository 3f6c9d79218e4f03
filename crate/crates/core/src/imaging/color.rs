use std::sync::LazyLock;

use super::Image;
use crate::{Error, Result};

/// BT.601 full-range RGB → YUV (`U`, `V` centered on zero).
const RGB_TO_YUV: [[f64; 3]; 3] = [
    [0.299, 0.587, 0.114],
    [-0.168_736, -0.331_264, 0.5],
    [0.5, -0.418_688, -0.081_312],
];

static YUV_TO_RGB: LazyLock<[[f64; 3]; 3]> = LazyLock::new(|| invert3(&RGB_TO_YUV));

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let cof =
        |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let det = m[0][0] * cof(1, 2, 1, 2) - m[0][1] * cof(1, 2, 0, 2) + m[0][2] * cof(1, 2, 0, 1);
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    adj.map(|row| row.map(|v| v / det))
}

fn apply(img: &Image, m: &[[f64; 3]; 3]) -> Result<Image> {
    if img.channels() != 3 {
        return Err(Error::Channels {
            expected: 3,
            found: img.channels(),
        });
    }
    let mut data = Vec::with_capacity(img.data().len());
    for px in img.data().chunks_exact(3) {
        for row in m {
            data.push(row[0] * px[0] + row[1] * px[1] + row[2] * px[2]);
        }
    }
    Image::new(img.width(), img.height(), 3, data)
}

pub fn rgb_to_yuv(img: &Image) -> Result<Image> {
    apply(img, &RGB_TO_YUV)
}

pub fn yuv_to_rgb(img: &Image) -> Result<Image> {
    apply(img, &YUV_TO_RGB)
}

/// The `Y` plane of an RGB image, or a copy of a grayscale one.
pub fn luma(img: &Image) -> Image {
    if img.channels() == 1 {
        return img.clone();
    }
    let [r, g, b] = RGB_TO_YUV[0];
    let data = img
        .data()
        .chunks_exact(3)
        .map(|px| r * px[0] + g * px[1] + b * px[2])
        .collect();
    Image::gray(img.width(), img.height(), data).expect("finite input")
}
