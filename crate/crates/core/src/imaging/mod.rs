//! Image containers, color conversion, Gaussian filtering, resampling and
//! file I/O.

mod buffer;
mod color;
mod io;
mod kernel;
mod resample;

pub use buffer::{Image, ScaleFactor};
pub use color::{luma, rgb_to_yuv, yuv_to_rgb};
pub use io::{load_image, save_image, save_image_with_depth, BitDepth};
pub use kernel::{convolve, convolve_transpose, GaussianKernel};
pub use resample::{
    bicubic_resize, blur_downsample, blur_downsample_transpose, downsample, upsample_zerofill,
};
