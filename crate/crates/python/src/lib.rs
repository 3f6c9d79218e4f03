//! Python bindings. Images cross the boundary as row-major lists of floats
//! in [0, 1], interleaved for color.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use fracsr::config::AlphaMode;
use fracsr::imaging::{bicubic_resize, load_image, save_image};
use fracsr::metrics::{
    glcm_features, rmse, ssim, texture_similarity, DEFAULT_LEVELS, DEFAULT_OFFSET,
};
use fracsr::pipeline::degrade;
use fracsr::{Error, Image, PipelineConfig, ScaleFactor};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } | Error::Format { .. } => PyIOError::new_err(e.to_string()),
        Error::Divergence { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn scale(s: usize) -> PyResult<ScaleFactor> {
    ScaleFactor::new(s).map_err(to_py)
}

#[pyclass(name = "Image", module = "fracsr", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyImage {
    inner: Image,
}

#[pymethods]
impl PyImage {
    #[new]
    #[pyo3(signature = (width, height, data, channels = 1))]
    fn new(width: usize, height: usize, data: Vec<f64>, channels: usize) -> PyResult<Self> {
        Ok(Self {
            inner: Image::new(width, height, channels, data).map_err(to_py)?,
        })
    }

    /// Gray image from a list of equal-length rows.
    #[staticmethod]
    fn from_rows(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(PyValueError::new_err("rows have different lengths"));
        }
        let height = rows.len();
        Self::new(width, height, rows.into_iter().flatten().collect(), 1)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: load_image(path).map_err(to_py)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        save_image(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn channels(&self) -> usize {
        self.inner.channels()
    }

    fn data(&self) -> Vec<f64> {
        self.inner.data().to_vec()
    }

    fn rows(&self) -> PyResult<Vec<Vec<f64>>> {
        self.inner.ensure_gray().map_err(to_py)?;
        Ok(self
            .inner
            .data()
            .chunks(self.inner.width())
            .map(<[f64]>::to_vec)
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Image({}x{}, channels={})",
            self.inner.width(),
            self.inner.height(),
            self.inner.channels()
        )
    }
}

fn wrap(inner: Image) -> PyImage {
    PyImage { inner }
}

#[pyclass(name = "PipelineConfig", module = "fracsr", skip_from_py_object)]
#[derive(Clone, Default)]
pub struct PyPipelineConfig {
    inner: PipelineConfig,
}

#[pymethods]
impl PyPipelineConfig {
    /// Defaults, optionally overridden by `key = value` text.
    #[new]
    #[pyo3(signature = (text = None))]
    fn new(text: Option<&str>) -> PyResult<Self> {
        let inner = match text {
            Some(t) => PipelineConfig::parse(t).map_err(to_py)?,
            None => PipelineConfig::default(),
        };
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: PipelineConfig::load(path).map_err(to_py)?,
        })
    }

    fn set(&mut self, key: &str, value: &str) -> PyResult<()> {
        let mut next = self.inner.clone();
        next.set(key, value).map_err(to_py)?;
        next.validate().map_err(to_py)?;
        self.inner = next;
        Ok(())
    }

    #[getter]
    fn scale(&self) -> usize {
        self.inner.scale.factor()
    }

    #[getter]
    fn alpha(&self) -> Option<f64> {
        match self.inner.alpha_mode {
            AlphaMode::Auto => None,
            AlphaMode::Fixed(a) => Some(a),
        }
    }

    #[getter]
    fn alpha_grid(&self) -> Vec<f64> {
        self.inner.alpha_grid.clone()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// Per-level record returned by [`upscale`].
#[pyclass(name = "LevelReport", module = "fracsr", frozen, get_all)]
pub struct PyLevelReport {
    alpha: f64,
    trace: Vec<(f64, f64)>,
    energies: Vec<f64>,
}

/// `(-1)^j C(alpha, j)` for `j = 0..=n`.
#[pyfunction]
fn gl_coefficients(alpha: f64, n: usize) -> PyResult<Vec<f64>> {
    Ok(fracsr::fracgrad::gl_coefficients(alpha, n)
        .map_err(to_py)?
        .taps()
        .to_vec())
}

/// Super-resolves `image`. Returns the result and one report per ×2 level.
#[pyfunction]
#[pyo3(signature = (image, scale = None, alpha = None, config = None))]
fn upscale(
    py: Python<'_>,
    image: PyRef<'_, PyImage>,
    scale: Option<usize>,
    alpha: Option<f64>,
    config: Option<PyRef<'_, PyPipelineConfig>>,
) -> PyResult<(PyImage, Vec<PyLevelReport>)> {
    let mut cfg = config.map(|c| c.inner.clone()).unwrap_or_default();
    if let Some(s) = scale {
        cfg.scale = self::scale(s)?;
    }
    if let Some(a) = alpha {
        cfg.alpha_mode = AlphaMode::Fixed(a);
    }
    cfg.validate().map_err(to_py)?;
    let img = image.inner.clone();
    let sr = py.detach(|| fracsr::upscale(&img, &cfg)).map_err(to_py)?;
    let levels = sr
        .levels
        .into_iter()
        .map(|l| PyLevelReport {
            alpha: l.alpha,
            trace: l.trace,
            energies: l.energies,
        })
        .collect();
    Ok((wrap(sr.image), levels))
}

#[pyfunction]
fn bicubic(image: PyRef<'_, PyImage>, scale: usize) -> PyResult<PyImage> {
    Ok(wrap(bicubic_resize(
        &image.inner,
        self::scale(scale)?.factor(),
    )))
}

/// Returns `(cropped_reference, low_resolution)`.
#[pyfunction]
#[pyo3(signature = (hr, scale, sigma = 0.55))]
fn degrade_image(hr: PyRef<'_, PyImage>, scale: usize, sigma: f64) -> PyResult<(PyImage, PyImage)> {
    let (r, lr) = degrade(&hr.inner, self::scale(scale)?, sigma).map_err(to_py)?;
    Ok((wrap(r), wrap(lr)))
}

#[pyfunction(name = "rmse")]
fn py_rmse(reference: PyRef<'_, PyImage>, test: PyRef<'_, PyImage>) -> PyResult<f64> {
    rmse(&reference.inner, &test.inner).map_err(to_py)
}

#[pyfunction(name = "ssim")]
fn py_ssim(reference: PyRef<'_, PyImage>, test: PyRef<'_, PyImage>) -> PyResult<f64> {
    ssim(&reference.inner, &test.inner).map_err(to_py)
}

/// GLCM `(energy, homogeneity, entropy)`.
#[pyfunction]
#[pyo3(signature = (image, levels = DEFAULT_LEVELS, offset = DEFAULT_OFFSET))]
fn texture_features(
    image: PyRef<'_, PyImage>,
    levels: usize,
    offset: (isize, isize),
) -> PyResult<(f64, f64, f64)> {
    let f = glcm_features(&image.inner, levels, offset).map_err(to_py)?;
    Ok((f.energy, f.homogeneity, f.entropy))
}

#[pyfunction(name = "texture_similarity")]
fn py_texture_similarity(reference: PyRef<'_, PyImage>, test: PyRef<'_, PyImage>) -> PyResult<f64> {
    texture_similarity(&reference.inner, &test.inner).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "fracsr")]
fn fracsr_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyImage>()?;
    m.add_class::<PyPipelineConfig>()?;
    m.add_class::<PyLevelReport>()?;
    m.add_function(wrap_pyfunction!(gl_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(upscale, m)?)?;
    m.add_function(wrap_pyfunction!(bicubic, m)?)?;
    m.add_function(wrap_pyfunction!(degrade_image, m)?)?;
    m.add_function(wrap_pyfunction!(py_rmse, m)?)?;
    m.add_function(wrap_pyfunction!(py_ssim, m)?)?;
    m.add_function(wrap_pyfunction!(texture_features, m)?)?;
    m.add_function(wrap_pyfunction!(py_texture_similarity, m)?)?;
    Ok(())
}
