//! The `fracsr` command line: `upscale`, `metrics` and `bench`.
//!
//! Exit status is 0 on success, 1 on runtime failure and 2 on usage
//! errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{AlphaMode, PipelineConfig};
use crate::imaging::{bicubic_resize, load_image, luma, save_image};
use crate::metrics::{
    feature_distance, glcm_features, quality_report, rmse, ssim, TextureFeatures, DEFAULT_LEVELS,
    DEFAULT_OFFSET,
};
use crate::pipeline::{degrade, super_resolve, upscale, SuperResolution};
use crate::{Error, Image, Result, ScaleFactor};

#[derive(Debug, Parser)]
#[command(
    name = "fracsr",
    version,
    about = "Fractional-order gradient super-resolution"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

fn parse_scale(s: &str) -> std::result::Result<ScaleFactor, String> {
    let n: usize = s.parse().map_err(|_| format!("not an integer: {s}"))?;
    ScaleFactor::new(n).map_err(|e| e.to_string())
}

fn parse_alpha(s: &str) -> std::result::Result<AlphaMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ours,
    Bicubic,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Ours => "ours",
            Method::Bicubic => "bicubic",
        }
    }
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    match s.trim() {
        "ours" => Ok(Method::Ours),
        "bicubic" => Ok(Method::Bicubic),
        other => Err(format!(
            "unknown method {other:?} (expected ours or bicubic)"
        )),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Super-resolve one image.
    Upscale {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Power of two, at least 2.
        #[arg(long, value_parser = parse_scale)]
        scale: ScaleFactor,
        /// `auto` or a fixed order in (0, 1].
        #[arg(long, value_parser = parse_alpha)]
        alpha: Option<AlphaMode>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write per-level order search and energy history here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Compare a test image against a reference. Without a metric flag all
    /// metrics are reported.
    Metrics {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        rmse: bool,
        #[arg(long)]
        ssim: bool,
        #[arg(long)]
        texture: bool,
        #[arg(long)]
        json: bool,
    },
    /// Degrade every image in a directory, restore it and score the result.
    Bench {
        #[arg(long)]
        hr_dir: PathBuf,
        #[arg(long, value_parser = parse_scale)]
        scale: ScaleFactor,
        #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "ours,bicubic")]
        methods: Vec<Method>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command, returning the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Upscale {
            input,
            output,
            scale,
            alpha,
            config,
            trace,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            cfg.scale = scale;
            if let Some(a) = alpha {
                cfg.alpha_mode = a;
            }
            cfg.validate()?;
            let img = load_image(&input)?;
            let sr = upscale(&img, &cfg)?;
            save_image(&sr.image, &output)?;
            if let Some(path) = trace {
                write_file(&path, trace_report(&sr).as_bytes())?;
            }
            Ok(())
        }
        Command::Metrics {
            reference,
            test,
            rmse,
            ssim,
            texture,
            json,
        } => {
            let all = !(rmse || ssim || texture);
            let r = load_image(&reference)?;
            let t = load_image(&test)?;
            let report = metrics_report(&r, &t, all || rmse, all || ssim, all || texture)?;
            let text = if json {
                serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
            } else {
                report.to_text()
            };
            print!("{text}");
            Ok(())
        }
        Command::Bench {
            hr_dir,
            scale,
            methods,
            config,
            out,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            cfg.scale = scale;
            let rows = bench(&hr_dir, &cfg, &methods)?;
            let csv = bench_csv(&rows)?;
            match out {
                Some(path) => write_file(&path, &csv),
                None => std::io::stdout()
                    .write_all(&csv)
                    .map_err(|source| Error::Io {
                        path: PathBuf::from("<stdout>"),
                        source,
                    }),
            }
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::load(p),
        None => Ok(PipelineConfig::default()),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Plain-text record of the order search and energy history per level.
pub fn trace_report(sr: &SuperResolution) -> String {
    let mut s = String::new();
    for (i, level) in sr.levels.iter().enumerate() {
        let _ = writeln!(s, "level {}", i + 1);
        let _ = writeln!(s, "alpha* {}", level.alpha);
        for (a, j) in &level.trace {
            let _ = writeln!(s, "J {a} {j}");
        }
        for (t, e) in level.energies.iter().enumerate() {
            let _ = writeln!(s, "energy {t} {e}");
        }
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct TextureReport {
    pub reference: TextureFeatures,
    pub test: TextureFeatures,
    pub similarity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ssim: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub texture: Option<TextureReport>,
}

impl MetricsReport {
    fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(v) = self.rmse {
            let _ = writeln!(s, "rmse {v}");
        }
        if let Some(v) = self.ssim {
            let _ = writeln!(s, "ssim {v}");
        }
        if let Some(t) = &self.texture {
            for (name, f) in [("reference", &t.reference), ("test", &t.test)] {
                let _ = writeln!(
                    s,
                    "texture {name} energy {} homogeneity {} entropy {}",
                    f.energy, f.homogeneity, f.entropy
                );
            }
            let _ = writeln!(s, "texture similarity {}", t.similarity);
        }
        s
    }
}

fn metrics_report(
    r: &Image,
    t: &Image,
    want_rmse: bool,
    want_ssim: bool,
    want_texture: bool,
) -> Result<MetricsReport> {
    if r.dims() != t.dims() {
        return Err(Error::Dimension(format!(
            "reference is {:?} but test is {:?}",
            r.dims(),
            t.dims()
        )));
    }
    let texture = if want_texture {
        let rf = glcm_features(r, DEFAULT_LEVELS, DEFAULT_OFFSET)?;
        let tf = glcm_features(t, DEFAULT_LEVELS, DEFAULT_OFFSET)?;
        Some(TextureReport {
            reference: rf,
            test: tf,
            similarity: feature_distance(&rf, &tf),
        })
    } else {
        None
    };
    Ok(MetricsReport {
        rmse: want_rmse.then(|| rmse(r, t)).transpose()?,
        ssim: want_ssim.then(|| ssim(r, t)).transpose()?,
        texture,
    })
}

/// One CSV row of the benchmark.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub image: String,
    pub method: String,
    pub scale: usize,
    pub rmse: f64,
    pub ssim: f64,
    pub tex_energy: f64,
    pub tex_homogeneity: f64,
    pub tex_entropy: f64,
    /// Orders chosen per level, `;`-separated; empty for the baseline.
    pub alpha_per_level: String,
    pub wall_ms: u128,
}

fn is_image(path: &Path) -> bool {
    matches!(
        path.extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref(),
        Some("png" | "pgm" | "ppm" | "pnm")
    )
}

/// Runs the benchmark over the images of `dir`, in file-name order.
/// Images are compared on luma.
pub fn bench(dir: &Path, cfg: &PipelineConfig, methods: &[Method]) -> Result<Vec<BenchRow>> {
    let io = |source| Error::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()).map_err(io))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.is_file() && is_image(p))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Config(format!(
            "no PNG/PGM/PPM images in {}",
            dir.display()
        )));
    }
    cfg.validate()?;
    let per_image = files
        .par_iter()
        .map(|path| {
            let hr = load_image(path)?;
            let hr = if hr.channels() == 3 { luma(&hr) } else { hr };
            let (reference, lr) = degrade(&hr, cfg.scale, cfg.sigma)?;
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            methods
                .iter()
                .map(|&m| {
                    let start = Instant::now();
                    let (restored, alphas) = match m {
                        Method::Ours => {
                            let sr = super_resolve(&lr, cfg)?;
                            let a: Vec<String> =
                                sr.levels.iter().map(|l| l.alpha.to_string()).collect();
                            (sr.image, a.join(";"))
                        }
                        Method::Bicubic => (bicubic_resize(&lr, cfg.scale.factor()), String::new()),
                    };
                    let wall_ms = start.elapsed().as_millis();
                    let q = quality_report(&reference, &restored)?;
                    Ok(BenchRow {
                        image: name.clone(),
                        method: m.name().into(),
                        scale: cfg.scale.factor(),
                        rmse: q.rmse,
                        ssim: q.ssim,
                        tex_energy: q.test.energy,
                        tex_homogeneity: q.test.homogeneity,
                        tex_entropy: q.test.entropy,
                        alpha_per_level: alphas,
                        wall_ms,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_image.into_iter().flatten().collect())
}

pub fn bench_csv(rows: &[BenchRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| Error::Config(format!("csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_parser() {
        assert_eq!(parse_scale("4").unwrap().factor(), 4);
        assert!(parse_scale("3").is_err());
        assert!(parse_scale("x").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(
            run(["fracsr", "upscale", "--input", "a.png", "--output", "b.png", "--scale", "3"]),
            2
        );
        assert_eq!(
            run([
                "fracsr",
                "bench",
                "--hr-dir",
                ".",
                "--scale",
                "2",
                "--methods",
                "magic"
            ]),
            2
        );
        assert_eq!(run(["fracsr"]), 2);
    }

    #[test]
    fn csv_header() {
        let row = BenchRow {
            image: "a.png".into(),
            method: "ours".into(),
            scale: 2,
            rmse: 1.5,
            ssim: 0.9,
            tex_energy: 0.1,
            tex_homogeneity: 0.2,
            tex_entropy: 0.3,
            alpha_per_level: "1;0.9".into(),
            wall_ms: 7,
        };
        let text = String::from_utf8(bench_csv(&[row]).unwrap()).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "image,method,scale,rmse,ssim,tex_energy,tex_homogeneity,tex_entropy,alpha_per_level,wall_ms"
        );
    }
}
