use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

use rdlab_core::groups::{cache, enumerate_balls_with_budget, GroupSpec, LengthIndex, DEFAULT_BALL_BUDGET};

/// `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// outside `[1e-4, 1e12)`.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CacheUse {
    pub path: String,
    pub digest: String,
    /// Whether the file was produced by this run.
    pub written: bool,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool_version: &'static str,
    group: String,
    generators: Vec<String>,
    subcommand: &'a str,
    params: &'a serde_json::Value,
    seed: u64,
    caches: &'a [CacheUse],
    output: String,
    output_digest: String,
    wall_time_ms: u128,
}

/// State shared by one command invocation.
pub struct Run {
    pub subcommand: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub budget: Option<usize>,
    pub caches: Vec<CacheUse>,
    pub spec: Option<GroupSpec>,
    start: Instant,
}

impl Run {
    pub fn new(
        subcommand: &str,
        params: serde_json::Value,
        seed: u64,
        out: Option<PathBuf>,
        cache_dir: Option<PathBuf>,
        budget: Option<usize>,
    ) -> Run {
        Run {
            subcommand: subcommand.to_string(),
            params,
            seed,
            out,
            cache_dir,
            budget,
            caches: Vec::new(),
            spec: None,
            start: Instant::now(),
        }
    }

    pub fn ball_budget(&self) -> usize {
        self.budget.unwrap_or(DEFAULT_BALL_BUDGET)
    }

    /// `B_radius` for `spec`, read from (or written to) the cache directory
    /// when one is configured.
    pub fn index(&mut self, spec: &GroupSpec, radius: u32) -> Result<LengthIndex> {
        let Some(dir) = self.cache_dir.clone() else {
            return Ok(enumerate_balls_with_budget(spec, radius, self.ball_budget())?);
        };
        let path = cache_path(&dir, spec, radius);
        if path.exists() {
            let (index, digest) = cache::read(spec, &path)?;
            self.caches.push(CacheUse {
                path: path.display().to_string(),
                digest,
                written: false,
            });
            return Ok(index);
        }
        let index = enumerate_balls_with_budget(spec, radius, self.ball_budget())?;
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let digest = cache::write(&index, &path)?;
        self.caches.push(CacheUse {
            path: path.display().to_string(),
            digest,
            written: true,
        });
        Ok(index)
    }

    /// Writes the artifact to `--out` (plus its manifest) or to stdout.
    pub fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
            Some(path) => {
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
                self.write_manifest(path, text)
            }
        }
    }

    fn write_manifest(&self, path: &Path, text: &str) -> Result<()> {
        let (group, generators) = match &self.spec {
            Some(s) => (s.descriptor(), s.generators().iter().map(|g| s.key(g)).collect()),
            None => (String::new(), Vec::new()),
        };
        let manifest = Manifest {
            tool_version: env!("CARGO_PKG_VERSION"),
            group,
            generators,
            subcommand: &self.subcommand,
            params: &self.params,
            seed: self.seed,
            caches: &self.caches,
            output: path.display().to_string(),
            output_digest: cache::digest(text.as_bytes()),
            wall_time_ms: self.start.elapsed().as_millis(),
        };
        let mpath = manifest_path(path);
        fs::write(&mpath, serde_json::to_string_pretty(&manifest)? + "\n")
            .with_context(|| format!("writing {}", mpath.display()))?;
        Ok(())
    }
}

pub fn cache_path(dir: &Path, spec: &GroupSpec, radius: u32) -> PathBuf {
    dir.join(format!("{}_N{radius}.ballcache", spec.descriptor()))
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".manifest.json");
    PathBuf::from(p)
}

/// CSV text with a header row.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Csv {
        Csv {
            text: header.join(",") + "\n",
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}
