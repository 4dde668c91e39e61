//! Ball caches: a [`LengthIndex`] serialized as text.
//!
//! ```text
//! rdlab-ball-cache v1 | Z^2 | N=1
//! 0,0\t0
//! -1,0\t1
//! ...
//! ```
//!
//! One record per element, `<key>TAB<length>`, sorted by length and then by
//! key. A sidecar file `<path>.sha256` holds the hex SHA-256 of the cache
//! bytes.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::bfs::{enumerate_balls, LengthIndex};
use super::spec::GroupSpec;
use crate::error::{Error, Result};

const MAGIC: &str = "rdlab-ball-cache v1";

/// Canonical cache text for an index.
pub fn serialize(index: &LengthIndex) -> String {
    let spec = index.spec();
    let mut out = format!("{MAGIC} | {} | N={}\n", spec.descriptor(), index.radius());
    for n in 0..=index.radius() {
        let mut keys: Vec<String> = index.sphere(n).iter().map(|g| spec.key(g)).collect();
        keys.sort();
        for k in keys {
            out.push_str(&k);
            out.push('\t');
            out.push_str(&n.to_string());
            out.push('\n');
        }
    }
    out
}

/// Parses cache text for `spec`; the header must name the same group.
pub fn parse(spec: &GroupSpec, text: &str) -> Result<LengthIndex> {
    let bad = |m: String| Error::CacheFormat(m);
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty cache".into()))?;
    let parts: Vec<&str> = header.split(" | ").collect();
    if parts.len() != 3 || parts[0] != MAGIC {
        return Err(bad(format!("bad header {header:?}")));
    }
    if parts[1] != spec.descriptor() {
        return Err(bad(format!(
            "cache is for {}, expected {}",
            parts[1],
            spec.descriptor()
        )));
    }
    let radius: u32 = parts[2]
        .strip_prefix("N=")
        .and_then(|r| r.parse().ok())
        .ok_or_else(|| bad(format!("bad radius field {:?}", parts[2])))?;
    let mut spheres = vec![Vec::new(); radius as usize + 1];
    let mut prev: Option<(u32, String)> = None;
    for (lineno, line) in lines.enumerate() {
        let (key, len) = line
            .split_once('\t')
            .ok_or_else(|| bad(format!("line {}: missing tab", lineno + 2)))?;
        let len: u32 = len
            .parse()
            .map_err(|_| bad(format!("line {}: bad length {len:?}", lineno + 2)))?;
        if len > radius {
            return Err(bad(format!("line {}: length {len} exceeds radius", lineno + 2)));
        }
        let rec = (len, key.to_string());
        if prev.as_ref().is_some_and(|p| *p >= rec) {
            return Err(bad(format!("line {}: records out of order", lineno + 2)));
        }
        let g = spec.parse_key(key)?;
        spheres[len as usize].push(g);
        prev = Some(rec);
    }
    if spheres[0] != [spec.identity()] {
        return Err(bad("sphere 0 must contain exactly the identity".into()));
    }
    Ok(LengthIndex::from_spheres(spec.clone(), spheres))
}

/// Hex SHA-256 of `bytes`.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_digest(path: &Path) -> Result<String> {
    Ok(digest(&fs::read(path)?))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".sha256");
    PathBuf::from(p)
}

/// Writes the cache and its digest sidecar; returns the digest.
pub fn write(index: &LengthIndex, path: &Path) -> Result<String> {
    let text = serialize(index);
    fs::write(path, text.as_bytes())?;
    let d = digest(text.as_bytes());
    fs::write(sidecar(path), format!("{d}\n"))?;
    Ok(d)
}

/// Reads a cache, verifying it against its sidecar digest when one exists.
pub fn read(spec: &GroupSpec, path: &Path) -> Result<(LengthIndex, String)> {
    let bytes = fs::read(path)?;
    let found = digest(&bytes);
    let side = sidecar(path);
    if side.exists() {
        let expected = fs::read_to_string(&side)?.trim().to_string();
        if expected != found {
            return Err(Error::DigestMismatch {
                path: path.display().to_string(),
                expected,
                found,
            });
        }
    }
    let text = String::from_utf8(bytes).map_err(|_| Error::CacheFormat("cache is not UTF-8".into()))?;
    Ok((parse(spec, &text)?, found))
}

/// Re-enumerates the ball and compares it with the cache on disk.
pub fn check(spec: &GroupSpec, path: &Path) -> Result<bool> {
    let (cached, _) = read(spec, path)?;
    let fresh = enumerate_balls(spec, cached.radius())?;
    Ok(same_index(&cached, &fresh))
}

/// Enumerates `B_N`, writes it to `path`, reloads it and compares.
pub fn roundtrip(spec: &GroupSpec, radius: u32, path: &Path) -> Result<bool> {
    let index = enumerate_balls(spec, radius)?;
    write(&index, path)?;
    let (loaded, _) = read(spec, path)?;
    Ok(same_index(&index, &loaded))
}

fn same_index(a: &LengthIndex, b: &LengthIndex) -> bool {
    a.radius() == b.radius()
        && a.sphere_sizes() == b.sphere_sizes()
        && a.ball_sizes() == b.ball_sizes()
        && (0..=a.radius()).all(|n| a.sphere(n) == b.sphere(n))
}
