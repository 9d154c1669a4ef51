// SPDX-License-Identifier: Apache-2.0

//! Compressor-based estimates of conditional complexity, disclosure and
//! information distance on byte strings.
//!
//! Every number produced here is an estimate and is reported with
//! `proxy: true`. None of it should be mixed with exact oracle values.

mod corpus;

use std::io::Write;

use flate2::write::DeflateEncoder;
use flate2::Compression;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::networks::{Channel, Metrics, Network, Role};
use crate::oracle::{Complexity, Quantity};

pub use corpus::{Corpus, CorpusFile, ProxyRole};

/// Default per-input cap: 1 MiB.
pub const DEFAULT_SIZE_CAP: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProxyError {
    #[error("input of {len} bytes exceeds the {cap}-byte cap")]
    Oversize { len: usize, cap: usize },
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("no file has role {0}")]
    MissingRole(String),
}

/// Deterministic size estimate in bits.
pub trait Compressor: Sync {
    fn name(&self) -> &str;
    fn compressed_size(&self, bytes: &[u8]) -> u64;
}

/// Raw deflate at the highest level (the reference compressor).
#[derive(Debug, Clone, Copy, Default)]
pub struct DeflateCompressor;

impl Compressor for DeflateCompressor {
    fn name(&self) -> &str {
        "deflate-9"
    }

    fn compressed_size(&self, bytes: &[u8]) -> u64 {
        let mut enc = DeflateEncoder::new(Vec::with_capacity(bytes.len() / 2 + 16), Compression::best());
        enc.write_all(bytes).expect("writing to a Vec");
        8 * enc.finish().expect("writing to a Vec").len() as u64
    }
}

/// Byte run-length coding: each maximal run of up to 255 equal bytes costs
/// two bytes. Only meant for tests.
#[derive(Debug, Clone, Copy, Default)]
pub struct RleCompressor;

impl Compressor for RleCompressor {
    fn name(&self) -> &str {
        "rle"
    }

    fn compressed_size(&self, bytes: &[u8]) -> u64 {
        let mut runs = 0u64;
        let mut i = 0;
        while i < bytes.len() {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j] == bytes[i] && j - i < 255 {
                j += 1;
            }
            runs += 1;
            i = j;
        }
        16 * runs
    }
}

/// A compressor plus the input size cap.
#[derive(Clone, Copy)]
pub struct Proxy<'c> {
    compressor: &'c dyn Compressor,
    cap: usize,
}

impl std::fmt::Debug for Proxy<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Proxy")
            .field("compressor", &self.compressor.name())
            .field("cap", &self.cap)
            .finish()
    }
}

impl<'c> Proxy<'c> {
    pub fn new(compressor: &'c dyn Compressor) -> Self {
        Self {
            compressor,
            cap: DEFAULT_SIZE_CAP,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn compressor_name(&self) -> &str {
        self.compressor.name()
    }

    fn check(&self, b: &[u8]) -> Result<(), ProxyError> {
        if b.len() > self.cap {
            Err(ProxyError::Oversize {
                len: b.len(),
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }

    pub fn size(&self, b: &[u8]) -> Result<u64, ProxyError> {
        self.check(b)?;
        Ok(self.compressor.compressed_size(b))
    }

    /// `size(v·u) - size(v)`, floored at zero.
    pub fn approx_conditional(&self, u: &[u8], v: &[u8]) -> Result<u64, ProxyError> {
        self.check(u)?;
        let sv = self.size(v)?;
        let suv = self.compressor.compressed_size(&[v, u].concat());
        Ok(suv.saturating_sub(sv))
    }

    /// Normalized compression distance.
    pub fn ncd(&self, x: &[u8], y: &[u8]) -> Result<f64, ProxyError> {
        let (sx, sy) = (self.size(x)?, self.size(y)?);
        let sxy = self.compressor.compressed_size(&[x, y].concat());
        let (lo, hi) = (sx.min(sy), sx.max(sy));
        if hi == 0 {
            return Ok(0.0);
        }
        Ok((sxy as f64 - lo as f64).max(0.0) / hi as f64)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProxyStrings {
    pub w: Vec<u8>,
    pub x: Vec<u8>,
    pub y: Vec<u8>,
    pub z: Vec<u8>,
}

impl ProxyStrings {
    pub fn get(&self, r: Role) -> &[u8] {
        match r {
            Role::W => &self.w,
            Role::X => &self.x,
            Role::Y => &self.y,
            Role::Z => &self.z,
        }
    }

    pub fn join(&self, roles: &[Role]) -> Vec<u8> {
        roles.iter().flat_map(|&r| self.get(r).iter().copied()).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProxyPair {
    pub p: Vec<u8>,
    pub q: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProxyMetrics {
    /// Always true.
    pub proxy: bool,
    pub compressor: String,
    pub metrics: Metrics,
}

fn bits(v: u64) -> Complexity {
    Complexity::Bits(v.min(u32::MAX as u64) as u32)
}

/// [`crate::networks::metrics`] with every `C(u|v)` replaced by
/// [`Proxy::approx_conditional`]. Unconditional values are taken given the
/// empty string, so a network without private roles has private disclosure
/// exactly zero.
pub fn proxy_metrics(
    net: Network,
    strings: &ProxyStrings,
    pair: &ProxyPair,
    proxy: &Proxy<'_>,
) -> Result<ProxyMetrics, ProxyError> {
    let c = |u: &[u8], v: &[u8]| proxy.approx_conditional(u, v);
    let all = strings.join(net.all_roles());
    let mut eps = 0u64;
    for channel in [Channel::P, Channel::Q].into_iter().take(net.channel_count()) {
        let program: &[u8] = match channel {
            Channel::P => &pair.p,
            Channel::Q => &pair.q,
        };
        eps = eps.max(c(program, &all)?);
        for node in net.nodes().iter().filter(|n| n.channel == channel) {
            let given = [program, strings.get(node.input)].concat();
            eps = eps.max(c(strings.get(node.output), &given)?);
        }
    }
    let observed = [pair.p.as_slice(), pair.q.as_slice()].concat();
    let cpq = c(&observed, &[])?;
    let disclosure = |roles: &[Role]| -> Result<Quantity, ProxyError> {
        let given = c(&observed, &strings.join(roles))?;
        Ok(Quantity::Value(cpq.saturating_sub(given) as i64))
    };
    Ok(ProxyMetrics {
        proxy: true,
        compressor: proxy.compressor_name().to_string(),
        metrics: Metrics {
            achieved_epsilon: bits(eps),
            cp: bits(c(&pair.p, &[])?),
            cq: bits(c(&pair.q, &[])?),
            cpq: bits(cpq),
            total_disclosure: disclosure(net.all_roles())?,
            private_disclosure: disclosure(net.private_roles())?,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NcdEntry {
    pub a: String,
    pub b: String,
    pub ab: f64,
    pub ba: f64,
    pub asymmetry: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NcdReport {
    pub proxy: bool,
    pub compressor: String,
    pub files: usize,
    /// `ncd(f, f)` per file, in manifest order.
    pub self_distance: Vec<(String, f64)>,
    pub max_self_distance: f64,
    pub pairs: Vec<NcdEntry>,
    pub max_asymmetry: f64,
}

/// All self-distances and both orders of every unordered pair.
pub fn ncd_report(corpus: &Corpus, proxy: &Proxy<'_>) -> Result<NcdReport, ProxyError> {
    let files = corpus.files();
    let self_distance = files
        .par_iter()
        .map(|f| Ok((f.name.clone(), proxy.ncd(&f.bytes, &f.bytes)?)))
        .collect::<Result<Vec<_>, ProxyError>>()?;
    let idx: Vec<(usize, usize)> = (0..files.len())
        .flat_map(|i| (i + 1..files.len()).map(move |j| (i, j)))
        .collect();
    let pairs = idx
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&files[i], &files[j]);
            let ab = proxy.ncd(&a.bytes, &b.bytes)?;
            let ba = proxy.ncd(&b.bytes, &a.bytes)?;
            Ok(NcdEntry {
                a: a.name.clone(),
                b: b.name.clone(),
                ab,
                ba,
                asymmetry: (ab - ba).abs(),
            })
        })
        .collect::<Result<Vec<_>, ProxyError>>()?;
    Ok(NcdReport {
        proxy: true,
        compressor: proxy.compressor_name().to_string(),
        files: files.len(),
        max_self_distance: self_distance.iter().map(|(_, d)| *d).fold(0.0, f64::max),
        self_distance,
        max_asymmetry: pairs.iter().map(|e| e.asymmetry).fold(0.0, f64::max),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::networks::Topology;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> Vec<u8> {
        let mut v = vec![0u8; n];
        ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut v);
        v
    }

    #[test]
    fn rle_sizes() {
        let c = RleCompressor;
        assert_eq!(c.compressed_size(b""), 0);
        assert_eq!(c.compressed_size(b"aaab"), 32);
        assert_eq!(c.compressed_size(&[7u8; 600]), 48);
    }

    #[test]
    fn empty_u_is_free() {
        let d = DeflateCompressor;
        let p = Proxy::new(&d);
        assert_eq!(p.approx_conditional(b"", b"hello hello").unwrap(), 0);
        let r = RleCompressor;
        assert_eq!(Proxy::new(&r).approx_conditional(b"", b"abc").unwrap(), 0);
    }

    #[test]
    fn repetitive_self_condition_is_small() {
        let d = DeflateCompressor;
        let p = Proxy::new(&d);
        // A 4 KiB random block repeated to 10 KiB.
        let x: Vec<u8> = random(4096, 9).into_iter().cycle().take(10 * 1024).collect();
        let given = p.approx_conditional(&x, &x).unwrap();
        assert!(given * 20 <= p.size(&x).unwrap(), "{given}");
    }

    #[test]
    fn random_is_incompressible() {
        let d = DeflateCompressor;
        let p = Proxy::new(&d);
        let x = random(10 * 1024, 1);
        let est = p.approx_conditional(&x, b"").unwrap();
        let raw = 8 * x.len() as u64;
        assert!(est >= raw && est <= raw + 8 * 64, "{est} vs {raw}");
    }

    #[test]
    fn ncd_self_and_symmetry() {
        let d = DeflateCompressor;
        let p = Proxy::new(&d);
        let x = random(10 * 1024, 2);
        let y = random(10 * 1024, 3);
        assert!(p.ncd(&x, &x).unwrap() < 0.1);
        let (a, b) = (p.ncd(&x, &y).unwrap(), p.ncd(&y, &x).unwrap());
        assert!(a > 0.9 && (a - b).abs() < 0.02, "{a} {b}");
    }

    #[test]
    fn oversize_rejected() {
        let d = DeflateCompressor;
        let p = Proxy::new(&d).with_cap(4);
        assert_eq!(
            p.approx_conditional(b"12345", b""),
            Err(ProxyError::Oversize { len: 5, cap: 4 })
        );
        assert!(p.ncd(b"1", b"123456").is_err());
    }

    #[test]
    fn net_c_private_disclosure_is_zero() {
        let d = DeflateCompressor;
        let p = Proxy::new(&d);
        let s = ProxyStrings {
            x: random(2000, 4),
            y: random(2000, 5),
            ..Default::default()
        };
        let pair = ProxyPair {
            p: s.y.clone(),
            q: s.x.clone(),
        };
        let m = proxy_metrics(Topology::C, &s, &pair, &p).unwrap();
        assert!(m.proxy);
        assert_eq!(m.metrics.private_disclosure, Quantity::Value(0));
        let Quantity::Value(t) = m.metrics.total_disclosure else {
            panic!()
        };
        assert!(t > 0);
    }

    #[test]
    fn estimates_nonnegative_for_every_topology() {
        let r = RleCompressor;
        let p = Proxy::new(&r);
        let s = ProxyStrings {
            w: b"wwww".to_vec(),
            x: b"xxyy".to_vec(),
            y: b"yy".to_vec(),
            z: b"zzzzzz".to_vec(),
        };
        let pair = ProxyPair {
            p: b"yyy".to_vec(),
            q: b"zz".to_vec(),
        };
        for t in Topology::ALL {
            let m = proxy_metrics(t, &s, &pair, &p).unwrap().metrics;
            for q in [m.total_disclosure, m.private_disclosure] {
                assert!(matches!(q, Quantity::Value(v) if v >= 0));
            }
        }
    }
}
