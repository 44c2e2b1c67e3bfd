//! JSON documents read and written by the CLI. Every document carries a
//! format version and rejects unknown fields, so a file either matches its
//! schema exactly or fails to load. Big integers travel as decimal strings.

use crate::error::{CliError, CliResult};
use crate::manifest::{RunManifest, FORMAT_VERSION};
use gapforge_core::covering::Stage;
use gapforge_core::hypercover::{ColoredGraph, EdgeBatch, EdgeDistribution, LayeredEdgeModel};
use gapforge_core::{CongruenceClass, CoveringSystem, GapCertificate};
use num_bigint::BigUint;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

fn check_version(found: u32) -> CliResult<()> {
    if found != FORMAT_VERSION {
        return Err(CliError::Usage(format!("unsupported format version {found}, expected {FORMAT_VERSION}")));
    }
    Ok(())
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

/// Reads and parses a JSON document from `path`.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text =
        std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassEntry {
    pub p: u64,
    pub h: u64,
    pub stage: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDoc {
    pub version: u32,
    pub x: u64,
    pub y: u64,
    pub complete: bool,
    pub classes: Vec<ClassEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl CoverDoc {
    pub fn from_system(cs: &CoveringSystem, manifest: Option<RunManifest>) -> Self {
        Self {
            version: FORMAT_VERSION,
            x: cs.x,
            y: cs.y,
            complete: cs.complete,
            classes: cs
                .classes
                .iter()
                .map(|c| ClassEntry { p: c.modulus, h: c.residue, stage: c.stage.label() })
                .collect(),
            manifest,
        }
    }

    /// Rebuilds the system. Completeness is recomputed, not trusted; compare
    /// with [`CoverDoc::complete`] to detect a false claim.
    pub fn to_system(&self) -> CliResult<CoveringSystem> {
        check_version(self.version)?;
        let classes = self
            .classes
            .iter()
            .map(|c| {
                let stage =
                    Stage::from_label(c.stage).ok_or_else(|| CliError::Usage(format!("unknown stage {}", c.stage)))?;
                Ok(CongruenceClass { modulus: c.p, residue: c.h, stage })
            })
            .collect::<CliResult<Vec<_>>>()?;
        CoveringSystem::from_classes(self.x, self.y, classes).map_err(CliError::usage)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertDoc {
    pub version: u32,
    pub x: u64,
    pub y: u64,
    pub modulus: String,
    pub m0: String,
    pub witnesses: Vec<(u64, u64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

fn parse_decimal(field: &str, s: &str) -> CliResult<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(CliError::Usage(format!("{field} must be a decimal string, got {s:?}")));
    }
    s.parse().map_err(CliError::usage)
}

impl CertDoc {
    pub fn from_certificate(cert: &GapCertificate, manifest: Option<RunManifest>) -> Self {
        Self {
            version: FORMAT_VERSION,
            x: cert.x,
            y: cert.y,
            modulus: cert.modulus.to_string(),
            m0: cert.m0.to_string(),
            witnesses: cert.witnesses.clone(),
            manifest,
        }
    }

    pub fn to_certificate(&self) -> CliResult<GapCertificate> {
        check_version(self.version)?;
        Ok(GapCertificate {
            x: self.x,
            y: self.y,
            modulus: parse_decimal("modulus", &self.modulus)?,
            m0: parse_decimal("m0", &self.m0)?,
            witnesses: self.witnesses.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionEntry {
    Choice { sets: Vec<Vec<u32>>, probs: Vec<f64> },
    Uniform { lo: u32, hi: u32, size: u32 },
    Bernoulli { q: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchEntry {
    pub dist: usize,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    #[serde(default = "default_version")]
    pub version: u32,
    pub n_vertices: u32,
    pub r: usize,
    pub distributions: Vec<DistributionEntry>,
    pub layers: Vec<Vec<BatchEntry>>,
}

impl ModelDoc {
    pub fn from_model(m: &LayeredEdgeModel) -> Self {
        let distributions = m
            .distributions
            .iter()
            .map(|d| match d.clone() {
                EdgeDistribution::Choice { sets, probs } => DistributionEntry::Choice { sets, probs },
                EdgeDistribution::Uniform { lo, hi, size } => DistributionEntry::Uniform { lo, hi, size },
                EdgeDistribution::Bernoulli { q } => DistributionEntry::Bernoulli { q },
            })
            .collect();
        let layers =
            m.layers.iter().map(|l| l.iter().map(|b| BatchEntry { dist: b.dist, count: b.count }).collect()).collect();
        Self { version: FORMAT_VERSION, n_vertices: m.n_vertices, r: m.r, distributions, layers }
    }

    pub fn to_model(&self) -> CliResult<LayeredEdgeModel> {
        check_version(self.version)?;
        let distributions = self
            .distributions
            .iter()
            .map(|d| match d.clone() {
                DistributionEntry::Choice { sets, probs } => EdgeDistribution::Choice { sets, probs },
                DistributionEntry::Uniform { lo, hi, size } => EdgeDistribution::Uniform { lo, hi, size },
                DistributionEntry::Bernoulli { q } => EdgeDistribution::Bernoulli { q },
            })
            .collect();
        let layers = self
            .layers
            .iter()
            .map(|l| l.iter().map(|b| EdgeBatch { dist: b.dist, count: b.count }).collect())
            .collect();
        let model = LayeredEdgeModel { n_vertices: self.n_vertices, r: self.r, distributions, layers };
        model.validate().map_err(CliError::usage)?;
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub version: u32,
    pub n_vertices: u32,
    pub n_colors: u32,
    pub edges: Vec<(u32, u32, u32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl GraphDoc {
    pub fn from_graph(g: &ColoredGraph, manifest: Option<RunManifest>) -> Self {
        Self {
            version: FORMAT_VERSION,
            n_vertices: g.n_vertices,
            n_colors: g.n_colors,
            edges: g.edges.clone(),
            manifest,
        }
    }

    pub fn to_graph(&self) -> CliResult<ColoredGraph> {
        check_version(self.version)?;
        let g = ColoredGraph { n_vertices: self.n_vertices, n_colors: self.n_colors, edges: self.edges.clone() };
        g.validate().map_err(CliError::usage)?;
        Ok(g)
    }
}

/// Generic result document: the manifest plus a command-specific payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub version: u32,
    pub manifest: RunManifest,
    pub result: serde_json::Value,
}
