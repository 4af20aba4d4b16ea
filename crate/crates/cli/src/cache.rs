//! Content-addressed cache of spectral features.
//!
//! Each entry lives in `<root>/<key>/`, where the key is a SHA-256 over the
//! shape geometry and every setting that influences the features:
//!
//! ```text
//! meta.json    kind, vertex count, scale, k, d, r
//! basis.bin    eigenpairs (binary container)
//! hks.bin      HKS field (binary container)
//! wks.bin      WKS field (binary container)
//! labels.json  region label per vertex
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use elastic_core::container::{
    basis_from_bytes, basis_to_bytes, descriptor_from_bytes, descriptor_to_bytes,
};
use elastic_core::pipeline::{
    extract_curve_features, extract_mesh_features, tessellate_query, CurveFeatures, MeshFeatures,
};
use elastic_core::segmentation::SegmentLabels;
use elastic_core::{Curve2D, RunConfig, TriMesh};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

const FORMAT: &str = "elastic-features-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Mesh,
    Curve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub kind: ShapeKind,
    pub vertices: usize,
    pub scale: f64,
    pub k: usize,
    pub d: usize,
    pub r: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Hit,
    Miss,
    /// An entry existed but could not be read.
    Repaired,
    Disabled,
}

pub struct FeatureCache {
    root: Option<PathBuf>,
}

fn hasher(kind: ShapeKind, config: &RunConfig) -> Sha256 {
    let mut h = Sha256::new();
    h.update(FORMAT);
    h.update([kind as u8]);
    for v in [config.k, config.d, config.r] {
        h.update((v as u64).to_le_bytes());
    }
    h
}

pub fn mesh_key(mesh: &TriMesh, config: &RunConfig) -> String {
    let mut h = hasher(ShapeKind::Mesh, config);
    for v in mesh.vertices() {
        for c in v {
            h.update(c.to_le_bytes());
        }
    }
    for f in mesh.faces() {
        for c in f {
            h.update((*c as u64).to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

pub fn curve_key(curve: &Curve2D, config: &RunConfig) -> String {
    let mut h = hasher(ShapeKind::Curve, config);
    h.update(config.max_area_factor.to_le_bytes());
    for p in curve.points() {
        for c in p {
            h.update(c.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

fn read(dir: &Path, name: &str) -> Result<Vec<u8>> {
    let path = dir.join(name);
    fs::read(&path).with_context(|| format!("reading {}", path.display()))
}

struct Parts {
    meta: Meta,
    basis: elastic_core::SpectralBasis,
    hks: elastic_core::DescriptorField,
    wks: elastic_core::DescriptorField,
    labels: SegmentLabels,
}

fn load_parts(dir: &Path, kind: ShapeKind, config: &RunConfig) -> Result<Parts> {
    let meta: Meta = serde_json::from_slice(&read(dir, "meta.json")?).context("meta.json")?;
    if meta.kind != kind || (meta.k, meta.d, meta.r) != (config.k, config.d, config.r) {
        bail!("entry was written for different settings");
    }
    let labels: Vec<usize> = serde_json::from_slice(&read(dir, "labels.json")?).context("labels.json")?;
    Ok(Parts {
        basis: basis_from_bytes(&read(dir, "basis.bin")?).context("basis.bin")?,
        hks: descriptor_from_bytes(&read(dir, "hks.bin")?).context("hks.bin")?,
        wks: descriptor_from_bytes(&read(dir, "wks.bin")?).context("wks.bin")?,
        labels: SegmentLabels::new(labels, config.r)?,
        meta,
    })
}

/// Writes into a sibling directory first and renames it into place, so a
/// reader never sees a half-written entry.
fn store_parts(dir: &Path, parts: &Parts) -> Result<()> {
    let parent = dir.parent().context("cache entry has no parent")?;
    fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    let tmp = dir.with_extension(format!("tmp{}", std::process::id()));
    let _ = fs::remove_dir_all(&tmp);
    fs::create_dir_all(&tmp)?;
    let files: [(&str, Vec<u8>); 5] = [
        ("meta.json", serde_json::to_vec_pretty(&parts.meta)?),
        ("basis.bin", basis_to_bytes(&parts.basis)),
        ("hks.bin", descriptor_to_bytes(&parts.hks)),
        ("wks.bin", descriptor_to_bytes(&parts.wks)),
        ("labels.json", serde_json::to_vec(&parts.labels)?),
    ];
    for (name, bytes) in files {
        fs::write(tmp.join(name), bytes).with_context(|| format!("writing {name}"))?;
    }
    let _ = fs::remove_dir_all(dir);
    fs::rename(&tmp, dir).with_context(|| format!("moving cache entry to {}", dir.display()))?;
    Ok(())
}

impl FeatureCache {
    pub fn new(root: Option<PathBuf>) -> Self {
        Self { root }
    }

    pub fn entry_dir(&self, key: &str) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(key))
    }

    fn lookup<T>(
        &self,
        key: &str,
        kind: ShapeKind,
        config: &RunConfig,
        rebuild: impl Fn(Parts) -> Result<T>,
        compute: impl Fn() -> Result<(T, Parts)>,
    ) -> Result<(T, Status)> {
        let Some(dir) = self.entry_dir(key) else {
            return Ok((compute()?.0, Status::Disabled));
        };
        let mut status = Status::Miss;
        if dir.exists() {
            match load_parts(&dir, kind, config).and_then(&rebuild) {
                Ok(features) => return Ok((features, Status::Hit)),
                Err(e) => {
                    log::warn!("cache entry {} is unreadable ({e:#}); recomputing", dir.display());
                    status = Status::Repaired;
                }
            }
        }
        let (features, parts) = compute()?;
        store_parts(&dir, &parts)?;
        Ok((features, status))
    }

    pub fn mesh_features(&self, mesh: &TriMesh, config: &RunConfig) -> Result<(MeshFeatures, Status)> {
        let key = mesh_key(mesh, config);
        self.lookup(
            &key,
            ShapeKind::Mesh,
            config,
            |p| {
                if p.meta.vertices != mesh.n_vertices() {
                    bail!("vertex count does not match");
                }
                Ok(MeshFeatures::from_parts(mesh.scaled(p.meta.scale), p.meta.scale, p.basis, p.hks, p.wks, p.labels)?)
            },
            || {
                let f = extract_mesh_features(mesh, config)?;
                let parts = Parts {
                    meta: Meta {
                        kind: ShapeKind::Mesh,
                        vertices: f.mesh.n_vertices(),
                        scale: f.scale,
                        k: config.k,
                        d: config.d,
                        r: config.r,
                    },
                    basis: f.basis.clone(),
                    hks: f.hks.clone(),
                    wks: f.wks.clone(),
                    labels: f.labels.clone(),
                };
                Ok((f, parts))
            },
        )
    }

    pub fn curve_features(&self, curve: &Curve2D, config: &RunConfig) -> Result<(CurveFeatures, Status)> {
        let key = curve_key(curve, config);
        self.lookup(
            &key,
            ShapeKind::Curve,
            config,
            |p| {
                let solid = tessellate_query(curve, config)?;
                if p.meta.vertices != solid.n_vertices() {
                    bail!("vertex count does not match");
                }
                let s = p.meta.scale;
                Ok(CurveFeatures::from_parts(curve.scaled(s), s, solid.scaled(s), p.basis, p.hks, p.wks, p.labels)?)
            },
            || {
                let f = extract_curve_features(curve, config)?;
                let parts = Parts {
                    meta: Meta {
                        kind: ShapeKind::Curve,
                        vertices: f.solid.n_vertices(),
                        scale: f.scale,
                        k: config.k,
                        d: config.d,
                        r: config.r,
                    },
                    basis: f.basis.clone(),
                    hks: f.hks.clone(),
                    wks: f.wks.clone(),
                    labels: f.labels.clone(),
                };
                Ok((f, parts))
            },
        )
    }
}
