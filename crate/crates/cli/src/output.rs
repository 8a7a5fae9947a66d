//! Output plumbing: atomic file writes, grid CSV / binary formats, and
//! input hashing for manifests.

use crate::AppError;
use polysmooth::operators::{EvaluationGrid, GridField};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;

/// Write via a temp file in the same directory plus rename, so concurrent
/// runs into distinct directories never observe partial files.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), AppError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), AppError> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| AppError::validation(format!("serialize {}: {e}", path.display())))?;
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}

/// Grid CSV: header `x,y,inside,v_1..v_d`; masked-out cells carry `nan`.
pub fn grid_to_csv(grid: &EvaluationGrid, field: &GridField) -> String {
    let mut out = String::new();
    out.push_str("x,y,inside");
    for c in 1..=field.dim {
        out.push_str(&format!(",v_{c}"));
    }
    out.push('\n');
    for i in 0..grid.len() {
        let p = grid.point(i);
        let inside = grid.mask()[i] as u8;
        out.push_str(&format!("{},{},{inside}", p.x, p.y));
        for &v in field.value(i) {
            if v.is_finite() {
                out.push_str(&format!(",{v}"));
            } else {
                out.push_str(",nan");
            }
        }
        out.push('\n');
    }
    out
}

const GRID_MAGIC: &[u8; 4] = b"PSGR";
const GRID_VERSION: u8 = 1;

/// Compact binary grid: magic+version, nx/ny/dim, grid rectangle, mask
/// bytes, then row-major little-endian doubles.
pub fn grid_to_binary(grid: &EvaluationGrid, field: &GridField) -> Vec<u8> {
    let mut out = Vec::with_capacity(32 + grid.len() * (1 + field.dim * 8));
    out.extend_from_slice(GRID_MAGIC);
    out.push(GRID_VERSION);
    for v in [grid.nx as u64, grid.ny as u64, field.dim as u64] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in [
        grid.rect.min.x,
        grid.rect.min.y,
        grid.rect.max.x,
        grid.rect.max.y,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend(grid.mask().iter().map(|&m| m as u8));
    for v in &field.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

pub fn sha256_file(path: &Path) -> Result<String, AppError> {
    Ok(sha256_hex(&std::fs::read(path)?))
}
