//! The shipped geometry catalog: construction recipes for the bundled data
//! files and a loader that accepts either a bundled name or a JSON path.

use std::path::Path;

use super::geometry::{checkerboard, grid19, rect_grid, Geometry};
use crate::error::{Result, SimError};

/// Geometries shipped as JSON data files. The decode family lives on the
/// checkerboard lattice (every gate advances the sweep direction); grid19
/// carries the 7-qubit chain experiments; the strip family demonstrates
/// the square-lattice mapping with range-3 gates at depth 5.
pub fn builtin(name: &str) -> Option<Geometry> {
    match name {
        "grid19" => Some(grid19()),
        "n12" => Some(checkerboard("n12", 4, 6, 0)),
        "n24" => Some(checkerboard("n24", 6, 8, 0)),
        "n40" => Some(checkerboard("n40", 10, 8, 0)),
        "n58" => Some(checkerboard("n58", 15, 8, 2)),
        "n70" => Some(checkerboard("n70", 18, 8, 2)),
        "strip6x4" => Some(rect_grid("strip6x4", 4, 6, 0)),
        "strip10x7" => Some(rect_grid("strip10x7", 7, 10, 0)),
        _ => None,
    }
}

pub const BUILTIN_NAMES: [&str; 8] = [
    "grid19", "n12", "n24", "n40", "n58", "n70", "strip6x4", "strip10x7",
];

/// Load a geometry by bundled name, or from a JSON file path.
pub fn load(name_or_path: &str) -> Result<Geometry> {
    if let Some(g) = builtin(name_or_path) {
        return Ok(g);
    }
    let p = Path::new(name_or_path);
    if p.exists() {
        return Geometry::load(p);
    }
    Err(SimError::Geometry(format!(
        "unknown geometry '{name_or_path}' (builtins: {})",
        BUILTIN_NAMES.join(", ")
    )))
}

/// Write every builtin geometry as JSON under `dir`.
pub fn write_data_files(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for name in BUILTIN_NAMES {
        let g = builtin(name).unwrap();
        std::fs::write(dir.join(format!("{name}.json")), g.to_json()?)?;
    }
    Ok(())
}
