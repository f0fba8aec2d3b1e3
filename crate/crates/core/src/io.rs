//! File formats: gain matrix, optimization fronts, and run metadata.
//!
//! Tabular results are CSV with `#`-prefixed header comments carrying the
//! config hash and seed, so every output can be traced to its exact inputs
//! and compared byte-for-byte across runs.

use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moea::Individual;
use crate::net::{NetworkModel, Topology};

/// Gain matrix file contents: dB values, row per pixel (row-major grid),
/// column per cell.
#[derive(Debug, Clone)]
pub struct GainMatrixFile {
    pub num_pixels: usize,
    pub num_cells: usize,
    pub pixel_size_m: f64,
    pub gain_db: Array2<f64>,
}

/// Writes a model's gain matrix as delimited text. The header line records
/// the pixel count, cell count, and pixel size.
pub fn save_gain_matrix(path: impl AsRef<Path>, model: &NetworkModel) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        file,
        "{} {} {}",
        model.num_pixels, model.num_cells, model.pixel_size_m
    )?;
    for a in 0..model.num_pixels {
        let row: Vec<String> = (0..model.num_cells)
            .map(|l| format!("{}", 10.0 * model.gain[[a, l]].log10()))
            .collect();
        writeln!(file, "{}", row.join(" "))?;
    }
    Ok(())
}

/// Reads a gain matrix written by [`save_gain_matrix`] (or any tool emitting
/// the same format).
pub fn load_gain_matrix(path: impl AsRef<Path>) -> Result<GainMatrixFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::format(path, "missing header line"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [pixels, cells, pixel_size] = fields[..] else {
        return Err(Error::format(
            path,
            "header must be 'pixels cells pixel_size'",
        ));
    };
    let num_pixels: usize = pixels
        .parse()
        .map_err(|_| Error::format(path, "bad pixel count"))?;
    let num_cells: usize = cells
        .parse()
        .map_err(|_| Error::format(path, "bad cell count"))?;
    let pixel_size_m: f64 = pixel_size
        .parse()
        .map_err(|_| Error::format(path, "bad pixel size"))?;

    let mut gain_db = Array2::zeros((num_pixels, num_cells));
    let mut row = 0;
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        if row >= num_pixels {
            return Err(Error::format(path, format!("more than {num_pixels} rows")));
        }
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::format(path, format!("bad value in row {}", row + 1)))?;
        if values.len() != num_cells {
            return Err(Error::format(
                path,
                format!(
                    "row {} has {} values, expected {num_cells}",
                    row + 1,
                    values.len()
                ),
            ));
        }
        for (l, v) in values.into_iter().enumerate() {
            gain_db[[row, l]] = v;
        }
        row += 1;
    }
    if row != num_pixels {
        return Err(Error::format(
            path,
            format!("found {row} rows, expected {num_pixels}"),
        ));
    }
    Ok(GainMatrixFile {
        num_pixels,
        num_cells,
        pixel_size_m,
        gain_db,
    })
}

/// One row of a front or chain file.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontRow {
    /// Position along a chain; 0 for fronts.
    pub order: usize,
    pub topology: Topology,
    pub active_cells: usize,
    pub objectives: [f64; 2],
    pub feasible: bool,
    pub outage_fraction: f64,
}

/// Writes a front (or chain: set `order` to the chain position) with the
/// objective names in the header and provenance in comment lines.
pub fn write_front_csv(
    path: impl AsRef<Path>,
    rows: &[FrontRow],
    objective_names: [&str; 2],
    config_hash: &str,
    seed: u64,
) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(file, "# config_hash={config_hash} seed={seed}")?;
    writeln!(
        file,
        "order,topology,nac,{},{},feasible,outage_fraction",
        objective_names[0], objective_names[1]
    )?;
    for row in rows {
        writeln!(
            file,
            "{},{},{},{},{},{},{}",
            row.order,
            row.topology.to_bitstring(),
            row.active_cells,
            row.objectives[0],
            row.objectives[1],
            row.feasible,
            row.outage_fraction
        )?;
    }
    Ok(())
}

/// Reads a front file; parse failures name the offending row.
pub fn read_front_csv(path: impl AsRef<Path>) -> Result<Vec<FrontRow>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::format(path, e.to_string()))?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::format(path, e.to_string()))?;
        let row_err = |msg: String| Error::format(path, format!("row {}: {msg}", i + 1));
        if record.len() != 7 {
            return Err(row_err(format!(
                "expected 7 fields, found {}",
                record.len()
            )));
        }
        let order: usize = record[0]
            .parse()
            .map_err(|_| row_err("bad order field".into()))?;
        let topology = Topology::from_bitstring(&record[1]).map_err(|e| row_err(e.to_string()))?;
        let active_cells: usize = record[2]
            .parse()
            .map_err(|_| row_err("bad active_cells field".into()))?;
        let o1: f64 = record[3]
            .parse()
            .map_err(|_| row_err("bad first objective".into()))?;
        let o2: f64 = record[4]
            .parse()
            .map_err(|_| row_err("bad second objective".into()))?;
        let feasible: bool = record[5]
            .parse()
            .map_err(|_| row_err("bad feasible flag".into()))?;
        let outage_fraction: f64 = record[6]
            .parse()
            .map_err(|_| row_err("bad outage_fraction".into()))?;
        rows.push(FrontRow {
            order,
            topology,
            active_cells,
            objectives: [o1, o2],
            feasible,
            outage_fraction,
        });
    }
    Ok(rows)
}

pub fn front_rows_from_members(members: &[Individual]) -> Vec<FrontRow> {
    members
        .iter()
        .map(|m| FrontRow {
            order: 0,
            topology: m.genome.clone(),
            active_cells: m.genome.active_count(),
            objectives: m.objectives,
            feasible: m.feasible,
            outage_fraction: m.outage_fraction,
        })
        .collect()
}

/// Writes full six-metric objective vectors, one row per topology.
pub fn write_objectives_csv(
    path: impl AsRef<Path>,
    rows: &[(Topology, crate::metrics::ObjectiveVector)],
    config_hash: &str,
    seed: u64,
) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(file, "# config_hash={config_hash} seed={seed}")?;
    writeln!(
        file,
        "topology,active_cells,capacity_bps,edge_rate_bps,uplink_power,power_w,load_dispersion,feasible,outage_fraction"
    )?;
    for (topo, v) in rows {
        writeln!(
            file,
            "{},{},{},{},{},{},{},{},{}",
            topo.to_bitstring(),
            v.active_cells,
            v.capacity_bps,
            v.edge_rate_bps,
            v.uplink_power,
            v.power_w,
            v.load_dispersion,
            v.feasible,
            v.outage_fraction
        )?;
    }
    Ok(())
}

/// Run metadata written next to each tabular output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetadata {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective_pair: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_hypervolume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<serde_json::Value>,
}

pub fn write_metadata(path: impl AsRef<Path>, meta: &RunMetadata) -> Result<()> {
    let text = serde_json::to_string_pretty(meta).expect("metadata serializes");
    std::fs::write(path, text + "\n")?;
    Ok(())
}
