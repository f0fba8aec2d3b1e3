//! Spatial service-demand distribution and demand volume.
//!
//! Demand is described by a per-pixel probability vector plus the first-order
//! statistics of exponentially distributed inter-arrival and session times,
//! and the per-user target rate.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-9;

/// Demand description for a single service class.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandProfile {
    /// Probability that a new user appears in each pixel; sums to one.
    pub pixel_probability: Vec<f64>,
    /// Mean inter-arrival time, seconds.
    pub mean_interarrival_s: f64,
    /// Mean session time, seconds.
    pub mean_session_s: f64,
    /// Per-user target rate, bps.
    pub min_rate_bps: f64,
}

impl DemandProfile {
    pub fn new(
        pixel_probability: Vec<f64>,
        mean_interarrival_s: f64,
        mean_session_s: f64,
        min_rate_bps: f64,
    ) -> Result<Self> {
        if mean_interarrival_s <= 0.0 || mean_session_s <= 0.0 || min_rate_bps <= 0.0 {
            return Err(Error::Config("demand parameters must be positive".into()));
        }
        if pixel_probability.iter().any(|&g| g < 0.0 || !g.is_finite()) {
            return Err(Error::Config("demand weights must be nonnegative".into()));
        }
        let sum: f64 = pixel_probability.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Config(format!(
                "demand distribution sums to {sum}, expected 1"
            )));
        }
        Ok(DemandProfile {
            pixel_probability,
            mean_interarrival_s,
            mean_session_s,
            min_rate_bps,
        })
    }

    pub fn num_pixels(&self) -> usize {
        self.pixel_probability.len()
    }

    /// Mean number of concurrent users implied by the volume parameters.
    pub fn mean_concurrent_users(&self) -> f64 {
        self.mean_session_s / self.mean_interarrival_s
    }

    /// Same spatial distribution with the demand volume multiplied: arrivals
    /// are densified by shortening the mean inter-arrival time.
    pub fn scaled(&self, multiplier: f64) -> Self {
        DemandProfile {
            pixel_probability: self.pixel_probability.clone(),
            mean_interarrival_s: self.mean_interarrival_s / multiplier,
            mean_session_s: self.mean_session_s,
            min_rate_bps: self.min_rate_bps,
        }
    }
}

/// One entry per service class; aggregated by [`aggregate_services`].
pub type ServiceMix = Vec<DemandProfile>;

/// Average demand per pixel in bps: volume times spatial probability.
pub fn pixel_demand(profile: &DemandProfile) -> Vec<f64> {
    let volume = profile.mean_concurrent_users() * profile.min_rate_bps;
    profile
        .pixel_probability
        .iter()
        .map(|&g| volume * g)
        .collect()
}

/// Total service demand volume in bps.
pub fn total_demand(profile: &DemandProfile) -> f64 {
    pixel_demand(profile).iter().sum()
}

/// Collapses a multi-service mix into an equivalent single-service profile.
///
/// The combined spatial distribution weights each pixel by its summed demand.
/// The equivalent profile preserves the total arrival rate, the arrival-rate
/// weighted mean session time, and the total demand volume.
pub fn aggregate_services(mix: &ServiceMix) -> Result<DemandProfile> {
    let first = mix
        .first()
        .ok_or_else(|| Error::Empty("service mix has no components".into()))?;
    let pixels = first.num_pixels();
    if mix.iter().any(|p| p.num_pixels() != pixels) {
        return Err(Error::Dimension("service grids differ in size".into()));
    }

    let mut demand = vec![0.0; pixels];
    for service in mix {
        for (d, r) in demand.iter_mut().zip(pixel_demand(service)) {
            *d += r;
        }
    }
    let total: f64 = demand.iter().sum();
    if total <= 0.0 {
        return Err(Error::Config("aggregate demand is zero".into()));
    }
    let gamma: Vec<f64> = demand.iter().map(|&d| d / total).collect();

    let arrival_rate: f64 = mix.iter().map(|p| 1.0 / p.mean_interarrival_s).sum();
    let mean_interarrival = 1.0 / arrival_rate;
    let mean_session: f64 = mix
        .iter()
        .map(|p| p.mean_session_s / (p.mean_interarrival_s * arrival_rate))
        .sum();
    let min_rate = total * mean_interarrival / mean_session;
    DemandProfile::new(gamma, mean_interarrival, mean_session, min_rate)
}

/// Synthetic irregular demand: a mixture of 2-D Gaussian hotspots over a
/// uniform floor, deterministic for a given seed.
pub fn hotspot_distribution(
    rows: usize,
    cols: usize,
    pixel_size_m: f64,
    hotspots: usize,
    sigma_m: f64,
    floor: f64,
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = cols as f64 * pixel_size_m;
    let height = rows as f64 * pixel_size_m;
    let centers: Vec<[f64; 2]> = (0..hotspots)
        .map(|_| [rng.gen::<f64>() * width, rng.gen::<f64>() * height])
        .collect();

    let mut weights = vec![floor.max(0.0); rows * cols];
    for (a, w) in weights.iter_mut().enumerate() {
        let row = a / cols;
        let col = a % cols;
        let x = (col as f64 + 0.5) * pixel_size_m;
        let y = (row as f64 + 0.5) * pixel_size_m;
        for c in &centers {
            let d2 = (x - c[0]).powi(2) + (y - c[1]).powi(2);
            *w += (-d2 / (2.0 * sigma_m * sigma_m)).exp();
        }
    }
    let sum: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= sum);
    weights
}

/// Kullback-Leibler divergence of a distribution from uniform, in nats.
/// Zero exactly when the distribution is uniform.
pub fn kl_from_uniform(gamma: &[f64]) -> f64 {
    let n = gamma.len() as f64;
    gamma
        .iter()
        .filter(|&&g| g > 0.0)
        .map(|&g| g * (g * n).ln())
        .sum()
}

/// A demand grid read from disk: weights in pixel-row-major order.
#[derive(Debug, Clone)]
pub struct DemandGrid {
    pub rows: usize,
    pub cols: usize,
    pub gamma: Vec<f64>,
}

/// Reads a whitespace-delimited demand grid. The first non-comment line is
/// `rows cols`; the body holds `rows` lines of `cols` nonnegative weights.
/// With `normalize` the weights are scaled to sum to one; otherwise they must
/// already be normalized.
pub fn load_demand_grid(path: impl AsRef<Path>, normalize: bool) -> Result<DemandGrid> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#'));

    let header = lines
        .next()
        .ok_or_else(|| Error::format(path, "missing header line"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::format(path, format!("bad header '{header}'")))?;
    let [rows, cols] = dims[..] else {
        return Err(Error::format(path, "header must be 'rows cols'"));
    };

    let mut gamma = Vec::with_capacity(rows * cols);
    for (i, line) in lines.enumerate() {
        if i >= rows {
            if !line.trim().is_empty() {
                return Err(Error::format(path, format!("more than {rows} data rows")));
            }
            continue;
        }
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::format(path, format!("bad value in row {}", i + 1)))?;
        if values.len() != cols {
            return Err(Error::format(
                path,
                format!("row {} has {} values, expected {cols}", i + 1, values.len()),
            ));
        }
        if let Some(bad) = values.iter().find(|&&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::format(
                path,
                format!("negative or non-finite weight {bad} in row {}", i + 1),
            ));
        }
        gamma.extend(values);
    }
    if gamma.len() != rows * cols {
        return Err(Error::format(
            path,
            format!("grid has {} values, expected {}", gamma.len(), rows * cols),
        ));
    }

    let sum: f64 = gamma.iter().sum();
    if sum <= 0.0 {
        return Err(Error::format(path, "demand grid is all zero"));
    }
    if normalize {
        gamma.iter_mut().for_each(|g| *g /= sum);
    } else if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::format(
            path,
            format!("weights sum to {sum}; pass --normalize or fix the grid"),
        ));
    }
    Ok(DemandGrid { rows, cols, gamma })
}

/// Writes a demand grid in the format accepted by [`load_demand_grid`].
pub fn save_demand_grid(
    path: impl AsRef<Path>,
    rows: usize,
    cols: usize,
    gamma: &[f64],
) -> Result<()> {
    if gamma.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "{} weights cannot fill a {rows}x{cols} grid",
            gamma.len()
        )));
    }
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(file, "{rows} {cols}")?;
    for row in 0..rows {
        let line: Vec<String> = (0..cols)
            .map(|col| format!("{}", gamma[row * cols + col]))
            .collect();
        writeln!(file, "{}", line.join(" "))?;
    }
    Ok(())
}
