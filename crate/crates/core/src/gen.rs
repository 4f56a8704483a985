//! Synthetic Euclidean instances.
//!
//! Two families: uniform points clustered by an `rows x cols` grid of cells,
//! and Gaussian clouds around random centres. Names follow the
//! `<k>rand<n>[-RxC]` pattern; the `rand` tag marks them as synthetic.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::instance::{ClusteredInstance, InstanceError, Point};
use crate::rng::generator;

/// Attempts at drawing a point set that leaves no grid cell empty.
pub const MAX_GRID_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("could not populate all {cells} grid cells in {attempts} attempts")]
    UnableToPopulateCells { cells: usize, attempts: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

fn check_extent(extent: f64) -> Result<(), GenError> {
    if !(extent > 0.0) || !extent.is_finite() {
        return Err(GenError::InvalidParameters(format!("extent must be positive, got {extent}")));
    }
    Ok(())
}

/// `n` uniform points in `[0, extent]^2`, clustered by grid cell (row-major
/// cluster ids, row 0 at the bottom).
pub fn generate_grid(n: usize, rows: usize, cols: usize, extent: f64, seed: u64) -> Result<ClusteredInstance, GenError> {
    let cells = rows * cols;
    if cells == 0 {
        return Err(GenError::InvalidParameters("rows and cols must be positive".into()));
    }
    if n < cells {
        return Err(GenError::InvalidParameters(format!("{n} points cannot fill {cells} cells")));
    }
    check_extent(extent)?;
    let mut rng = generator(seed);
    let cell_of = |p: &Point| {
        let c = ((p.x / extent * cols as f64) as usize).min(cols - 1);
        let r = ((p.y / extent * rows as f64) as usize).min(rows - 1);
        r * cols + c
    };
    for _ in 0..MAX_GRID_ATTEMPTS {
        let coords: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.random_range(0.0..=extent), rng.random_range(0.0..=extent)))
            .collect();
        let mut clusters = vec![Vec::new(); cells];
        for (v, p) in coords.iter().enumerate() {
            clusters[cell_of(p)].push(v);
        }
        if clusters.iter().any(Vec::is_empty) {
            continue;
        }
        let source = rng.random_range(0..n);
        let name = format!("{cells}rand{n}-{rows}x{cols}");
        return Ok(ClusteredInstance::euclidean(name, coords, clusters, source)?);
    }
    Err(GenError::UnableToPopulateCells { cells, attempts: MAX_GRID_ATTEMPTS })
}

/// `k` centres uniform in `[0, extent]^2`; each point is Gaussian around its
/// centre with standard deviation `spread`. The first `k` points go one to
/// each centre, the rest pick a centre uniformly.
pub fn generate_clustered(n: usize, k: usize, spread: f64, extent: f64, seed: u64) -> Result<ClusteredInstance, GenError> {
    if k == 0 || n < k {
        return Err(GenError::InvalidParameters(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    check_extent(extent)?;
    let noise = Normal::new(0.0, spread)
        .map_err(|_| GenError::InvalidParameters(format!("spread must be finite and nonnegative, got {spread}")))?;
    let mut rng = generator(seed);
    let centres: Vec<Point> = (0..k)
        .map(|_| Point::new(rng.random_range(0.0..=extent), rng.random_range(0.0..=extent)))
        .collect();
    let mut coords = Vec::with_capacity(n);
    let mut clusters = vec![Vec::new(); k];
    for v in 0..n {
        let c = if v < k { v } else { rng.random_range(0..k) };
        let centre = centres[c];
        coords.push(Point::new(centre.x + noise.sample(&mut rng), centre.y + noise.sample(&mut rng)));
        clusters[c].push(v);
    }
    let source = rng.random_range(0..n);
    Ok(ClusteredInstance::euclidean(format!("{k}rand{n}"), coords, clusters, source)?)
}
