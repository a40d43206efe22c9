//! Realizing squared-distance tables as actual point sets.
//!
//! This is the one corner of the crate that works in floating point: the
//! centered Gram matrix `G = -1/2 J D J` of a squared-Euclidean table is
//! positive semidefinite, so coordinates fall out of its spectral square
//! root. A negative eigenvalue beyond tolerance certifies that no embedding
//! exists. The achieved dimension is the numerical rank of `G`.

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbedError {
    #[error("distance matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("distance matrix is asymmetric at ({i},{j}): {a} vs {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("distance matrix has nonzero diagonal at {i}: {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("table is not embeddable in squared Euclidean space (Gram eigenvalue {0})")]
    NegativeEigenvalue(f64),
    #[error("reconstruction error {error} exceeds tolerance {tolerance}")]
    ToleranceExceeded { error: f64, tolerance: f64 },
}

/// An embedding certificate: coordinates whose pairwise squared distances
/// reproduce the input table within `tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedPoints {
    pub coords: Vec<Vec<f64>>,
    /// Numerical rank of the centered Gram matrix.
    pub dimension: usize,
    pub reconstruction_error: f64,
    pub tolerance: f64,
    /// Gram eigenvalues in descending order, for diagnostics.
    pub eigenvalues: Vec<f64>,
}

fn check_input(d: &DMatrix<f64>, tol: f64) -> Result<(), EmbedError> {
    if d.nrows() != d.ncols() {
        return Err(EmbedError::NotSquare {
            rows: d.nrows(),
            cols: d.ncols(),
        });
    }
    for i in 0..d.nrows() {
        if d[(i, i)].abs() > tol {
            return Err(EmbedError::NonzeroDiagonal {
                i,
                value: d[(i, i)],
            });
        }
        for j in 0..i {
            if (d[(i, j)] - d[(j, i)]).abs() > tol {
                return Err(EmbedError::Asymmetric {
                    i,
                    j,
                    a: d[(i, j)],
                    b: d[(j, i)],
                });
            }
        }
    }
    Ok(())
}

/// `-1/2 J D J` computed via row/grand means, symmetric by construction.
fn centered_gram(d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = d.nrows();
    let row_means: Vec<f64> = (0..n).map(|i| d.row(i).sum() / n as f64).collect();
    let grand_mean = row_means.iter().sum::<f64>() / n as f64;
    DMatrix::from_fn(n, n, |i, j| {
        -0.5 * (d[(i, j)] - row_means[i] - row_means[j] + grand_mean)
    })
}

/// Eigenvalues (descending) and matching eigenvectors of a symmetric matrix.
fn eigen_sorted(g: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let SymmetricEigen {
        eigenvalues,
        eigenvectors,
    } = SymmetricEigen::new(g);
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&k| eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(eigenvectors.nrows(), order.len(), |i, k| {
        eigenvectors[(i, order[k])]
    });
    (values, vectors)
}

/// Embeds a squared-distance table, or reports why it cannot be done.
///
/// Eigenvalues in `(-tol, tol]` are truncated; an eigenvalue below `-tol`
/// means the table is not a squared-Euclidean metric and is an error.
pub fn embed_squared_euclidean(d: &DMatrix<f64>, tol: f64) -> Result<EmbeddedPoints, EmbedError> {
    check_input(d, tol)?;
    let n = d.nrows();
    if n == 0 {
        return Ok(EmbeddedPoints {
            coords: Vec::new(),
            dimension: 0,
            reconstruction_error: 0.0,
            tolerance: tol,
            eigenvalues: Vec::new(),
        });
    }
    let (eigenvalues, eigenvectors) = eigen_sorted(centered_gram(d));
    if let Some(&smallest) = eigenvalues.last() {
        if smallest < -tol {
            return Err(EmbedError::NegativeEigenvalue(smallest));
        }
    }
    let rank = eigenvalues.iter().take_while(|&&v| v > tol).count();
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..rank)
                .map(|k| eigenvectors[(i, k)] * eigenvalues[k].sqrt())
                .collect()
        })
        .collect();
    let mut reconstruction_error = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            let have = squared_distance(&coords[i], &coords[j]);
            reconstruction_error = reconstruction_error.max((have - d[(i, j)]).abs());
        }
    }
    if reconstruction_error > tol {
        return Err(EmbedError::ToleranceExceeded {
            error: reconstruction_error,
            tolerance: tol,
        });
    }
    Ok(EmbeddedPoints {
        coords,
        dimension: rank,
        reconstruction_error,
        tolerance: tol,
        eigenvalues,
    })
}

/// Fewest dimensions any isometric embedding of the table can use: the
/// numerical rank of the centered Gram matrix.
pub fn min_embedding_dimension(d: &DMatrix<f64>, tol: f64) -> Result<usize, EmbedError> {
    check_input(d, tol)?;
    if d.nrows() == 0 {
        return Ok(0);
    }
    let (eigenvalues, _) = eigen_sorted(centered_gram(d));
    if let Some(&smallest) = eigenvalues.last() {
        if smallest < -tol {
            return Err(EmbedError::NegativeEigenvalue(smallest));
        }
    }
    Ok(eigenvalues.iter().take_while(|&&v| v > tol).count())
}

/// `dim + 1` points in `dim` dimensions with every pairwise squared distance
/// equal to `target`: the unit vectors plus `((sqrt(dim+1)+1)/dim, ...)`,
/// scaled from their native pairwise squared distance of 2.
pub fn regular_simplex(dim: usize, target: f64) -> Vec<Vec<f64>> {
    assert!(dim >= 1, "simplex needs at least one dimension");
    assert!(target > 0.0, "target squared distance must be positive");
    let scale = (target / 2.0).sqrt();
    let mut points = Vec::with_capacity(dim + 1);
    for i in 0..dim {
        let mut p = vec![0.0; dim];
        p[i] = scale;
        points.push(p);
    }
    let apex = ((dim as f64 + 1.0).sqrt() + 1.0) / dim as f64 * scale;
    points.push(vec![apex; dim]);
    points
}

/// Squared distance from each vertex of a regular simplex to its centroid:
/// `c * D / (D+1)^2 * (1 + (D-1)/2)` for pairwise squared distance `c`.
pub fn centroid_distance(dim: usize, c: f64) -> f64 {
    assert!(dim >= 1);
    let d = dim as f64;
    c * d / ((d + 1.0) * (d + 1.0)) * (1.0 + (d - 1.0) / 2.0)
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The squared-distance table of a point set, as a dense matrix.
pub fn pairwise_squared_distances(points: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(points.len(), points.len(), |i, j| {
        squared_distance(&points[i], &points[j])
    })
}
