//! Finite (pseudo-)metric spaces given by a distance matrix.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result, EPS_METRIC};

/// A violated metric axiom, with the offending indices.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricViolation {
    NotFinite { i: usize, j: usize, value: f64 },
    Negative { i: usize, j: usize, value: f64 },
    NonzeroDiagonal { i: usize, value: f64 },
    Asymmetric { i: usize, j: usize, ij: f64, ji: f64 },
    /// `d(i,k) > d(i,j) + d(j,k)`.
    Triangle {
        i: usize,
        j: usize,
        k: usize,
        direct: f64,
        detour: f64,
    },
}

/// Every violated axiom; empty iff the matrix is a (pseudo-)metric.
pub type ValidationReport = Vec<MetricViolation>;

/// Checks the metric axioms within [`EPS_METRIC`].
///
/// Distinct points at distance zero are accepted.
pub fn validate_metric(dist: &[Vec<f64>]) -> Result<ValidationReport> {
    let n = dist.len();
    check_square(dist)?;
    let mut report = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = dist[i][j];
            if !v.is_finite() {
                report.push(MetricViolation::NotFinite { i, j, value: v });
            } else if v < 0.0 {
                report.push(MetricViolation::Negative { i, j, value: v });
            }
        }
    }
    if !report.is_empty() {
        return Ok(report);
    }
    for i in 0..n {
        if dist[i][i].abs() > EPS_METRIC {
            report.push(MetricViolation::NonzeroDiagonal {
                i,
                value: dist[i][i],
            });
        }
        for j in (i + 1)..n {
            if (dist[i][j] - dist[j][i]).abs() > EPS_METRIC {
                report.push(MetricViolation::Asymmetric {
                    i,
                    j,
                    ij: dist[i][j],
                    ji: dist[j][i],
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let direct = dist[i][k];
                let detour = dist[i][j] + dist[j][k];
                if direct > detour + EPS_METRIC {
                    report.push(MetricViolation::Triangle {
                        i,
                        j,
                        k,
                        direct,
                        detour,
                    });
                }
            }
        }
    }
    Ok(report)
}

fn check_square(dist: &[Vec<f64>]) -> Result<()> {
    let n = dist.len();
    for (row, r) in dist.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NonSquareMatrix {
                row,
                len: r.len(),
                expected: n,
            });
        }
    }
    Ok(())
}

/// A finite point set `M` with distances `d(., .)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    point_ids: Vec<String>,
    dist: Vec<Vec<f64>>,
    /// Set when the space was built from line coordinates.
    coords: Option<Vec<f64>>,
}

impl MetricSpace {
    /// Builds a space from an explicit matrix. Only the shape is checked
    /// here; use [`validate_metric`] for the axioms.
    pub fn from_matrix(point_ids: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        check_square(&dist)?;
        if dist.is_empty() {
            return Err(Error::EmptyMetric);
        }
        if point_ids.len() != dist.len() {
            return Err(Error::NonSquareMatrix {
                row: point_ids.len(),
                len: point_ids.len(),
                expected: dist.len(),
            });
        }
        Ok(MetricSpace {
            point_ids,
            dist,
            coords: None,
        })
    }

    /// Builds a space with ids `"0", "1", ..`.
    pub fn from_matrix_default_ids(dist: Vec<Vec<f64>>) -> Result<Self> {
        let ids = (0..dist.len()).map(|i| format!("{i}")).collect();
        Self::from_matrix(ids, dist)
    }

    pub fn single_point() -> Self {
        build_line_metric(&[0.0]).expect("one coordinate")
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn point_ids(&self) -> &[String] {
        &self.point_ids
    }

    pub fn coords(&self) -> Option<&[f64]> {
        self.coords.as_deref()
    }

    pub fn point_index(&self, id: &str) -> Option<usize> {
        self.point_ids.iter().position(|p| p == id)
    }

    pub fn with_point_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.len() {
            return Err(Error::NonSquareMatrix {
                row: ids.len(),
                len: ids.len(),
                expected: self.len(),
            });
        }
        self.point_ids = ids;
        Ok(self)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_metric(&self.dist).expect("square by construction")
    }
}

/// Points on the real line with `d(i,j) = |x_i - x_j|`.
pub fn build_line_metric(coords: &[f64]) -> Result<MetricSpace> {
    if coords.is_empty() {
        return Err(Error::EmptyCoordinates);
    }
    let dist = coords
        .iter()
        .map(|&a| coords.iter().map(|&b| (a - b).abs()).collect())
        .collect();
    let ids = (0..coords.len()).map(|i| format!("{i}")).collect();
    Ok(MetricSpace {
        point_ids: ids,
        dist,
        coords: Some(coords.to_vec()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn single_point_is_valid() {
        assert!(validate_metric(&[vec![0.0]]).unwrap().is_empty());
    }

    #[test]
    fn two_points_valid() {
        assert!(validate_metric(&[vec![0.0, 1.0], vec![1.0, 0.0]])
            .unwrap()
            .is_empty());
    }

    #[test]
    fn triangle_violation_reported() {
        let d = [
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ];
        let rep = validate_metric(&d).unwrap();
        assert!(rep.contains(&MetricViolation::Triangle {
            i: 0,
            j: 1,
            k: 2,
            direct: 3.0,
            detour: 2.0
        }));
        assert!(rep
            .iter()
            .all(|v| matches!(v, MetricViolation::Triangle { .. })));
    }

    #[test]
    fn non_square_is_structural_error() {
        let err = validate_metric(&[vec![0.0, 1.0], vec![1.0]]).unwrap_err();
        assert!(matches!(err, Error::NonSquareMatrix { row: 1, .. }));
    }

    #[test]
    fn asymmetry_and_diagonal() {
        let rep = validate_metric(&[vec![0.5, 1.0], vec![2.0, 0.0]]).unwrap();
        assert!(rep
            .iter()
            .any(|v| matches!(v, MetricViolation::NonzeroDiagonal { i: 0, .. })));
        assert!(rep
            .iter()
            .any(|v| matches!(v, MetricViolation::Asymmetric { i: 0, j: 1, .. })));
    }

    #[test]
    fn line_metric_examples() {
        let m = build_line_metric(&[0.0]).unwrap();
        assert_eq!(m.matrix(), &[vec![0.0]]);
        let m = build_line_metric(&[0.0, 2.0, 5.0]).unwrap();
        assert_eq!(m.dist(0, 2), 5.0);
        assert_eq!(m.dist(0, 1), 2.0);
        assert_eq!(m.dist(1, 2), 3.0);
        assert!(m.validate().is_empty());
        let m = build_line_metric(&[1.0, 1.0]).unwrap();
        assert_eq!(m.dist(0, 1), 0.0);
        assert!(m.validate().is_empty());
    }
}
