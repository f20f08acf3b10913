//! Levi-Civita connection and curvature from metric derivatives.
//!
//! Conventions: `R_iklm = (d_k d_l g_im + d_i d_m g_kl - d_k d_m g_il
//! - d_i d_l g_km)/2 + g_np (G^n_kl G^p_im - G^n_km G^p_il)` and
//! `Ric_km = g^il R_iklm`. A round sphere has `R(X,Y,X,Y) > 0`.

use nalgebra::SMatrix;
use serde::Serialize;

use super::chart::{ChartMetric, MetricJets};
use super::GeomError;

pub type Christoffel<const D: usize> = [[[f64; D]; D]; D];
pub type Riemann<const D: usize> = [[[[f64; D]; D]; D]; D];

/// Relative tolerance for the algebraic symmetries of the Riemann tensor.
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;

/// `g_ij`, `dg[k][i][j] = d_k g_ij` and `ddg[k][l][i][j] = d_k d_l g_ij`.
#[derive(Clone, Debug)]
pub struct MetricDerivatives<const D: usize> {
    pub g: [[f64; D]; D],
    pub dg: [[[f64; D]; D]; D],
    pub ddg: [[[[f64; D]; D]; D]; D],
}

impl<const D: usize> MetricDerivatives<D> {
    pub fn from_jets(jets: &MetricJets<D>) -> Self {
        Self {
            g: std::array::from_fn(|i| std::array::from_fn(|j| jets[i][j].value)),
            dg: std::array::from_fn(|k| std::array::from_fn(|i| std::array::from_fn(|j| jets[i][j].grad[k]))),
            ddg: std::array::from_fn(|k| {
                std::array::from_fn(|l| {
                    std::array::from_fn(|i| {
                        std::array::from_fn(|j| 0.5 * (jets[i][j].hess[k][l] + jets[i][j].hess[l][k]))
                    })
                })
            }),
        }
    }
}

/// Connection and curvature at one point.
#[derive(Clone, Debug)]
pub struct CurvatureReport<const D: usize> {
    pub point: [f64; D],
    pub metric: [[f64; D]; D],
    pub inverse: [[f64; D]; D],
    /// `christoffel[k][i][j] = G^k_ij`.
    pub christoffel: Christoffel<D>,
    /// Fully lowered `R_abcd`.
    pub riemann: Riemann<D>,
    pub ricci: [[f64; D]; D],
    pub scalar: f64,
    pub symmetry_max: f64,
    pub bianchi_max: f64,
}

/// JSON-facing summary of a [`CurvatureReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointSummary {
    pub point: Vec<f64>,
    pub einstein_residual: f64,
    pub scalar: f64,
    pub bianchi_max: f64,
    pub symmetry_max: f64,
}

fn max_abs<'a>(values: impl IntoIterator<Item = &'a f64>) -> f64 {
    values.into_iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

impl<const D: usize> CurvatureReport<D> {
    pub fn from_derivatives(point: [f64; D], d: &MetricDerivatives<D>) -> Result<Self, GeomError> {
        let g = d.g;
        let matrix = SMatrix::<f64, D, D>::from_fn(|i, j| g[i][j]);
        let inv_matrix = matrix
            .try_inverse()
            .filter(|m| m.iter().all(|x| x.is_finite()))
            .ok_or_else(|| GeomError::SingularMetric(point.to_vec()))?;
        let inverse: [[f64; D]; D] = std::array::from_fn(|i| std::array::from_fn(|j| inv_matrix[(i, j)]));

        // first kind: G_lij = (d_i g_jl + d_j g_il - d_l g_ij) / 2
        let first: Christoffel<D> = std::array::from_fn(|l| {
            std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (d.dg[i][j][l] + d.dg[j][i][l] - d.dg[l][i][j])))
        });
        let christoffel: Christoffel<D> = std::array::from_fn(|k| {
            std::array::from_fn(|i| std::array::from_fn(|j| (0..D).map(|l| inverse[k][l] * first[l][i][j]).sum()))
        });

        let mut riemann = [[[[0.0; D]; D]; D]; D];
        for i in 0..D {
            for k in 0..D {
                for l in 0..D {
                    for m in 0..D {
                        let second = 0.5
                            * (d.ddg[k][l][i][m] + d.ddg[i][m][k][l] - d.ddg[k][m][i][l] - d.ddg[i][l][k][m]);
                        let mut quad = 0.0;
                        for nn in 0..D {
                            for p in 0..D {
                                quad += g[nn][p]
                                    * (christoffel[nn][k][l] * christoffel[p][i][m]
                                        - christoffel[nn][k][m] * christoffel[p][i][l]);
                            }
                        }
                        riemann[i][k][l][m] = second + quad;
                    }
                }
            }
        }

        let ricci: [[f64; D]; D] = std::array::from_fn(|k| {
            std::array::from_fn(|m| {
                let mut acc = 0.0;
                for i in 0..D {
                    for l in 0..D {
                        acc += inverse[i][l] * riemann[i][k][l][m];
                    }
                }
                acc
            })
        });
        let mut scalar = 0.0;
        for k in 0..D {
            for m in 0..D {
                scalar += inverse[k][m] * ricci[k][m];
            }
        }

        let g_max = max_abs(g.iter().flatten());
        let r_max = max_abs(riemann.iter().flatten().flatten().flatten());
        let scale = r_max.max(g_max * g_max);
        let mut symmetry_max = 0.0f64;
        let mut bianchi_max = 0.0f64;
        for a in 0..D {
            for b in 0..D {
                for c in 0..D {
                    for e in 0..D {
                        let r = riemann[a][b][c][e];
                        symmetry_max = symmetry_max
                            .max((r + riemann[b][a][c][e]).abs())
                            .max((r + riemann[a][b][e][c]).abs())
                            .max((r - riemann[c][e][a][b]).abs());
                        bianchi_max = bianchi_max.max((r + riemann[a][c][e][b] + riemann[a][e][b][c]).abs());
                    }
                }
            }
        }
        symmetry_max /= scale;
        bianchi_max /= scale;
        if symmetry_max > SYMMETRY_TOLERANCE || bianchi_max > SYMMETRY_TOLERANCE {
            return Err(GeomError::SymmetryViolation {
                symmetry: symmetry_max,
                bianchi: bianchi_max,
            });
        }

        Ok(Self {
            point,
            metric: g,
            inverse,
            christoffel,
            riemann,
            ricci,
            scalar,
            symmetry_max,
            bianchi_max,
        })
    }

    /// `max |Ric_ij - lambda g_ij| / max |g_ij|`.
    pub fn einstein_residual(&self, lambda: f64) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..D {
            for j in 0..D {
                worst = worst.max((self.ricci[i][j] - lambda * self.metric[i][j]).abs());
            }
        }
        worst / max_abs(self.metric.iter().flatten())
    }

    /// `g^ac g^bd R_abcd`, a second route to the scalar curvature.
    pub fn full_contraction(&self) -> f64 {
        let mut acc = 0.0;
        for a in 0..D {
            for b in 0..D {
                for c in 0..D {
                    for e in 0..D {
                        acc += self.inverse[a][c] * self.inverse[b][e] * self.riemann[a][b][c][e];
                    }
                }
            }
        }
        acc
    }

    pub fn inner(&self, x: &[f64; D], y: &[f64; D]) -> f64 {
        let mut acc = 0.0;
        for i in 0..D {
            for j in 0..D {
                acc += self.metric[i][j] * x[i] * y[j];
            }
        }
        acc
    }

    /// Sectional curvature of the plane spanned by `x` and `y`:
    /// `R(x,y,x,y) / (|x|^2 |y|^2 - <x,y>^2)`.
    pub fn sectional(&self, x: &[f64; D], y: &[f64; D]) -> Result<f64, GeomError> {
        let xx = self.inner(x, x);
        let yy = self.inner(y, y);
        let xy = self.inner(x, y);
        let area = xx * yy - xy * xy;
        if area < 1e-12 * xx * yy || !area.is_finite() {
            return Err(GeomError::DegeneratePlane);
        }
        let mut num = 0.0;
        for a in 0..D {
            for b in 0..D {
                for c in 0..D {
                    for e in 0..D {
                        num += self.riemann[a][b][c][e] * x[a] * y[b] * x[c] * y[e];
                    }
                }
            }
        }
        Ok(num / area)
    }

    /// Columns of a `g`-orthonormal frame, from the Cholesky factor of `g`.
    pub fn orthonormal_frame(&self) -> Result<[[f64; D]; D], GeomError> {
        let matrix = SMatrix::<f64, D, D>::from_fn(|i, j| self.metric[i][j]);
        let chol = matrix
            .cholesky()
            .ok_or_else(|| GeomError::NotPositiveDefinite(self.point.to_vec()))?;
        // g = L L^T, so the columns of L^-T are orthonormal.
        let l_inv_t = chol
            .l()
            .try_inverse()
            .ok_or_else(|| GeomError::SingularMetric(self.point.to_vec()))?
            .transpose();
        Ok(std::array::from_fn(|a| std::array::from_fn(|i| l_inv_t[(i, a)])))
    }

    pub fn summary(&self, lambda: f64) -> PointSummary {
        PointSummary {
            point: self.point.to_vec(),
            einstein_residual: self.einstein_residual(lambda),
            scalar: self.scalar,
            bianchi_max: self.bianchi_max,
            symmetry_max: self.symmetry_max,
        }
    }

    /// Largest Riemann difference relative to the larger of the two tensors.
    pub fn riemann_difference(&self, other: &Self) -> f64 {
        let scale = max_abs(self.riemann.iter().flatten().flatten().flatten())
            .max(max_abs(other.riemann.iter().flatten().flatten().flatten()));
        let mut worst = 0.0f64;
        for a in 0..D {
            for b in 0..D {
                for c in 0..D {
                    for e in 0..D {
                        worst = worst.max((self.riemann[a][b][c][e] - other.riemann[a][b][c][e]).abs());
                    }
                }
            }
        }
        if scale == 0.0 {
            worst
        } else {
            worst / scale
        }
    }

    /// Largest Christoffel difference relative to the larger of the two.
    pub fn christoffel_difference(&self, other: &Self) -> f64 {
        let scale = max_abs(self.christoffel.iter().flatten().flatten())
            .max(max_abs(other.christoffel.iter().flatten().flatten()));
        let mut worst = 0.0f64;
        for k in 0..D {
            for i in 0..D {
                for j in 0..D {
                    worst = worst.max((self.christoffel[k][i][j] - other.christoffel[k][i][j]).abs());
                }
            }
        }
        if scale == 0.0 {
            worst
        } else {
            worst / scale
        }
    }

    pub fn riemann_max(&self) -> f64 {
        max_abs(self.riemann.iter().flatten().flatten().flatten())
    }
}

/// Jet-based curvature at `point`.
pub fn curvature<const D: usize>(chart: &ChartMetric<D>, point: &[f64; D]) -> Result<CurvatureReport<D>, GeomError> {
    let jets = chart.metric_jets(point)?;
    CurvatureReport::from_derivatives(*point, &MetricDerivatives::from_jets(&jets))
}

pub fn christoffel<const D: usize>(chart: &ChartMetric<D>, point: &[f64; D]) -> Result<Christoffel<D>, GeomError> {
    Ok(curvature(chart, point)?.christoffel)
}

pub fn riemann<const D: usize>(chart: &ChartMetric<D>, point: &[f64; D]) -> Result<Riemann<D>, GeomError> {
    Ok(curvature(chart, point)?.riemann)
}

pub fn ricci<const D: usize>(chart: &ChartMetric<D>, point: &[f64; D]) -> Result<[[f64; D]; D], GeomError> {
    Ok(curvature(chart, point)?.ricci)
}

pub fn scalar<const D: usize>(chart: &ChartMetric<D>, point: &[f64; D]) -> Result<f64, GeomError> {
    Ok(curvature(chart, point)?.scalar)
}

pub fn einstein_residual<const D: usize>(chart: &ChartMetric<D>, lambda: f64, point: &[f64; D]) -> Result<f64, GeomError> {
    Ok(curvature(chart, point)?.einstein_residual(lambda))
}

pub fn sectional<const D: usize>(
    chart: &ChartMetric<D>,
    point: &[f64; D],
    x: &[f64; D],
    y: &[f64; D],
) -> Result<f64, GeomError> {
    curvature(chart, point)?.sectional(x, y)
}
