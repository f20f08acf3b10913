use std::fmt;
use std::sync::Arc;

use nalgebra::SMatrix;

use super::jet::Jet2;
use super::GeomError;

/// Metric components as jets in the chart coordinates.
pub type MetricJets<const D: usize> = [[Jet2<D>; D]; D];

type MetricFn<const D: usize> = dyn Fn(&[Jet2<D>; D]) -> MetricJets<D> + Send + Sync;
type DomainFn<const D: usize> = dyn Fn(&[f64; D]) -> bool + Send + Sync;
type ChartMap<const D: usize> = dyn Fn(&[Jet2<D>; D]) -> ([Jet2<D>; D], [[Jet2<D>; D]; D]) + Send + Sync;

/// A coordinate chart with a metric evaluable on jets.
///
/// Feeding seeded coordinate jets through the metric function gives the
/// components together with their first and second partial derivatives.
#[derive(Clone)]
pub struct ChartMetric<const D: usize> {
    name: String,
    metric: Arc<MetricFn<D>>,
    domain: Arc<DomainFn<D>>,
}

impl<const D: usize> fmt::Debug for ChartMetric<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartMetric")
            .field("name", &self.name)
            .field("dim", &D)
            .finish()
    }
}

impl<const D: usize> ChartMetric<D> {
    pub fn new<M, P>(name: impl Into<String>, metric: M, domain: P) -> Self
    where
        M: Fn(&[Jet2<D>; D]) -> MetricJets<D> + Send + Sync + 'static,
        P: Fn(&[f64; D]) -> bool + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            metric: Arc::new(metric),
            domain: Arc::new(domain),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        D
    }

    pub fn contains(&self, point: &[f64; D]) -> bool {
        point.iter().all(|x| x.is_finite()) && (self.domain)(point)
    }

    /// Metric jets at `point`, i.e. `g_ij`, `d_k g_ij` and `d_k d_l g_ij`.
    pub fn metric_jets(&self, point: &[f64; D]) -> Result<MetricJets<D>, GeomError> {
        if !self.contains(point) {
            return Err(GeomError::OutOfDomain(point.to_vec()));
        }
        Ok((self.metric)(&Jet2::seed(point)))
    }

    /// Metric components only. Used by the finite-difference oracle, which
    /// must not look at the jet derivatives.
    pub fn metric_values(&self, point: &[f64; D]) -> Result<[[f64; D]; D], GeomError> {
        if !self.contains(point) {
            return Err(GeomError::OutOfDomain(point.to_vec()));
        }
        let coords: [Jet2<D>; D] = std::array::from_fn(|i| Jet2::constant(point[i]));
        let jets = (self.metric)(&coords);
        Ok(std::array::from_fn(|i| std::array::from_fn(|j| jets[i][j].value)))
    }

    /// Checks symmetry and positive definiteness (Cholesky) at `point`.
    pub fn check_metric(&self, point: &[f64; D]) -> Result<(), GeomError> {
        let g = self.metric_values(point)?;
        let scale = g.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..D {
            for j in 0..i {
                if (g[i][j] - g[j][i]).abs() > 1e-12 * scale {
                    return Err(GeomError::NotSymmetric(point.to_vec()));
                }
            }
        }
        let matrix = SMatrix::<f64, D, D>::from_fn(|i, j| g[i][j]);
        if matrix.cholesky().is_none() {
            return Err(GeomError::NotPositiveDefinite(point.to_vec()));
        }
        Ok(())
    }

    /// The constant multiple `factor * g` on the same chart.
    pub fn scaled(&self, factor: f64) -> Self {
        let inner = Arc::clone(&self.metric);
        Self {
            name: format!("{} x {factor}", self.name),
            metric: Arc::new(move |x| {
                let g = inner(x);
                std::array::from_fn(|i| std::array::from_fn(|j| g[i][j] * factor))
            }),
            domain: Arc::clone(&self.domain),
        }
    }

    /// Pullback along a coordinate change `x = map(y)`. The map returns the
    /// image coordinates and the Jacobian `dx^i/dy^a`, both as jets in `y`,
    /// so that second derivatives of the pulled-back metric stay exact.
    pub fn pullback<M, P>(&self, name: impl Into<String>, map: M, domain: P) -> Self
    where
        M: Fn(&[Jet2<D>; D]) -> ([Jet2<D>; D], [[Jet2<D>; D]; D]) + Send + Sync + 'static,
        P: Fn(&[f64; D]) -> bool + Send + Sync + 'static,
    {
        let inner = Arc::clone(&self.metric);
        let map: Arc<ChartMap<D>> = Arc::new(map);
        Self {
            name: name.into(),
            metric: Arc::new(move |y| {
                let (x, jac) = map(y);
                let g = inner(&x);
                std::array::from_fn(|a| {
                    std::array::from_fn(|b| {
                        let mut acc = Jet2::constant(0.0);
                        for i in 0..D {
                            for j in 0..D {
                                acc += g[i][j] * jac[i][a] * jac[j][b];
                            }
                        }
                        acc
                    })
                })
            }),
            domain: Arc::new(domain),
        }
    }
}
