use std::fmt;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::error::{interior_interval, l2_ratio, trapezoid, ERROR_QUAD_DIVISIONS};
use super::{realize_signal, sample_signal, DEFAULT_JITTER};
use crate::dibasis::{DiBasis, Shaping, DEFAULT_GAMMA};
use crate::domain::io::fmt_real;
use crate::domain::{realize_domain, SubdomainSet};
use crate::interp::{interpolate_bsi, interpolate_dibsi};
use crate::seed::{derive_seed, DOMAIN_TAG, SIGNAL_TAG};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Method {
    #[serde(rename = "BSI")]
    Bsi,
    #[serde(rename = "DIBSI")]
    Dibsi,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Bsi => "BSI",
            Method::Dibsi => "DIBSI",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloConfig {
    pub domains: usize,
    pub signals: usize,
    pub orders: Vec<usize>,
    pub steps: Vec<f64>,
    pub gamma: f64,
    pub master_seed: u64,
    pub subdomains: usize,
    pub kernels: usize,
    pub lo: f64,
    pub hi: f64,
    pub jitter: f64,
    /// Order of the ground-truth splines; `None` matches the interpolation
    /// order under test.
    pub truth_order: Option<usize>,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            domains: 20,
            signals: 20,
            orders: (1..=6).collect(),
            steps: (1..=10).map(|i| i as f64 / 10.0).collect(),
            gamma: DEFAULT_GAMMA,
            master_seed: 0,
            subdomains: 2,
            kernels: 9,
            lo: 1.0,
            hi: 30.0,
            jitter: DEFAULT_JITTER,
            truth_order: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorEntry {
    pub method: Method,
    pub order: usize,
    pub step: f64,
    pub error: f64,
}

/// Ensemble relative errors `ε(T) = (1/DS) Σ_i Σ_j ‖s̃ − s‖/‖s‖`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTable {
    /// Ordered by order, then step, then method.
    pub entries: Vec<ErrorEntry>,
    pub domains: usize,
    pub signals: usize,
    pub master_seed: u64,
}

impl ErrorTable {
    pub fn get(&self, method: Method, order: usize, step: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.method == method && e.order == order && e.step == step)
            .map(|e| e.error)
    }

    /// CSV with columns `method, order, T, ensemble_error`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["method", "order", "T", "ensemble_error"])?;
        for e in &self.entries {
            w.write_record([
                e.method.to_string(),
                e.order.to_string(),
                fmt_real(e.step),
                fmt_real(e.error),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn validate(cfg: &MonteCarloConfig) -> Result<()> {
    if cfg.domains == 0 || cfg.signals == 0 {
        return Err(Error::invalid("need at least one domain and one signal"));
    }
    if cfg.orders.is_empty() || cfg.steps.is_empty() {
        return Err(Error::invalid("need at least one order and one step"));
    }
    if let Some(t) = cfg.steps.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::invalid(format!(
            "sampling steps must be positive, got {t}"
        )));
    }
    Shaping::logistic(cfg.gamma)?;
    Ok(())
}

/// Per-realization error ratios in table order (order, step, method).
fn realization_errors(
    cfg: &MonteCarloConfig,
    dom: &Arc<SubdomainSet<f64>>,
    i: usize,
    j: usize,
) -> Result<Vec<f64>> {
    let shaping = Shaping::logistic(cfg.gamma)?;
    let seed = derive_seed(cfg.master_seed, &[SIGNAL_TAG, i as u64, j as u64]);
    let mut out = Vec::with_capacity(2 * cfg.orders.len() * cfg.steps.len());
    for &order in &cfg.orders {
        let truth = realize_signal(
            dom.clone(),
            cfg.truth_order.unwrap_or(order),
            cfg.jitter,
            seed,
        )?;
        for &t in &cfg.steps {
            let samples = sample_signal(&truth, t, cfg.lo, cfg.hi)?;
            let (a, b) = interior_interval(&samples, order)?;
            let (nodes, weights) = trapezoid(a, b, t / ERROR_QUAD_DIVISIONS as f64);
            let exact: Vec<f64> = nodes.iter().map(|&x| truth.eval(x)).collect();
            let (k0, k1) = (samples.k_offset(), samples.last_index());
            let basis = DiBasis::with_sample_range(dom.clone(), order, t, shaping, k0, k1)?;
            let dibsi = interpolate_dibsi(&samples, Arc::new(basis))?;
            let bsi = interpolate_bsi(&samples, order)?;
            out.push(l2_ratio(&exact, &bsi.evaluate_many(&nodes)?, &weights)?);
            out.push(l2_ratio(&exact, &dibsi.evaluate_many(&nodes)?, &weights)?);
        }
    }
    Ok(out)
}

/// Runs the `D × S` ensemble on the current rayon pool. Results do not
/// depend on the pool size: every realization has its own derived seed and
/// the ensemble sums are taken in a fixed order.
pub fn monte_carlo(cfg: &MonteCarloConfig) -> Result<ErrorTable> {
    validate(cfg)?;
    let domains: Vec<Arc<SubdomainSet<f64>>> = (0..cfg.domains)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.master_seed, &[DOMAIN_TAG, i as u64]);
            realize_domain(cfg.subdomains, cfg.kernels, cfg.lo, cfg.hi, seed).map(Arc::new)
        })
        .collect::<Result<_>>()?;
    let tasks: Vec<(usize, usize)> = (0..cfg.domains)
        .flat_map(|i| (0..cfg.signals).map(move |j| (i, j)))
        .collect();
    let per_task: Vec<Vec<f64>> = tasks
        .par_iter()
        .map(|&(i, j)| realization_errors(cfg, &domains[i], i, j))
        .collect::<Result<_>>()?;

    let cells = 2 * cfg.orders.len() * cfg.steps.len();
    let mut sums = vec![0.0; cells];
    for errs in &per_task {
        for (s, e) in sums.iter_mut().zip(errs) {
            *s += e;
        }
    }
    let total = (cfg.domains * cfg.signals) as f64;
    let mut entries = Vec::with_capacity(cells);
    let mut it = sums.into_iter();
    for &order in &cfg.orders {
        for &step in &cfg.steps {
            for method in [Method::Bsi, Method::Dibsi] {
                entries.push(ErrorEntry {
                    method,
                    order,
                    step,
                    error: it.next().unwrap() / total,
                });
            }
        }
    }
    Ok(ErrorTable {
        entries,
        domains: cfg.domains,
        signals: cfg.signals,
        master_seed: cfg.master_seed,
    })
}
