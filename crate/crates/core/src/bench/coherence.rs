use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::dibasis::{DiBasis, Shaping};
use crate::domain::realize_domain;
use crate::seed::{derive_seed, DOMAIN_TAG};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceConfig {
    pub domains: usize,
    pub orders: Vec<usize>,
    pub gammas: Vec<f64>,
    pub subdomains: usize,
    pub kernels: usize,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    pub master_seed: u64,
}

impl Default for CoherenceConfig {
    fn default() -> Self {
        Self {
            domains: 50,
            orders: (1..=7).collect(),
            gammas: vec![1.0, 5.0, 10.0, 20.0, 50.0],
            subdomains: 2,
            kernels: 9,
            lo: 1.0,
            hi: 30.0,
            step: 1.0,
            master_seed: 0,
        }
    }
}

/// Coherence factor statistics over the domain ensemble for one
/// `(order, γ)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherenceCell {
    pub order: usize,
    pub gamma: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Coherence factors of domain-informed bases over `D` seeded random
/// domains, for every order and γ. Cells are ordered by order, then γ.
pub fn coherence_study(cfg: &CoherenceConfig) -> Result<Vec<CoherenceCell>> {
    if cfg.domains == 0 || cfg.orders.is_empty() || cfg.gammas.is_empty() {
        return Err(Error::invalid(
            "coherence study needs domains, orders and γ values",
        ));
    }
    let shapings = cfg
        .gammas
        .iter()
        .map(|&g| Shaping::logistic(g))
        .collect::<Result<Vec<_>>>()?;
    let per_domain: Vec<Vec<f64>> = (0..cfg.domains)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.master_seed, &[DOMAIN_TAG, i as u64]);
            let dom = Arc::new(realize_domain(
                cfg.subdomains,
                cfg.kernels,
                cfg.lo,
                cfg.hi,
                seed,
            )?);
            let mut out = Vec::with_capacity(cfg.orders.len() * shapings.len());
            for &order in &cfg.orders {
                for &shaping in &shapings {
                    out.push(
                        DiBasis::new(dom.clone(), order, cfg.step, shaping)?.coherence_factor(),
                    );
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut cells = Vec::new();
    let mut idx = 0;
    for &order in &cfg.orders {
        for &gamma in &cfg.gammas {
            let vals = per_domain.iter().map(|v| v[idx]);
            let mean = vals.clone().sum::<f64>() / cfg.domains as f64;
            let min = vals.clone().fold(f64::INFINITY, f64::min);
            let max = vals.fold(f64::NEG_INFINITY, f64::max);
            cells.push(CoherenceCell {
                order,
                gamma,
                mean,
                min,
                max,
            });
            idx += 1;
        }
    }
    Ok(cells)
}
