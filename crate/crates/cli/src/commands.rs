use std::path::Path;
use std::sync::Arc;

use dibsi::bench::{coherence_study, monte_carlo, CoherenceConfig, MonteCarloConfig};
use dibsi::dibasis::{riesz_bounds_estimate, DiBasis, GeneratingBasis, Shaping, StandardBasis};
use dibsi::domain::io::{fmt_real, read_domain, write_domain};
use dibsi::domain::{self, realize_domain_with, RealizeOptions};
use dibsi::image2d::io::{read_atlas, read_image, write_image};
use dibsi::image2d::{upsample_separable, PassOrder, UpsampleMethod, UpsampleOptions};
use dibsi::interp::{interpolate_bsi, interpolate_dibsi, SampleSequence};
use dibsi::seed::{derive_seed, DOMAIN_TAG};
use dibsi::splines::half_support;
use dibsi::Error;
use rayon::prelude::*;

use crate::{
    CliError, CoherenceArgs, ExportArgs, InterpolateArgs, MethodArg, PassOrderArg, RealizeArgs,
    RieszArgs, SimulateArgs, UpsampleArgs,
};

type Result<T> = std::result::Result<T, CliError>;

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    Ok(csv::Writer::from_path(path)?)
}

pub fn realize_domain(a: &RealizeArgs) -> Result<()> {
    let e = &a.ensemble;
    let opts = RealizeOptions {
        grid_step: a.grid_step,
        warp_knots: a.warp_knots,
    };
    let dom = realize_domain_with(e.subdomains, e.kernels, e.lo, e.hi, a.seed, &opts)?;
    write_domain(&a.out, &dom)?;
    Ok(())
}

pub fn export_basis(a: &ExportArgs) -> Result<()> {
    if !(a.grid_step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "grid step must be positive, got {}",
            a.grid_step
        ))
        .into());
    }
    let basis: Box<dyn GeneratingBasis<f64>> = match &a.domain {
        Some(path) => {
            let dom = Arc::new(read_domain(path)?);
            Box::new(DiBasis::new(
                dom,
                a.order,
                a.step,
                Shaping::logistic(a.gamma)?,
            )?)
        }
        None => Box::new(StandardBasis::new(a.order, a.step)?),
    };
    let (k_min, k_max) = match (&a.domain, a.k_min, a.k_max) {
        (_, Some(lo), Some(hi)) => (lo, hi),
        (Some(_), lo, hi) => {
            // default to the domain's samples
            let dom = read_domain(a.domain.as_ref().unwrap())?;
            let first = (dom.lo() / a.step - 1e-9).ceil() as i64;
            let last = (dom.hi() / a.step + 1e-9).floor() as i64;
            (lo.unwrap_or(first), hi.unwrap_or(last))
        }
        (None, lo, hi) => (lo.unwrap_or(0), hi.unwrap_or(0)),
    };
    if k_max < k_min {
        return Err(
            Error::InvalidArgument(format!("empty kernel range [{k_min}, {k_max}]")).into(),
        );
    }
    let delta: f64 = half_support(a.order);
    let cells = (2.0 * delta / a.grid_step).round().max(1.0) as usize;
    let h = 2.0 * delta / cells as f64;
    let mut w = writer(&a.out)?;
    w.write_record(["x", "k", "value"])?;
    for k in k_min..=k_max {
        for i in 0..=cells {
            let x = -delta + i as f64 * h;
            w.write_record([fmt_real(x), k.to_string(), fmt_real(basis.kernel(k, x))])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn coherence(a: &CoherenceArgs) -> Result<()> {
    let e = &a.ensemble;
    let cfg = CoherenceConfig {
        domains: a.domains,
        orders: a.orders.0.clone(),
        gammas: a.gamma.0.clone(),
        subdomains: e.subdomains,
        kernels: e.kernels,
        lo: e.lo,
        hi: e.hi,
        step: a.step,
        master_seed: a.seed,
    };
    let cells = coherence_study(&cfg)?;
    let mut w = writer(&a.out)?;
    w.write_record([
        "order",
        "gamma",
        "ensemble_coherence",
        "min_coherence",
        "max_coherence",
    ])?;
    for c in cells {
        w.write_record([
            c.order.to_string(),
            fmt_real(c.gamma),
            fmt_real(c.mean),
            fmt_real(c.min),
            fmt_real(c.max),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn read_samples(path: &Path, step: f64) -> Result<SampleSequence<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut first = None;
    let mut values = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Format(format!(
                "{}: row {row} needs two columns (k, value)",
                path.display()
            ))
            .into());
        }
        let (k, v) = match (rec[0].parse::<i64>(), rec[1].parse::<f64>()) {
            (Ok(k), Ok(v)) => (k, v),
            _ if row == 0 => continue,
            _ => {
                return Err(
                    Error::Format(format!("{}: cannot parse row {row}", path.display())).into(),
                )
            }
        };
        let k0 = *first.get_or_insert(k);
        if k != k0 + values.len() as i64 {
            return Err(Error::Format(format!(
                "{}: sample indices must be consecutive (row {row})",
                path.display()
            ))
            .into());
        }
        values.push(v);
    }
    Ok(SampleSequence::new(values, step, first.unwrap_or(0))?)
}

pub fn interpolate(a: &InterpolateArgs) -> Result<()> {
    let samples = read_samples(&a.samples, a.step)?;
    let dom = Arc::new(read_domain(&a.domain)?);
    let basis = DiBasis::with_sample_range(
        dom,
        a.order,
        a.step,
        Shaping::logistic(a.gamma)?,
        samples.k_offset(),
        samples.last_index(),
    )?;
    let di = interpolate_dibsi(&samples, Arc::new(basis))?;
    let bsi = interpolate_bsi(&samples, a.order)?;
    let h = a.grid_step.unwrap_or(a.step / 10.0);
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("grid step must be positive, got {h}")).into());
    }
    let lo = samples.k_offset() as f64 * a.step;
    let hi = samples.last_index() as f64 * a.step;
    let count = ((hi - lo) / h + 1e-9).floor() as usize;
    let mut w = writer(&a.out)?;
    w.write_record(["x", "dibsi", "bsi"])?;
    for i in 0..=count {
        let x = lo + i as f64 * h;
        w.write_record([
            fmt_real(x),
            fmt_real(di.evaluate(x)?),
            fmt_real(bsi.evaluate(x)?),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    let e = &a.ensemble;
    let cfg = MonteCarloConfig {
        domains: a.domains,
        signals: a.signals,
        orders: a.orders.0.clone(),
        steps: a.steps.0.clone(),
        gamma: a.gamma,
        master_seed: a.seed,
        subdomains: e.subdomains,
        kernels: e.kernels,
        lo: e.lo,
        hi: e.hi,
        jitter: a.jitter,
        truth_order: a.truth_order,
    };
    let table = monte_carlo(&cfg)?;
    table.write_csv(std::fs::File::create(&a.out)?)?;
    Ok(())
}

pub fn upsample2d(a: &UpsampleArgs) -> Result<()> {
    let img = read_image(&a.image, [a.pixel_size; 2])?;
    let atlas = read_atlas(&a.atlas, img.pixel_size())?;
    let opts = UpsampleOptions {
        factor: a.factor,
        order: a.order,
        gamma: a.gamma,
        pass_order: match a.pass_order {
            PassOrderArg::Rows => PassOrder::RowsFirst,
            PassOrderArg::Columns => PassOrder::ColumnsFirst,
        },
        method: match a.method {
            MethodArg::Dibsi => UpsampleMethod::Dibsi,
            MethodArg::Bsi => UpsampleMethod::Bsi,
        },
    };
    let out = upsample_separable(&img, &atlas, &opts)?;
    write_image(&a.out, &out)?;
    Ok(())
}

pub fn riesz_check(a: &RieszArgs) -> Result<()> {
    let e = &a.ensemble;
    let shaping = Shaping::logistic(a.gamma)?;
    let quad = a.quad_step.unwrap_or(a.step / 100.0);
    let rows: Vec<Vec<(usize, f64, f64)>> = (0..a.domains)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(a.seed, &[DOMAIN_TAG, i as u64]);
            let dom = Arc::new(domain::realize_domain(
                e.subdomains,
                e.kernels,
                e.lo,
                e.hi,
                seed,
            )?);
            a.orders
                .0
                .iter()
                .map(|&order| {
                    let basis = DiBasis::new(dom.clone(), order, a.step, shaping)?;
                    let (k0, k1) = basis.sample_range();
                    let b = riesz_bounds_estimate(&basis, k0, k1, quad)?;
                    Ok((order, b.lower, b.upper))
                })
                .collect::<dibsi::Result<Vec<_>>>()
        })
        .collect::<dibsi::Result<_>>()?;
    let mut w = writer(&a.out)?;
    w.write_record(["domain", "order", "lower", "upper"])?;
    let mut worst: Option<(usize, usize, f64)> = None;
    for (i, per_order) in rows.iter().enumerate() {
        for &(order, lower, upper) in per_order {
            w.write_record([
                i.to_string(),
                order.to_string(),
                fmt_real(lower),
                fmt_real(upper),
            ])?;
            if worst.is_none_or(|(_, _, l)| lower < l) {
                worst = Some((i, order, lower));
            }
        }
    }
    w.flush()?;
    if let Some((i, order, lower)) = worst {
        println!("smallest lower bound {lower:e} (domain {i}, order {order})");
        if !(lower > a.threshold) {
            return Err(CliError::CheckFailed(format!(
                "lower Riesz bound {lower:e} at domain {i}, order {order} does not exceed {:e}",
                a.threshold
            )));
        }
    }
    Ok(())
}
