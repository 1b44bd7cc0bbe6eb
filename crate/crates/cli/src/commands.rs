use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use anisoheat::asymptotics::{run_theorem, ExperimentReport, ExperimentSetup};
use anisoheat::heisenberg::h_solution_grid;
use anisoheat::kernels::{heisenberg_on_grid, kernel_derivative, kernel_grid, HField, SigmaQuadrature};
use anisoheat::numeric::{quad_integral, weighted_lp_norm};
use anisoheat::suites::{run_suite, Identity, SuiteConfig};
use anisoheat::{DimensionSplit, GridFunction, KernelSpec, MultiIndex, WeightSpec};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::{CmdResult, Family, KernelArgs, Outcome, RatesArgs, UsageError, VerifyArgs};

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, UsageError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?)
}

fn kernel_spec(a: &KernelArgs) -> Result<KernelSpec, UsageError> {
    let spec = match a.family {
        Family::Isotropic => KernelSpec::Isotropic { dim: a.dim.unwrap_or(2) },
        Family::Mixed => KernelSpec::mixed(DimensionSplit::new(a.m.unwrap_or(1), a.n.unwrap_or(1))?),
        Family::Heisenberg => KernelSpec::Heisenberg { n: a.n.unwrap_or(1) },
    };
    spec.validate()?;
    if spec.dims() > 3 {
        return Err(UsageError("kernel sampling is limited to three variables".into()));
    }
    Ok(spec)
}

fn coordinate_names(spec: &KernelSpec) -> Vec<String> {
    match *spec {
        KernelSpec::Isotropic { dim } => (1..=dim).map(|i| format!("z{i}")).collect(),
        KernelSpec::MixedOrder { m, n } => {
            (1..=m).map(|i| format!("x{i}")).chain((1..=n).map(|i| format!("y{i}"))).collect()
        }
        KernelSpec::Heisenberg { n } => {
            (1..=2 * n).map(|i| format!("z{i}")).chain(std::iter::once("theta".to_string())).collect()
        }
    }
}

fn parse_multi_index(s: &str, dims: usize) -> Result<MultiIndex, UsageError> {
    let e: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|_| UsageError(format!("derivative '{s}' is not a comma-separated multi-index")))?;
    if e.len() != dims {
        return Err(UsageError(format!("derivative '{s}' has {} entries, the kernel has {dims} variables", e.len())));
    }
    Ok(MultiIndex::new(e))
}

/// `z<j>`, `y<j>`, `theta` or `zz<j>,<k>`, zero-based.
pub fn parse_field(s: &str) -> Result<HField, UsageError> {
    let bad = || UsageError(format!("unknown field '{s}'; use z<j>, y<j>, theta or zz<j>,<k>"));
    let idx = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    if s == "theta" {
        Ok(HField::Theta)
    } else if let Some(rest) = s.strip_prefix("zz") {
        let (j, k) = rest.split_once(',').ok_or_else(bad)?;
        Ok(HField::ZZ(idx(j)?, idx(k)?))
    } else if let Some(rest) = s.strip_prefix('z') {
        Ok(HField::Z(idx(rest)?))
    } else if let Some(rest) = s.strip_prefix('y') {
        Ok(HField::Y(idx(rest)?))
    } else {
        Err(bad())
    }
}

fn sample_kernel(a: &KernelArgs, spec: &KernelSpec) -> Result<(GridFunction, Option<GridFunction>), UsageError> {
    match *spec {
        KernelSpec::Heisenberg { n } => {
            let grid = h_solution_grid(n, a.t, a.points.unwrap_or(32), a.theta_points)?;
            let quad = SigmaQuadrature::standard(n)?;
            let value = heisenberg_on_grid(HField::Identity, &grid, a.t, &quad)?;
            let deriv = match &a.derivative {
                Some(d) => {
                    let field = parse_field(d)?;
                    field.validate(n)?;
                    Some(heisenberg_on_grid(field, &grid, a.t, &quad)?)
                }
                None => None,
            };
            Ok((value, deriv))
        }
        _ => {
            let dims = spec.dims();
            let points = a.points.unwrap_or(if dims <= 2 { 128 } else { 64 });
            let grid = kernel_grid(spec, a.t, points)?;
            let m = spec.split().map_or(dims, |s| s.m());
            let zero = MultiIndex::zeros(dims);
            let (b0, g0) = zero.split_at(m);
            let value = kernel_derivative(spec, &b0, &g0, a.t, &grid)?;
            let deriv = match &a.derivative {
                Some(d) => {
                    let (b, g) = parse_multi_index(d, dims)?.split_at(m);
                    Some(kernel_derivative(spec, &b, &g, a.t, &grid)?)
                }
                None => None,
            };
            Ok((value, deriv))
        }
    }
}

pub fn kernel(a: &KernelArgs) -> CmdResult {
    if !(a.t > 0.0 && a.t.is_finite()) {
        return Err(UsageError(format!("--t must be positive, got {}", a.t)));
    }
    let spec = kernel_spec(a)?;
    let (value, deriv) = sample_kernel(a, &spec)?;
    let grid = value.grid().clone();

    let mut w = csv_writer(&a.out)?;
    let mut header = coordinate_names(&spec);
    header.push("value".into());
    if deriv.is_some() {
        header.push("derivative".into());
    }
    w.write_record(&header)?;
    let mut coords = vec![0.0; grid.dims()];
    let mut row = Vec::with_capacity(header.len());
    for i in 0..grid.len() {
        grid.coords_into(i, &mut coords);
        row.clear();
        row.extend(coords.iter().map(|c| format!("{c}")));
        row.push(format!("{:e}", value.values()[i]));
        if let Some(d) = &deriv {
            row.push(format!("{:e}", d.values()[i]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;

    let mut out = std::io::stdout().lock();
    writeln!(out, "grid {:?} nodes, half-widths {:?}", grid.points(), grid.extents())?;
    writeln!(out, "mass {:.12}", quad_integral(&value)?)?;
    writeln!(out, "L1 {:.12e}", weighted_lp_norm(&value, &WeightSpec::UNIT, 1.0)?)?;
    writeln!(out, "L2 {:.12e}", weighted_lp_norm(&value, &WeightSpec::UNIT, 2.0)?)?;
    if let Some(d) = &deriv {
        writeln!(out, "derivative L1 {:.12e}", weighted_lp_norm(d, &WeightSpec::UNIT, 1.0)?)?;
    }
    writeln!(out, "wrote {}", a.out.display())?;
    Ok(Outcome::Pass)
}

pub fn verify(a: &VerifyArgs) -> CmdResult {
    let identity: Identity = a.lemma.parse()?;
    let mut cfg = SuiteConfig::new(identity);
    cfg.k = a.k;
    cfg.dim = a.dim;
    cfg.m = a.m;
    cfg.n = a.n;
    cfg.group_rank = a.n;
    cfg.instances = a.instances;
    cfg.seed = a.seed;
    let r = run_suite(&cfg)?;
    println!(
        "{}: {} instances, max residual {:.3e} (tolerance {:.0e}), polynomial max residual {:.3e} (tolerance {:.0e})",
        r.identity, r.instances, r.max_residual, r.tolerance, r.polynomial_max_residual, r.polynomial_tolerance
    );
    println!("{}", if r.pass { "pass" } else { "fail" });
    Ok(Outcome::from_pass(r.pass))
}

#[derive(Serialize)]
struct RatesOutput<'a> {
    setup: &'a ExperimentSetup,
    report: &'a ExperimentReport,
}

pub fn write_report(config: &ExperimentConfig, report: &ExperimentReport, json: &Path, csv: &Path) -> Result<(), UsageError> {
    let mut w = csv_writer(csv)?;
    w.write_record(["t", "error", "constant"])?;
    for r in &report.records {
        w.write_record([format!("{}", r.t), format!("{:e}", r.error), format!("{:e}", r.constant)])?;
    }
    w.flush()?;
    if let Some(dir) = json.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(&RatesOutput { setup: &config.setup, report })
        .map_err(|e| UsageError(e.to_string()))?;
    text.push('\n');
    fs::write(json, text)?;
    Ok(())
}

pub fn rates(a: &RatesArgs) -> CmdResult {
    let mut config = ExperimentConfig::load(&a.config)?;
    if let Some(p) = &a.json {
        config.output.json = Some(p.clone());
    }
    if let Some(p) = &a.csv {
        config.output.csv = Some(p.clone());
    }
    config.setup.validate()?;
    let report = run_theorem(&config.setup)?;
    let (json, csv) = (config.json_path(), config.csv_path());
    write_report(&config, &report, &json, &csv)?;
    println!(
        "{}: slope {:.4} (target {:.4} + {:.2}), constant ratio {:.3}, {}",
        report.experiment,
        report.fit.slope,
        report.target_slope,
        report.tolerance,
        report.constant_ratio,
        if report.pass { "pass" } else { "fail" }
    );
    println!("wrote {} and {}", json.display(), csv.display());
    Ok(Outcome::from_pass(report.pass))
}
