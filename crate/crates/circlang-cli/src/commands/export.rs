use std::path::{Path, PathBuf};
use std::time::Instant;

use circlang::bridge::wstar_cdf;
use circlang::kernel::p_general;
use circlang::malliavin::TargetPoint;
use circlang::specfun::phi_lift_polar;
use serde_json::Value;

use super::Outcome;
use crate::args::{Command, ExportArgs, Format, GlobalOpts, Table as TableKind};
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::output::{to_json_text, Cell, Table};

/// File written when `--out` is absent.
pub fn output_path(args: &ExportArgs, out: &Option<PathBuf>) -> PathBuf {
    out.clone().unwrap_or_else(|| {
        let table = match args.table {
            TableKind::Kernel => "kernel",
            TableKind::Phi => "phi",
            TableKind::Wstar => "wstar",
        };
        let ext = match args.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        PathBuf::from(format!("circlang-{table}.{ext}"))
    })
}

/// `count` equally spaced points from `from` to `to` inclusive.
fn grid(from: f64, to: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !from.is_finite() || !to.is_finite() || from >= to {
        return Err(CliError::Usage(format!("need --from < --to and --count >= 2, got {from}, {to}, {count}")));
    }
    Ok((0..count).map(|i| from + (to - from) * i as f64 / (count - 1) as f64).collect())
}

/// Builds the requested sweep.
pub fn build_table(args: &ExportArgs) -> Result<Table> {
    match args.table {
        TableKind::Kernel => {
            let mut t = Table::new(&["eps [time]", "regime", "log_prefactor [nats]", "exponent [nats]", "log_density [nats]"]);
            for eps in grid(args.from.unwrap_or(0.02), args.to.unwrap_or(0.5), args.count)? {
                let target = TargetPoint::new(args.w, args.y * eps, args.z * eps);
                let p = p_general(eps, TargetPoint::ORIGIN, target).map_err(|e| CliError::numerical(format!("kernel at eps = {eps}"), e))?;
                t.push(vec![eps.into(), p.regime.to_string().into(), p.log_prefactor.into(), p.exponent.into(), p.log_density().into()]);
            }
            Ok(t)
        }
        TableKind::Phi => {
            let mut t = Table::new(&["x [1]", "chi [1]", "abs_phi [1]", "arg_phi [rad]"]);
            for x in grid(args.from.unwrap_or(0.1), args.to.unwrap_or(10.0), args.count)? {
                let v = phi_lift_polar(args.chi, x).map_err(|e| CliError::numerical(format!("Phi at x = {x}"), e))?;
                t.push(vec![x.into(), args.chi.into(), v.modulus.into(), v.argument.into()]);
            }
            Ok(t)
        }
        TableKind::Wstar => {
            let mut t = Table::new(&["y [1]", "cdf [1]"]);
            for y in grid(args.from.unwrap_or(0.2), args.to.unwrap_or(3.0), args.count)? {
                t.push(vec![y.into(), wstar_cdf(y).into()]);
            }
            Ok(t)
        }
    }
}

fn write_csv(table: &Table, path: &Path) -> Result<()> {
    let csv_err = |source| CliError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(csv_err)?;
    w.write_record(&table.columns).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv_field)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn run(args: &ExportArgs, global: &GlobalOpts) -> Result<Outcome> {
    let started = Instant::now();
    let table = build_table(args)?;
    let path = output_path(args, &global.out);
    match args.format {
        Format::Csv => write_csv(&table, &path)?,
        Format::Json => {
            let manifest = RunManifest::new(
                &Command::Export(args.clone()),
                global.seed,
                global.workers,
                std::slice::from_ref(&path),
                started.elapsed().as_secs_f64(),
            );
            let mut doc = manifest.to_json();
            if let Value::Object(map) = &mut doc {
                map.insert("columns".into(), Value::from(table.columns.clone()));
                map.insert("rows".into(), table.to_json());
            }
            std::fs::write(&path, to_json_text(doc)).map_err(|e| CliError::io(&path, e))?;
        }
    }
    let mut summary = Table::new(&["file", "rows", "columns"]);
    summary.push(vec![path.display().to_string().into(), Cell::Int(table.rows.len() as u64), table.columns.join(", ").into()]);
    Ok(Outcome { table: summary, passed: true, notes: Vec::new(), outputs: vec![path] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn export(table: TableKind) -> ExportArgs {
        ExportArgs { table, format: Format::Csv, from: None, to: None, count: 20, w: 1.0, y: 0.8, z: 0.3, chi: 0.0 }
    }

    #[test]
    fn kernel_exponent_is_monotone_in_eps() {
        let t = build_table(&export(TableKind::Kernel)).unwrap();
        let exps: Vec<f64> = t.rows.iter().map(|r| if let Cell::Num(x) = r[3] { x } else { unreachable!() }).collect();
        assert!(exps.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn phi_table_matches_direct_calls() {
        let t = build_table(&export(TableKind::Phi)).unwrap();
        for r in &t.rows {
            let (Cell::Num(x), Cell::Num(m), Cell::Num(a)) = (&r[0], &r[2], &r[3]) else { unreachable!() };
            let v = phi_lift_polar(0.0, *x).unwrap();
            assert_eq!((v.modulus, v.argument), (*m, *a));
        }
    }

    #[test]
    fn bad_grid_is_a_usage_error() {
        let mut a = export(TableKind::Wstar);
        a.count = 1;
        assert!(matches!(build_table(&a), Err(CliError::Usage(_))));
    }
}
