use std::f64::consts::PI;

use circlang::kernel::c_squared_diagnostic;
use circlang::quad::{sigma_const, sigma_prime_const, QuadResult};
use circlang::specfun::{f_of, theta_root};

use super::Outcome;
use crate::args::ConstantsArgs;
use crate::error::{CliError, Result};
use crate::output::{Cell, Table};

/// Lower bound both oscillatory constants must exceed.
const CONSTANT_FLOOR: f64 = 0.1;

fn converged(name: &'static str, q: QuadResult<f64>) -> Result<QuadResult<f64>> {
    if q.flags.converged {
        Ok(q)
    } else {
        Err(CliError::numerical(
            name,
            circlang::Error::NonConvergence {
                op: name,
                reason: format!("error estimate {:.3e} above the requested tolerance", q.abs_error_estimate),
            },
        ))
    }
}

pub fn run(args: &ConstantsArgs) -> Result<Outcome> {
    if !(args.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", args.tol)));
    }
    let mut table = Table::new(&["quantity", "value", "error_estimate", "requirement", "pass"]);
    let mut passed = true;
    let mut bounded = |table: &mut Table, name: &str, value: f64, err: f64, req: &str, ok: bool| {
        passed &= ok;
        table.push(vec![name.into(), value.into(), err.into(), req.into(), ok.into()]);
    };

    let sigma = converged("sigma", sigma_const(args.tol))?;
    bounded(&mut table, "sigma", sigma.value, sigma.abs_error_estimate, "> 0.1", sigma.value - sigma.abs_error_estimate > CONSTANT_FLOOR);
    let sigma_p = converged("sigma_prime", sigma_prime_const(args.tol))?;
    bounded(&mut table, "sigma_prime", sigma_p.value, sigma_p.abs_error_estimate, "> 0.1", sigma_p.value - sigma_p.abs_error_estimate > CONSTANT_FLOOR);
    let theta = theta_root(1).map_err(|e| CliError::numerical("theta_1", e))?.value;
    let inside = theta > 4.0 * PI / 3.0 && theta < 1.5 * PI;
    bounded(&mut table, "theta_1", theta, (theta.tan() - theta).abs(), "in (4pi/3, 3pi/2)", inside);

    table.push(vec!["c_squared".into(), c_squared_diagnostic().into(), Cell::Num(0.0), "diagnostic".into(), true.into()]);
    let f = f_of(PI * PI, 0.0).map_err(|e| CliError::numerical("f(pi^2, 0)", e))?;
    table.push(vec!["f(pi^2,0)".into(), f.re.into(), f.im.abs().into(), "diagnostic".into(), true.into()]);

    Ok(Outcome { table, passed, notes: Vec::new(), outputs: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_hold_even_at_a_loose_tolerance() {
        for tol in [1e-10, 1e-1] {
            let out = run(&ConstantsArgs { tol }).unwrap();
            assert!(out.passed, "tol {tol}");
            assert_eq!(out.table.rows.len(), 5);
        }
    }

    #[test]
    fn rejects_non_positive_tolerance() {
        assert!(matches!(run(&ConstantsArgs { tol: 0.0 }), Err(CliError::Usage(_))));
    }
}
