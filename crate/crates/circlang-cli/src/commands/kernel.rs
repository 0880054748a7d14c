use circlang::kernel::{classify, p_general, support_indicator, Regime};
use circlang::malliavin::{homogenize, TargetPoint};

use super::Outcome;
use crate::args::KernelArgs;
use crate::error::{CliError, Result};
use crate::output::{Cell, Table};

/// Label of the equivalent that governs a regime.
pub fn case_label(regime: Regime) -> &'static str {
    match regime {
        Regime::NonDegenerate => "case (i)",
        Regime::DegenerateAxis => "case (ii)",
        Regime::DegenerateGeneric => "case (iii)",
    }
}

pub fn run(args: &KernelArgs) -> Result<Outcome> {
    if !(args.eps > 0.0) || !args.eps.is_finite() {
        return Err(CliError::Usage(format!("--eps must be positive and finite, got {}", args.eps)));
    }
    let start = args.start.map_or(TargetPoint::ORIGIN, |p| TargetPoint::new(p.w, p.y, p.z));
    let target = TargetPoint::new(args.w, args.y, args.z);
    let local = homogenize(start, target);
    let regime = classify(local);
    let inside = support_indicator(args.eps, local.y, local.z);

    let mut table = Table::new(&["quantity", "value"]);
    table.push(vec!["regime".into(), regime.to_string().into()]);
    table.push(vec!["case".into(), case_label(regime).into()]);
    table.push(vec!["w_relative".into(), local.w.into()]);
    table.push(vec!["y_relative".into(), local.y.into()]);
    table.push(vec!["z_relative".into(), local.z.into()]);
    table.push(vec!["in_support".into(), inside.into()]);

    if !inside {
        let note = format!(
            "warning: (y, z) = ({}, {}) relative to the start lies outside the disc of radius eps = {}; the density vanishes there",
            local.y, local.z, args.eps
        );
        return Ok(Outcome { table, passed: false, notes: vec![note], outputs: Vec::new() });
    }

    let p = p_general(args.eps, start, target)
        .map_err(|e| CliError::numerical(format!("{} ({regime})", case_label(regime)), e))?;
    table.push(vec!["log_prefactor".into(), Cell::Num(p.log_prefactor)]);
    table.push(vec!["exponent".into(), Cell::Num(p.exponent)]);
    table.push(vec!["log_density".into(), Cell::Num(p.log_density())]);
    Ok(Outcome { table, passed: true, notes: Vec::new(), outputs: Vec::new() })
}
