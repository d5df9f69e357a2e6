//! Subcommand implementations.

use evans_core::analysis::{fit_order, measure_evans_error, reference_evans};
use evans_core::evans::{asymptotic_evans, evaluate_evans, AsymptoticSeries};
use evans_core::spectral::{build_frame, ExpansionOrder};
use evans_core::{GridSpec, MethodKind, ReactionModel};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{config_err, Cli, Command, ComputeArgs, StepSpec};
use crate::output;
use crate::CliError;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Evaluate(args) => evaluate(&args),
        Command::Converge(args) => converge(&args),
        Command::SweepLambda(args) => sweep_lambda(&args),
        Command::Predict(args) => predict(&args),
        Command::Plotscript(args) => plotscript(&args),
    }
}

fn numerical_err(lambda: Complex64, e: evans_core::Error) -> CliError {
    CliError::Numerical(format!("lambda = {lambda}: {e}"))
}

/// Reject runs containing inadmissible spectral parameters, naming every
/// offending value in one message.
fn check_admissible(model: &ReactionModel, lambdas: &[Complex64]) -> Result<(), CliError> {
    let inadmissible: Vec<String> = lambdas
        .iter()
        .filter(|&&l| !build_frame(model, l).admissible)
        .map(|l| l.to_string())
        .collect();
    if inadmissible.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "inadmissible lambda value(s): {} (need Re kappa_- > 0 and Re kappa_+ > 0)",
            inadmissible.join(", ")
        )))
    }
}

fn pool(args: &ComputeArgs) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs())
        .build()
        .map_err(|e| config_err(format!("cannot build worker pool: {e}")))
}

fn evaluate(args: &ComputeArgs) -> Result<(), CliError> {
    let model = args.build_model()?;
    let method = args.method()?;
    let grid = args.single_grid()?;
    let lambdas = args.lambda_values()?;
    check_admissible(&model, &lambdas)?;
    let results: Vec<Result<Complex64, CliError>> = pool(args)?.install(|| {
        lambdas
            .par_iter()
            .map(|&lambda| {
                evaluate_evans(&model, lambda, &grid, method)
                    .map(|r| r.value)
                    .map_err(|e| numerical_err(lambda, e))
            })
            .collect()
    });
    let mut csv = String::from(output::EVALUATE_HEADER);
    csv.push('\n');
    for (lambda, value) in lambdas.iter().zip(results) {
        let value = value?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            output::fmt_f64(lambda.re),
            output::fmt_f64(lambda.im),
            output::fmt_f64(value.re),
            output::fmt_f64(value.im),
            method.name(),
            output::fmt_f64(grid.step_size()),
            output::fmt_f64(grid.half_length()),
            grid.steps(),
        ));
    }
    output::write_text(args.output.as_deref(), &csv)
}

/// All |E_D| at or below this are reported as exact rather than fitted.
const EXACT_FLOOR: f64 = 1e-11;

fn converge(args: &ComputeArgs) -> Result<(), CliError> {
    let model = args.build_model()?;
    let method = args.method()?;
    let steps = match args.step_list()? {
        StepSpec::Steps(hs) => hs,
        StepSpec::Cells(_) => {
            return Err(config_err("converge needs --h with at least 3 values"))
        }
    };
    if steps.len() < 3 {
        return Err(config_err("converge needs at least 3 --h values"));
    }
    let lambdas = args.lambda_values()?;
    let [lambda] = lambdas.as_slice() else {
        return Err(config_err("converge takes exactly one --lambda"));
    };
    let lambda = *lambda;
    check_admissible(&model, &[lambda])?;
    let grids: Vec<GridSpec> = steps
        .iter()
        .map(|&h| args.grid_for_step(h))
        .collect::<Result<_, _>>()?;
    let reference = reference_evans(&model, lambda, args.half_length)
        .map_err(|e| numerical_err(lambda, e))?;
    let errors: Vec<Result<f64, CliError>> = pool(args)?.install(|| {
        grids
            .par_iter()
            .map(|grid| {
                evaluate_evans(&model, lambda, grid, method)
                    .map(|r| (r.value - reference).norm())
                    .map_err(|e| numerical_err(lambda, e))
            })
            .collect()
    });
    let mut csv = String::from(output::CONVERGE_HEADER);
    csv.push('\n');
    let mut samples = Vec::with_capacity(grids.len());
    for (grid, err) in grids.iter().zip(errors) {
        let err = err?;
        samples.push((grid.step_size(), err));
        csv.push_str(&format!(
            "{},{}\n",
            output::fmt_f64(grid.step_size()),
            output::fmt_f64(err)
        ));
    }
    if samples.iter().all(|&(_, e)| e <= EXACT_FLOOR) {
        csv.push_str("# exact\n");
    } else {
        let fit = fit_order(&samples).map_err(|e| CliError::Numerical(e.to_string()))?;
        csv.push_str(&format!("# fitted_order={}\n", output::fmt_f64(fit.slope)));
    }
    output::write_text(args.output.as_deref(), &csv)
}

fn sweep_lambda(args: &ComputeArgs) -> Result<(), CliError> {
    let model = args.build_model()?;
    let method = args.method()?;
    let grid = args.single_grid()?;
    let lambdas = args.geometric_sweep()?;
    check_admissible(&model, &lambdas)?;
    let series = AsymptoticSeries::for_model(&model, ExpansionOrder::Second)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    struct Row {
        abs_lambda: f64,
        abs_error: f64,
        abs_residual: f64,
    }
    let rows: Vec<Result<Row, CliError>> = pool(args)?.install(|| {
        lambdas
            .par_iter()
            .map(|&lambda| {
                let value = evaluate_evans(&model, lambda, &grid, method)
                    .map_err(|e| numerical_err(lambda, e))?
                    .value;
                let reference = reference_evans(&model, lambda, grid.half_length())
                    .map_err(|e| numerical_err(lambda, e))?;
                let asym =
                    asymptotic_evans(&series, lambda).map_err(|e| numerical_err(lambda, e))?;
                Ok(Row {
                    abs_lambda: lambda.norm(),
                    abs_error: (value - reference).norm(),
                    abs_residual: (value - asym).norm(),
                })
            })
            .collect()
    });
    let mut csv = String::from(output::SWEEP_HEADER);
    csv.push('\n');
    let mut error_samples = Vec::new();
    let mut residual_samples = Vec::new();
    for row in rows {
        let row = row?;
        error_samples.push((row.abs_lambda, row.abs_error));
        residual_samples.push((row.abs_lambda, row.abs_residual));
        csv.push_str(&format!(
            "{},{},{}\n",
            output::fmt_f64(row.abs_lambda),
            output::fmt_f64(row.abs_error),
            output::fmt_f64(row.abs_residual)
        ));
    }
    for (label, samples) in [
        ("fitted_slope_E_D", error_samples),
        ("fitted_slope_asym_residual", residual_samples),
    ] {
        if samples.iter().all(|&(_, e)| e <= EXACT_FLOOR) {
            csv.push_str(&format!("# {label}=exact\n"));
        } else {
            let fit = fit_order(&samples).map_err(|e| CliError::Numerical(e.to_string()))?;
            csv.push_str(&format!("# {label}={}\n", output::fmt_f64(fit.slope)));
        }
    }
    output::write_text(args.output.as_deref(), &csv)
}

fn predict(args: &ComputeArgs) -> Result<(), CliError> {
    let model = args.build_model()?;
    let method = args.method()?;
    if method == MethodKind::GaussLegendre4 {
        return Err(config_err(
            "no closed-form prediction for gl4 (order bounds only); use midpoint or magnus4",
        ));
    }
    let grid = args.single_grid()?;
    let lambdas = args.lambda_values()?;
    check_admissible(&model, &lambdas)?;
    let reports: Vec<Result<evans_core::analysis::ErrorReport, CliError>> =
        pool(args)?.install(|| {
            lambdas
                .par_iter()
                .map(|&lambda| {
                    measure_evans_error(&model, lambda, &grid, method)
                        .map_err(|e| numerical_err(lambda, e))
                })
                .collect()
        });
    let mut csv = String::from(output::PREDICT_HEADER);
    csv.push('\n');
    for report in reports {
        let report = report?;
        let predicted = report.predicted.unwrap_or(Complex64::new(0.0, 0.0));
        let ratio = report
            .ratio
            .map(output::fmt_f64)
            .unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            output::fmt_f64(report.lambda.re),
            output::fmt_f64(report.lambda.im),
            output::fmt_f64(report.grid.step_size()),
            output::fmt_f64(report.measured.re),
            output::fmt_f64(report.measured.im),
            output::fmt_f64(predicted.re),
            output::fmt_f64(predicted.im),
            ratio,
        ));
    }
    output::write_text(args.output.as_deref(), &csv)
}

fn plotscript(args: &crate::config::PlotArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.csv)
        .map_err(|e| config_err(format!("cannot read {}: {e}", args.csv.display())))?;
    let header = text.lines().next().unwrap_or("").trim_end();
    let script = output::plot_script(header, &args.csv)?;
    let out = args
        .output
        .clone()
        .unwrap_or_else(|| output::default_script_path(&args.csv));
    output::write_text(Some(&out), &script)
}
