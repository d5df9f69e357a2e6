//! Deterministic CSV and plot-script writing.
//!
//! Numbers carry 17 significant digits (round-trip exact for doubles),
//! fields are comma separated, lines end with LF, and trailing metadata
//! lines are "#"-prefixed, so identical runs produce byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}"))),
    }
}

pub const EVALUATE_HEADER: &str = "lambda_re,lambda_im,D_re,D_im,method,h,L,N";
pub const CONVERGE_HEADER: &str = "h,abs_E_D";
pub const SWEEP_HEADER: &str = "abs_lambda,abs_E_D,abs_asym_residual";
pub const PREDICT_HEADER: &str =
    "lambda_re,lambda_im,h,measured_re,measured_im,predicted_re,predicted_im,ratio";

/// Gnuplot script for a recognized CSV header; references the CSV by its
/// file name so the script works from its own directory.
pub fn plot_script(header: &str, csv_path: &Path) -> Result<String, CliError> {
    let name = csv_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| csv_path.display().to_string());
    let mut s = String::from("# generated by `evans plotscript`\nset datafile separator ','\n");
    match header {
        EVALUATE_HEADER => {
            s.push_str("set xlabel 'Re lambda'\nset ylabel 'Re D'\n");
            s.push_str(&format!(
                "plot '{name}' using 1:3 skip 1 with linespoints title 'Re D(lambda)'\n"
            ));
        }
        CONVERGE_HEADER => {
            s.push_str("set logscale xy\nset xlabel 'h'\nset ylabel '|E_D|'\n");
            s.push_str(&format!(
                "plot '{name}' using 1:2 skip 1 with linespoints title '|E_D|'\n"
            ));
        }
        SWEEP_HEADER => {
            s.push_str("set logscale xy\nset xlabel '|lambda|'\n");
            s.push_str(&format!(
                "plot '{name}' using 1:2 skip 1 with linespoints title '|E_D|', \\\n     '{name}' using 1:3 skip 1 with linespoints title '|D - D_asym|'\n"
            ));
        }
        PREDICT_HEADER => {
            s.push_str("set logscale xy\nset xlabel 'Re lambda'\n");
            s.push_str(&format!(
                "plot '{name}' using 1:(abs($4)) skip 1 with linespoints title '|measured|', \\\n     '{name}' using 1:(abs($6)) skip 1 with linespoints title '|predicted|'\n"
            ));
        }
        other => {
            return Err(CliError::Config(format!(
                "unrecognized CSV header '{other}'"
            )))
        }
    }
    Ok(s)
}

pub fn default_script_path(csv: &Path) -> PathBuf {
    csv.with_extension("gp")
}
