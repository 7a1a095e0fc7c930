//! Gnuplot script for log-log plots of the fitted excess over the leading term.

use std::path::Path;

use tubenorm::asymptotics::ExpansionFit;

use crate::CliError;

fn g(x: f64) -> String {
    format!("{:.11e}", x)
}

/// Least-squares slope of `log|excess|` against `log ε`.
pub fn residual_slope(fit: &ExpansionFit) -> Option<f64> {
    let pts: Vec<(f64, f64)> = fit
        .excess()
        .into_iter()
        .filter(|(_, r)| *r != 0.0)
        .map(|(e, r)| (e.ln(), r.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn render_plot_script(fit: &ExpansionFit) -> Result<String, CliError> {
    if fit.records.is_empty() || fit.terms.is_empty() {
        return Err(CliError::Io("cannot plot an empty fit".into()));
    }
    let slope = residual_slope(fit).ok_or_else(|| CliError::Io("fit has no nonzero residuals".into()))?;
    let mut s = String::new();
    s.push_str("set terminal pngcairo size 900,650\n");
    s.push_str("set output 'fit.png'\n");
    s.push_str("set logscale xy\n");
    s.push_str("set xlabel 'epsilon'\n");
    s.push_str("set ylabel '|norm_sq - (2/3) l eps^3|'\n");
    s.push_str("set key top left\n");
    s.push_str("$excess << EOD\n");
    for (e, r) in fit.excess() {
        s.push_str(&format!("{} {}\n", g(e), g(r.abs())));
    }
    s.push_str("EOD\n");
    let model: Vec<String> = fit
        .terms
        .iter()
        .filter(|t| t.power != 3)
        .map(|t| format!("({})*x**{}", g(t.coefficient), t.power))
        .collect();
    s.push_str(&format!("model(x) = abs({})\n", model.join(" + ")));
    s.push_str(&format!("set label 1 sprintf('residual slope = %.3f', {}) at graph 0.05, graph 0.80\n", g(slope)));
    s.push_str("plot $excess using 1:2 with points pt 7 title 'data', model(x) with lines title 'fit'\n");
    Ok(s)
}

pub fn emit_plot_script(fit: &ExpansionFit, path: &Path) -> Result<(), CliError> {
    let body = render_plot_script(fit)?;
    std::fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
