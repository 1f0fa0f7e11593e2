//! Library side of the command-line tool: the text grammars and the
//! formatting helpers the binary and its tests share.

pub mod text;

/// Floats in reports and CSV files carry 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x }; // normalize -0.0
    format!("{x:.11e}")
}

/// One CSV line: comma-separated cells, LF terminated.
pub fn csv_line(cells: &[String]) -> String {
    let mut line = cells.join(",");
    line.push('\n');
    line
}
