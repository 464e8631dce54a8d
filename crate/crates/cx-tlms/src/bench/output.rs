//! CSV and script emission. All files use LF line endings, `.` decimal
//! separators and 17 significant digits so reruns are byte-identical.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::arch::{ArchKind, MatrixField, StateMatrix};
use crate::error::Result;

/// Full-precision float formatting (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Complex entry as `re+imj` / `re-imj` text.
pub fn fmt_complex(v: Complex64) -> String {
    if v.im.is_sign_negative() {
        format!("{}-{}j", fmt_f64(v.re), fmt_f64(-v.im))
    } else {
        format!("{}+{}j", fmt_f64(v.re), fmt_f64(v.im))
    }
}

/// Learning curves: header `n,arch,mse_db`, architectures in selection
/// order, sample-major within each architecture.
pub fn write_curves_csv(path: &Path, curves: &[(ArchKind, Vec<f64>)]) -> Result<()> {
    let mut out = String::from("n,arch,mse_db\n");
    for (kind, curve) in curves {
        for (n, v) in curve.iter().enumerate() {
            out.push_str(&format!("{n},{},{}\n", kind.name(), fmt_f64(*v)));
        }
    }
    write_atomic(path, out.as_bytes())
}

/// Per-run summaries: header `run,arch,final_mse_db`.
pub fn write_summary_csv(path: &Path, rows: &[(usize, ArchKind, f64)]) -> Result<()> {
    let mut out = String::from("run,arch,final_mse_db\n");
    for (run, kind, v) in rows {
        out.push_str(&format!("{run},{},{}\n", kind.name(), fmt_f64(*v)));
    }
    write_atomic(path, out.as_bytes())
}

/// One factor matrix or weight vector: header
/// `rows=<I> cols=<R> field=real|complex`, then comma-separated rows.
pub fn write_state_dump(path: &Path, mat: &StateMatrix) -> Result<()> {
    let mut out = String::new();
    match &mat.matrix {
        MatrixField::Real(m) => {
            out.push_str(&format!("rows={} cols={} field=real\n", m.rows(), m.cols()));
            for r in 0..m.rows() {
                let cells: Vec<String> = m.row(r).iter().map(|&v| fmt_f64(v)).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        MatrixField::Complex(m) => {
            out.push_str(&format!(
                "rows={} cols={} field=complex\n",
                m.rows(),
                m.cols()
            ));
            for r in 0..m.rows() {
                let cells: Vec<String> = m.row(r).iter().map(|&v| fmt_complex(v)).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
    }
    write_atomic(path, out.as_bytes())
}

/// Gnuplot script plotting each architecture's curve from `curves.csv`.
pub fn write_gnuplot_script(path: &Path, archs: &[ArchKind]) -> Result<()> {
    let mut out = String::new();
    out.push_str("# gnuplot script for cx-tlms learning curves\n");
    out.push_str("set datafile separator \",\"\n");
    out.push_str("set xlabel \"sample n\"\n");
    out.push_str("set ylabel \"MSE [dB]\"\n");
    out.push_str("set key bottom left\n");
    out.push_str("set grid\n");
    let plots: Vec<String> = archs
        .iter()
        .map(|k| {
            format!(
                "\"curves.csv\" using 1:(strcol(2) eq \"{0}\" ? $3 : NaN) with lines title \"{0}\"",
                k.name()
            )
        })
        .collect();
    out.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    write_atomic(path, out.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::Mat;

    #[test]
    fn float_format_is_full_precision() {
        let v = std::f64::consts::PI;
        let s = fmt_f64(v);
        assert_eq!(s.parse::<f64>().unwrap(), v);
    }

    #[test]
    fn complex_format_signs() {
        let s = fmt_complex(Complex64::new(1.0, -0.5));
        assert!(s.contains('-') && s.ends_with('j'));
        let s = fmt_complex(Complex64::new(-2.0, 0.25));
        assert!(s.contains('+') && s.ends_with('j'));
    }

    #[test]
    fn state_dump_header_and_shape() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let mat = StateMatrix {
            name: "mode1".into(),
            matrix: MatrixField::Real(Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]])),
        };
        write_state_dump(&path, &mat).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "rows=2 cols=2 field=real");
        assert_eq!(lines.count(), 2);
        assert!(!text.contains('\r'));
    }
}
