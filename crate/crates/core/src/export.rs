//! Text artifacts: digit-string samples, Monna-map reals, distance matrices.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::limit::LimitSetSample;
use crate::metric::distance_matrix;
use crate::padic::PadicInt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Digits,
    Monna,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "digits" => Ok(ExportFormat::Digits),
            "monna" => Ok(ExportFormat::Monna),
            other => Err(format!(
                "unknown format {other:?} (expected digits or monna)"
            )),
        }
    }
}

/// `sum d_i p^i -> sum d_i p^(-i-1)`, a point of `[0, 1)`.
pub fn monna(x: &PadicInt) -> f64 {
    let p = x.prime() as f64;
    x.digits()
        .iter()
        .rev()
        .fold(0.0, |acc, &d| (acc + d as f64) / p)
}

pub fn export_points(sample: &LimitSetSample, format: ExportFormat) -> Result<String> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(match format {
        ExportFormat::Digits => sample.to_text(),
        ExportFormat::Monna => {
            let h = sample.header();
            let mut out = format!(
                "# monna embedding, lossy and for plotting only: p={} K={} depth={}\n",
                h.prime, h.precision, h.depth
            );
            for x in sample.points() {
                writeln!(out, "{}\t{x}", monna(x)).unwrap();
            }
            out
        }
    })
}

/// One row per point: `v(x_i - x_j)` for every `j`. The diagonal holds `K`.
pub fn distance_matrix_text(sample: &LimitSetSample, execution: Execution) -> Result<String> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let h = sample.header();
    let mut out = format!(
        "# valuations v(x_i - x_j), diagonal is K: p={} K={} depth={} points={}\n",
        h.prime,
        h.precision,
        h.depth,
        sample.len()
    );
    for row in distance_matrix(sample, execution) {
        let cells: Vec<String> = row.iter().map(usize::to_string).collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
    Ok(out)
}

/// Writes through a sibling temporary file and a rename, so readers never see
/// a partial artifact.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::SampleHeader;

    fn sample(p: u32, k: usize, pts: &[i64]) -> LimitSetSample {
        let header = SampleHeader {
            prime: p,
            precision: k,
            depth: k,
            alphabet: 2,
            rows: 1,
            cols: 1,
            family: "perm:(1,2)".into(),
        };
        LimitSetSample::from_points(
            header,
            pts.iter().map(|&n| PadicInt::from_i64(p, k, n).unwrap()),
        )
    }

    #[test]
    fn monna_examples() {
        let s = sample(3, 4, &[0, 1, 3]);
        assert_eq!(monna(&s.points()[0]), 0.0);
        assert_eq!(monna(&PadicInt::from_i64(3, 4, 1).unwrap()), 1.0 / 3.0);
        assert_eq!(monna(&PadicInt::from_i64(3, 4, 3).unwrap()), 1.0 / 9.0);
        let text = export_points(&s, ExportFormat::Monna).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# monna embedding, lossy"));
        assert_eq!(lines[1], "0\t0,0,0,0");
        assert!(lines.iter().any(|l| l.ends_with("\t1,0,0,0")));
    }

    #[test]
    fn monna_stays_in_unit_interval() {
        let top = PadicInt::from_i64(5, 6, -1).unwrap();
        let m = monna(&top);
        assert!(m < 1.0 && m > 0.99);
    }

    #[test]
    fn digits_round_trip() {
        let s = sample(3, 4, &[0, 1, 3, 10, 26]);
        let text = export_points(&s, ExportFormat::Digits).unwrap();
        assert_eq!(LimitSetSample::parse_text(&text).unwrap(), s);
    }

    #[test]
    fn empty_sample_is_rejected() {
        let s = sample(3, 4, &[]);
        assert_eq!(
            export_points(&s, ExportFormat::Digits),
            Err(Error::EmptySample)
        );
        assert_eq!(
            distance_matrix_text(&s, Execution::Sequential),
            Err(Error::EmptySample)
        );
    }

    #[test]
    fn distance_matrix_layout() {
        let s = sample(3, 4, &[0, 1, 3]);
        let text = distance_matrix_text(&s, Execution::Sequential).unwrap();
        let rows: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(rows, vec!["4 1 0", "1 4 0", "0 0 4"]);
    }

    #[test]
    fn format_names() {
        assert_eq!("monna".parse(), Ok(ExportFormat::Monna));
        assert!("csv".parse::<ExportFormat>().is_err());
    }

    #[test]
    fn atomic_write_replaces_whole_file() {
        let dir = std::env::temp_dir().join(format!("zp-limits-export-{}", std::process::id()));
        let path = dir.join("nested").join("out.txt");
        write_atomic(&path, "first\n").unwrap();
        write_atomic(&path, "second\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "second\n");
        assert!(!dir.join("nested").join("out.txt.tmp").exists());
        fs::remove_dir_all(dir).unwrap();
    }
}
