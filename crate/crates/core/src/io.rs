//! Text output: CSV and JSON lines with round-trip float formatting.

use std::io::{self, Write};

use crate::process::AtomicProbability;
use crate::simplex::SimplexPoint;

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros removed,
/// exponent form outside `1e-4 <= |x| < 1e17`.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        strip_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x0,x1,...,x{dim-1}`.
pub fn csv_header(dim: usize) -> String {
    (0..dim).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",")
}

pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|v| fmt_g17(*v)).collect::<Vec<_>>().join(",")
}

fn json_array(values: &[f64]) -> String {
    format!("[{}]", csv_row(values))
}

/// `{"x":[...]}`.
pub fn jsonl_point(values: &[f64]) -> String {
    format!("{{\"x\":{}}}", json_array(values))
}

/// `{"atoms":[[location,weight],...]}`.
pub fn jsonl_atoms(p: &AtomicProbability) -> String {
    let atoms: Vec<String> = p.atoms().iter().map(|(l, w)| json_array(&[*l, *w])).collect();
    format!("{{\"atoms\":[{}]}}", atoms.join(","))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

/// Writes simplex points one per line, with a CSV header before the first.
pub struct PointWriter<W: Write> {
    out: W,
    format: OutputFormat,
    header_written: bool,
}

impl<W: Write> PointWriter<W> {
    pub fn new(out: W, format: OutputFormat) -> Self {
        Self { out, format, header_written: false }
    }

    pub fn write_point(&mut self, x: &SimplexPoint) -> io::Result<()> {
        match self.format {
            OutputFormat::Csv => {
                if !self.header_written {
                    writeln!(self.out, "{}", csv_header(x.dim()))?;
                    self.header_written = true;
                }
                writeln!(self.out, "{}", csv_row(x.coords()))
            }
            OutputFormat::Jsonl => writeln!(self.out, "{}", jsonl_point(x.coords())),
        }
    }

    /// Emits the CSV header even when no rows follow.
    pub fn write_header(&mut self, dim: usize) -> io::Result<()> {
        if self.format == OutputFormat::Csv && !self.header_written {
            writeln!(self.out, "{}", csv_header(dim))?;
            self.header_written = true;
        }
        Ok(())
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (0.5, "0.5"),
            (1.0, "1"),
            (0.1, "0.10000000000000001"),
            (1.0 / 3.0, "0.33333333333333331"),
            (123456.0, "123456"),
            (1e-5, "1.0000000000000001e-05"),
            (1.5e-7, "1.4999999999999999e-07"),
            (1e17, "1e+17"),
            (-2.25, "-2.25"),
            (0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g17(x), want, "{x}");
        }
    }

    #[test]
    fn g17_round_trips() {
        for x in [0.1, 1.0 / 7.0, 2.0f64.sqrt(), 6.02214076e23, 1e-300, 0.3 + 0.6] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn writers() {
        let mut w = PointWriter::new(Vec::new(), OutputFormat::Csv);
        w.write_point(&SimplexPoint::vertex(3, 1)).unwrap();
        assert_eq!(String::from_utf8(w.into_inner()).unwrap(), "x0,x1,x2\n0,1,0\n");
        let mut w = PointWriter::new(Vec::new(), OutputFormat::Jsonl);
        w.write_point(&SimplexPoint::vertex(2, 0)).unwrap();
        assert_eq!(String::from_utf8(w.into_inner()).unwrap(), "{\"x\":[1,0]}\n");
        let p = AtomicProbability::new(vec![(0.25, 0.5), (0.75, 0.5)]).unwrap();
        assert_eq!(jsonl_atoms(&p), "{\"atoms\":[[0.25,0.5],[0.75,0.5]]}");
    }
}
