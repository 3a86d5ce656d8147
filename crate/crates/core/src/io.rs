//! Text artifacts: fixed-precision number formatting, CSV tables and a small
//! JSON writer.
//!
//! Every float is written with 17 significant digits in scientific notation
//! and every line ends in `\n`, so identical inputs give identical bytes.
//!
//! CSV schemas:
//!
//! * Monge-Ampère grid: `x1,…,xs,phi,res`, one row per node in node order.
//! * Amoeba cloud: `x1,…,xk,residual`, rows sorted lexicographically.
//! * Corner locus: `x1,…,xk`, rows sorted lexicographically.
//! * Series: `index,value`.

use std::fmt::Write as _;

use crate::ma::{MASolution, ResidualSummary};
use crate::tropical::PointCloud;

/// A float with 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn csv(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|&x| num(x)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn axes(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("x{i}")).collect()
}

pub fn solution_csv(sol: &MASolution, residual: &ResidualSummary) -> String {
    let g = sol.grid();
    let mut header = axes(g.dim());
    header.push("phi".into());
    header.push("res".into());
    let rows: Vec<Vec<f64>> = (0..g.len())
        .map(|i| {
            let mut r = g.coords(i);
            r.push(sol.values()[i]);
            r.push(residual.field[i]);
            r
        })
        .collect();
    csv(&header, &rows)
}

pub fn cloud_csv(cloud: &PointCloud) -> String {
    let k = cloud.points.first().map_or(0, |p| p.len());
    let mut header = axes(k);
    header.push("residual".into());
    let rows: Vec<Vec<f64>> = cloud
        .points
        .iter()
        .zip(&cloud.residuals)
        .map(|(p, &r)| {
            let mut row = p.clone();
            row.push(r);
            row
        })
        .collect();
    csv(&header, &rows)
}

pub fn points_csv(points: &[Vec<f64>], k: usize) -> String {
    csv(&axes(k), points)
}

/// Two-column plot data.
pub fn series(values: &[f64]) -> String {
    let rows: Vec<Vec<f64>> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| vec![i as f64, v])
        .collect();
    let mut s = String::from("index,value\n");
    for r in rows {
        let _ = writeln!(s, "{},{}", r[0] as usize, num(r[1]));
    }
    s
}

/// A JSON value with deterministic rendering.
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    /// Keys keep insertion order.
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj<K: Into<String>>(fields: Vec<(K, Json)>) -> Json {
        Json::Obj(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn nums(v: &[f64]) -> Json {
        Json::Arr(v.iter().map(|&x| Json::Num(x)).collect())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 0);
        s.push('\n');
        s
    }

    fn write(&self, s: &mut String, indent: usize) {
        let pad = |s: &mut String, n: usize| s.extend(std::iter::repeat_n(' ', n));
        match self {
            Json::Null => s.push_str("null"),
            Json::Bool(b) => s.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(s, "{i}");
            }
            Json::Num(x) => {
                if x.is_finite() {
                    s.push_str(&num(*x));
                } else {
                    s.push_str("null");
                }
            }
            Json::Str(t) => escape(s, t),
            Json::Arr(v) => {
                if v.iter().all(|x| matches!(x, Json::Num(_) | Json::Int(_))) {
                    s.push('[');
                    for (i, x) in v.iter().enumerate() {
                        if i > 0 {
                            s.push_str(", ");
                        }
                        x.write(s, indent);
                    }
                    s.push(']');
                    return;
                }
                s.push_str("[\n");
                for (i, x) in v.iter().enumerate() {
                    pad(s, indent + 2);
                    x.write(s, indent + 2);
                    s.push_str(if i + 1 < v.len() { ",\n" } else { "\n" });
                }
                pad(s, indent);
                s.push(']');
            }
            Json::Obj(fields) => {
                s.push_str("{\n");
                for (i, (k, x)) in fields.iter().enumerate() {
                    pad(s, indent + 2);
                    escape(s, k);
                    s.push_str(": ");
                    x.write(s, indent + 2);
                    s.push_str(if i + 1 < fields.len() { ",\n" } else { "\n" });
                }
                pad(s, indent);
                s.push('}');
            }
        }
    }
}

fn escape(s: &mut String, t: &str) {
    s.push('"');
    for c in t.chars() {
        match c {
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(s, "\\u{:04x}", c as u32);
            }
            c => s.push(c),
        }
    }
    s.push('"');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(1.0), "1.0000000000000000e0");
        assert_eq!(num(-0.1), "-1.0000000000000001e-1");
        assert_eq!(num(f64::NAN), "nan");
        let x = std::f64::consts::PI;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_layout() {
        let s = csv(&["a".into(), "b".into()], &[vec![1.0, 2.0]]);
        assert_eq!(s, "a,b\n1.0000000000000000e0,2.0000000000000000e0\n");
        assert_eq!(series(&[0.5]), "index,value\n0,5.0000000000000000e-1\n");
    }

    #[test]
    fn json_rendering() {
        let j = Json::obj(vec![
            ("name", Json::Str("a\"b".into())),
            ("xs", Json::nums(&[1.0, 0.5])),
            (
                "rows",
                Json::Arr(vec![Json::obj(vec![("ok", Json::Bool(true))])]),
            ),
        ]);
        let expected = "{\n  \"name\": \"a\\\"b\",\n  \"xs\": [1.0000000000000000e0, 5.0000000000000000e-1],\n  \"rows\": [\n    {\n      \"ok\": true\n    }\n  ]\n}\n";
        assert_eq!(j.render(), expected);
    }
}
