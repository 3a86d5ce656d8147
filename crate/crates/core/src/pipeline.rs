//! End-to-end runs shared by the command-line tool and the acceptance suite.
//! Each returns its artifacts as text so callers decide where they go.

use crate::degeneration::{
    dual_complex, mumford_degeneration, verify_duality, DegenerationError, DualityReport,
    PolyDecomposition,
};
use crate::exec::Exec;
use crate::io::{self, Json};
use crate::ma::{
    ma_residual_with, solve_real_ma_with, standard_domain, MASolution, MaError, SolveMode,
    SolveOptions,
};
use crate::semiflat::{
    base_point, einstein_samples, fiber_diameter, gh_discrepancy_with, random_pairs,
    ricci_residual_with, SemiflatError, SemiflatMetric,
};
use crate::tropical::{
    amoeba_sample_with, corner_locus, tropicalize, AmoebaSampling, CornerLocus, LocusPiece,
    PieceKind, PointCloud, Region, TropicalError, TropicalPolynomial,
};

/// Parameters of a Monge-Ampère solve on the standard simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct MaRun {
    pub dim: usize,
    pub kappa: f64,
    pub resolution: usize,
    pub tol: f64,
    pub mode: SolveMode,
}

pub struct MaArtifacts {
    pub solution: MASolution,
    pub csv: String,
    pub summary: String,
}

pub fn solve_ma(run: &MaRun, exec: Exec) -> Result<MaArtifacts, MaError> {
    let domain = standard_domain(run.dim)?;
    let opts = SolveOptions {
        mode: run.mode,
        tol: run.tol,
        exec,
        ..SolveOptions::default()
    };
    let solution = solve_real_ma_with(domain, run.kappa, run.resolution, &opts)?;
    let res = ma_residual_with(&solution, exec);
    let csv = io::solution_csv(&solution, &res);
    let summary =
        format!(
        "nodes {}\nnewton_iterations {}\nresidual_sup {}\nresidual_mean {}\nresidual_argmax {}\n",
        solution.grid().len(),
        solution.newton_iters(),
        io::num(res.sup),
        io::num(res.mean),
        res.argmax_coords.iter().map(|&x| io::num(x)).collect::<Vec<_>>().join(",")
    );
    Ok(MaArtifacts {
        solution,
        csv,
        summary,
    })
}

/// Parses a comma-separated list of `t` values. Entries `e-L` stand for
/// `t = e^{-L}` and are kept exact as `L`; plain numbers are values of `t`.
/// Returns the values of `-log t`.
pub fn parse_t_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|item| {
            let item = item.trim();
            let l = if let Some(rest) = item.strip_prefix('e') {
                -rest.parse::<f64>().map_err(|e| format!("{item:?}: {e}"))?
            } else {
                -item
                    .parse::<f64>()
                    .map_err(|e| format!("{item:?}: {e}"))?
                    .ln()
            };
            if l > 0.0 && l.is_finite() {
                Ok(l)
            } else {
                Err(format!("{item:?} is not a value of t in (0, 1)"))
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseRow {
    pub neg_log_t: f64,
    pub fiber_diameter: f64,
    pub scaled_diameter: f64,
    /// `None` where base distances are unavailable (three dimensions).
    pub gh_sup: Option<f64>,
    pub gh_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseReport {
    pub dim: usize,
    pub kappa: f64,
    pub resolution: usize,
    pub base_point: Vec<f64>,
    pub pairs: usize,
    pub seed: u64,
    pub ricci: f64,
    pub rows: Vec<CollapseRow>,
}

impl CollapseReport {
    pub fn to_json(&self) -> String {
        let opt = |x: Option<f64>| x.map_or(Json::Null, Json::Num);
        Json::obj(vec![
            ("dim", Json::Int(self.dim as i64)),
            ("kappa", Json::Num(self.kappa)),
            ("resolution", Json::Int(self.resolution as i64)),
            ("base_point", Json::nums(&self.base_point)),
            ("pairs", Json::Int(self.pairs as i64)),
            ("seed", Json::Int(self.seed as i64)),
            ("ricci_residual", Json::Num(self.ricci)),
            (
                "rows",
                Json::Arr(
                    self.rows
                        .iter()
                        .map(|r| {
                            Json::obj(vec![
                                ("t", Json::Num((-r.neg_log_t).exp())),
                                ("neg_log_t", Json::Num(r.neg_log_t)),
                                ("fiber_diameter", Json::Num(r.fiber_diameter)),
                                ("diameter_times_neg_log_t", Json::Num(r.scaled_diameter)),
                                ("gh_discrepancy", opt(r.gh_sup)),
                                ("max_fiber_bound", opt(r.gh_bound)),
                            ])
                        })
                        .collect(),
                ),
            ),
        ])
        .render()
    }

    /// Plot-ready `(t index, quantity)` tables keyed by file stem.
    pub fn series(&self) -> Vec<(String, String)> {
        let col = |f: &dyn Fn(&CollapseRow) -> f64| {
            io::series(&self.rows.iter().map(f).collect::<Vec<_>>())
        };
        let mut out = vec![
            ("fiber_diameter".to_string(), col(&|r| r.fiber_diameter)),
            (
                "diameter_times_neg_log_t".to_string(),
                col(&|r| r.scaled_diameter),
            ),
        ];
        if self.rows.iter().all(|r| r.gh_sup.is_some()) {
            out.push((
                "gh_discrepancy".to_string(),
                col(&|r| r.gh_sup.unwrap_or(f64::NAN)),
            ));
        }
        out
    }
}

/// Fiber diameters, Gromov-Hausdorff discrepancies over seeded random pairs
/// and the Einstein residual of the semi-flat metric over `sol`.
pub fn collapse_report(
    sol: &MASolution,
    neg_log_ts: &[f64],
    pairs: usize,
    seed: u64,
    exec: Exec,
) -> Result<CollapseReport, SemiflatError> {
    let s = sol.dim();
    let first = SemiflatMetric::from_neg_log_t(sol, *neg_log_ts.first().unwrap_or(&1.0))?;
    let ricci = ricci_residual_with(&first, &einstein_samples(sol), exec)?;
    let x0 = base_point(&first).x;
    let sample = random_pairs(s, pairs, seed, 0.05);
    let mut rows = Vec::with_capacity(neg_log_ts.len());
    for &l in neg_log_ts {
        let m = SemiflatMetric::from_neg_log_t(sol, l)?;
        let d = fiber_diameter(&m, &x0)?;
        let (gh_sup, gh_bound) = if s <= 2 && pairs > 0 {
            let r = gh_discrepancy_with(&m, &sample, exec)?;
            (Some(r.sup_discrepancy), Some(r.max_fiber_bound))
        } else {
            (None, None)
        };
        rows.push(CollapseRow {
            neg_log_t: l,
            fiber_diameter: d,
            scaled_diameter: d * l,
            gh_sup,
            gh_bound,
        });
    }
    Ok(CollapseReport {
        dim: s,
        kappa: sol.kappa(),
        resolution: sol.grid().resolution(),
        base_point: x0,
        pairs,
        seed,
        ricci,
        rows,
    })
}

pub fn amoeba(
    p: &TropicalPolynomial,
    t_abs: f64,
    sampling: &AmoebaSampling,
    exec: Exec,
) -> Result<(PointCloud, String), TropicalError> {
    let cloud = amoeba_sample_with(p, t_abs, sampling, exec)?;
    let csv = io::cloud_csv(&cloud);
    Ok((cloud, csv))
}

fn piece_text(p: &LocusPiece) -> String {
    let kind = match p.kind {
        PieceKind::Point => "point",
        PieceKind::Segment => "segment",
        PieceKind::Ray => "ray",
        PieceKind::Line => "line",
    };
    let join = |v: Vec<String>| v.join(",");
    let mut s = format!(
        "{kind} terms {} origin ({})",
        join(p.terms.iter().map(|t| t.to_string()).collect()),
        join(p.origin.iter().map(|x| x.to_string()).collect())
    );
    if !p.direction.is_empty() {
        s += &format!(
            " direction ({})",
            join(p.direction.iter().map(|x| x.to_string()).collect())
        );
    }
    if let Some(l) = &p.length {
        s += &format!(" length {l}");
    }
    s
}

/// Corner locus with sampled points as CSV and the exact cells as text.
pub fn tropical(
    p: &TropicalPolynomial,
    region: &Region,
    resolution: usize,
) -> Result<(CornerLocus, String, String), TropicalError> {
    let locus = corner_locus(&tropicalize(p), region, resolution)?;
    let csv = io::points_csv(&locus.points, p.nvars());
    let mut text = format!("exact {}\npieces {}\n", locus.exact, locus.pieces.len());
    for piece in &locus.pieces {
        text += &piece_text(piece);
        text.push('\n');
    }
    text += &format!("vertices {}\n", locus.vertices.len());
    for v in &locus.vertices {
        text += &piece_text(v);
        text.push('\n');
    }
    Ok((locus, csv, text))
}

/// Dual complex of a fixture, its canonical text and the duality check.
pub fn dual_complex_text(fixture: &str) -> Result<(String, DualityReport), DegenerationError> {
    let pd = PolyDecomposition::parse(fixture)?;
    let d = mumford_degeneration(&pd)?;
    let dc = dual_complex(&d)?;
    let report = verify_duality(&dc, &d);
    let mut text = dc.to_text();
    text += &format!(
        "duality {}\npairs_checked {}\n",
        if report.pass() { "pass" } else { "fail" },
        report.pairs_checked
    );
    for v in &report.violations {
        text += &format!("violation {v:?}\n");
    }
    Ok((text, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_list() {
        assert_eq!(
            parse_t_list("e-5,e-10, e-20").unwrap(),
            vec![5.0, 10.0, 20.0]
        );
        let l = parse_t_list("0.5").unwrap();
        assert!((l[0] - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(parse_t_list("e5").is_err());
        assert!(parse_t_list("2").is_err());
        assert!(parse_t_list("x").is_err());
    }

    #[test]
    fn collapse_report_1d() {
        let a = solve_ma(
            &MaRun {
                dim: 1,
                kappa: 1.0,
                resolution: 256,
                tol: 1e-6,
                mode: SolveMode::Barrier,
            },
            Exec::default(),
        )
        .unwrap();
        assert!(a.csv.starts_with("x1,phi,res\n"));
        assert_eq!(a.csv.lines().count(), 256);
        let r = collapse_report(&a.solution, &[5.0, 10.0], 10, 0, Exec::default()).unwrap();
        assert_eq!(r.rows[1].fiber_diameter * 2.0, r.rows[0].fiber_diameter);
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((r.rows[0].scaled_diameter - pi2).abs() < 1e-2);
        let j = r.to_json();
        assert!(j.contains("\"diameter_times_neg_log_t\""));
        assert_eq!(r.series().len(), 3);
    }

    #[test]
    fn dual_text() {
        let (t, rep) = dual_complex_text(include_str!("../fixtures/square_diagonal.txt")).unwrap();
        assert!(rep.pass());
        assert!(t.contains("duality pass\n"));
    }
}
