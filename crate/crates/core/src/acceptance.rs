//! The end-to-end acceptance suite.
//!
//! Each criterion returns a [`CriterionResult`] whose `detail` is
//! deterministic; wall-clock times are kept apart so that reports can be
//! compared byte for byte.

use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::degeneration::{
    dual_complex, mumford_degeneration, verify_duality, DegenerationData, DualComplex,
    PolyDecomposition, Violation,
};
use crate::exec::Exec;
use crate::ma::{
    closed_form_1d_correction, ma_residual_with, solve_real_ma_with, standard_domain, GridSpec,
    MASolution, SolveMode, SolveOptions,
};
use crate::pipeline::{self, MaRun};
use crate::semiflat::{
    base_distance, einstein_samples, fiber_diameter, gh_discrepancy_with, random_pairs,
    ricci_residual_with, segment_length, special_defect, special_phase, AffineTorus, FlatLimitData,
    SemiflatMetric,
};
use crate::toric::SimplexDomain;
use crate::tropical::{
    amoeba_sample_with, convergence_curve_with, corner_locus, hausdorff_distance_with, tropicalize,
    AmoebaSampling, PieceKind, Region, TropicalPolynomial,
};

pub const FIXTURE_SQUARE: &str = include_str!("../fixtures/square_diagonal.txt");
pub const FIXTURE_TRIVIAL: &str = include_str!("../fixtures/trivial.txt");
pub const FIXTURE_TWO_BY_TWO: &str = include_str!("../fixtures/two_by_two.txt");
pub const FIXTURE_INTERVAL: &str = include_str!("../fixtures/interval.txt");

/// `d_H · (-log t)` for the line `1 + z₁ + z₂` on `[-2, 2]²` sampled at
/// resolution 400 with 64 angles, at `t = e⁻⁵, e⁻¹⁰, e⁻²⁰`.
pub const LINE_SCALED_HAUSDORFF: [f64; 3] =
    [0.6839862700315624, 0.6839862700315646, 0.6051815109510266];

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

pub const CRITERIA: [&str; 12] = [
    "1D closed-form oracle",
    "kappa shift",
    "2D triangle solve",
    "Einstein check",
    "collapse rate",
    "base geodesics",
    "GH discrepancy",
    "tropical exact case",
    "amoeba convergence",
    "dual complex laws",
    "special Lagrangian flat model",
    "determinism",
];

struct Timed {
    sol: Result<MASolution, String>,
    elapsed: Duration,
}

/// Solutions shared between criteria, computed on first use.
pub struct Context {
    exec: Exec,
    sol1d: OnceLock<Timed>,
    sol2d: [OnceLock<Timed>; 3],
}

const RES_2D: [usize; 3] = [32, 64, 128];

fn solve(dim: usize, kappa: f64, res: usize, tol: f64, exec: Exec) -> Timed {
    let start = Instant::now();
    let sol = standard_domain(dim)
        .and_then(|d| {
            let opts = SolveOptions {
                mode: SolveMode::Barrier,
                tol,
                exec,
                ..SolveOptions::default()
            };
            solve_real_ma_with(d, kappa, res, &opts)
        })
        .map_err(|e| e.to_string());
    Timed {
        sol,
        elapsed: start.elapsed(),
    }
}

impl Context {
    pub fn new(exec: Exec) -> Self {
        Context {
            exec,
            sol1d: OnceLock::new(),
            sol2d: Default::default(),
        }
    }

    fn sol1d(&self) -> Result<(&MASolution, Duration), String> {
        let t = self
            .sol1d
            .get_or_init(|| solve(1, 1.0, 2048, 1e-6, self.exec));
        t.sol.as_ref().map(|s| (s, t.elapsed)).map_err(Clone::clone)
    }

    fn sol2d(&self, k: usize) -> Result<(&MASolution, Duration), String> {
        let t = self.sol2d[k].get_or_init(|| solve(2, 1.0, RES_2D[k], 1e-6, self.exec));
        t.sol.as_ref().map(|s| (s, t.elapsed)).map_err(Clone::clone)
    }
}

type Check = Result<(bool, String), String>;

fn verdict(checks: &[(bool, String)]) -> (bool, String) {
    (
        checks.iter().all(|c| c.0),
        checks
            .iter()
            .map(|c| c.1.as_str())
            .collect::<Vec<_>>()
            .join("; "),
    )
}

fn le(name: &str, value: f64, bound: f64) -> (bool, String) {
    (value <= bound, format!("{name} {value:.3e} <= {bound:.0e}"))
}

fn within(name: &str, value: f64, target: f64, tol: f64) -> (bool, String) {
    (
        (value - target).abs() <= tol,
        format!("{name} {value:.9} vs {target:.9} +- {tol:.0e}"),
    )
}

/// Independent statement of the one-dimensional solution.
fn oracle_1d(kappa: f64, x: f64) -> f64 {
    -(kappa.sqrt() * (PI * x).sin() / PI).ln()
}

fn c1(ctx: &Context) -> Check {
    let (sol, elapsed) = ctx.sol1d()?;
    let g = sol.grid();
    let mut err: f64 = 0.0;
    for i in 0..g.len() {
        let x = g.coords(i)[0];
        if (0.05..=0.95).contains(&x) {
            err = err.max((sol.values()[i] - oracle_1d(1.0, x)).abs());
        }
    }
    let mid = sol.nearest_node(&[0.5]).ok_or("no midpoint node")?;
    Ok(verdict(&[
        le("sup error", err, 5e-4),
        within("phi(1/2)", sol.values()[mid], PI.ln(), 1e-3),
        (elapsed.as_secs_f64() < 30.0, "solve under 30 s".into()),
    ]))
}

fn c2(ctx: &Context) -> Check {
    let mut checks = Vec::new();
    for (dim, res) in [(1, 256), (2, 32)] {
        let base = solve(dim, 1.0, res, 1e-10, ctx.exec).sol?;
        for kappa in [0.5, 4.0] {
            let s = solve(dim, kappa, res, 1e-10, ctx.exec).sol?;
            let shift = 0.5 * f64::ln(kappa);
            let dev = s
                .values()
                .iter()
                .zip(base.values())
                .map(|(a, b)| (a - (b - shift)).abs())
                .fold(0.0, f64::max);
            checks.push(le(&format!("dim {dim} kappa {kappa}"), dev, 1e-8));
        }
    }
    Ok(verdict(&checks))
}

/// Largest change of the solution under the six symmetries of the triangle.
fn symmetry_defect(sol: &MASolution) -> f64 {
    let g = sol.grid();
    let n = g.resolution();
    let mut worst: f64 = 0.0;
    for i in 0..g.len() {
        let [a, b, _] = g.index(i);
        let c = n - a - b;
        for (p, q) in [(b, a), (c, b), (a, c), (b, c), (c, a)] {
            let j = g.node_at(&[p, q]).expect("permuted node");
            worst = worst.max((sol.values()[i] - sol.values()[j]).abs());
        }
    }
    worst
}

/// Sup distance between two solutions over the nodes of the coarser grid
/// with slack at least `slack`.
fn coarse_sup_diff(coarse: &MASolution, fine: &MASolution, slack: f64) -> f64 {
    let gc = coarse.grid();
    let gf = fine.grid();
    let r = gf.resolution() / gc.resolution();
    let mut d: f64 = 0.0;
    for i in 0..gc.len() {
        if gc.slack(i) < slack {
            continue;
        }
        let [a, b, _] = gc.index(i);
        let j = gf.node_at(&[a * r, b * r]).expect("nested grids");
        d = d.max((coarse.values()[i] - fine.values()[j]).abs());
    }
    d
}

fn c3(ctx: &Context) -> Check {
    let (s32, _) = ctx.sol2d(0)?;
    let (s64, _) = ctx.sol2d(1)?;
    let (s128, t128) = ctx.sol2d(2)?;
    let mut checks = Vec::new();
    for s in [s32, s64, s128] {
        let r = ma_residual_with(s, ctx.exec);
        checks.push(le(
            &format!("residual res {}", s.grid().resolution()),
            r.sup,
            1e-6,
        ));
    }
    checks.push(le("symmetry defect", symmetry_defect(s128), 1e-8));
    let coarse = coarse_sup_diff(s32, s64, 0.05);
    let fine = coarse_sup_diff(s64, s128, 0.05);
    let ratio = coarse / fine;
    checks.push((
        (3.0..=5.0).contains(&ratio),
        format!("halving ratio {ratio:.4} in [3, 5]"),
    ));
    checks.push((
        t128.as_secs_f64() < 300.0,
        "resolution 128 under 5 min".into(),
    ));
    Ok(verdict(&checks))
}

fn c4(ctx: &Context) -> Check {
    let g = GridSpec::new(SimplexDomain::standard(1), 1000).map_err(|e| e.to_string())?;
    let exact =
        MASolution::from_barrier_correction(g, 1.0, |x| closed_form_1d_correction(1.0, x[0]))
            .map_err(|e| e.to_string())?;
    let m1 = SemiflatMetric::from_neg_log_t(&exact, 1.0).map_err(|e| e.to_string())?;
    let r1 =
        ricci_residual_with(&m1, &einstein_samples(&exact), ctx.exec).map_err(|e| e.to_string())?;
    let (s128, _) = ctx.sol2d(2)?;
    let m2 = SemiflatMetric::from_neg_log_t(s128, 1.0).map_err(|e| e.to_string())?;
    let r2 =
        ricci_residual_with(&m2, &einstein_samples(s128), ctx.exec).map_err(|e| e.to_string())?;
    Ok(verdict(&[
        le("1D exact", r1, 1e-4),
        le("2D solver", r2, 5e-2),
    ]))
}

fn c5(ctx: &Context) -> Check {
    let (sol, _) = ctx.sol1d()?;
    let mut checks = Vec::new();
    let mut diams = Vec::new();
    for l in [5.0, 10.0, 20.0, 40.0] {
        let m = SemiflatMetric::from_neg_log_t(sol, l).map_err(|e| e.to_string())?;
        diams.push(fiber_diameter(&m, &[0.5]).map_err(|e| e.to_string())?);
    }
    for (k, l) in [5.0, 10.0, 20.0].iter().enumerate() {
        checks.push(within(
            &format!("diam*L at L={l}"),
            diams[k] * l,
            PI * PI,
            1e-3,
        ));
        let ratio = diams[k + 1] / diams[k];
        checks.push((ratio == 0.5, format!("ratio at L={l} {ratio}")));
    }
    Ok(verdict(&checks))
}

fn c6(ctx: &Context) -> Check {
    let (sol, _) = ctx.sol1d()?;
    let e = |r: Result<f64, _>| r.map_err(|e: crate::semiflat::SemiflatError| e.to_string());
    let mut checks = vec![within(
        "d(1/4,1/2)",
        e(base_distance(sol, &[0.25], &[0.5]))?,
        0.88137,
        1e-3,
    )];
    let (s2, _) = ctx.sol2d(2)?;
    for (p, q) in [([0.25, 0.25], [0.375, 0.375]), ([0.5, 0.25], [0.25, 0.375])] {
        let graph = e(base_distance(s2, &p, &q))?;
        let quad = e(segment_length(s2, &p, &q))?;
        let rel = (graph / quad - 1.0).abs();
        checks.push(le(&format!("2D edge {p:?}-{q:?} relative gap"), rel, 0.02));
    }
    for eps in [1e-2, 1e-3] {
        let d = e(base_distance(sol, &[0.5], &[eps]))?;
        let ratio = d / -(PI * eps / 2.0).tan().ln();
        checks.push(within(&format!("completeness eps={eps}"), ratio, 1.0, 0.02));
    }
    Ok(verdict(&checks))
}

fn c7(ctx: &Context) -> Check {
    let (sol, _) = ctx.sol2d(2)?;
    let pairs = random_pairs(2, 100, 0, 0.05);
    let mut sups = Vec::new();
    let mut bound_ok = true;
    let mut worst: f64 = 0.0;
    for l in [10.0, 20.0] {
        let m = SemiflatMetric::from_neg_log_t(sol, l).map_err(|e| e.to_string())?;
        let r = gh_discrepancy_with(&m, &pairs, ctx.exec).map_err(|e| e.to_string())?;
        for p in &r.pairs {
            bound_ok &= p.discrepancy <= 2.0 * p.fiber_bound;
            if p.fiber_bound > 0.0 {
                worst = worst.max(p.discrepancy / p.fiber_bound);
            }
        }
        sups.push(r.sup_discrepancy);
    }
    let ratio = sups[1] / sups[0];
    Ok(verdict(&[
        (
            bound_ok,
            format!("discrepancy / fiber bound at most {worst:.4} <= 2"),
        ),
        within("sup ratio", ratio, 0.5, 0.05),
    ]))
}

fn line() -> TropicalPolynomial {
    TropicalPolynomial::from_real(&[(&[0, 0], 1.0, 0), (&[1, 0], 1.0, 0), (&[0, 1], 1.0, 0)])
        .expect("line")
}

fn c8(ctx: &Context) -> Check {
    let e = |x: crate::tropical::TropicalError| x.to_string();
    let p = TropicalPolynomial::from_real(&[(&[0], 1.0, 0), (&[1], 1.0, 0)]).map_err(e)?;
    let region = Region::cube(1, 2.0).map_err(e)?;
    let sampling = AmoebaSampling::new(region.clone(), 100, 16).map_err(e)?;
    let locus = corner_locus(&tropicalize(&p), &region, 100).map_err(e)?;
    let mut worst: f64 = 0.0;
    for l in [1.0f64, 5.0, 10.0, 20.0, 50.0] {
        let cloud = amoeba_sample_with(&p, (-l).exp(), &sampling, ctx.exec).map_err(e)?;
        worst = worst.max(
            hausdorff_distance_with(&cloud.points, &locus.points, &region, ctx.exec).map_err(e)?,
        );
    }
    let r2 = Region::cube(2, 2.0).map_err(e)?;
    let ll = corner_locus(&tropicalize(&line()), &r2, 100).map_err(e)?;
    let rays = ll
        .pieces
        .iter()
        .filter(|q| q.kind == PieceKind::Ray)
        .count();
    let at_origin = ll.vertices.len() == 1 && ll.vertices[0].origin_f64() == vec![0.0, 0.0];
    Ok(verdict(&[
        le("1+z1 Hausdorff", worst, 1e-12),
        (
            rays == 3 && ll.pieces.len() == 3,
            format!("line pieces {} rays {rays}", ll.pieces.len()),
        ),
        (
            at_origin,
            format!("vertices {} at origin {at_origin}", ll.vertices.len()),
        ),
    ]))
}

fn c9(ctx: &Context) -> Check {
    let e = |x: crate::tropical::TropicalError| x.to_string();
    let sampling = AmoebaSampling::new(Region::cube(2, 2.0).map_err(e)?, 400, 64).map_err(e)?;
    let ts: Vec<f64> = [5.0f64, 10.0, 20.0].iter().map(|l| (-l).exp()).collect();
    let rows = convergence_curve_with(&line(), &ts, &sampling, ctx.exec).map_err(e)?;
    let mut checks = vec![
        le("d_H at e^-20", rows[2].d_h, 0.1),
        (
            rows.windows(2).all(|w| w[1].d_h <= w[0].d_h),
            format!(
                "d_H nonincreasing {}",
                rows.iter()
                    .map(|r| format!("{:.6}", r.d_h))
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
        ),
    ];
    for (r, locked) in rows.iter().zip(LINE_SCALED_HAUSDORFF) {
        checks.push((
            r.scaled <= 1.0 && ((r.scaled - locked) / locked).abs() <= 1e-9,
            format!("scaled {:.12} locked", r.scaled),
        ));
    }
    Ok(verdict(&checks))
}

fn load(text: &str) -> Result<(DegenerationData, DualComplex), String> {
    let pd = PolyDecomposition::parse(text).map_err(|e| e.to_string())?;
    let d = mumford_degeneration(&pd).map_err(|e| e.to_string())?;
    let dc = dual_complex(&d).map_err(|e| e.to_string())?;
    Ok((d, dc))
}

fn c10(_ctx: &Context) -> Check {
    let mut checks = Vec::new();
    for (name, text) in [
        ("square", FIXTURE_SQUARE),
        ("trivial", FIXTURE_TRIVIAL),
        ("two_by_two", FIXTURE_TWO_BY_TWO),
        ("interval", FIXTURE_INTERVAL),
    ] {
        let (d, dc) = load(text)?;
        let r = verify_duality(&dc, &d);
        checks.push((
            r.pass(),
            format!(
                "{name} f-vector {:?} pairs {}",
                dc.f_vector(),
                r.pairs_checked
            ),
        ));
    }
    let (d, dc) = load(FIXTURE_SQUARE)?;
    checks.push((
        dc.f_vector() == vec![2, 1],
        "square is two vertices and an edge".into(),
    ));

    let mut gone = dc.clone();
    gone.cells.retain(|c| c.dim != 1);
    gone.faces.clear();
    checks.push((
        verify_duality(&gone, &d)
            .violations
            .contains(&Violation::MissingCell {
                components: vec![0, 1],
            }),
        "dropped edge gives MissingCell".into(),
    ));
    let mut wrong = dc.clone();
    if let Some(c) = wrong.cells.iter_mut().find(|c| c.dim == 1) {
        c.dim = 2;
    }
    checks.push((
        verify_duality(&wrong, &d)
            .violations
            .contains(&Violation::DimensionLaw {
                components: vec![0, 1],
                cell_dim: 2,
                stratum_dim: 1,
                n: 2,
            }),
        "wrong dimension gives DimensionLaw".into(),
    ));
    let mut extra = dc.clone();
    extra.faces.push((vec![0], vec![1]));
    checks.push((
        verify_duality(&extra, &d)
            .violations
            .iter()
            .any(|v| matches!(v, Violation::FaceList { declared: true, .. })),
        "extra face gives FaceList".into(),
    ));
    Ok(verdict(&checks))
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

fn c11(ctx: &Context) -> Check {
    let e = |x: crate::semiflat::SemiflatError| x.to_string();
    let (sol, _) = ctx.sol2d(2)?;
    let m = SemiflatMetric::from_neg_log_t(sol, 10.0).map_err(e)?;
    let x0 = sol.grid().domain().barycenter();
    let f = FlatLimitData::from_metric(&m, &x0, Complex64::new(0.3, -1.2)).map_err(e)?;
    let d = special_defect(&f, &AffineTorus::coordinate(x0)).map_err(e)?;
    let mut checks = vec![
        le("lagrangian defect", d.lagrangian, 1e-12),
        le("imaginary defect", d.imaginary, 1e-12),
    ];

    const M: usize = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let n = 1 + k % 3;
        let modulus = 10f64.powf(rng.random_range(-2.0..2.0));
        let arg = rng.random_range(-PI..PI);
        let zeta = Complex64::from_polar(modulus, arg);
        let h = DMatrix::<f64>::identity(n, n);
        let torus = AffineTorus::coordinate(vec![0.0; n]);
        let defects = ctx.exec.map_range(M, |j| {
            let phase = j as f64 * PI / M as f64;
            FlatLimitData::with_phase(h.clone(), zeta, phase)
                .and_then(|f| special_defect(&f, &torus))
                .map(|d| d.imaginary)
                .unwrap_or(f64::INFINITY)
        });
        let best = (0..M)
            .min_by(|&a, &b| defects[a].total_cmp(&defects[b]))
            .unwrap_or(0);
        let formula = special_phase(zeta, n).map_err(e)?;
        worst = worst.max(circular_gap(best as f64 * PI / M as f64, formula));
    }
    checks.push(le("brute-force phase gap", worst, PI / M as f64));
    Ok(verdict(&checks))
}

/// Named artifacts written by the `accept` pipeline, in a fixed order.
pub fn artifacts(exec: Exec) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (dim, res) in [(1, 256), (2, 32)] {
        let run = MaRun {
            dim,
            kappa: 1.0,
            resolution: res,
            tol: 1e-6,
            mode: SolveMode::Barrier,
        };
        let a = pipeline::solve_ma(&run, exec).map_err(|e| e.to_string())?;
        out.push((format!("solve_ma_{dim}d.csv"), a.csv));
        out.push((format!("solve_ma_{dim}d_summary.txt"), a.summary.clone()));
        if dim == 1 {
            let r = pipeline::collapse_report(&a.solution, &[5.0, 10.0, 20.0], 20, 0, exec)
                .map_err(|e| e.to_string())?;
            out.push(("collapse_report.json".into(), r.to_json()));
            for (stem, csv) in r.series() {
                out.push((format!("collapse_{stem}.csv"), csv));
            }
        }
    }
    let e = |x: crate::tropical::TropicalError| x.to_string();
    let region = Region::cube(2, 2.0).map_err(e)?;
    let sampling = AmoebaSampling::new(region.clone(), 100, 16).map_err(e)?;
    let (_, cloud) = pipeline::amoeba(&line(), (-10f64).exp(), &sampling, exec).map_err(e)?;
    out.push(("amoeba_line.csv".into(), cloud));
    let (_, csv, text) = pipeline::tropical(&line(), &region, 100).map_err(e)?;
    out.push(("tropical_line.csv".into(), csv));
    out.push(("tropical_line.txt".into(), text));
    let (text, _) = pipeline::dual_complex_text(FIXTURE_TWO_BY_TWO).map_err(|e| e.to_string())?;
    out.push(("dual_two_by_two.txt".into(), text));
    Ok(out)
}

fn c12(ctx: &Context) -> Check {
    let a = artifacts(ctx.exec)?;
    let b = artifacts(ctx.exec)?;
    let c = artifacts(Exec::Sequential)?;
    let same = |x: &[(String, String)], y: &[(String, String)]| x == y;
    let bytes: usize = a.iter().map(|(_, s)| s.len()).sum();
    Ok(verdict(&[
        (
            same(&a, &b),
            format!("{} artifacts, {bytes} bytes, repeat identical", a.len()),
        ),
        (same(&a, &c), "sequential identical".into()),
    ]))
}

/// Runs criterion `id` (1 to 12).
pub fn run_criterion(ctx: &Context, id: usize) -> CriterionResult {
    let start = Instant::now();
    let check = match id {
        1 => c1(ctx),
        2 => c2(ctx),
        3 => c3(ctx),
        4 => c4(ctx),
        5 => c5(ctx),
        6 => c6(ctx),
        7 => c7(ctx),
        8 => c8(ctx),
        9 => c9(ctx),
        10 => c10(ctx),
        11 => c11(ctx),
        12 => c12(ctx),
        _ => Err(format!("no criterion {id}")),
    };
    let (pass, detail) = check.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        name: CRITERIA
            .get(id.wrapping_sub(1))
            .copied()
            .unwrap_or("unknown"),
        pass,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn run_all(exec: Exec) -> Vec<CriterionResult> {
    let ctx = Context::new(exec);
    (1..=CRITERIA.len())
        .map(|id| run_criterion(&ctx, id))
        .collect()
}

/// One line per criterion.
pub fn format_line(r: &CriterionResult) -> String {
    format!(
        "[{}] {:>2} {}: {}",
        if r.pass { "PASS" } else { "FAIL" },
        r.id,
        r.name,
        r.detail
    )
}

/// The pass/fail table without timings.
pub fn report(results: &[CriterionResult]) -> String {
    let mut s: String = results.iter().map(|r| format_line(r) + "\n").collect();
    let passed = results.iter().filter(|r| r.pass).count();
    s += &format!("{passed}/{} criteria passed\n", results.len());
    s
}
