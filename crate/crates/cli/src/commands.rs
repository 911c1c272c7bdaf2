use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::json;
use slagkit::ambient::{survey_prop_a, survey_product, ORTHONORMAL_TOL};
use slagkit::curves::{
    gamma_c_curve, gamma_closedness, gamma_special_at, gamma_special_sample, integrate_alpha_with, integrate_at,
    integrate_gamma_with, symmetric_extent, CurveParams, CurveSample, IntegrationOptions,
};
use slagkit::legendrian::{
    geodesic_sphere, great_circle, hopf_fiber, legendrian_torus, max_residual_at, LegendrianMap,
};
use slagkit::matrix_orbits::{expected_curve_level, orbit_point, su_sample, OrbitKind, OrbitVariant};
use slagkit::numeric::linspace;
use slagkit::pde::{solve_dirichlet, BoundaryCatalog, PotentialGrid, SolverOptions, StepKind, Weights};
use slagkit::surfaces::{
    angle_condition, curvature_report, curve_product_surface, cylinder_total_curvature, product_surface,
    sigma_a_grid_residuals, SurfaceGrid,
};
use slagkit::Error;

use crate::args::*;
use crate::export::{export_csv, export_obj, parse_edges, potential_csv, write_atomic, CurveRow, ExportError};
use crate::report::{Check, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
    #[error(transparent)]
    Export(#[from] ExportError),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

type Outcome = Result<bool, CliError>;

fn usage(flag: &str, domain: &str, got: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("--{flag} must be {domain} (got {got})"))
}

fn positive(flag: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(usage(flag, "a positive finite number", v))
    }
}

fn positive_pair(flag: &str, v: [f64; 2]) -> Result<(), CliError> {
    if v.iter().all(|x| *x > 0.0 && x.is_finite()) {
        Ok(())
    } else {
        Err(usage(flag, "two positive finite numbers", format!("{},{}", v[0], v[1])))
    }
}

fn increasing(flag: &str, v: [f64; 2]) -> Result<(), CliError> {
    if v[0] < v[1] && v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(usage(flag, "an increasing pair `lo,hi`", format!("{},{}", v[0], v[1])))
    }
}

fn grid_at_least(flag: &str, g: (usize, usize), min: usize) -> Result<(), CliError> {
    if g.0 >= min && g.1 >= min {
        Ok(())
    } else {
        Err(usage(flag, &format!("at least {min}x{min}"), format!("{}x{}", g.0, g.1)))
    }
}

fn resolve(common: &Common, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        common.output_dir.join(path)
    }
}

fn write_report(common: &Common, path: &Path, report: &Report) -> Outcome {
    write_atomic(&resolve(common, path), &report.to_json())?;
    Ok(report.pass)
}

pub fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Curve(CurveCommand::Alpha(a)) => curve(a, false),
        Command::Curve(CurveCommand::Gamma(a)) => curve(a, true),
        Command::Curve(CurveCommand::GammaC(a)) => gamma_c(a),
        Command::Curve(CurveCommand::Period(a)) => period(a),
        Command::Surface(SurfaceCommand::Product(a)) => surface(a),
        Command::Ambient(AmbientCommand::Product(a)) => ambient_product(a),
        Command::Ambient(AmbientCommand::Cone(a)) => ambient_cone(a),
        Command::Orbit(a) => orbit(a),
        Command::Pde(PdeCommand::Solve(a)) => pde_solve(a),
        Command::Verify(VerifyCommand::Conservation(a)) => verify_conservation(a),
        Command::Verify(VerifyCommand::Angle(a)) => verify_angle(a),
        Command::Verify(VerifyCommand::Corollary2(a)) => verify_corollary2(a),
        Command::Verify(VerifyCommand::Curvature(a)) => verify_curvature(a),
        Command::Verify(VerifyCommand::Legendrian(a)) => verify_legendrian(a),
        Command::Verify(VerifyCommand::Pde(a)) => verify_pde(a),
    }
}

fn conservation_checks(report: &mut Report, prefix: &str, s: &CurveSample, drift_tol: f64) {
    report.check(Check::bound(format!("{prefix}.radial_drift"), drift_tol, s.max_abs_conserved()));
    report.check(Check::bound(format!("{prefix}.line_drift"), drift_tol, s.max_abs_line()));
    report.check(Check::bound(
        format!("{prefix}.conjugate_symmetry"),
        10.0 * s.tol.max(drift_tol / 100.0),
        s.conjugate_symmetry_defect(),
    ));
    report.value(&format!("{prefix}.truncated"), s.truncated);
    report.value(&format!("{prefix}.t_range"), [s.ts[0], s.ts[s.len() - 1]]);
}

fn curve(a: CurveArgs, gamma: bool) -> Outcome {
    positive("t-max", a.t_max)?;
    positive("tol", a.tol)?;
    positive("drift-tol", a.drift_tol)?;
    if a.samples == 0 {
        return Err(usage("samples", "at least 1", 0));
    }
    let sample = if a.special {
        if !gamma {
            return Err(CliError::Usage("--special applies to `curve gamma` only".into()));
        }
        if a.init.is_some() {
            return Err(CliError::Usage("--special fixes the initial point; drop --init".into()));
        }
        gamma_special_sample(a.p, a.q, a.t_max, a.samples)?
    } else {
        let init = a.init.ok_or_else(|| CliError::Usage("--init is required (or --special for gamma)".into()))?;
        positive_pair("init", init)?;
        let mut opts = IntegrationOptions::new(a.tol);
        opts.samples_per_side = a.samples;
        if gamma {
            integrate_gamma_with(CurveParams::gamma(a.p, a.q, init)?, a.t_max, opts)?
        } else {
            integrate_alpha_with(CurveParams::alpha(a.p, a.q, init)?, a.t_max, opts)?
        }
    };
    export_csv(&resolve(&a.common, &a.out), &CurveRow::from_sample(&sample))?;
    let mut r = Report::new(if gamma { "curve gamma" } else { "curve alpha" });
    r.param("p", a.p).param("q", a.q).param("init", a.init).param("special", a.special);
    r.param("t_max", a.t_max).param("tol", a.tol).param("samples", a.samples);
    conservation_checks(&mut r, "curve", &sample, a.drift_tol);
    match &a.report {
        Some(path) => write_report(&a.common, path, &r),
        None => Ok(r.pass),
    }
}

fn gamma_c(a: GammaCArgs) -> Outcome {
    if a.n == 0 {
        return Err(usage("n", "at least 1", 0));
    }
    if !(a.c >= 0.0 && a.c.is_finite()) {
        return Err(usage("c", "a nonnegative finite number", a.c));
    }
    increasing("s-range", a.s_range)?;
    if a.samples < 2 {
        return Err(usage("samples", "at least 2", a.samples));
    }
    let ss = linspace(a.s_range[0], a.s_range[1], a.samples);
    if a.c == 0.0 && ss.contains(&0.0) {
        return Err(CliError::Usage("--c 0 puts the cone vertex at s = 0; choose an --s-range or --samples that avoids it".into()));
    }
    let mut rows = Vec::with_capacity(ss.len());
    let mut pass = true;
    for s in ss {
        let z = gamma_c_curve(a.n, a.c, s)?;
        let w = z.powu(a.n);
        let target = Complex64::new(a.c, s);
        let residual = (w - target).norm();
        pass &= residual <= 1e-12 * target.norm().max(1.0);
        rows.push(CurveRow {
            t: s,
            point: [z, Complex64::new(0.0, 0.0)],
            residual_conserved: residual,
            residual_line: w.re - a.c,
        });
    }
    export_csv(&resolve(&a.common, &a.out), &rows)?;
    Ok(pass)
}

fn period(a: PeriodArgs) -> Outcome {
    positive_pair("init", a.init)?;
    positive("tol", a.tol)?;
    if a.max_denominator == 0 {
        return Err(usage("max-denominator", "at least 1", 0));
    }
    let mut r = Report::new("curve period");
    r.param("p", a.p).param("q", a.q).param("init", a.init);
    r.param("tol", a.tol).param("max_denominator", a.max_denominator);
    match gamma_closedness(a.p, a.q, a.init, a.tol, a.max_denominator) {
        Ok(rep) => {
            r.value("period", rep.period)
                .value("critical_radii", rep.critical_radii.values())
                .value("winding_integrals", rep.winding_integrals)
                .value("candidates", ratio_text(rep.candidates))
                .value("closed", ratio_text(rep.closed));
            if let Some(ev) = rep.period_events {
                r.value("period_events", ev);
                r.check(Check::bound("period.cross_check", 1e-6, (rep.period - ev).abs() / rep.period));
            }
        }
        Err(e @ (Error::InequalityViolated | Error::EqualityCase)) => {
            r.failed("period", a.tol, &e.to_string());
        }
        Err(e) => return Err(e.into()),
    }
    write_report(&a.common, &a.out, &r)
}

fn ratio_text<T: std::fmt::Display>(v: Option<[T; 2]>) -> Option<[String; 2]> {
    v.map(|[x, y]| [x.to_string(), y.to_string()])
}

fn special_product(p: u32, q: u32, a: [f64; 2], t_max: f64, ss: &[f64], nt: usize, tol: f64) -> Result<SurfaceGrid, CliError> {
    let alpha = CurveParams::alpha(p, q, a)?;
    let opts = IntegrationOptions::new(tol);
    let (extent, _) = symmetric_extent(alpha, t_max, opts)?;
    let alpha_sample = integrate_at(alpha, &linspace(-extent, extent, nt), opts)?;
    if alpha_sample.len() != nt {
        return Err(CliError::Runtime("alpha curve escaped inside its computed extent".into()));
    }
    Ok(product_surface(&alpha_sample, &gamma_special_at(p, q, ss)?)?)
}

fn surface(a: SurfaceArgs) -> Outcome {
    positive_pair("a", a.a)?;
    positive("t-max", a.t_max)?;
    positive("tol", a.tol)?;
    increasing("s-range", a.s_range)?;
    grid_at_least("grid", a.grid, 2)?;
    let s = match (a.special, a.b) {
        (true, None) => special_product(a.p, a.q, a.a, a.t_max, &linspace(a.s_range[0], a.s_range[1], a.grid.1), a.grid.0, a.tol)?,
        (false, Some(b)) => {
            positive_pair("b", b)?;
            curve_product_surface(a.p, a.q, a.a, b, a.t_max, (a.s_range[0], a.s_range[1]), a.grid, a.tol)?
        }
        (true, Some(_)) => return Err(CliError::Usage("--special and --b are mutually exclusive".into())),
        (false, None) => return Err(CliError::Usage("--b is required unless --special is given".into())),
    };
    export_obj(&resolve(&a.common, &a.out), &s, a.projection)?;
    let mut r = Report::new("surface product");
    r.param("p", a.p).param("q", a.q).param("a", a.a).param("b", a.b).param("special", a.special);
    r.param("t_max", a.t_max).param("s_range", a.s_range).param("grid", [a.grid.0, a.grid.1]).param("tol", a.tol);
    let angles = angle_condition(&s)?;
    r.check(Check::bound("angle.condition_spread", 1e-6, angles.condition_spread()));
    r.check(Check::bound("angle.symplectic", 1e-8, angles.max_abs_symplectic));
    r.value("angle.condition_mean", angles.condition_stats.mean);
    r.value("t_range", [s.ts[0], s.ts[s.nt() - 1]]);
    if a.special {
        let (r1, r2) = sigma_a_grid_residuals(&s, a.a);
        r.check(Check::bound("membership.radial", 1e-8, r1));
        r.check(Check::bound("membership.line", 1e-8, r2));
    }
    match &a.report {
        Some(path) => write_report(&a.common, path, &r),
        None => Ok(r.pass),
    }
}

fn factor(kind: Factor, dim: u32, flag: &str) -> Result<LegendrianMap, CliError> {
    let fail = |need: &str| usage(flag, need, format!("{kind:?} for dimension {dim}").to_lowercase());
    match kind {
        Factor::Point if dim == 0 => Ok(geodesic_sphere(0)),
        Factor::Sphere if dim <= 13 => Ok(geodesic_sphere(dim as usize)),
        Factor::Circle if dim == 1 => Ok(great_circle()),
        Factor::Hopf if dim == 1 => Ok(hopf_fiber()),
        Factor::Torus if (1..=13).contains(&dim) => Ok(legendrian_torus(dim as usize + 1)?),
        Factor::Point => Err(fail("`point` only for a zero exponent")),
        Factor::Circle | Factor::Hopf => Err(fail("`circle`/`hopf` only for exponent 1")),
        Factor::Sphere | Factor::Torus => Err(fail("a factor whose dimension matches the exponent (torus needs 1..=13, sphere 0..=13)")),
    }
}

fn ambient_product(a: AmbientProductArgs) -> Outcome {
    positive_pair("a", a.a)?;
    positive_pair("b", a.b)?;
    positive("phase-tol", a.phase_tol)?;
    positive("identity-tol", a.identity_tol)?;
    if a.p + a.q > 14 {
        return Err(usage("p/q", "exponents with p + q <= 14", a.p + a.q));
    }
    if a.samples == 0 {
        return Err(usage("samples", "at least 1", 0));
    }
    let (psi, phi) = (factor(a.psi, a.p, "psi")?, factor(a.phi, a.q, "phi")?);
    let s = curve_product_surface(a.p, a.q, a.a, a.b, 1.0, (-3.0, 3.0), (9, 9), 1e-10)?;
    let mut r = Report::new("ambient product");
    r.param("p", a.p).param("q", a.q).param("a", a.a).param("b", a.b);
    r.param("psi", psi.name.clone()).param("phi", phi.name.clone()).param("samples", a.samples);
    match survey_product(&s, &psi, &phi, a.samples) {
        Ok(survey) => {
            r.check(Check::bound("phase.std_dev", a.phase_tol, survey.stats.std_dev));
            r.check(Check::bound("phase.identity", a.identity_tol, survey.max_identity_residual));
            r.check(Check::bound("frame.orthonormality", ORTHONORMAL_TOL, survey.max_orthonormality_defect));
            r.value("phase.mean", survey.stats.mean);
        }
        Err(e @ Error::NotLegendrian { .. }) => {
            r.failed("factors.legendrian", slagkit::ambient::LEGENDRIAN_TOL, &e.to_string());
        }
        Err(e) => return Err(e.into()),
    }
    write_report(&a.common, &a.out, &r)
}

fn ambient_cone(a: AmbientConeArgs) -> Outcome {
    if !(2..=14).contains(&a.n) {
        return Err(usage("n", "an integer in 2..=14", a.n));
    }
    if !(a.c >= 0.0 && a.c.is_finite()) {
        return Err(usage("c", "a nonnegative finite number", a.c));
    }
    increasing("s-range", a.s_range)?;
    positive("phase-tol", a.phase_tol)?;
    if a.c == 0.0 && a.s_range[0] <= 0.0 && a.s_range[1] >= 0.0 {
        return Err(CliError::Usage("--c 0 needs an --s-range that excludes the vertex s = 0".into()));
    }
    let psi = factor(a.psi, a.n - 1, "psi")?;
    let mut r = Report::new("ambient cone");
    r.param("n", a.n).param("c", a.c).param("psi", psi.name.clone());
    r.param("s_range", a.s_range).param("samples", a.samples);
    match survey_prop_a(a.n, a.c, &psi, (a.s_range[0], a.s_range[1]), a.samples) {
        Ok(survey) => {
            r.check(Check::bound("phase.max_deviation", a.phase_tol, survey.stats.max_deviation));
            r.check(Check::bound("frame.orthonormality", ORTHONORMAL_TOL, survey.max_orthonormality_defect));
            r.value("phase.mean", survey.stats.mean);
        }
        Err(e @ Error::NotLegendrian { .. }) => {
            r.failed("factors.legendrian", slagkit::ambient::LEGENDRIAN_TOL, &e.to_string());
        }
        Err(e) => return Err(e.into()),
    }
    write_report(&a.common, &a.out, &r)
}

fn orbit(a: OrbitArgs) -> Outcome {
    let variant = match a.variant {
        Variant::Gl => OrbitVariant::GL,
        Variant::Sym => OrbitVariant::Sym,
        Variant::Skew => OrbitVariant::Skew,
    };
    if a.n > 6 {
        return Err(usage("n", "at most 6", a.n));
    }
    let kind = OrbitKind::new(variant, a.n)?;
    positive("c", a.c)?;
    positive("tol", a.tol)?;
    increasing("s-range", a.s_range)?;
    if a.draws == 0 {
        return Err(usage("draws", "at least 1", 0));
    }
    let expected = expected_curve_level(kind, a.c);
    let (mut unitary, mut curve_err, mut level_err) = (0.0f64, 0.0f64, 0.0f64);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (k, s) in linspace(a.s_range[0], a.s_range[1], a.draws).into_iter().enumerate() {
        let pt = orbit_point(kind, a.c, s, &su_sample(kind.matrix_size(), a.seed.wrapping_add(k as u64)))?;
        unitary = unitary.max(pt.residual_unitary);
        curve_err = curve_err.max((pt.curve_level - expected).abs());
        level_err = level_err.max((pt.level - expected).abs());
        lo = lo.min(pt.level);
        hi = hi.max(pt.level);
    }
    let scale = expected.abs().max(1.0);
    let mut r = Report::new("orbit");
    r.param("variant", format!("{:?}", a.variant).to_lowercase()).param("n", a.n).param("c", a.c);
    r.param("s_range", a.s_range).param("draws", a.draws).param("seed", a.seed).param("tol", a.tol);
    r.value("expected_curve_level", expected).value("level_range", [lo, hi]);
    r.check(Check::bound("orbit.residual_unitary", a.tol, unitary));
    r.check(Check::bound("orbit.curve_level", a.tol * scale, curve_err));
    if variant == OrbitVariant::GL {
        r.check(Check::bound("orbit.level", a.tol * scale, level_err));
    }
    write_report(&a.common, &a.out, &r)
}

fn pde_solve(a: PdeArgs) -> Outcome {
    if !(a.a1 > 0.0 && a.a1.is_finite()) {
        return Err(usage("a1", "strictly positive (the equation is not elliptic at zero regularization)", a.a1));
    }
    if !(a.a2 > 0.0 && a.a2.is_finite()) {
        return Err(usage("a2", "strictly positive (the equation is not elliptic at zero regularization)", a.a2));
    }
    positive("tol", a.tol)?;
    if a.max_iter == 0 {
        return Err(usage("max-iter", "at least 1", 0));
    }
    let [x0, x1, y0, y1] = a.domain;
    if !(x0 < x1 && y0 < y1) {
        return Err(usage("domain", "`x0,x1,y0,y1` with x0 < x1 and y0 < y1", format!("{x0},{x1},{y0},{y1}")));
    }
    let w = Weights::new(a.p, a.q, a.a1, a.a2)?;
    let boundary = match (&a.boundary, &a.boundary_file) {
        (Some(name), None) => {
            grid_at_least("grid", a.grid, 3)?;
            let cat = BoundaryCatalog::parse(name).ok_or_else(|| {
                let names: Vec<&str> = BoundaryCatalog::ALL.iter().map(|b| b.name()).collect();
                usage("boundary", &format!("one of {}", names.join(", ")), name)
            })?;
            PotentialGrid::from_fn(w, a.domain, a.grid, |x, y| cat.eval(x, y))?
        }
        (None, Some(path)) => {
            let e = parse_edges(path)?;
            PotentialGrid::from_edges(w, a.domain, [&e[0], &e[1], &e[2], &e[3]])?
        }
        _ => return Err(CliError::Usage("exactly one of --boundary or --boundary-file is required".into())),
    };
    let mut r = Report::new("pde solve");
    r.param("p", a.p).param("q", a.q).param("a1", a.a1).param("a2", a.a2);
    r.param("boundary", a.boundary.clone()).param("boundary_file", a.boundary_file.clone());
    r.param("domain", a.domain).param("grid", [boundary.nx, boundary.ny]);
    r.param("tol", a.tol).param("max_iter", a.max_iter);
    match solve_dirichlet(&boundary, SolverOptions::new(a.tol, a.max_iter)) {
        Ok(sol) => {
            write_atomic(&resolve(&a.common, &a.out), &potential_csv(&sol.grid)?)?;
            let increase = sol
                .log
                .windows(2)
                .map(|w| w[1].residual_l2 - w[0].residual_l2)
                .fold(0.0f64, f64::max);
            r.check(Check::bound("solve.residual", a.tol, sol.grid.max_residual()));
            r.check(Check::bound("solve.monotone", 0.0, increase));
            let log: Vec<_> = sol
                .log
                .iter()
                .map(|it| {
                    let step = match it.step {
                        StepKind::Initial => json!({ "kind": "initial" }),
                        StepKind::Newton { damping } => json!({ "kind": "newton", "damping": damping }),
                        StepKind::GaussSeidel { sweeps } => json!({ "kind": "gauss-seidel", "sweeps": sweeps }),
                    };
                    json!({ "iteration": it.iteration, "step": step, "residual_l2": it.residual_l2, "residual_max": it.residual_max })
                })
                .collect();
            r.value("log", log);
        }
        Err(e @ Error::NonConvergence { .. }) => {
            r.failed("solve.residual", a.tol, &e.to_string());
        }
        Err(e) => return Err(e.into()),
    }
    match &a.report {
        Some(path) => write_report(&a.common, path, &r),
        None => Ok(r.pass),
    }
}

fn verify_conservation(a: VerifyConservationArgs) -> Outcome {
    positive_pair("init", a.init)?;
    positive("t-max", a.t_max)?;
    positive("integrator-tol", a.integrator_tol)?;
    positive("tol", a.tol)?;
    let opts = IntegrationOptions::new(a.integrator_tol);
    let alpha = integrate_alpha_with(CurveParams::alpha(a.p, a.q, a.init)?, a.t_max, opts)?;
    let gamma = integrate_gamma_with(CurveParams::gamma(a.p, a.q, a.init)?, a.t_max, opts)?;
    let mut r = Report::new("verify conservation");
    r.param("p", a.p).param("q", a.q).param("init", a.init).param("t_max", a.t_max);
    r.param("integrator_tol", a.integrator_tol).param("tol", a.tol);
    conservation_checks(&mut r, "alpha", &alpha, a.tol);
    conservation_checks(&mut r, "gamma", &gamma, a.tol);
    write_report(&a.common, &a.out, &r)
}

fn verify_angle(a: VerifyAngleArgs) -> Outcome {
    positive_pair("a", a.a)?;
    positive_pair("b", a.b)?;
    positive("tol", a.tol)?;
    positive("symplectic-tol", a.symplectic_tol)?;
    grid_at_least("grid", a.grid, 2)?;
    let s = curve_product_surface(a.p, a.q, a.a, a.b, 1.0, (-3.0, 3.0), a.grid, 1e-10)?;
    let angles = angle_condition(&s)?;
    let mut r = Report::new("verify angle");
    r.param("p", a.p).param("q", a.q).param("a", a.a).param("b", a.b).param("grid", [a.grid.0, a.grid.1]);
    r.param("tol", a.tol).param("symplectic_tol", a.symplectic_tol);
    r.check(Check::bound("angle.condition", a.tol, angles.max_abs_condition));
    r.check(Check::bound("angle.symplectic", a.symplectic_tol, angles.max_abs_symplectic));
    write_report(&a.common, &a.out, &r)
}

fn verify_corollary2(a: VerifyCorollary2Args) -> Outcome {
    positive_pair("a", a.a)?;
    positive("t-max", a.t_max)?;
    positive("tol", a.tol)?;
    grid_at_least("grid", a.grid, 2)?;
    let s = special_product(a.p, a.q, a.a, a.t_max, &linspace(0.0, 2.0 * PI, a.grid.1), a.grid.0, 1e-10)?;
    let (r1, r2) = sigma_a_grid_residuals(&s, a.a);
    let mut r = Report::new("verify corollary2");
    r.param("p", a.p).param("q", a.q).param("a", a.a).param("grid", [a.grid.0, a.grid.1]);
    r.param("t_max", a.t_max).param("tol", a.tol);
    r.value("t_range", [s.ts[0], s.ts[s.nt() - 1]]);
    r.check(Check::bound("membership.radial", a.tol, r1));
    r.check(Check::bound("membership.line", a.tol, r2));
    write_report(&a.common, &a.out, &r)
}

fn verify_curvature(a: VerifyCurvatureArgs) -> Outcome {
    positive("t-max", a.t_max)?;
    positive("tol", a.tol)?;
    let (nt, ns) = a.grid;
    if nt < 9 || ns < 9 || (nt - 1) % 4 != 0 || (ns - 1) % 4 != 0 {
        return Err(usage("grid", "NxM with N-1 and M-1 positive multiples of 4 (at least 9x9)", format!("{nt}x{ns}")));
    }
    let alpha = CurveParams::alpha(0, 0, [1.0, 1.0])?;
    let mut opts = IntegrationOptions::new(1e-12);
    opts.escape_radius = 1e4;
    let (extent, _) = symmetric_extent(alpha, a.t_max, opts)?;
    if extent < a.t_max {
        return Err(usage("t-max", &format!("at most {extent:.3} (escape bound of the alpha factor)"), a.t_max));
    }
    let alpha_sample = integrate_at(alpha, &linspace(-a.t_max, a.t_max, nt), opts)?;
    let s = product_surface(&alpha_sample, &gamma_special_at(0, 0, &linspace(0.0, 2.0 * PI, ns))?)?;
    let rep = curvature_report(&s)?;
    let target = -4.0 * PI;
    let mut r = Report::new("verify curvature");
    r.param("t_max", a.t_max).param("grid", [nt, ns]).param("tol", a.tol);
    r.value("full", rep.full).value("half", rep.half).value("quarter", rep.quarter);
    r.value("ratio", rep.ratio).value("extrapolated", rep.extrapolated);
    r.value("closed_form", cylinder_total_curvature(a.t_max));
    r.check(Check::bound("curvature.relative_to_minus_4pi", a.tol, (rep.full - target).abs() / target.abs()));
    r.check(Check::bound("curvature.richardson_ratio", 0.5, (rep.ratio - 4.0).abs()));
    write_report(&a.common, &a.out, &r)
}

fn verify_legendrian(a: VerifyLegendrianArgs) -> Outcome {
    positive("tol", a.tol)?;
    let map = factor(a.map, a.dim, "map")?;
    let (mut contact, mut unit) = (0.0f64, 0.0f64);
    for k in 0..a.samples {
        let x = map.sample_params(k);
        contact = contact.max(max_residual_at(&map, &x));
        unit = unit.max(map.unit_defect(&x).abs());
    }
    let mut r = Report::new("verify legendrian");
    r.param("map", map.name.clone()).param("dim", a.dim).param("samples", a.samples).param("tol", a.tol);
    r.check(Check::bound("legendrian.contact", a.tol, contact));
    r.check(Check::bound("legendrian.unit_norm", a.tol, unit));
    write_report(&a.common, &a.out, &r)
}

fn verify_pde(a: VerifyPdeArgs) -> Outcome {
    let cat = BoundaryCatalog::parse(&a.boundary).ok_or_else(|| {
        let names: Vec<&str> = BoundaryCatalog::ALL.iter().map(|b| b.name()).collect();
        usage("boundary", &format!("one of {}", names.join(", ")), &a.boundary)
    })?;
    if a.sizes.len() < 3 || a.sizes.windows(2).any(|w| w[1] != 2 * w[0] - 1) || a.sizes[0] < 5 {
        return Err(usage("sizes", "at least three grid sizes, each 2n-1 of the previous, starting at 5 or more", format!("{:?}", a.sizes)));
    }
    if a.sizes[a.sizes.len() - 1] > 257 {
        return Err(usage("sizes", "at most 257", a.sizes[a.sizes.len() - 1]));
    }
    increasing("band", a.band)?;
    let w = Weights::new(0, 0, 1e-6, 1e-6)?;
    let mut errors = Vec::new();
    let mut increase = 0.0f64;
    for &n in &a.sizes {
        let b = PotentialGrid::from_fn(w, [0.0, 1.0, 0.0, 1.0], (n, n), |x, y| cat.eval(x, y))?;
        let sol = solve_dirichlet(&b, SolverOptions::new(1e-10, 30))?;
        increase = sol.log.windows(2).map(|w| w[1].residual_l2 - w[0].residual_l2).fold(increase, f64::max);
        errors.push(sol.grid.max_deviation(|x, y| cat.eval(x, y)));
    }
    let ratios: Vec<f64> = errors.windows(2).map(|e| e[0] / e[1]).collect();
    let (mid, half) = (0.5 * (a.band[0] + a.band[1]), 0.5 * (a.band[1] - a.band[0]));
    let mut r = Report::new("verify pde");
    r.param("boundary", cat.name()).param("sizes", &a.sizes).param("band", a.band);
    r.value("errors", &errors).value("ratios", &ratios);
    let worst = ratios.iter().map(|q| (q - mid).abs()).fold(0.0f64, f64::max);
    r.check(Check::bound("pde.convergence_factor", half, if ratios.iter().all(|q| q.is_finite()) { worst } else { f64::NAN }));
    r.check(Check::bound("pde.monotone", 0.0, increase));
    write_report(&a.common, &a.out, &r)
}
