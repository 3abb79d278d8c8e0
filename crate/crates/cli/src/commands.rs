use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use covpom::abelian::torus::{canonical_family, equal_arcs, phase_difference_pom, phase_pom};
use covpom::abelian::{build_covariant_pom, coset_action, sharp_phase_witness, verify_covariance, IsometryFamily};
use covpom::phasespace::{
    finite_weyl_pom, ground_state, margins_of_gt, phase_space_density, phase_space_effect, verify_weyl_covariance,
    CellGrid, EffectOptions, PhaseSpaceCell,
};
use covpom::posmom::coexistence::{RESOLUTION_PRODUCT_TOL, UNCERTAINTY_TOL};
use covpom::posmom::{
    distribution, regular_decomposition, resolution_limit, resolution_product, sharpness_test, uncertainty_product,
    Kind, ProbMeasure1D, SmearedObservable,
};
use covpom::{check_pom_axioms, make_state, CVector, Grid1D, Pom, PomReport, State, C64, EXACT_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::input::{read_grid_state, read_json, write_json, AbelianSpec, InputError};
use crate::report::{Check, Report};

pub type Outcome = Result<Report, InputError>;

/// Settings shared by every subcommand.
pub struct Context {
    pub grid_n: usize,
    pub window: f64,
    pub tol: Option<f64>,
    pub quad_order: usize,
    pub seed: u64,
}

impl Context {
    pub fn grid(&self) -> Result<Grid1D, InputError> {
        if !(self.window > 0.0) {
            return Err(InputError(format!("--window must be positive, got {}", self.window)));
        }
        Ok(Grid1D::symmetric(self.grid_n, self.window)?)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn report(&self, command: &str, tol: f64, checks: Vec<Check>) -> Report {
        Report::new(command, tol, self.seed, checks)
    }
}

fn axiom_checks(r: &PomReport) -> Vec<Check> {
    vec![
        Check::at_most("positivity", r.worst_negativity, r.tol, json!({ "worst_effect": r.worst_effect })),
        Check::at_most("normalization_defect", r.normalization_defect, r.tol, Value::Null),
    ]
}

fn hermitian_check(pom: &Pom, tol: f64) -> Check {
    let (worst, defect) = pom
        .effects()
        .iter()
        .map(|e| e.op().hermitian_defect())
        .enumerate()
        .fold((0, 0.0), |best, (i, d)| if d > best.1 { (i, d) } else { best });
    Check::at_most("hermiticity", defect, tol, json!({ "worst_effect": worst }))
}

fn emit(path: &Option<PathBuf>, pom: &Pom) -> Result<(), InputError> {
    match path {
        Some(p) => write_json(p, pom),
        None => Ok(()),
    }
}

fn arc_edges(arcs: Option<usize>, edges: Option<Vec<f64>>) -> Result<Vec<f64>, InputError> {
    match (arcs, edges) {
        (_, Some(e)) => Ok(e),
        (Some(m), None) if m >= 1 => Ok(equal_arcs(m)),
        _ => Err(InputError("give --arcs m (m ≥ 1) or --edges 0,...,6.283185307179586".into())),
    }
}

fn sharpness_check(pom: &Pom) -> Check {
    match sharp_phase_witness(pom) {
        Ok((cell, defect)) => Check::at_least("projection_defect", defect, 0.05, json!({ "cell": cell })),
        Err(e) => Check::info("projection_defect", 0.0, json!({ "skipped": e.to_string() })),
    }
}

pub fn phase(ctx: &Context, d: usize, arcs: Option<usize>, edges: Option<Vec<f64>>, out: &Option<PathBuf>) -> Outcome {
    if d == 0 {
        return Err(InputError("--d must be positive".into()));
    }
    let pom = phase_pom(&canonical_family(d), &arc_edges(arcs, edges)?)?;
    emit(out, &pom)?;
    let tol = ctx.tol_or(EXACT_TOL);
    let mut checks = axiom_checks(&check_pom_axioms(&pom, tol)?);
    checks.push(sharpness_check(&pom));
    Ok(ctx.report("phase", tol, checks))
}

pub fn phase_diff(ctx: &Context, d: usize, arcs: Option<usize>, edges: Option<Vec<f64>>, out: &Option<PathBuf>) -> Outcome {
    if d == 0 {
        return Err(InputError("--d must be positive".into()));
    }
    let pom = phase_difference_pom(d, &canonical_family(d * d), &arc_edges(arcs, edges)?)?;
    emit(out, &pom)?;
    let tol = ctx.tol_or(EXACT_TOL);
    Ok(ctx.report("phase-diff", tol, axiom_checks(&check_pom_axioms(&pom, tol)?)))
}

pub fn abelian_pom(ctx: &Context, spec: &Path, aux_dim: usize, out: &Option<PathBuf>) -> Outcome {
    let spec: AbelianSpec = read_json(spec)?;
    let (rep, h) = spec.resolve()?;
    let w = match spec.isometries {
        Some(w) => {
            w.validate(&rep)?;
            w
        }
        None => IsometryFamily::random(&rep, aux_dim, &mut ctx.rng())?,
    };
    let pom = build_covariant_pom(&rep, &h, &w)?;
    emit(out, &pom)?;
    let tol = ctx.tol_or(EXACT_TOL);
    let mut checks = axiom_checks(&check_pom_axioms(&pom, tol)?);
    let g = rep.group();
    let cosets = h.cosets();
    let cov = verify_covariance(&pom, g.elements(), |a| rep.unitary(a), coset_action(g, &cosets), tol)?;
    checks.push(Check::at_most(
        "covariance",
        cov.max_defect,
        tol,
        json!({ "element": cov.worst_element, "cell": cov.worst_cell }),
    ));
    Ok(ctx.report("abelian-pom", tol, checks))
}

fn random_density_matrix(rng: &mut ChaCha8Rng, d: usize) -> Result<State, InputError> {
    let terms = (0..d)
        .map(|_| {
            let v = CVector::from_fn(d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            (rng.random_range(0.0..1.0), v)
        })
        .collect();
    Ok(make_state(terms)?)
}

pub fn finite_weyl(ctx: &Context, d: usize, state: &Option<PathBuf>, out: &Option<PathBuf>) -> Outcome {
    let t = match state {
        Some(p) => read_json::<State>(p)?,
        None => random_density_matrix(&mut ctx.rng(), d)?,
    };
    let pom = finite_weyl_pom(d, &t)?;
    emit(out, &pom)?;
    let tol = ctx.tol_or(1e-13);
    let mut checks = axiom_checks(&check_pom_axioms(&pom, tol)?);
    let cov = verify_weyl_covariance(&pom, d, tol)?;
    checks.push(Check::at_most(
        "covariance",
        cov.max_defect,
        tol,
        json!({ "element": cov.worst_element, "cell": cov.worst_cell }),
    ));
    Ok(ctx.report("finite-weyl", tol, checks))
}

fn create(path: &Path) -> Result<BufWriter<File>, InputError> {
    File::create(path).map(BufWriter::new).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn measure_mass_check(rho: &ProbMeasure1D, tol: f64) -> Check {
    Check::at_most("mass_defect", (rho.total_mass() - 1.0).abs(), tol, Value::Null)
}

pub fn smeared_gamma(ctx: &Context, measure: &Path, profile_csv: &Option<PathBuf>) -> Outcome {
    let rho: ProbMeasure1D = read_json(measure)?;
    let r = resolution_limit(&rho);
    if let Some(p) = profile_csv {
        let mut w = create(p)?;
        r.write_csv(&mut w)?;
        w.flush()?;
    }
    let tol = ctx.tol_or(EXACT_TOL);
    let decomposition = regular_decomposition(&rho, tol);
    let checks = vec![
        measure_mass_check(&rho, tol),
        Check::info("gamma", r.gamma, json!({ "bisection_tol": r.tol })),
        Check::flag(
            "regular_decomposition_matches_gamma",
            decomposition.is_some() == (r.gamma == 0.0),
            json!({ "x_bar": decomposition.map(|d| d.x_bar) }),
        ),
    ];
    Ok(ctx.report("smeared gamma", tol, checks))
}

pub fn smeared_sharpness(ctx: &Context, measure: &Path) -> Outcome {
    let rho: ProbMeasure1D = read_json(measure)?;
    let r = sharpness_test(&rho);
    let tol = ctx.tol_or(EXACT_TOL);
    let checks = vec![
        measure_mass_check(&rho, tol),
        Check::flag(
            "sharpness_routes_agree",
            r.consistent,
            json!({ "point_mass": r.point_mass, "full_norm": r.full_norm, "projections": r.projections, "sharp_at": r.sharp_at }),
        ),
    ];
    Ok(ctx.report("smeared sharpness", tol, checks))
}

pub fn smeared_distribution(
    ctx: &Context,
    measure: &Path,
    state: &Path,
    kind: Kind,
    edges: &[f64],
    csv: &Option<PathBuf>,
) -> Outcome {
    let rho: ProbMeasure1D = read_json(measure)?;
    let s = read_grid_state(state, ctx.grid()?, &mut ctx.rng())?;
    if edges.len() < 2 {
        return Err(InputError("--edges needs at least two values".into()));
    }
    let cells: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
    let obs = match kind {
        Kind::Position => SmearedObservable::position(rho, s.grid()),
        Kind::Momentum => SmearedObservable::momentum(rho, s.grid()),
    };
    let mut raw = vec![0.0; cells.len()];
    for (w, psi) in s.terms() {
        let p = distribution(psi, &obs, &cells)?;
        for (acc, v) in raw.iter_mut().zip(&p.raw) {
            *acc += w * v;
        }
    }
    if let Some(path) = csv {
        let mut out = create(path)?;
        writeln!(out, "lo,hi,probability")?;
        for ((a, b), p) in cells.iter().zip(&raw) {
            writeln!(out, "{a},{b},{p}")?;
        }
        out.flush()?;
    }
    let tol = ctx.tol_or(1e-9);
    let lowest = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let total: f64 = raw.iter().sum();
    let checks = vec![
        Check::at_least("nonnegative", lowest, -tol, json!({ "cell": raw.iter().position(|&v| v == lowest) })),
        Check::at_most("total", total, 1.0 + tol, json!({ "cells": cells.len() })),
    ];
    Ok(ctx.report("smeared distribution", tol, checks))
}

pub fn phasespace_state(ctx: &Context, state: &Path, out: &Option<PathBuf>) -> Outcome {
    let s = read_grid_state(state, ctx.grid()?, &mut ctx.rng())?;
    if let Some(p) = out {
        write_json(p, &s)?;
    }
    let tol = ctx.tol_or(1e-9);
    let checks = vec![
        Check::at_most("trace_defect", s.trace_defect(), tol, Value::Null),
        Check::info("rank", s.terms().len() as f64, Value::Null),
    ];
    Ok(ctx.report("phasespace state", tol, checks))
}

pub fn phasespace_margins(ctx: &Context, state: &Path, rho_out: &Option<PathBuf>, nu_out: &Option<PathBuf>) -> Outcome {
    let t = read_grid_state(state, ctx.grid()?, &mut ctx.rng())?;
    let (rho, nu) = margins_of_gt(&t)?;
    for (path, m) in [(rho_out, &rho), (nu_out, &nu)] {
        if let Some(p) = path {
            write_json(p, m)?;
        }
    }
    let tol = ctx.tol_or(1e-9);
    let checks = vec![
        Check::at_most("rho_mass_defect", (rho.total_mass() - 1.0).abs(), tol, Value::Null),
        Check::at_most("nu_mass_defect", (nu.total_mass() - 1.0).abs(), tol, Value::Null),
        Check::info("var_rho", rho.variance(), Value::Null),
        Check::info("var_nu", nu.variance(), Value::Null),
    ];
    Ok(ctx.report("phasespace margins", tol, checks))
}

pub fn phasespace_density(
    ctx: &Context,
    state: &Path,
    probe: &Option<PathBuf>,
    stride: usize,
    csv: &Option<PathBuf>,
) -> Outcome {
    let grid = ctx.grid()?;
    let mut rng = ctx.rng();
    let t = read_grid_state(state, grid, &mut rng)?;
    let s = match probe {
        Some(p) => read_grid_state(p, grid, &mut rng)?,
        None => ground_state(t.grid()),
    };
    let h = phase_space_density(&t, &s, &CellGrid::full(stride))?;
    if let Some(path) = csv {
        let mut out = create(path)?;
        h.write_csv(&mut out)?;
        out.flush()?;
    }
    let tol = ctx.tol_or(1e-9);
    let checks = vec![
        Check::at_least("min_value", h.min_value, -tol, Value::Null),
        Check::at_most("leakage", h.leakage, covpom::phasespace::density::LEAKAGE_LIMIT, json!({ "integral": h.integral })),
    ];
    Ok(ctx.report("phasespace density", tol, checks))
}

pub fn phasespace_effect(ctx: &Context, state: &Path, q: (f64, f64), p: (f64, f64), basis: usize) -> Outcome {
    let t = read_grid_state(state, ctx.grid()?, &mut ctx.rng())?;
    let cell = PhaseSpaceCell::new(q, p)?;
    let opts = EffectOptions { order: ctx.quad_order, basis_size: basis, ..EffectOptions::default() };
    let e = phase_space_effect(&t, &cell, &opts)?;
    let tol = ctx.tol_or(1e-9);
    let (lo, hi) = (e.op().min_eigenvalue(), e.op().max_eigenvalue());
    let checks = vec![
        Check::at_least("min_eigenvalue", lo, -tol, json!({ "basis_size": basis })),
        Check::at_most("norm", hi, 1.0 + tol, json!({ "cell": [[q.0, q.1], [p.0, p.1]] })),
    ];
    Ok(ctx.report("phasespace effect", tol, checks))
}

pub fn check_pom(ctx: &Context, input: &Path) -> Outcome {
    let pom: Pom = read_json(input)?;
    let tol = ctx.tol_or(EXACT_TOL);
    let mut checks = vec![hermitian_check(&pom, tol)];
    checks.extend(axiom_checks(&check_pom_axioms(&pom, tol)?));
    Ok(ctx.report("check pom", tol, checks))
}

pub fn check_uncertainty(ctx: &Context, state: &Path, pairs_from: &Path) -> Outcome {
    let grid = ctx.grid()?;
    let mut rng = ctx.rng();
    let s = read_grid_state(state, grid, &mut rng)?;
    let t = read_grid_state(pairs_from, grid, &mut rng)?;
    let (rho, nu) = margins_of_gt(&t)?;
    let r = uncertainty_product(&s, &rho, &nu)?;
    let tol = ctx.tol_or(UNCERTAINTY_TOL);
    let checks = vec![
        Check::at_least(
            "uncertainty_product",
            r.value,
            1.0 - tol,
            json!({ "var_e": r.var_e, "var_f": r.var_f, "var_position": r.var_position, "var_momentum": r.var_momentum }),
        ),
        Check::at_least("smearing_product", r.var_rho * r.var_nu, 0.25 - tol, json!({ "var_rho": r.var_rho, "var_nu": r.var_nu })),
        Check::at_most("route_gap", r.route_gap, 1e-8, Value::Null),
    ];
    Ok(ctx.report("check uncertainty", tol, checks))
}

pub fn check_resolution(ctx: &Context, pairs_from: &Path) -> Outcome {
    let t = read_grid_state(pairs_from, ctx.grid()?, &mut ctx.rng())?;
    let (rho, nu) = margins_of_gt(&t)?;
    let r = resolution_product(&rho, &nu);
    let tol = ctx.tol_or(RESOLUTION_PRODUCT_TOL);
    let checks = vec![Check::at_least(
        "resolution_product",
        r.product,
        r.bound - tol,
        json!({ "gamma_rho": r.gamma_rho, "gamma_nu": r.gamma_nu }),
    )];
    Ok(ctx.report("check resolution", tol, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context { grid_n: 512, window: 20.0, tol: None, quad_order: 16, seed: 3 }
    }

    #[test]
    fn phase_report_passes() {
        let r = phase(&ctx(), 8, Some(16), None, &None).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.checks.len(), 3);
        assert!(r.checks[1].value < 1e-12);
    }

    #[test]
    fn arc_arguments() {
        assert!(arc_edges(None, None).is_err());
        assert_eq!(arc_edges(Some(2), None).unwrap().len(), 3);
    }

    #[test]
    fn finite_weyl_random_state_is_seeded() {
        let a = finite_weyl(&ctx(), 3, &None, &None).unwrap();
        let b = finite_weyl(&ctx(), 3, &None, &None).unwrap();
        assert_eq!(a, b);
        assert!(a.pass);
    }
}
