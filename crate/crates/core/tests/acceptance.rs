//! Acceptance criteria, one line per criterion.
//!
//! Criterion 4 is a known red: the residual it demands is not zero (see
//! `gradient_potential_residual` for the computed witness). It is run in full
//! and reported as FAIL; the run only fails if a criterion's outcome differs
//! from the recorded expectation.

mod common;

use std::process::Command;

use num_traits::Zero;

use kenmotsu::contact::{
    check_almost_contact, check_kenmotsu, check_phi_holomorphic_curvature, constant_curvature_tensor,
    default_sample_points, flat_rotation_r3, nijenhuis_normality, Geometry,
};
use kenmotsu::curvature::{
    bianchi_residual, commutation_residual, covariant_derivative, ricci_operator_self_adjoint_residual,
    ricci_symmetry_residual, torsion, trace_identity_residual,
};
use kenmotsu::kernel::{q, EvalMode, ScalarExpr};
use kenmotsu::soliton::{check_soliton_consequences, gradient_residual, solve_constants, verify_soliton, SolitonSpec};
use kenmotsu::tensor::TensorField;
use kenmotsu::verdict::{Classification, Witness};
use kenmotsu::workbench::oracle::{default_step, run_oracle, seeded_points, DEFAULT_POINTS};

use common::{all_fixtures, int, m5, random_polynomial_field, rng, warped};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn witness_text(t: &TensorField) -> String {
    match Witness::of(t) {
        Some(w) => format!("{} = {}", w.label, w.expression),
        None => "none".into(),
    }
}

fn example_vector(geo: &Geometry) -> TensorField {
    let c = geo.chart();
    TensorField::vector(c, ["2*x", "2*y", "2*z", "2*u", "v"].iter().map(|e| c.parse(e).unwrap()).collect()).unwrap()
}

fn criterion_1() -> Outcome {
    let geo = m5();
    let g = geo.structure.metric().tensor();
    let residual = geo.curvature.ricci.sub(&g.scale(&int(geo.chart(), -4))).unwrap();
    let n = geo.chart().dimension();
    let independent = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).filter(|&(i, j)| residual.get(&[i, j]).is_zero()).count();
    ensure(independent == 15, format!("{independent} of 15 Ricci components match, witness {}", witness_text(&residual)))?;
    ensure(geo.curvature.scalar == int(geo.chart(), -20), format!("r = {}", geo.curvature.scalar.display(geo.chart().context())))?;
    Ok("Ric = -4g on 15 components, r = -20".into())
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kenmotsu"))
}

fn criterion_2() -> Outcome {
    let out = binary().args(["soliton", "fixture:m5_example", "--solve", "--format", "json"]).output().map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), format!("exit code {:?}", out.status.code()))?;
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let check = &json["checks"][0];
    let got = (check["solved"]["lambda"].as_str(), check["solved"]["mu"].as_str(), check["classification"].as_str());
    ensure(got == (Some("3"), Some("1"), Some("expanding")), format!("got {got:?}"))?;
    Ok("lambda = 3, mu = 1, expanding".into())
}

fn criterion_3() -> Outcome {
    let geo = m5();
    let c = geo.chart();
    let mut parts = Vec::new();
    for sigma in [1, 2, 7] {
        let v = geo.structure.xi().scale(&int(c, sigma));
        let r = solve_constants(&geo.structure, &geo.curvature, &v).map_err(|e| e.to_string())?;
        let (l, m) = r.solved_constants.clone().ok_or_else(|| format!("sigma = {sigma}: not solved"))?;
        ensure(l == int(c, 4 - sigma) && m == int(c, sigma), format!("sigma = {sigma}: got ({l:?}, {m:?})"))?;
        let spec = SolitonSpec::vector(v, l, m);
        let consequences = check_soliton_consequences(&geo.structure, &geo.curvature, &geo.connection, &spec).map_err(|e| e.to_string())?;
        let sum = consequences.iter().find(|r| r.identity == "lambda_plus_mu").unwrap();
        ensure(sum.passed() && sum.value("lambda_plus_mu") == Some(&int(c, 4)), format!("sigma = {sigma}: lambda + mu != 4"))?;
        parts.push(format!("sigma {sigma} -> ({}, {sigma})", 4 - sigma));
    }
    Ok(parts.join(", "))
}

fn gradient_potential_residual() -> TensorField {
    let geo = m5();
    let c = geo.chart();
    let f = c.parse("x^2 + y^2 + z^2 + u^2 + 1/2*v^2").unwrap();
    let spec = SolitonSpec::gradient(f, int(c, 3), int(c, 1));
    gradient_residual(&geo.structure, &geo.curvature, &geo.connection, &spec).unwrap()
}

fn criterion_4() -> Outcome {
    let residual = gradient_potential_residual();
    ensure(residual.is_zero(), format!("gradient residual is not zero, witness {}", witness_text(&residual)))?;
    Ok("gradient residual is zero".into())
}

fn criterion_5() -> Outcome {
    let mut cases: Vec<(String, Geometry, TensorField)> = Vec::new();
    let m = m5();
    cases.push(("m5 example V".into(), m.clone(), example_vector(&m)));
    for sigma in [0, 1, 2, 7] {
        let v = m.structure.xi().scale(&int(m.chart(), sigma));
        cases.push((format!("m5 V = {sigma} xi"), m.clone(), v));
    }
    for (n, k) in [(1, 1), (2, 2)] {
        let w = warped(n);
        let v = w.structure.xi().scale(&int(w.chart(), k));
        cases.push((format!("warped_flat_n{n} V = {k} xi"), w, v));
    }
    for (name, geo, v) in &cases {
        let solved = solve_constants(&geo.structure, &geo.curvature, v).map_err(|e| e.to_string())?;
        let (l, m) = solved.solved_constants.clone().ok_or_else(|| format!("{name}: not a soliton"))?;
        let spec = SolitonSpec::vector(v.clone(), l, m);
        let consequences = check_soliton_consequences(&geo.structure, &geo.curvature, &geo.connection, &spec).map_err(|e| e.to_string())?;
        for id in ["lie_curvature_xi_xi", "lie_connection_xi"] {
            let r = consequences.iter().find(|r| r.identity == id).unwrap();
            let w = r.residual.as_ref().map(witness_text).unwrap_or_default();
            ensure(r.passed(), format!("{name}: {id} fails, witness {w}"))?;
        }
    }
    Ok(format!("{} verified solitons", cases.len()))
}

fn criterion_6() -> Outcome {
    let w1 = warped(1);
    let s = &w1.structure;
    let mut verdicts = check_almost_contact(s, &default_sample_points(3)).map_err(|e| e.to_string())?;
    verdicts.push(nijenhuis_normality(s).map_err(|e| e.to_string())?);
    verdicts.extend(check_kenmotsu(s, &w1.connection).map_err(|e| e.to_string())?);
    if let Some(bad) = verdicts.iter().find(|v| !v.passed()) {
        return Err(format!("n = 1: {} fails", bad.identity));
    }
    let c1 = w1.chart();
    let space_form = constant_curvature_tensor(s.metric()).scale(&int(c1, -1));
    ensure(w1.curvature.riemann == space_form, "n = 1: curvature is not constant -1")?;
    ensure(w1.curvature.scalar == int(c1, -6), "n = 1: r != -6")?;

    let w2 = warped(2);
    let c2 = w2.chart();
    let ric = w2.curvature.ricci.sub(&w2.structure.metric().tensor().scale(&int(c2, -4))).unwrap();
    ensure(ric.is_zero(), format!("n = 2: Ric != -4g, witness {}", witness_text(&ric)))?;
    let h = check_phi_holomorphic_curvature(&w2.curvature, &w2.structure).map_err(|e| e.to_string())?;
    ensure(h.h == Some(int(c2, -1)), "n = 2: H is not -1")?;
    ensure(h.ricci_consequence.as_ref().is_some_and(|r| r.passed()), "n = 2: Ricci formula for H fails")?;
    Ok("n = 1: Kenmotsu, K = -1, r = -6; n = 2: Ric = -4g, H = -1".into())
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let fixtures = all_fixtures();
    for (name, geo) in &fixtures {
        let g = geo.structure.metric();
        let checks: Vec<(&str, TensorField)> = vec![
            ("torsion", torsion(&geo.connection).unwrap()),
            ("metric compatibility", covariant_derivative(g.tensor(), &geo.connection).unwrap()),
            ("first Bianchi", bianchi_residual(&geo.curvature)),
            ("Ricci symmetry", ricci_symmetry_residual(&geo.curvature)),
            ("Q self-adjoint", ricci_operator_self_adjoint_residual(&geo.curvature, g).unwrap()),
            ("trace identity", trace_identity_residual(&geo.curvature, &geo.connection).unwrap()),
        ];
        for (what, t) in checks {
            ensure(t.is_zero(), format!("{name}: {what} residual {}", witness_text(&t)))?;
        }
        for k in 0..3 {
            let v = random_polynomial_field(geo.chart(), &mut r);
            let t = commutation_residual(&v, &geo.connection).unwrap();
            ensure(t.is_zero(), format!("{name}: commutation formula fails for field {k}, witness {}", witness_text(&t)))?;
        }
    }
    Ok(format!("{} fixtures, 3 polynomial fields each", fixtures.len()))
}

fn criterion_8() -> Outcome {
    let geo = m5();
    let points = seeded_points(5, DEFAULT_POINTS);
    let out = run_oracle(geo.structure.metric(), &geo.connection, &geo.curvature, &points, &default_step());
    let dev = kenmotsu::kernel::rational_to_f64(out.max_deviation());
    ensure(out.evaluated == 5, format!("{} points evaluated", out.evaluated))?;
    ensure(out.passed(1e-6), format!("max relative deviation {dev:e}"))?;
    Ok(format!("max relative deviation {dev:.3e} at 5 points"))
}

fn exit_code(args: &[&str]) -> Option<i32> {
    binary().args(args).output().ok()?.status.code()
}

fn criterion_9() -> Outcome {
    let (_, rot) = flat_rotation_r3();
    let rot = Geometry::new(rot).unwrap();
    let k = check_kenmotsu(&rot.structure, &rot.connection).unwrap();
    let first = &k[0];
    ensure(!first.passed() && first.witness.is_some(), "flat rotation passes the Kenmotsu check")?;
    let rot_witness = first.witness.as_ref().map(|w| format!("{} = {}", w.label, w.expression)).unwrap();

    let geo = m5();
    let c = geo.chart();
    let spec = SolitonSpec::vector(example_vector(&geo), int(c, 3), ScalarExpr::zero(c.dimension()));
    let v = verify_soliton(&geo.structure, &geo.curvature, &geo.connection, &spec).unwrap();
    let w = v.witness.as_ref().ok_or("perturbed spec passes")?;
    ensure(w.index == vec![4, 4], format!("witness at {:?}", w.index))?;
    let residual = v.residual.as_ref().unwrap();
    let xi = geo.structure.xi();
    let at_xi = residual.apply(&[xi, xi]).unwrap();
    let value = at_xi.as_scalar().unwrap().evaluate(&vec![q(1, 1); 5], EvalMode::Exact).unwrap();
    ensure(!value.is_zero(), "residual vanishes on (xi, xi)")?;
    ensure(v.classification.is_none() && Classification::of_lambda(&int(c, 3)) == Classification::Expanding, "classification")?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let rotation = dir.path().join("rotation.manifest");
    std::fs::write(&rotation, include_str!("data/flat_rotation_r3.manifest")).map_err(|e| e.to_string())?;
    let missing = dir.path().join("missing.manifest");
    std::fs::write(&missing, include_str!("data/missing_metric.manifest")).map_err(|e| e.to_string())?;
    let codes = (
        exit_code(&["check-structure", "fixture:m5_example"]),
        exit_code(&["check-structure", rotation.to_str().unwrap()]),
        exit_code(&["check-structure", missing.to_str().unwrap()]),
    );
    ensure(codes == (Some(0), Some(1), Some(2)), format!("exit codes {codes:?}"))?;
    Ok(format!("rotation witness {rot_witness}; perturbed witness {} = {}; exit codes 0/1/2", w.label, w.expression))
}

/// Criteria whose failure is the expected, analysed outcome.
const EXPECTED_RED: [usize; 1] = [4];

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 9] = [
        (1, "example Ricci and scalar curvature", criterion_1),
        (2, "soliton constants from --solve", criterion_2),
        (3, "collinear family", criterion_3),
        (4, "gradient soliton with the stated potential", criterion_4),
        (5, "soliton consequences", criterion_5),
        (6, "warped products over flat factors", criterion_6),
        (7, "connection and curvature identities", criterion_7),
        (8, "finite-difference oracle", criterion_8),
        (9, "negative controls and exit codes", criterion_9),
    ];
    let mut unexpected = 0;
    for (n, title, run) in criteria {
        let outcome = run();
        let expected_red = EXPECTED_RED.contains(&n);
        let line = match &outcome {
            Ok(msg) => format!("criterion {n} PASS  {title}: {msg}"),
            Err(msg) => format!("criterion {n} FAIL  {title}: {msg}"),
        };
        let tag = match (outcome.is_ok(), expected_red) {
            (true, false) | (false, true) => "",
            _ => {
                unexpected += 1;
                "  [UNEXPECTED]"
            }
        };
        let known = if expected_red && outcome.is_err() { "  [known red]" } else { "" };
        println!("{line}{known}{tag}");
    }
    if unexpected > 0 {
        println!("{unexpected} criterion outcome(s) differ from expectation");
        std::process::exit(1);
    }
}
