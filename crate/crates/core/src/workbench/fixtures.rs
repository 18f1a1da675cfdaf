//! Built-in fixtures, rendered as manifests.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use crate::contact::{build_warped_kenmotsu, builtin_example_m5, m5_frame, AlmostContactStructure, KahlerFactor};
use crate::tensor::{Chart, TensorField};
use crate::workbench::manifest::{format_generator, ManifestWriter};

pub const FIXTURES: [&str; 3] = ["m5_example", "warped_flat_n1", "warped_flat_n2"];

/// Manifest text for a named fixture.
pub fn fixture_manifest(name: &str) -> Option<String> {
    match name {
        "m5_example" => {
            let (chart, s) = builtin_example_m5();
            let v: Vec<String> = ["2*x", "2*y", "2*z", "2*u", "v"].iter().map(|e| e.to_string()).collect();
            Some(render("five-dimensional hyperbolic Kenmotsu example", &chart, &s, &m5_frame(&chart), Some(&v)))
        }
        "warped_flat_n1" | "warped_flat_n2" => {
            let n = if name.ends_with('1') { 1 } else { 2 };
            let (chart, s) = build_warped_kenmotsu(&KahlerFactor::flat(n), &BigRational::one()).ok()?;
            let ctx = chart.context();
            let v: Vec<String> = s.xi().components().iter().map(|c| (c * &chart.constant(n as i64)).display(ctx).to_string()).collect();
            Some(render(&format!("warped product over flat C^{n} with warping e^t"), &chart, &s, &[], Some(&v)))
        }
        _ => None,
    }
}

fn render(
    title: &str,
    chart: &Arc<Chart>,
    s: &AlmostContactStructure,
    frame: &[TensorField],
    vector: Option<&[String]>,
) -> String {
    let ctx = chart.context();
    let names = ctx.coordinates();
    let n = names.len();
    let show = |t: &TensorField, idx: &[usize]| t.get(idx).display(ctx).to_string();
    let mut w = ManifestWriter::new();
    w.comment(title).section("manifold").list("coordinates", names.iter().cloned());
    if !ctx.exp_generators().is_empty() {
        w.list("exp_generators", ctx.exp_generators().iter().map(|f| format_generator(ctx, f)));
    }
    w.section("metric");
    let g = s.metric().tensor();
    for i in 0..n {
        for j in i..n {
            w.entry(&format!("{}.{}", names[i], names[j]), show(g, &[i, j]));
        }
    }
    w.section("structure");
    w.list("xi", (0..n).map(|i| show(s.xi(), &[i])));
    for i in 0..n {
        w.list(&format!("phi.{}", names[i]), (0..n).map(|j| show(s.phi(), &[i, j])));
    }
    if let Some(v) = vector {
        w.section("soliton").list("V", v.iter().cloned());
    }
    if !frame.is_empty() {
        w.section("frame");
        for (k, e) in frame.iter().enumerate() {
            w.list(&format!("e{}", k + 1), (0..n).map(|i| show(e, &[i])));
        }
    }
    w.finish()
}
