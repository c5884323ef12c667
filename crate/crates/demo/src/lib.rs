//! Browser demo: three operations returning JSON strings, exported through
//! wasm-bindgen and callable natively as plain functions.
//!
//! * [`cylinders`]: cylinder intervals of the family or of the derived system.
//! * [`dimension_curve`]: `d_n` of the family and the first-level dimension of
//!   the derived system across a parameter range.
//! * [`disjoint_scan`]: overlap counts of the derived cylinders across a range,
//!   with the longest window where they are pairwise disjoint.

use ifslab::geometry::find_common_disjoint_parameter;
use ifslab::pressure::solve_level_dimension;
use ifslab::words::{build_subsystem, cylinder, enumerate, tilde_words, SubsystemSpec};
use ifslab::{make_family, Rational, Result, Word};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_FAMILY_LEVEL: u32 = 7;
const MAX_DERIVED_LEVEL: u32 = 8;
const MAX_CURVE_LEVEL: u32 = 6;
const MAX_POINTS: u32 = 400;

fn respond(result: Result<Value>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn parse(s: &str) -> Result<Rational> {
    s.parse()
}

fn bounded(name: &str, value: u32, lo: u32, hi: u32) -> Result<()> {
    if (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(ifslab::Error::Domain(format!("{name} must lie in {lo}..={hi}")))
    }
}

/// `t_lo + j (t_hi - t_lo) / steps` for `j = 0..=steps`.
fn parameter_grid(t_lo: &Rational, t_hi: &Rational, steps: u32) -> Vec<Rational> {
    let step = (t_hi - t_lo) / Rational::integer(steps as i64);
    (0..=steps).map(|j| t_lo + &step * Rational::integer(j as i64)).collect()
}

fn cylinders_value(t: &str, n: u32, derived: bool) -> Result<Value> {
    let t = parse(t)?;
    let words: Vec<Word> = if derived {
        bounded("n", n, 1, MAX_DERIVED_LEVEL)?;
        tilde_words(n as usize)
    } else {
        bounded("n", n, 1, MAX_FAMILY_LEVEL)?;
        enumerate(&[1, 2, 3], n as usize).collect()
    };
    let cyl = words.iter().map(|u| cylinder(u, &t)).collect::<Result<Vec<_>>>()?;
    let mut overlapping = 0;
    for i in 0..cyl.len() {
        for j in i + 1..cyl.len() {
            overlapping += usize::from(cyl[i].intersects(&cyl[j]));
        }
    }
    let items: Vec<Value> = words
        .iter()
        .zip(&cyl)
        .map(|(u, c)| json!({ "word": u, "lo": c.left.to_f64(), "hi": c.right.to_f64() }))
        .collect();
    Ok(json!({
        "t": t,
        "interval": [0.0, (Rational::new(2, 3) * &t).to_f64()],
        "cylinders": items,
        "overlapping_pairs": overlapping,
    }))
}

/// Level-`n` cylinders at `t`; `derived` selects the words `v3`, `|v3| <= n`.
#[wasm_bindgen]
pub fn cylinders(t: &str, n: u32, derived: bool) -> String {
    respond(cylinders_value(t, n, derived))
}

fn dimension_curve_value(t_lo: &str, t_hi: &str, steps: u32, level: u32, derived_level: u32) -> Result<Value> {
    let (lo, hi) = (parse(t_lo)?, parse(t_hi)?);
    bounded("steps", steps, 1, MAX_POINTS)?;
    bounded("level", level, 1, MAX_CURVE_LEVEL)?;
    bounded("derived level", derived_level, 1, MAX_DERIVED_LEVEL)?;
    let points = parameter_grid(&lo, &hi, steps)
        .iter()
        .map(|t| {
            let d_n = solve_level_dimension(&make_family(t)?, level as usize, 1e-10)?.d_n;
            let sub = build_subsystem(&SubsystemSpec::tilde(t.clone(), derived_level as usize))?;
            let s_1 = solve_level_dimension(&sub.ifs, 1, 1e-10)?.d_n;
            Ok(json!({ "t": t.to_f64(), "d_n": d_n, "derived_s1": s_1 }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({ "level": level, "derived_level": derived_level, "points": points }))
}

/// `d_level` of the family and the first-level dimension of the derived
/// system of level `derived_level` at `steps + 1` parameters.
#[wasm_bindgen]
pub fn dimension_curve(t_lo: &str, t_hi: &str, steps: u32, level: u32, derived_level: u32) -> String {
    respond(dimension_curve_value(t_lo, t_hi, steps, level, derived_level))
}

fn disjoint_scan_value(n: u32, t_lo: &str, t_hi: &str, steps: u32) -> Result<Value> {
    let (lo, hi) = (parse(t_lo)?, parse(t_hi)?);
    bounded("n", n, 2, MAX_DERIVED_LEVEL)?;
    bounded("steps", steps, 1, MAX_POINTS)?;
    let points = parameter_grid(&lo, &hi, steps)
        .iter()
        .map(|t| {
            let rep = find_common_disjoint_parameter(n as usize, t, t, &Rational::zero())?;
            Ok(json!({ "t": t.to_f64(), "overlapping_pairs": rep.violating_pairs.len() }))
        })
        .collect::<Result<Vec<_>>>()?;
    let resolution = (&hi - &lo) / Rational::integer(steps as i64);
    let summary = find_common_disjoint_parameter(n as usize, &lo, &hi, &resolution)?;
    Ok(json!({
        "n": n,
        "points": points,
        "found": summary.found,
        "window": summary.window.map(|w| [w.t_lo.to_f64(), w.t_hi.to_f64()]),
    }))
}

/// Overlapping pairs among the derived level-`n` cylinders at `steps + 1`
/// parameters, and the longest window where there are none.
#[wasm_bindgen]
pub fn disjoint_scan(n: u32, t_lo: &str, t_hi: &str, steps: u32) -> String {
    respond(disjoint_scan_value(n, t_lo, t_hi, steps))
}
