//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p ifslab --test acceptance` (add `--release` for
//! representative timings).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ifslab::attractor::{box_counting, box_counting_scales, geometric_scales, natural_measure_stats};
use ifslab::geometry::{
    find_common_disjoint_parameter, lemma4_threshold, nondegeneracy_certificate, verify_lemma2, verify_lemma4,
    OrderRelation,
};
use ifslab::moebius::{a_power_closed_form, family_matrices, family_interval};
use ifslab::pressure::{distortion_constant, dimension_bracket, solve_level_dimension, subsystem_dimension_report};
use ifslab::separation::{
    appendix_conjugacy_check, exact_overlap_search, relation_search_abc, residue_freeness_check,
};
use ifslab::words::{build_subsystem, SubsystemSpec};
use ifslab::{make_family, IfsInstance, Interval, Matrix2, MoebiusMap, Rational};

type Outcome = Result<String, String>;

fn r(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Exact 2x2 products over `i128` fractions, kept independent of the library.
mod frac {
    pub type F = (i128, i128);

    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }

    pub fn norm((p, q): F) -> F {
        let g = gcd(p, q).max(1) * q.signum();
        (p / g, q / g)
    }

    pub fn add(a: F, b: F) -> F {
        norm((a.0 * b.1 + b.0 * a.1, a.1 * b.1))
    }

    pub fn mul(a: F, b: F) -> F {
        norm((a.0 * b.0, a.1 * b.1))
    }

    pub type M = [F; 4];

    pub fn mat_mul(x: &M, y: &M) -> M {
        [
            add(mul(x[0], y[0]), mul(x[1], y[2])),
            add(mul(x[0], y[1]), mul(x[1], y[3])),
            add(mul(x[2], y[0]), mul(x[3], y[2])),
            add(mul(x[2], y[1]), mul(x[3], y[3])),
        ]
    }
}

fn c1_conjugacy() -> Outcome {
    let chk = appendix_conjugacy_check();
    check(chk.holds, || format!("library check failed: {:?} {:?}", chk.conjugate_a, chk.conjugate_b))?;
    // 2 R A^-1 R^-1 by hand: A^-1 = [[2, 0], [-2, 1/2]], B^-1 = [[2, 0], [0, 1/2]]
    let r_m: frac::M = [(4, 1), (0, 1), (4, 3), (1, 1)];
    let r_inv: frac::M = [(1, 4), (0, 1), (-1, 3), (1, 1)];
    let a_inv: frac::M = [(4, 1), (0, 1), (-4, 1), (1, 1)]; // 2 A^-1
    let b_inv: frac::M = [(4, 1), (0, 1), (0, 1), (1, 1)]; // 2 B^-1
    let e = frac::mat_mul(&frac::mat_mul(&r_m, &a_inv), &r_inv);
    let f = frac::mat_mul(&frac::mat_mul(&r_m, &b_inv), &r_inv);
    check(e == [(4, 1), (0, 1), (0, 1), (1, 1)], || format!("oracle E = {e:?}"))?;
    check(f == [(4, 1), (0, 1), (1, 1), (1, 1)], || format!("oracle F = {f:?}"))?;
    Ok("2RA^-1R^-1 = [[4,0],[0,1]], 2RB^-1R^-1 = [[4,0],[1,1]]".into())
}

fn c2_residues() -> Outcome {
    let rep = residue_freeness_check(1000, 20, 20_240_601).map_err(err)?;
    check(rep.violations == 0, || format!("{} residue violations", rep.violations))?;
    // bottom-left entry m evolves as m -> 4m after E and 4m + 1 after F
    for c in &rep.checks {
        let m = |word: &str| word.chars().fold(0u128, |m, ch| 4 * m + u128::from(ch == 'F'));
        let xe = m(&format!("{}E", c.x_word));
        let yf = m(&format!("{}F", c.y_word));
        check(c.xe_bottom_left == xe.to_string() && c.yf_bottom_left == yf.to_string(), || {
            format!("entry mismatch for ({}, {})", c.x_word, c.y_word)
        })?;
        check(xe % 4 == 0 && yf % 4 == 1, || "oracle residue mismatch".into())?;
    }
    Ok(format!("{} pairs, max length 20, seed {}, 0 violations", rep.sample_count, rep.seed))
}

fn c3_a_power() -> Outcome {
    let a = family_matrices(&r(1, 1))[0].clone();
    let mut acc = a.clone();
    for m in 1..=30u32 {
        let two_m = Rational::integer(2).pow(m as i32);
        let expected = Matrix2::new(
            two_m.recip(),
            Rational::zero(),
            Rational::integer(2).pow(m as i32 + 2) * (Rational::one() - Rational::integer(4).pow(-(m as i32)))
                / Rational::integer(3),
            two_m,
        );
        check(acc == expected, || format!("A^{m} = {acc:?}, formula gives {expected:?}"))?;
        check(a_power_closed_form(m) == expected, || format!("library closed form differs at m = {m}"))?;
        acc = &acc * &a;
    }
    Ok("A^m matches the closed form for m = 1..30".into())
}

fn c4_level_one() -> Outcome {
    let mut detail = Vec::new();
    for t in [r(1, 2), r(1, 1), r(3, 1)] {
        let maps = family_matrices(&t)[1..].iter().cloned().map(MoebiusMap::new).collect();
        let pair = IfsInstance::new(maps, family_interval(&t)).map_err(err)?;
        let d = solve_level_dimension(&pair, 1, 1e-14).map_err(err)?.d_n;
        // 2 · 4^-s = 1
        check((d - 0.5).abs() < 1e-12, || format!("d_1(f2, f3) = {d} at t = {t}"))?;
        let d3 = solve_level_dimension(&make_family(&t).map_err(err)?, 1, 1e-14).map_err(err)?.d_n;
        let oracle = 3f64.ln() / 4f64.ln();
        check((d3 - oracle).abs() < 1e-10, || format!("d_1 = {d3} at t = {t}, expected {oracle}"))?;
        detail.push(format!("t={t}: {d:.12}, {d3:.12}"));
    }
    Ok(detail.join("; "))
}

fn c5_brackets() -> Outcome {
    let ifs = make_family(&r(1, 1)).map_err(err)?;
    let d: Vec<f64> = [1, 2, 4, 8]
        .iter()
        .map(|&n| solve_level_dimension(&ifs, n, 1e-12).map(|l| l.d_n))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    check(d.windows(2).all(|w| w[0] >= w[1]), || format!("not monotone: {d:?}"))?;
    let c4 = distortion_constant(&ifs, 4).map_err(err)?.c_emp;
    let lower = d[2] - c4.ln_abs() / (4.0 * 4f64.ln());
    check(lower <= d[3] && d[3] <= d[2], || format!("d_8 = {} outside [{lower}, {}]", d[3], d[2]))?;
    Ok(format!(
        "d_1={:.6} d_2={:.6} d_4={:.6} d_8={:.6} in [{lower:.6}, {:.6}], C_emp(4)={:.6}",
        d[0],
        d[1],
        d[2],
        d[3],
        d[2],
        c4.to_f64()
    ))
}

fn c6_subsystem() -> Outcome {
    let mut detail = Vec::new();
    for n in [2, 3, 4] {
        let rep = subsystem_dimension_report(&r(1, 1), n, 1e-12).map_err(err)?;
        let lo = rep.d_n - 1.0 / (2.0 * n as f64);
        check(lo <= rep.s_1 && rep.s_1 <= rep.d_n, || {
            format!("N={n}: s_1 = {} outside [{lo}, {}]", rep.s_1, rep.d_n)
        })?;
        detail.push(format!("N={n}: {lo:.4} <= {:.4} <= {:.4}", rep.s_1, rep.d_n));
    }
    Ok(detail.join("; "))
}

fn c7_lemma4_sharp() -> Outcome {
    let eps = Rational::pow10_neg(6);
    for k in 1..=3usize {
        let th = lemma4_threshold(k);
        for (t, expect) in [(&th - &eps, true), (&th + &eps, false)] {
            let rep = verify_lemma4(k, &t).map_err(err)?;
            let lib = rep.extremal == Some(OrderRelation::Prec);
            // right end of I_{2^(k+1) 3} against left end of I_{1^k 3}
            let four_k = Rational::integer(4).pow(k as i32);
            let right = Rational::new(2, 3) * &t / (Rational::integer(4) * &four_k);
            let x = &t / Rational::integer(2);
            let den = &four_k
                * (Rational::one()
                    + Rational::integer(4) * &x * (Rational::one() - four_k.recip()) / Rational::integer(3));
            let left = &x / den;
            let oracle = right < left;
            check(lib == expect && oracle == expect && rep.verdict == expect, || {
                format!("k={k}, t={t}: library {lib}, oracle {oracle}, all pairs {}", rep.verdict)
            })?;
        }
    }
    Ok("thresholds 4, 16/5, 64/21 sharp at ±1e-6".into())
}

fn c8_lemma2() -> Outcome {
    let mut pairs = 0;
    for t in [r(1, 2), r(1, 1), r(3, 1)] {
        for k in 1..=6 {
            let rep = verify_lemma2(k, &t).map_err(err)?;
            check(rep.verdict, || format!("k={k}, t={t}: {:?}", rep.counterexamples.first()))?;
            pairs += rep.pairs_checked;
        }
    }
    Ok(format!("{pairs} ordered cylinder pairs"))
}

fn c9_certificate() -> Outcome {
    let grid: Vec<Rational> = [1, 2, 4, 10, 50, 200].iter().map(|&t| r(t, 1)).chain([r(1, 2)]).collect();
    let mut detail = Vec::new();
    for n in [3, 4] {
        let rep = nondegeneracy_certificate(n, &grid).map_err(err)?;
        check(rep.complete, || format!("n={n}: missing {:?}", rep.missing))?;
        for w in &rep.witnesses {
            check(w.recheck().map_err(err)?, || format!("witness {w:?} does not recheck"))?;
        }
        detail.push(format!("n={n}: {} pairs", rep.pair_count));
    }
    Ok(detail.join("; "))
}

fn c10_osc_match() -> Outcome {
    let cantor = IfsInstance::new(
        vec![MoebiusMap::affine(r(1, 4), r(0, 1)), MoebiusMap::affine(r(1, 4), r(3, 4))],
        Interval::new(r(0, 1), r(1, 1)).map_err(err)?,
    )
    .map_err(err)?;
    let est = box_counting(&cantor, &[2, 3, 4, 5, 6, 7, 8]).map_err(err)?;
    check((est.slope - 0.5).abs() <= 0.05, || format!("Cantor slope {}", est.slope))?;
    let mut detail = vec![format!("Cantor slope {:.4}", est.slope)];

    let mut cases = Vec::new();
    let n2 = find_common_disjoint_parameter(2, &r(1, 1), &r(1, 1), &r(0, 1)).map_err(err)?;
    check(n2.found, || "no disjoint parameter for n = 2 at t = 1".into())?;
    cases.push((2, r(1, 1), 7));
    let n3 = find_common_disjoint_parameter(3, &r(1, 2), &r(4, 1), &r(1, 20)).map_err(err)?;
    if let Some(w) = &n3.window {
        cases.push((3, (&w.t_lo + &w.t_hi) / Rational::integer(2), 6));
    }
    for (n, t, bracket_level) in cases {
        let sub = build_subsystem(&SubsystemSpec::tilde(t.clone(), n)).map_err(err)?;
        let c = distortion_constant(&sub.ifs, 3).map_err(err)?.c_emp;
        let br = dimension_bracket(&sub.ifs, bracket_level, &c, 1e-12).map_err(err)?;
        let est = box_counting_scales(&sub.ifs, &geometric_scales(5, 10)).map_err(err)?;
        let diff = (est.slope - br.midpoint()).abs();
        check(diff <= 0.05, || {
            format!("n={n}, t={t}: slope {} vs midpoint {} of [{}, {}]", est.slope, br.midpoint(), br.lower, br.upper)
        })?;
        detail.push(format!(
            "n={n}, t={t}: slope {:.4} vs midpoint {:.4} of [{:.4}, {:.4}]",
            est.slope,
            br.midpoint(),
            br.lower,
            br.upper
        ));
    }
    Ok(detail.join("; "))
}

fn c11_measure() -> Outcome {
    let ifs = make_family(&r(1, 1)).map_err(err)?;
    let s = solve_level_dimension(&ifs, 10, 1e-12).map_err(err)?.d_n;
    let (est, words) = natural_measure_stats(&r(1, 1), 10, s).map_err(err)?;
    check(est.cylinders_at_point == 1024, || format!("{} cylinders at 0", est.cylinders_at_point))?;
    check(words.iter().all(|u| !u.contains(3)), || "a cylinder at 0 uses symbol 3".into())?;
    check(est.local_dimension_quotient < s - 0.1, || {
        format!("quotient {} not below s - 0.1 = {}", est.local_dimension_quotient, s - 0.1)
    })?;
    Ok(format!("1024 cylinders at 0, quotient {:.4} < s - 0.1 = {:.4}", est.local_dimension_quotient, s - 0.1))
}

fn c12_overlaps() -> Outcome {
    let ov = exact_overlap_search(&r(1, 1), 6).map_err(err)?;
    check(ov.is_empty(), || format!("overlaps {:?}", ov.overlaps))?;
    let rel = relation_search_abc(&r(1, 1), 6).map_err(err)?;
    check(rel.third_symbol_pruned, || "pruning precondition failed".into())?;
    check(rel.relations.is_empty(), || format!("relations {:?}", rel.relations))?;
    Ok(format!("{} words compared, {} in relation search, none equal", ov.searched, rel.searched))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 12] = [
        ("exact conjugacy", Duration::from_millis(1), c1_conjugacy),
        ("residue obstruction", Duration::from_secs(1), c2_residues),
        ("closed form of A^m", Duration::from_millis(10), c3_a_power),
        ("level-one dimensions", Duration::from_secs(1), c4_level_one),
        ("bracket suite", Duration::from_secs(120), c5_brackets),
        ("subsystem bracket", Duration::from_secs(60), c6_subsystem),
        ("lemma 4 sharpness", Duration::from_secs(1), c7_lemma4_sharp),
        ("lemma 2 order", Duration::from_secs(30), c8_lemma2),
        ("non-degeneracy certificate", Duration::from_secs(60), c9_certificate),
        ("OSC dimension match", Duration::from_secs(300), c10_osc_match),
        ("natural-measure drop", Duration::from_secs(120), c11_measure),
        ("overlap searches", Duration::from_secs(300), c12_overlaps),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over time budget")),
            Err(e) => (false, e),
        };
        failures += usize::from(!ok);
        println!(
            "{} {:>2} {name}: {detail} [{:.3?} / {:?}]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed,
            budget
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
