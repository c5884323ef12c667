//! Attractor statistics: box counting on the union of level-`n` cylinders and
//! the level-`n` natural measure near a common fixed point.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{make_family, IfsInstance, Interval, MoebiusMap};
use crate::pressure::CompensatedSum;
use crate::rational::Rational;
use crate::words::{map_level, word_from_indices, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CoverMode {
    /// All level-`n` cylinders, with `ε` the largest of their lengths.
    Level,
    /// For a given `ε`, every word whose cylinder first drops to length `<= ε`.
    StoppingTime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCountLevel {
    /// Word length for [`CoverMode::Level`]; longest word used otherwise.
    pub level: usize,
    pub epsilon: Rational,
    /// Cylinders in the cover.
    pub cylinders: usize,
    pub count: u64,
    pub log_inv_epsilon: f64,
    pub log_count: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCountEstimate {
    pub cover: CoverMode,
    pub levels: Vec<BoxCountLevel>,
    /// Least-squares slope of `log N` against `log(1/ε)`. The union of
    /// cylinders covers the attractor, so this is biased upward at finite levels.
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; needs at least three levels.
    pub std_error: Option<f64>,
}

impl BoxCountEstimate {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,epsilon,epsilon_f64,cylinders,count,log_inv_epsilon,log_count\n");
        for l in &self.levels {
            out.push_str(&format!(
                "{},{},{:e},{},{},{},{}\n",
                l.level,
                l.epsilon,
                l.epsilon.to_f64(),
                l.cylinders,
                l.count,
                l.log_inv_epsilon,
                l.log_count
            ));
        }
        out.push_str(&format!(
            "# slope={},intercept={},std_error={}\n",
            self.slope,
            self.intercept,
            self.std_error.map_or("NA".to_string(), |e| e.to_string())
        ));
        out
    }
}

/// Level-`n` cylinders in lexicographic word order.
pub fn level_cylinders(ifs: &IfsInstance, n: usize) -> Result<Vec<Interval>> {
    let iv = &ifs.invariant_interval;
    map_level(&ifs.matrices(), n, |_, m| MoebiusMap::new(m.clone()).image_interval(iv))
        .into_iter()
        .collect()
}

fn to_i64(x: &num_bigint::BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::Numeric("box index out of range".into()))
}

/// Number of boxes `[kε, (k+1)ε)` whose interior meets the union of `cyl`.
/// A nondegenerate `[a, b]` meets `floor(a/ε) ..= ceil(b/ε) - 1`; a point
/// meets `floor(a/ε)`.
pub fn count_boxes(cyl: &[Interval], eps: &Rational) -> Result<u64> {
    if !eps.is_positive() {
        return Err(Error::Domain("box width must be positive".into()));
    }
    let mut ranges = cyl
        .iter()
        .map(|c| {
            let lo = to_i64(&(&c.left / eps).floor())?;
            let hi = if c.left == c.right {
                lo
            } else {
                to_i64(&-(-(&c.right / eps)).floor())? - 1
            };
            Ok((lo, hi.max(lo)))
        })
        .collect::<Result<Vec<_>>>()?;
    ranges.sort_unstable();
    let mut total = 0u64;
    let mut current: Option<(i64, i64)> = None;
    for (lo, hi) in ranges {
        match current {
            Some((cl, ch)) if lo <= ch + 1 => current = Some((cl, ch.max(hi))),
            Some((cl, ch)) => {
                total += (ch - cl + 1) as u64;
                current = Some((lo, hi));
            }
            None => current = Some((lo, hi)),
        }
    }
    if let Some((cl, ch)) = current {
        total += (ch - cl + 1) as u64;
    }
    Ok(total)
}

/// Ordinary least squares `y = slope·x + intercept` with the slope's standard error.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, Option<f64>)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Numeric("regression needs distinct scales".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let se = (x.len() > 2).then(|| {
        let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
        (ssr / (n - 2.0) / sxx).sqrt()
    });
    Ok((slope, intercept, se))
}

fn box_count_row(level: usize, cyl: &[Interval], eps: Rational) -> Result<BoxCountLevel> {
    let count = count_boxes(cyl, &eps)?;
    Ok(BoxCountLevel {
        level,
        cylinders: cyl.len(),
        log_inv_epsilon: -eps.ln_abs(),
        log_count: (count as f64).ln(),
        epsilon: eps,
        count,
    })
}

fn fit_rows(cover: CoverMode, rows: Vec<BoxCountLevel>) -> Result<BoxCountEstimate> {
    let x: Vec<f64> = rows.iter().map(|r| r.log_inv_epsilon).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.log_count).collect();
    let (slope, intercept, std_error) = if rows.len() == 1 {
        (y[0] / x[0], 0.0, None)
    } else {
        linear_fit(&x, &y)?
    };
    Ok(BoxCountEstimate { cover, levels: rows, slope, intercept, std_error })
}

/// Box-counting estimate from the unions of level-`n` cylinders, one scale
/// per requested level. With a single level the slope is `log N / log(1/ε)`.
pub fn box_counting(ifs: &IfsInstance, levels: &[usize]) -> Result<BoxCountEstimate> {
    if levels.is_empty() {
        return Err(Error::Domain("levels must be nonempty".into()));
    }
    let mut rows = Vec::with_capacity(levels.len());
    for &n in levels {
        let cyl = level_cylinders(ifs, n)?;
        let eps = cyl.iter().map(|c| c.length()).max().unwrap();
        if !eps.is_positive() {
            return Err(Error::Degenerate(format!("all level-{n} cylinders are points")));
        }
        rows.push(box_count_row(n, &cyl, eps)?);
    }
    fit_rows(CoverMode::Level, rows)
}

/// Cylinders of the words `u` with `|I_u| <= eps` whose parent cylinder is
/// longer than `eps`, and the longest such word. Needs a hyperbolic system.
pub fn stopping_time_cover(ifs: &IfsInstance, eps: &Rational) -> Result<(Vec<Interval>, usize)> {
    ifs.require_hyperbolic()?;
    if !eps.is_positive() {
        return Err(Error::Domain("box width must be positive".into()));
    }
    let gens = ifs.matrices();
    let iv = &ifs.invariant_interval;
    let mut out = Vec::new();
    let mut depth = 0;
    let mut stack = vec![(crate::moebius::Matrix2::identity(), iv.clone(), 0usize)];
    while let Some((m, c, len)) = stack.pop() {
        if &c.length() <= eps {
            depth = depth.max(len);
            out.push(c);
            continue;
        }
        for g in gens.iter().rev() {
            let next = &m * g;
            let img = MoebiusMap::new(next.clone()).image_interval(iv)?;
            stack.push((next, img, len + 1));
        }
    }
    Ok((out, depth))
}

/// Box-counting estimate with a stopping-time cover at each requested scale.
pub fn box_counting_scales(ifs: &IfsInstance, scales: &[Rational]) -> Result<BoxCountEstimate> {
    if scales.is_empty() {
        return Err(Error::Domain("scales must be nonempty".into()));
    }
    let rows = scales
        .iter()
        .map(|eps| {
            let (cyl, depth) = stopping_time_cover(ifs, eps)?;
            box_count_row(depth, &cyl, eps.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    fit_rows(CoverMode::StoppingTime, rows)
}

/// `ε_j = 4^-j` for `j` in `from..=to`.
pub fn geometric_scales(from: u32, to: u32) -> Vec<Rational> {
    (from..=to).map(|j| Rational::integer(4).pow(-(j as i32))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LqSum {
    pub q: f64,
    pub sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub level: usize,
    pub s: f64,
    pub point: Rational,
    /// `w_u = |I_u|^s / Σ_v |I_v|^s` in lexicographic word order.
    #[serde(skip)]
    pub weights: Vec<f64>,
    pub weight_total: f64,
    pub min_weight: f64,
    /// Words whose cylinders contain `point`.
    pub cylinders_at_point: usize,
    pub ball_mass: f64,
    /// Largest length among the cylinders containing `point`.
    pub radius: f64,
    /// `log(ball_mass) / log(radius)`.
    pub local_dimension_quotient: f64,
    pub lq_sums: Vec<LqSum>,
}

impl MeasureEstimate {
    pub fn csv_header() -> &'static str {
        "level,s,cylinders_at_point,ball_mass,radius,local_dimension_quotient"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:e},{:e},{}",
            self.level, self.s, self.cylinders_at_point, self.ball_mass, self.radius, self.local_dimension_quotient
        )
    }
}

pub const DEFAULT_LQ: [f64; 3] = [0.5, 2.0, 3.0];

/// Level-`n` natural-measure statistics at `point` for an arbitrary system.
/// Returns the estimate together with the words whose cylinders contain `point`.
pub fn natural_measure_stats_in(
    ifs: &IfsInstance,
    n: usize,
    s: f64,
    point: &Rational,
    qs: &[f64],
) -> Result<(MeasureEstimate, Vec<Word>)> {
    if n == 0 {
        return Err(Error::Domain("measure needs n >= 1".into()));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Domain(format!("exponent s must lie in (0, 1], got {s}")));
    }
    let iv = &ifs.invariant_interval;
    let cells = map_level(&ifs.matrices(), n, |idx, m| -> Result<(f64, Option<(Word, f64)>)> {
        let c = MoebiusMap::new(m.clone()).image_interval(iv)?;
        let len = c.length();
        if !len.is_positive() {
            return Err(Error::Degenerate("cylinder of zero length".into()));
        }
        let ln_len = len.ln_abs();
        Ok((ln_len, c.contains(point).then(|| (word_from_indices(idx), ln_len))))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let log_w: Vec<f64> = cells.iter().map(|(l, _)| s * l).collect();
    let top = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let z: CompensatedSum = log_w.iter().map(|l| (l - top).exp()).collect();
    let log_z = top + z.value().ln();
    let weights: Vec<f64> = log_w.iter().map(|l| (l - log_z).exp()).collect();

    let mut ball = CompensatedSum::default();
    let mut words = Vec::new();
    let mut ln_radius = f64::NEG_INFINITY;
    for ((_, hit), wgt) in cells.iter().zip(&weights) {
        if let Some((u, ln_len)) = hit {
            ball.add(*wgt);
            words.push(u.clone());
            ln_radius = ln_radius.max(*ln_len);
        }
    }
    if words.is_empty() {
        return Err(Error::Domain(format!("no level-{n} cylinder contains {point}")));
    }
    let ball_mass = ball.value();
    let lq_sums = qs
        .iter()
        .map(|&q| LqSum { q, sum: weights.iter().map(|w| w.powf(q)).collect::<CompensatedSum>().value() })
        .collect();
    let estimate = MeasureEstimate {
        level: n,
        s,
        point: point.clone(),
        weight_total: weights.iter().cloned().collect::<CompensatedSum>().value(),
        min_weight: weights.iter().cloned().fold(f64::INFINITY, f64::min),
        weights,
        cylinders_at_point: words.len(),
        ball_mass,
        radius: ln_radius.exp(),
        local_dimension_quotient: ball_mass.ln() / ln_radius,
        lq_sums,
    };
    Ok((estimate, words))
}

/// Natural-measure statistics of the family at the shared fixed point 0.
pub fn natural_measure_stats(t: &Rational, n: usize, s: f64) -> Result<(MeasureEstimate, Vec<Word>)> {
    natural_measure_stats_in(&make_family(t)?, n, s, &Rational::zero(), &DEFAULT_LQ)
}
