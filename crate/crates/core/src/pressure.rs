//! Finite-level partition sums and the dimensions they determine.
//!
//! For a word `u` of length `n`, `||f_u'||` is the exact sup of `|f_u'|` on the
//! invariant interval. The level-`n` sum `Z_n(s) = sum_u ||f_u'||^s` is strictly
//! decreasing in `s`, and `d_n` is the root of `Z_n(s) = 1`. The conformal
//! dimension satisfies `d_n - log C / (n log(1/gamma_2)) <= dim <= d_n` where
//! `C` is a bounded distortion constant.
//!
//! Norms are exact rationals; only the power `||f_u'||^s` is taken in `f64`
//! (via the exactly computed logarithm), and sums use Neumaier compensation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{IfsInstance, Matrix2, MoebiusMap};
use crate::rational::Rational;
use crate::words::{build_subsystem, for_each_product_upto, map_level, SubsystemSpec};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const MAX_BISECTION_STEPS: usize = 200;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Exact `sup |f'|` on the interval of `ifs`, for a product matrix.
fn sup_norm(m: &Matrix2, ifs: &IfsInstance) -> Rational {
    MoebiusMap::new(m.clone())
        .derivative_bounds(&ifs.invariant_interval)
        .expect("products of pole-free self-maps stay pole-free")
        .1
}

/// Exact derivative sup-norms of all level-`n` words, in lexicographic order.
pub fn word_norms(ifs: &IfsInstance, n: usize) -> Vec<Rational> {
    map_level(&ifs.matrices(), n, |_, m| sup_norm(m, ifs))
}

/// Logarithms of the level-`n` norms, computed once and reused across
/// exponents.
#[derive(Debug, Clone)]
pub struct NormTable {
    pub level: usize,
    pub alphabet_size: usize,
    log_norms: Vec<f64>,
}

impl NormTable {
    pub fn new(ifs: &IfsInstance, n: usize) -> Self {
        let log_norms = map_level(&ifs.matrices(), n, |_, m| sup_norm(m, ifs).ln_abs());
        NormTable { level: n, alphabet_size: ifs.len(), log_norms }
    }

    pub fn from_norms(level: usize, alphabet_size: usize, norms: &[Rational]) -> Self {
        NormTable {
            level,
            alphabet_size,
            log_norms: norms.iter().map(Rational::ln_abs).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.log_norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_norms.is_empty()
    }

    /// `sum_u ||f_u'||^s`.
    pub fn sum(&self, s: f64) -> f64 {
        self.log_norms.iter().map(|&l| (s * l).exp()).collect::<CompensatedSum>().value()
    }
}

/// Level-`n` partition sum `sum_{|u| = n} ||f_u'||^s`.
pub fn partition_sum(ifs: &IfsInstance, n: usize, s: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("partition sums need n >= 1".into()));
    }
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("exponent must be >= 0, got {s}")));
    }
    let v = NormTable::new(ifs, n).sum(s);
    if !v.is_finite() {
        return Err(Error::Numeric(format!("partition sum overflowed at n = {n}, s = {s}")));
    }
    Ok(v)
}

/// Finite-level pressure `P_n(s) = (1/n) log Z_n(s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureEstimate {
    pub level: usize,
    pub exponent: f64,
    pub value: f64,
}

pub fn pressure(ifs: &IfsInstance, n: usize, s: f64) -> Result<PressureEstimate> {
    let z = partition_sum(ifs, n, s)?;
    Ok(PressureEstimate { level: n, exponent: s, value: z.ln() / n as f64 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDimension {
    pub level: usize,
    pub d_n: f64,
    /// `|Z_n(d_n) - 1|`.
    pub residual: f64,
}

/// Upper end of the bisection bracket, `log(#maps) / log(1/gamma_2)`.
pub fn dimension_upper_limit(ifs: &IfsInstance) -> f64 {
    (ifs.len() as f64).ln() / -ifs.gamma_upper.ln_abs()
}

/// Root of `Z_n(s) = 1` by bisection on `[0, log(#maps)/log(1/gamma_2)]`.
pub fn solve_level_dimension(ifs: &IfsInstance, n: usize, tol: f64) -> Result<LevelDimension> {
    ifs.require_hyperbolic()?;
    if n == 0 {
        return Err(Error::Domain("level must be >= 1".into()));
    }
    let table = NormTable::new(ifs, n);
    solve_table(&table, dimension_upper_limit(ifs), tol)
}

/// Bisection on a precomputed norm table; `hi` must satisfy `Z(hi) <= 1`.
pub fn solve_table(table: &NormTable, hi: f64, tol: f64) -> Result<LevelDimension> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let (mut lo, mut hi) = (0.0f64, hi);
    let f = |s: f64| table.sum(s) - 1.0;
    if f(hi) > 0.0 {
        // rounding at the bracket end: widen until the sign is right
        hi *= 1.0 + 1e-12;
        if f(hi) > 0.0 {
            return Err(Error::Numeric("partition sum exceeds 1 at the upper bracket".into()));
        }
    }
    let mut mid = 0.5 * (lo + hi);
    let mut value = f(mid);
    if f(lo) <= 0.0 {
        // single map, or all norms equal to 1: the root is 0
        return Ok(LevelDimension { level: table.level, d_n: 0.0, residual: f(0.0).abs() });
    }
    for _ in 0..MAX_BISECTION_STEPS {
        if value > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        let next = 0.5 * (lo + hi);
        if next == mid || (hi - lo < tol && value.abs() < tol) {
            break;
        }
        mid = next;
        value = f(mid);
    }
    Ok(LevelDimension { level: table.level, d_n: mid, residual: value.abs() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rigor {
    /// Maximum over finitely many words; the true constant is a sup over all words.
    Empirical,
    UserSupplied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionEstimate {
    pub depth: usize,
    pub c_emp: Rational,
    pub rigor: Rigor,
}

/// `max_{1 <= |u| <= m} sup|f_u'| / inf|f_u'|` over the invariant interval.
pub fn distortion_constant(ifs: &IfsInstance, m: usize) -> Result<DistortionEstimate> {
    if m == 0 {
        return Err(Error::Domain("distortion depth must be >= 1".into()));
    }
    let mut c = Rational::one();
    let mut err = None;
    for_each_product_upto(&ifs.matrices(), m, |_, mat| {
        match MoebiusMap::new(mat.clone()).distortion(&ifs.invariant_interval) {
            Ok(q) if q > c => c = q,
            Ok(_) => {}
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(DistortionEstimate { depth: m, c_emp: c, rigor: Rigor::Empirical })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionBracket {
    pub level: usize,
    pub lower: f64,
    pub upper: f64,
    pub distortion: Rational,
    pub rigor: Rigor,
    pub gamma2: Rational,
}

impl DimensionBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        self.lower - slack <= x && x <= self.upper + slack
    }
}

/// `[d_n - log C / (n log(1/gamma_2)), d_n]` from an already solved level.
pub fn bracket_from_level(
    level: &LevelDimension,
    c: &Rational,
    rigor: Rigor,
    gamma2: &Rational,
) -> Result<DimensionBracket> {
    if *c < 1 {
        return Err(Error::Domain(format!("distortion constant must be >= 1, got {c}")));
    }
    if !gamma2.is_positive() || *gamma2 >= 1 {
        return Err(Error::Precondition(format!("gamma2 must lie in (0, 1), got {gamma2}")));
    }
    let width = c.ln_abs() / (level.level as f64 * -gamma2.ln_abs());
    Ok(DimensionBracket {
        level: level.level,
        lower: level.d_n - width,
        upper: level.d_n,
        distortion: c.clone(),
        rigor,
        gamma2: gamma2.clone(),
    })
}

/// Bracket for the conformal dimension from level `n` and a supplied `C`.
pub fn dimension_bracket(ifs: &IfsInstance, n: usize, c: &Rational, tol: f64) -> Result<DimensionBracket> {
    let level = solve_level_dimension(ifs, n, tol)?;
    bracket_from_level(&level, c, Rigor::UserSupplied, &ifs.gamma_upper)
}

/// One machine-readable row per level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: usize,
    pub d_n: f64,
    pub residual: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    #[serde(rename = "C_emp")]
    pub c_emp: Rational,
    pub gamma2: Rational,
}

impl LevelRecord {
    pub fn new(level: &LevelDimension, bracket: &DimensionBracket) -> Self {
        LevelRecord {
            level: level.level,
            d_n: level.d_n,
            residual: level.residual,
            bracket_lo: bracket.lower,
            bracket_hi: bracket.upper,
            c_emp: bracket.distortion.clone(),
            gamma2: bracket.gamma2.clone(),
        }
    }
}

/// Level dimension, empirical distortion at depth `n` (or the override) and
/// the resulting bracket.
pub fn level_record(ifs: &IfsInstance, n: usize, tol: f64, c_override: Option<&Rational>) -> Result<LevelRecord> {
    let level = solve_level_dimension(ifs, n, tol)?;
    let (c, rigor) = match c_override {
        Some(c) => (c.clone(), Rigor::UserSupplied),
        None => (distortion_constant(ifs, n)?.c_emp, Rigor::Empirical),
    };
    let bracket = bracket_from_level(&level, &c, rigor, &ifs.gamma_upper)?;
    Ok(LevelRecord::new(&level, &bracket))
}

/// Comparison of the level-`N` dimension of the family with the first-level
/// dimension of the subsystem of level-`N` words containing a 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsystemDimensionReport {
    pub t: Rational,
    pub level: usize,
    pub d_n: f64,
    /// `d_{2N}`, when `2N` is within the level cap.
    pub d_2n: Option<f64>,
    /// First-level dimension `s_1` of the subsystem.
    pub s_1: f64,
    pub word_count: usize,
    /// `sum over subsystem words of ||f_u'||^{d_N}`.
    pub subsystem_sum_at_d_n: f64,
    /// `1 - 2^N 4^{-N d_N}`, the lower bound for that sum.
    pub removed_mass_bound: f64,
    /// Whether `1 - 2^N 4^{-N d_N} >= 1/2`, the condition under which
    /// `s_1 >= d_N - 1/(2N)` is derived.
    pub premise_holds: bool,
    pub lower_check: bool,
    pub upper_check: bool,
    pub sum_bound_check: bool,
    pub distortion: Rational,
    pub rigor: Rigor,
    /// `[s_1 - log C / (N log 4), s_1]`.
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    /// `|d_N - d_{2N}|`, an observable stand-in for the unknown `eps`.
    pub epsilon_proxy: Option<f64>,
    /// `eps + 1/(2N) + log C / (N log 4)` with the proxy for `eps`.
    pub error_bound: Option<f64>,
    pub violations: Vec<String>,
}

pub fn subsystem_dimension_report(t: &Rational, n: usize, tol: f64) -> Result<SubsystemDimensionReport> {
    subsystem_dimension_report_with(t, n, tol, None, crate::DEFAULT_MAX_LEVEL)
}

pub fn subsystem_dimension_report_with(
    t: &Rational,
    n: usize,
    tol: f64,
    c_override: Option<&Rational>,
    max_level: usize,
) -> Result<SubsystemDimensionReport> {
    if n == 0 {
        return Err(Error::Domain("subsystem level must be >= 1".into()));
    }
    if n > max_level {
        return Err(Error::Domain(format!("level {n} exceeds the cap {max_level}")));
    }
    let family = crate::moebius::make_family(t)?;
    let norms = word_norms(&family, n);
    let table = NormTable::from_norms(n, 3, &norms);
    let d_n = solve_table(&table, dimension_upper_limit(&family), tol)?.d_n;
    let d_2n = if 2 * n <= max_level {
        Some(solve_level_dimension(&family, 2 * n, tol)?.d_n)
    } else {
        None
    };

    let sub = build_subsystem(&SubsystemSpec::full(t.clone(), n))?;
    let s_1 = solve_level_dimension(&sub.ifs, 1, tol)?.d_n;

    // norms of the subsystem maps are the level-n norms of words containing 3
    let kept: Vec<Rational> = crate::words::enumerate(&[1, 2, 3], n)
        .zip(&norms)
        .filter(|(u, _)| u.contains(3))
        .map(|(_, q)| q.clone())
        .collect();
    let subsystem_sum_at_d_n = NormTable::from_norms(n, kept.len(), &kept).sum(d_n);
    let nf = n as f64;
    let removed_mass_bound = 1.0 - 2f64.powf(nf) * 4f64.powf(-nf * d_n);

    let (c, rigor) = match c_override {
        Some(c) => (c.clone(), Rigor::UserSupplied),
        None => (distortion_constant(&family, n)?.c_emp, Rigor::Empirical),
    };
    let log_c_term = c.ln_abs() / (nf * 4f64.ln());

    let lower_check = d_n - 1.0 / (2.0 * nf) <= s_1 + tol;
    let upper_check = s_1 <= d_n + tol;
    let sum_bound_check = subsystem_sum_at_d_n >= removed_mass_bound - 1e-12;
    let premise_holds = removed_mass_bound >= 0.5;

    let mut violations = Vec::new();
    if !upper_check {
        violations.push(format!("s_1 = {s_1} exceeds d_N = {d_n}"));
    }
    if !sum_bound_check {
        violations.push(format!(
            "subsystem sum {subsystem_sum_at_d_n} below 1 - 2^N 4^(-N d_N) = {removed_mass_bound}"
        ));
    }
    if premise_holds && !lower_check {
        violations.push(format!("s_1 = {s_1} below d_N - 1/(2N) = {}", d_n - 1.0 / (2.0 * nf)));
    }

    let epsilon_proxy = d_2n.map(|d| (d_n - d).abs());
    Ok(SubsystemDimensionReport {
        t: t.clone(),
        level: n,
        d_n,
        d_2n,
        s_1,
        word_count: sub.words.len(),
        subsystem_sum_at_d_n,
        removed_mass_bound,
        premise_holds,
        lower_check,
        upper_check,
        sum_bound_check,
        distortion: c,
        rigor,
        bracket_lo: s_1 - log_c_term,
        bracket_hi: s_1,
        epsilon_proxy,
        error_bound: epsilon_proxy.map(|e| e + 1.0 / (2.0 * nf) + log_c_term),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::{make_family, Interval};

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn two_similitudes(t: &Rational) -> IfsInstance {
        let ifs = make_family(t).unwrap();
        IfsInstance::new(ifs.maps[1..].to_vec(), ifs.invariant_interval).unwrap()
    }

    #[test]
    fn partition_sum_examples() {
        let ifs = make_family(&r(1, 1)).unwrap();
        assert!((partition_sum(&ifs, 1, 1.0).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(partition_sum(&ifs, 1, 0.0).unwrap(), 3.0);
        let pair = two_similitudes(&r(1, 1));
        assert!((partition_sum(&pair, 1, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((partition_sum(&pair, 5, 0.5).unwrap() - 1.0).abs() < 1e-13);
        assert!(partition_sum(&ifs, 0, 1.0).is_err());
        assert!(partition_sum(&ifs, 1, -0.5).is_err());
        assert!(partition_sum(&ifs, 1, f64::NAN).is_err());
    }

    #[test]
    fn pressure_at_zero_is_log_alphabet() {
        let ifs = make_family(&r(1, 1)).unwrap();
        for n in 1..=4 {
            let p = pressure(&ifs, n, 0.0).unwrap();
            assert!((p.value - 3f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn level_one_dimensions() {
        let pair = two_similitudes(&r(1, 1));
        let d = solve_level_dimension(&pair, 1, 1e-13).unwrap();
        assert!((d.d_n - 0.5).abs() < 1e-12);
        for t in [r(1, 2), r(1, 1), r(3, 1)] {
            let ifs = make_family(&t).unwrap();
            let d = solve_level_dimension(&ifs, 1, DEFAULT_TOLERANCE).unwrap();
            assert!((d.d_n - 3f64.ln() / 4f64.ln()).abs() < 1e-10);
            assert!(d.residual < DEFAULT_TOLERANCE);
        }
        let single = IfsInstance::new(
            vec![MoebiusMap::affine(r(1, 4), r(0, 1))],
            Interval::new(r(0, 1), r(1, 1)).unwrap(),
        )
        .unwrap();
        assert_eq!(solve_level_dimension(&single, 1, 1e-12).unwrap().d_n, 0.0);
    }

    #[test]
    fn non_contractive_system_is_rejected() {
        let ifs = IfsInstance::new(vec![MoebiusMap::identity()], Interval::new(r(0, 1), r(1, 1)).unwrap()).unwrap();
        assert!(matches!(solve_level_dimension(&ifs, 1, 1e-12), Err(Error::Precondition(_))));
        let ok = make_family(&r(1, 1)).unwrap();
        assert!(solve_level_dimension(&ok, 1, 0.0).is_err());
    }

    #[test]
    fn distortion_examples() {
        let ifs = make_family(&r(1, 1)).unwrap();
        let c1 = distortion_constant(&ifs, 1).unwrap();
        assert_eq!(c1.c_emp, r(25, 9));
        assert_eq!(c1.rigor, Rigor::Empirical);
        let c2 = distortion_constant(&ifs, 2).unwrap();
        assert!(c2.c_emp >= c1.c_emp);
        assert_eq!(distortion_constant(&two_similitudes(&r(1, 1)), 3).unwrap().c_emp, r(1, 1));
        assert!(distortion_constant(&ifs, 0).is_err());
    }

    #[test]
    fn bracket_examples() {
        let pair = two_similitudes(&r(1, 1));
        let b = dimension_bracket(&pair, 2, &r(1, 1), 1e-13).unwrap();
        assert_eq!(b.lower, b.upper);
        let ifs = make_family(&r(1, 1)).unwrap();
        let c = r(3, 1);
        let b4 = dimension_bracket(&ifs, 4, &c, 1e-12).unwrap();
        let b8 = dimension_bracket(&ifs, 8, &c, 1e-12).unwrap();
        assert!((b8.width() - b4.width() / 2.0).abs() < 1e-14);
        assert!(dimension_bracket(&ifs, 1, &r(1, 2), 1e-12).is_err());
    }

    #[test]
    fn bracket_at_four_contains_d8() {
        let ifs = make_family(&r(1, 1)).unwrap();
        let c = distortion_constant(&ifs, 4).unwrap().c_emp;
        let b4 = dimension_bracket(&ifs, 4, &c, 1e-12).unwrap();
        let d8 = solve_level_dimension(&ifs, 8, 1e-12).unwrap().d_n;
        assert!(b4.contains(d8, 1e-12), "{d8} not in {b4:?}");
    }

    #[test]
    fn subsystem_report_level_one_is_a_single_similitude() {
        let rep = subsystem_dimension_report(&r(1, 1), 1, 1e-12).unwrap();
        assert_eq!(rep.word_count, 1);
        assert_eq!(rep.s_1, 0.0);
        assert!(!rep.premise_holds);
        assert!(rep.upper_check);
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn subsystem_report_level_four() {
        let rep = subsystem_dimension_report(&r(1, 1), 4, 1e-12).unwrap();
        assert_eq!(rep.word_count, 81 - 16);
        assert!(rep.d_n - 1.0 / 8.0 <= rep.s_1 && rep.s_1 <= rep.d_n);
        let bound = 1.0 - 16.0 * 4f64.powf(-4.0 * rep.d_n);
        assert!((rep.removed_mass_bound - bound).abs() < 1e-15);
        // words over {1,2} have norm exactly 4^-N, so the bound is attained
        assert!((rep.subsystem_sum_at_d_n - bound).abs() < 1e-12);
        assert!(rep.epsilon_proxy.unwrap() >= 0.0);
        assert!(rep.violations.is_empty(), "{:?}", rep.violations);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::default();
        acc.add(1.0);
        for _ in 0..10 {
            acc.add(1e-16);
        }
        acc.add(-1.0);
        assert!((acc.value() - 1e-15).abs() < 1e-30);
    }
}
