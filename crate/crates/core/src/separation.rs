//! Exact overlap and relation search, the freeness certificate for `{A,B}^+`,
//! and finite-level separation metrics.
//!
//! All verdicts here are exact: matrices are bucketed by their canonical
//! rational entries and bucket members are equal by construction of the hash
//! map's `Eq`. The separation distance `delta_n` is an exact rational; only
//! `c_n = delta_n^(1/n)` is a float.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{family_interval, family_matrices, require_positive_parameter};
use crate::moebius::{Interval, Matrix2, MoebiusMap};
use crate::rational::Rational;
use crate::words::{for_each_product, for_each_product_upto, word_from_indices, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub t: Option<Rational>,
    pub level: usize,
    /// Distinct words with identical matrices.
    pub overlaps: Vec<(Word, Word)>,
    /// Number of words examined.
    pub searched: usize,
}

impl OverlapReport {
    pub fn is_empty(&self) -> bool {
        self.overlaps.is_empty()
    }
}

/// Coincidences `M_u = M_w` among distinct words of equal length `<= n`.
pub fn exact_overlap_search_in(gens: &[Matrix2], n: usize) -> Result<OverlapReport> {
    if n == 0 {
        return Err(Error::Domain("overlap search needs n >= 1".into()));
    }
    let mut overlaps = Vec::new();
    let mut searched = 0;
    for len in 1..=n {
        let mut buckets: HashMap<Matrix2, Vec<Word>> = HashMap::new();
        for_each_product(gens, len, |idx, m| {
            searched += 1;
            buckets.entry(m.clone()).or_default().push(word_from_indices(idx));
        });
        overlaps.extend(bucket_pairs(buckets.into_values(), |_, _| true));
    }
    overlaps.sort();
    Ok(OverlapReport { t: None, level: n, overlaps, searched })
}

pub fn exact_overlap_search(t: &Rational, n: usize) -> Result<OverlapReport> {
    require_positive_parameter(t)?;
    let mut rep = exact_overlap_search_in(&family_matrices(t), n)?;
    rep.t = Some(t.clone());
    Ok(rep)
}

fn bucket_pairs<I, F>(buckets: I, keep: F) -> Vec<(Word, Word)>
where
    I: IntoIterator<Item = Vec<Word>>,
    F: Fn(&Word, &Word) -> bool,
{
    let mut out = Vec::new();
    for mut words in buckets {
        if words.len() < 2 {
            continue;
        }
        words.sort();
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                if keep(&words[i], &words[j]) {
                    out.push((words[i].clone(), words[j].clone()));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MetricVariant {
    /// `max_{x in X'} |f_u(x) - f_w(x)|`.
    PointwiseOnX,
    /// Largest absolute entry difference of the literal matrices.
    MatrixEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub t: Option<Rational>,
    pub level: usize,
    /// Probe set `X'`; empty for the matrix metric.
    pub probes: Vec<Rational>,
    /// Minimum distance over all pairs of distinct words.
    pub delta_n: Rational,
    /// `delta_n^(1/n)`.
    pub c_n: f64,
    /// Minimum over pairs of words whose maps differ; `None` if no such pair.
    pub delta_n_unequal: Option<Rational>,
    pub metric_variant: MetricVariant,
    /// Pairs of distinct words at distance zero.
    pub zero_pairs: usize,
    pub pair_count: usize,
}

fn nth_root(delta: &Rational, n: usize) -> f64 {
    if delta.is_zero() {
        0.0
    } else {
        (delta.ln_abs() / n as f64).exp()
    }
}

/// Level-`n` products with a class id per distinct matrix.
fn level_products(gens: &[Matrix2], n: usize) -> (Vec<Matrix2>, Vec<usize>) {
    let mut mats = Vec::new();
    for_each_product(gens, n, |_, m| mats.push(m.clone()));
    let mut ids: HashMap<&Matrix2, usize> = HashMap::new();
    let classes = mats
        .iter()
        .map(|m| {
            let next = ids.len();
            *ids.entry(m).or_insert(next)
        })
        .collect();
    (mats, classes)
}

struct PairScan {
    delta: Option<Rational>,
    delta_unequal: Option<Rational>,
    zero_pairs: usize,
    pairs: usize,
}

fn scan_pairs<F>(count: usize, classes: &[usize], dist: F) -> PairScan
where
    F: Fn(usize, usize) -> Rational,
{
    let mut scan = PairScan { delta: None, delta_unequal: None, zero_pairs: 0, pairs: 0 };
    for i in 0..count {
        for j in i + 1..count {
            let d = dist(i, j);
            scan.pairs += 1;
            if d.is_zero() {
                scan.zero_pairs += 1;
            }
            if classes[i] != classes[j] && scan.delta_unequal.as_ref().map_or(true, |m| &d < m) {
                scan.delta_unequal = Some(d.clone());
            }
            if scan.delta.as_ref().map_or(true, |m| &d < m) {
                scan.delta = Some(d);
            }
        }
    }
    scan
}

/// Pointwise separation of level-`n` words on the probe set `X'`.
pub fn sesc_metric_in(gens: &[Matrix2], n: usize, probes: &[Rational]) -> Result<SeparationReport> {
    if n == 0 {
        return Err(Error::Domain("separation needs n >= 1".into()));
    }
    if probes.is_empty() {
        return Err(Error::Domain("probe set must be nonempty".into()));
    }
    let (mats, classes) = level_products(gens, n);
    let values = mats
        .iter()
        .map(|m| {
            let f = MoebiusMap::new(m.clone());
            probes.iter().map(|x| f.eval(x)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let scan = scan_pairs(values.len(), &classes, |i, j| {
        values[i]
            .iter()
            .zip(&values[j])
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap()
    });
    let delta = scan.delta.unwrap_or_else(Rational::zero);
    Ok(SeparationReport {
        t: None,
        level: n,
        probes: probes.to_vec(),
        c_n: nth_root(&delta, n),
        delta_n: delta,
        delta_n_unequal: scan.delta_unequal,
        metric_variant: MetricVariant::PointwiseOnX,
        zero_pairs: scan.zero_pairs,
        pair_count: scan.pairs,
    })
}

pub fn sesc_metric(t: &Rational, n: usize, probes: &[Rational]) -> Result<SeparationReport> {
    require_positive_parameter(t)?;
    let mut rep = sesc_metric_in(&family_matrices(t), n, probes)?;
    rep.t = Some(t.clone());
    Ok(rep)
}

/// Matrix-entry separation of level-`n` products: `delta_n` over all pairs of
/// distinct words (strong form) and `delta_n_unequal` over pairs with
/// different matrices.
pub fn diophantine_metric_in(gens: &[Matrix2], n: usize) -> Result<SeparationReport> {
    if n == 0 {
        return Err(Error::Domain("separation needs n >= 1".into()));
    }
    let (mats, classes) = level_products(gens, n);
    let scan = scan_pairs(mats.len(), &classes, |i, j| mats[i].max_entry_distance(&mats[j]));
    let delta = scan.delta.unwrap_or_else(Rational::zero);
    Ok(SeparationReport {
        t: None,
        level: n,
        probes: Vec::new(),
        c_n: nth_root(&delta, n),
        delta_n: delta,
        delta_n_unequal: scan.delta_unequal,
        metric_variant: MetricVariant::MatrixEntry,
        zero_pairs: scan.zero_pairs,
        pair_count: scan.pairs,
    })
}

pub fn diophantine_metric(t: &Rational, n: usize) -> Result<SeparationReport> {
    require_positive_parameter(t)?;
    let mut rep = diophantine_metric_in(&family_matrices(t), n)?;
    rep.t = Some(t.clone());
    Ok(rep)
}

/// Separation reports for levels `1..=max_n`, with the observed trend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationProfile {
    pub reports: Vec<SeparationReport>,
    /// `delta_n` never increased from one level to the next.
    pub nonincreasing: bool,
    /// Some level had `delta_n = 0`.
    pub collapsed: bool,
}

impl SeparationProfile {
    pub fn new(reports: Vec<SeparationReport>) -> Self {
        let nonincreasing = reports.windows(2).all(|w| w[1].delta_n <= w[0].delta_n);
        let collapsed = reports.iter().any(|r| r.delta_n.is_zero());
        SeparationProfile { reports, nonincreasing, collapsed }
    }
}

/// `R = [[4, 0], [4/3, 1]]`, `E = [[4, 0], [0, 1]]`, `F = [[4, 0], [1, 1]]`.
pub fn conjugator() -> Matrix2 {
    Matrix2::new(Rational::integer(4), Rational::zero(), Rational::new(4, 3), Rational::one())
}

pub fn matrix_e() -> Matrix2 {
    Matrix2::new(Rational::integer(4), Rational::zero(), Rational::zero(), Rational::one())
}

pub fn matrix_f() -> Matrix2 {
    Matrix2::new(Rational::integer(4), Rational::zero(), Rational::one(), Rational::one())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugacyCheck {
    pub r: Matrix2,
    /// `2 R A^-1 R^-1`.
    pub conjugate_a: Matrix2,
    /// `2 R B^-1 R^-1`.
    pub conjugate_b: Matrix2,
    pub e: Matrix2,
    pub f: Matrix2,
    pub det_e: Rational,
    pub det_f: Rational,
    pub holds: bool,
}

/// Verifies that `X -> 2 R X^-1 R^-1` sends `A` to `E` and `B` to `F`, which
/// turns freeness of `{A,B}^+` into freeness of `{E,F}^+`.
pub fn appendix_conjugacy_check() -> ConjugacyCheck {
    let [a, b, _] = family_matrices(&Rational::one());
    let r = conjugator();
    let r_inv = r.inverse().expect("R is invertible");
    let two = Rational::integer(2);
    let conj = |m: &Matrix2| (&(&r * &m.inverse().expect("generators are invertible")) * &r_inv).scale(&two);
    let conjugate_a = conj(&a);
    let conjugate_b = conj(&b);
    let (e, f) = (matrix_e(), matrix_f());
    let holds = conjugate_a == e && conjugate_b == f;
    ConjugacyCheck {
        det_e: e.det(),
        det_f: f.det(),
        r,
        conjugate_a,
        conjugate_b,
        e,
        f,
        holds,
    }
}

/// One sampled pair `(X, Y)` over `{E, F}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueCheck {
    /// Word over the letters `E`, `F`.
    pub x_word: String,
    pub y_word: String,
    /// Bottom-left entry of `X E`.
    pub xe_bottom_left: String,
    /// Bottom-left entry of `Y F`.
    pub yf_bottom_left: String,
    pub xe_residue: u8,
    pub yf_residue: u8,
    /// Both products have the form `[[4^k, 0], [m, 1]]` with integer `m`.
    pub triangular: bool,
}

impl ResidueCheck {
    pub fn ok(&self) -> bool {
        self.triangular && self.xe_residue == 0 && self.yf_residue == 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueReport {
    pub seed: u64,
    pub sample_count: usize,
    pub max_len: usize,
    pub checks: Vec<ResidueCheck>,
    pub violations: usize,
}

/// Product of a word over `{E, F}` given as a letter string.
pub fn ef_product(word: &str) -> Result<Matrix2> {
    let (e, f) = (matrix_e(), matrix_f());
    word.chars().try_fold(Matrix2::identity(), |acc, ch| match ch {
        'E' => Ok(&acc * &e),
        'F' => Ok(&acc * &f),
        _ => Err(Error::Parse(format!("letter {ch:?} is not E or F"))),
    })
}

/// `[[4^k, 0], [m, 1]]` with integer `m`.
fn has_triangular_form(m: &Matrix2, k: usize) -> bool {
    m.a == Rational::from_bigints(BigInt::from(4).pow(k as u32), BigInt::from(1))
        && m.b.is_zero()
        && m.c.is_integer()
        && m.d == 1
}

fn residue_mod4(x: &Rational) -> u8 {
    x.numer().mod_floor(&BigInt::from(4)).try_into().unwrap()
}

pub fn residue_check(x_word: &str, y_word: &str) -> Result<ResidueCheck> {
    let xe = ef_product(&format!("{x_word}E"))?;
    let yf = ef_product(&format!("{y_word}F"))?;
    let triangular = has_triangular_form(&xe, x_word.len() + 1) && has_triangular_form(&yf, y_word.len() + 1);
    Ok(ResidueCheck {
        x_word: x_word.to_string(),
        y_word: y_word.to_string(),
        xe_bottom_left: xe.c.numer().to_string(),
        yf_bottom_left: yf.c.numer().to_string(),
        xe_residue: residue_mod4(&xe.c),
        yf_residue: residue_mod4(&yf.c),
        triangular,
    })
}

/// Samples `sample_count` pairs of words of length `0..=max_len` over `{E, F}`
/// from a seeded generator and checks `XE(2,1) = 0` and `YF(2,1) = 1` mod 4,
/// so `XE != YF` for every pair.
pub fn residue_freeness_check(sample_count: usize, max_len: usize, seed: u64) -> Result<ResidueReport> {
    if max_len == 0 {
        return Err(Error::Domain("max_len must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::with_capacity(sample_count);
    for _ in 0..sample_count {
        let x_len = rng.gen_range(0..=max_len);
        let x = random_ef_word(&mut rng, x_len);
        let y_len = rng.gen_range(0..=max_len);
        let y = random_ef_word(&mut rng, y_len);
        checks.push(residue_check(&x, &y)?);
    }
    let violations = checks.iter().filter(|c| !c.ok()).count();
    Ok(ResidueReport { seed, sample_count, max_len, checks, violations })
}

/// Search for `f_{iX} = f_{jY}` with distinct leading symbols `i != j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSearchReport {
    pub t: Option<Rational>,
    pub depth: usize,
    /// Leading-symbol pairs whose first-level images intersect and were searched.
    pub searched_leads: Vec<(u8, u8)>,
    /// Leading-symbol pairs ruled out because their first-level images are disjoint.
    pub pruned_leads: Vec<(u8, u8)>,
    /// True when every pair involving symbol 3 could be pruned.
    pub third_symbol_pruned: bool,
    pub relations: Vec<(Word, Word)>,
    pub searched: usize,
}

/// Relations between words of lengths `1..=depth` (any combination of
/// lengths) starting with different symbols. Pairs of leading symbols whose
/// images of `interval` are disjoint cannot produce a relation and are skipped.
pub fn relation_search_in(gens: &[Matrix2], interval: &Interval, depth: usize) -> Result<RelationSearchReport> {
    if depth == 0 {
        return Err(Error::Domain("relation search needs depth >= 1".into()));
    }
    let images = gens
        .iter()
        .map(|g| MoebiusMap::new(g.clone()).image_interval(interval))
        .collect::<Result<Vec<_>>>()?;
    let mut searched_leads = Vec::new();
    let mut pruned_leads = Vec::new();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let pair = ((i + 1) as u8, (j + 1) as u8);
            if images[i].intersects(&images[j]) {
                searched_leads.push(pair);
            } else {
                pruned_leads.push(pair);
            }
        }
    }
    let third_symbol_pruned = gens.len() < 3
        || (0..gens.len())
            .filter(|&i| i != 2)
            .all(|i| pruned_leads.contains(&(i.min(2) as u8 + 1, i.max(2) as u8 + 1)));

    let mut buckets: HashMap<Matrix2, Vec<Word>> = HashMap::new();
    let mut searched = 0;
    for_each_product_upto(gens, depth, |idx, m| {
        let lead = (idx[0] + 1) as u8;
        if searched_leads.iter().any(|&(a, b)| a == lead || b == lead) {
            searched += 1;
            buckets.entry(m.clone()).or_default().push(word_from_indices(idx));
        }
    });
    let mut relations = bucket_pairs(buckets.into_values(), |u, w| {
        let (a, b) = (u.symbols()[0], w.symbols()[0]);
        searched_leads.contains(&(a.min(b), a.max(b)))
    });
    relations.sort();
    Ok(RelationSearchReport {
        t: None,
        depth,
        searched_leads,
        pruned_leads,
        third_symbol_pruned,
        relations,
        searched,
    })
}

/// Relations `A X = B Y` in `{A, B, C_t}^+` up to the given word length.
pub fn relation_search_abc(t: &Rational, depth: usize) -> Result<RelationSearchReport> {
    require_positive_parameter(t)?;
    let mut rep = relation_search_in(&family_matrices(t), &family_interval(t), depth)?;
    rep.t = Some(t.clone());
    Ok(rep)
}

/// Relations `A X = B Y` inside `{A, B}^+`.
pub fn relation_search_ab(depth: usize) -> Result<RelationSearchReport> {
    let [a, b, _] = family_matrices(&Rational::one());
    relation_search_in(&[a, b], &family_interval(&Rational::one()), depth)
}

/// Uniformly random word of length `len` over `{E, F}`.
pub fn random_ef_word<R: Rng>(rng: &mut R, len: usize) -> String {
    (0..len).map(|_| if rng.gen_bool(0.5) { 'E' } else { 'F' }).collect()
}
