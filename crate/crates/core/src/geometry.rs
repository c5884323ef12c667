//! Cylinder-interval geometry: order relations between cylinders, the three
//! ordering lemmas with exact checks, per-pair non-degeneracy certificates and
//! the search for a single parameter making all derived cylinders disjoint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{family_matrices, require_positive_parameter, Interval};
use crate::rational::Rational;
use crate::words::{cylinder, lex_compare, lex_sorted_binary_words, map_of_word, tilde_words, Word};

/// Largest `k` accepted by [`verify_lemma2`] unless raised explicitly.
pub const LEMMA2_DEFAULT_MAX_K: usize = 7;

/// Number of sample points of `(0, 2t/3]` used for the pointwise comparison.
pub const LEMMA2_GRID_POINTS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OrderRelation {
    /// `b < c`: the first interval lies strictly to the left.
    Prec,
    /// `a < c` and `b < d`, but the intervals touch or overlap.
    Precsim,
    /// Intersecting intervals not ordered as above.
    Overlap,
    /// Disjoint with the second interval on the left.
    Other,
}

/// `[a, b] ≺ [c, d]`.
pub fn prec(x: &Interval, y: &Interval) -> bool {
    x.right < y.left
}

/// `[a, b] ≾ [c, d]`.
pub fn precsim(x: &Interval, y: &Interval) -> bool {
    x.left < y.left && x.right < y.right
}

/// Classifies `(x, y)`; `Prec` takes priority over `Precsim`, which implies it.
pub fn classify(x: &Interval, y: &Interval) -> OrderRelation {
    if prec(x, y) {
        OrderRelation::Prec
    } else if precsim(x, y) {
        OrderRelation::Precsim
    } else if x.intersects(y) {
        OrderRelation::Overlap
    } else {
        OrderRelation::Other
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub v: Word,
    pub w: Word,
    /// Sample point for pointwise failures.
    pub x: Option<Rational>,
    pub relation: Option<OrderRelation>,
}

/// Outcome of a lemma check, shared by Lemmas 2 and 4.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: u8,
    pub k: usize,
    pub t: Rational,
    pub verdict: bool,
    pub pairs_checked: usize,
    pub counterexamples: Vec<Counterexample>,
    /// Lemma 4 only: relation of the extremal pair `(2^(k+1), 1^k)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extremal: Option<OrderRelation>,
}

fn v3_cylinders(words: &[Word], t: &Rational) -> Result<Vec<Interval>> {
    words.iter().map(|v| cylinder(&v.push(3), t)).collect()
}

pub fn verify_lemma2(k: usize, t: &Rational) -> Result<LemmaReport> {
    verify_lemma2_with(k, t, LEMMA2_DEFAULT_MAX_K)
}

/// For consecutive `v < w` in `{1,2}^k` compares `f_v < f_w` on the grid
/// `j/64 · 2t/3`, `j = 1..=64` (0 is the common fixed point and is excluded),
/// then checks `I_{v3} ≾ I_{w3}` exactly for every ordered pair.
pub fn verify_lemma2_with(k: usize, t: &Rational, max_k: usize) -> Result<LemmaReport> {
    require_positive_parameter(t)?;
    if k == 0 || k > max_k {
        return Err(Error::Domain(format!("k must lie in 1..={max_k}, got {k}")));
    }
    let words = lex_sorted_binary_words(k);
    let grid = Interval::new(Rational::zero(), Rational::new(2, 3) * t)?.grid(LEMMA2_GRID_POINTS);
    let mut counterexamples = Vec::new();
    let mut pairs_checked = 0;

    for pair in words.windows(2) {
        let (fv, fw) = (map_of_word(&pair[0], t)?, map_of_word(&pair[1], t)?);
        for x in &grid {
            if fv.eval(x)? >= fw.eval(x)? {
                counterexamples.push(Counterexample {
                    v: pair[0].clone(),
                    w: pair[1].clone(),
                    x: Some(x.clone()),
                    relation: None,
                });
            }
        }
    }

    let cyl = v3_cylinders(&words, t)?;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            pairs_checked += 1;
            if !precsim(&cyl[i], &cyl[j]) {
                counterexamples.push(Counterexample {
                    v: words[i].clone(),
                    w: words[j].clone(),
                    x: None,
                    relation: Some(classify(&cyl[i], &cyl[j])),
                });
            }
        }
    }
    Ok(LemmaReport {
        lemma: 2,
        k,
        t: t.clone(),
        verdict: counterexamples.is_empty(),
        pairs_checked,
        counterexamples,
        extremal: None,
    })
}

/// `3 / (1 - 4^-k)`, the supremum of parameters where the extremal Lemma 4
/// pair is disjoint.
pub fn lemma4_threshold(k: usize) -> Rational {
    Rational::integer(3) / (Rational::one() - Rational::integer(4).pow(-(k as i32)))
}

/// Checks `I_{v3} ≺ I_{w3}` for every `v` in `{1,2}^(k+1)` and `w` in `{1,2}^k`.
pub fn verify_lemma4(k: usize, t: &Rational) -> Result<LemmaReport> {
    require_positive_parameter(t)?;
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let long = lex_sorted_binary_words(k + 1);
    let short = lex_sorted_binary_words(k);
    let long_cyl = v3_cylinders(&long, t)?;
    let short_cyl = v3_cylinders(&short, t)?;
    let mut counterexamples = Vec::new();
    for (v, cv) in long.iter().zip(&long_cyl) {
        for (w, cw) in short.iter().zip(&short_cyl) {
            if !prec(cv, cw) {
                counterexamples.push(Counterexample {
                    v: v.clone(),
                    w: w.clone(),
                    x: None,
                    relation: Some(classify(cv, cw)),
                });
            }
        }
    }
    let extremal = classify(
        &cylinder(&Word::repeat(2, k + 1).push(3), t)?,
        &cylinder(&Word::repeat(1, k).push(3), t)?,
    );
    Ok(LemmaReport {
        lemma: 4,
        k,
        t: t.clone(),
        verdict: counterexamples.is_empty(),
        pairs_checked: long.len() * short.len(),
        counterexamples,
        extremal: Some(extremal),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma3Report {
    pub lemma: u8,
    pub v: Word,
    pub w: Word,
    /// `v = 2^m 1 u` and `w = 1^m 2 u` for this `m`, when the pair is consecutive.
    pub m: Option<usize>,
    pub t_max: Rational,
    pub resolution: Rational,
    pub found: bool,
    /// Smallest tested parameter with `I_{v3} ≺ I_{w3}`.
    pub threshold: Option<Rational>,
    /// Largest tested parameter below the threshold where the relation fails.
    pub last_failure: Option<Rational>,
    /// `c - b` for `I_{v3} = [a, b]`, `I_{w3} = [c, d]` at `t_max`; positive means disjoint.
    pub gap_at_t_max: Rational,
    pub persists_at_2t: Option<bool>,
    pub persists_at_4t: Option<bool>,
    /// For `m = 0`: whether `b - a < ab` with `[a, b] = I_{u3}` agrees with the
    /// direct check at the threshold and at the last failure.
    pub reduced_inequality_agrees: Option<bool>,
    pub relation_at_threshold: Option<OrderRelation>,
}

/// Splits `(v, w)` as `(2^m 1 u, 1^m 2 u)` if it has that shape.
pub fn consecutive_shape(v: &Word, w: &Word) -> Option<(usize, Word)> {
    let (vs, ws) = (v.symbols(), w.symbols());
    if vs.len() != ws.len() {
        return None;
    }
    let m = vs.iter().take_while(|&&s| s == 2).count();
    if m == vs.len() || vs[m] != 1 || ws.len() <= m {
        return None;
    }
    let ok = ws[..m].iter().all(|&s| s == 1) && ws[m] == 2 && vs[m + 1..] == ws[m + 1..];
    ok.then(|| (m, Word::new(vs[m + 1..].to_vec())))
}

fn lemma3_holds(v: &Word, w: &Word, t: &Rational) -> Result<bool> {
    Ok(prec(&cylinder(&v.push(3), t)?, &cylinder(&w.push(3), t)?))
}

fn reduced_inequality(u: &Word, t: &Rational) -> Result<bool> {
    let c = cylinder(&u.push(3), t)?;
    Ok(&c.right - &c.left < &c.left * &c.right)
}

/// Smallest witnessed `T` in `(0, t_max]` with `I_{v3} ≺ I_{w3}`.
///
/// Halves `t` from `t_max` until the relation fails, then bisects between the
/// last failure and the last success until they are within `resolution`.
pub fn lemma3_find_threshold(v: &Word, w: &Word, t_max: &Rational, resolution: &Rational) -> Result<Lemma3Report> {
    require_positive_parameter(t_max)?;
    if !resolution.is_positive() {
        return Err(Error::Domain("resolution must be positive".into()));
    }
    if v.is_empty() || lex_compare(v, w)? != std::cmp::Ordering::Less {
        return Err(Error::Domain(format!("need v < w in lexicographic order, got {v}, {w}")));
    }
    let shape = consecutive_shape(v, w);
    let top_v = cylinder(&v.push(3), t_max)?;
    let top_w = cylinder(&w.push(3), t_max)?;
    let gap_at_t_max = &top_w.left - &top_v.right;
    let mut report = Lemma3Report {
        lemma: 3,
        v: v.clone(),
        w: w.clone(),
        m: shape.as_ref().map(|s| s.0),
        t_max: t_max.clone(),
        resolution: resolution.clone(),
        found: false,
        threshold: None,
        last_failure: None,
        gap_at_t_max,
        persists_at_2t: None,
        persists_at_4t: None,
        reduced_inequality_agrees: None,
        relation_at_threshold: None,
    };
    if !prec(&top_v, &top_w) {
        return Ok(report);
    }

    let two = Rational::integer(2);
    let mut ok = t_max.clone();
    let mut fail = None;
    while &ok > resolution {
        let next = &ok / &two;
        if lemma3_holds(v, w, &next)? {
            ok = next;
        } else {
            fail = Some(next);
            break;
        }
    }
    if let Some(mut lo) = fail.clone() {
        while &(&ok - &lo) > resolution {
            let mid = (&ok + &lo) / &two;
            if lemma3_holds(v, w, &mid)? {
                ok = mid;
            } else {
                lo = mid;
            }
        }
        fail = Some(lo);
    }

    report.found = true;
    report.persists_at_2t = Some(lemma3_holds(v, w, &(&ok * &two))?);
    report.persists_at_4t = Some(lemma3_holds(v, w, &(&ok * Rational::integer(4)))?);
    report.relation_at_threshold =
        Some(classify(&cylinder(&v.push(3), &ok)?, &cylinder(&w.push(3), &ok)?));
    if let Some((0, u)) = &shape {
        let mut agrees = reduced_inequality(u, &ok)?;
        if let Some(lo) = &fail {
            agrees &= !reduced_inequality(u, lo)?;
        }
        report.reduced_inequality_agrees = Some(agrees);
    }
    report.threshold = Some(ok);
    report.last_failure = fail;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WindowKind {
    PerPairCertificate,
    CommonDisjoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterWindow {
    pub n: usize,
    pub t_lo: Rational,
    pub t_hi: Rational,
    pub kind: WindowKind,
}

/// `I_v ≺ I_w` at the stored parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWitness {
    pub v: Word,
    pub w: Word,
    pub t: Rational,
    pub relation: OrderRelation,
}

impl PairWitness {
    /// Recomputes the relation at the stored parameter.
    pub fn recheck(&self) -> Result<bool> {
        Ok(classify(&cylinder(&self.v, &self.t)?, &cylinder(&self.w, &self.t)?) == self.relation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub n: usize,
    pub grid: Vec<Rational>,
    pub complete: bool,
    pub pair_count: usize,
    /// Hull of the grid when the certificate is complete.
    pub window: Option<ParameterWindow>,
    pub witnesses: Vec<PairWitness>,
    /// Pairs with no disjointness witness on the grid.
    pub missing: Vec<(Word, Word)>,
}

/// For every pair of distinct derived words `v3`, `w3` with `|v|, |w| <= n-1`,
/// looks for a grid parameter where the two cylinders are disjoint.
pub fn nondegeneracy_certificate(n: usize, t_grid: &[Rational]) -> Result<CertificateReport> {
    if n < 2 {
        return Err(Error::Domain("certificate needs n >= 2".into()));
    }
    for t in t_grid {
        require_positive_parameter(t)?;
    }
    let words = tilde_words(n);
    let cyls = t_grid
        .iter()
        .map(|t| words.iter().map(|u| cylinder(u, t)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let mut witnesses = Vec::new();
    let mut missing = Vec::new();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let found = t_grid.iter().zip(&cyls).find_map(|(t, c)| {
                let (first, second) = if prec(&c[i], &c[j]) {
                    (i, j)
                } else if prec(&c[j], &c[i]) {
                    (j, i)
                } else {
                    return None;
                };
                Some(PairWitness {
                    v: words[first].clone(),
                    w: words[second].clone(),
                    t: t.clone(),
                    relation: OrderRelation::Prec,
                })
            });
            match found {
                Some(wit) => witnesses.push(wit),
                None => missing.push((words[i].clone(), words[j].clone())),
            }
        }
    }
    let complete = !t_grid.is_empty() && missing.is_empty();
    let window = complete.then(|| ParameterWindow {
        n,
        t_lo: t_grid.iter().min().unwrap().clone(),
        t_hi: t_grid.iter().max().unwrap().clone(),
        kind: WindowKind::PerPairCertificate,
    });
    Ok(CertificateReport {
        n,
        grid: t_grid.to_vec(),
        complete,
        pair_count: words.len() * (words.len() - 1) / 2,
        window,
        witnesses,
        missing,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommonDisjointReport {
    pub n: usize,
    pub t_lo: Rational,
    pub t_hi: Rational,
    pub resolution: Rational,
    pub points_checked: usize,
    pub found: bool,
    /// Longest run of consecutive grid points where all cylinders are disjoint.
    pub window: Option<ParameterWindow>,
    /// Grid point with the fewest adjacent overlaps (first one on ties).
    pub best_t: Rational,
    /// Intersecting cylinder pairs at `best_t`.
    pub violating_pairs: Vec<(Word, Word)>,
}

/// Number of neighbouring pairs that intersect after sorting by left endpoint.
fn adjacent_overlaps(cyl: &[Interval]) -> usize {
    let mut sorted: Vec<&Interval> = cyl.iter().collect();
    sorted.sort_by(|x, y| x.left.cmp(&y.left));
    sorted.windows(2).filter(|p| p[0].right >= p[1].left).count()
}

fn derived_cylinders(words: &[Word], t: &Rational) -> Result<Vec<Interval>> {
    let gens = family_matrices(t);
    let iv = crate::moebius::family_interval(t);
    words
        .iter()
        .map(|u| {
            let m = crate::words::matrix_of_word_in(u, &gens)?;
            crate::moebius::MoebiusMap::new(m).image_interval(&iv)
        })
        .collect()
}

/// Scans `t = t_lo + j·resolution` up to `t_hi` for a parameter where all
/// cylinders of the derived level-`n` system are pairwise disjoint.
pub fn find_common_disjoint_parameter(
    n: usize,
    t_lo: &Rational,
    t_hi: &Rational,
    resolution: &Rational,
) -> Result<CommonDisjointReport> {
    if n < 2 {
        return Err(Error::Domain("search needs n >= 2".into()));
    }
    require_positive_parameter(t_lo)?;
    if t_hi < t_lo {
        return Err(Error::Domain(format!("empty range [{t_lo}, {t_hi}]")));
    }
    if t_hi != t_lo && !resolution.is_positive() {
        return Err(Error::Domain("resolution must be positive".into()));
    }
    let words = tilde_words(n);
    let mut points = vec![t_lo.clone()];
    if t_hi != t_lo {
        let mut t = t_lo + resolution;
        while &t <= t_hi {
            points.push(t.clone());
            t = &t + resolution;
        }
    }
    let scores = points
        .iter()
        .map(|t| derived_cylinders(&words, t).map(|c| adjacent_overlaps(&c)))
        .collect::<Result<Vec<_>>>()?;

    let mut best_run: Option<(usize, usize)> = None;
    let mut start = None;
    for (i, &s) in scores.iter().enumerate() {
        if s == 0 {
            let st = *start.get_or_insert(i);
            if best_run.map_or(true, |(a, b)| i - st > b - a) {
                best_run = Some((st, i));
            }
        } else {
            start = None;
        }
    }
    let best = (0..scores.len()).min_by_key(|&i| scores[i]).unwrap();
    let best_t = points[best].clone();
    let cyl = derived_cylinders(&words, &best_t)?;
    let mut violating_pairs = Vec::new();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            if cyl[i].intersects(&cyl[j]) {
                violating_pairs.push((words[i].clone(), words[j].clone()));
            }
        }
    }
    Ok(CommonDisjointReport {
        n,
        t_lo: t_lo.clone(),
        t_hi: t_hi.clone(),
        resolution: resolution.clone(),
        points_checked: points.len(),
        found: best_run.is_some(),
        window: best_run.map(|(a, b)| ParameterWindow {
            n,
            t_lo: points[a].clone(),
            t_hi: points[b].clone(),
            kind: WindowKind::CommonDisjoint,
        }),
        best_t,
        violating_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn iv(a: Rational, b: Rational) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn classification_examples() {
        let x = iv(r(0, 1), r(1, 1));
        assert_eq!(classify(&x, &iv(r(2, 1), r(3, 1))), OrderRelation::Prec);
        assert_eq!(classify(&x, &iv(r(1, 2), r(3, 1))), OrderRelation::Precsim);
        assert_eq!(classify(&x, &iv(r(1, 1), r(3, 1))), OrderRelation::Precsim);
        assert_eq!(classify(&x, &iv(r(0, 1), r(1, 2))), OrderRelation::Overlap);
        assert_eq!(classify(&x, &iv(r(-2, 1), r(-1, 1))), OrderRelation::Other);
    }

    #[test]
    fn lemma2_examples() {
        let f21 = map_of_word(&w("21"), &r(1, 1)).unwrap();
        let f12 = map_of_word(&w("12"), &r(1, 1)).unwrap();
        assert_eq!(f21.eval(&r(1, 1)).unwrap(), r(1, 32));
        assert_eq!(f12.eval(&r(1, 1)).unwrap(), r(1, 20));
        for k in 1..=4 {
            let rep = verify_lemma2(k, &r(1, 1)).unwrap();
            assert!(rep.verdict, "{:?}", rep.counterexamples);
            assert_eq!(rep.pairs_checked, (1 << k) * ((1 << k) - 1) / 2);
            let lo = cylinder(&Word::repeat(1, k).push(3), &r(1, 1)).unwrap();
            let hi = cylinder(&Word::repeat(2, k).push(3), &r(1, 1)).unwrap();
            assert!(precsim(&lo, &hi));
        }
        assert!(verify_lemma2(8, &r(1, 1)).is_err());
        assert!(verify_lemma2(2, &r(0, 1)).is_err());
    }

    #[test]
    fn lemma4_threshold_values() {
        assert_eq!(lemma4_threshold(1), r(4, 1));
        assert_eq!(lemma4_threshold(2), r(16, 5));
        assert!(verify_lemma4(2, &r(29, 10)).unwrap().verdict);
        let at5 = verify_lemma4(1, &r(5, 1)).unwrap();
        assert!(!at5.verdict);
        assert_ne!(at5.extremal, Some(OrderRelation::Prec));
    }

    #[test]
    fn lemma4_is_sharp() {
        let eps = Rational::pow10_neg(6);
        for k in 1..=3 {
            let th = lemma4_threshold(k);
            let below = verify_lemma4(k, &(&th - &eps)).unwrap();
            let above = verify_lemma4(k, &(&th + &eps)).unwrap();
            assert!(below.verdict && below.extremal == Some(OrderRelation::Prec));
            assert!(!above.verdict && above.extremal != Some(OrderRelation::Prec));
        }
    }

    #[test]
    fn consecutive_shapes() {
        assert_eq!(consecutive_shape(&w("1"), &w("2")), Some((0, w(""))));
        assert_eq!(consecutive_shape(&w("21"), &w("12")), Some((1, w(""))));
        assert_eq!(consecutive_shape(&w("12"), &w("22")), Some((0, w("2"))));
        assert_eq!(consecutive_shape(&w("11"), &w("22")), None);
        assert_eq!(consecutive_shape(&w("22"), &w("11")), None);
    }

    #[test]
    fn lemma3_threshold_for_first_pair_is_one_half() {
        // u empty: b - a = t/6 < t^2/3 = ab exactly when t > 1/2
        let rep = lemma3_find_threshold(&w("1"), &w("2"), &r(64, 1), &Rational::pow10_neg(9)).unwrap();
        assert!(rep.found);
        let th = rep.threshold.clone().unwrap();
        let lo = rep.last_failure.clone().unwrap();
        assert!(lo <= r(1, 2) && r(1, 2) < th);
        assert!(&th - &lo <= Rational::pow10_neg(9));
        assert_eq!(rep.reduced_inequality_agrees, Some(true));
        assert_eq!(rep.persists_at_2t, Some(true));
        assert_eq!(rep.persists_at_4t, Some(true));
        assert!(!lemma3_holds(&w("1"), &w("2"), &r(1, 2)).unwrap());
    }

    #[test]
    fn lemma3_geometric_family() {
        // u = 2^l: threshold 4^l / 2
        for l in 1..=3usize {
            let u = Word::repeat(2, l);
            let v = Word::new(vec![1]).concat(&u);
            let wv = Word::new(vec![2]).concat(&u);
            let rep = lemma3_find_threshold(&v, &wv, &r(1000, 1), &Rational::pow10_neg(6)).unwrap();
            let exact = Rational::integer(4).pow(l as i32) / Rational::integer(2);
            assert!(rep.last_failure.unwrap() <= exact && exact < rep.threshold.unwrap());
        }
    }

    #[test]
    fn lemma3_not_found_reports_gap() {
        let rep = lemma3_find_threshold(&w("1"), &w("2"), &r(1, 4), &r(1, 100)).unwrap();
        assert!(!rep.found);
        assert!(rep.gap_at_t_max.is_negative() || rep.gap_at_t_max.is_zero());
        assert!(lemma3_find_threshold(&w("2"), &w("1"), &r(1, 1), &r(1, 100)).is_err());
    }

    #[test]
    fn certificate_n2() {
        let rep = nondegeneracy_certificate(2, &[r(1, 1)]).unwrap();
        assert!(rep.complete);
        assert_eq!(rep.pair_count, 3);
        assert!(rep.witnesses.iter().all(|p| p.recheck().unwrap()));
        let empty = nondegeneracy_certificate(2, &[]).unwrap();
        assert!(!empty.complete && empty.window.is_none());
    }

    #[test]
    fn certificate_n3_small_grid() {
        let grid = [r(1, 2), r(1, 1), r(2, 1), r(10, 1), r(50, 1)];
        let rep = nondegeneracy_certificate(3, &grid).unwrap();
        assert!(rep.complete, "{:?}", rep.missing);
        assert_eq!(rep.pair_count, 21);
        let win = rep.window.unwrap();
        assert_eq!((win.t_lo, win.t_hi), (r(1, 2), r(50, 1)));
    }

    #[test]
    fn common_disjoint_n2_at_one() {
        let rep = find_common_disjoint_parameter(2, &r(1, 1), &r(1, 1), &r(0, 1)).unwrap();
        assert!(rep.found);
        assert_eq!(rep.points_checked, 1);
        assert!(rep.violating_pairs.is_empty());
        let c = derived_cylinders(&tilde_words(2), &r(1, 1)).unwrap();
        assert_eq!(c[0], iv(r(1, 2), r(2, 3)));
        // f1(1/2) = 1/12, f1(2/3) = 1/10
        assert_eq!(c[1], iv(r(1, 12), r(1, 10)));
        assert_eq!(c[2], iv(r(1, 8), r(1, 6)));
    }

    #[test]
    fn common_disjoint_reports_best_failure() {
        // at t = 1/4 the pair 13, 23 overlaps
        let rep = find_common_disjoint_parameter(2, &r(1, 4), &r(1, 4), &r(1, 1)).unwrap();
        assert!(!rep.found);
        assert_eq!(rep.violating_pairs, vec![(w("13"), w("23"))]);
    }

    #[test]
    fn adjacent_scan_matches_all_pairs() {
        let words = tilde_words(4);
        for t in [r(1, 3), r(1, 1), r(5, 2), r(7, 1)] {
            let c = derived_cylinders(&words, &t).unwrap();
            let any = (0..c.len()).any(|i| (i + 1..c.len()).any(|j| c[i].intersects(&c[j])));
            assert_eq!(any, adjacent_overlaps(&c) > 0);
        }
    }
}
