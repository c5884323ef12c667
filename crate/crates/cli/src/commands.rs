use std::str::FromStr;

use clap::{Args, ValueEnum};
use ifslab::attractor::{self, BoxCountEstimate, CoverMode, MeasureEstimate};
use ifslab::geometry::{self, LemmaReport};
use ifslab::pressure::{self, LevelRecord};
use ifslab::separation::{self, SeparationProfile, SeparationReport};
use ifslab::words::{self, SubsystemSpec, SubsystemVariant};
use ifslab::{make_family, IfsInstance, Interval, Matrix2, MoebiusMap, Rational, Word};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Context, Failure, Outcome};

/// Largest word count used to pick a bracket level automatically.
const AUTO_WORD_BUDGET: usize = 2_000_000;

fn to_value<T: Serialize>(x: &T) -> Result<Value, Failure> {
    serde_json::to_value(x).map_err(|e| Failure::Internal(e.to_string()))
}

/// `full:N` or `tilde:N`.
#[derive(Clone, Debug, Serialize)]
#[serde(into = "String")]
pub struct SubsystemArg {
    pub variant: SubsystemVariant,
    pub level: usize,
}

impl From<SubsystemArg> for String {
    fn from(s: SubsystemArg) -> String {
        let tag = match s.variant {
            SubsystemVariant::FullLevelNContaining3 => "full",
            SubsystemVariant::TildeV3 => "tilde",
        };
        format!("{tag}:{}", s.level)
    }
}

impl FromStr for SubsystemArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (tag, n) = s.split_once(':').ok_or("expected full:N or tilde:N")?;
        let level = n.parse().map_err(|_| format!("bad level {n:?}"))?;
        let variant = match tag {
            "full" => SubsystemVariant::FullLevelNContaining3,
            "tilde" => SubsystemVariant::TildeV3,
            _ => return Err(format!("unknown subsystem {tag:?}, expected full or tilde")),
        };
        Ok(SubsystemArg { variant, level })
    }
}

impl SubsystemArg {
    fn spec(&self, t: &Rational) -> SubsystemSpec {
        SubsystemSpec { t: t.clone(), level: self.level, variant: self.variant }
    }
}

/// Matrices `a,b,c,d` separated by `;`, e.g. `1/4,0,0,1;1/4,3/4,0,1`.
#[derive(Clone, Debug, Serialize)]
#[serde(into = "String")]
pub struct MapsArg(pub Vec<Matrix2>);

impl From<MapsArg> for String {
    fn from(m: MapsArg) -> String {
        m.0.iter()
            .map(|x| x.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl FromStr for MapsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(';')
            .map(|m| {
                let e: Vec<Rational> = m.split(',').map(|x| x.parse().map_err(|e| format!("{e}"))).collect::<Result<_, _>>()?;
                match <[Rational; 4]>::try_from(e) {
                    Ok([a, b, c, d]) => Ok(Matrix2::new(a, b, c, d)),
                    Err(_) => Err(format!("map {m:?} needs four entries a,b,c,d")),
                }
            })
            .collect::<Result<_, _>>()
            .map(MapsArg)
    }
}

/// The family at `t`, a derived subsystem, or user-supplied maps.
fn select_system(
    ctx: &Context,
    maps: &Option<MapsArg>,
    interval: &Option<Vec<Rational>>,
    subsystem: &Option<SubsystemArg>,
) -> Result<(IfsInstance, String), Failure> {
    if let Some(MapsArg(ms)) = maps {
        let iv = match interval.as_deref() {
            Some([a, b]) => Interval::new(a.clone(), b.clone())?,
            Some(_) => return Err(Failure::Usage("--interval takes two endpoints".into())),
            None => Interval::new(Rational::zero(), Rational::one())?,
        };
        let ifs = IfsInstance::new(ms.iter().cloned().map(MoebiusMap::new).collect(), iv)?;
        return Ok((ifs, "user".into()));
    }
    match subsystem {
        Some(s) => {
            ctx.cap("subsystem level", s.level)?;
            let sub = words::build_subsystem(&s.spec(&ctx.t))?;
            Ok((sub.ifs, String::from(s.clone())))
        }
        None => Ok((make_family(&ctx.t)?, "family".into())),
    }
}

fn check_levels(ctx: &Context, levels: &[usize]) -> Result<(), Failure> {
    if levels.is_empty() {
        return Err(Failure::Usage("--levels must be nonempty".into()));
    }
    for &n in levels {
        if n == 0 {
            return Err(Failure::Usage("levels start at 1".into()));
        }
        ctx.cap("level", n)?;
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct DimArgs {
    /// Levels n at which d_n is solved.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    pub levels: Vec<usize>,
    /// Also analyse a derived subsystem: full:N or tilde:N.
    #[arg(long)]
    pub subsystem: Option<SubsystemArg>,
    /// Distortion constant to use instead of the empirical one.
    #[arg(long = "distortion")]
    pub distortion: Option<Rational>,
}

pub fn dim(ctx: &Context, a: &DimArgs) -> Result<Outcome, Failure> {
    check_levels(ctx, &a.levels)?;
    if let Some(c) = &a.distortion {
        if *c < 1 {
            return Err(Failure::Usage("--distortion must be >= 1".into()));
        }
    }
    let family = make_family(&ctx.t)?;
    let records = a
        .levels
        .iter()
        .map(|&n| pressure::level_record(&family, n, ctx.tol, a.distortion.as_ref()))
        .collect::<Result<Vec<LevelRecord>, _>>()?;
    let mut csv = String::from("system,level,d_n,residual,bracket_lo,bracket_hi,C_emp,gamma2\n");
    let push_rows = |csv: &mut String, system: &str, rows: &[LevelRecord]| {
        for r in rows {
            csv.push_str(&format!(
                "{system},{},{},{},{},{},{},{}\n",
                r.level, r.d_n, r.residual, r.bracket_lo, r.bracket_hi, r.c_emp, r.gamma2
            ));
        }
    };
    push_rows(&mut csv, "family", &records);

    let mut violations = Vec::new();
    if let Some(c) = &a.distortion {
        // the true constant dominates every finite-depth observation
        let depth = (*a.levels.iter().max().unwrap()).min(6);
        let seen = pressure::distortion_constant(&family, depth)?.c_emp;
        if *c < seen {
            violations.push(format!("--distortion {c} is below the distortion {seen} observed at depth {depth}"));
        }
    }
    let subsystem = match &a.subsystem {
        None => Value::Null,
        Some(s) if s.variant == SubsystemVariant::FullLevelNContaining3 => {
            let rep = pressure::subsystem_dimension_report_with(
                &ctx.t,
                s.level,
                ctx.tol,
                a.distortion.as_ref(),
                ctx.max_level,
            )?;
            violations.extend(rep.violations.iter().cloned());
            csv.push_str(&format!(
                "# subsystem {}: s_1={} d_N={} lower={} premise_holds={}\n",
                String::from(s.clone()),
                rep.s_1,
                rep.d_n,
                rep.d_n - 1.0 / (2.0 * s.level as f64),
                rep.premise_holds
            ));
            to_value(&rep)?
        }
        Some(s) => {
            ctx.cap("subsystem level", s.level)?;
            let sub = words::build_subsystem(&s.spec(&ctx.t))?;
            let rows = a
                .levels
                .iter()
                .map(|&n| pressure::level_record(&sub.ifs, n, ctx.tol, a.distortion.as_ref()))
                .collect::<Result<Vec<LevelRecord>, _>>()?;
            push_rows(&mut csv, &String::from(s.clone()), &rows);
            json!({ "spec": s, "words": sub.words, "levels": rows })
        }
    };
    Ok(Outcome {
        result: json!({ "t": ctx.t, "levels": records, "subsystem": subsystem }),
        csv,
        violations,
    })
}

#[derive(Args, Debug, Serialize)]
pub struct PressureArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    pub levels: Vec<usize>,
    /// Exponents s.
    #[arg(long = "s", value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
    pub s: Vec<f64>,
    /// Use s = j/grid for j = 0..=grid instead of --s.
    #[arg(long)]
    pub grid: Option<usize>,
}

pub fn pressure(ctx: &Context, a: &PressureArgs) -> Result<Outcome, Failure> {
    check_levels(ctx, &a.levels)?;
    let exps: Vec<f64> = match a.grid {
        Some(0) => return Err(Failure::Usage("--grid must be >= 1".into())),
        Some(g) => (0..=g).map(|j| j as f64 / g as f64).collect(),
        None => a.s.clone(),
    };
    if exps.iter().any(|s| !(*s >= 0.0)) {
        return Err(Failure::Usage("exponents must be >= 0".into()));
    }
    let family = make_family(&ctx.t)?;
    let mut rows = Vec::new();
    let mut csv = String::from("level,s,partition_sum,pressure\n");
    for &n in &a.levels {
        let table = pressure::NormTable::new(&family, n);
        for &s in &exps {
            let z = table.sum(s);
            let p = z.ln() / n as f64;
            csv.push_str(&format!("{n},{s},{z},{p}\n"));
            rows.push(json!({ "level": n, "s": s, "partition_sum": z, "pressure": p }));
        }
    }
    Ok(Outcome { result: json!({ "t": ctx.t, "rows": rows }), csv, violations: vec![] })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricChoice {
    Pointwise,
    Matrix,
    Both,
}

#[derive(Args, Debug, Serialize)]
pub struct SeparationArgs {
    /// Largest level; every level 1..=n is reported.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Probe points; defaults to 0, t/3 and 2t/3.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub probes: Option<Vec<Rational>>,
    #[arg(long, value_enum, default_value_t = MetricChoice::Both)]
    pub metric: MetricChoice,
}

#[derive(Serialize)]
struct SeparationRecord<'a> {
    t: &'a Rational,
    n: usize,
    overlaps: &'a [(Word, Word)],
    #[serde(flatten)]
    report: &'a SeparationReport,
}

pub fn separation(ctx: &Context, a: &SeparationArgs) -> Result<Outcome, Failure> {
    if a.n == 0 {
        return Err(Failure::Usage("--n must be >= 1".into()));
    }
    ctx.cap("n", a.n)?;
    let t = &ctx.t;
    let probes = a.probes.clone().unwrap_or_else(|| {
        vec![Rational::zero(), t / Rational::integer(3), Rational::new(2, 3) * t]
    });
    let mut overlaps = Vec::new();
    let mut pointwise = Vec::new();
    let mut matrix = Vec::new();
    for n in 1..=a.n {
        overlaps.push(separation::exact_overlap_search(t, n)?);
        if a.metric != MetricChoice::Matrix {
            pointwise.push(separation::sesc_metric(t, n, &probes)?);
        }
        if a.metric != MetricChoice::Pointwise {
            matrix.push(separation::diophantine_metric(t, n)?);
        }
    }
    let mut records = Vec::new();
    let mut csv = String::from("level,metric_variant,delta_n,c_n,delta_n_unequal,zero_pairs,overlaps\n");
    for rep in pointwise.iter().chain(&matrix) {
        let ov = &overlaps[rep.level - 1].overlaps;
        records.push(to_value(&SeparationRecord { t, n: rep.level, overlaps: ov, report: rep })?);
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            rep.level,
            to_value(&rep.metric_variant)?.as_str().unwrap_or_default(),
            rep.delta_n,
            rep.c_n,
            rep.delta_n_unequal.as_ref().map(|d| d.to_string()).unwrap_or_default(),
            rep.zero_pairs,
            ov.len()
        ));
    }
    let trend = |reps: Vec<SeparationReport>| -> Result<Value, Failure> {
        if reps.is_empty() {
            return Ok(Value::Null);
        }
        let p = SeparationProfile::new(reps);
        Ok(json!({ "nonincreasing": p.nonincreasing, "collapsed": p.collapsed }))
    };
    Ok(Outcome {
        result: json!({
            "t": t,
            "probes": probes,
            "records": records,
            "pointwise_trend": trend(pointwise)?,
            "matrix_trend": trend(matrix)?,
        }),
        csv,
        violations: vec![],
    })
}

#[derive(Args, Debug, Serialize)]
pub struct FreenessArgs {
    /// Word length for the relation and overlap searches.
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    /// Word length for the relation search inside {A, B}.
    #[arg(long, default_value_t = 8)]
    pub ab_depth: usize,
    /// Random (X, Y) pairs for the residue check.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Longest sampled word over {E, F}.
    #[arg(long, default_value_t = 20)]
    pub max_len: usize,
}

pub fn freeness(ctx: &Context, a: &FreenessArgs) -> Result<Outcome, Failure> {
    ctx.cap("depth", a.depth)?;
    ctx.cap("ab-depth", a.ab_depth)?;
    let conj = separation::appendix_conjugacy_check();
    let residues = separation::residue_freeness_check(a.samples, a.max_len, ctx.seed)?;
    let relations = separation::relation_search_abc(&ctx.t, a.depth)?;
    let ab = separation::relation_search_ab(a.ab_depth)?;
    let overlaps = separation::exact_overlap_search(&ctx.t, a.depth)?;

    let mut violations = Vec::new();
    if !conj.holds {
        violations.push("conjugacy 2RA^-1R^-1 = E, 2RB^-1R^-1 = F fails".to_string());
    }
    if residues.violations > 0 {
        violations.push(format!("{} residue violations", residues.violations));
    }
    if !ab.relations.is_empty() {
        violations.push(format!("relation in {{A,B}}+: {:?}", ab.relations[0]));
    }
    let mut csv = String::from("x_word,y_word,xe_bottom_left,yf_bottom_left,xe_residue,yf_residue,triangular\n");
    for c in &residues.checks {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.x_word, c.y_word, c.xe_bottom_left, c.yf_bottom_left, c.xe_residue, c.yf_residue, c.triangular
        ));
    }
    let ok = |b: bool| if b { "ok" } else { "failed" };
    Ok(Outcome {
        result: json!({
            "t": ctx.t,
            "overlaps": relations.relations,
            "conjugacy": ok(conj.holds),
            "residues": ok(residues.violations == 0),
            "conjugacy_check": conj,
            "residue_check": residues,
            "relation_search": relations,
            "ab_relation_search": ab,
            "overlap_search": overlaps,
        }),
        csv,
        violations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaChoice {
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
    #[value(name = "3")]
    #[serde(rename = "3")]
    Three,
    #[value(name = "4")]
    #[serde(rename = "4")]
    Four,
    Cert,
    All,
}

#[derive(Args, Debug, Serialize)]
pub struct LemmasArgs {
    #[arg(long, value_enum, default_value_t = LemmaChoice::All)]
    pub lemma: LemmaChoice,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Lemma 3 pair; defaults to every consecutive pair of length k.
    #[arg(long)]
    pub v: Option<Word>,
    #[arg(long)]
    pub w: Option<Word>,
    /// Upper end of the lemma 3 search.
    #[arg(long, default_value = "64")]
    pub t_max: Rational,
    /// Lemma 3 bisection resolution.
    #[arg(long, default_value = "1/1000")]
    pub resolution: Rational,
    /// Level of the certificate.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Certificate parameter grid.
    #[arg(long, value_delimiter = ',', default_value = "1/2,1,2,4,10,50,200")]
    pub grid: Vec<Rational>,
}

fn lemma_csv_row(r: &LemmaReport) -> String {
    format!("{},{},{},{},{},{}\n", r.lemma, r.k, r.t, r.verdict, r.pairs_checked, r.counterexamples.len())
}

pub fn lemmas(ctx: &Context, a: &LemmasArgs) -> Result<Outcome, Failure> {
    ctx.cap("k", a.k)?;
    let want = |c: LemmaChoice| a.lemma == c || a.lemma == LemmaChoice::All;
    let t = &ctx.t;
    let mut reports = Vec::new();
    let mut violations = Vec::new();
    // for lemma 3 rows, t is the witnessed threshold of the pair
    let mut csv = String::from("lemma,k,t,verdict,pairs_checked,counterexamples\n");

    if want(LemmaChoice::Two) {
        let rep = geometry::verify_lemma2_with(a.k, t, ctx.max_level)?;
        if !rep.verdict {
            violations.push(format!("lemma 2 order fails at k = {}, t = {t}", a.k));
        }
        csv.push_str(&lemma_csv_row(&rep));
        reports.push(to_value(&rep)?);
    }
    if want(LemmaChoice::Three) {
        let pairs = match (&a.v, &a.w) {
            (Some(v), Some(w)) => vec![(v.clone(), w.clone())],
            (None, None) => {
                let ws = words::lex_sorted_binary_words(a.k);
                ws.windows(2).map(|p| (p[0].clone(), p[1].clone())).collect()
            }
            _ => return Err(Failure::Usage("--v and --w go together".into())),
        };
        let found = pairs
            .iter()
            .map(|(v, w)| geometry::lemma3_find_threshold(v, w, &a.t_max, &a.resolution))
            .collect::<Result<Vec<_>, _>>()?;
        let missing: Vec<Value> = found.iter().filter(|r| !r.found).map(|r| json!({ "v": r.v, "w": r.w })).collect();
        for r in &found {
            csv.push_str(&format!(
                "3,{},{},{},{},{}\n",
                r.v.len(),
                r.threshold.as_ref().map(|x| x.to_string()).unwrap_or_default(),
                r.found,
                1,
                usize::from(!r.found)
            ));
        }
        reports.push(json!({
            "lemma": 3,
            "k": a.k,
            "t": a.t_max,
            "verdict": missing.is_empty(),
            "counterexamples": missing,
            "pairs": found,
        }));
    }
    if want(LemmaChoice::Four) {
        let rep = geometry::verify_lemma4(a.k, t)?;
        if !rep.verdict && *t < 3 {
            violations.push(format!("lemma 4 disjointness fails at k = {}, t = {t} < 3", a.k));
        }
        csv.push_str(&lemma_csv_row(&rep));
        reports.push(json!({
            "threshold": geometry::lemma4_threshold(a.k),
            "report": rep,
            "lemma": 4,
            "k": a.k,
            "t": t,
            "verdict": rep.verdict,
            "counterexamples": rep.counterexamples,
        }));
    }
    if want(LemmaChoice::Cert) {
        ctx.cap("n", a.n)?;
        let rep = geometry::nondegeneracy_certificate(a.n, &a.grid)?;
        csv.push_str(&format!("cert,{},,{},{},{}\n", a.n, rep.complete, rep.pair_count, rep.missing.len()));
        reports.push(json!({
            "lemma": "certificate",
            "k": a.n,
            "verdict": rep.complete,
            "counterexamples": rep.missing,
            "certificate": rep,
        }));
    }
    Ok(Outcome { result: json!({ "t": t, "reports": reports }), csv, violations })
}

#[derive(Args, Debug, Serialize)]
pub struct AttractorArgs {
    /// Box-counting levels for the level cover.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
    pub levels: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Cover::Level)]
    pub cover: Cover,
    /// Exponents j of the box widths 4^-j for the stopping-time cover.
    #[arg(long, value_delimiter = ',', default_value = "5,6,7,8,9,10")]
    pub scales: Vec<u32>,
    /// Analyse a derived subsystem: full:N or tilde:N.
    #[arg(long)]
    pub subsystem: Option<SubsystemArg>,
    /// User-supplied maps `a,b,c,d;...`, replacing the family.
    #[arg(long, allow_hyphen_values = true)]
    pub maps: Option<MapsArg>,
    /// Invariant interval for --maps.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub interval: Option<Vec<Rational>>,
    /// Level of the dimension bracket; lowered to keep the word count manageable.
    #[arg(long, default_value_t = 6)]
    pub bracket_level: usize,
    /// Level of the common-disjointness search; 0 skips it.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "1/2,4")]
    pub t_range: Vec<Rational>,
    #[arg(long, default_value = "1/20")]
    pub resolution: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cover {
    Level,
    StoppingTime,
}

fn auto_level(maps: usize, wanted: usize) -> usize {
    let mut level = wanted.max(1);
    while level > 1 && maps.checked_pow(level as u32).map_or(true, |c| c > AUTO_WORD_BUDGET) {
        level -= 1;
    }
    level
}

pub fn attractor(ctx: &Context, a: &AttractorArgs) -> Result<Outcome, Failure> {
    let (ifs, system) = select_system(ctx, &a.maps, &a.interval, &a.subsystem)?;
    let est: BoxCountEstimate = match a.cover {
        Cover::Level => {
            check_levels(ctx, &a.levels)?;
            attractor::box_counting(&ifs, &a.levels)?
        }
        Cover::StoppingTime => {
            let scales: Vec<Rational> = a.scales.iter().map(|&j| Rational::integer(4).pow(-(j as i32))).collect();
            attractor::box_counting_scales(&ifs, &scales)?
        }
    };
    let mut violations = Vec::new();
    if !(-1e-9..=1.0 + 1e-9).contains(&est.slope) {
        violations.push(format!("box-counting slope {} outside [0, 1]", est.slope));
    }
    let bracket = if ifs.is_hyperbolic() {
        let level = auto_level(ifs.len(), ctx.cap("bracket-level", a.bracket_level)?);
        let c = pressure::distortion_constant(&ifs, level.min(3))?;
        let mut b = pressure::dimension_bracket(&ifs, level, &c.c_emp, ctx.tol)?;
        b.rigor = c.rigor;
        to_value(&b)?
    } else {
        Value::Null
    };
    let common = if a.n >= 2 && a.maps.is_none() {
        ctx.cap("n", a.n)?;
        let (lo, hi) = match a.t_range.as_slice() {
            [lo, hi] => (lo, hi),
            [lo] => (lo, lo),
            _ => return Err(Failure::Usage("--t-range takes lo,hi".into())),
        };
        to_value(&geometry::find_common_disjoint_parameter(a.n, lo, hi, &a.resolution)?)?
    } else {
        Value::Null
    };
    let cover = match est.cover {
        CoverMode::Level => "level",
        CoverMode::StoppingTime => "stopping-time",
    };
    Ok(Outcome {
        result: json!({
            "t": ctx.t,
            "system": system,
            "maps": ifs.len(),
            "cover": cover,
            "box_count": est,
            "dimension_bracket": bracket,
            "common_disjoint": common,
        }),
        csv: est.to_csv(),
        violations,
    })
}

/// `auto` or a number in (0, 1].
#[derive(Clone, Debug, Serialize)]
#[serde(into = "String")]
pub enum Exponent {
    Auto,
    Value(f64),
}

impl From<Exponent> for String {
    fn from(e: Exponent) -> String {
        match e {
            Exponent::Auto => "auto".into(),
            Exponent::Value(s) => s.to_string(),
        }
    }
}

impl FromStr for Exponent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            Ok(Exponent::Auto)
        } else {
            s.parse().map(Exponent::Value).map_err(|_| format!("expected auto or a number, got {s:?}"))
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct MeasureArgs {
    /// Largest level; statistics are reported for every level 1..=n.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Exponent of the weights; `auto` uses d_n at the largest level.
    #[arg(long = "s", default_value = "auto")]
    pub s: Exponent,
    #[arg(long, value_delimiter = ',', default_value = "0.5,2,3")]
    pub q: Vec<f64>,
}

pub fn measure(ctx: &Context, a: &MeasureArgs) -> Result<Outcome, Failure> {
    if a.n == 0 {
        return Err(Failure::Usage("--n must be >= 1".into()));
    }
    ctx.cap("n", a.n)?;
    let family = make_family(&ctx.t)?;
    let s = match a.s {
        Exponent::Auto => pressure::solve_level_dimension(&family, a.n, ctx.tol)?.d_n,
        Exponent::Value(s) => s,
    };
    let mut levels: Vec<MeasureEstimate> = Vec::new();
    let mut violations = Vec::new();
    let mut csv = format!("{},weight_total\n", MeasureEstimate::csv_header());
    for n in 1..=a.n {
        let (est, words) = attractor::natural_measure_stats_in(&family, n, s, &Rational::zero(), &a.q)?;
        if est.cylinders_at_point != 1 << n || words.iter().any(|u| u.contains(3)) {
            violations.push(format!("level {n}: {} cylinders contain 0, expected 2^{n}", est.cylinders_at_point));
        }
        if (est.weight_total - 1.0).abs() > 1e-9 {
            violations.push(format!("level {n}: weights sum to {}", est.weight_total));
        }
        csv.push_str(&format!("{},{}\n", est.csv_row(), est.weight_total));
        levels.push(est);
    }
    let top = levels.last().unwrap();
    Ok(Outcome {
        result: json!({
            "t": ctx.t,
            "s": s,
            "s_source": String::from(a.s.clone()),
            "n": a.n,
            "cylinders_at_zero": top.cylinders_at_point,
            "local_dimension_quotient": top.local_dimension_quotient,
            "levels": levels,
        }),
        csv,
        violations,
    })
}
