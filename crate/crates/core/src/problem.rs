//! JSON problem documents and reports.

use serde::{Deserialize, Serialize};

use crate::clusters::{pair_up, Configuration, PairedConfiguration};
use crate::error::{Error, Result};
use crate::folding::{
    classify_folding, run_algorithm, FoldClass, FoldingStep, NotGoodReason, Verdict,
};
use crate::hull::{reduced_convex_hull, to_dot};
use crate::oracle::audit;
use crate::projline::{Mobius, PPoint};
use crate::valfield::{fmt_rational, FieldCtx, FieldElem};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default)]
    pub trace: bool,
    #[serde(default)]
    pub dot: Option<String>,
    #[serde(default)]
    pub verify_depth: Option<usize>,
    #[serde(default)]
    pub normalize_infinity: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub p: u32,
    pub ell: u32,
    pub points: Vec<String>,
    #[serde(default)]
    pub options: Options,
}

impl ProblemSpec {
    pub fn context(&self) -> Result<FieldCtx> {
        FieldCtx::new(self.p, self.ell)
    }

    pub fn configuration(&self) -> Result<Configuration> {
        let ctx = self.context()?;
        let pts = self
            .points
            .iter()
            .map(|s| PPoint::parse(&ctx, s))
            .collect::<Result<Vec<_>>>()?;
        Configuration::new(&ctx, pts)
    }
}

/// Parses and validates a problem document.
pub fn parse_problem(text: &str) -> Result<ProblemSpec> {
    let spec: ProblemSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let n = spec.points.len();
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::Validation(format!(
            "points: need an even count of at least 4, got {n}"
        )));
    }
    spec.context()
        .map_err(|e| Error::Validation(e.to_string()))?;
    spec.configuration()
        .map_err(|e| Error::Validation(e.to_string()))?;
    Ok(spec)
}

/// An exact value: a rational as "a/b" (or "inf"), or the coefficient list
/// of an element of Q(ζ_p) in the power basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Rational(String),
    Cyclotomic(Vec<String>),
}

impl Value {
    pub fn of_elem(x: &FieldElem) -> Value {
        match x.as_rational() {
            Some(q) => Value::Rational(fmt_rational(&q)),
            None => Value::Cyclotomic(x.coeffs().iter().map(fmt_rational).collect()),
        }
    }

    pub fn of_point(pt: &PPoint) -> Value {
        match pt {
            PPoint::Infinity => Value::Rational("inf".into()),
            PPoint::Finite(x) => Value::of_elem(x),
        }
    }
}

fn points(cfg: &Configuration) -> Vec<Value> {
    cfg.points().iter().map(Value::of_point).collect()
}

fn pairs(pcfg: &PairedConfiguration) -> Vec<[Value; 2]> {
    pcfg.pairs()
        .iter()
        .map(|(a, b)| [Value::of_point(a), Value::of_point(b)])
        .collect()
}

fn matrix(m: &Mobius) -> [Value; 4] {
    m.entries().map(Value::of_elem)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    /// Entries [a, b, c, d] of z ↦ (az + b)/(cz + d).
    pub matrix: [Value; 4],
    pub points: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    /// "good", "not_good" or "redundant".
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s_min: Option<Vec<[Value; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reduced: Option<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub l: usize,
    pub c_i: Value,
    pub c_l: Value,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub i: usize,
    pub j: usize,
    pub n: u32,
    #[serde(rename = "I")]
    pub indices: Vec<usize>,
    pub matrix: [Value; 4],
    pub result: Vec<Value>,
    pub class: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub before: Option<Vec<[Value; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<WitnessRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub stage: String,
    pub dot: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub max_len: usize,
    /// "s_min" for good verdicts, "initial" otherwise.
    pub target: String,
    pub words_checked: usize,
    pub witness: Option<WordRecord>,
    pub relations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordRecord {
    pub word: String,
    pub syllables: Vec<(usize, u32)>,
    pub class: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub p: u32,
    pub ell: u32,
    pub input: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub normalization: Option<Normalization>,
    pub verdict: VerdictRecord,
    pub folds: Vec<FoldRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trees: Option<Vec<TreeRecord>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub audit: Option<AuditRecord>,
}

impl Report {
    /// 0 good, 1 not good, 2 redundant.
    pub fn exit_code(&self) -> i32 {
        match self.verdict.kind.as_str() {
            "good" => 0,
            "not_good" => 1,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Exit code for rejected input.
pub const EXIT_INVALID: i32 = 3;

/// z ↦ 1/(z − c) for the first listed point c.
fn normalizer(cfg: &Configuration) -> Result<Mobius> {
    let ctx = cfg.ctx();
    let c = cfg.points()[0]
        .finite()
        .expect("no infinity present")
        .clone();
    Mobius::new(ctx.zero(), ctx.one(), ctx.one(), -c)
}

fn fold_record(step: &FoldingStep, detailed: bool) -> FoldRecord {
    let class = match classify_folding(step) {
        FoldClass::Good => "good",
        FoldClass::Bad => "bad",
        FoldClass::Neither => "neither",
    };
    FoldRecord {
        i: step.i,
        j: step.j,
        n: step.n,
        indices: step.indices.clone(),
        matrix: matrix(&step.map),
        result: points(&step.after),
        class: class.into(),
        before: detailed.then(|| pairs(&step.before)),
        witness: step
            .witness
            .as_ref()
            .filter(|_| detailed)
            .map(|w| WitnessRecord {
                l: w.l,
                c_i: Value::of_elem(&w.c_i),
                c_l: Value::of_elem(&w.c_l),
                lhs: w.lhs.to_string(),
                rhs: w.rhs.to_string(),
            }),
    }
}

fn verdict_record(v: &Verdict) -> VerdictRecord {
    let mut r = VerdictRecord {
        kind: v.name().into(),
        s_min: None,
        reason: None,
        failure: None,
        reduced: None,
    };
    match v {
        Verdict::Good { s_min, .. } => r.s_min = Some(pairs(s_min)),
        Verdict::NotGood { reason, .. } => {
            let (name, failure) = match reason {
                NotGoodReason::InitialNotPaired(f) => ("initial_not_paired", f),
                NotGoodReason::BadFoldingProduced { failure, .. } => {
                    ("bad_folding_produced", failure)
                }
            };
            r.reason = Some(name.into());
            r.failure = Some(failure.to_string());
        }
        Verdict::Redundant { reduced, .. } => r.reduced = Some(points(reduced)),
    }
    r
}

/// Paired configurations along the run: one before each fold, then S^min.
fn stages(v: &Verdict) -> Vec<&PairedConfiguration> {
    let mut out: Vec<&PairedConfiguration> = v.trace().iter().map(|s| &s.before).collect();
    if let Verdict::Good { s_min, .. } = v {
        out.push(s_min);
    }
    out
}

/// Runs the algorithm on a validated problem.
pub fn run(spec: &ProblemSpec) -> Result<Report> {
    let ctx = spec.context()?;
    let original = spec.configuration()?;
    let mut cfg = original.clone();
    let mut normalization = None;
    if !cfg.points().iter().any(PPoint::is_infinity) {
        if !spec.options.normalize_infinity {
            return Err(Error::InvalidInput(
                "inf is not among the points; pass normalize_infinity to move one there".into(),
            ));
        }
        let m = normalizer(&cfg)?;
        cfg = Configuration::new(&ctx, cfg.points().iter().map(|x| m.apply(x)).collect())?;
        normalization = Some(Normalization {
            matrix: matrix(&m),
            points: points(&cfg),
        });
    }
    let verdict = run_algorithm(&cfg)?;
    let folds = verdict
        .trace()
        .iter()
        .map(|s| fold_record(s, spec.options.trace))
        .collect();
    let trees = match &spec.options.dot {
        None => None,
        Some(_) => Some(
            stages(&verdict)
                .into_iter()
                .enumerate()
                .map(|(k, pc)| {
                    Ok(TreeRecord {
                        stage: format!("stage{k}"),
                        dot: to_dot(&reduced_convex_hull(pc)?),
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let audit = match spec.options.verify_depth {
        None => None,
        Some(depth) => {
            let target = match &verdict {
                Verdict::Good { s_min, .. } => Some(("s_min", s_min.clone())),
                _ => pair_up(&cfg).ok().map(|pc| ("initial", pc)),
            };
            match target {
                None => None,
                Some((name, pc)) => {
                    let a = audit(&pc, depth)?;
                    Some(AuditRecord {
                        max_len: depth,
                        target: name.into(),
                        words_checked: a.words_checked,
                        witness: a.witness.map(|(w, c)| WordRecord {
                            word: w.to_string(),
                            syllables: w.syllables.clone(),
                            class: c.name().into(),
                        }),
                        relations: a.relations.iter().map(|w| w.to_string()).collect(),
                    })
                }
            }
        }
    };
    Ok(Report {
        p: spec.p,
        ell: spec.ell,
        input: points(&original),
        normalization,
        verdict: verdict_record(&verdict),
        folds,
        trees,
        audit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIRST: &str = r#"{"p":2,"ell":5,"points":["7","12","0","5","1","inf"]}"#;
    const SECOND: &str =
        r#"{"p":2,"ell":7,"points":["1336/3","-355","-110","86","0","7","1","inf"]}"#;

    fn texts(v: &[Value]) -> Vec<String> {
        v.iter()
            .map(|x| match x {
                Value::Rational(s) => s.clone(),
                Value::Cyclotomic(c) => c.join(","),
            })
            .collect()
    }

    #[test]
    fn parses_and_validates() {
        let s = parse_problem(FIRST).unwrap();
        assert_eq!((s.p, s.ell, s.points.len()), (2, 5, 6));
        assert!(matches!(
            parse_problem(r#"{"p":2,"ell":5,"points":["0","5","1"]}"#),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_problem(r#"{"p":2,"ell":5,"points":["0","5","inf","inf"]}"#),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_problem(r#"{"p":4,"ell":5,"points":["0","5","1","inf"]}"#),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_problem("{\"p\":2,\n\"ell\":"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn reports_for_examples() {
        let r = run(&parse_problem(FIRST).unwrap()).unwrap();
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.folds.len(), 1);
        assert_eq!(
            texts(&r.folds[0].result),
            ["-5", "-10", "0", "5", "1", "inf"]
        );

        let mut spec = parse_problem(SECOND).unwrap();
        spec.options.verify_depth = Some(6);
        spec.options.trace = true;
        let r = run(&spec).unwrap();
        assert_eq!(r.exit_code(), 0);
        let flat: Vec<String> = r
            .verdict
            .s_min
            .as_ref()
            .unwrap()
            .iter()
            .flat_map(|p| texts(p))
            .collect();
        assert_eq!(flat, ["-7", "42", "112", "-84", "0", "7", "1", "inf"]);
        let audit = r.audit.as_ref().unwrap();
        assert!(audit.witness.is_none());
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn infinity_normalization() {
        let text = r#"{"p":2,"ell":5,"points":["3","0","5","1","6","inf"]}"#;
        assert!(run(&parse_problem(text).unwrap()).is_ok());
        let text = r#"{"p":2,"ell":5,"points":["2","0","5","1","6","7"]}"#;
        let mut spec = parse_problem(text).unwrap();
        assert!(matches!(run(&spec), Err(Error::InvalidInput(_))));
        spec.options.normalize_infinity = true;
        let r = run(&spec).unwrap();
        assert_eq!(texts(&r.normalization.unwrap().points)[0], "inf");
    }
}
