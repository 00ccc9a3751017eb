//! Text output: classification records, per-step CSV tables, SVG rendering
//! and the classification survey.
//!
//! All output is deterministic. SVG coordinates are the only place where
//! floating point appears.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{classify_rational, Classified, Verdict};
use crate::digits::{format_rational, Rational};
use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::walk::{Path, TurnMap};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(Error::UnknownName {
                kind: "format",
                name: other.to_string(),
            }),
        }
    }
}

pub const RECORD_HEADER: &str =
    "r,base,kind,tau,v,v_global,k,cycle_length,distinct_points,max_norm_sq,torsion_rate";

/// One classification as a flat record. Points are written `a;b`; fields
/// that do not apply to the verdict are empty (CSV) or null (JSON).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationRecord {
    pub r: String,
    pub base: u32,
    pub kind: &'static str,
    pub tau: i64,
    pub v: String,
    pub v_global: Option<String>,
    pub k: Option<u32>,
    pub cycle_length: Option<usize>,
    pub distinct_points: Option<usize>,
    pub max_norm_sq: Option<i64>,
    pub torsion_rate: String,
}

fn point_field(p: LatticePoint) -> String {
    format!("{};{}", p.a, p.b)
}

impl ClassificationRecord {
    pub fn new(c: &Classified) -> Self {
        let class = c.classification();
        let mut rec = ClassificationRecord {
            r: format_rational(&c.digits().value()),
            base: c.digits().base(),
            kind: class.verdict.kind(),
            tau: class.isometry.tau,
            v: point_field(class.isometry.v),
            v_global: None,
            k: None,
            cycle_length: None,
            distinct_points: None,
            max_norm_sq: None,
            torsion_rate: format_rational(&class.torsion_rate),
        };
        match class.verdict {
            Verdict::Closed {
                multiplier,
                cycle_length,
                distinct_points,
                max_norm_sq,
            } => {
                rec.k = Some(multiplier);
                rec.cycle_length = Some(cycle_length);
                rec.distinct_points = Some(distinct_points);
                rec.max_norm_sq = Some(max_norm_sq);
            }
            Verdict::Drift { v_global } => rec.v_global = Some(point_field(v_global)),
        }
        rec
    }

    pub fn to_csv(&self) -> String {
        fn opt<T: ToString>(x: &Option<T>) -> String {
            x.as_ref().map(T::to_string).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.r,
            self.base,
            self.kind,
            self.tau,
            self.v,
            opt(&self.v_global),
            opt(&self.k),
            opt(&self.cycle_length),
            opt(&self.distinct_points),
            opt(&self.max_norm_sq),
            self.torsion_rate
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

/// `step,a,b,dir,R` per state.
pub fn walk_csv(path: &Path) -> String {
    let mut out = String::from("step,a,b,dir,R\n");
    for s in path.states() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.step_index,
            s.position.a,
            s.position.b,
            s.direction.index(),
            s.turn_sum
        );
    }
    out
}

/// `step,winding` per step.
pub fn winding_csv(profile: &[i64]) -> String {
    let mut out = String::from("step,winding\n");
    for (i, w) in profile.iter().enumerate() {
        let _ = writeln!(out, "{i},{w}");
    }
    out
}

/// `step,R,torsion` per step, torsion as an exact fraction.
pub fn torsion_csv(path: &Path) -> String {
    let d = i64::from(path.grid().direction_count());
    let mut out = String::from("step,R,torsion\n");
    for s in path.states() {
        let t = Rational::new(BigInt::from(s.turn_sum), BigInt::from(d));
        let _ = writeln!(out, "{},{},{}", s.step_index, s.turn_sum, format_rational(&t));
    }
    out
}

fn fixed(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// Bounding box `(min_x, min_y, max_x, max_y)` of the rendered walk, in SVG
/// coordinates (y pointing down).
pub fn svg_bounds(path: &Path) -> (f64, f64, f64, f64) {
    let grid = path.grid();
    path.states().iter().fold(
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        |(x0, y0, x1, y1), s| {
            let (x, y) = grid.to_cartesian(s.position);
            (x0.min(x), y0.min(-y), x1.max(x), y1.max(-y))
        },
    )
}

/// One polyline through the walk, the start marked, with a one-unit margin.
pub fn render_svg(path: &Path) -> String {
    let grid = path.grid();
    let (x0, y0, x1, y1) = svg_bounds(path);
    let (vx, vy, w, h) = (x0 - 1.0, y0 - 1.0, x1 - x0 + 2.0, y1 - y0 + 2.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        fixed(vx),
        fixed(vy),
        fixed(w),
        fixed(h)
    );
    let points: Vec<String> = path
        .states()
        .iter()
        .map(|s| {
            let (x, y) = grid.to_cartesian(s.position);
            format!("{},{}", fixed(x), fixed(-y))
        })
        .collect();
    let _ = writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"0.05\" stroke-linejoin=\"round\"/>",
        points.join(" ")
    );
    let _ = writeln!(
        out,
        "<circle cx=\"0.000000\" cy=\"0.000000\" r=\"0.150000\" fill=\"red\"/>"
    );
    out.push_str("</svg>\n");
    out
}

#[derive(Clone, Debug)]
pub struct SurveyConfig {
    pub min_q: u64,
    pub max_q: u64,
    pub turnmap: TurnMap,
    pub format: OutputFormat,
    /// Worker threads; 1 runs on the calling thread.
    pub jobs: usize,
}

/// Every reduced `p/q` in `[0, 1)` with `min_q <= q <= max_q`, ordered by
/// `q` then `p`.
pub fn survey_inputs(min_q: u64, max_q: u64) -> Vec<(u64, u64)> {
    (min_q.max(1)..=max_q)
        .flat_map(|q| (0..q).filter(move |p| p.gcd(&q) == 1).map(move |p| (p, q)))
        .collect()
}

/// Classifies every input and writes header, one record per input and a
/// summary footer. Output does not depend on the worker count.
pub fn survey(config: &SurveyConfig) -> Result<String> {
    let inputs = survey_inputs(config.min_q, config.max_q);
    let classify_one = |&(p, q): &(u64, u64)| -> Result<ClassificationRecord> {
        let r = Rational::new(BigInt::from(p), BigInt::from(q));
        Ok(ClassificationRecord::new(&classify_rational(&r, &config.turnmap)?))
    };
    let records: Vec<ClassificationRecord> = if config.jobs <= 1 {
        inputs.iter().map(classify_one).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| inputs.par_iter().map(classify_one).collect::<Result<_>>())?
    };

    let mut kinds: BTreeMap<&str, usize> = BTreeMap::new();
    let mut multipliers: BTreeMap<u32, usize> = BTreeMap::new();
    for rec in &records {
        *kinds.entry(rec.kind).or_default() += 1;
        if let Some(k) = rec.k {
            *multipliers.entry(k).or_default() += 1;
        }
    }
    let closed = kinds.get("closed").copied().unwrap_or(0);
    let drift = kinds.get("drift").copied().unwrap_or(0);

    let mut out = String::new();
    match config.format {
        OutputFormat::Jsonl => {
            for rec in &records {
                out.push_str(&rec.to_json());
                out.push('\n');
            }
            let summary = serde_json::json!({
                "summary": {
                    "total": records.len(),
                    "closed": closed,
                    "drift": drift,
                    "k": multipliers.iter().map(|(k, n)| (k.to_string(), *n)).collect::<BTreeMap<_, _>>(),
                }
            });
            out.push_str(&summary.to_string());
            out.push('\n');
        }
        _ => {
            out.push_str(RECORD_HEADER);
            out.push('\n');
            for rec in &records {
                out.push_str(&rec.to_csv());
                out.push('\n');
            }
            let _ = write!(out, "# total={} closed={closed} drift={drift}", records.len());
            for (k, n) in &multipliers {
                let _ = write!(out, " k{k}={n}");
            }
            out.push('\n');
        }
    }
    Ok(out)
}
