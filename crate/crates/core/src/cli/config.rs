//! Flat `key=value` run configuration.
//!
//! One pair per line, `#` starts a comment, lists are comma separated and
//! reals may be written as fractions (`1/8`). Example:
//!
//! ```text
//! problem=example1
//! domain=flower
//! nx=512
//! ny=512
//! nt=512
//! eps=1/8,1/16,1/32,1/64
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::{format_epsilon, is_halving};
use crate::error::{DdmError, Result};
use crate::geometry::Point;
use crate::grid::BoxDomain;
use crate::problems::{self, DomainShape, FisherKppParams, NamedProblem};
use crate::timestepper::{RunOptions, STEP_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    Example1,
    Example2,
    Example3,
    FisherKpp,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Example1 => "example1",
            Self::Example2 => "example2",
            Self::Example3 => "example3",
            Self::FisherKpp => "fisher_kpp",
        }
    }

    pub fn has_exact_solution(self) -> bool {
        self != Self::FisherKpp
    }
}

/// Raster domain of the Fisher-KPP demo.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskSpec {
    pub path: PathBuf,
    pub cell: f64,
    pub origin: Point,
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub domain: DomainShape,
    /// Covering box; `None` means the problem default (the raster extent
    /// for mask runs).
    pub domain_box: Option<BoxDomain>,
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
    pub eps: Vec<f64>,
    /// Overrides the problem's final time.
    pub final_time: Option<f64>,
    pub quad_order: usize,
    pub cg_tol: f64,
    pub cg_maxit: Option<usize>,
    pub output: PathBuf,
    /// Step indices to dump; `0` is the initial state.
    pub snapshots: Vec<usize>,
    /// Seeds the random sampling of `ddm check`; recorded for runs.
    pub seed: u64,
    pub rates: bool,
    /// Adds wall times to `rates.csv` (which then differs between runs).
    pub timing: bool,
    pub mask: Option<MaskSpec>,
    pub fisher: FisherKppParams,
}

const KEYS: &[&str] = &[
    "problem",
    "domain",
    "box",
    "nx",
    "ny",
    "nt",
    "eps",
    "T",
    "quad_order",
    "cg_tol",
    "cg_maxit",
    "output",
    "snapshots",
    "seed",
    "rates",
    "timing",
    "mask",
    "cell",
    "mask_origin",
    "rho",
    "diffusion",
    "seed_center",
    "seed_width",
    "seed_amplitude",
];

struct Entry {
    line: usize,
    value: String,
}

/// Parses and validates a configuration. Relative mask paths are kept as
/// written; see [`load_config`].
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: BTreeMap<&str, Entry> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| DdmError::config(line, format!("expected key=value, got {content:?}")))?;
        let key = key.trim();
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(DdmError::config(line, format!("unknown key: {key}")));
        };
        let value = value.trim().to_string();
        if value.is_empty() {
            return Err(DdmError::config(line, format!("empty value for {key}")));
        }
        if let Some(prev) = entries.insert(known, Entry { line, value }) {
            return Err(DdmError::config(line, format!("duplicate key: {key} (first set on line {})", prev.line)));
        }
    }
    Parser { entries }.finish()
}

/// Reads `path` and resolves a relative `mask` against the file's directory.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DdmError::Input { path: path.to_path_buf(), message: e.to_string() })?;
    let mut cfg = parse_config(&text).map_err(|e| match e {
        DdmError::Config { .. } => DdmError::Input { path: path.to_path_buf(), message: e.to_string() },
        other => other,
    })?;
    if let Some(mask) = &mut cfg.mask {
        if mask.path.is_relative() {
            if let Some(dir) = path.parent() {
                mask.path = dir.join(&mask.path);
            }
        }
    }
    Ok(cfg)
}

struct Parser<'a> {
    entries: BTreeMap<&'a str, Entry>,
}

impl Parser<'_> {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn parse<T>(&self, key: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => f(&e.value).map(Some).map_err(|m| DdmError::config(e.line, format!("{key}: {m}"))),
        }
    }

    fn invalid(&self, key: &str, message: impl Into<String>) -> DdmError {
        match self.get(key) {
            Some(e) => DdmError::config(e.line, message),
            None => DdmError::Config { line: None, message: message.into() },
        }
    }

    fn positive_real(&self, key: &str) -> Result<Option<f64>> {
        self.parse(key, |s| parse_real(s).and_then(positive))
    }

    fn positive_count(&self, key: &str) -> Result<Option<usize>> {
        self.parse(key, |s| parse_count(s).and_then(|n| if n > 0 { Ok(n) } else { Err("must be positive".into()) }))
    }

    fn finish(self) -> Result<RunConfig> {
        let problem = self
            .parse("problem", |s| match s {
                "example1" => Ok(ProblemKind::Example1),
                "example2" => Ok(ProblemKind::Example2),
                "example3" => Ok(ProblemKind::Example3),
                "fisher_kpp" => Ok(ProblemKind::FisherKpp),
                other => Err(format!("unknown problem {other:?}")),
            })?
            .ok_or(DdmError::Config { line: None, message: "missing required key: problem".into() })?;

        let domain = self.parse("domain", |s| match s {
            "circle" => Ok(DomainShape::Circle),
            "flower" => Ok(DomainShape::Flower),
            other => Err(format!("unknown domain {other:?}")),
        })?;
        if problem == ProblemKind::Example3 && domain == Some(DomainShape::Circle) {
            return Err(self.invalid("domain", "example3 is defined on the flower domain only"));
        }
        let domain = domain.unwrap_or(if problem == ProblemKind::Example3 { DomainShape::Flower } else { DomainShape::Circle });

        let domain_box = self.parse("box", |s| {
            let v = parse_list(s, parse_real)?;
            match v[..] {
                [xmin, xmax, ymin, ymax] if xmin < xmax && ymin < ymax => Ok(BoxDomain::new(xmin, xmax, ymin, ymax)),
                [_, _, _, _] => Err("need xmin < xmax and ymin < ymax".into()),
                _ => Err(format!("expected xmin,xmax,ymin,ymax, got {} values", v.len())),
            }
        })?;

        let defaults = Defaults::of(problem);
        let nx = self.positive_count("nx")?.unwrap_or(defaults.nx);
        let ny = self.positive_count("ny")?.unwrap_or(defaults.ny);
        for (key, n) in [("nx", nx), ("ny", ny)] {
            if n < 2 {
                return Err(self.invalid(key, format!("{key} must be at least 2")));
            }
        }
        let nt = self.positive_count("nt")?.unwrap_or(defaults.nt);
        if nt < 2 {
            return Err(self.invalid("nt", "nt must be at least 2"));
        }

        let eps = match self.parse("eps", |s| parse_list(s, |v| parse_real(v).and_then(positive)))? {
            Some(v) => v,
            None if problem == ProblemKind::FisherKpp => {
                return Err(DdmError::Config { line: None, message: "missing required key: eps".into() })
            }
            None => defaults.eps,
        };

        let rates = self.parse("rates", parse_bool)?.unwrap_or(problem.has_exact_solution());
        if rates && !problem.has_exact_solution() {
            return Err(self.invalid("rates", format!("{} has no exact solution, rates are unavailable", problem.name())));
        }
        if rates && !is_halving(&eps) {
            let list: Vec<String> = eps.iter().map(|&e| format_epsilon(e)).collect();
            return Err(self.invalid("eps", format!("eps must halve between entries, got {}", list.join(","))));
        }
        if !rates {
            let mut seen = eps.clone();
            seen.sort_by(f64::total_cmp);
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(self.invalid("eps", "eps entries must be distinct"));
            }
        }

        let final_time = self.positive_real("T")?;
        let quad_order = self
            .parse("quad_order", |s| {
                parse_count(s).and_then(|n| if (2..=5).contains(&n) { Ok(n) } else { Err("must be in 2..=5".into()) })
            })?
            .unwrap_or(RunOptions::default().quad_order);
        let cg_tol = self.positive_real("cg_tol")?.unwrap_or(STEP_TOLERANCE);
        let cg_maxit = self.positive_count("cg_maxit")?;
        let output = self.get("output").map_or_else(|| PathBuf::from("ddm-out"), |e| PathBuf::from(&e.value));
        let snapshots = self.parse("snapshots", |s| parse_list(s, parse_count))?.unwrap_or_else(|| vec![nt]);
        if let Some(&bad) = snapshots.iter().find(|&&k| k > nt) {
            return Err(self.invalid("snapshots", format!("snapshot step {bad} exceeds nt = {nt}")));
        }
        let seed = self.parse("seed", |s| s.parse::<u64>().map_err(|e| e.to_string()))?.unwrap_or(0);
        let timing = self.parse("timing", parse_bool)?.unwrap_or(false);

        let fisher_keys = ["mask", "cell", "mask_origin", "rho", "diffusion", "seed_center", "seed_width", "seed_amplitude"];
        if problem != ProblemKind::FisherKpp {
            if let Some(key) = fisher_keys.iter().find(|k| self.get(k).is_some()) {
                return Err(self.invalid(key, format!("{key} only applies to fisher_kpp")));
            }
        }

        let mut fisher = FisherKppParams::default();
        if let Some(t) = final_time {
            fisher.final_time = t;
        }
        if let Some(rho) = self.parse("rho", |s| parse_real(s).and_then(non_negative))? {
            fisher.rho = rho;
        }
        if let Some(a) = self.positive_real("diffusion")? {
            fisher.diffusion = a;
        }
        if let Some(c) = self.parse("seed_center", parse_point)? {
            fisher.seed_center = c;
        }
        if let Some(w) = self.positive_real("seed_width")? {
            fisher.seed_width = w;
        }
        if let Some(a) = self.parse("seed_amplitude", |s| parse_real(s).and_then(non_negative))? {
            fisher.seed_amplitude = a;
        }

        let mask = match self.get("mask") {
            None => {
                for key in ["cell", "mask_origin"] {
                    if self.get(key).is_some() {
                        return Err(self.invalid(key, format!("{key} requires mask")));
                    }
                }
                None
            }
            Some(e) => {
                if domain_box.is_some() {
                    return Err(self.invalid("box", "box is taken from the mask extent and cannot be set"));
                }
                if self.get("domain").is_some() {
                    return Err(self.invalid("domain", "domain and mask are mutually exclusive"));
                }
                let cell = self
                    .positive_real("cell")?
                    .ok_or_else(|| DdmError::config(e.line, "mask requires cell"))?;
                let origin = self.parse("mask_origin", parse_point)?.unwrap_or_default();
                Some(MaskSpec { path: PathBuf::from(&e.value), cell, origin })
            }
        };

        Ok(RunConfig {
            problem,
            domain,
            domain_box,
            nx,
            ny,
            nt,
            eps,
            final_time,
            quad_order,
            cg_tol,
            cg_maxit,
            output,
            snapshots,
            seed,
            rates,
            timing,
            mask,
            fisher,
        })
    }
}

struct Defaults {
    nx: usize,
    ny: usize,
    nt: usize,
    eps: Vec<f64>,
}

impl Defaults {
    fn of(problem: ProblemKind) -> Self {
        let named = match problem {
            ProblemKind::Example1 => problems::example1(DomainShape::Circle),
            ProblemKind::Example2 => problems::example2(DomainShape::Circle),
            ProblemKind::Example3 => problems::example3(),
            ProblemKind::FisherKpp => Ok(problems::fisher_kpp_on(
                crate::geometry::DistanceField::Circle { center: Point::default(), radius: 0.25 },
                problems::CENTERED_BOX,
                &FisherKppParams::default(),
            )),
        };
        let p = named.expect("built-in problems are valid");
        Self { nx: p.nx, ny: p.ny, nt: p.nt, eps: p.eps }
    }
}

impl RunConfig {
    pub fn run_options(&self) -> RunOptions {
        RunOptions { quad_order: self.quad_order, cg_tol: self.cg_tol, cg_max_iter: self.cg_maxit }
    }

    /// Builds the problem with the configured box and final time applied.
    pub fn build_problem(&self) -> Result<NamedProblem> {
        let mut p = match self.problem {
            ProblemKind::Example1 => problems::example1(self.domain)?,
            ProblemKind::Example2 => problems::example2(self.domain)?,
            ProblemKind::Example3 => problems::example3()?,
            ProblemKind::FisherKpp => match &self.mask {
                Some(m) => problems::fisher_kpp(&m.path, m.cell, m.origin, &self.fisher)?,
                None => {
                    let mut p = problems::fisher_kpp_on(self.domain.distance()?, problems::CENTERED_BOX, &self.fisher);
                    p.name = format!("fisher_kpp-{}", self.domain.name());
                    p
                }
            },
        };
        if let Some(b) = self.domain_box {
            p.domain_box = b;
        }
        if let Some(t) = self.final_time {
            p.spec.final_time = t;
        }
        p.nx = self.nx;
        p.ny = self.ny;
        p.nt = self.nt;
        p.eps = self.eps.clone();
        Ok(p)
    }

    /// Every setting, one `key=value` per line, in a form [`parse_config`]
    /// accepts.
    pub fn manifest(&self, resolved_box: BoxDomain, final_time: f64) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        let list = |v: &[f64]| v.iter().map(|&x| format_epsilon(x)).collect::<Vec<_>>().join(",");
        put("problem", self.problem.name().into());
        if self.mask.is_none() {
            put("domain", self.domain.name().into());
            let b = resolved_box;
            put("box", format!("{:?},{:?},{:?},{:?}", b.xmin, b.xmax, b.ymin, b.ymax));
        }
        put("nx", self.nx.to_string());
        put("ny", self.ny.to_string());
        put("nt", self.nt.to_string());
        put("eps", list(&self.eps));
        put("T", format!("{final_time:?}"));
        put("quad_order", self.quad_order.to_string());
        put("cg_tol", format!("{:e}", self.cg_tol));
        if let Some(m) = self.cg_maxit {
            put("cg_maxit", m.to_string());
        }
        put("output", self.output.display().to_string());
        put("snapshots", self.snapshots.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
        put("seed", self.seed.to_string());
        put("rates", self.rates.to_string());
        put("timing", self.timing.to_string());
        if self.problem == ProblemKind::FisherKpp {
            if let Some(m) = &self.mask {
                put("mask", m.path.display().to_string());
                put("cell", format!("{:?}", m.cell));
                put("mask_origin", format!("{:?},{:?}", m.origin.x, m.origin.y));
            }
            let f = &self.fisher;
            put("rho", format!("{:?}", f.rho));
            put("diffusion", format!("{:?}", f.diffusion));
            put("seed_center", format!("{:?},{:?}", f.seed_center.x, f.seed_center.y));
            put("seed_width", format!("{:?}", f.seed_width));
            put("seed_amplitude", format!("{:?}", f.seed_amplitude));
        }
        out
    }
}

/// Real number, optionally written as a fraction `p/q`.
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| format!("malformed number {s:?}"))?;
            let den: f64 = den.trim().parse().map_err(|_| format!("malformed number {s:?}"))?;
            if den == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            num / den
        }
        None => s.parse().map_err(|_| format!("malformed number {s:?}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite number {s:?}"))
    }
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    s.trim().parse().map_err(|_| format!("malformed integer {:?}", s.trim()))
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(format!("expected true or false, got {other:?}")),
    }
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    match parse_list(s, parse_real)?[..] {
        [x, y] => Ok(Point::new(x, y)),
        _ => Err("expected x,y".into()),
    }
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(|v| item(v.trim())).collect()
}

fn positive(v: f64) -> std::result::Result<f64, String> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn non_negative(v: f64) -> std::result::Result<f64, String> {
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be non-negative, got {v}"))
    }
}
