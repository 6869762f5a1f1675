//! The `effk` batch front end. Every command prints a `key: value` report
//! followed by a `[machine]` block of `key=value` lines.
//!
//! Points (PT) use the rational point grammar with stage units over the
//! chosen certificate: `E(j,r,s)` is ψ_j(E_rs) with 1-based r, s, `I(j)` is
//! ψ_j(1), and the bare `1` is the unit.
//!
//! K_0 labels (L):
//!
//! ```text
//! label := ['-'] word (('+' | '-') word)*
//! word  := atom ('*' atom)*
//! atom  := 'x' INT | 'p(' INT ',' INT [',' INT] ')'
//! ```
//!
//! `x<g>` is the semigroup generator g; `p(j,r,n)` is the diagonal projection
//! of M_n(M_{n_j}) with r ones (n defaults to 1). A word is a direct sum,
//! and the label is the signed sum of the classes of its words.

use clap::{Args, Parser, Subcommand};
use effk::categoricity::Isomorphism;
use effk::coding::{pair, untriple};
use effk::cstar::{parse_descriptor, parse_point, standard_complex, StarPoly, StarRing};
use effk::error::{Error, Result};
use effk::fuel::Verdict;
use effk::ktheory::{gamma, k0_to_rational, k0_uhf, k1, ConeAnswer, DPresentation};
use effk::presentations::{GpWord, SgWord};
use effk::uhf::{
    evaluate, extract_certificate, Exponent, limit_norm, presentation_from_supernatural, trace, ExtractConfig, StageMatrix,
    Supernatural, UhfCertificate,
};
use num_rational::BigRational;
use num_traits::Zero;
use std::fmt::Write as _;

#[derive(Parser, Debug)]
#[command(name = "effk", about = "Effective K-theory for presented C*-algebras", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CertArg {
    /// Certificate file, or a literal rule such as "dims powers 2".
    #[arg(long, default_value = "dims powers 2")]
    pub cert: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Supernatural number specs.
    Sn {
        #[command(subcommand)]
        action: SnAction,
    },
    /// Builds the limit presentation of a supernatural number or certificate.
    Build {
        /// Supernatural spec file.
        #[arg(long, conflicts_with = "cert", required_unless_present = "cert")]
        sn: Option<String>,
        /// Certificate file or literal rule.
        #[arg(long)]
        cert: Option<String>,
        /// Stages to list.
        #[arg(long, default_value_t = 6)]
        stages: u64,
    },
    /// Certified norm of a point.
    Norm {
        pt: String,
        #[arg(short, default_value_t = 20)]
        k: u32,
        #[command(flatten)]
        cert: CertArg,
    },
    /// Trace of a point.
    Trace {
        pt: String,
        #[arg(short, default_value_t = 20)]
        k: u32,
        #[command(flatten)]
        cert: CertArg,
    },
    /// Projections.
    Proj {
        #[command(subcommand)]
        action: ProjAction,
    },
    /// K_0 labels.
    K0 {
        #[command(subcommand)]
        action: K0Action,
    },
    /// Image of a point under the isomorphism between two certificates.
    Iso {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        pt: String,
        #[arg(short, default_value_t = 20)]
        k: u32,
        /// Look-ahead of each divisibility search.
        #[arg(long, default_value_t = 64)]
        fuel: u64,
    },
    /// Extracts a UHF certificate from a presentation descriptor.
    ExtractCert {
        /// Presentation descriptor file.
        #[arg(long)]
        pres: String,
        #[arg(long, default_value_t = 5)]
        stages: usize,
        #[arg(long, default_value_t = 1_000_000)]
        fuel: u64,
    },
    /// K_1 checks.
    K1 {
        #[command(subcommand)]
        action: K1Action,
    },
}

#[derive(Subcommand, Debug)]
pub enum SnAction {
    /// Parses a supernatural spec and lists its first stages.
    Parse { file: String },
    /// Prints a spec in normal form.
    Print { file: String },
}

#[derive(Subcommand, Debug)]
pub enum ProjAction {
    /// Decides whether a point is a projection and gives its label.
    Classify {
        pt: String,
        #[command(flatten)]
        cert: CertArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum K0Action {
    /// Decides whether two labels name the same class.
    Eq {
        l1: String,
        l2: String,
        #[command(flatten)]
        cert: CertArg,
    },
    /// Decides whether a label lies in the positive cone.
    Pos {
        l: String,
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
        #[command(flatten)]
        cert: CertArg,
    },
    /// The rational value of a label.
    Rat {
        l: String,
        #[command(flatten)]
        cert: CertArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum K1Action {
    /// Checks that the first labels of K_1(ℂ) are the identity.
    Smoke {
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
        #[arg(long, default_value_t = 5)]
        labels: u64,
    },
}

/// A report: human lines, then the machine block.
#[derive(Default, Debug)]
pub struct Report {
    pub fields: Vec<(String, String)>,
    pub machine: Vec<(String, String)>,
    pub body: Vec<String>,
}

impl Report {
    fn new(verb: &str) -> Self {
        let mut r = Report::default();
        r.field("verb", verb);
        r.mach("verb", verb);
        r
    }

    fn field(&mut self, k: &str, v: impl ToString) -> &mut Self {
        self.fields.push((k.into(), v.to_string()));
        self
    }

    fn mach(&mut self, k: &str, v: impl ToString) -> &mut Self {
        self.machine.push((k.into(), v.to_string()));
        self
    }

    /// Same value on both sides.
    fn both(&mut self, k: &str, v: impl ToString) -> &mut Self {
        let v = v.to_string();
        self.field(k, &v);
        self.mach(k, v)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fields {
            let _ = writeln!(out, "{k}: {v}");
        }
        for line in &self.body {
            let _ = writeln!(out, "{line}");
        }
        let _ = writeln!(out, "[machine]");
        for (k, v) in &self.machine {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}

/// Exit code and rendered report.
pub struct Outcome {
    pub code: i32,
    pub text: String,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome { code, text: e.to_string() };
        }
    };
    match execute(&cli.command) {
        Ok(r) => Outcome { code: 0, text: r.render() },
        Err(e) => {
            let mut r = Report::new("error");
            r.field("error", &e);
            r.mach("status", "error");
            if let Error::Parse { line, col, .. } = &e {
                r.mach("line", line).mach("col", col);
            }
            Outcome { code: 1, text: r.render() }
        }
    }
}

fn read_source(arg: &str) -> Result<String> {
    std::fs::read_to_string(arg).map_err(|e| Error::Input(format!("cannot read `{arg}`: {e}")))
}

fn load_cert(arg: &str) -> Result<UhfCertificate> {
    if arg.trim_start().starts_with("dims ") {
        UhfCertificate::parse(arg)
    } else {
        UhfCertificate::parse(&read_source(arg)?)
    }
}

/// Parses a point over the stage units of `cert`.
pub fn point(cert: &UhfCertificate, src: &str) -> Result<StarPoly> {
    if src.trim() == "1" {
        return cert.unit_point();
    }
    let resolve = |name: &str, args: &[u64]| -> Option<StarPoly> {
        match (name, args) {
            ("E", &[j, r, s]) => {
                let n = cert.dim_u64(j).ok()?;
                if r == 0 || s == 0 || r > n || s > n {
                    return None;
                }
                cert.stage_unit(j, r - 1, s - 1).ok()
            }
            ("I", &[j]) => cert.apply(j, &StageMatrix::identity(cert.dim_u64(j).ok()?)).ok(),
            _ => None,
        }
    };
    parse_point(src, &resolve)
}

/// A point over canonical generators, written back in the PT grammar.
pub fn show_point(p: &StarPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let terms: Vec<String> = p
        .terms()
        .map(|(m, c)| {
            let mono: Vec<String> = m
                .iter()
                .map(|l| {
                    let (j, r, s) = untriple(l.gen);
                    format!("E({},{},{}){}", j, r + 1, s + 1, if l.star { "^*" } else { "" })
                })
                .collect();
            let mono = mono.join("*");
            if c.is_one() {
                mono
            } else {
                format!("{c}*{mono}")
            }
        })
        .collect();
    terms.join(" + ")
}

struct LabelParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl LabelParser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: 1, col: self.pos + 1, msg: msg.into() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<u64> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().map_err(|_| self.err("integer too large"))
    }

    fn atom(&mut self) -> Result<u64> {
        if self.eat(b'x') {
            return self.int();
        }
        if self.eat(b'p') {
            if !self.eat(b'(') {
                return Err(self.err("expected `(`"));
            }
            let j = self.int()?;
            if !self.eat(b',') {
                return Err(self.err("expected `,`"));
            }
            let r = self.int()?;
            let n = if self.eat(b',') { self.int()? } else { 1 };
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            if n == 0 {
                return Err(self.err("matrix size must be positive"));
            }
            return Ok(DPresentation::generator_code(n as usize, pair(j, r)));
        }
        Err(self.err("expected `x<i>` or `p(j,r)`"))
    }

    fn word(&mut self) -> Result<SgWord> {
        let mut gens = vec![self.atom()?];
        while self.eat(b'*') {
            gens.push(self.atom()?);
        }
        SgWord::new(gens)
    }

    fn label(&mut self) -> Result<GpWord> {
        let mut neg = self.eat(b'-');
        let mut out = GpWord::identity();
        loop {
            let g = gamma(&self.word()?);
            out = out.mul(&if neg { g.inverse() } else { g });
            if self.eat(b'+') {
                neg = false;
            } else if self.eat(b'-') {
                neg = true;
            } else {
                break;
            }
        }
        self.ws();
        if self.pos != self.s.len() {
            return Err(self.err("trailing text"));
        }
        Ok(out)
    }
}

pub fn parse_label(src: &str) -> Result<GpWord> {
    LabelParser { s: src.as_bytes(), pos: 0 }.label()
}

fn execute(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Sn { action } => sn(action),
        Command::Build { sn, cert, stages } => build(sn.as_deref(), cert.as_deref(), *stages),
        Command::Norm { pt, k, cert } => {
            let c = load_cert(&cert.cert)?;
            let p = point(&c, pt)?;
            let iv = limit_norm(&c, &p, *k)?;
            let mut r = Report::new("norm");
            r.field("certificate", c.to_text()).field("point", show_point(&p)).both("k", k);
            r.field("norm", &iv).mach("lo", &iv.lo).mach("hi", &iv.hi).mach("status", "ok");
            Ok(r)
        }
        Command::Trace { pt, k, cert } => {
            let c = load_cert(&cert.cert)?;
            let p = point(&c, pt)?;
            let disk = trace(&c, &p, *k)?;
            let iv = disk.real_interval();
            let mut r = Report::new("trace");
            r.field("certificate", c.to_text()).field("point", show_point(&p)).both("k", k);
            r.both("center", &disk.center).both("radius", &disk.radius).field("real interval", &iv);
            r.mach("lo", &iv.lo).mach("hi", &iv.hi).mach("status", "ok");
            Ok(r)
        }
        Command::Proj { action: ProjAction::Classify { pt, cert } } => classify(&load_cert(&cert.cert)?, pt),
        Command::K0 { action } => k0_cmd(action),
        Command::Iso { a, b, pt, k, fuel } => iso(&load_cert(a)?, &load_cert(b)?, pt, *k, *fuel),
        Command::ExtractCert { pres, stages, fuel } => extract(pres, *stages, *fuel),
        Command::K1 { action: K1Action::Smoke { fuel, labels } } => k1_smoke(*fuel, *labels),
    }
}

fn sn(action: &SnAction) -> Result<Report> {
    let (verb, file) = match action {
        SnAction::Parse { file } => ("sn parse", file),
        SnAction::Print { file } => ("sn print", file),
    };
    let s = Supernatural::parse(&read_source(file)?)?;
    let mut r = Report::new(verb);
    match action {
        SnAction::Parse { .. } => {
            r.both("primes", s.entries().len());
            for (p, e) in s.entries() {
                let shown = match e {
                    Exponent::Finite(e) => e.to_string(),
                    Exponent::Infinite => "inf".into(),
                    Exponent::Machine(m) => format!("machine {m}"),
                };
                r.both(&format!("exponent {p}"), shown);
            }
            for j in 0..6 {
                r.both(&format!("n_{j}"), s.dim(j));
            }
        }
        SnAction::Print { .. } => {
            r.body.extend(s.to_string().lines().map(str::to_string));
            r.mach("lines", s.entries().len());
        }
    }
    r.mach("status", "ok");
    Ok(r)
}

fn build(sn: Option<&str>, cert: Option<&str>, stages: u64) -> Result<Report> {
    let (pres, c) = match (sn, cert) {
        (Some(f), _) => presentation_from_supernatural(&Supernatural::parse(&read_source(f)?)?),
        (None, Some(f)) => {
            let c = load_cert(f)?;
            (effk::uhf::uhf_presentation(&c), c)
        }
        (None, None) => return Err(Error::Input("give --sn or --cert".into())),
    };
    let mut r = Report::new("build");
    r.field("algebra", pres.describe()).both("mode", pres.mode()).field("certificate", c.to_text().replace('\n', "; "));
    for j in 0..stages {
        r.both(&format!("n_{j}"), c.dim(j));
    }
    r.mach("status", "ok");
    Ok(r)
}

fn classify(c: &UhfCertificate, pt: &str) -> Result<Report> {
    let p = point(c, pt)?;
    let stage = p.generators().iter().map(|&g| untriple(g).0).max().unwrap_or(0);
    let m = evaluate(&c.dims, &p)?;
    let mut r = Report::new("proj classify");
    r.field("point", show_point(&p)).both("stage", stage);
    let is_proj = m.is_projection();
    r.both("projection", if is_proj { "yes" } else { "no" });
    if is_proj {
        let t = m.trace();
        let n = c.dim_u64(stage)?;
        let rank = &t.re * BigRational::from_integer(n.into());
        r.both("trace", &t).both("rank", &rank);
        r.both("k0", &t);
        r.both("label", format!("p({stage},{rank})"));
    }
    r.mach("status", "ok");
    Ok(r)
}

fn k0_cmd(action: &K0Action) -> Result<Report> {
    match action {
        K0Action::Eq { l1, l2, cert } => {
            let k = k0_uhf(&load_cert(&cert.cert)?);
            let (a, b) = (parse_label(l1)?, parse_label(l2)?);
            let v = effk::presentations::Presentation::kernel(&k, &a, &b, 0);
            let mut r = Report::new("k0 eq");
            r.field("left", l1).field("right", l2);
            verdict(&mut r, "equal", v);
            Ok(r)
        }
        K0Action::Pos { l, fuel, cert } => {
            let k = k0_uhf(&load_cert(&cert.cert)?);
            let w = parse_label(l)?;
            let mut r = Report::new("k0 pos");
            r.field("label", l);
            match k.cone_decide(&w, *fuel) {
                ConeAnswer::Positive => r.both("positive", "yes").mach("status", "ok"),
                ConeAnswer::NotPositive => r.both("positive", "no").mach("status", "ok"),
                ConeAnswer::Unknown { fuel } => r.both("positive", "unknown").both("fuel", fuel).mach("status", "unknown"),
            };
            Ok(r)
        }
        K0Action::Rat { l, cert } => {
            let k = k0_uhf(&load_cert(&cert.cert)?);
            let q = k0_to_rational(&k, &parse_label(l)?)?;
            let mut r = Report::new("k0 rat");
            r.field("label", l).both("value", &q.value);
            if let Some(s) = q.stage {
                r.both("stage", s);
            }
            r.mach("status", "ok");
            Ok(r)
        }
    }
}

fn verdict(r: &mut Report, key: &str, v: Verdict) {
    match v {
        Verdict::InKernel => r.both(key, "yes").mach("status", "ok"),
        Verdict::NotInKernel => r.both(key, "no").mach("status", "ok"),
        Verdict::Unknown { fuel } => r.both(key, "unknown").both("fuel", fuel).mach("status", "unknown"),
    };
}

fn iso(a: &UhfCertificate, b: &UhfCertificate, pt: &str, k: u32, fuel: u64) -> Result<Report> {
    let p = point(a, pt)?;
    let iso = Isomorphism::new(a.clone(), b.clone(), fuel);
    let img = iso.approx(&p, k)?;
    let mut r = Report::new("iso");
    r.field("source", a.to_text()).field("target", b.to_text()).both("k", k);
    r.field("point", show_point(&p)).field("image", show_point(&img));
    let unit = b.unit_point()?;
    let is_unit = limit_norm(b, &img.sub(&unit), k)?.hi.is_zero();
    r.both("image is 1", if is_unit { "yes" } else { "no" });
    r.both("image trace", effk::uhf::trace_exact(b, &img)?);
    let il = iso.interleaving();
    r.body.push("interleaving:".into());
    r.body.extend(il.to_string().lines().map(str::to_string));
    r.mach("k_seq", il.k_seq.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
    r.mach("l_seq", il.l_seq.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
    r.mach("image", show_point(&img)).mach("status", "ok");
    Ok(r)
}

fn extract(pres: &str, stages: usize, fuel: u64) -> Result<Report> {
    let d = parse_descriptor(&read_source(pres)?)?;
    let a = d.presentation;
    let unit = a.unit().ok_or_else(|| Error::Input("the algebra has no unit point".into()))?;
    let cfg = ExtractConfig { stages, fuel, ..ExtractConfig::default() };
    let ex = extract_certificate(&a, &unit, &cfg)?;
    let mut r = Report::new("extract-cert");
    r.field("algebra", a.describe()).both("stages", stages).both("complete", ex.complete).both("fuel spent", ex.fuel_spent);
    r.field("certificate", ex.certificate.to_text());
    for rep in &ex.reports {
        r.body.push(rep.to_string());
    }
    for d in &ex.diagnostics {
        r.body.push(format!("note: {d}"));
    }
    let dims: Vec<String> = ex.reports.iter().map(|s| s.dim.to_string()).collect();
    r.mach("dims", dims.join(","));
    r.mach("status", if ex.complete { "ok" } else { "unknown" });
    Ok(r)
}

fn k1_smoke(fuel: u64, labels: u64) -> Result<Report> {
    let k = k1(standard_complex(), fuel)?;
    let mut r = Report::new("k1 smoke");
    r.field("algebra", "C").both("fuel", fuel);
    let mut confirmed = 0;
    for t in 0..labels {
        let label = k.include(&GpWord::letter(t));
        let v = effk::presentations::Presentation::kernel(&*k.group, &GpWord::letter(t), &GpWord::identity(), fuel);
        let shown = match v {
            Verdict::InKernel => {
                confirmed += 1;
                "identity".to_string()
            }
            Verdict::NotInKernel => "not identity".to_string(),
            Verdict::Unknown { fuel } => format!("unknown (fuel {fuel})"),
        };
        r.field(&format!("x{t}"), format!("{shown}  [K_0 label {label}]"));
        r.mach(&format!("x{t}"), shown.replace(' ', "_"));
    }
    r.both("confirmed", confirmed);
    r.mach("status", if confirmed == labels { "ok" } else { "unknown" });
    Ok(r)
}
