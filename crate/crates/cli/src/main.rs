use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use quiverlc_core::distances::{
    left_lightcone_zq, lightcone_distance_q, lightcone_distance_zq, lightcone_distance_zq_oracle,
    right_lightcone_zq, roundtrip_distance, sphere_in,
};
use quiverlc_core::dot::{emit_dot, emit_quiver_dot, Annotation, RenderSpec};
use quiverlc_core::json::{
    ClassificationJson, DistanceJson, PathCountJson, SectionJson, SectionReportJson, SphereJson, ZVertexJson,
};
use quiverlc_core::paths::{count_paths_windowed, CountOptions};
use quiverlc_core::quiver::{parse_quiver_with_diagnostics, Severity};
use quiverlc_core::sections::{
    build_section, classify, verify_section, windowed_section_quiver, ClassVerdict, VerifyOptions,
};
use quiverlc_core::zq::{split_zvertex, translate};
use quiverlc_core::{
    BaseScope, Budget, ExtDistance, LazyQuiver, Measured, ParseMode, PathCount, Quiver, QuiverSource, Section,
    SphereKind, VertexId, WindowedQuiver, Window, ZVertex,
};

/// Light cone and round trip distances on quivers and their ZQ.
#[derive(Parser)]
#[command(name = "quiverlc", version, about)]
struct Cli {
    #[command(flatten)]
    input: Input,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Quiver file (`vertex <id>` / `arrow <src> <dst> [mult]` lines).
    #[arg(long, global = true, conflicts_with = "family")]
    file: Option<PathBuf>,

    /// Built-in quiver: a-inf-inf-linear, a-inf-ray, figure1-right, a1-tilde-cyclic.
    #[arg(long, global = true)]
    family: Option<String>,

    /// ZQ vertex `n:base` used as center.
    #[arg(long, global = true, allow_hyphen_values = true)]
    center: Option<String>,

    /// Slices [-R, R] and, for integer-indexed families, base indices [-R, R].
    #[arg(long, global = true, default_value_t = 8)]
    window: i64,

    /// Expansion cap per search.
    #[arg(long, global = true, default_value_t = Budget::DEFAULT.0)]
    budget: usize,

    #[arg(long, global = true)]
    json: bool,

    /// Reject arrows whose endpoints were not declared.
    #[arg(long, global = true)]
    strict: bool,

    /// Compute ZQ distances from the light cone definition on a slab.
    #[arg(long, global = true)]
    oracle: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Right light cone distance d(x, y); `n:base` arguments are ZQ vertices.
    Dist {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
        /// Left distance d(y, x) instead.
        #[arg(long)]
        left: bool,
    },
    /// Round trip distance d(x, y) + d(y, x).
    Rtdist {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
    },
    /// Sphere of radius n around a base vertex.
    Sphere {
        #[arg(allow_hyphen_values = true)]
        x: String,
        n: i64,
        #[arg(long, value_enum, default_value_t = Kind::Roundtrip)]
        kind: Kind,
    },
    /// Right and left light cones of --center inside the window.
    Lightcone {
        #[arg(long, value_enum, default_value_t = Side::Both)]
        side: Side,
    },
    /// Check the finiteness conditions (exact for finite quivers, probed for families).
    Classify {
        /// Base vertex for the sphere probes.
        #[arg(long, allow_hyphen_values = true)]
        base: Option<String>,
    },
    /// Section through --center selecting half the round trip distance per orbit.
    Section {
        /// Also print the arrows of the section quiver.
        #[arg(long)]
        induced: bool,
    },
    /// Check a selection (JSON, or `n:base` tokens) against both section criteria.
    VerifySection {
        selection: PathBuf,
        /// Check at most this many vertex pairs for the distance criterion.
        #[arg(long)]
        pair_limit: Option<usize>,
        /// Report every witness rather than the first per criterion.
        #[arg(long)]
        all: bool,
    },
    /// Number of paths (or sectional paths) from a to b in ZQ.
    CountPaths {
        #[arg(allow_hyphen_values = true)]
        a: String,
        /// Target; omit when using --shift.
        #[arg(allow_hyphen_values = true, required_unless_present = "shift")]
        b: Option<String>,
        /// Count paths from a to its n-th inverse translate.
        #[arg(long, conflicts_with = "b")]
        shift: Option<u32>,
        #[arg(long)]
        sectional: bool,
        /// Do not count the empty path.
        #[arg(long)]
        nontrivial: bool,
    },
    /// DOT rendering of the window (or of the quiver itself).
    EmitDot {
        #[arg(long, value_enum, default_value_t = Mode::Plain)]
        mode: Mode,
        /// Render the quiver instead of a ZQ slab.
        #[arg(long)]
        quiver: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Roundtrip,
    Right,
    Left,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    Right,
    Left,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Plain,
    Lightcones,
    Roundtrip,
    Section,
}

enum Source {
    File(Quiver),
    Family(LazyQuiver),
}

struct Ctx {
    source: Source,
    input: Input,
}

impl Ctx {
    fn q(&self) -> &dyn QuiverSource {
        match &self.source {
            Source::File(q) => q,
            Source::Family(f) => f,
        }
    }

    fn finite(&self) -> bool {
        self.q().finite_vertices().is_some()
    }

    fn scope(&self) -> BaseScope {
        if self.finite() {
            BaseScope::All
        } else {
            BaseScope::Interval {
                lo: -self.input.window,
                hi: self.input.window,
            }
        }
    }

    fn window(&self) -> Window {
        Window {
            lo: -self.input.window,
            hi: self.input.window,
            scope: self.scope(),
        }
    }

    fn budget(&self) -> Budget {
        Budget(self.input.budget)
    }

    fn view(&self) -> Result<WindowedQuiver> {
        Ok(WindowedQuiver::new(self.q(), &self.scope())?)
    }

    fn vertex(&self, token: &str) -> Result<VertexId> {
        self.q()
            .resolve(token)
            .ok_or_else(|| anyhow!("unknown vertex `{token}`"))
    }

    fn zvertex(&self, token: &str) -> Result<ZVertex> {
        Ok(ZVertex::parse(token, self.q())?)
    }

    fn center(&self) -> Result<ZVertex> {
        let token = self.input.center.as_deref().ok_or_else(|| anyhow!("--center n:base is required"))?;
        self.zvertex(token)
    }
}

/// A command-line vertex: `n:base` for ZQ, anything else for Q.
enum Point {
    Base(VertexId),
    Z(ZVertex),
}

fn point(ctx: &Ctx, token: &str) -> Result<Point> {
    if let Some(v) = ctx.q().resolve(token) {
        return Ok(Point::Base(v));
    }
    if split_zvertex(token).is_ok() {
        return Ok(Point::Z(ctx.zvertex(token)?));
    }
    Err(anyhow!("unknown vertex `{token}`"))
}

fn load(input: Input) -> Result<Ctx> {
    let source = match (&input.file, &input.family) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mode = if input.strict { ParseMode::Strict } else { ParseMode::Lenient };
            let (q, diagnostics) = parse_quiver_with_diagnostics(&text, mode)?;
            for d in &diagnostics.0 {
                let level = if d.severity == Severity::Error { "error" } else { "warning" };
                eprintln!("{}:{}: {level}: {}", path.display(), d.line, d.message);
            }
            Source::File(q)
        }
        (None, Some(name)) => Source::Family(quiverlc_core::family::family(name)?),
        (None, None) => bail!("one of --file or --family is required"),
        (Some(_), Some(_)) => bail!("--file and --family are mutually exclusive"),
    };
    if input.window < 0 {
        bail!("--window must be nonnegative");
    }
    Ok(Ctx { source, input })
}

fn show_distance(d: ExtDistance) -> String {
    match d {
        ExtDistance::Finite(v) => v.to_string(),
        ExtDistance::Infinite => "inf".to_string(),
        ExtDistance::AtLeast(b) => format!(">={b}"),
    }
}

fn show_count(c: &PathCount) -> String {
    match c {
        PathCount::Finite(n) => n.to_string(),
        PathCount::LowerBound(n) => format!(">={n}"),
        PathCount::Infinite { witness } => {
            let cycle: Vec<String> = witness.iter().map(ToString::to_string).collect();
            format!("inf (cycle {})", cycle.join(" -> "))
        }
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Distances from a windowed view for families; the lazy source directly
/// would only ever produce lower bounds on infinite families.
fn measured(ctx: &Ctx, f: impl Fn(&dyn QuiverSource) -> quiverlc_core::Result<Measured>) -> Result<Measured> {
    if ctx.finite() {
        Ok(f(ctx.q())?)
    } else {
        Ok(f(&ctx.view()?)?)
    }
}

fn dist(ctx: &Ctx, x: &str, y: &str, left: bool) -> Result<Output> {
    let (x, y) = if left { (y, x) } else { (x, y) };
    let (a, b) = match (point(ctx, x)?, point(ctx, y)?) {
        (Point::Base(u), Point::Base(v)) if !ctx.input.oracle => {
            let m = measured(ctx, |q| lightcone_distance_q(q, &u, &v, ctx.budget()))?;
            return distance_output(ctx, &m);
        }
        (Point::Base(u), Point::Base(v)) => (ZVertex::new(0, u), ZVertex::new(0, v)),
        (Point::Z(a), Point::Z(b)) => (a, b),
        _ => bail!("mix of Q and ZQ vertices; write both as `n:base` or neither"),
    };
    let m = if ctx.input.oracle {
        let view = ctx.view()?;
        let height = ctx.input.window.max(view.quiver.vertex_count() as i64);
        let w = Window {
            lo: a.slice,
            hi: a.slice + height,
            scope: BaseScope::All,
        };
        Measured {
            distance: lightcone_distance_zq_oracle(&view, &a, &b, &w)?,
            expansions: 0,
        }
    } else {
        measured(ctx, |q| lightcone_distance_zq(q, &a, &b, ctx.budget()))?
    };
    distance_output(ctx, &m)
}

fn distance_output(ctx: &Ctx, m: &Measured) -> Result<Output> {
    if ctx.input.json {
        Ok(Output::ok(json(&DistanceJson::from(m))?))
    } else {
        Ok(Output::ok(show_distance(m.distance) + "\n"))
    }
}

fn rtdist(ctx: &Ctx, x: &str, y: &str) -> Result<Output> {
    let base = |p| match p {
        Point::Base(v) => v,
        Point::Z(z) => z.base,
    };
    let (u, v) = (base(point(ctx, x)?), base(point(ctx, y)?));
    let m = measured(ctx, |q| roundtrip_distance(q, &u, &v, ctx.budget()))?;
    distance_output(ctx, &m)
}

fn sphere(ctx: &Ctx, x: &str, n: i64, kind: Kind) -> Result<Output> {
    let x = ctx.vertex(x)?;
    let kind = match kind {
        Kind::Roundtrip => SphereKind::RoundTrip,
        Kind::Right => SphereKind::Right,
        Kind::Left => SphereKind::Left,
    };
    let report = sphere_in(&ctx.view()?, kind, &x, n)?;
    if ctx.input.json {
        return Ok(Output::ok(json(&SphereJson::from(&report))?));
    }
    Ok(Output::ok(format!(
        "size: {}\ncomplete: {}\nmembers: {}\n",
        report.members.len(),
        report.complete,
        join(&report.members)
    )))
}

#[derive(Serialize)]
struct ConesJson {
    center: ZVertexJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    right: Option<Vec<ZVertexJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    left: Option<Vec<ZVertexJson>>,
}

fn lightcone(ctx: &Ctx, side: Side) -> Result<Output> {
    let c = ctx.center()?;
    let w = ctx.window();
    let right = (side != Side::Left)
        .then(|| right_lightcone_zq(ctx.q(), &c, &w))
        .transpose()?;
    let left = (side != Side::Right)
        .then(|| left_lightcone_zq(ctx.q(), &c, &w))
        .transpose()?;
    if ctx.input.json {
        let list = |s: &Option<std::collections::BTreeSet<ZVertex>>| {
            s.as_ref().map(|s| s.iter().map(ZVertexJson::from).collect())
        };
        return Ok(Output::ok(json(&ConesJson {
            center: (&c).into(),
            right: list(&right),
            left: list(&left),
        })?));
    }
    let mut text = String::new();
    if let Some(r) = right {
        text += &format!("right: {}\n", join(&r));
    }
    if let Some(l) = left {
        text += &format!("left: {}\n", join(&l));
    }
    Ok(Output::ok(text))
}

fn default_base(ctx: &Ctx) -> Result<VertexId> {
    if let Some(v) = ctx.q().resolve("0") {
        return Ok(v);
    }
    ctx.view()?
        .quiver
        .vertices()
        .next()
        .cloned()
        .ok_or_else(|| anyhow!("empty quiver"))
}

fn classify_cmd(ctx: &Ctx, base: Option<&str>) -> Result<Output> {
    let base = match base {
        Some(b) => ctx.vertex(b)?,
        None => default_base(ctx)?,
    };
    let report = classify(ctx.q(), &base, &ctx.scope(), ctx.input.window)?;
    let code = match report.verdict {
        ClassVerdict::Fails | ClassVerdict::CounterEvidence => 1,
        _ => 0,
    };
    let j = ClassificationJson::from(&report);
    let text = if ctx.input.json {
        json(&j)?
    } else {
        let mut t = format!(
            "verdict: {}\nexact: {}\nacyclic: {}\nconnected: {}\n",
            j.verdict, j.exact, j.acyclic, j.connected
        );
        if let Some(c) = &j.cycle {
            t += &format!("cycle: {}\n", c.join(" -> "));
        }
        if let Some(n) = j.counter_evidence_radius {
            t += &format!("counter-evidence: sphere {n} keeps growing with the window\n");
        }
        for s in &j.spheres {
            let state = if s.complete { "complete" } else { "truncated" };
            t += &format!("sphere {}: size {} {}\n", s.radius, s.size, state);
        }
        t
    };
    Ok(Output { text, code })
}

fn section_cmd(ctx: &Ctx, induced: bool) -> Result<Output> {
    let c = ctx.center()?;
    let s = build_section(ctx.q(), &c, &ctx.scope(), ctx.budget())?;
    let arrows = if induced {
        let view = ctx.view()?;
        Some(windowed_section_quiver(&view, &s)?.quiver)
    } else {
        None
    };
    if ctx.input.json {
        #[derive(Serialize)]
        struct Out {
            #[serde(flatten)]
            section: SectionJson,
            #[serde(skip_serializing_if = "Option::is_none")]
            arrows: Option<Vec<(String, String, u32)>>,
        }
        let arrows = arrows.map(|q| {
            q.arrows()
                .map(|(a, b, m)| (a.to_string(), b.to_string(), m))
                .collect()
        });
        return Ok(Output::ok(json(&Out {
            section: SectionJson::from(&s),
            arrows,
        })?));
    }
    let mut text = String::new();
    for v in s.vertices() {
        text += &format!("{v}\n");
    }
    if let Some(q) = arrows {
        for (a, b, m) in q.arrows() {
            text += &format!("arrow {a} {b}{}\n", if m > 1 { format!(" {m}") } else { String::new() });
        }
    }
    Ok(Output::ok(text))
}

fn read_selection(ctx: &Ctx, path: &PathBuf) -> Result<Section> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let j: SectionJson = serde_json::from_str(&text).context("parsing section JSON")?;
        return Ok(j.resolve(ctx.q())?);
    }
    let mut selection = std::collections::BTreeMap::new();
    for line in text.lines() {
        let content = line.split('#').next().unwrap_or("");
        for t in content.split_whitespace() {
            let (slice, base) = split_zvertex(t)?;
            let base = ctx.q().resolve(base).unwrap_or_else(|| VertexId::name(base));
            if selection.insert(base.clone(), slice).is_some() {
                bail!("orbit `{base}` selected twice");
            }
        }
    }
    Ok(Section::new(selection))
}

fn verify_cmd(ctx: &Ctx, path: &PathBuf, pair_limit: Option<usize>, all: bool) -> Result<Output> {
    let s = read_selection(ctx, path)?;
    let options = VerifyOptions {
        pair_limit,
        all_witnesses: all,
        budget: ctx.budget(),
    };
    let report = verify_section(ctx.q(), &s, &ctx.scope(), options)?;
    let code = if report.valid { 0 } else { 1 };
    let text = if ctx.input.json {
        json(&SectionReportJson::from(&report))?
    } else {
        let mut t = format!(
            "valid: {}\norbit coverage: {}\ndistance criterion: {}\narrow criterion: {}\npairs checked: {}{}\n",
            report.valid,
            report.orbit_coverage,
            report.distance_criterion,
            report.arrow_criterion,
            report.pairs_checked,
            if report.exhaustive { "" } else { " (sampled)" }
        );
        for v in &report.violations {
            t += &format!("violation: {v}\n");
        }
        if let Some(slf) = &report.strong_local_finiteness {
            let verdict = match slf.verdict {
                quiverlc_core::sections::Verdict::Pass => "pass",
                quiverlc_core::sections::Verdict::Fail => "fail",
                quiverlc_core::sections::Verdict::Inconclusive => "inconclusive",
            };
            t += &format!("strongly locally finite: {verdict} ({})\n", slf.note);
        }
        t
    };
    Ok(Output { text, code })
}

fn count_cmd(
    ctx: &Ctx,
    a: &str,
    b: Option<&str>,
    shift: Option<u32>,
    sectional: bool,
    nontrivial: bool,
) -> Result<Output> {
    let a = ctx.zvertex(a)?;
    let b = match (b, shift) {
        (Some(b), _) => ctx.zvertex(b)?,
        (None, Some(n)) => translate(&a, -i64::from(n)),
        (None, None) => bail!("a target or --shift is required"),
    };
    let options = CountOptions {
        sectional,
        nontrivial_only: nontrivial,
    };
    let count = count_paths_windowed(ctx.q(), &a, &b, &ctx.scope(), options)?;
    if ctx.input.json {
        return Ok(Output::ok(json(&PathCountJson::from(&count))?));
    }
    Ok(Output::ok(show_count(&count) + "\n"))
}

fn dot_cmd(ctx: &Ctx, mode: Mode, quiver: bool) -> Result<Output> {
    if quiver {
        let view = ctx.view()?;
        return Ok(Output::ok(emit_quiver_dot(&view.quiver)));
    }
    let annotation = match mode {
        Mode::Plain => Annotation::Plain,
        Mode::Lightcones => Annotation::Lightcones(ctx.center()?),
        Mode::Roundtrip => Annotation::RoundtripLabels(ctx.center()?),
        Mode::Section => {
            let s = build_section(ctx.q(), &ctx.center()?, &ctx.scope(), ctx.budget())?;
            Annotation::Section(s.selection)
        }
    };
    let spec = RenderSpec {
        window: ctx.window(),
        annotation,
    };
    Ok(Output::ok(emit_dot(ctx.q(), &spec)?))
}

fn run(cli: Cli) -> Result<Output> {
    let ctx = load(cli.input)?;
    match &cli.command {
        Command::Dist { x, y, left } => dist(&ctx, x, y, *left),
        Command::Rtdist { x, y } => rtdist(&ctx, x, y),
        Command::Sphere { x, n, kind } => sphere(&ctx, x, *n, *kind),
        Command::Lightcone { side } => lightcone(&ctx, *side),
        Command::Classify { base } => classify_cmd(&ctx, base.as_deref()),
        Command::Section { induced } => section_cmd(&ctx, *induced),
        Command::VerifySection {
            selection,
            pair_limit,
            all,
        } => verify_cmd(&ctx, selection, *pair_limit, *all),
        Command::CountPaths {
            a,
            b,
            shift,
            sectional,
            nontrivial,
        } => count_cmd(&ctx, a, b.as_deref(), *shift, *sectional, *nontrivial),
        Command::EmitDot { mode, quiver } => dot_cmd(&ctx, *mode, *quiver),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.text.as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
