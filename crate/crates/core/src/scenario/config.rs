//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! [section]
//! key = value   # trailing comment
//! ```
//!
//! All six sections must be present, even if empty. Keys not understood
//! for the chosen options are rejected with their line number.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use crate::boundary::PmlSpec;
use crate::kernel::KernelKind;
use crate::operators::{HMass, Pairing, SecondDerivative, SignMode};

use super::horn::HornGeometry;
use super::ScenarioError;

pub const SECTIONS: [&str; 6] = ["domain", "discretization", "solver", "boundary", "source", "output"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainShape {
    Rectangle {
        nx: usize,
        ny: usize,
        spacing: f64,
    },
    /// Square box of side `2 radius` split into `cells × cells`, with the
    /// cavity wall at `radius`.
    Cylinder {
        radius: f64,
        cells: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Regular,
    Jittered { fraction: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeRule {
    Lattice,
    Voronoi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    ExplicitSpem,
    LafSpem,
    Fdtd,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::ExplicitSpem => "explicit-spem",
            SolverKind::LafSpem => "laf-spem",
            SolverKind::Fdtd => "fdtd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    /// Multiple of `Δt_CFL = min E-spacing / (2c)`.
    CflMultiple(f64),
    Absolute(f64),
    /// Multiple of the explicit stability bound.
    AutoStable(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearSolverKind {
    Direct,
    BiCgStab { tol: f64, max_iter: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind {
    None,
    PecRim,
    Pml(PmlSpec),
    Horn { pml: PmlSpec, geometry: HornGeometry },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceKind {
    None,
    GaussianPulse {
        center: f64,
        width_sq: f64,
    },
    Sinusoid {
        frequency: f64,
    },
    /// Initial condition `Ez = 1 − r²/R²` inside the cavity, zero H.
    Parabola,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Placement {
    Point([f64; 2]),
    Node(usize),
    /// Every free E-node across the horn feed at the source column.
    HornFeed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileCut {
    Column(usize),
    Row(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    None,
    Fdtd,
    Analytic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub sign_mode: SignMode,
    pub h_mass: HMass,
    pub second_derivative: SecondDerivative,
    pub dt_policy: DtPolicy,
    pub steps: usize,
    pub linear_solver: LinearSolverKind,
    /// Step size quoted for the scenario, compared against `Δt` in the log.
    pub nominal_dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceConfig {
    pub kind: SourceKind,
    pub amplitude: f64,
    pub placement: Placement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub name: String,
    pub snapshot_steps: Vec<usize>,
    pub profile: Option<ProfileCut>,
    pub probes: Vec<[f64; 2]>,
    pub reference: Reference,
    pub energy: bool,
    pub stability: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub domain: DomainShape,
    pub kernel: KernelKind,
    pub alpha: f64,
    pub distribution: Distribution,
    pub volumes: VolumeRule,
    pub pairing: Pairing,
    pub solver: SolverConfig,
    pub boundary: BoundaryKind,
    pub source: SourceConfig,
    pub output: OutputConfig,
    /// Defaults applied while parsing, one `section.key = value` per line.
    pub defaults: Vec<String>,
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
    used: bool,
}

struct Section<'a> {
    name: &'static str,
    header_line: usize,
    entries: BTreeMap<String, Entry>,
    defaults: &'a mut Vec<String>,
}

fn err(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Config { line, message: message.into() }
}

impl Section<'_> {
    fn raw(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.get_mut(key).map(|e| {
            e.used = true;
            (e.value.clone(), e.line)
        })
    }

    fn parsed<T: FromStr>(&mut self, key: &str) -> Result<Option<(T, usize)>, ScenarioError>
    where
        T::Err: Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<T>()
                .map(|x| Some((x, line)))
                .map_err(|e| err(line, format!("[{}] {key}: cannot parse `{v}`: {e}", self.name))),
        }
    }

    fn or<T: FromStr + Display>(&mut self, key: &str, default: T) -> Result<(T, usize), ScenarioError>
    where
        T::Err: Display,
    {
        match self.parsed(key)? {
            Some(v) => Ok(v),
            None => {
                self.defaults.push(format!("{}.{key} = {default}", self.name));
                Ok((default, self.header_line))
            }
        }
    }

    fn required<T: FromStr>(&mut self, key: &str) -> Result<(T, usize), ScenarioError>
    where
        T::Err: Display,
    {
        self.parsed(key)?.ok_or_else(|| err(self.header_line, format!("[{}] requires key `{key}`", self.name)))
    }

    fn choice<T: Copy>(
        &mut self,
        key: &str,
        default: &str,
        options: &[(&str, T)],
    ) -> Result<(T, usize), ScenarioError> {
        let (v, line) = self.or::<String>(key, default.to_string())?;
        options.iter().find(|(n, _)| *n == v).map(|(_, t)| (*t, line)).ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            err(line, format!("[{}] {key}: `{v}` is not one of {}", self.name, names.join(", ")))
        })
    }

    fn finish(self) -> Result<(), ScenarioError> {
        let mut unused: Vec<(&String, &Entry)> = self.entries.iter().filter(|(_, e)| !e.used).collect();
        unused.sort_by_key(|(_, e)| e.line);
        match unused.first() {
            Some((k, e)) => Err(err(e.line, format!("[{}] unknown or inapplicable key `{k}`", self.name))),
            None => Ok(()),
        }
    }
}

fn positive(v: f64, line: usize, what: &str) -> Result<f64, ScenarioError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(err(line, format!("{what} must be positive, got {v}")))
    }
}

fn parse_pair(s: &str, line: usize) -> Result<[f64; 2], ScenarioError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(err(line, format!("expected `x, y`, got `{s}`")));
    }
    let x = parts[0].parse::<f64>().map_err(|e| err(line, format!("bad coordinate `{}`: {e}", parts[0])))?;
    let y = parts[1].parse::<f64>().map_err(|e| err(line, format!("bad coordinate `{}`: {e}", parts[1])))?;
    Ok([x, y])
}

/// Header line and entries of each section, by name.
type Sections = BTreeMap<String, (usize, BTreeMap<String, Entry>)>;

/// Splits the text into sections, rejecting syntax errors and duplicates.
fn tokenize(text: &str) -> Result<Sections, ScenarioError> {
    let mut out = Sections::new();
    let mut current: Option<String> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            let name =
                rest.strip_suffix(']').ok_or_else(|| err(line, format!("malformed section header `{body}`")))?.trim();
            if !SECTIONS.contains(&name) {
                return Err(err(line, format!("unknown section [{name}]; expected one of {}", SECTIONS.join(", "))));
            }
            if let Some((first, _)) = out.get(name) {
                return Err(err(line, format!("duplicate section [{name}] (first at line {first})")));
            }
            out.insert(name.to_string(), (line, BTreeMap::new()));
            current = Some(name.to_string());
            continue;
        }
        let (key, value) =
            body.split_once('=').ok_or_else(|| err(line, format!("expected `key = value`, got `{body}`")))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
            return Err(err(line, format!("invalid key `{key}`; keys are lowercase snake_case")));
        }
        if value.is_empty() {
            return Err(err(line, format!("key `{key}` has no value")));
        }
        let section = current.as_ref().ok_or_else(|| err(line, "key outside of any section"))?;
        let entries = &mut out.get_mut(section).expect("section exists").1;
        if let Some(prev) = entries.get(key) {
            return Err(err(line, format!("duplicate key `{key}` at lines {} and {line}", prev.line)));
        }
        entries.insert(key.to_string(), Entry { value: value.to_string(), line, used: false });
    }
    let missing: Vec<&str> = SECTIONS.iter().copied().filter(|s| !out.contains_key(*s)).collect();
    if !missing.is_empty() {
        let line = text.lines().count().max(1);
        return Err(err(line, format!("missing required section(s): [{}]", missing.join("], ["))));
    }
    Ok(out)
}

fn pml_spec(s: &mut Section) -> Result<PmlSpec, ScenarioError> {
    let (layers, line) = s.or("pml_layers", 10usize)?;
    let (order, _) = s.or("pml_order", 3.0)?;
    let (reflection, _) = s.or("pml_reflection", 1e-6)?;
    PmlSpec::new(layers, order, reflection).map_err(|e| err(line, e.to_string()))
}

/// Parses and validates a scenario file.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let mut sections = tokenize(text)?;
    let mut defaults = Vec::new();
    let mut take = |name: &str| sections.remove(name).expect("checked by tokenize");

    let (hl, entries) = take("domain");
    let mut s = Section { name: "domain", header_line: hl, entries, defaults: &mut defaults };
    let (shape, _) = s.choice("shape", "rectangle", &[("rectangle", 0u8), ("cylinder", 1u8)])?;
    let domain = if shape == 0 {
        let (nx, l1) = s.or("nx", 100usize)?;
        let (ny, l2) = s.or("ny", 100usize)?;
        let (spacing, l3) = s.or("spacing", 0.01)?;
        if nx < 2 {
            return Err(err(l1, format!("nx must be at least 2, got {nx}")));
        }
        if ny < 2 {
            return Err(err(l2, format!("ny must be at least 2, got {ny}")));
        }
        DomainShape::Rectangle { nx, ny, spacing: positive(spacing, l3, "spacing")? }
    } else {
        let (radius, l1) = s.or("radius", 0.2)?;
        let (cells, l2) = s.or("cells", 10usize)?;
        if cells < 4 {
            return Err(err(l2, format!("cells must be at least 4, got {cells}")));
        }
        DomainShape::Cylinder { radius: positive(radius, l1, "radius")?, cells }
    };
    s.finish()?;

    let (hl, entries) = take("discretization");
    let mut s = Section { name: "discretization", header_line: hl, entries, defaults: &mut defaults };
    let (kernel, _) = s.choice(
        "kernel",
        "cubic-spline",
        &[("cubic-spline", KernelKind::CubicSpline), ("gaussian", KernelKind::Gaussian)],
    )?;
    let (alpha, la) = s.or("alpha", 0.7075)?;
    let alpha = positive(alpha, la, "alpha")?;
    let (dist, _) = s.choice("distribution", "regular", &[("regular", false), ("jittered", true)])?;
    let distribution = if dist {
        let (fraction, lf) = s.or("jitter_fraction", 0.2)?;
        let (seed, _) = s.or("seed", 42u64)?;
        if !(0.0..0.5).contains(&fraction) {
            return Err(err(lf, format!("jitter_fraction must be in [0, 0.5), got {fraction}")));
        }
        Distribution::Jittered { fraction, seed }
    } else {
        Distribution::Regular
    };
    let (volumes, _) =
        s.choice("volumes", "lattice", &[("lattice", VolumeRule::Lattice), ("voronoi", VolumeRule::Voronoi)])?;
    let (pairing, _) =
        s.choice("pairing", "adjoint", &[("adjoint", Pairing::Adjoint), ("corrected", Pairing::Corrected)])?;
    s.finish()?;

    let (hl, entries) = take("solver");
    let mut s = Section { name: "solver", header_line: hl, entries, defaults: &mut defaults };
    let (kind, _) = s.choice(
        "method",
        "laf-spem",
        &[("explicit-spem", SolverKind::ExplicitSpem), ("laf-spem", SolverKind::LafSpem), ("fdtd", SolverKind::Fdtd)],
    )?;
    let (sign_mode, _) = s.choice(
        "sign_mode",
        "literal-paper",
        &[("literal-paper", SignMode::LiteralPaper), ("standard-plus", SignMode::StandardPlus)],
    )?;
    let (h_mass, _) =
        s.choice("h_mass", "maxwell", &[("maxwell", HMass::Maxwell), ("literal-paper", HMass::LiteralPaper)])?;
    let (second_derivative, _) = s.choice(
        "second_derivative",
        "composite",
        &[
            ("composite", SecondDerivative::Composite),
            ("kernel", SecondDerivative::Kernel),
            ("kernel-normalized", SecondDerivative::KernelNormalized),
        ],
    )?;
    let (policy, _) =
        s.choice("dt_policy", "cfl-multiple", &[("cfl-multiple", 0u8), ("absolute", 1u8), ("auto-stable", 2u8)])?;
    let dt_policy = match policy {
        0 => {
            let (f, l) = s.or("dt_factor", 1.0)?;
            DtPolicy::CflMultiple(positive(f, l, "dt_factor")?)
        }
        1 => {
            let (dt, l) = s.required::<f64>("dt")?;
            DtPolicy::Absolute(positive(dt, l, "dt")?)
        }
        _ => {
            let (f, l) = s.or("dt_factor", 0.9)?;
            DtPolicy::AutoStable(positive(f, l, "dt_factor")?)
        }
    };
    let (steps, _) = s.or("steps", 70usize)?;
    let (ls, _) = s.choice("linear_solver", "direct", &[("direct", false), ("bicgstab", true)])?;
    let linear_solver = if ls {
        let (tol, l) = s.or("solver_tol", 1e-12)?;
        let (max_iter, _) = s.or("solver_max_iter", 5000usize)?;
        LinearSolverKind::BiCgStab { tol: positive(tol, l, "solver_tol")?, max_iter }
    } else {
        LinearSolverKind::Direct
    };
    let nominal_dt = match s.parsed::<f64>("nominal_dt")? {
        Some((v, l)) => Some(positive(v, l, "nominal_dt")?),
        None => None,
    };
    s.finish()?;
    let solver =
        SolverConfig { kind, sign_mode, h_mass, second_derivative, dt_policy, steps, linear_solver, nominal_dt };

    let (hl, entries) = take("boundary");
    let mut s = Section { name: "boundary", header_line: hl, entries, defaults: &mut defaults };
    let default_kind = match domain {
        DomainShape::Cylinder { .. } => "pec-rim",
        DomainShape::Rectangle { .. } => "pml",
    };
    let (bk, bline) =
        s.choice("kind", default_kind, &[("none", 0u8), ("pec-rim", 1u8), ("pml", 2u8), ("horn", 3u8)])?;
    let boundary = match bk {
        0 => BoundaryKind::None,
        1 => BoundaryKind::PecRim,
        2 => BoundaryKind::Pml(pml_spec(&mut s)?),
        _ => {
            let pml = pml_spec(&mut s)?;
            let d = HornGeometry::default();
            let (back_column, _) = s.or("horn_back_column", d.back_column)?;
            let (flare_start, _) = s.or("horn_flare_start", d.flare_start)?;
            let (flare_end, _) = s.or("horn_flare_end", d.flare_end)?;
            let (feed_width, _) = s.or("horn_feed_width", d.feed_width)?;
            let (aperture, _) = s.or("horn_aperture", d.aperture)?;
            let (axis, _) = s.or("horn_axis", d.axis)?;
            let (source_column, _) = s.or("horn_source_column", d.source_column)?;
            let (wall_half_thickness, _) = s.or("horn_wall_half_thickness", d.wall_half_thickness)?;
            let geometry = HornGeometry {
                back_column,
                flare_start,
                flare_end,
                feed_width,
                aperture,
                axis,
                source_column,
                wall_half_thickness,
            };
            geometry.check().map_err(|m| err(bline, m))?;
            if matches!(domain, DomainShape::Cylinder { .. }) {
                return Err(err(bline, "the horn boundary needs a rectangular domain"));
            }
            BoundaryKind::Horn { pml, geometry }
        }
    };
    s.finish()?;

    let (hl, entries) = take("source");
    let mut s = Section { name: "source", header_line: hl, entries, defaults: &mut defaults };
    let (sk, _) = s.choice(
        "kind",
        "gaussian-pulse",
        &[("none", 0u8), ("gaussian-pulse", 1u8), ("sinusoid", 2u8), ("parabola", 3u8)],
    )?;
    let source_kind = match sk {
        0 => SourceKind::None,
        1 => {
            let (center, _) = s.or("center_step", 20.0)?;
            let (width_sq, l) = s.or("width_sq", 72.0)?;
            SourceKind::GaussianPulse { center, width_sq: positive(width_sq, l, "width_sq")? }
        }
        2 => {
            let (f, l) = s.required::<f64>("frequency")?;
            SourceKind::Sinusoid { frequency: positive(f, l, "frequency")? }
        }
        _ => SourceKind::Parabola,
    };
    let (amplitude, la) = s.or("amplitude", 1.0f64)?;
    if !amplitude.is_finite() {
        return Err(err(la, "amplitude must be finite"));
    }
    let placement = match source_kind {
        SourceKind::None | SourceKind::Parabola => Placement::Point([0.0, 0.0]),
        _ => {
            let point = s.raw("point");
            let node = s.parsed::<usize>("node")?;
            let feed = s.parsed::<bool>("horn_feed")?;
            match (point, node, feed) {
                (Some((p, l)), None, None) => Placement::Point(parse_pair(&p, l)?),
                (None, Some((n, _)), None) => Placement::Node(n),
                (None, None, Some((true, l))) => {
                    if !matches!(boundary, BoundaryKind::Horn { .. }) {
                        return Err(err(l, "horn_feed needs [boundary] kind = horn"));
                    }
                    Placement::HornFeed
                }
                (None, None, None) | (None, None, Some((false, _))) => {
                    let c = match domain {
                        DomainShape::Rectangle { nx, ny, spacing } => {
                            [0.5 * nx as f64 * spacing, 0.5 * ny as f64 * spacing]
                        }
                        DomainShape::Cylinder { .. } => [0.0, 0.0],
                    };
                    s.defaults.push(format!("source.point = {}, {}", c[0], c[1]));
                    Placement::Point(c)
                }
                _ => return Err(err(hl, "[source] takes at most one of `point`, `node`, `horn_feed`")),
            }
        }
    };
    s.finish()?;
    if source_kind == SourceKind::Parabola && !matches!(domain, DomainShape::Cylinder { .. }) {
        return Err(err(hl, "the parabola initial condition needs shape = cylinder"));
    }

    let (hl, entries) = take("output");
    let mut s = Section { name: "output", header_line: hl, entries, defaults: &mut defaults };
    let (name, ln) = s.or("name", "scenario".to_string())?;
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(err(ln, format!("name `{name}` may only contain letters, digits, `-` and `_`")));
    }
    let snapshot_steps = match s.raw("snapshot_steps") {
        None => {
            s.defaults.push("output.snapshot_steps = final".into());
            vec![steps]
        }
        Some((v, l)) => {
            let mut out = Vec::new();
            for part in v.split(',').map(str::trim) {
                let n = if part == "final" {
                    steps
                } else {
                    part.parse::<usize>().map_err(|e| err(l, format!("bad snapshot step `{part}`: {e}")))?
                };
                if n > steps {
                    return Err(err(l, format!("snapshot step {n} is beyond the last step {steps}")));
                }
                out.push(n);
            }
            out.sort_unstable();
            out.dedup();
            out
        }
    };
    let profile = match s.raw("profile") {
        None => None,
        Some((v, l)) => match v.split_once(':') {
            _ if v == "none" => None,
            Some(("column", i)) => {
                Some(ProfileCut::Column(i.trim().parse().map_err(|e| err(l, format!("bad profile index: {e}")))?))
            }
            Some(("row", j)) => {
                Some(ProfileCut::Row(j.trim().parse().map_err(|e| err(l, format!("bad profile index: {e}")))?))
            }
            _ => return Err(err(l, format!("profile must be `column:<i>`, `row:<j>` or `none`, got `{v}`"))),
        },
    };
    let probes = match s.raw("probes") {
        None => Vec::new(),
        Some((v, l)) => v.split(';').map(|p| parse_pair(p.trim(), l)).collect::<Result<_, _>>()?,
    };
    let (reference, lr) = s.choice(
        "reference",
        "none",
        &[("none", Reference::None), ("fdtd", Reference::Fdtd), ("analytic", Reference::Analytic)],
    )?;
    if reference == Reference::Analytic && source_kind != SourceKind::Parabola {
        return Err(err(lr, "reference = analytic needs the parabola initial condition"));
    }
    let (energy, _) = s.or("energy", true)?;
    let (stability, _) = s.or("stability", false)?;
    s.finish()?;

    Ok(ScenarioConfig {
        domain,
        kernel,
        alpha,
        distribution,
        volumes,
        pairing,
        solver,
        boundary,
        source: SourceConfig { kind: source_kind, amplitude, placement },
        output: OutputConfig { name, snapshot_steps, profile, probes, reference, energy, stability },
        defaults,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[domain]\n[discretization]\n[solver]\n[boundary]\n[source]\n[output]\n";

    fn line_of(e: ScenarioError) -> usize {
        match e {
            ScenarioError::Config { line, .. } => line,
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn empty_file_lists_sections() {
        let e = parse_config("").unwrap_err();
        let msg = e.to_string();
        for s in SECTIONS {
            assert!(msg.contains(s), "{msg}");
        }
    }

    #[test]
    fn minimal_file_uses_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.domain, DomainShape::Rectangle { nx: 100, ny: 100, spacing: 0.01 });
        assert_eq!(c.solver.steps, 70);
        assert!(c.defaults.iter().any(|d| d == "discretization.alpha = 0.7075"));
        assert_eq!(c.output.snapshot_steps, vec![70]);
    }

    #[test]
    fn duplicate_key_names_both_lines() {
        let text = "[domain]\nnx = 10\nnx = 12\n[discretization]\n[solver]\n[boundary]\n[source]\n[output]\n";
        let e = parse_config(text).unwrap_err();
        assert_eq!(line_of(e.clone()), 3);
        assert!(e.to_string().contains("lines 2 and 3"));
    }

    #[test]
    fn unknown_key_has_line() {
        let text = "[domain]\n[discretization]\n[solver]\nwarp = 9\n[boundary]\n[source]\n[output]\n";
        assert_eq!(line_of(parse_config(text).unwrap_err()), 4);
    }

    #[test]
    fn shape_specific_keys() {
        let text =
            "[domain]\nshape = rectangle\nradius = 0.3\n[discretization]\n[solver]\n[boundary]\n[source]\n[output]\n";
        assert_eq!(line_of(parse_config(text).unwrap_err()), 3);
    }

    #[test]
    fn bad_value_reports_line() {
        let text = "[domain]\n[discretization]\nalpha = -1\n[solver]\n[boundary]\n[source]\n[output]\n";
        assert_eq!(line_of(parse_config(text).unwrap_err()), 3);
    }

    #[test]
    fn snapshot_list() {
        let text = "[domain]\n[discretization]\n[solver]\nsteps = 5\n[boundary]\n[source]\n[output]\nsnapshot_steps = final, 0, 2\n";
        assert_eq!(parse_config(text).unwrap().output.snapshot_steps, vec![0, 2, 5]);
    }
}
