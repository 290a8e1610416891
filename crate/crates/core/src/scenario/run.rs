use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use crate::boundary::{Absorption, PecMask};
use crate::cavity::{BesselModeExpansion, DEFAULT_MODES};
use crate::cloud::{GridSpec, Material, ParticleCloud};
use crate::constants::C0;
use crate::kernel::KernelSpec;
use crate::operators::{
    assemble_explicit_tmz, assemble_implicit_tmz, stability_bound, Derivatives, ExplicitTmz, ImplicitOptions,
    StabilityReport,
};
use crate::source::{nearest_e_node, peak_amplitude, SourceSpec, Waveform};
use crate::sparse::{PowerIteration, SolveMethod};
use crate::stepping::{
    energy, yee_operators, DivergenceGuard, ExplicitStepper, FdtdStepper, FieldsTmz, LafStepper, Stepper, Timings,
};

use super::config::{
    BoundaryKind, Distribution, DomainShape, DtPolicy, LinearSolverKind, Placement, ProfileCut, Reference,
    ScenarioConfig, SolverKind, SourceKind, VolumeRule,
};
use super::snapshot::{relative_l2, Snapshot};
use super::ScenarioError;

/// Everything a run needs before operators are assembled.
#[derive(Debug, Clone)]
pub struct Setup {
    /// The cloud the solver runs on.
    pub cloud: ParticleCloud,
    /// The unjittered cloud with the same indexing.
    pub lattice_cloud: ParticleCloud,
    pub kernel: KernelSpec,
    pub pec: Option<PecMask>,
    pub absorption: Option<Absorption>,
    pub sources: Vec<SourceSpec>,
    pub initial_ez: Option<Vec<f64>>,
    /// `min E-spacing / (2c)`.
    pub dt_cfl: f64,
    pub log: Vec<String>,
}

fn radius(p: &[f64; 3]) -> f64 {
    (p[0] * p[0] + p[1] * p[1]).sqrt()
}

/// Builds the cloud, boundary masks and sources of a scenario.
pub fn build_setup(cfg: &ScenarioConfig) -> Result<Setup, ScenarioError> {
    let mut log = Vec::new();
    let grid = match cfg.domain {
        DomainShape::Rectangle { nx, ny, spacing } => GridSpec::new(nx, ny, spacing),
        DomainShape::Cylinder { radius, cells } => {
            GridSpec::new(cells, cells, 2.0 * radius / cells as f64).with_origin(-radius, -radius)
        }
    };
    let lattice_cloud = ParticleCloud::regular(grid, cfg.alpha, Material::VACUUM)?;
    let kernel = KernelSpec::new(cfg.kernel, 2).map_err(|e| ScenarioError::Setup(e.to_string()))?;
    let lattice = lattice_cloud.lattice.expect("regular clouds carry a lattice");

    let pml = match cfg.boundary {
        BoundaryKind::Pml(spec) | BoundaryKind::Horn { pml: spec, .. } => Some(spec),
        _ => None,
    };
    let mut cloud = match cfg.distribution {
        Distribution::Regular => lattice_cloud.clone(),
        Distribution::Jittered { fraction, seed } => {
            let dr = lattice_cloud.spacing;
            let (lo, hi) = (lattice_cloud.lower, lattice_cloud.upper);
            let base = &lattice_cloud;
            base.jitter_where(fraction, seed, |_, p| {
                let rim = (0..2).any(|a| p[a] - lo[a] < dr - 1e-12 * dr || hi[a] - p[a] < dr - 1e-12 * dr);
                let layer = pml.is_some_and(|s| Absorption::inside(base, &s, p));
                !(rim || layer)
            })?
        }
    };
    if cfg.volumes == VolumeRule::Voronoi {
        cloud = cloud.with_voronoi_volumes()?;
    }

    let mut pec = match cfg.boundary {
        BoundaryKind::None | BoundaryKind::Pml(_) => None,
        BoundaryKind::PecRim => Some(PecMask::rim(&cloud)),
        BoundaryKind::Horn { geometry, .. } => Some(geometry.mask(&lattice)),
    };
    if let DomainShape::Cylinder { radius: r0, .. } = cfg.domain {
        let wall = PecMask::from_fn(&cloud, |_, p| radius(p) >= r0);
        pec = Some(match pec {
            Some(m) => m.union(&wall)?,
            None => wall,
        });
    }
    let absorption = match pml {
        Some(spec) => Some(Absorption::pml(&cloud, &spec)?),
        None => None,
    };

    let waveform = match cfg.source.kind {
        SourceKind::GaussianPulse { center, width_sq } => Some(Waveform::GaussianPulse { center, width_sq }),
        SourceKind::Sinusoid { frequency } => Some(Waveform::Sinusoid { frequency }),
        SourceKind::None | SourceKind::Parabola => None,
    };
    let mut sources = Vec::new();
    if let Some(w) = waveform {
        let nodes = match cfg.source.placement {
            Placement::Point(p) => vec![nearest_e_node(&lattice_cloud, &[p[0], p[1], 0.0])],
            Placement::Node(n) => vec![n],
            Placement::HornFeed => match cfg.boundary {
                BoundaryKind::Horn { geometry, .. } => geometry.feed_nodes(&lattice),
                _ => return Err(ScenarioError::Setup("horn feed source without a horn".into())),
            },
        };
        for n in nodes {
            let s = SourceSpec::new(n, cfg.source.amplitude, w);
            s.check(cloud.e.len())?;
            sources.push(s);
        }
        log.push(format!("sources: {} node(s), first at E-node {}", sources.len(), sources[0].node));
    }

    let initial_ez = match (cfg.source.kind, cfg.domain) {
        (SourceKind::Parabola, DomainShape::Cylinder { radius: r0, .. }) => {
            let mut ez: Vec<f64> =
                cloud.e.positions.iter().map(|p| (1.0 - (radius(p) / r0).powi(2)).max(0.0)).collect();
            if let Some(m) = &pec {
                m.apply(&mut ez);
            }
            Some(ez)
        }
        _ => None,
    };

    let dt_cfl = cloud.min_e_spacing() / (2.0 * C0);
    log.push(format!(
        "nodes: {} E, {} H; spacing {:e} m; alpha {}",
        cloud.e.len(),
        cloud.h.len(),
        cloud.spacing,
        cfg.alpha
    ));
    log.push(format!("dt_cfl_s = {dt_cfl:e} (minimum E-node spacing {:e} m)", 2.0 * C0 * dt_cfl));
    if let Some(m) = &pec {
        log.push(format!("pec nodes: {}", m.count()));
    }
    Ok(Setup { cloud, lattice_cloud, kernel, pec, absorption, sources, initial_ez, dt_cfl, log })
}

/// FDTD configuration on the unjittered lattice reaching the same final
/// time as `cfg` run at `dt`. The reference step is the largest step not
/// above `Δr / (2c)` that divides the final time; pulse parameters given in
/// steps are rescaled to keep the same physical waveform.
pub fn reference_config(cfg: &ScenarioConfig, dt: f64) -> Result<ScenarioConfig, ScenarioError> {
    let mut r = cfg.clone();
    let spacing = match cfg.domain {
        DomainShape::Rectangle { spacing, .. } => spacing,
        DomainShape::Cylinder { radius, cells } => 2.0 * radius / cells as f64,
    };
    let final_time = cfg.solver.steps as f64 * dt;
    let limit = spacing / (2.0 * C0);
    let ratio = final_time / limit;
    // Tolerate round-off so that equal steps stay equal.
    let whole = (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0);
    let steps = (if whole { ratio.round() } else { ratio.ceil() }).max(1.0) as usize;
    let dt_ref = if cfg.solver.steps == 0 {
        limit
    } else if steps == cfg.solver.steps {
        dt
    } else {
        final_time / steps as f64
    };
    if let SourceKind::GaussianPulse { center, width_sq } = cfg.source.kind {
        let scale = dt / dt_ref;
        r.source.kind = SourceKind::GaussianPulse { center: center * scale, width_sq: width_sq * scale * scale };
    }
    r.distribution = Distribution::Regular;
    r.volumes = VolumeRule::Lattice;
    r.solver.kind = SolverKind::Fdtd;
    r.solver.dt_policy = DtPolicy::Absolute(dt_ref);
    r.solver.steps = if cfg.solver.steps == 0 { 0 } else { steps };
    r.output.reference = Reference::None;
    r.output.snapshot_steps = vec![r.solver.steps];
    r.output.probes.clear();
    r.output.stability = false;
    r.output.energy = false;
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub reference: Option<f64>,
}

/// `(step, time, value)` of one recorded sample.
pub type Sample = (usize, f64, f64);

/// Result of one scenario run, held in memory.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: String,
    pub solver: &'static str,
    pub cloud: ParticleCloud,
    pub dt: f64,
    pub dt_cfl: f64,
    pub fields: FieldsTmz,
    pub snapshots: Vec<Snapshot>,
    pub probes: Vec<(usize, Vec<Sample>)>,
    /// `(step, time, energy)`.
    pub energy: Vec<Sample>,
    /// Largest `max |Ez|` seen over the run, including the initial state.
    pub peak_ez: f64,
    pub initial_max_ez: f64,
    /// Largest `|Ez|` on a PEC node over all steps.
    pub pec_audit: f64,
    pub profile: Option<Vec<ProfileRow>>,
    /// Relative L2 of the final Ez against the reference, over all E-nodes
    /// (FDTD) or the free nodes inside the cavity (analytic).
    pub l2_ez: Option<f64>,
    pub l2_profile: Option<f64>,
    /// Final Ez of the reference run.
    pub reference_ez: Option<Vec<f64>>,
    pub stability: Option<StabilityReport>,
    pub timings: Timings,
    pub setup_time: Duration,
    pub reference_time: Duration,
    pub log: Vec<String>,
}

impl Outcome {
    /// Deterministic metrics as `(key, value)` pairs.
    pub fn metrics(&self) -> Vec<(String, String)> {
        let mut m = vec![
            ("scenario".to_string(), self.name.clone()),
            ("solver".into(), self.solver.into()),
            ("steps".into(), self.fields.step.to_string()),
            ("dt_s".into(), format!("{:.16e}", self.dt)),
            ("dt_cfl_s".into(), format!("{:.16e}", self.dt_cfl)),
            ("dt_over_dt_cfl".into(), format!("{:.16e}", self.dt / self.dt_cfl)),
            ("e_nodes".into(), self.cloud.e.len().to_string()),
            ("h_nodes".into(), self.cloud.h.len().to_string()),
            ("final_time_s".into(), format!("{:.16e}", self.fields.e_time())),
            ("initial_max_ez".into(), format!("{:.16e}", self.initial_max_ez)),
            ("final_max_ez".into(), format!("{:.16e}", self.fields.max_abs_ez())),
            ("peak_max_ez".into(), format!("{:.16e}", self.peak_ez)),
            ("pec_audit_max_ez".into(), format!("{:.16e}", self.pec_audit)),
        ];
        if let Some((_, _, e)) = self.energy.last() {
            m.push(("final_energy_j_per_m".into(), format!("{e:.16e}")));
        }
        if let Some(v) = self.l2_ez {
            m.push(("l2_ez".into(), format!("{v:.16e}")));
        }
        if let Some(v) = self.l2_profile {
            m.push(("l2_profile".into(), format!("{v:.16e}")));
        }
        if let Some(s) = &self.stability {
            m.push(("dt_bound_s".into(), format!("{:.16e}", s.dt_bound)));
            m.push(("explicit_unstable".into(), s.explicit_unstable.to_string()));
        }
        m
    }
}

/// Derivative matrices (particle solvers only) and the explicit operators.
pub(super) fn explicit_operators(
    cfg: &ScenarioConfig,
    setup: &Setup,
) -> Result<(Option<Derivatives>, ExplicitTmz), ScenarioError> {
    if cfg.solver.kind == SolverKind::Fdtd {
        if !matches!(cfg.distribution, Distribution::Regular) || cfg.volumes != VolumeRule::Lattice {
            return Err(ScenarioError::Setup("the fdtd solver needs a regular cloud with lattice volumes".into()));
        }
        return Ok((None, yee_operators(&setup.cloud)?));
    }
    let d = Derivatives::assemble(&setup.cloud, &setup.kernel, cfg.pairing)?;
    let ops = assemble_explicit_tmz(&setup.cloud, &d)?;
    Ok((Some(d), ops))
}

/// Applies the time-step policy. The auto-stable policy also returns the
/// report it was derived from.
pub(super) fn resolve_dt(
    cfg: &ScenarioConfig,
    setup: &Setup,
    explicit: &ExplicitTmz,
) -> Result<(f64, Option<StabilityReport>), ScenarioError> {
    Ok(match cfg.solver.dt_policy {
        DtPolicy::CflMultiple(f) => (f * setup.dt_cfl, None),
        DtPolicy::Absolute(dt) => (dt, None),
        DtPolicy::AutoStable(f) => {
            let r = stability_bound(&setup.cloud, explicit, setup.pec.as_ref(), None, &PowerIteration::default())?;
            (f * r.dt_bound, Some(r))
        }
    })
}

enum AnyStepper {
    Explicit(ExplicitStepper),
    Laf(Box<LafStepper>),
    Fdtd(FdtdStepper),
}

impl AnyStepper {
    fn as_dyn(&mut self) -> &mut dyn Stepper {
        match self {
            AnyStepper::Explicit(s) => s,
            AnyStepper::Laf(s) => s.as_mut(),
            AnyStepper::Fdtd(s) => s,
        }
    }
}

fn profile_nodes(cloud: &ParticleCloud, cut: ProfileCut) -> Result<Vec<usize>, ScenarioError> {
    let lat = cloud.lattice.ok_or_else(|| ScenarioError::Runtime("profile cuts need a lattice".into()))?;
    match cut {
        ProfileCut::Column(i) if i < lat.nx => Ok((0..lat.ny).map(|j| lat.e_index(i, j, 0)).collect()),
        ProfileCut::Row(j) if j < lat.ny => Ok((0..lat.nx).map(|i| lat.e_index(i, j, 0)).collect()),
        _ => Err(ScenarioError::Runtime(format!("profile cut {cut:?} lies outside the {}x{} lattice", lat.nx, lat.ny))),
    }
}

/// Runs a scenario in memory, including its reference run.
pub fn simulate(cfg: &ScenarioConfig) -> Result<Outcome, ScenarioError> {
    let t0 = Instant::now();
    let setup = build_setup(cfg)?;
    let setup_time = t0.elapsed();
    let mut log = setup.log.clone();
    let mut timings = Timings::default();
    let cloud = &setup.cloud;

    let t = Instant::now();
    let (derivatives, explicit) = explicit_operators(cfg, &setup)?;
    timings.assembly = t.elapsed();

    let (dt, mut stability) = resolve_dt(cfg, &setup, &explicit)?;
    log.push(format!("dt_s = {dt:e} ({:.6} x dt_cfl)", dt / setup.dt_cfl));
    if let Some(nominal) = cfg.solver.nominal_dt {
        log.push(format!(
            "nominal step {nominal:e} s differs from dt_cfl {:e} s by {:+.3}%",
            setup.dt_cfl,
            100.0 * (nominal / setup.dt_cfl - 1.0)
        ));
    }
    let power = PowerIteration::default();
    if cfg.output.stability {
        stability = Some(stability_bound(cloud, &explicit, setup.pec.as_ref(), Some(dt), &power)?);
    }
    if let Some(s) = &stability {
        log.extend(s.lines().into_iter().map(|l| format!("stability: {l}")));
    }

    let method = match cfg.solver.linear_solver {
        LinearSolverKind::Direct => SolveMethod::Direct,
        LinearSolverKind::BiCgStab { tol, max_iter } => SolveMethod::BiCgStab { tol, max_iter },
    };
    let absorption = setup.absorption.as_ref();
    let mut fields = FieldsTmz::zeros(cloud, dt, crate::stepping::TimeConvention::Leapfrog);
    if let Some(ez) = &setup.initial_ez {
        fields.ez = ez.clone();
    }
    let mut stepper = match cfg.solver.kind {
        SolverKind::ExplicitSpem => AnyStepper::Explicit(ExplicitStepper::new(
            cloud,
            explicit.clone(),
            dt,
            setup.pec.clone(),
            setup.sources.clone(),
            absorption,
        )?),
        SolverKind::Fdtd => {
            let s = FdtdStepper::new(cloud, dt, setup.pec.clone(), setup.sources.clone(), absorption)?;
            if s.cfl_exceeded {
                log.push(format!(
                    "warning: dt {dt:e} s exceeds the Courant limit {:e} s",
                    FdtdStepper::courant_limit(cloud)
                ));
            }
            AnyStepper::Fdtd(s)
        }
        SolverKind::LafSpem => {
            let t = Instant::now();
            let options = ImplicitOptions {
                sign_mode: cfg.solver.sign_mode,
                h_mass: cfg.solver.h_mass,
                second_derivative: cfg.solver.second_derivative,
            };
            let d = derivatives.as_ref().expect("assembled for particle solvers");
            let ops = assemble_implicit_tmz(cloud, d, &setup.kernel, dt, options, absorption)?;
            timings.assembly += t.elapsed();
            let s = LafStepper::new(cloud, ops, method, setup.pec.clone(), setup.sources.clone())?;
            timings.factorization = s.factorization_time();
            log.push(format!(
                "laf: sign_mode={} h_mass={} second_derivative={} split={}",
                options.sign_mode.name(),
                options.h_mass.name(),
                options.second_derivative.name(),
                s.is_split()
            ));
            AnyStepper::Laf(Box::new(s))
        }
    };
    fields.convention = stepper.as_dyn().convention();
    if setup.initial_ez.is_some() {
        match &stepper {
            AnyStepper::Explicit(s) => s.initialise_at_rest(&mut fields)?,
            AnyStepper::Fdtd(s) => s.initialise_at_rest(&mut fields)?,
            AnyStepper::Laf(s) => s.initialise_at_rest(&explicit, &mut fields)?,
        }
    }
    let solver_name = stepper.as_dyn().name();

    let initial_max_ez = fields.max_abs_ez();
    let guard = DivergenceGuard::for_amplitude(peak_amplitude(&setup.sources).max(fields.max_abs()));
    let probe_nodes: Vec<usize> =
        cfg.output.probes.iter().map(|p| nearest_e_node(&setup.lattice_cloud, &[p[0], p[1], 0.0])).collect();
    let mut probes: Vec<(usize, Vec<Sample>)> = probe_nodes.iter().map(|&n| (n, Vec::new())).collect();
    let mut energy_trace = Vec::new();
    let mut snapshots = Vec::new();
    let mut pec_audit = 0.0f64;
    let mut peak_ez = initial_max_ez;
    let name = cfg.output.name.clone();

    let mut record = |f: &FieldsTmz,
                      probes: &mut Vec<(usize, Vec<Sample>)>,
                      snapshots: &mut Vec<Snapshot>,
                      energy_trace: &mut Vec<Sample>| {
        for (n, trace) in probes.iter_mut() {
            trace.push((f.step, f.e_time(), f.ez[*n]));
        }
        if cfg.output.energy {
            energy_trace.push((f.step, f.e_time(), energy(cloud, f)));
        }
        if cfg.output.snapshot_steps.contains(&f.step) {
            snapshots.push(Snapshot::capture(&name, solver_name, cloud, f));
        }
        if let Some(m) = &setup.pec {
            pec_audit = pec_audit.max(m.audit(&f.ez));
        }
        peak_ez = peak_ez.max(f.max_abs_ez());
    };
    record(&fields, &mut probes, &mut snapshots, &mut energy_trace);
    let t = Instant::now();
    for _ in 0..cfg.solver.steps {
        stepper.as_dyn().step(&mut fields)?;
        guard.check(&fields)?;
        record(&fields, &mut probes, &mut snapshots, &mut energy_trace);
    }
    timings.stepping = t.elapsed();
    timings.solves = stepper.as_dyn().solve_time();

    let mut profile = match cfg.output.profile {
        Some(cut) => Some(
            profile_nodes(cloud, cut)?
                .into_iter()
                .map(|i| ProfileRow {
                    index: i,
                    x: cloud.e.positions[i][0],
                    y: cloud.e.positions[i][1],
                    value: fields.ez[i],
                    reference: None,
                })
                .collect::<Vec<_>>(),
        ),
        None => None,
    };

    let mut l2_ez = None;
    let mut l2_profile = None;
    let mut reference_ez = None;
    let t = Instant::now();
    match cfg.output.reference {
        Reference::None => {}
        Reference::Fdtd => {
            let rcfg = reference_config(cfg, dt)?;
            let r = simulate(&rcfg)?;
            log.push(format!(
                "reference: fdtd, {} steps of {:e} s, final time {:e} s",
                rcfg.solver.steps,
                r.dt,
                r.fields.e_time()
            ));
            l2_ez = Some(relative_l2(&fields.ez, &r.fields.ez));
            if let Some(rows) = profile.as_mut() {
                for row in rows.iter_mut() {
                    row.reference = Some(r.fields.ez[row.index]);
                }
                let a: Vec<f64> = rows.iter().map(|r| r.value).collect();
                let b: Vec<f64> = rows.iter().map(|r| r.reference.unwrap_or(0.0)).collect();
                l2_profile = Some(relative_l2(&a, &b));
            }
            reference_ez = Some(r.fields.ez);
        }
        Reference::Analytic => {
            let r0 = match cfg.domain {
                DomainShape::Cylinder { radius, .. } => radius,
                DomainShape::Rectangle { .. } => unreachable!("checked when parsing"),
            };
            let modes = BesselModeExpansion::project(r0, DEFAULT_MODES)?;
            let time = fields.e_time();
            let exact: Vec<f64> = cloud
                .e
                .positions
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let free = setup.pec.as_ref().is_none_or(|m| !m.contains(i));
                    if free && radius(p) < r0 {
                        modes.exact_ez(radius(p), time, C0)
                    } else {
                        Ok(0.0)
                    }
                })
                .collect::<Result<_, _>>()?;
            let free: Vec<usize> = (0..cloud.e.len())
                .filter(|&i| exact[i] != 0.0 || radius(&cloud.e.positions[i]) < r0)
                .filter(|&i| setup.pec.as_ref().is_none_or(|m| !m.contains(i)))
                .collect();
            let a: Vec<f64> = free.iter().map(|&i| fields.ez[i]).collect();
            let b: Vec<f64> = free.iter().map(|&i| exact[i]).collect();
            l2_ez = Some(relative_l2(&a, &b));
            log.push(format!("reference: Fourier-Bessel series with {DEFAULT_MODES} modes at t = {time:e} s"));
            if let Some(rows) = profile.as_mut() {
                for row in rows.iter_mut() {
                    row.reference = Some(exact[row.index]);
                }
            }
            reference_ez = Some(exact);
        }
    }
    let reference_time = t.elapsed();

    Ok(Outcome {
        name,
        solver: solver_name,
        cloud: setup.cloud.clone(),
        dt,
        dt_cfl: setup.dt_cfl,
        fields,
        snapshots,
        probes,
        energy: energy_trace,
        peak_ez,
        initial_max_ez,
        pec_audit,
        profile,
        l2_ez,
        l2_profile,
        reference_ez,
        stability,
        timings,
        setup_time,
        reference_time,
        log,
    })
}

fn write(path: &Path, text: &str) -> Result<(), ScenarioError> {
    fs::write(path, text).map_err(|e| ScenarioError::io(path, e))
}

/// Writes the artifact files of a finished run into `dir`.
pub fn write_artifact(cfg: &ScenarioConfig, out: &Outcome, dir: &Path) -> Result<(), ScenarioError> {
    fs::create_dir_all(dir).map_err(|e| ScenarioError::io(dir, e))?;
    for s in &out.snapshots {
        s.write(&dir.join(format!("snapshot_{:06}.csv", s.step)))?;
    }
    for (k, (node, trace)) in out.probes.iter().enumerate() {
        let mut t = format!("# probe={k} node={node}\nstep,time_s,value\n");
        for (step, time, v) in trace {
            let _ = writeln!(t, "{step},{time:.16e},{v:.16e}");
        }
        write(&dir.join(format!("probe_{k}.csv")), &t)?;
    }
    if !out.energy.is_empty() {
        let mut t = String::from("step,time_s,energy\n");
        for (step, time, e) in &out.energy {
            let _ = writeln!(t, "{step},{time:.16e},{e:.16e}");
        }
        write(&dir.join("energy.csv"), &t)?;
    }
    if let Some(rows) = &out.profile {
        let mut t = String::from("node,x,y,ez,reference\n");
        for r in rows {
            let reference = r.reference.map(|v| format!("{v:.16e}")).unwrap_or_default();
            let _ = writeln!(t, "{},{:.16e},{:.16e},{:.16e},{}", r.index, r.x, r.y, r.value, reference);
        }
        write(&dir.join("profile.csv"), &t)?;
    }
    if let Some(s) = &out.stability {
        write(&dir.join("stability.txt"), &(s.lines().join("\n") + "\n"))?;
    }
    let mut m = String::from("key,value\n");
    for (k, v) in out.metrics() {
        let _ = writeln!(m, "{k},{v}");
    }
    write(&dir.join("metrics.csv"), &m)?;
    let tm = &out.timings;
    let timing = format!(
        "phase,seconds\nsetup,{:.6}\nassembly,{:.6}\nfactorization,{:.6}\nstepping,{:.6}\nsolves,{:.6}\nreference,{:.6}\n",
        out.setup_time.as_secs_f64(),
        tm.assembly.as_secs_f64(),
        tm.factorization.as_secs_f64(),
        tm.stepping.as_secs_f64(),
        tm.solves.as_secs_f64(),
        out.reference_time.as_secs_f64()
    );
    write(&dir.join("timings.csv"), &timing)?;
    let mut log = String::new();
    let _ = writeln!(log, "scenario {} ({})", cfg.output.name, out.solver);
    for d in &cfg.defaults {
        let _ = writeln!(log, "default: {d}");
    }
    for l in &out.log {
        let _ = writeln!(log, "{l}");
    }
    write(&dir.join("run.log"), &log)?;
    Ok(())
}

/// Runs a scenario and writes its artifact. On failure, `run.log` in `dir`
/// records the error.
pub fn run_scenario(cfg: &ScenarioConfig, dir: &Path) -> Result<Outcome, ScenarioError> {
    match simulate(cfg) {
        Ok(out) => {
            write_artifact(cfg, &out, dir)?;
            Ok(out)
        }
        Err(e) => {
            fs::create_dir_all(dir).map_err(|io| ScenarioError::io(dir, io))?;
            let mut log = format!("scenario {}\n", cfg.output.name);
            for d in &cfg.defaults {
                let _ = writeln!(log, "default: {d}");
            }
            let _ = writeln!(log, "error: {e}");
            write(&dir.join("run.log"), &log)?;
            Err(e)
        }
    }
}
