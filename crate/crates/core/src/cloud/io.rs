use std::fs;
use std::io::Write;
use std::path::Path;

use super::{CloudError, Facing, NodeSet, ParticleCloud};

const HEADER: &str = "role,x,y,h,vol,eps,mu,sigma";

fn role_tag(role: super::Role, facing: Option<Facing>) -> &'static str {
    match (role, facing) {
        (super::Role::E, _) => "E",
        (super::Role::H, Some(Facing::X)) => "H:x",
        (super::Role::H, Some(Facing::Y)) => "H:y",
        (super::Role::H, Some(Facing::Z)) => "H:z",
        (super::Role::H, _) => "H",
    }
}

/// Writes a 2-D cloud as CSV. A leading comment line records the lattice
/// spacing, smoothing ratio and domain box; values use 17 significant digits.
pub fn write_cloud_csv(cloud: &ParticleCloud, path: &Path) -> Result<(), CloudError> {
    if cloud.dim != 2 {
        return Err(CloudError::InvalidParameter("cloud CSV holds 2-D clouds only".into()));
    }
    let mut out = Vec::new();
    let io_err = |e: std::io::Error| CloudError::Io { path: path.display().to_string(), message: e.to_string() };
    writeln!(
        out,
        "# spacing={:.16e} alpha={:.16e} lower={:.16e},{:.16e} upper={:.16e},{:.16e}",
        cloud.spacing, cloud.alpha, cloud.lower[0], cloud.lower[1], cloud.upper[0], cloud.upper[1]
    )
    .map_err(io_err)?;
    writeln!(out, "{HEADER}").map_err(io_err)?;
    for (role, set) in [(super::Role::E, &cloud.e), (super::Role::H, &cloud.h)] {
        for i in 0..set.len() {
            let facing = if role == super::Role::H { Some(cloud.facing[i]) } else { None };
            let p = set.positions[i];
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                role_tag(role, facing),
                p[0],
                p[1],
                set.smoothing[i],
                set.volumes[i],
                set.eps[i],
                set.mu[i],
                set.sigma[i]
            )
            .map_err(io_err)?;
        }
    }
    fs::write(path, out).map_err(io_err)
}

/// Reads a cloud written by [`write_cloud_csv`]. Without the leading comment
/// line the spacing is taken from the median E volume and the box from the
/// node extent padded by half a spacing.
pub fn read_cloud_csv(path: &Path) -> Result<ParticleCloud, CloudError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CloudError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let mut meta: Option<(f64, f64, [f64; 2], [f64; 2])> = None;
    let mut e = NodeSet::default();
    let mut h = NodeSet::default();
    let mut facing = Vec::new();
    let mut saw_header = false;
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let perr = |m: String| CloudError::Parse { line: lineno, message: m };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            meta = Some(parse_meta(rest).map_err(perr)?);
            continue;
        }
        if !saw_header {
            if line != HEADER {
                return Err(perr(format!("expected header '{HEADER}'")));
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(perr(format!("expected 8 columns, found {}", fields.len())));
        }
        let mut v = [0.0; 7];
        for (slot, s) in v.iter_mut().zip(&fields[1..]) {
            *slot = s.trim().parse::<f64>().map_err(|_| perr(format!("invalid number '{s}'")))?;
        }
        let (set, tag) = match fields[0].trim() {
            "E" => (&mut e, None),
            "H" => (&mut h, Some(Facing::Any)),
            "H:x" => (&mut h, Some(Facing::X)),
            "H:y" => (&mut h, Some(Facing::Y)),
            "H:z" => (&mut h, Some(Facing::Z)),
            other => return Err(perr(format!("unknown role '{other}'"))),
        };
        set.positions.push([v[0], v[1], 0.0]);
        set.smoothing.push(v[2]);
        set.volumes.push(v[3]);
        set.eps.push(v[4]);
        set.mu.push(v[5]);
        set.sigma.push(v[6]);
        if let Some(f) = tag {
            facing.push(f);
        }
    }
    if !saw_header {
        return Err(CloudError::Parse { line: 1, message: "missing header".into() });
    }
    if e.is_empty() {
        return Err(CloudError::InvalidParameter("cloud has no E-nodes".into()));
    }
    let (spacing, alpha, lo, hi) = match meta {
        Some(m) => m,
        None => {
            let mut vols = e.volumes.clone();
            vols.sort_by(f64::total_cmp);
            let spacing = vols[vols.len() / 2].sqrt();
            let alpha = e.smoothing[0] / spacing;
            let mut lo = [f64::INFINITY; 2];
            let mut hi = [f64::NEG_INFINITY; 2];
            for p in e.positions.iter().chain(&h.positions) {
                for a in 0..2 {
                    lo[a] = lo[a].min(p[a] - spacing / 2.0);
                    hi[a] = hi[a].max(p[a] + spacing / 2.0);
                }
            }
            (spacing, alpha, lo, hi)
        }
    };
    Ok(ParticleCloud {
        dim: 2,
        spacing,
        alpha,
        lower: [lo[0], lo[1], 0.0],
        upper: [hi[0], hi[1], 0.0],
        e,
        h,
        facing,
        lattice: None,
    })
}

fn parse_meta(s: &str) -> Result<(f64, f64, [f64; 2], [f64; 2]), String> {
    let mut spacing = None;
    let mut alpha = None;
    let mut lower = None;
    let mut upper = None;
    let num = |v: &str| v.parse::<f64>().map_err(|_| format!("invalid number '{v}'"));
    let pair = |v: &str| -> Result<[f64; 2], String> {
        let (a, b) = v.split_once(',').ok_or_else(|| format!("expected x,y pair, found '{v}'"))?;
        Ok([num(a)?, num(b)?])
    };
    for item in s.split_whitespace() {
        let (k, v) = item.split_once('=').ok_or_else(|| format!("expected key=value, found '{item}'"))?;
        match k {
            "spacing" => spacing = Some(num(v)?),
            "alpha" => alpha = Some(num(v)?),
            "lower" => lower = Some(pair(v)?),
            "upper" => upper = Some(pair(v)?),
            other => return Err(format!("unknown metadata key '{other}'")),
        }
    }
    match (spacing, alpha, lower, upper) {
        (Some(s), Some(a), Some(l), Some(u)) => Ok((s, a, l, u)),
        _ => Err("metadata line needs spacing, alpha, lower and upper".into()),
    }
}
