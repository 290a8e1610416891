use super::{CloudError, Point};
use crate::neighbors::find_neighbors;

/// Areas of the Voronoi cells of `points`, clipped to the box
/// `[lower, upper]` (x and y only).
///
/// Each cell starts as the box and is cut by the bisector half-planes of
/// nearby points. Candidates are gathered within a radius that doubles until
/// the cell is provably final: a point at distance `d` can only cut the cell
/// if `d / 2` is below the cell's farthest vertex distance.
pub fn voronoi_areas(points: &[Point], lower: Point, upper: Point) -> Result<Vec<f64>, CloudError> {
    let n = points.len();
    let (w, h) = (upper[0] - lower[0], upper[1] - lower[1]);
    if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
        return Err(CloudError::UnboundedCell(0));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let typical = (w * h / n as f64).sqrt();
    let mut radius = 3.0 * typical;
    let mut areas = vec![f64::NAN; n];
    let mut pending: Vec<usize> = (0..n).collect();
    let box_poly = vec![[lower[0], lower[1]], [upper[0], lower[1]], [upper[0], upper[1]], [lower[0], upper[1]]];
    let diag = (w * w + h * h).sqrt();
    loop {
        let radii = vec![radius; n];
        let table = find_neighbors(points, &radii, points);
        let mut still = Vec::new();
        for &i in &pending {
            let p = [points[i][0], points[i][1]];
            let mut poly = box_poly.clone();
            let mut cands: Vec<usize> = table.neighbors(i).iter().copied().filter(|&j| j != i).collect();
            cands.sort_by(|&a, &b| {
                let da = (points[a][0] - p[0]).powi(2) + (points[a][1] - p[1]).powi(2);
                let db = (points[b][0] - p[0]).powi(2) + (points[b][1] - p[1]).powi(2);
                da.total_cmp(&db).then(a.cmp(&b))
            });
            for j in cands {
                let q = [points[j][0], points[j][1]];
                poly = clip(&poly, p, q);
                if poly.len() < 3 {
                    break;
                }
            }
            let reach = poly.iter().map(|v| ((v[0] - p[0]).powi(2) + (v[1] - p[1]).powi(2)).sqrt()).fold(0.0, f64::max);
            if 2.0 * reach >= radius && radius < 2.0 * diag {
                still.push(i);
                continue;
            }
            let a = shoelace(&poly);
            if !(a > 0.0) {
                return Err(CloudError::UnboundedCell(i));
            }
            areas[i] = a;
        }
        if still.is_empty() {
            break;
        }
        pending = still;
        radius *= 2.0;
    }
    Ok(areas)
}

/// Keeps the part of `poly` closer to `p` than to `q`.
fn clip(poly: &[[f64; 2]], p: [f64; 2], q: [f64; 2]) -> Vec<[f64; 2]> {
    let m = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
    let nrm = [q[0] - p[0], q[1] - p[1]];
    let side = |v: &[f64; 2]| (v[0] - m[0]) * nrm[0] + (v[1] - m[1]) * nrm[1];
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        let (sa, sb) = (side(&a), side(&b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

fn shoelace(poly: &[[f64; 2]]) -> f64 {
    let mut s = 0.0;
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_lattice_gives_uniform_cells() {
        let pts: Vec<Point> =
            (0..5).flat_map(|j| (0..4).map(move |i| [(i as f64 + 0.5) * 0.1, (j as f64 + 0.5) * 0.1, 0.0])).collect();
        let a = voronoi_areas(&pts, [0.0; 3], [0.4, 0.5, 0.0]).unwrap();
        for v in a {
            assert!((v - 0.01).abs() < 1e-15);
        }
    }

    #[test]
    fn single_point_takes_the_box() {
        let a = voronoi_areas(&[[0.3, 0.2, 0.0]], [0.0; 3], [1.0, 2.0, 0.0]).unwrap();
        assert!((a[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_box_is_rejected() {
        assert!(voronoi_areas(&[[0.0; 3]], [0.0; 3], [0.0, 1.0, 0.0]).is_err());
    }
}
