//! Hovering at the edge of each cluster head's coverage disc instead of
//! directly above it.
//!
//! Tours keep their visiting order. Walking each route from the dock, the
//! next hover point is where the line from the current position toward the
//! cluster head's overhead point first crosses the coverage circle.

use super::RoutePlan;
use crate::error::{Error, Result};
use crate::geometry::Point3;

/// Hover point for a UAV at `current` heading to the circle of `radius`
/// around `center` (both at the same altitude).
///
/// Intersects the line through the two points with the circle by solving
/// the quadratic in the better-conditioned axis, then keeps the root nearer
/// to `current`. A UAV already inside the circle stays where it is.
pub fn hover_point(current: Point3, center: Point3, radius: f64) -> Point3 {
    // work relative to the circle center
    let xu = current.x - center.x;
    let yu = current.y - center.y;
    if xu * xu + yu * yu <= radius * radius {
        return current;
    }
    let (a, b) = if xu.abs() >= yu.abs() {
        line_circle_roots(xu, yu, radius)
    } else {
        // steep or vertical line: solve with the axes swapped
        let ((y0, x0), (y1, x1)) = line_circle_roots(yu, xu, radius);
        ((x0, y0), (x1, y1))
    };
    let d_a = (a.0 - xu).hypot(a.1 - yu);
    let d_b = (b.0 - xu).hypot(b.1 - yu);
    let (x, y) = if d_a <= d_b { a } else { b };
    Point3::new(center.x + x, center.y + y, current.z)
}

/// Both intersections of the circle `x^2 + y^2 = r^2` with the line through
/// `(xu, yu)` and the origin, written as `y = p1 x + p2` (requires `xu != 0`).
fn line_circle_roots(xu: f64, yu: f64, r: f64) -> ((f64, f64), (f64, f64)) {
    let p1 = yu / xu;
    let p2 = yu - p1 * xu;
    let q1 = p1 * p1 + 1.0;
    let q2 = p1 * p2;
    let q3 = p2 * p2 - r * r;
    let disc = (q2 * q2 - q1 * q3).max(0.0).sqrt();
    let x0 = (-q2 + disc) / q1;
    let x1 = -(q2 + disc) / q1;
    ((x0, p1 * x0 + p2), (x1, p1 * x1 + p2))
}

/// Moves every hover point of `plan` to the edge of its cluster head's
/// coverage disc of `radius` meters. `chs` are the cluster-head ground
/// positions that `plan.routes` index into. Altitude and visiting order are
/// unchanged.
pub fn tspn_adjust(plan: &RoutePlan, chs: &[Point3], radius: f64) -> Result<RoutePlan> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::invalid(format!("coverage radius must be finite and >= 0, got {radius}")));
    }
    if let Some(bad) = plan.routes.iter().flatten().find(|&&c| c >= chs.len()) {
        return Err(Error::invalid(format!("route references unknown cluster head {bad}")));
    }
    if radius == 0.0 {
        return Ok(plan.clone());
    }
    let dock = plan.dock;
    let waypoints = plan
        .routes
        .iter()
        .map(|route| {
            let mut out = Vec::with_capacity(route.len() + 2);
            out.push(dock);
            let mut current = dock;
            for &c in route {
                current = hover_point(current, chs[c].at_altitude(dock.z), radius);
                out.push(current);
            }
            out.push(dock);
            out
        })
        .collect();
    Ok(RoutePlan::from_waypoints(dock, plan.routes.clone(), waypoints, plan.speed))
}

/// Relative distance saved by hovering within range: `1 - d_tspn / d_tsp`.
pub fn tspn_gain(d_tsp: f64, d_tspn: f64) -> Result<f64> {
    if !(d_tsp > 0.0) {
        return Err(Error::invalid(format!("reference tour length must be positive, got {d_tsp}")));
    }
    Ok(1.0 - d_tspn / d_tsp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::RouteProblem;

    fn close(a: Point3, b: Point3) -> bool {
        (a.x - b.x).abs() < 1e-9 && (a.y - b.y).abs() < 1e-9 && a.z == b.z
    }

    #[test]
    fn horizontal_approach() {
        let w = hover_point(Point3::new(0.0, 0.0, 50.0), Point3::new(10.0, 0.0, 50.0), 4.0);
        assert!(close(w, Point3::new(6.0, 0.0, 50.0)), "{w:?}");
    }

    #[test]
    fn vertical_approach() {
        let w = hover_point(Point3::new(5.0, 0.0, 50.0), Point3::new(5.0, 10.0, 50.0), 3.0);
        assert!(close(w, Point3::new(5.0, 7.0, 50.0)), "{w:?}");
        let w = hover_point(Point3::new(5.0, 20.0, 50.0), Point3::new(5.0, 10.0, 50.0), 3.0);
        assert!(close(w, Point3::new(5.0, 13.0, 50.0)), "{w:?}");
    }

    #[test]
    fn inside_stays_put() {
        let cur = Point3::new(1.0, 1.0, 9.0);
        assert_eq!(hover_point(cur, Point3::new(2.0, 2.0, 9.0), 5.0), cur);
        assert_eq!(hover_point(cur, cur, 5.0), cur);
    }

    #[test]
    fn diagonal_lands_on_circle_toward_current() {
        let c = Point3::new(100.0, 100.0, 0.0);
        let w = hover_point(Point3::new(0.0, 0.0, 0.0), c, 10.0);
        let s = 10.0 / 2f64.sqrt();
        assert!(close(w, Point3::new(100.0 - s, 100.0 - s, 0.0)), "{w:?}");
    }

    #[test]
    fn zero_radius_is_identity() {
        let p = RouteProblem::new(
            vec![Point3::ground(1000.0, 0.0), Point3::ground(0.0, 1000.0)],
            Point3::ground(0.0, 0.0),
            1,
            100.0,
            10.0,
        );
        let plan = p.plan_from_routes(vec![vec![0, 1]]);
        assert_eq!(tspn_adjust(&plan, &p.chs, 0.0).unwrap(), plan);
        assert!(tspn_adjust(&plan, &p.chs, -1.0).is_err());
        assert!(tspn_adjust(&plan, &p.chs[..1], 5.0).is_err());
    }

    #[test]
    fn adjusted_tour_is_shorter() {
        let p = RouteProblem::new(
            vec![Point3::ground(3000.0, 0.0), Point3::ground(3000.0, 3000.0)],
            Point3::ground(0.0, 0.0),
            1,
            100.0,
            10.0,
        );
        let plan = p.plan_from_routes(vec![vec![0, 1]]);
        let adj = tspn_adjust(&plan, &p.chs, 1000.0).unwrap();
        assert!(close(adj.waypoints[0][1], Point3::new(2000.0, 0.0, 100.0)));
        assert!(adj.total_length < plan.total_length);
        assert_eq!(adj.routes, plan.routes);
    }

    #[test]
    fn gain_examples() {
        assert_eq!(tspn_gain(1000.0, 1000.0).unwrap(), 0.0);
        let rho = tspn_gain(1.0, 0.8473).unwrap();
        assert!((rho - 0.1527).abs() < 1e-12);
        assert!(tspn_gain(0.0, 1.0).is_err());
    }
}
