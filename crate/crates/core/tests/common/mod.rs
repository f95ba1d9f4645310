//! Reference computations shared by the oracle and acceptance suites.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use skyharvest::{EnvironmentProfile, RadioConfig};

pub const GRID: usize = 1_000_000;

/// Air-to-ground excess loss written out from the model definition.
pub fn oracle_f(env: &EnvironmentProfile, theta: f64) -> f64 {
    let deg = theta.to_degrees();
    let p_los = 1.0 / (1.0 + env.a * (-env.b * (deg - env.a)).exp());
    p_los * env.nu_los + (1.0 - p_los) * env.nu_nlos - 20.0 * theta.sin().log10()
}

pub fn oracle_target(cfg: &RadioConfig, z: f64) -> f64 {
    let fspl = 20.0 * (4.0 * PI * cfg.f_c / 3.0e8).log10();
    (cfg.p_c - cfg.p_th) - 20.0 * z.log10() - fspl
}

/// Coverage radius from a uniform theta grid over (0, pi/2], linearly
/// interpolated at the first grid cell where `f` drops below the target.
pub fn grid_radius(env: &EnvironmentProfile, cfg: &RadioConfig, z: f64) -> Option<f64> {
    let target = oracle_target(cfg, z);
    let theta = |i: usize| (i + 1) as f64 * FRAC_PI_2 / GRID as f64;
    let mut prev = (theta(0), oracle_f(env, theta(0)) - target);
    if prev.1 <= 0.0 {
        return Some(z / prev.0.tan());
    }
    for i in 1..GRID {
        let t = theta(i);
        let g = oracle_f(env, t) - target;
        if g <= 0.0 {
            let star = prev.0 + (t - prev.0) * prev.1 / (prev.1 - g);
            return Some(z / star.tan());
        }
        prev = (t, g);
    }
    None
}

/// Received power at horizontal offset `r` and altitude `z`, from the model.
pub fn oracle_received_power(env: &EnvironmentProfile, cfg: &RadioConfig, r: f64, z: f64) -> f64 {
    let theta = z.atan2(r);
    let d = r.hypot(z);
    let fspl_d = 20.0 * (4.0 * PI * cfg.f_c * d / 3.0e8).log10();
    let deg = theta.to_degrees();
    let p_los = 1.0 / (1.0 + env.a * (-env.b * (deg - env.a)).exp());
    let loss = fspl_d + p_los * env.nu_los + (1.0 - p_los) * env.nu_nlos;
    cfg.p_c - loss
}

/// Cosine and sine of `GRID` evenly spaced angles.
pub fn unit_circle() -> Vec<(f64, f64)> {
    (0..GRID)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / GRID as f64;
            (a.cos(), a.sin())
        })
        .collect()
}

/// Closest point of the closed disc to `p`: the UAV itself when inside,
/// otherwise the best of the boundary samples, polished by ternary search
/// between its neighbors.
pub fn boundary_oracle(table: &[(f64, f64)], p: (f64, f64), c: (f64, f64), r: f64) -> (f64, f64) {
    if (p.0 - c.0).powi(2) + (p.1 - c.1).powi(2) <= r * r {
        return p;
    }
    let d2 = |cos: f64, sin: f64| (c.0 + r * cos - p.0).powi(2) + (c.1 + r * sin - p.1).powi(2);
    let best = (0..table.len())
        .min_by(|&i, &j| d2(table[i].0, table[i].1).total_cmp(&d2(table[j].0, table[j].1)))
        .unwrap();
    let step = 2.0 * PI / table.len() as f64;
    let at = |a: f64| d2(a.cos(), a.sin());
    let (mut lo, mut hi) = ((best as f64 - 1.0) * step, (best as f64 + 1.0) * step);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if at(m1) <= at(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let a = 0.5 * (lo + hi);
    (c.0 + r * a.cos(), c.1 + r * a.sin())
}

pub fn tour_len(dock: (f64, f64), chs: &[(f64, f64)], order: &[usize]) -> f64 {
    let mut at = dock;
    let mut total = 0.0;
    for &i in order {
        total += (chs[i].0 - at.0).hypot(chs[i].1 - at.1);
        at = chs[i];
    }
    total + (dock.0 - at.0).hypot(dock.1 - at.1)
}

pub fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Minimum over every permutation and every way of cutting it into `u`
/// nonempty consecutive routes.
pub fn enumerate_mtsp(dock: (f64, f64), chs: &[(f64, f64)], u: usize) -> f64 {
    let n = chs.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    loop {
        let mut cuts = vec![0usize; u + 1];
        cuts[u] = n;
        fn rec(
            level: usize,
            cuts: &mut Vec<usize>,
            perm: &[usize],
            dock: (f64, f64),
            chs: &[(f64, f64)],
            best: &mut f64,
        ) {
            let u = cuts.len() - 1;
            if level == u {
                let total: f64 = cuts.windows(2).map(|w| tour_len(dock, chs, &perm[w[0]..w[1]])).sum();
                *best = best.min(total);
                return;
            }
            let lo = cuts[level - 1] + 1;
            let hi = perm.len() - (u - level);
            for c in lo..=hi {
                cuts[level] = c;
                rec(level + 1, cuts, perm, dock, chs, best);
            }
        }
        rec(1, &mut cuts, &perm, dock, chs, &mut best);
        if !next_permutation(&mut perm) {
            return best;
        }
    }
}

