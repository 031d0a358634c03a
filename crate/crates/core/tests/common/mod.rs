//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use zariski_core::fan::{ccw_rays, complete_plane_fan, star_subdivide, Fan, LatticeVec, TorusDivisor};
use zariski_core::{rat, Rat};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn lv(v: &[i64]) -> LatticeVec {
    LatticeVec::new(v.to_vec())
}

pub fn p2() -> Fan {
    Fan::new(vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])], vec![vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap()
}

/// Hirzebruch surface `F_a`: rays (1,0), (0,1), (-1,a), (0,-1).
pub fn hirzebruch(a: i64) -> Fan {
    complete_plane_fan(vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, a]), lv(&[0, -1])]).unwrap()
}

pub fn f2() -> Arc<Fan> {
    Arc::new(hirzebruch(2))
}

pub fn p3() -> Fan {
    Fan::new(
        vec![lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[0, 0, 1]), lv(&[-1, -1, -1])],
        vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
    )
    .unwrap()
}

/// `P¹ × P¹ × P¹`, triangulated into octant cones.
pub fn cube3() -> Fan {
    let rays: Vec<LatticeVec> = (0..3)
        .flat_map(|i| {
            [1, -1].map(|s| {
                let mut v = vec![0; 3];
                v[i] = s;
                lv(&v)
            })
        })
        .collect();
    let mut cones = Vec::new();
    for a in [0, 1] {
        for b in [2, 3] {
            for c in [4, 5] {
                cones.push(vec![a, b, c]);
            }
        }
    }
    Fan::new(rays, cones).unwrap()
}

/// A smooth complete toric surface: `P²` or `F_a` followed by blow-ups of
/// random torus-fixed points.
pub fn smooth_surface(r: &mut impl Rng, max_blowups: usize) -> Fan {
    let mut fan = if r.gen_bool(0.3) { p2() } else { hirzebruch(r.gen_range(0..=3)) };
    for _ in 0..r.gen_range(0..=max_blowups) {
        let order = ccw_rays(&fan);
        let p = r.gen_range(0..order.len());
        let (a, b) = (fan.ray(order[p]).clone(), fan.ray(order[(p + 1) % order.len()]).clone());
        fan = star_subdivide(&fan, &a.add(&b)).unwrap().0;
    }
    fan
}

/// Random star subdivision at a positive integer combination of the rays
/// of a random cone, or of one of its faces.
pub fn random_subdivision(r: &mut impl Rng, fan: &Fan) -> Fan {
    loop {
        let c = &fan.cones()[r.gen_range(0..fan.cones().len())];
        let mut w = vec![0i64; fan.dim()];
        for &i in c {
            let wt = if r.gen_bool(0.25) { 0 } else { r.gen_range(1..=3) };
            for (x, y) in w.iter_mut().zip(fan.ray(i).coords()) {
                *x += wt * y;
            }
        }
        let w = LatticeVec::new(w);
        if w.is_zero() {
            continue;
        }
        let (w, _) = w.primitive();
        if fan.ray_index(&w).is_some() {
            continue;
        }
        return star_subdivide(fan, &w).unwrap().0;
    }
}

/// A simplicial complete fan in dimension 2 or 3.
pub fn random_fan(r: &mut impl Rng, dim: usize) -> Fan {
    match dim {
        2 => {
            let mut f = smooth_surface(r, 3);
            for _ in 0..r.gen_range(0..=2) {
                f = random_subdivision(r, &f);
            }
            f
        }
        3 => {
            let mut f = if r.gen_bool(0.5) { p3() } else { cube3() };
            for _ in 0..r.gen_range(0..=3) {
                f = random_subdivision(r, &f);
            }
            f
        }
        _ => unreachable!(),
    }
}

/// Coefficients in `{0, ..., max}`, occasionally halved.
pub fn random_divisor(r: &mut impl Rng, n: usize, max: i64) -> TorusDivisor {
    TorusDivisor::new(
        (0..n)
            .map(|_| {
                let num = r.gen_range(0..=max);
                if r.gen_bool(0.2) {
                    rat(num, 2)
                } else {
                    rat(num, 1)
                }
            })
            .collect(),
    )
}

/// A random nef divisor, by rejection sampling with a pulled-back
/// hyperplane class as fallback.
pub fn random_nef(r: &mut impl Rng, fan: &Fan) -> TorusDivisor {
    for _ in 0..400 {
        let d = random_divisor(r, fan.rays().len(), 3);
        if zariski_core::fan::is_nef(fan, &d).unwrap() {
            return d;
        }
    }
    // the support function of the standard simplex is nef on every fan
    // refining the fan of projective space; otherwise take the zero divisor
    let (simplex, h) = match fan.dim() {
        2 => (p2(), TorusDivisor::from_ints(&[1, 0, 0])),
        _ => (p3(), TorusDivisor::from_ints(&[1, 0, 0, 0])),
    };
    let pulled = TorusDivisor::new(
        fan.rays().iter().map(|v| zariski_core::fan::trace_value(&simplex, &h, v).unwrap()).collect(),
    );
    if zariski_core::fan::is_nef(fan, &pulled).unwrap() {
        pulled
    } else {
        TorusDivisor::zero(fan.rays().len())
    }
}

pub fn rats(xs: &[i64]) -> Vec<Rat> {
    xs.iter().map(|&x| rat(x, 1)).collect()
}
