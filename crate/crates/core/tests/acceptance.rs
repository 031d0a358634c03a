//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Every comparison is exact. Randomized corpora use fixed seeds.

mod common;

use std::process::ExitCode;
use std::sync::Arc;

use common::*;
use rand::Rng;
use zariski_core::bdiv::{
    fix_part, global_sections, is_nef_bdiv, linearization_fan, linearization_rays, max_nef, max_nef_verified,
    mobile_part, positive_part_exact, probe_set, separate_all, BDiv, MaxNefStrategy, TypeLabel,
};
use zariski_core::fan::{is_big, is_nef, surface_intersection, trace_value, Fan, TorusDivisor};
use zariski_core::surface::{
    maximality_oracle, verify_certificate, zariski_decompose, SurfaceDivisor, SurfaceModel,
};
use zariski_core::{rat, QMat, Rat};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn model_of(fan: &Fan) -> SurfaceModel {
    let m = surface_intersection(fan).unwrap();
    SurfaceModel::new((0..fan.rays().len()).map(|i| format!("D{i}")).collect(), m).unwrap()
}

fn closure(fan: &Arc<Fan>, d: &TorusDivisor) -> BDiv {
    BDiv::closure(fan.clone(), d.clone()).unwrap()
}

/// Exact function equality on the probe box and the arrangement rays.
fn same_function(a: &BDiv, b: &BDiv) -> Result<(), String> {
    let mut probes = probe_set(&[a, b], 5).map_err(|e| e.to_string())?;
    probes.extend(linearization_rays(&[a, b]).map_err(|e| e.to_string())?);
    for v in &probes {
        let (x, y) = (a.value_at(v).unwrap(), b.value_at(v).unwrap());
        ensure(x == y, || format!("values differ at {v}: {x} vs {y}"))?;
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let m = QMat::from_rows(vec![vec![rat(-2, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]]).unwrap();
    let s = SurfaceModel::new(vec!["s".into(), "f".into()], m).unwrap();
    let d = SurfaceDivisor::new(vec![rat(1, 1), rat(1, 1)]);
    let dec = zariski_decompose(&s, &d).unwrap();
    ensure(dec.positive.coeffs == vec![rat(1, 2), rat(1, 1)], || format!("P = {:?}", dec.positive))?;
    ensure(dec.negative.coeffs == vec![rat(1, 2), rat(0, 1)], || format!("N = {:?}", dec.negative))?;
    ensure(dec.certificate.orthogonality == vec![(0, rat(0, 1))], || "P·s ≠ 0".into())?;
    ensure(dec.certificate.support_negative_definite && verify_certificate(&s, &d, &dec), || {
        "F2 certificate rejected".into()
    })?;
    ensure(maximality_oracle(&s, &d).unwrap() == dec.positive, || "F2 oracle disagrees".into())?;

    let mut r = rng(1);
    let mut nontrivial = 0;
    for i in 0..200 {
        let fan = smooth_surface(&mut r, 4);
        let model = model_of(&fan);
        let d = SurfaceDivisor::new(random_divisor(&mut r, fan.rays().len(), 4).coeffs);
        let dec = zariski_decompose(&model, &d).map_err(|e| format!("instance {i}: {e}"))?;
        let oracle = maximality_oracle(&model, &d).unwrap();
        ensure(oracle == dec.positive, || format!("instance {i}: oracle {oracle:?} vs {:?}", dec.positive))?;
        ensure(verify_certificate(&model, &d, &dec), || format!("instance {i}: certificate rejected"))?;
        nontrivial += usize::from(!dec.support.is_empty());
    }
    Ok(format!("F2 exact; 200 random divisors agree with the LP oracle ({nontrivial} with nonzero N)"))
}

fn criterion_2() -> Outcome {
    let fan = p2();
    let (d1, d2) = (TorusDivisor::from_ints(&[1, 0, 0]), TorusDivisor::from_ints(&[0, 1, 0]));
    let rep = separate_all(&fan, &d1, &d2).unwrap();
    ensure(rep.steps.len() == 1, || format!("{} steps", rep.steps.len()))?;
    let st = &rep.steps[0];
    ensure(st.w == lv(&[1, 1]), || format!("w = {}", st.w))?;
    let e = st.exceptional;
    ensure(rep.pullbacks.0.coeffs[e] == rat(1, 1) && rep.pullbacks.1.coeffs[e] == rat(1, 1), || {
        "exceptional coefficients differ from 1".into()
    })?;
    ensure(st.exceptional_type == TypeLabel::Zero, || "exceptional ray not type 0".into())?;
    ensure(!rep.final_fan.spans_cone(0, 1), || "e1, e2 still span a cone".into())?;
    let m = rep.max_divisor();
    ensure(m == TorusDivisor::from_ints(&[1, 1, 0, 1]), || format!("max = {m:?}"))?;
    ensure(is_nef(&rep.final_fan, &m).unwrap(), || "max pullback not nef".into())?;
    Ok("one blow-up at (1,1), E of type 0 with coefficient 1, max (1,1,0,1) nef".into())
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let (mut instances, mut steps, mut with_steps) = (0, 0, 0);
    for dim in [2, 3] {
        for i in 0..60 {
            let fan = random_fan(&mut r, dim);
            let n = fan.rays().len();
            let d1 = random_divisor(&mut r, n, 3);
            let d2 = random_divisor(&mut r, n, 3);
            let rep = separate_all(&fan, &d1, &d2).map_err(|e| format!("dim {dim} #{i}: {e}"))?;
            let mut prev = rep.initial_bad_pairs;
            for s in &rep.steps {
                ensure(s.bad_pairs_before == prev && s.bad_pairs_after < prev, || {
                    format!("dim {dim} #{i}: count {} -> {}", s.bad_pairs_before, s.bad_pairs_after)
                })?;
                prev = s.bad_pairs_after;
            }
            ensure(prev == 0 && rep.steps.len() <= rep.initial_bad_pairs && rep.invariants_hold(), || {
                format!("dim {dim} #{i}: did not terminate within the initial count")
            })?;
            instances += 1;
            steps += rep.steps.len();
            with_steps += usize::from(!rep.steps.is_empty());
        }
    }
    Ok(format!("{instances} instances, {with_steps} needing separation, {steps} steps, all strictly decreasing"))
}

fn criterion_4() -> Outcome {
    let fan = Arc::new(p2());
    let (a, b) = (closure(&fan, &TorusDivisor::from_ints(&[1, 0, 0])), closure(&fan, &TorusDivisor::from_ints(&[0, 1, 0])));
    let hull = max_nef(&a, &b, MaxNefStrategy::Hull).unwrap();
    let BDiv::PolytopeNef { polytope, .. } = &hull else { unreachable!() };
    let mut vs = polytope.vertices().unwrap().into_owned();
    vs.sort();
    let expect: Vec<Vec<Rat>> = [[-1, 0], [-1, 1], [0, -1], [1, -1]].iter().map(|p| rats(p)).collect();
    ensure(vs == expect, || format!("hull vertices {vs:?}"))?;
    ensure(hull.value_at(&lv(&[1, 1])).unwrap() == rat(1, 1), || "value at (1,1)".into())?;
    ensure(hull.value_at(&lv(&[-1, -1])).unwrap() == rat(0, 1), || "value at (-1,-1)".into())?;
    let sep = max_nef(&a, &b, MaxNefStrategy::Separation).unwrap();
    same_function(&hull, &sep)?;

    let mut r = rng(4);
    for i in 0..50 {
        let fan = Arc::new(random_fan(&mut r, 2));
        let (d1, d2) = (random_nef(&mut r, &fan), random_nef(&mut r, &fan));
        let (b1, b2) = (closure(&fan, &d1), closure(&fan, &d2));
        max_nef_verified(&b1, &b2, MaxNefStrategy::Separation, 5).map_err(|e| format!("pair {i}: {e}"))?;
    }
    Ok("P² hull vertices and values exact; 50 random nef pairs agree on rays and probe box".into())
}

fn criterion_5() -> Outcome {
    let fan = f2();
    let d = TorusDivisor::from_ints(&[1, 1, 0, 0]);
    let s = lv(&[0, 1]);
    let pd = positive_part_exact(&fan, &d).unwrap();
    let BDiv::PolytopeNef { polytope, .. } = &pd else { unreachable!() };
    let mut vs = polytope.vertices().unwrap().into_owned();
    vs.sort();
    let expect = vec![vec![rat(-1, 1), rat(-1, 2)], vec![rat(-1, 1), rat(0, 1)], vec![rat(0, 1), rat(0, 1)]];
    ensure(vs == expect, || format!("P_D vertices {vs:?}"))?;
    let m1 = mobile_part(&fan, &d, 1).unwrap();
    ensure(m1.value_at(&s).unwrap() == rat(0, 1), || "M_1 at (0,1) is not 0".into())?;
    let m2 = mobile_part(&fan, &d, 2).unwrap();
    ensure(m2.value_at(&s).unwrap() == rat(1, 2), || "M_2 at (0,1) is not 1/2".into())?;
    for k in 1..=10 {
        let mk = mobile_part(&fan, &d, k).unwrap();
        ensure(is_nef_bdiv(&mk).unwrap(), || format!("M_{k} not nef"))?;
        let lin = linearization_fan(&[&mk]).unwrap();
        ensure(is_nef(&lin, &mk.trace_on(&lin).unwrap()).unwrap(), || format!("M_{k} not nef on its fan"))?;
        let below = BDiv::closure(fan.clone(), d.clone()).unwrap().minus(mk.clone()).unwrap();
        for v in linearization_rays(&[&below]).unwrap() {
            ensure(below.value_at(&v).unwrap() >= rat(0, 1), || format!("M_{k} exceeds D̄ at {v}"))?;
        }
        if k % 2 == 0 {
            same_function(&mk, &pd).map_err(|e| format!("M_{k} ≠ P_D: {e}"))?;
        }
    }
    Ok("M_1 = 0 and M_2 = 1/2 at (0,1); M_k = P_D for even k ≤ 10; all M_k nef".into())
}

fn sections_agree(fan: &Arc<Fan>, d: &TorusDivisor, kmax: i64) -> Result<usize, String> {
    let pd = positive_part_exact(fan, d).map_err(|e| e.to_string())?;
    let dbar = closure(fan, d);
    let mut total = 0;
    for k in 1..=kmax {
        let a = global_sections(&pd, k).unwrap();
        let b = global_sections(&dbar, k).unwrap();
        ensure(a == b, || format!("k = {k}: {} vs {} sections", a.len(), b.len()))?;
        total += a.len();
    }
    Ok(total)
}

fn big_effective(r: &mut ChaCha, fan: &Fan) -> TorusDivisor {
    loop {
        let d = random_divisor(r, fan.rays().len(), 3);
        if is_big(fan, &d).unwrap() {
            return d;
        }
    }
}

type ChaCha = rand_chacha::ChaCha8Rng;

fn criterion_6() -> Outcome {
    let n = sections_agree(&f2(), &TorusDivisor::from_ints(&[1, 1, 0, 0]), 10).map_err(|e| format!("F2: {e}"))?;
    let mut r = rng(6);
    for i in 0..50 {
        let fan = Arc::new(random_fan(&mut r, 2));
        let d = big_effective(&mut r, &fan);
        sections_agree(&fan, &d, 10).map_err(|e| format!("divisor {i}: {e}"))?;
    }
    Ok(format!("F2 ({n} sections over k ≤ 10) and 50 random big divisors, k = 1..10"))
}

fn compatible(fan: &Arc<Fan>, d: &TorusDivisor) -> Result<(), String> {
    let model = model_of(fan);
    let dec = zariski_decompose(&model, &SurfaceDivisor::new(d.coeffs.clone())).map_err(|e| e.to_string())?;
    let pd = positive_part_exact(fan, d).map_err(|e| e.to_string())?;
    for (i, ray) in fan.rays().iter().enumerate() {
        let surf = trace_value(fan, &TorusDivisor::new(dec.positive.coeffs.clone()), ray).unwrap();
        let b = pd.value_at(ray).unwrap();
        ensure(surf == b, || format!("ray {ray}: surface {surf} vs b-divisor {b} (index {i})"))?;
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let fan = f2();
    compatible(&fan, &TorusDivisor::from_ints(&[1, 1, 0, 0])).map_err(|e| format!("F2: {e}"))?;
    let dec = zariski_decompose(&model_of(&fan), &SurfaceDivisor::new(rats(&[1, 1, 0, 0]))).unwrap();
    ensure(dec.positive.coeffs[1] == rat(1, 2), || "coefficient at the (-2)-ray is not 1/2".into())?;
    let mut r = rng(7);
    for i in 0..50 {
        let fan = Arc::new(smooth_surface(&mut r, 4));
        let d = big_effective(&mut r, &fan);
        compatible(&fan, &d).map_err(|e| format!("surface {i}: {e}"))?;
    }
    Ok("F2 (1/2 at the (-2)-ray) and 50 random smooth toric surfaces".into())
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut instances = vec![(p2(), TorusDivisor::from_ints(&[1, 0, 0]), TorusDivisor::from_ints(&[0, 1, 0]))];
    for dim in [2, 2, 3, 3] {
        let fan = random_fan(&mut r, dim);
        let n = fan.rays().len();
        let (d1, d2) = (random_divisor(&mut r, n, 3), random_divisor(&mut r, n, 3));
        instances.push((fan, d1, d2));
    }
    let mut checked = 0;
    for (idx, (fan, d1, d2)) in instances.iter().enumerate() {
        let rep = separate_all(fan, d1, d2).unwrap();
        let y = &rep.final_fan;
        let (p1, p2) = &rep.pullbacks;
        let pmax = rep.max_divisor();
        for t in 0..20 {
            let mut z = y.clone();
            for _ in 0..r.gen_range(1..=2) {
                z = random_subdivision(&mut r, &z);
            }
            let mut probes: Vec<_> = z.rays().to_vec();
            probes.extend(probe_set(&[&BDiv::zero(z.dim())], 3).unwrap());
            for v in &probes {
                let lhs = trace_value(y, &pmax, v).unwrap();
                let rhs = trace_value(y, p1, v).unwrap().max(trace_value(y, p2, v).unwrap());
                ensure(lhs == rhs, || format!("instance {idx}, subdivision {t}: {lhs} vs {rhs} at {v}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{} separated instances × 20 subdivisions, {checked} exact comparisons", instances.len()))
}

fn criterion_9() -> Outcome {
    let fan = f2();
    let s = TorusDivisor::from_ints(&[0, 1, 0, 0]);
    let sbar = closure(&fan, &s);
    for k in 1..=10 {
        let h0 = global_sections(&sbar, k).unwrap();
        ensure(h0 == vec![vec![0, 0]], || format!("H0({k}s) = {h0:?}"))?;
        let fix = fix_part(&fan, &s, k).unwrap();
        for (i, ray) in fan.rays().iter().enumerate() {
            let want = &s.coeffs[i] * rat(k, 1);
            ensure(fix.value_at(ray).unwrap() == want, || format!("Fix({k}s) at {ray}"))?;
        }
        let mk = mobile_part(&fan, &s, k).unwrap();
        same_function(&mk, &BDiv::zero(2)).map_err(|e| format!("M_{k}: {e}"))?;
    }
    Ok("H0(ks) = {0}, Fix(ks) = k·s̄ and M_k = 0 for k ≤ 10".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("surface engine and LP oracle", criterion_1),
        ("separation loop on P²", criterion_2),
        ("strict decrease and termination", criterion_3),
        ("max-of-nef strategy agreement", criterion_4),
        ("mobile parts: nefness and convergence", criterion_5),
        ("section equality", criterion_6),
        ("surface and b-divisor compatibility", criterion_7),
        ("pullback stability", criterion_8),
        ("rigid divisor", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
