//! The nine acceptance criteria, each with its time bound. Prints one line
//! per criterion and exits nonzero if any fails.

use std::time::{Duration, Instant};

use hodgekit::descent::{
    descent_check, hypercover_check, independence_check, mayer_vietoris_truncation, simplicial_resolution, DownSets,
    DownSetsAndPoint, PureCoefficients,
};
use hodgekit::filtcx::{
    self, cone, reindex_from_mhs_complex, total, translate, twist, Morphism, TriFilteredComplex,
};
use hodgekit::finspace::{
    bar_complex, godement_cohomology, mayer_vietoris_check, monad_t, sheaf_cohomology, vanishing_check, FinitePoset,
    PosetSheaf,
};
use hodgekit::generate::{
    blow_down_example, invalid_instance, nondegenerate_control, random_blow_down, random_cc_sheaf,
    random_connected_poset, random_hodge_complex, random_poset, random_stratification, random_stratified_poset, rng,
    HodgeSize, DEFECTS,
};
use hodgekit::hodge::{cone_sequence, prop_grf_degeneration, theorem1, validate_hodge_complex, Axiom, CHodgeComplex};
use hodgekit::json::InputError;
use hodgekit::specseq::{deligne_criterion, zassenhaus_check, SpectralSequence};
use hodgekit::{Matrix, Q};
use rand::Rng;

type Check = Result<String, String>;

struct Outcome {
    passed: bool,
}

fn criterion(n: usize, name: &str, bound: u64, body: impl FnOnce() -> Check) -> Outcome {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let in_time = elapsed < Duration::from_secs(bound);
    let passed = result.is_ok() && in_time;
    let detail = match &result {
        Ok(s) => s.clone(),
        Err(e) => e.clone(),
    };
    let timing = if in_time { format!("{:.2}s < {bound}s", elapsed.as_secs_f64()) } else { format!("{:.2}s exceeds {bound}s", elapsed.as_secs_f64()) };
    println!("criterion {n} {} {name} [{timing}] {detail}", if passed { "PASS" } else { "FAIL" });
    Outcome { passed }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn generated_instances(seed: u64, count: usize) -> Result<Vec<CHodgeComplex>, String> {
    let mut r = rng(seed);
    let size = HodgeSize::default();
    (0..count)
        .map(|k| {
            let (a, how) = random_hodge_complex(&mut r, &size);
            validate_hodge_complex(&a).map_err(|e| format!("instance {k} ({how:?}) rejected: {e:?}"))
        })
        .collect()
}

fn theorem_one_suite(instances: &[CHodgeComplex]) -> Check {
    for (k, a) in instances.iter().enumerate() {
        let t = theorem1(a);
        ensure(t.w_degeneration <= 2, || format!("instance {k}: W degenerates at page {}", t.w_degeneration))?;
        ensure(t.f_degeneration == 1 && t.fbar_degeneration == 1, || {
            format!("instance {k}: F at page {}, Fbar at page {}", t.f_degeneration, t.fbar_degeneration)
        })?;
        ensure(t.structures.iter().all(|s| s.opposed), || format!("instance {k}: cohomology not opposed"))?;
        ensure(t.certified(), || format!("instance {k}: E1/E2 purity or d2 certificate failed"))?;
    }
    let max_dim = instances.iter().map(|a| a.data().complex.total_dim()).max().unwrap_or(0);
    Ok(format!("{} instances, largest total dimension {max_dim}", instances.len()))
}

fn grf_suite(instances: &[CHodgeComplex]) -> Check {
    ensure(!instances.is_empty(), || "no instances".into())?;
    let mut pieces = 0;
    for (k, a) in instances.iter().enumerate() {
        let (lo, hi) = a.data().f.bounds();
        for i in lo..=hi {
            let c = prop_grf_degeneration(a, i);
            ensure(c.holds, || format!("instance {k}: Gr_F^{i} degenerates at page {}", c.page))?;
            pieces += 1;
        }
    }
    Ok(format!("{pieces} graded pieces"))
}

fn mechanics_suite(instances: &[CHodgeComplex]) -> Check {
    ensure(!instances.is_empty(), || "no instances".into())?;
    for (k, a) in instances.iter().enumerate() {
        let a = a.data();
        let wss = SpectralSequence::new(&a.complex, &a.w);
        for (name, filt) in [("F", &a.f), ("Fbar", &a.fbar)] {
            let rep = deligne_criterion(&wss, filt, None);
            ensure(rep.hypotheses_hold, || format!("instance {k}: {name} strictness fails: {:?}", rep.failure))?;
            ensure(rep.dir_equals_rec == Some(true) && rep.agrees_with_final == Some(true), || {
                format!("instance {k}: {name} dir/rec/final disagree: {:?} {:?}", rep.dir_equals_rec, rep.agrees_with_final)
            })?;
        }
        let dc = wss.dimension_count(wss.degeneration_page());
        ensure(dc.equal, || format!("instance {k}: dimension count unequal at page {}", dc.r))?;
        let z = zassenhaus_check(a);
        ensure(z.holds, || format!("instance {k}: zassenhaus mismatch {:?}", z.mismatch))?;
    }
    let control = nondegenerate_control();
    let css = SpectralSequence::new(&control.complex, &control.w);
    let dc = css.dimension_count(2);
    ensure(dc.inequality_holds && dc.rows.iter().any(|r| r.page_total > r.cohomology), || {
        format!("control: no strict inequality at page 2: {:?}", dc.rows)
    })?;
    Ok(format!("{} instances, control strict at page 2", instances.len()))
}

fn negative_suite() -> Check {
    let mut r = rng(4);
    for k in 0..50 {
        let defect = DEFECTS[k % DEFECTS.len()];
        let inst = invalid_instance(&mut r, defect);
        let exp = &inst.expected;
        match inst.data.to_trifiltered() {
            Err(InputError::Check(c)) => {
                ensure(exp.axiom.is_none(), || format!("instance {k} ({defect:?}): unexpected check failure {}", c.check))?;
                ensure(c.degree == exp.degree && !c.witness.is_empty(), || {
                    format!("instance {k} ({defect:?}): degree {} witness {:?}", c.degree, c.witness)
                })?;
            }
            Err(InputError::Malformed(m)) => return Err(format!("instance {k} ({defect:?}): malformed: {m}")),
            Ok(t) => {
                let e = match validate_hodge_complex(&t) {
                    Ok(_) => return Err(format!("instance {k} ({defect:?}) accepted")),
                    Err(e) => e,
                };
                let axiom = format!("{:?}", e.axiom);
                ensure(exp.axiom.as_deref() == Some(axiom.as_str()), || format!("instance {k} ({defect:?}): reported {axiom}"))?;
                ensure(e.degree == exp.degree && Some(e.weight_index) == exp.weight_index, || {
                    format!("instance {k} ({defect:?}): at degree {} weight {}", e.degree, e.weight_index)
                })?;
                ensure(e.witness.iter().any(|w| w != "0/1"), || format!("instance {k} ({defect:?}): empty witness"))?;
            }
        }
    }
    let control = nondegenerate_control();
    let e = validate_hodge_complex(&control).err().ok_or("control accepted")?;
    ensure(e.axiom == Axiom::HC3, || format!("control fails {:?}", e.axiom))?;
    let css = SpectralSequence::new(&control.complex, &control.w);
    ensure(!css.page(2).is_zero_differential(), || "control has d2 = 0".into())?;
    Ok("50 rejected with witnesses, control fails HC3 with d2 != 0".into())
}

fn scaled_identity(a: &TriFilteredComplex, s: i64) -> Morphism {
    let maps = a.complex.degrees().map(|n| (n, Matrix::identity(a.complex.dim(n)).scale(&Q::from(s)))).collect();
    Morphism::new(a.clone(), a.clone(), maps).expect("scalar maps are filtered")
}

fn block_map(a: &TriFilteredComplex, b: &TriFilteredComplex, row: usize, col: usize, n: i32) -> Matrix<Q> {
    let mut m = Matrix::zeros(b.complex.dim(n), a.complex.dim(n));
    m.set_block(row, col, &Matrix::identity(a.complex.dim(n).min(b.complex.dim(n))));
    m
}

fn random_morphism<R: Rng>(r: &mut R, a: &TriFilteredComplex, b: &TriFilteredComplex) -> Morphism {
    match r.gen_range(0..4) {
        0 => {
            let s = filtcx::direct_sum(a, b);
            let maps = s.complex.degrees().map(|n| (n, block_map(a, &s, 0, 0, n))).collect();
            Morphism::new(a.clone(), s, maps).expect("inclusion")
        }
        1 => {
            let s = filtcx::direct_sum(a, b);
            let maps = s.complex.degrees().map(|n| (n, block_map(&s, a, 0, 0, n))).collect();
            Morphism::new(s, a.clone(), maps).expect("projection")
        }
        2 => Morphism::zero(a, b),
        _ => scaled_identity(a, r.gen_range(0..=2)),
    }
}

fn closure_suite() -> Check {
    let mut r = rng(5);
    let small = HodgeSize { max_dim: 10, max_amplitude: 3, max_weight_jumps: 3 };
    let mut counts = [0usize; 5];
    let mut sequences = 0;
    let mut nonzero = 0;
    for k in 0..100 {
        let (mut cur, _) = random_hodge_complex(&mut r, &small);
        let steps = r.gen_range(1..=3);
        for _ in 0..steps {
            let big = cur.complex.total_dim() > 24;
            let op = if big { r.gen_range(2..5) } else { r.gen_range(0..5) };
            counts[op] += 1;
            cur = match op {
                0 => {
                    let (other, _) = random_hodge_complex(&mut r, &small);
                    let f = if r.gen_bool(0.5) { random_morphism(&mut r, &cur, &other) } else { random_morphism(&mut r, &other, &cur) };
                    let seq = cone_sequence(&f).map_err(|e| format!("composition {k}: {e}"))?;
                    ensure(seq.holds(), || format!("composition {k}: cone sequence breaks at term {:?}", seq.first_gap()))?;
                    sequences += 1;
                    nonzero += seq.maps.iter().filter(|m| !m.map.is_zero()).count();
                    cone(&f).map_err(|e| format!("composition {k}: {e}"))?.cone
                }
                1 => {
                    let delta = scaled_identity(&cur, r.gen_range(0..=2));
                    total(&[cur.clone(), cur.clone()], &[delta]).map_err(|e| format!("composition {k}: {e}"))?
                }
                2 => translate(&cur, r.gen_range(-2..=2)),
                3 => twist(&cur, r.gen_range(-2..=2), r.gen_range(-2..=2)),
                _ => {
                    let valid = validate_hodge_complex(&cur).map_err(|e| format!("composition {k}: {e:?}"))?;
                    let t = theorem1(&valid);
                    let hs: Vec<_> = t.structures.iter().map(|s| s.structure.clone()).collect();
                    let diffs: Vec<Matrix<Q>> = hs.windows(2).map(|w| Matrix::zeros(w[1].dim(), w[0].dim())).collect();
                    reindex_from_mhs_complex(cur.complex.min_degree(), &hs, &diffs).map_err(|e| format!("composition {k}: {e}"))?
                }
            };
            validate_hodge_complex(&cur).map_err(|e| format!("composition {k}: operation {op} output rejected: {e:?}"))?;
        }
    }
    Ok(format!("ops cone/total/translate/twist/reindex = {counts:?}, {sequences} exact cone sequences with {nonzero} nonzero maps"))
}

fn finite_space_suite() -> Check {
    let mut r = rng(6);
    for k in 0..100 {
        let strat = random_stratified_poset(&mut r, 10, 4);
        let f = random_cc_sheaf(&mut r, &strat, 2);
        ensure(f.is_constant_constructible(&strat), || format!("poset {k}: sheaf not constant-constructible"))?;
        ensure(strat.closure_lemma_holds(), || format!("poset {k}: closure lemma fails"))?;
        let v = vanishing_check(&strat);
        ensure(v.holds, || format!("poset {k}: vanishing fails at {:?}", v.counterexample))?;
        let m = monad_t(&strat, &f).map_err(|e| format!("poset {k}: {e}"))?.laws();
        ensure(m.holds(), || format!("poset {k}: monad laws {m:?}"))?;
        let n_max = strat.base().height() + 2;
        let (_, b) = bar_complex(&strat, &f, n_max).map_err(|e| format!("poset {k}: {e}"))?;
        ensure(b.holds(), || format!("poset {k}: bar report {b:?}"))?;
    }
    let circle = PosetSheaf::constant(&FinitePoset::circle(), 1);
    let h = sheaf_cohomology(&circle);
    ensure(h == vec![1, 1], || format!("circle cohomology {h:?}"))?;
    let g = godement_cohomology(&circle, 3);
    ensure(g.get(..2) == Some(&[1, 1][..]) && g[2..].iter().all(|&d| d == 0), || format!("circle godement {g:?}"))?;
    Ok("100 stratified posets, circle H^0 = H^1 = k".into())
}

fn mayer_vietoris_suite() -> Check {
    let mut r = rng(7);
    let mut degrees = 0;
    for k in 0..30 {
        let sq = random_blow_down(&mut r, 8);
        let strat = random_stratification(&mut r, &sq.x, 3);
        for f in [PosetSheaf::constant(&sq.x, 1), random_cc_sheaf(&mut r, &strat, 2)] {
            let rep = mayer_vietoris_check(&sq, &f).map_err(|e| format!("square {k}: {e}"))?;
            ensure(rep.holds(), || format!("square {k}: {:?}", rep.failure))?;
            degrees += rep.dims.len();
        }
    }
    Ok(format!("30 squares, {degrees} degrees checked"))
}

fn descent_suite() -> Check {
    let mut r = rng(8);
    let mut points = 0;
    for k in 0..50 {
        let n = r.gen_range(1..=5);
        let p = random_poset(&mut r, n, 0.4);
        let x = simplicial_resolution(&p, &DownSets, 3).map_err(|e| format!("poset {k}: {e}"))?;
        points += (0..=x.top()).map(|n| x.level(n).len()).sum::<usize>();
        let h = hypercover_check(&x);
        ensure(h.holds, || format!("poset {k}: not a hypercover at level {:?}", h.failing_level))?;
        let strat = random_stratification(&mut r, &p, 3);
        let f = random_cc_sheaf(&mut r, &strat, 2);
        let d = descent_check(&x, &f, 2).map_err(|e| format!("poset {k}: {e}"))?;
        ensure(d.holds, || format!("poset {k}: descent fails at {:?}", d.failures))?;
    }
    let sq = blow_down_example();
    let mv = mayer_vietoris_truncation(&sq).map_err(|e| e.to_string())?;
    ensure(!hypercover_check(&mv).holds, || "Mayer-Vietoris truncation is a hypercover".into())?;
    let rep = mayer_vietoris_check(&sq, &PosetSheaf::constant(&sq.x, 1)).map_err(|e| e.to_string())?;
    ensure(rep.holds(), || format!("mv-check fails: {:?}", rep.failure))?;
    Ok(format!("50 resolutions ({points} points over levels 0..3) are hypercovers with descent through degree 2; truncation is not"))
}

fn independence_suite() -> Check {
    let mut r = rng(9);
    let mut nonzero = 0;
    for k in 0..20 {
        let n = r.gen_range(1..=4);
        let p = random_connected_poset(&mut r, n, 2);
        let v = if p.maximal().len() == 1 {
            PureCoefficients::standard(1, &[(1, 1), (0, 1)])
        } else {
            PureCoefficients::standard(0, &[(0, 1)])
        }
        .map_err(|e| e.to_string())?;
        let strat = random_stratification(&mut r, &p, 3);
        let f = random_cc_sheaf(&mut r, &strat, 2);
        let a = simplicial_resolution(&p, &DownSets, 2).map_err(|e| format!("poset {k}: {e}"))?;
        let b = simplicial_resolution(&p, &DownSetsAndPoint, 2).map_err(|e| format!("poset {k}: {e}"))?;
        let rep = independence_check(&a, &b, &f, &v, &DownSets).map_err(|e| format!("poset {k}: {e}"))?;
        ensure(rep.holds, || format!("poset {k}: outputs differ, dims {:?}", rep.dims))?;
        nonzero += usize::from(rep.dims[0].iter().any(|&d| d > 0));
    }
    Ok(format!("20 posets ({nonzero} with nonzero cohomology), three resolutions agree"))
}

fn main() {
    let mut results = Vec::new();
    let mut instances = Vec::new();
    results.push(criterion(1, "theorem 1 suite", 60, || {
        instances = generated_instances(1, 200)?;
        theorem_one_suite(&instances)
    }));
    results.push(criterion(2, "Gr_F degeneration suite", 60, || grf_suite(&instances)));
    results.push(criterion(3, "spectral sequence mechanics", 60, || mechanics_suite(&instances)));
    results.push(criterion(4, "negative controls", 30, negative_suite));
    results.push(criterion(5, "closure suite", 60, closure_suite));
    results.push(criterion(6, "finite-space suite", 60, finite_space_suite));
    results.push(criterion(7, "Mayer-Vietoris suite", 30, mayer_vietoris_suite));
    results.push(criterion(8, "descent suite", 120, descent_suite));
    results.push(criterion(9, "independence suite", 120, independence_suite));
    let passed = results.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
