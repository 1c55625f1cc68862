//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always show.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_bigint::BigUint;

use heffter_core::bounds::{binary_entropy, binom, derangements, evaluate_bound, BoundQuery, TheoremId};
use heffter_core::embedding::{build_embedding, report};
use heffter_core::fixtures;
use heffter_core::heffter::{
    is_globally_simple, orderings_from_orientations, search_heffter, validate_heffter, SearchParams,
    SkeletonConstraint,
};
use heffter_core::iso::{certify_distinct, classify, stabilizer, verify_map, MapKind, Verdict};
use heffter_core::knight::{
    check_char_cyclic, check_char_width, enumerate_solutions, gen_family_3diag, gen_family_k7, gen_family_pairs,
    gen_family_power2, gen_family_prime, FamilyOptions, FamilySpec, OrientationPair, Torus,
};
use heffter_core::perm::{cyclically_equal, Permutation};
use heffter_core::pfarray::{reduce, PartiallyFilledArray, Skeleton};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T: std::fmt::Debug>(x: T) -> String {
    format!("{x:?}")
}

fn example_pair() -> OrientationPair {
    let (r, c) = fixtures::example_orientation();
    OrientationPair::new(r, c).unwrap()
}

fn c1_validation() -> Outcome {
    let a = fixtures::example_h9_11_9();
    let rep = validate_heffter(&a).map_err(e)?;
    ensure(rep.pass, format!("validation failed: {rep:?}"))?;
    ensure((a.modulus(), a.subgroup_order(), rep.h, rep.k) == (207, 9, Some(9), Some(9)), "wrong parameters")?;
    let prof = a.skeleton().classify_diagonality().map_err(e)?;
    ensure(prof.k == 9 && prof.strip_widths() == vec![1, 1], format!("diagonal profile {prof:?}"))?;
    ensure(is_globally_simple(&a), "not globally simple")?;
    // Every partial sum of every row and column is distinct modulo v.
    let lines = (1..=11).map(|i| a.row_values(i)).chain((1..=11).map(|j| a.col_values(j)));
    let mut checked = 0;
    for line in lines {
        let sums: Vec<u32> = line.iter().scan(0u64, |s, &x| {
            *s = (*s + x as u64) % 207;
            Some(*s as u32)
        }).collect();
        ensure(sums.iter().all_unique(), "repeated partial sum")?;
        ensure(sums.last() == Some(&0), "line does not sum to zero")?;
        checked += sums.len();
    }
    Ok(format!("H_9(11;9) over Z_207, 9-diagonal widths [1,1], {checked} partial sums distinct"))
}

fn c2_tour() -> Outcome {
    let a = fixtures::example_h9_11_9();
    let torus = Torus::new(&a.skeleton()).map_err(e)?;
    let tour = torus.tour(&example_pair(), (1, 1)).map_err(e)?;
    let table = fixtures::example_tour_table();
    let mut golden = vec![(0, 0); 99];
    let mut labels = 0;
    for (i, row) in table.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            if let Some(step) = cell {
                golden[*step] = (i + 1, j + 1);
                labels += 1;
            }
        }
    }
    ensure(labels == 99, format!("golden table has {labels} labels"))?;
    ensure(tour.visited == golden, "tour differs from the golden table")?;
    ensure(tour.covers_all && tour.period == 99, "tour is not a solution")?;
    Ok("99 steps match the golden table".into())
}

fn signed_cycles(p: &Permutation, v: u32) -> Vec<Vec<i64>> {
    p.cycles().into_iter().map(|c| c.into_iter().map(|x| heffter_core::pfarray::signed(x, v)).collect()).collect()
}

fn c3_orderings() -> Outcome {
    let a = fixtures::example_h9_11_9();
    let (r, c) = fixtures::example_orientation();
    let ord = orderings_from_orientations(&a, &r, &c).map_err(e)?;
    let (wr, wc) = (ord.omega_r().map_err(e)?, ord.omega_c().map_err(e)?);
    let (gr, gc, gcomp) = fixtures::example_orderings();
    let to_perm = |cycles: &[Vec<i64>]| {
        Permutation::from_cycles(&cycles.iter().map(|c| c.iter().map(|&x| reduce(x, 207)).collect_vec()).collect_vec())
    };
    ensure(wr == to_perm(&gr).map_err(e)?, format!("omega_r differs: {:?}", signed_cycles(&wr, 207)))?;
    ensure(wc == to_perm(&gc).map_err(e)?, "omega_c differs")?;
    let comp = wc.compose(&wr).map_err(e)?;
    let cycles = comp.cycles();
    ensure(cycles.len() == 1 && cycles[0].len() == 99, "composition is not a 99-cycle")?;
    let golden: Vec<u32> = gcomp.iter().map(|&x| reduce(x, 207)).collect();
    ensure(cyclically_equal(&cycles[0], &golden), "composition differs from the printed cycle")?;
    Ok("omega_r, omega_c and the 99-cycle reproduced".into())
}

fn c4_embedding() -> Outcome {
    let a = fixtures::example_h9_11_9();
    let emb = build_embedding(&a, &example_pair()).map_err(e)?;
    let r = report(&a, &emb).map_err(e)?;
    ensure(r.faces == 4554, format!("F = {}", r.faces))?;
    ensure(r.row_faces == 2277 && r.column_faces == 2277, "per-color counts")?;
    ensure(r.lengths_match && r.simple && r.two_colorable, format!("{r:?}"))?;
    ensure(r.genus_euler == 7867 && r.genus_formula == 7867, format!("genus {} / {}", r.genus_euler, r.genus_formula))?;
    ensure(r.z_v_regular && r.pass, "report does not pass")?;
    Ok("K_23x9: F = 4554 (2277 + 2277), all length 9 and simple, genus 7867".into())
}

struct CharCase {
    skel: Skeleton,
    n: usize,
    k: usize,
    cyclic: bool,
}

fn char_cases() -> Vec<CharCase> {
    let mut cases: Vec<CharCase> = [(5, 3), (7, 3), (9, 3), (7, 5)]
        .into_iter()
        .map(|(n, k)| CharCase { skel: Skeleton::cyclic_diagonals(n, 1, k).unwrap(), n, k, cyclic: true })
        .collect();
    cases.push(CharCase { skel: fixtures::example_h9_11_9().skeleton(), n: 11, k: 9, cyclic: false });
    cases
}

fn trivial_r_vectors(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |mask| (1..=n).filter(|p| mask >> (p - 1) & 1 == 1).collect())
}

/// Trivial-R solutions found by the direct tour on each case.
fn c5_characterizations(found: &mut Vec<(Skeleton, bool, Vec<OrientationPair>)>) -> Outcome {
    let mut disagreements = Vec::new();
    let mut total = 0;
    for case in char_cases() {
        let torus = Torus::new(&case.skel).map_err(e)?;
        let mut sols = Vec::new();
        for es in trivial_r_vectors(case.n) {
            let pair = OrientationPair::trivial_r(case.n, case.n, &es).map_err(e)?;
            let direct = torus.is_solution(&pair).map_err(e)?;
            let predicted = if case.cyclic {
                check_char_cyclic(case.n, case.k, &es).map_err(e)?
            } else {
                check_char_width(&case.skel, &es).map_err(e)?.holds()
            };
            if direct != predicted {
                disagreements.push(format!("n={} k={} E={es:?}: tour {direct}, characterization {predicted}", case.n, case.k));
            }
            if direct {
                sols.push(pair);
            }
            total += 1;
        }
        found.push((case.skel, case.cyclic, sols));
    }
    ensure(disagreements.is_empty(), format!("{} disagreements, first: {}", disagreements.len(), disagreements.first().cloned().unwrap_or_default()))?;
    Ok(format!("{total} vectors, zero disagreements"))
}

fn c6_symmetry(found: &[(Skeleton, bool, Vec<OrientationPair>)]) -> Outcome {
    let mut checked = 0;
    for (skel, cyclic, sols) in found {
        let torus = Torus::new(skel).map_err(e)?;
        for s in sols {
            ensure(torus.is_solution(&s.negate()).map_err(e)?, format!("-R,-C fails for {:?}", s.e()))?;
            if *cyclic {
                ensure(torus.is_solution(&s.swap(skel).map_err(e)?).map_err(e)?, format!("C,R fails for {:?}", s.e()))?;
            }
            checked += 1;
        }
    }
    ensure(checked > 0, "no solutions to check")?;
    Ok(format!("{checked} solutions closed under negation and swap"))
}

fn family_check(spec: &FamilySpec, pairs: impl Iterator<Item = OrientationPair>) -> Result<usize, String> {
    let torus = Torus::new(&spec.skeleton()).map_err(e)?;
    let mut count = 0;
    for p in pairs {
        ensure(torus.is_solution(&p).map_err(e)?, format!("{:?} n={} pair R={:?} C={:?} fails", spec.id, spec.n, p.r, p.c))?;
        count += 1;
    }
    Ok(count)
}

fn bound_exact(id: TheoremId, n: u64, k: u64) -> Result<BigUint, String> {
    let r = evaluate_bound(&BoundQuery::new(id, n, k)).map_err(e)?;
    r.floor.parse().map_err(e)
}

fn c7_families() -> Outcome {
    let mut notes = Vec::new();
    for n in [3, 5, 7, 9] {
        let spec = gen_family_3diag(n).map_err(e)?;
        let census = family_check(&spec, spec.pairs())?;
        let lb = evaluate_bound(&BoundQuery::new(TheoremId::Prop3diag, n as u64, 3)).map_err(e)?;
        ensure(census as f64 >= lb.approx, format!("3diag n={n}: census {census} < {}", lb.approx))?;
        notes.push(format!("3diag n={n}: {census}"));
    }
    let opts = FamilyOptions::default();
    let cases: Vec<(FamilySpec, TheoremId)> = vec![
        (gen_family_power2(21, 5, &opts).map_err(e)?, TheoremId::PropPower2),
        (gen_family_prime(41, 5, &opts).map_err(e)?, TheoremId::PropPrime),
        (gen_family_pairs(11, 5, 3, 2, &opts).map_err(e)?, TheoremId::PropPairs),
    ];
    for (spec, id) in cases {
        let census = family_check(&spec, spec.pairs())?;
        let lb = bound_exact(id, spec.n as u64, spec.k as u64)?;
        ensure(BigUint::from(census) >= lb, format!("{:?}: census {census} < {lb}", spec.id))?;
        notes.push(format!("{} n={}: {census} >= {lb}", id.name(), spec.n));
    }
    let k7 = gen_family_k7(123, &opts).map_err(e)?;
    let stride = (k7.base_count() / 20) as usize;
    let sample: Vec<Vec<usize>> = k7.base_sets().step_by(stride).take(20).collect();
    ensure(sample.len() == 20, "k7 sample too small")?;
    let pairs = sample.iter().flat_map(|es| {
        let base = OrientationPair::trivial_r(123, 123, es).unwrap();
        let sw = OrientationPair { r: base.c.clone(), c: base.r.clone() };
        [base.negate(), sw.negate(), sw, base]
    });
    let checked = family_check(&k7, pairs)?;
    let census = BigUint::from(k7.base_count()) * 4u32;
    let lb = bound_exact(TheoremId::PropK7, 123, 7)?;
    ensure(census >= lb, format!("k7 census {census} < {lb}"))?;
    notes.push(format!("k7 n=123: {checked} sampled pairs pass, census {census} >= {lb}"));
    Ok(notes.join("; "))
}

fn searched(m: usize, k: usize, sk: SkeletonConstraint, limit: usize) -> Result<Vec<PartiallyFilledArray>, String> {
    search_heffter(&SearchParams::new(m, m, k, k, 1).limit(limit).skeleton(sk)).map_err(e)
}

fn c8_automorphisms() -> Outcome {
    let a = searched(3, 3, SkeletonConstraint::Auto, 1)?.pop().ok_or("no H(3;3) found")?;
    let sols = enumerate_solutions(&a.skeleton(), false, 1 << 6).map_err(e)?;
    let pair = sols.first().ok_or("H(3;3) has no tour solution")?;
    let emb = build_embedding(&a, pair).map_err(e)?;
    ensure(report(&a, &emb).map_err(e)?.pass, "K_19 embedding report fails")?;
    let st = stabilizer(&emb);
    for m in &st.elements {
        ensure(verify_map(&emb, &emb, &m.sigma).map_err(e)? == Verdict::from(m.kind), "stabilizer element fails verify_map")?;
        ensure(m.sigma[0] == 0, "stabilizer element moves 0")?;
    }
    let plus = st.elements.iter().filter(|m| m.kind == MapKind::Preserving).count();
    ensure(st.order <= 2 * plus && 2 * plus <= 36, format!("|Aut0| = {}, |Aut0+| = {plus}", st.order))?;
    Ok(format!("|Aut0| = {} <= 2|Aut0+| = {} <= 36", st.order, 2 * plus))
}

fn c9_distinctness() -> Outcome {
    let arrays = searched(5, 3, SkeletonConstraint::CyclicDiagonal, 64)?;
    let a = arrays.into_iter().find(is_globally_simple).ok_or("no globally simple cyclic H(5;3) found")?;
    let sols = enumerate_solutions(&a.skeleton(), true, 1 << 5).map_err(e)?;
    ensure(!sols.is_empty(), "no trivial-R solutions")?;
    let embs = sols.iter().map(|p| build_embedding(&a, p)).collect::<Result<Vec<_>, _>>().map_err(e)?;
    let hashes: BTreeSet<String> = embs.iter().map(|x| x.rho0_hash()).collect();
    ensure(hashes.len() == sols.len(), format!("{} solutions but {} rotation maps", sols.len(), hashes.len()))?;
    let batch: Vec<(PartiallyFilledArray, OrientationPair)> = sols.iter().map(|p| (a.clone(), p.clone())).collect();
    let certified = certify_distinct(&batch).map_err(e)?;
    ensure(certified == sols.len(), format!("certified {certified}"))?;
    let res = classify(&embs).map_err(e)?;
    let deg = embs[0].connection_set().len();
    ensure(res.classes.iter().all(|c| c.members.len() <= 2 * deg * deg && c.within_sharp_cap), "class above 2((m-1)t)^2")?;
    Ok(format!(
        "{} solutions, {} distinct rotation maps, class sizes {:?} (cap {})",
        sols.len(),
        hashes.len(),
        res.class_sizes(),
        2 * deg * deg
    ))
}

fn c10_bounds() -> Outcome {
    for m in 0..=8u64 {
        let brute = (0..m).permutations(m as usize).filter(|p| p.iter().enumerate().all(|(i, &x)| i as u64 != x)).count();
        ensure(derangements(m) == BigUint::from(brute), format!("derangements({m})"))?;
    }
    ensure(binom(11, 2) == BigUint::from(55u8) && binom(20, 10) == BigUint::from(184756u32), "binomial spot values")?;
    ensure(binary_entropy(0.5).map_err(e)? == 1.0, "H(1/2)")?;
    let closed = 2.0 - 0.75 * 3f64.log2();
    ensure((binary_entropy(0.25).map_err(e)? - closed).abs() <= 1e-12, "H(1/4)")?;
    let cdy = evaluate_bound(&BoundQuery::new(TheoremId::Cdy, 13, 11)).map_err(e)?;
    ensure(cdy.exact.as_deref() == Some("11"), format!("CDY(13, 11) = {:?}", cdy.exact))?;
    Ok("derangements m <= 8, H(1/2) = 1, H(1/4) within 1e-12, CDY(k=11, n=13) = 11".into())
}

fn main() -> ExitCode {
    let mut found = Vec::new();
    let mut results: Vec<(u32, &str, Duration, Outcome, Duration)> = Vec::new();
    let mut timed = |id: u32, name: &'static str, limit: Duration, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = f();
        results.push((id, name, start.elapsed(), out, limit));
    };
    let s = Duration::from_secs;
    timed(1, "golden validation", s(1), &mut c1_validation);
    timed(2, "golden tour", s(1), &mut c2_tour);
    timed(3, "golden orderings", s(1), &mut c3_orderings);
    timed(4, "golden embedding", s(10), &mut c4_embedding);
    timed(5, "characterization oracles", s(60), &mut || c5_characterizations(&mut found));
    timed(6, "symmetry lemmas", s(60), &mut || c6_symmetry(&found));
    timed(7, "family soundness", s(300), &mut c7_families);
    timed(8, "automorphism bound", s(60), &mut c8_automorphisms);
    timed(9, "distinctness", s(120), &mut c9_distinctness);
    timed(10, "bound calculators", s(1), &mut c10_bounds);
    let mut failed = 0;
    for (id, name, took, out, limit) in results {
        let (ok, detail) = match out {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(d) => (false, d),
        };
        failed += !ok as u32;
        println!(
            "criterion {id:>2} {} {name}: {detail} ({:.2}s, limit {}s)",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
