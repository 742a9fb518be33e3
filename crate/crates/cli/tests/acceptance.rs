use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orbifold_core::catalog;
use orbifold_core::chenruan::{compare_sides, CrSpace};
use orbifold_core::exactfield::{rat, Cyc, Matrix, RatMatrix, Rational};
use orbifold_core::fixedloci::{
    averaging_split_check, lemma_suite, quotient_decomposition, tangent_complex_cohomology, FixedLoci,
};
use orbifold_core::htspace::{Convention, HTClass, HTLabel, HtSpace, Settings};
use orbifold_core::product::{middle_term_table, multiply, multiply_labels, verify_ring_axioms, VerifyMode};
use orbifold_core::torusaction::{validate_scenario, RawScenario};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn loci(raw: RawScenario) -> FixedLoci {
    FixedLoci::new(validate_scenario(&raw).expect("valid scenario"))
}

// Independent exact linear algebra over Q.

type Q = BigRational;
type Mat = Vec<Vec<Q>>;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn rank(m: &Mat) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                let pivot = a[r].clone();
                for (x, y) in a[i][c..].iter_mut().zip(&pivot[c..]) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).fold(Q::zero(), |s, t| s + t)).collect())
        .collect()
}

fn identity(d: usize) -> Mat {
    (0..d).map(|i| (0..d).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
}

fn minus_identity(m: &Mat) -> Mat {
    m.iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, x)| if i == j { x - Q::one() } else { x.clone() }).collect())
        .collect()
}

fn inverse(m: &Mat) -> Option<Mat> {
    let d = m.len();
    let mut a: Mat = m.iter().zip(identity(d)).map(|(r, e)| r.iter().cloned().chain(e).collect()).collect();
    for c in 0..d {
        let p = (c..d).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = Q::one() / &a[c][c];
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..d {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot = a[c].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[d..].to_vec()).collect())
}

struct OracleDims {
    vg: usize,
    vh: usize,
    vgh: usize,
    r: usize,
    quotient: usize,
}

fn oracle_dims(g: &Mat, h: &Mat) -> OracleDims {
    let d = g.len();
    let gm = minus_identity(g);
    let hm = minus_identity(h);
    let vg = d - rank(&gm);
    let vh = d - rank(&hm);
    let stacked: Mat = gm.iter().chain(&hm).cloned().collect();
    let vgh = d - rank(&stacked);
    let r = d - (vg + vh - vgh);
    // columns: (v,v,v,v), (v,gv,0,0), (0,0,v,hv)
    let id = identity(d);
    let zero = vec![vec![Q::zero(); d]; d];
    let blocks: [[&Mat; 3]; 4] = [[&id, &id, &zero], [&id, g, &zero], [&id, &zero, &id], [&id, &zero, h]];
    let mut rel: Mat = Vec::new();
    for brow in blocks {
        for i in 0..d {
            rel.push(brow.iter().flat_map(|b| b[i].iter().cloned()).collect());
        }
    }
    OracleDims { vg, vh, vgh, r, quotient: 4 * d - rank(&rel) }
}

fn to_lib(m: &Mat) -> RatMatrix {
    Matrix::from_rows(&(), m.clone()).expect("rectangular")
}

fn from_lattice(m: &orbifold_core::exactfield::IntMatrix, d: usize) -> Mat {
    (0..d).map(|i| (0..d).map(|j| Q::from_integer(m.get(i, j).clone())).collect()).collect()
}

// Brute-force count of torsion points x ∈ (1/den)Z^d / Z^d with Mx ≡ x.
fn fixed_torsion_points(m: &Mat, den: i64) -> usize {
    let d = m.len();
    let mut count = 0;
    let total = (den as usize).pow(d as u32);
    for idx in 0..total {
        let mut k = idx;
        let x: Vec<Q> = (0..d)
            .map(|_| {
                let c = (k % den as usize) as i64;
                k /= den as usize;
                Q::new(BigInt::from(c), BigInt::from(den))
            })
            .collect();
        let fixed = (0..d).all(|i| {
            let y: Q = (0..d).map(|j| &m[i][j] * &x[j]).fold(Q::zero(), |s, t| s + t);
            (y - &x[i]).is_integer()
        });
        if fixed {
            count += 1;
        }
    }
    count
}

// Independent exterior algebra on ∧(V̄* ⊕ V): generators b̄_1..b̄_n, q_1..q_n as bits.
fn wedge_oracle(a: u32, b: u32) -> Option<(u32, i64)> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0;
    for i in 0..32 {
        if b & (1 << i) != 0 {
            swaps += (a >> (i + 1)).count_ones();
        }
    }
    Some((a | b, if swaps % 2 == 0 { 1 } else { -1 }))
}

fn label_bits(l: &HTLabel, n: usize) -> u32 {
    l.forms.iter().map(|&i| 1u32 << i).sum::<u32>() + l.polys.iter().map(|&i| 1u32 << (n + i)).sum::<u32>()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let l = loci(catalog::kummer());
    let space = HtSpace::new(&l, Settings::default());
    let s = l.scenario();
    let t = s.element_index("t").map_err(|e| e.to_string())?;
    let labels = space.sector_basis(t);
    let points = fixed_torsion_points(&from_lattice(&s.element(t).matrix, 4), 2);
    ensure(points == 16, || format!("oracle found {points} fixed points"))?;
    ensure(labels.len() == 16, || format!("{} labels", labels.len()))?;
    for x in &labels {
        ensure(space.degree(x) == 2, || format!("degree {}", space.degree(x)))?;
        ensure(space.bidegree(x, Convention::New) == (rat(1, 1), rat(1, 1)), || "bidegree".into())?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 1.0, || format!("took {elapsed:?}"))?;
    Ok(format!("16 labels, degree 2, bidegree (1,1), {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let l = loci(catalog::kummer());
    let space = HtSpace::new(&l, Settings::default());
    let by_degree = space.degree_table();
    let totals: Vec<usize> = (0..=4).map(|d| by_degree.get(&d).copied().unwrap_or(0)).collect();
    ensure(totals == vec![1, 0, 22, 0, 1], || format!("totals {totals:?}"))?;

    // oracle: untwisted invariants are even subsets of {b̄1,b̄2,q1,q2}; twisted are the fixed points at (1,1)
    let mut oracle: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for mask in 0u32..16 {
        if mask.count_ones() % 2 == 0 {
            *oracle.entry(((mask & 3).count_ones() as usize, (mask >> 2).count_ones() as usize)).or_insert(0) += 1;
        }
    }
    let s = l.scenario();
    let t = s.element_index("t").map_err(|e| e.to_string())?;
    *oracle.entry((1, 1)).or_insert(0) += fixed_torsion_points(&from_lattice(&s.element(t).matrix, 4), 2);
    let table = space.dimension_table(Convention::New);
    for ((p, qq), n) in &oracle {
        let got = table.get(&rat(*p as i64, 1), &rat(*qq as i64, 1));
        ensure(got == *n, || format!("({p},{qq}) has {got}, oracle {n}"))?;
    }
    ensure(table.total() == oracle.values().sum::<usize>(), || "extra table entries".into())?;
    for (p, qq, n) in [(1, 1, 20), (0, 0, 1), (2, 2, 1), (2, 0, 1), (0, 2, 1)] {
        ensure(table.get(&rat(p, 1), &rat(qq, 1)) == n, || format!("({p},{qq}) != {n}"))?;
    }
    let cmp = compare_sides(&space).map_err(|e| e.to_string())?;
    ensure(cmp.dimensions_agree, || format!("{:?}", cmp.rows))?;
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 5.0, || format!("took {elapsed:?}"))?;
    Ok(format!("totals (1,0,22,0,1), (1,1)=20, Chen-Ruan table agrees, {elapsed:.2?}"))
}

fn criterion_3() -> Outcome {
    let l = loci(catalog::kummer());
    let space = HtSpace::new(&l, Settings::default());
    let n = space.conductor();
    let s = l.scenario();
    let t = s.element_index("t").map_err(|e| e.to_string())?;
    let generator = HTLabel { sector: s.identity(), component: 0, forms: vec![0, 1], polys: vec![0, 1] };
    let mut scalar: Option<Cyc> = None;
    for x in 0..16 {
        for y in 0..16 {
            let a = HTClass::basis(n, HTLabel { sector: t, component: x, forms: vec![], polys: vec![] });
            let b = HTClass::basis(n, HTLabel { sector: t, component: y, forms: vec![], polys: vec![] });
            let p = multiply(&space, &a, &b).map_err(|e| e.to_string())?;
            if x != y {
                ensure(p.is_zero(), || format!("1_{x} 1_{y} = {}", space.render(&p)))?;
                continue;
            }
            ensure(p.len() == 1 && !p.coefficient(&generator).is_zero(), || format!("1_{x}^2 = {}", space.render(&p)))?;
            ensure(space.bigrade(&p, Convention::New).ok() == Some((rat(2, 1), rat(2, 1))), || "bidegree".into())?;
            let c = p.coefficient(&generator);
            match &scalar {
                None => scalar = Some(c),
                Some(c0) => ensure(*c0 == c, || format!("1_{x}^2 has coefficient {c}, expected {c0}"))?,
            }
        }
    }
    let cmp = compare_sides(&space).map_err(|e| e.to_string())?;
    ensure(cmp.structure_agrees == Some(true), || format!("{:?}", cmp.mismatches))?;
    let cr = CrSpace::new(&l);
    let one = cr.parse("t:3:|").map_err(|e| e.to_string())?;
    let sq = cr.fg_product(&one, &one).map_err(|e| e.to_string())?;
    ensure(sq.len() == 1, || "Chen-Ruan square".into())?;
    Ok(format!(
        "1_x 1_y = δ·({})·[e:0:1,2|1,2], Chen-Ruan scalar {}",
        scalar.map(|c| c.to_string()).unwrap_or_default(),
        cmp.lambda.unwrap_or_default()
    ))
}

fn criterion_4() -> Outcome {
    let mut checked = 0;
    for raw in [catalog::torus_e(), catalog::abelian_surface()] {
        let l = loci(raw);
        let space = HtSpace::new(&l, Settings::default());
        let n = l.scenario().n();
        let basis = space.basis();
        let by_bits: BTreeMap<u32, &HTLabel> = basis.iter().map(|x| (label_bits(x, n), x)).collect();
        for a in &basis {
            for b in &basis {
                let got = multiply_labels(&space, a, b).map_err(|e| e.to_string())?;
                let expected = match wedge_oracle(label_bits(a, n), label_bits(b, n)) {
                    None => HTClass::zero(space.conductor()),
                    Some((bits, sign)) => HTClass::basis(space.conductor(), by_bits[&bits].clone())
                        .scale(&Cyc::from_int(space.conductor(), sign)),
                };
                ensure(got == expected, || {
                    format!("{} * {}: {} vs {}", space.render_label(a), space.render_label(b), space.render(&got), space.render(&expected))
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} pairs match the wedge oracle"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let runs = [
        (catalog::kummer(), VerifyMode::ExhaustiveDeg2),
        (catalog::e_pm1(), VerifyMode::Exhaustive),
        (catalog::e_z3(), VerifyMode::Exhaustive),
        (catalog::e_i_z4(), VerifyMode::Exhaustive),
    ];
    for (raw, mode) in runs {
        let l = loci(raw);
        let space = HtSpace::new(&l, Settings::default());
        let report = verify_ring_axioms(&space, mode).map_err(|e| e.to_string())?;
        for id in ["associativity", "commutativity", "graded-commutativity-invariants", "unit", "bidegree-additivity", "invariance-closure"] {
            let c = report.check(id).ok_or_else(|| format!("missing check {id}"))?;
            ensure(c.passed(), || format!("{} {id}: {} {:?}", report.scenario, c.detail, c.witnesses))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 60.0, || format!("took {elapsed:?}"))?;
    Ok(format!("all axioms hold, {elapsed:.2?}"))
}

fn check_lemmas(g: &Mat, h: &Mat, what: &str) -> Result<(), String> {
    let o = oracle_dims(g, h);
    let (lg, lh) = (to_lib(g), to_lib(h));
    let qd = quotient_decomposition(&lg, &lh).map_err(|e| e.to_string())?;
    ensure(qd.dim_vg == o.vg && qd.dim_vh == o.vh && qd.r == o.r, || format!("{what}: dims differ from oracle"))?;
    ensure(qd.dim_quotient == o.quotient && o.quotient == o.vg + o.vh + o.r, || {
        format!("{what}: quotient {} oracle {} expected {}", qd.dim_quotient, o.quotient, o.vg + o.vh + o.r)
    })?;
    ensure(qd.is_isomorphism(), || format!("{what}: map is not an isomorphism"))?;
    let split = averaging_split_check(&lg, &lh).map_err(|e| e.to_string())?;
    ensure(split.passed, || format!("{what}: {:?}", split.witness))?;
    let t = tangent_complex_cohomology(&lg, &lh).map_err(|e| e.to_string())?;
    ensure(t.h0 == o.vgh && t.h1 == o.vg + o.vh + o.r, || format!("{what}: tangent ({}, {})", t.h0, t.h1))
}

fn random_commuting_pair(rng: &mut ChaCha8Rng) -> (Mat, Mat) {
    let rotations: [[[i64; 2]; 2]; 4] = [[[-1, 0], [0, -1]], [[0, -1], [1, 0]], [[0, -1], [1, -1]], [[1, -1], [1, 0]]];
    let orders = [2u32, 4, 3, 6];
    let d = rng.gen_range(1..=6);
    let mut dg = vec![vec![Q::zero(); d]; d];
    let mut dh = vec![vec![Q::zero(); d]; d];
    let mut at = 0;
    while at < d {
        if at + 2 <= d && rng.gen_bool(0.6) {
            let k = rng.gen_range(0..rotations.len());
            let power = |e: u32| {
                let mut m = identity(2);
                let r: Mat = rotations[k].iter().map(|row| row.iter().map(|&x| q(x)).collect()).collect();
                for _ in 0..e {
                    m = mat_mul(&m, &r);
                }
                m
            };
            let (pg, ph) = (power(rng.gen_range(0..orders[k])), power(rng.gen_range(0..orders[k])));
            for i in 0..2 {
                for j in 0..2 {
                    dg[at + i][at + j] = pg[i][j].clone();
                    dh[at + i][at + j] = ph[i][j].clone();
                }
            }
            at += 2;
        } else {
            dg[at][at] = q(if rng.gen_bool(0.5) { 1 } else { -1 });
            dh[at][at] = q(if rng.gen_bool(0.5) { 1 } else { -1 });
            at += 1;
        }
    }
    loop {
        let p: Mat = (0..d).map(|_| (0..d).map(|_| q(rng.gen_range(-2..=2))).collect()).collect();
        if let Some(pinv) = inverse(&p) {
            return (mat_mul(&mat_mul(&p, &dg), &pinv), mat_mul(&mat_mul(&p, &dh), &pinv));
        }
    }
}

fn criterion_6() -> Outcome {
    let mut pairs = 0;
    for raw in [catalog::kummer(), catalog::e_pm1(), catalog::e_z3(), catalog::e_i_z4()] {
        let l = loci(raw);
        let s = l.scenario();
        let d = 2 * s.n();
        for g in 0..s.order() {
            for h in 0..s.order() {
                let what = format!("{} ({}, {})", s.name(), s.label(g), s.label(h));
                check_lemmas(&from_lattice(&s.element(g).matrix, d), &from_lattice(&s.element(h).matrix, d), &what)?;
                pairs += 1;
            }
        }
        let (rows, report) = lemma_suite(s).map_err(|e| e.to_string())?;
        ensure(report.all_passed(), || format!("{} on V: {:?}", s.name(), report.checks))?;
        for r in &rows {
            let g = s.element_index(&r.g).map_err(|e| e.to_string())?;
            let h = s.element_index(&r.h).map_err(|e| e.to_string())?;
            let fixed = |e: usize| (0..s.n()).filter(|&j| s.char_exponent(e, j) == 0).count();
            let both = (0..s.n()).filter(|&j| s.char_exponent(g, j) == 0 && s.char_exponent(h, j) == 0).count();
            let moved = (0..s.n()).filter(|&j| s.char_exponent(g, j) != 0 && s.char_exponent(h, j) != 0).count();
            ensure(r.h0 == both && r.h1 == fixed(g) + fixed(h) + moved, || format!("{} on V ({}, {})", s.name(), r.g, r.h))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..100 {
        let (g, h) = random_commuting_pair(&mut rng);
        ensure(mat_mul(&g, &h) == mat_mul(&h, &g), || "generator bug".into())?;
        check_lemmas(&g, &h, &format!("random pair {i} (dim {})", g.len()))?;
    }
    Ok(format!("{pairs} scenario pairs and 100 random pairs agree with the rank oracle"))
}

fn criterion_7() -> Outcome {
    let cases = [(catalog::kummer(), "t", 16), (catalog::e_pm1(), "t", 4), (catalog::e_z3(), "w", 3), (catalog::e_i_z4(), "s", 2)];
    let mut found = Vec::new();
    for (raw, gen, expected) in cases {
        let l = loci(raw);
        let s = l.scenario();
        let g = s.element_index(gen).map_err(|e| e.to_string())?;
        let brute = fixed_torsion_points(&from_lattice(&s.element(g).matrix, 2 * s.n()), 12);
        let comps = l.sector(g).components.order();
        ensure(l.sector(g).dim() == 0, || format!("{}: fixed locus is not finite", s.name()))?;
        ensure(brute == expected && comps == expected, || format!("{}: brute {brute}, components {comps}, expected {expected}", s.name()))?;
        found.push(comps.to_string());
    }
    Ok(format!("fixed points {}", found.join(", ")))
}

fn criterion_8() -> Outcome {
    let mut products = 0;
    let runs = [(catalog::kummer(), true), (catalog::e_pm1(), false), (catalog::e_z3(), false), (catalog::e_i_z4(), false), (catalog::ee_z2xz2(), true)];
    for (raw, low_degree) in runs {
        let l = loci(raw);
        let space = HtSpace::new(&l, Settings::default());
        let basis: Vec<HTLabel> = space.basis().into_iter().filter(|x| !low_degree || space.degree(x) <= 2).collect();
        for a in &basis {
            for b in &basis {
                let pair = l.pair(a.sector, b.sector).map_err(|e| e.to_string())?;
                let (pa, qa) = space.bidegree(a, Convention::Parenthesized);
                let (pb, qb) = space.bidegree(b, Convention::Parenthesized);
                let table = middle_term_table(&space, a.sector, b.sector, pa.to_integer().try_into().unwrap(), a.polys.len(), pb.to_integer().try_into().unwrap(), b.polys.len())
                    .map_err(|e| e.to_string())?;
                ensure(table.len() == pair.r + 1, || "middle-term range is not 0..r".into())?;
                let p = multiply_labels(&space, a, b).map_err(|e| e.to_string())?;
                for (l2, _) in p.terms() {
                    let (pc, qc) = space.bidegree(l2, Convention::Parenthesized);
                    let i: Rational = &pa + &pb - &pc;
                    let ok = i == rat(pair.r as i64, 1) && qc == &qa + &qb + &i && table[pair.r] > 0;
                    ensure(ok, || format!("{} * {} -> {}", space.render_label(a), space.render_label(b), space.render_label(l2)))?;
                }
                products += 1;
            }
        }
    }
    Ok(format!("{products} products land at i = r"))
}

fn criterion_9() -> Outcome {
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut compared = 0;
    for scenario in orbifold_ht::scenario::bundled_names() {
        for command in ["ht-table", "cr-table", "verify"] {
            let run = || {
                Command::new(env!("CARGO_BIN_EXE_orbifold-ht"))
                    .args([command, scenario, "--output", "structured"])
                    .output()
                    .map_err(|e| e.to_string())
            };
            let (a, b) = (run()?, run()?);
            ensure(a.status.success() && b.status.success(), || format!("{command} {scenario} failed"))?;
            ensure(a.stdout == b.stdout, || format!("{command} {scenario} differs between runs"))?;
            let path = golden.join(format!("{command}-{scenario}.json"));
            let expected = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            ensure(a.stdout == expected, || format!("{command} {scenario} differs from golden file"))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} outputs byte-identical to golden files"))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("Kummer twisted sector", criterion_1),
        ("Kummer totals and Hodge table", criterion_2),
        ("Kummer twisted product", criterion_3),
        ("classical reduction", criterion_4),
        ("ring axioms", criterion_5),
        ("linear-algebra lemmas", criterion_6),
        ("fixed-point counts", criterion_7),
        ("middle-term consistency", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
