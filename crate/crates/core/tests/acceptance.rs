//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ak_core::bistellar::{
    is_isomorphic, random_raising_moves, reduce, replay, ReduceOptions, Schedule,
};
use ak_core::builder::{deviation_table, verify_homology_sphere, Pipeline};
use ak_core::catalog;
use ak_core::linalg::{
    betti_numbers, homology_all, invariant_factors, smith_normal_form, HomologyGroup,
    SparseIntMatrix,
};
use ak_core::morse::morse_experiment;
use ak_core::pi1::{abelianization, edge_path_presentation, tietze_simplify, GroupPresentation};
use ak_core::product::{product_with_interval, staircase_product, OrderedComplex};
use ak_core::{Simplex, SimplicialComplex};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Rank of a 0/±1 boundary matrix over the prime field 𝔽_p.
fn rank_mod_p(k: &SimplicialComplex, i: usize, p: i64) -> usize {
    let rows = k.faces(i - 1);
    let index: HashMap<&Simplex, usize> = rows.iter().enumerate().map(|(r, s)| (s, r)).collect();
    let mut m: Vec<Vec<i64>> = k
        .faces(i)
        .iter()
        .map(|s| {
            let mut col = vec![0i64; rows.len()];
            for j in 0..s.len() {
                let sign = if j % 2 == 0 { 1 } else { p - 1 };
                col[index[&s.without_index(j)]] = sign;
            }
            col
        })
        .collect();
    let mut rank = 0;
    let n = rows.len();
    for r in 0..n {
        let Some(piv) = (rank..m.len()).find(|&c| m[c][r] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = (1..p).find(|x| x * m[rank][r] % p == 1).unwrap();
        for c in 0..m.len() {
            if c != rank && m[c][r] != 0 {
                let f = m[c][r] * inv % p;
                for q in 0..n {
                    m[c][q] = ((m[c][q] - f * m[rank][q]) % p + p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn betti_mod_p(k: &SimplicialComplex, p: i64) -> Vec<usize> {
    let d = k.dim() as usize;
    let ranks: Vec<usize> = (0..=d + 1)
        .map(|i| {
            if i == 0 || i > d {
                0
            } else {
                rank_mod_p(k, i, p)
            }
        })
        .collect();
    (0..=d)
        .map(|i| k.faces(i).len() - ranks[i] - ranks[i + 1])
        .collect()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let s = catalog::sphere(4);
    let h = homology_all(&s);
    let expected = vec![
        HomologyGroup::free(1),
        HomologyGroup::default(),
        HomologyGroup::default(),
        HomologyGroup::default(),
        HomologyGroup::free(1),
    ];
    ensure(h == expected, format!("sphere homology {h:?}"))?;
    let rp2 = catalog::rp2();
    let h = homology_all(&rp2);
    let z2 = HomologyGroup {
        betti: 0,
        torsion: vec![BigInt::from(2)],
    };
    ensure(
        h == vec![HomologyGroup::free(1), z2, HomologyGroup::default()],
        format!("RP2 homology {h:?}"),
    )?;
    // Field ranks: 𝔽₂ sees the torsion in degrees 1 and 2, 𝔽₃ does not.
    ensure(
        betti_mod_p(&rp2, 2) == vec![1, 1, 1] && betti_mod_p(&rp2, 3) == vec![1, 0, 0],
        "mod-p Betti numbers of RP2",
    )?;
    ensure(
        betti_mod_p(&s, 2) == vec![1, 0, 0, 0, 1],
        "mod-2 Betti numbers of the sphere",
    )?;
    ensure(t.elapsed() < Duration::from_secs(2), "too slow")?;
    Ok(format!(
        "S^4 (Z,0,0,0,Z), RP2 (Z,Z/2,0) in {:.2?}",
        t.elapsed()
    ))
}

fn criterion_2(pipelines: &HashMap<usize, Pipeline>) -> Outcome {
    let mut times = Vec::new();
    for r in 3..=6 {
        let t = Instant::now();
        let p = &pipelines[&r];
        let report = verify_homology_sphere(&p.sphere, Some(&p.glued.complex.complex));
        if let Some(c) = report.failures().next() {
            return Err(format!("r={r}: {} failed: {:?}", c.name, c.certificate));
        }
        ensure(report.checks.len() == 7, "ball-vertex check missing")?;
        // Every ridge of the sphere in exactly two facets, counted directly.
        let mut ridges: HashMap<Simplex, usize> = HashMap::new();
        for f in p.sphere.facets() {
            for b in f.boundary() {
                *ridges.entry(b).or_insert(0) += 1;
            }
        }
        ensure(
            ridges.values().all(|&c| c == 2),
            format!("r={r}: ridge degree"),
        )?;
        times.push(format!("r={r} {:.1?}", t.elapsed()));
    }
    Ok(format!("r=3..6 pass verify ({})", times.join(", ")))
}

fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn criterion_3(pipelines: &HashMap<usize, Pipeline>) -> Outcome {
    let f: Vec<Vec<i64>> = (3..=7)
        .map(|r| {
            pipelines[&r]
                .sphere
                .f_vector()
                .0
                .iter()
                .map(|&x| x as i64)
                .collect()
        })
        .collect();
    for (i, w) in f.windows(3).enumerate() {
        for d in 0..5 {
            ensure(
                w[2][d] - 2 * w[1][d] + w[0][d] == 0,
                format!("second difference at r={}, dim {d}", i + 4),
            )?;
        }
    }
    for (i, v) in f.iter().enumerate() {
        let chi: i64 = v
            .iter()
            .enumerate()
            .map(|(d, x)| if d % 2 == 0 { *x } else { -x })
            .sum();
        ensure(chi == 2, format!("r={}: chi = {chi}", i + 3))?;
    }
    let slope: Vec<i64> = (0..5).map(|d| f[1][d] - f[0][d]).collect();
    let intercept: Vec<i64> = (0..5).map(|d| f[0][d] - 3 * slope[d]).collect();
    let table: Vec<_> = (3..=7)
        .map(|r| (r, deviation_table(r, &pipelines[&r].sphere.f_vector().0)))
        .collect();
    eprintln!("  f(r) = {intercept:?} + r * {slope:?}");
    eprintln!(
        "  {:>2} {:>4} {:>8} {:>10} {:>10}",
        "r", "dim", "built", "reference", "relative"
    );
    for (r, rows) in &table {
        for row in rows {
            eprintln!(
                "  {r:>2} {:>4} {:>8} {:>10} {:>+10.4}",
                row.dim, row.built, row.reference, row.relative
            );
        }
    }
    let dir = workspace_root().join("artifacts");
    let json = serde_json::json!({
        "schema": "ak/1",
        "f_intercept": intercept,
        "f_slope": slope,
        "rows": table.iter().map(|(r, rows)| serde_json::json!({"r": r, "deviation": rows})).collect::<Vec<_>>(),
    });
    std::fs::create_dir_all(&dir)
        .and_then(|_| {
            std::fs::write(
                dir.join("deviation.json"),
                serde_json::to_string_pretty(&json).unwrap() + "\n",
            )
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("affine for r=3..7, f(r) = {intercept:?} + r*{slope:?}, chi = 2; table in artifacts/deviation.json"))
}

fn criterion_4(pipelines: &HashMap<usize, Pipeline>) -> Outcome {
    let t = Instant::now();
    let k = &pipelines[&5].sphere;
    let betti = betti_numbers(&homology_all(k));
    let stats = morse_experiment(k, 1000, 2024, 0).map_err(|e| e.to_string())?;
    let mut violations = 0;
    for v in &stats.vectors {
        let alt: i64 =
            v.0.iter()
                .enumerate()
                .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
                .sum();
        if alt != 2 || v.0.len() != 5 || v.0.iter().zip(&betti).any(|(&c, &b)| (c as usize) < b) {
            violations += 1;
        }
    }
    ensure(
        violations == 0,
        format!("{violations} Morse relation violations"),
    )?;
    let perfect_ish = stats.histogram.get("(1,2,4,2,1)").copied().unwrap_or(0);
    Ok(format!(
        "1000 runs, 0 violations; mean {:.3} critical cells; best {} ({} times); (1,2,4,2,1) found {} times; {:.1?}",
        stats.mean_critical,
        stats.best,
        stats.best_count,
        perfect_ish,
        t.elapsed()
    ))
}

fn criterion_5(pipelines: &HashMap<usize, Pipeline>) -> Outcome {
    let k = &pipelines[&3].sphere;
    let mut reference: Option<String> = None;
    for rep in 0..3 {
        for workers in [1, 2, 4] {
            let stats = morse_experiment(k, 200, 99, workers).map_err(|e| e.to_string())?;
            let json = serde_json::to_string(&stats).unwrap();
            match &reference {
                None => reference = Some(json),
                Some(r) => ensure(
                    *r == json,
                    format!("repetition {rep}, {workers} workers differ"),
                )?,
            }
        }
    }
    Ok("200 runs, workers 1/2/4, 3 repetitions: identical JSON".into())
}

fn criterion_6() -> Outcome {
    let sphere = catalog::sphere(4);
    let h0 = homology_all(&sphere);
    let mut lines = Vec::new();
    for seed in [1u64, 2, 3, 4, 5] {
        let (scrambled, up) = random_raising_moves(&sphere, 50, seed).map_err(|e| e.to_string())?;
        ensure(up.len() == 50, "up-moves")?;
        let t = Instant::now();
        let opts = ReduceOptions {
            budget: 20_000,
            seed,
            schedule: Schedule::default(),
            check_every: Some(10),
        };
        let out = reduce(&scrambled, &opts).map_err(|e| format!("seed {seed}: {e}"))?;
        let elapsed = t.elapsed();
        ensure(
            out.success,
            format!("seed {seed}: stopped at {:?}", out.final_f_vector),
        )?;
        ensure(
            out.final_f_vector == vec![6, 15, 20, 15, 6],
            "final f-vector",
        )?;
        let last = replay(&scrambled, &out.trace).map_err(|e| e.to_string())?;
        ensure(
            is_isomorphic(&last, &sphere),
            "not isomorphic to the simplex boundary",
        )?;
        ensure(homology_all(&last) == h0, "final homology")?;
        ensure(out.homology_checks == out.moves / 10, "homology sampling")?;
        ensure(
            elapsed < Duration::from_secs(60),
            format!("seed {seed}: {elapsed:?}"),
        )?;
        lines.push(format!(
            "seed {seed}: {} -> 6 in {} moves, {:.2?}",
            scrambled.num_vertices(),
            out.moves,
            elapsed
        ));
    }
    Ok(lines.join("; "))
}

fn criterion_7(pipelines: &HashMap<usize, Pipeline>) -> Outcome {
    for r in 3..=10 {
        let p = GroupPresentation::akbulut_kirby(r).map_err(|e| e.to_string())?;
        let ab = abelianization(&p);
        // Exponent matrix [[1, -1], [r, 1 - r]] has determinant 1.
        let det = 1 * (1 - r as i64) - (-1) * r as i64;
        ensure(
            ab.is_trivial() && det == 1,
            format!("r={r}: abelianization {ab}"),
        )?;
        ensure(
            smith_normal_form(&ak_core::pi1::exponent_matrix(&p)).diag
                == vec![BigInt::from(1), BigInt::from(1)],
            "SNF diag",
        )?;
    }
    let torus = edge_path_presentation(&catalog::torus7()).map_err(|e| e.to_string())?;
    ensure(
        abelianization(&torus) == HomologyGroup::free(2),
        "torus abelianization",
    )?;
    let k = &pipelines[&3].sphere;
    let raw = edge_path_presentation(k).map_err(|e| e.to_string())?;
    let f = k.f_vector().0;
    ensure(
        raw.generators.len() as u64 == f[1] - f[0] + 1 && raw.relators.len() as u64 == f[2],
        "edge-path counts",
    )?;
    let (simple, _) = tietze_simplify(&raw, usize::MAX);
    ensure(
        abelianization(&simple).is_trivial(),
        format!("sphere abelianization {}", abelianization(&simple)),
    )?;
    Ok(format!(
        "r=3..10 trivial; torus Z^2; r=3 sphere: {} gens / {} rels -> {} gens / {} rels, trivial",
        raw.generators.len(),
        raw.relators.len(),
        simple.generators.len(),
        simple.relators.len()
    ))
}

/// Determinant by fraction-free Bareiss elimination.
fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::from(1);
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut dets = 0;
    for case in 0..500 {
        let (m, n) = (rng.gen_range(1..=30), rng.gen_range(1..=30));
        let density = rng.gen_range(0.1..1.0);
        let mut a: Vec<Vec<BigInt>> = (0..m)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        if rng.gen_bool(density) {
                            BigInt::from(rng.gen_range(-9..=9))
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        let d = smith_normal_form(&SparseIntMatrix::from_dense(&a));
        ensure(
            d.has_divisibility_chain(),
            format!("case {case}: divisibility"),
        )?;
        if m == n {
            let det = bareiss_det(a.clone());
            if !det.is_zero() {
                let prod: BigInt = d.diag.iter().product();
                ensure(
                    d.rank == n && prod == det.abs(),
                    format!("case {case}: |det| {det} vs {prod}"),
                )?;
                dets += 1;
            }
        }
        for _ in 0..20 {
            let rows = rng.gen_bool(0.5);
            let len = if rows { m } else { n };
            if len < 2 {
                continue;
            }
            let (i, j) = (rng.gen_range(0..len), rng.gen_range(0..len));
            if i == j {
                continue;
            }
            let c = BigInt::from(rng.gen_range(-3..=3));
            match (rows, rng.gen_range(0..3)) {
                (true, 0) => a.swap(i, j),
                (true, 1) => a[i] = a[i].iter().map(|x| -x).collect(),
                (true, _) => {
                    let rj = a[j].clone();
                    a[i].iter_mut().zip(&rj).for_each(|(x, y)| *x += &c * y);
                }
                (false, 0) => a.iter_mut().for_each(|row| row.swap(i, j)),
                (false, 1) => a.iter_mut().for_each(|row| row[i] = -&row[i]),
                (false, _) => a.iter_mut().for_each(|row| {
                    let y = row[j].clone();
                    row[i] += &c * y;
                }),
            }
        }
        let after = invariant_factors(&SparseIntMatrix::from_dense(&a));
        ensure(
            after == d.diag,
            format!("case {case}: factors changed under unimodular operations"),
        )?;
    }
    Ok(format!(
        "500 matrices, {dets} nonsingular determinants checked, {:.2?}",
        t.elapsed()
    ))
}

fn monotone_paths(m: usize, n: usize) -> u64 {
    if m == 0 || n == 0 {
        1
    } else {
        monotone_paths(m - 1, n) + monotone_paths(m, n - 1)
    }
}

fn random_complex(rng: &mut ChaCha8Rng) -> SimplicialComplex {
    let nv = rng.gen_range(3..=6u32);
    let count = rng.gen_range(1..=5);
    SimplicialComplex::new((0..count).map(|_| {
        let size = rng.gen_range(1..=3.min(nv as usize));
        rand::seq::index::sample(rng, nv as usize, size)
            .into_iter()
            .map(|v| v as u32)
            .collect::<Vec<_>>()
    }))
}

fn criterion_9() -> Outcome {
    for m in 0..=4u32 {
        for n in 0..=4u32 {
            let p = staircase_product(
                &OrderedComplex::natural(SimplicialComplex::simplex(0..=m)),
                &OrderedComplex::natural(SimplicialComplex::simplex(0..=n)),
            );
            let got = p.complex.complex.num_facets() as u64;
            ensure(
                got == monotone_paths(m as usize, n as usize),
                format!("D{m} x D{n}: {got} facets"),
            )?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..20 {
        let (k, l) = (random_complex(&mut rng), random_complex(&mut rng));
        let p = staircase_product(
            &OrderedComplex::natural(k.clone()),
            &OrderedComplex::natural(l.clone()),
        );
        let chi = p.complex.complex.euler_characteristic();
        ensure(
            chi == k.euler_characteristic() * l.euler_characteristic(),
            format!("case {case}: chi {chi}"),
        )?;
    }
    let delta = OrderedComplex::natural(SimplicialComplex::simplex(0..4));
    let prism = product_with_interval(&delta);
    let bd = prism
        .product
        .complex
        .complex
        .boundary_complex()
        .map_err(|e| e.to_string())?;
    let map = |k: &SimplicialComplex, f: &HashMap<u32, u32>| {
        k.facets()
            .iter()
            .map(|s| Simplex::new(s.vertices().iter().map(|v| f[v])))
            .collect::<Vec<_>>()
    };
    let side = product_with_interval(&OrderedComplex::natural(
        delta.complex.boundary_complex().unwrap(),
    ));
    // Side facets use the prism's own vertex ids: (v, t) ↦ prism.vertex(v, t).
    let side_facets: Vec<Simplex> = side
        .product
        .complex
        .complex
        .facets()
        .iter()
        .map(|s| {
            Simplex::new(s.vertices().iter().map(|&w| {
                let (v, t) = side.product.pairs[w as usize];
                prism.product.vertex(v, t).unwrap()
            }))
        })
        .collect();
    let mut expected: Vec<Simplex> = map(&delta.complex, &prism.end0);
    expected.extend(map(&delta.complex, &prism.end1));
    expected.extend(side_facets);
    ensure(
        SimplicialComplex::from_maximal(expected) == bd,
        "prism boundary identity on the 3-simplex",
    )?;
    Ok("D_m x D_n counts (m,n <= 4), chi multiplicative on 20 pairs, prism boundary identity on the 3-simplex".into())
}

fn main() {
    let t = Instant::now();
    let pipelines: HashMap<usize, Pipeline> = {
        use rayon::prelude::*;
        (3..=7)
            .into_par_iter()
            .map(|r| (r, Pipeline::run(r).expect("pipeline")))
            .collect()
    };
    eprintln!("built r=3..7 in {:.1?}", t.elapsed());
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("known-sphere homology", Box::new(criterion_1)),
        ("pipeline soundness", Box::new(|| criterion_2(&pipelines))),
        ("f-vector structure", Box::new(|| criterion_3(&pipelines))),
        ("Morse relations", Box::new(|| criterion_4(&pipelines))),
        ("Morse determinism", Box::new(|| criterion_5(&pipelines))),
        ("bistellar round trip", Box::new(criterion_6)),
        ("group layer", Box::new(|| criterion_7(&pipelines))),
        ("SNF property suite", Box::new(criterion_8)),
        ("product-kit oracle", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
            .unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
