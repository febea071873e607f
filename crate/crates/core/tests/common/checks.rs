//! The acceptance criteria as reusable checks. Each returns `Err` with a
//! description of the first failure.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use novk::dtc::{
    mu_dtc_bounds, presentation_relations, rank_over_laurent_field, rho_dtc_bounds, rho_matrix_for,
    MIN_GENERATORS_CAP,
};
use novk::fpgroup::{
    abelianization, dim_hom_r, is_cyclic, parse_presentation, smith_normal_form, todd_coxeter,
    AbelianGroup, Abelianizer, FreeWord, IntMatrix, Presentation,
};
use novk::freeprod::{ProductWord, Window};
use novk::laurent::{CoefficientRing, LaurentError, LaurentSeries};
use novk::novhom::{
    hn_connected_sum, homology, hurewicz_map_word, pro_abelianize, tensor_novikov, ChainComplex,
    NovikovModule,
};
use novk::report::{POINCARE_SPHERE_COMPLEX, RP4_COMPLEX, Z2_PRES};

use super::*;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ensure_eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Check {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

pub fn criterion_1_poincare() -> Check {
    let p = parse_presentation(POINCARE).map_err(|e| e.to_string())?;
    let g = todd_coxeter(&p, 10_000).map_err(|e| e.to_string())?;
    ensure_eq("order", g.order(), 120)?;
    ensure_eq(
        "abelianization",
        abelianization(&p),
        AbelianGroup::trivial(),
    )?;
    ensure_eq("is_cyclic", is_cyclic(&g), false)?;
    let mu = mu_dtc_bounds(&g, MIN_GENERATORS_CAP).map_err(|e| e.to_string())?;
    ensure_eq("mu_DTC bounds", (mu.lower, mu.upper), (2, Some(2)))?;
    ensure_eq("dim Hom(G, R)", dim_hom_r(&p), 0)?;
    let rho = rho_dtc_bounds(&p, Some(&g)).map_err(|e| e.to_string())?;
    ensure_eq("rho_DTC bounds", (rho.lower, rho.upper), (2, Some(2)))?;
    let sphere = ChainComplex::from_json(POINCARE_SPHERE_COMPLEX).map_err(|e| e.to_string())?;
    let x = sphere.product(&ChainComplex::sphere(3));
    for i in [1, 2] {
        ensure_eq(
            &format!("H_{i}(S x S^3)"),
            homology(&x, i).map_err(|e| e.to_string())?,
            AbelianGroup::trivial(),
        )?;
        ensure_eq(
            &format!("HN_{i}"),
            hn_connected_sum(&x, i, 6).map_err(|e| e.to_string())?,
            NovikovModule::zero(),
        )?;
    }
    Ok(())
}

pub fn criterion_2_rp4() -> Check {
    let c = ChainComplex::from_json(RP4_COMPLEX).map_err(|e| e.to_string())?;
    let z2_group = AbelianGroup {
        rank: 0,
        torsion: vec![2],
    };
    ensure_eq(
        "H_1(RP^4)",
        homology(&c, 1).map_err(|e| e.to_string())?,
        z2_group,
    )?;
    ensure_eq(
        "H_2(RP^4)",
        homology(&c, 2).map_err(|e| e.to_string())?,
        AbelianGroup::trivial(),
    )?;
    let hn1 = hn_connected_sum(&c, 1, 4).map_err(|e| e.to_string())?;
    ensure_eq("HN_1", hn1.to_string(), "Z/2((t))".to_string())?;
    ensure_eq(
        "HN_1 module",
        hn1,
        NovikovModule {
            free_rank: 0,
            torsion: vec![2],
        },
    )?;
    ensure_eq(
        "HN_2",
        hn_connected_sum(&c, 2, 4).map_err(|e| e.to_string())?,
        NovikovModule::zero(),
    )?;
    let p = parse_presentation(Z2_PRES).map_err(|e| e.to_string())?;
    let g = todd_coxeter(&p, 100).map_err(|e| e.to_string())?;
    let mu = mu_dtc_bounds(&g, MIN_GENERATORS_CAP).map_err(|e| e.to_string())?;
    ensure_eq("mu_DTC bounds", (mu.lower, mu.upper), (1, Some(1)))?;
    let rho = rho_dtc_bounds(&p, Some(&g)).map_err(|e| e.to_string())?;
    ensure_eq("rho_DTC bounds", (rho.lower, rho.upper), (1, Some(1)))?;
    Ok(())
}

pub fn confluence(samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for g in [z2(), z3(), v4(), s3()] {
        for _ in 0..samples / 4 {
            let len = rng.gen_range(0..=12);
            let raw = random_raw(&mut rng, &g, len, -2, 2);
            let ltr = ProductWord::reduce(Arc::clone(&g), raw.iter().copied())
                .map_err(|e| e.to_string())?;
            // right to left: reduce the reversed list of inverses, then invert
            let rev: Vec<(i64, usize)> = raw.iter().rev().map(|&(k, e)| (k, g.inv(e))).collect();
            let rtl = ProductWord::reduce(Arc::clone(&g), rev)
                .map_err(|e| e.to_string())?
                .inv();
            let split = rng.gen_range(0..=raw.len());
            let left = ProductWord::reduce(Arc::clone(&g), raw[..split].iter().copied())
                .map_err(|e| e.to_string())?;
            let right = ProductWord::reduce(Arc::clone(&g), raw[split..].iter().copied())
                .map_err(|e| e.to_string())?;
            let halves = left.mul(&right).map_err(|e| e.to_string())?;
            let rewritten = rewrite_reduce(&mut rng, &g, &raw);
            ensure!(
                ltr == rtl && ltr == halves,
                "reduction orders disagree on {raw:?}"
            );
            ensure!(
                ltr.letters() == rewritten.as_slice(),
                "random rewriting disagrees on {raw:?}"
            );
        }
    }
    Ok(())
}

pub fn zip_properties() -> Check {
    for g in [z2(), z3()] {
        let words = all_words(&g, &[0, 1, 2], 4);
        for x in &words {
            for h in 0..=3 {
                let zx = x.zip(h);
                for h2 in h..=3 {
                    ensure!(
                        zx.zip(h2) == x.zip(h2),
                        "tower law fails for {x} at {h} <= {h2}"
                    );
                }
                for k in -2..=2 {
                    ensure!(
                        x.shift(k).zip(h + k) == zx.shift(k),
                        "shift equivariance fails for {x}, h = {h}, k = {k}"
                    );
                }
            }
        }
        for x in &words {
            for y in &words {
                let xy = x.mul(y).map_err(|e| e.to_string())?;
                for h in 0..=3 {
                    let rhs = x.zip(h).mul(&y.zip(h)).map_err(|e| e.to_string())?;
                    ensure!(
                        xy.zip(h) == rhs,
                        "zip is not a homomorphism on ({x}, {y}) at {h}"
                    );
                }
            }
        }
    }
    Ok(())
}

pub fn criterion_3_normal_form() -> Check {
    confluence(1000, 3)?;
    zip_properties()
}

/// Repeated multiplication, as an oracle for `power`.
pub fn naive_power(x: &ProductWord, n: i64) -> ProductWord {
    let base = if n < 0 { x.inv() } else { x.clone() };
    let mut acc = ProductWord::identity(Arc::clone(x.group()));
    for _ in 0..n.unsigned_abs() {
        acc = acc.mul(&base).unwrap();
    }
    acc
}

pub fn criterion_4_single_letter() -> Check {
    for g in [z2(), z3(), v4()] {
        for x in all_words(&g, &[0, 1, 2], 4) {
            let xi = x.inv();
            for n in (-6..=6).filter(|&n| n != 0) {
                let p = x.power(n);
                ensure!(
                    p == naive_power(&x, n),
                    "power({x}, {n}) disagrees with repeated multiplication"
                );
                if p.is_nontrivial_single_letter() {
                    ensure!(
                        x.is_single_letter(),
                        "{x}^{n} = {p} is a nontrivial single letter but {x} is not"
                    );
                }
                if !x.is_single_letter() && !p.is_identity() {
                    let reference = if n > 0 { &x } else { &xi };
                    let ends = |w: &ProductWord| (w.letters()[0], *w.letters().last().unwrap());
                    ensure!(
                        ends(&p) == ends(reference),
                        "first/last letters of {x}^{n} = {p} differ from those of the base"
                    );
                }
            }
        }
    }
    let g = z2();
    let x = ProductWord::parse("[0:a][1:a][0:a]", Arc::clone(&g)).map_err(|e| e.to_string())?;
    ensure!(
        x.power(2).is_identity(),
        "counterexample: x^2 = {} should be 1",
        x.power(2)
    );
    ensure!(
        !x.is_single_letter(),
        "counterexample: x should not be a single letter"
    );
    Ok(())
}

fn random_presentation<R: Rng>(rng: &mut R) -> Presentation {
    let gens = rng.gen_range(1..=3);
    let names: Vec<String> = ["a", "b", "c"][..gens]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rels = (0..rng.gen_range(0..=3))
        .map(|_| {
            let len = rng.gen_range(1..=4);
            FreeWord::new((0..len).map(|_| (rng.gen_range(0..gens), rng.gen_range(-4..=4i64))))
        })
        .collect();
    Presentation::new(names, rels).unwrap()
}

pub fn criterion_5_llambda() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let p = random_presentation(&mut rng);
        let m = rho_matrix_for(p.generator_count(), &presentation_relations(&p))
            .map_err(|e| e.to_string())?;
        let l_dim = p.generator_count() - rank_over_laurent_field(&m);
        ensure_eq(&format!("l_lambda_dim for\n{p}"), l_dim, dim_hom_r(&p))?;
    }
    Ok(())
}

fn random_series<R: Rng>(rng: &mut R, ring: CoefficientRing, unit_lead: bool) -> LaurentSeries {
    let valuation = rng.gen_range(-3..=3);
    let len = rng.gen_range(1..=6);
    let trunc = valuation + len as i64 - 1 + rng.gen_range(0..=3);
    let mut coeffs: Vec<BigRational> = (0..len)
        .map(|_| {
            let n = rng.gen_range(-5..=5i64);
            match ring {
                CoefficientRing::Rationals => {
                    BigRational::new(n.into(), rng.gen_range(1..=4i64).into())
                }
                _ => BigRational::from_integer(n.into()),
            }
        })
        .collect();
    if unit_lead {
        coeffs[0] = match ring {
            CoefficientRing::Integers => {
                BigRational::from_integer(if rng.gen_bool(0.5) { 1 } else { -1 }.into())
            }
            _ => BigRational::new(
                (rng.gen_range(1..=5i64) * if rng.gen_bool(0.5) { 1 } else { -1 }).into(),
                rng.gen_range(1..=4i64).into(),
            ),
        };
    }
    LaurentSeries::from_terms(
        ring,
        coeffs
            .into_iter()
            .enumerate()
            .map(|(i, c)| (valuation + i as i64, c)),
        trunc,
    )
    .unwrap()
}

fn coefficient(x: &LaurentSeries, e: i64) -> BigRational {
    x.coefficient(e).unwrap_or_else(BigRational::zero)
}

pub fn criterion_6_laurent() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for ring in [CoefficientRing::Rationals, CoefficientRing::Integers] {
        for _ in 0..100 {
            let x = random_series(&mut rng, ring, true);
            let inv = x.invert().map_err(|e| e.to_string())?;
            let prod = x.mul(&inv).map_err(|e| e.to_string())?;
            let nu = x.valuation().unwrap();
            ensure_eq(
                "inverse truncation",
                inv.truncation(),
                x.truncation() - 2 * nu,
            )?;
            ensure_eq(
                &format!("{x} * {inv}"),
                prod.clone(),
                LaurentSeries::one(ring, x.truncation() - nu),
            )?;
            // convolution oracle independent of `mul`
            for e in 0..=prod.truncation() {
                let mut s = BigRational::zero();
                for (i, c) in x.terms() {
                    s += c * coefficient(&inv, e - i);
                }
                let want = if e == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                };
                ensure!(s == want, "coefficient {e} of {x} * {inv} is {s}");
            }
            // truncation is a ring map and composes
            let y = random_series(&mut rng, ring, false);
            let xy = x.mul(&y).map_err(|e| e.to_string())?;
            let d1 = rng.gen_range(nu - 1..=x.truncation());
            let d2 = rng.gen_range(d1 - 2..=d1);
            let t1 = x.truncate(d1).map_err(|e| e.to_string())?;
            ensure_eq(
                "truncation tower",
                t1.truncate(d2).map_err(|e| e.to_string())?,
                x.truncate(d2).map_err(|e| e.to_string())?,
            )?;
            let partial = t1.mul(&y).map_err(|e| e.to_string())?;
            let d = partial.truncation().min(xy.truncation());
            ensure_eq(
                "truncation commutes with products",
                partial.truncate(d).map_err(|e| e.to_string())?,
                xy.truncate(d).map_err(|e| e.to_string())?,
            )?;
            let sum = x.add(&y).map_err(|e| e.to_string())?;
            let dt = d2.min(y.truncation());
            ensure_eq(
                "truncation commutes with sums",
                sum.truncate(dt).map_err(|e| e.to_string())?,
                x.truncate(dt)
                    .unwrap()
                    .add(&y.truncate(dt).unwrap())
                    .map_err(|e| e.to_string())?,
            )?;
        }
    }
    let bad = LaurentSeries::from_ints(CoefficientRing::Integers, 0, &[2, -1], 5)
        .map_err(|e| e.to_string())?;
    match bad.invert() {
        Err(LaurentError::NonUnitLeadingTerm(..)) => Ok(()),
        other => Err(format!(
            "2 - t over Z: expected NonUnitLeadingTerm, got {other:?}"
        )),
    }
}

fn commutator(x: &ProductWord, y: &ProductWord) -> ProductWord {
    x.mul(y)
        .unwrap()
        .mul(&x.inv())
        .unwrap()
        .mul(&y.inv())
        .unwrap()
}

pub fn criterion_7_hurewicz() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let window = Window::new(0, 3).unwrap();

    // Z/2: every level carries G^ab = Z/2, which is H_1(RP^4) and the
    // coefficient group of HN_1(T^4 # RP^4)
    let g = z2();
    let ab = Abelianizer::new(g.presentation());
    let rp4 = ChainComplex::from_json(RP4_COMPLEX).map_err(|e| e.to_string())?;
    let h1 = homology(&rp4, 1).map_err(|e| e.to_string())?;
    ensure_eq("G^ab vs H_1(RP^4)", ab.group().clone(), h1.clone())?;
    ensure_eq(
        "G^ab tensor Lambda vs HN_1",
        tensor_novikov(ab.group()),
        hn_connected_sum(&rp4, 1, 4).map_err(|e| e.to_string())?,
    )?;
    let sys = pro_abelianize(&g, window);
    for j in 0..sys.groups.len() {
        let copies = window.level_count() - j;
        ensure_eq(
            &format!("level {} group", sys.lo + j as i64),
            sys.group(j),
            AbelianGroup {
                rank: 0,
                torsion: vec![2; copies],
            },
        )?;
    }
    for _ in 0..200 {
        let x = random_word(&mut rng, &g, 6, 0, 2);
        let shifted = hurewicz_map_word(&x.shift(1), &ab, Window::new(1, 4).unwrap())
            .map_err(|e| e.to_string())?;
        let base =
            hurewicz_map_word(&x, &ab, Window::new(0, 3).unwrap()).map_err(|e| e.to_string())?;
        ensure!(
            shifted == base,
            "shift does not act by index translation on {x}"
        );
    }

    // Poincare: G^ab = 0, so every level and every image vanish
    let p = poincare();
    let sys = pro_abelianize(&p, window);
    for j in 0..sys.groups.len() {
        ensure!(
            sys.group(j).is_trivial(),
            "Poincare level {j} is {}",
            sys.group(j)
        );
    }
    let pab = Abelianizer::new(p.presentation());
    for _ in 0..50 {
        let x = random_word(&mut rng, &p, 8, 0, 3);
        let v = hurewicz_map_word(&x, &pab, window).map_err(|e| e.to_string())?;
        ensure!(
            v.iter().all(|l| l.iter().all(|&c| c == 0)),
            "Poincare image of {x} is {v:?}"
        );
    }

    // commutators die
    for g in [z2(), z3(), v4(), s3()] {
        let ab = Abelianizer::new(g.presentation());
        for _ in 0..50 {
            let x = random_word(&mut rng, &g, 6, 0, 3);
            let y = random_word(&mut rng, &g, 6, 0, 3);
            let v =
                hurewicz_map_word(&commutator(&x, &y), &ab, window).map_err(|e| e.to_string())?;
            ensure!(
                v.iter().all(|l| l.iter().all(|&c| c == 0)),
                "[{x}, {y}] maps to {v:?}"
            );
        }
    }
    Ok(())
}

pub fn snf_oracle(samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let rows: Vec<Vec<i64>> = (0..4)
            .map(|_| (0..4).map(|_| rng.gen_range(-2..=2)).collect())
            .collect();
        let m = IntMatrix::from_nested(&rows).unwrap();
        let snf = smith_normal_form(&m);
        let nonzero: Vec<i64> = snf.d.iter().copied().filter(|&d| d != 0).collect();
        ensure_eq(
            &format!("invariant factors of {m}"),
            nonzero,
            invariant_factors_oracle(&m),
        )?;
        let diag = snf.u.mul(&m).unwrap().mul(&snf.v).unwrap();
        ensure_eq("U M V", diag, IntMatrix::from_diagonal(4, 4, &snf.d))?;
        for t in [&snf.u, &snf.v] {
            let det = t.determinant().unwrap();
            ensure!(
                det == 1.into() || det == (-1).into(),
                "transform {t} is not unimodular"
            );
        }
    }
    Ok(())
}

pub fn homology_oracle_check(samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let (c, expected) = random_complex(&mut rng, 8);
        for (i, want) in expected.iter().enumerate() {
            let h = homology(&c, i).map_err(|e| e.to_string())?;
            let got = (h.rank, h.torsion.clone());
            ensure_eq(
                &format!("H_{i} of {} vs construction", c.to_json()),
                got.clone(),
                want.clone(),
            )?;
            ensure_eq(
                &format!("H_{i} of {} vs minors oracle", c.to_json()),
                got,
                homology_oracle(&c, i),
            )?;
        }
    }
    Ok(())
}

pub fn criterion_8_snf_homology() -> Check {
    snf_oracle(500, 8)?;
    homology_oracle_check(300, 88)
}
