//! Cross-checks against independent brute-force implementations.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schemeforge_core::chartab::{
    closed_form_mstar, closed_form_psl2, compare_tables, compute_character_table, gelfand_check,
    group_character_table, multiplicities, verify_candidate_table, verify_orthogonality,
};
use schemeforge_core::eigen::{eig, CMatrix};
use schemeforge_core::gf::{FieldElement, GaloisField, Vec3};
use schemeforge_core::loopcore::{
    inner_orbits, loop_scheme, moufang_check, multiplication_group_generators, quasigroup_check_loop, CayleyTable,
    CheckMode, Loop, OrbitPolicy, TableLoop, DEFAULT_SEED,
};
use schemeforge_core::permgroup::linear::{psl2, LinearAction};
use schemeforge_core::permgroup::{
    closure, conjugacy_classes, coset_action, double_cosets, group_scheme, orbitals, Permutation, PermutationGroup,
    DEFAULT_ORDER_CAP, DEFAULT_RELATION_CAP,
};
use schemeforge_core::scheme::{
    complete_scheme, cyclic_scheme, intersection_numbers, verify_scheme_axioms, AssociationScheme, RepPolicy,
};
use schemeforge_core::zorn::{
    det_comps, mul_comps, zorn_det, zorn_inv, zorn_mul, Comps, PaigeLoop, ZornMatrix, DEFAULT_ELEMENT_CAP, IDENTITY,
};

// ---------------------------------------------------------------- fields

/// Polynomial arithmetic on base-p digit vectors, reduced by the modulus.
struct PolyField {
    p: u32,
    r: usize,
    modulus: Vec<u32>,
}

impl PolyField {
    fn digits(&self, mut x: u32) -> Vec<u32> {
        (0..self.r)
            .map(|_| {
                let d = x % self.p;
                x /= self.p;
                d
            })
            .collect()
    }

    fn encode(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.digits(a), self.digits(b));
        self.encode(&x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect::<Vec<_>>())
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u32; 2 * self.r];
        for (i, u) in x.iter().enumerate() {
            for (j, v) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u * v) % self.p;
            }
        }
        // modulus is monic of degree r
        for deg in (self.r..prod.len()).rev() {
            let lead = prod[deg];
            if lead != 0 {
                for (k, &m) in self.modulus.iter().enumerate() {
                    let idx = deg - self.r + k;
                    prod[idx] = (prod[idx] + self.p * self.p - lead * m % self.p) % self.p;
                }
            }
        }
        self.encode(&prod[..self.r])
    }
}

fn small_fields() -> Vec<GaloisField> {
    [2, 3, 4, 5, 7, 8, 9, 11, 13, 16].into_iter().map(|q| GaloisField::with_order(q).unwrap()).collect()
}

#[test]
fn field_tables_match_polynomial_arithmetic() {
    for f in small_fields() {
        let spec = f.spec();
        let oracle = PolyField { p: spec.p(), r: spec.r() as usize, modulus: spec.modulus().to_vec() };
        let q = f.order() as u32;
        for a in 0..q {
            for b in 0..q {
                assert_eq!(f.add_rep(a as u8, b as u8) as u32, oracle.add(a, b), "q={q} {a}+{b}");
                assert_eq!(f.mul_rep(a as u8, b as u8) as u32, oracle.mul(a, b), "q={q} {a}·{b}");
            }
        }
    }
}

#[test]
fn field_axioms_exhaustive() {
    for f in small_fields() {
        let q = f.order() as u8;
        for a in 0..q {
            assert_eq!(f.add_rep(a, f.neg_rep(a)), 0);
            if a != 0 {
                assert_eq!(f.mul_rep(a, f.inv_rep(a).unwrap()), 1);
            } else {
                assert_eq!(f.inv_rep(0), None);
            }
            for b in 0..q {
                assert_eq!(f.mul_rep(a, b), f.mul_rep(b, a));
                assert_eq!(f.sub_rep(f.add_rep(a, b), b), a);
                for c in 0..q {
                    assert_eq!(f.mul_rep(f.mul_rep(a, b), c), f.mul_rep(a, f.mul_rep(b, c)));
                    assert_eq!(f.add_rep(f.add_rep(a, b), c), f.add_rep(a, f.add_rep(b, c)));
                    assert_eq!(f.mul_rep(a, f.add_rep(b, c)), f.add_rep(f.mul_rep(a, b), f.mul_rep(a, c)));
                }
            }
        }
    }
}

#[test]
fn frobenius_is_additive_and_generator_is_primitive() {
    for f in small_fields() {
        let p = f.characteristic() as u64;
        let q = f.order() as u8;
        for a in 0..q {
            for b in 0..q {
                assert_eq!(f.pow_rep(f.add_rep(a, b), p), f.add_rep(f.pow_rep(a, p), f.pow_rep(b, p)));
            }
        }
        let g = f.generator();
        let powers: BTreeSet<u8> = (0..q as u64 - 1).map(|e| f.pow_rep(g, e)).collect();
        assert_eq!(powers.len(), q as usize - 1);
    }
}

fn vec3(f: &GaloisField, v: [u32; 3]) -> Vec3 {
    Vec3::new(f, v[0], v[1], v[2]).unwrap()
}

proptest! {
    #[test]
    fn cross_product_identities(q in prop::sample::select(vec![2u32, 3, 4, 5, 9]), a in prop::array::uniform3(0u32..256), b in prop::array::uniform3(0u32..256)) {
        let f = GaloisField::with_order(q).unwrap();
        let a = vec3(&f, a.map(|x| x % q));
        let b = vec3(&f, b.map(|x| x % q));
        let zero = f.zero();
        prop_assert_eq!(a.cross(&f, &a).unwrap().reps(), [0, 0, 0]);
        prop_assert_eq!(a.dot(&f, &a.cross(&f, &b).unwrap()).unwrap(), zero);
        prop_assert_eq!(a.dot(&f, &b).unwrap(), b.dot(&f, &a).unwrap());
        let ab = a.cross(&f, &b).unwrap();
        let ba = b.cross(&f, &a).unwrap();
        prop_assert_eq!(ab.add(&f, &ba).unwrap().reps(), [0, 0, 0]);
    }
}

// ---------------------------------------------------------------- Zorn

/// Zorn's product written out with checked field operations.
fn oracle_zorn_mul(f: &GaloisField, m: &Comps, n: &Comps) -> Comps {
    let e = |x: u8| f.element(x as u32).unwrap();
    let add = |x: FieldElement, y: FieldElement| f.add(x, y).unwrap();
    let mul = |x: FieldElement, y: FieldElement| f.mul(x, y).unwrap();
    let (a, b, c, d) = (e(m[0]), e(m[7]), e(n[0]), e(n[7]));
    let al = vec3(f, [m[1] as u32, m[2] as u32, m[3] as u32]);
    let be = vec3(f, [m[4] as u32, m[5] as u32, m[6] as u32]);
    let ga = vec3(f, [n[1] as u32, n[2] as u32, n[3] as u32]);
    let de = vec3(f, [n[4] as u32, n[5] as u32, n[6] as u32]);
    let neg = |v: &Vec3| v.scale(f, f.neg(f.one()).unwrap()).unwrap();
    let top_left = add(mul(a, c), al.dot(f, &de).unwrap());
    let top_right = ga.scale(f, a).unwrap().add(f, &al.scale(f, d).unwrap()).unwrap().add(f, &neg(&be.cross(f, &de).unwrap())).unwrap();
    let bottom_left = be.scale(f, c).unwrap().add(f, &de.scale(f, b).unwrap()).unwrap().add(f, &al.cross(f, &ga).unwrap()).unwrap();
    let bottom_right = add(be.dot(f, &ga).unwrap(), mul(b, d));
    let (tr, bl) = (top_right.reps(), bottom_left.reps());
    [top_left.rep(), tr[0], tr[1], tr[2], bl[0], bl[1], bl[2], bottom_right.rep()]
}

fn random_comps(rng: &mut ChaCha8Rng, q: usize) -> Comps {
    let mut c = [0u8; 8];
    c.iter_mut().for_each(|x| *x = rng.gen_range(0..q) as u8);
    c
}

#[test]
fn zorn_product_matches_written_out_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for q in [2u32, 3, 4, 5] {
        let f = GaloisField::with_order(q).unwrap();
        for _ in 0..2000 {
            let (m, n) = (random_comps(&mut rng, q as usize), random_comps(&mut rng, q as usize));
            assert_eq!(mul_comps(&f, &m, &n), oracle_zorn_mul(&f, &m, &n));
        }
    }
}

#[test]
fn zorn_identity_and_det_multiplicativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for q in [2u32, 3] {
        let f = GaloisField::with_order(q).unwrap();
        for _ in 0..100 {
            let m = random_comps(&mut rng, q as usize);
            assert_eq!(mul_comps(&f, &IDENTITY, &m), m);
            assert_eq!(mul_comps(&f, &m, &IDENTITY), m);
        }
    }
    let f = GaloisField::with_order(3).unwrap();
    for _ in 0..1000 {
        let (m, n) = (random_comps(&mut rng, 3), random_comps(&mut rng, 3));
        let lhs = det_comps(&f, &mul_comps(&f, &m, &n));
        assert_eq!(lhs, f.mul_rep(det_comps(&f, &m), det_comps(&f, &n)));
    }
}

#[test]
fn unit_zorn_matrices_over_gf2_invert() {
    let f = GaloisField::with_order(2).unwrap();
    let lp = PaigeLoop::build(2, DEFAULT_ELEMENT_CAP).unwrap();
    let one = ZornMatrix::identity(&f);
    for i in 0..lp.order() {
        let m = lp.representative(i);
        assert_eq!(zorn_det(&f, &m).unwrap(), f.one());
        assert_eq!(zorn_mul(&f, &m, &zorn_inv(&f, &m).unwrap()).unwrap(), one);
    }
}

#[test]
fn zorn_matrices_satisfy_moufang_directly() {
    // on raw matrices, independent of the loop's indexing
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for q in [2u32, 3, 4] {
        let f = GaloisField::with_order(q).unwrap();
        let p = |a: &Comps, b: &Comps| mul_comps(&f, a, b);
        for _ in 0..500 {
            let (x, y, z) = (random_comps(&mut rng, q as usize), random_comps(&mut rng, q as usize), random_comps(&mut rng, q as usize));
            assert_eq!(p(&p(&p(&x, &y), &x), &z), p(&x, &p(&y, &p(&x, &z))));
            assert_eq!(p(&p(&x, &y), &p(&z, &x)), p(&x, &p(&p(&y, &z), &x)));
        }
    }
}

#[test]
fn paige_loop_basics() {
    for q in [2u32, 3] {
        let lp = PaigeLoop::build(q, DEFAULT_ELEMENT_CAP).unwrap();
        for j in 0..lp.order() {
            assert_eq!(lp.paige_mul(0, j).unwrap(), j);
            assert_eq!(lp.paige_mul(j, lp.inverse(j)).unwrap(), 0);
        }
        assert!(quasigroup_check_loop(&lp).passed);
    }
    let lp = PaigeLoop::build(2, DEFAULT_ELEMENT_CAP).unwrap();
    let gens = multiplication_group_generators(&lp);
    assert_eq!(gens.len(), 240);
    assert!(gens.iter().all(|g| g.degree() == 120));
    assert!(gens[0].is_identity() && gens[120].is_identity());
}

#[test]
fn function_backed_paige_loop_agrees_with_zorn_products() {
    let lp = PaigeLoop::build(4, DEFAULT_ELEMENT_CAP).unwrap();
    assert!(!lp.is_table_backed());
    let f = lp.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..2000 {
        let (i, j) = (rng.gen_range(0..lp.order()), rng.gen_range(0..lp.order()));
        let prod = zorn_mul(&f, &lp.representative(i), &lp.representative(j)).unwrap();
        assert_eq!(lp.mul(i, j), lp.index_of(&prod).unwrap());
        assert_eq!(lp.mul(lp.right_div(j, i), i), j);
        assert_eq!(lp.mul(i, lp.left_div(i, j)), j);
    }
}

// ---------------------------------------------------------------- loops

/// Random normalized Latin square by randomized backtracking.
fn random_loop(n: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    fn fill(t: &mut Vec<u32>, n: usize, cell: usize, rng: &mut ChaCha8Rng) -> bool {
        if cell == n * n {
            return true;
        }
        let (x, y) = (cell / n, cell % n);
        if x == 0 || y == 0 {
            t[cell] = (x + y) as u32;
            return fill(t, n, cell + 1, rng);
        }
        let mut cands: Vec<u32> = (0..n as u32)
            .filter(|&v| (0..y).all(|yy| t[x * n + yy] != v) && (0..x).all(|xx| t[xx * n + y] != v))
            .collect();
        for i in (1..cands.len()).rev() {
            cands.swap(i, rng.gen_range(0..=i));
        }
        for v in cands {
            t[cell] = v;
            if fill(t, n, cell + 1, rng) {
                return true;
            }
        }
        false
    }
    let mut t = vec![0; n * n];
    assert!(fill(&mut t, n, 0, rng));
    t
}

#[test]
fn non_moufang_latin_square_reports_valid_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let n = 5;
    let (table, report) = loop {
        let t = CayleyTable { n, table: random_loop(n, &mut rng) };
        let r = moufang_check(&t, CheckMode::Exhaustive).unwrap();
        if !r.passed() {
            break (t, r);
        }
    };
    let p = |a: usize, b: usize| table.table[a * n + b] as usize;
    let failing = report.identities.iter().find(|r| !r.passed).unwrap();
    let (x, y, z) = failing.witness.unwrap();
    // evaluate the first identity directly; at least one of the four must
    // be violated at its witness
    let evals = [
        p(p(p(x, y), x), z) != p(x, p(y, p(x, z))),
        p(x, p(y, p(z, y))) != p(p(p(x, y), z), y),
        p(p(x, y), p(z, x)) != p(x, p(p(y, z), x)),
        p(p(x, y), p(z, x)) != p(p(x, p(y, z)), x),
    ];
    let idx = report.identities.iter().position(|r| !r.passed).unwrap();
    assert!(evals[idx]);
}

#[test]
fn exact_and_sampled_orbits_agree_on_mstar2() {
    let lp = Arc::new(PaigeLoop::build(2, DEFAULT_ELEMENT_CAP).unwrap());
    let exact = inner_orbits(&lp, OrbitPolicy::Exact).unwrap();
    let sampled = inner_orbits(&lp, OrbitPolicy::randomized(DEFAULT_SEED)).unwrap();
    assert_eq!(exact, sampled);
    assert_eq!(exact.sizes(), vec![1, 56, 63]);
    let s = loop_scheme(lp.clone(), &exact).unwrap();
    let mut k = s.valencies().to_vec();
    k.sort_unstable();
    assert_eq!(k, vec![1, 56, 63]);
    for u in 0..120 {
        assert_eq!(s.relation(u, u), 0);
        assert_eq!(s.relation(0, u), exact.class_of[u] as usize);
    }
}

#[test]
fn mstar4_has_five_classes() {
    let lp = Arc::new(PaigeLoop::build(4, DEFAULT_ELEMENT_CAP).unwrap());
    let classes = inner_orbits(&lp, OrbitPolicy::randomized(DEFAULT_SEED)).unwrap();
    let mut sizes = classes.sizes();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![1, 4032, 4032, 4095, 4160]);
}

// ---------------------------------------------------------------- groups

fn all_permutations(n: usize) -> BTreeSet<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, n: usize, out: &mut BTreeSet<Vec<u32>>) {
        if prefix.len() == n {
            out.insert(prefix.clone());
            return;
        }
        for v in 0..n as u32 {
            if !prefix.contains(&v) {
                prefix.push(v);
                rec(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    rec(&mut Vec::new(), n, &mut out);
    out
}

#[test]
fn closure_of_s3_and_s4_generators() {
    for n in [3usize, 4] {
        let cycle = Permutation::new((0..n as u32).map(|i| (i + 1) % n as u32).collect()).unwrap();
        let swap = Permutation::from_cycles(n, &[vec![0, 1]]).unwrap();
        let g = closure(vec![cycle, swap], DEFAULT_ORDER_CAP).unwrap();
        let got: BTreeSet<Vec<u32>> = g.elements().unwrap().iter().map(|p| p.images().to_vec()).collect();
        assert_eq!(got, all_permutations(n));
    }
    let trivial = closure(vec![Permutation::identity(4)], DEFAULT_ORDER_CAP).unwrap();
    assert_eq!(trivial.order().unwrap(), 1);
}

/// Conjugacy classes as sets of image vectors, from every `g⁻¹ x g`.
fn brute_classes(g: &PermutationGroup) -> BTreeSet<BTreeSet<Vec<u32>>> {
    let els = g.elements().unwrap();
    els.iter()
        .map(|x| els.iter().map(|s| s.inverse().then(x).then(s).images().to_vec()).collect())
        .collect()
}

fn test_groups() -> Vec<PermutationGroup> {
    let s4 = closure(
        vec![Permutation::from_cycles(4, &[vec![0, 1, 2, 3]]).unwrap(), Permutation::from_cycles(4, &[vec![0, 1]]).unwrap()],
        DEFAULT_ORDER_CAP,
    )
    .unwrap();
    let d5 = closure(
        vec![Permutation::from_cycles(5, &[vec![0, 1, 2, 3, 4]]).unwrap(), Permutation::from_cycles(5, &[vec![1, 4], vec![2, 3]]).unwrap()],
        DEFAULT_ORDER_CAP,
    )
    .unwrap();
    vec![s4, d5, psl2(4, LinearAction::ProjectiveLine).unwrap(), psl2(5, LinearAction::ProjectiveLine).unwrap()]
}

#[test]
fn conjugacy_classes_match_brute_force() {
    for g in test_groups() {
        let cc = conjugacy_classes(&g).unwrap();
        let got: BTreeSet<BTreeSet<Vec<u32>>> = cc
            .classes
            .iter()
            .map(|c| c.iter().map(|&i| g.element(i).images().to_vec()).collect())
            .collect();
        assert_eq!(got, brute_classes(&g));
        assert_eq!(cc.classes[0], vec![0]);
    }
    let mut sizes = conjugacy_classes(&psl2(4, LinearAction::ProjectiveLine).unwrap()).unwrap().sizes();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![1, 12, 12, 15, 20]);
}

#[test]
fn orbitals_match_brute_force() {
    for g in test_groups() {
        let n = g.degree();
        let s = orbitals(&g, n, DEFAULT_RELATION_CAP).unwrap();
        // two pairs are in one orbital iff some element maps one to the other
        let els = g.elements().unwrap();
        let mut orbit_id: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut next = 0;
        for x in 0..n {
            for y in 0..n {
                if orbit_id.contains_key(&(x, y)) {
                    continue;
                }
                for e in els {
                    orbit_id.insert((e.apply(x), e.apply(y)), next);
                }
                next += 1;
            }
        }
        assert_eq!(s.class_count(), next);
        for x in 0..n {
            for y in 0..n {
                for u in 0..n {
                    for v in 0..n {
                        let same = orbit_id[&(x, y)] == orbit_id[&(u, v)];
                        assert_eq!(same, s.relation(x, y) == s.relation(u, v));
                    }
                }
            }
        }
        assert!(verify_scheme_axioms(&s).passed);
    }
}

#[test]
fn double_cosets_match_brute_force() {
    for g in test_groups() {
        let h = g.stabilizer(0).unwrap();
        let dc = double_cosets(&g, &h).unwrap();
        let els = g.elements().unwrap();
        let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        for x in 0..els.len() {
            let set: BTreeSet<usize> = h
                .iter()
                .flat_map(|&a| h.iter().map(move |&b| (a, b)))
                .map(|(a, b)| g.mul_index(g.mul_index(a, x), b))
                .collect();
            seen.insert(set);
        }
        let got: BTreeSet<BTreeSet<usize>> = dc.parts.iter().map(|p| p.iter().copied().collect()).collect();
        assert_eq!(got, seen);
        // double cosets of a point stabilizer correspond to orbitals
        let action = coset_action(&g, &h).unwrap();
        let s = orbitals(&action, action.degree(), DEFAULT_RELATION_CAP).unwrap();
        assert_eq!(s.class_count(), dc.parts.len());
    }
}

#[test]
fn psl25_point_stabilizer_action_is_two_transitive() {
    let g = psl2(5, LinearAction::ProjectiveLine).unwrap();
    let h = g.stabilizer(5).unwrap();
    assert_eq!(h.len(), 10);
    let a = coset_action(&g, &h).unwrap();
    assert_eq!(a.degree(), 6);
    let s = orbitals(&a, 6, DEFAULT_RELATION_CAP).unwrap();
    assert_eq!(s.class_count(), 2);
}

// ---------------------------------------------------------------- schemes

/// `p_ij^h` counted over every pair, without representatives.
fn brute_intersections(s: &AssociationScheme) -> Vec<u64> {
    let (n, c) = (s.n(), s.class_count());
    let mut p = vec![u64::MAX; c * c * c];
    for x in 0..n {
        for y in 0..n {
            let h = s.relation(x, y);
            let mut counts = vec![0u64; c * c];
            for z in 0..n {
                counts[s.relation(x, z) * c + s.relation(z, y)] += 1;
            }
            for i in 0..c {
                for j in 0..c {
                    let slot = &mut p[(i * c + j) * c + h];
                    assert!(*slot == u64::MAX || *slot == counts[i * c + j]);
                    *slot = counts[i * c + j];
                }
            }
        }
    }
    p
}

#[test]
fn intersection_numbers_match_brute_force() {
    let mut schemes = vec![complete_scheme(5).unwrap(), cyclic_scheme(7).unwrap()];
    for g in test_groups() {
        schemes.push(group_scheme(&g, DEFAULT_RELATION_CAP).unwrap());
        schemes.push(orbitals(&g, g.degree(), DEFAULT_RELATION_CAP).unwrap());
    }
    for s in &schemes {
        let expect = brute_intersections(s);
        for policy in [RepPolicy::Default, RepPolicy::PerClass(1), RepPolicy::AllPairs] {
            assert_eq!(intersection_numbers(s, policy).unwrap().as_array(), &expect[..]);
        }
    }
    let k5 = intersection_numbers(&complete_scheme(5).unwrap(), RepPolicy::Default).unwrap();
    assert_eq!(k5.get(1, 1, 1), 3);
    assert_eq!(k5.get(0, 0, 0), 1);
}

// ---------------------------------------------------------------- tables

/// Random group schemes: groups generated by two random permutations.
fn random_group_schemes(count: usize, seed: u64) -> Vec<AssociationScheme> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(2..=5);
        let mut perm = || {
            let mut v: Vec<u32> = (0..n as u32).collect();
            for i in (1..n).rev() {
                v.swap(i, rng.gen_range(0..=i));
            }
            Permutation::new(v).unwrap()
        };
        let g = closure(vec![perm(), perm()], DEFAULT_ORDER_CAP).unwrap();
        if g.order().unwrap() > 1 {
            out.push(group_scheme(&g, DEFAULT_RELATION_CAP).unwrap());
        }
    }
    out
}

#[test]
fn eigensolver_on_random_commuting_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut worst: f64 = 0.0;
    for s in random_group_schemes(100, 17) {
        let b = intersection_numbers(&s, RepPolicy::Default).unwrap();
        let c = b.class_count();
        let mut m = vec![0.0; c * c];
        for j in 0..c {
            let w: f64 = rng.gen_range(1.0..=2.0);
            for (x, y) in m.iter_mut().zip(b.b_matrix(j)) {
                *x += w * y as f64;
            }
        }
        let m = CMatrix::from_real(c, &m);
        let e = eig(&m).unwrap();
        worst = worst.max(e.max_residual(&m) / m.norm());
    }
    assert!(worst <= 1e-10, "worst relative residual {worst:e}");
}

#[test]
fn computed_tables_certify_and_match_oracles() {
    for s in random_group_schemes(20, 18) {
        let b = intersection_numbers(&s, RepPolicy::Default).unwrap();
        let t = compute_character_table(&b, DEFAULT_SEED).unwrap();
        assert!(verify_candidate_table(&t.p, &b, 1e-8).passed);
        for (j, &k) in t.valencies.iter().enumerate() {
            assert!(t.p.iter().all(|row| row[j].norm() <= k as f64 + 1e-8));
        }
        let total: f64 = t.multiplicities.iter().sum();
        assert!((total - s.n() as f64).abs() < 1e-8);
    }
    for q in [2u32, 4, 8] {
        let g = psl2(q, LinearAction::ProjectiveLine).unwrap();
        let (_, table, _) = group_character_table(&g, DEFAULT_SEED).unwrap();
        assert!(compare_tables(&table, &closed_form_psl2(q as u64).unwrap(), 1e-8).is_ok());
    }
}

#[test]
fn psl24_rows() {
    let g = psl2(4, LinearAction::ProjectiveLine).unwrap();
    let (_, table, t) = group_character_table(&g, DEFAULT_SEED).unwrap();
    let mut f = t.degrees.clone();
    f.sort_unstable();
    assert_eq!(f, vec![1, 3, 3, 4, 5]);
    // each row sorted by real part must be one of the expected multisets
    let a = |kl: f64| -4.0 * 2.0 * (2.0 * std::f64::consts::PI * kl / 5.0).cos();
    let mut expected: Vec<Vec<f64>> = vec![
        vec![1.0, 15.0, 12.0, 12.0, 20.0],
        vec![1.0, 0.0, -3.0, -3.0, 5.0],
        vec![1.0, -5.0, a(1.0), a(2.0), 0.0],
        vec![1.0, -5.0, a(2.0), a(4.0), 0.0],
        vec![1.0, 3.0, 0.0, 0.0, -4.0],
    ];
    let sort = |v: &mut Vec<f64>| v.sort_by(f64::total_cmp);
    expected.iter_mut().for_each(sort);
    for row in &table.p {
        assert!(row.iter().all(|z| z.im.abs() < 1e-10));
        let mut r: Vec<f64> = row.iter().map(|z| z.re).collect();
        sort(&mut r);
        assert!(expected.iter().any(|e| e.iter().zip(&r).all(|(x, y)| (x - y).abs() < 1e-8)), "{r:?}");
    }
}

#[test]
fn mstar2_oracle_certifies_against_brute_force_intersections() {
    let lp = Arc::new(PaigeLoop::build(2, DEFAULT_ELEMENT_CAP).unwrap());
    let classes = inner_orbits(&lp, OrbitPolicy::Exact).unwrap();
    let s = loop_scheme(lp, &classes).unwrap();
    let b = intersection_numbers(&s, RepPolicy::AllPairs).unwrap();
    assert_eq!(b.as_array(), &brute_intersections(&s)[..]);
    let pipeline = compute_character_table(&b, DEFAULT_SEED).unwrap();
    let oracle = closed_form_mstar(2).unwrap();
    let m = compare_tables(&oracle, &pipeline, 1e-8).unwrap();
    let aligned = oracle.permute_columns(&m.cols);
    assert!(verify_candidate_table(&aligned.p, &b, 1e-8).passed);
}

#[test]
fn multiplicity_examples() {
    let c = |x: f64| Complex64::new(x, 0.0);
    for n in 2..8u64 {
        let p = vec![vec![c(1.0), c(n as f64 - 1.0)], vec![c(1.0), c(-1.0)]];
        let m = multiplicities(&p, &[1, n - 1], n).unwrap();
        assert!((m[0] - 1.0).abs() < 1e-12 && (m[1] - (n - 1) as f64).abs() < 1e-9);
    }
    let t = closed_form_psl2(4).unwrap();
    assert!(verify_orthogonality(&t.p, &t.valencies, &t.multiplicities, t.n, 1e-10).passed);
    for q in [2, 4, 8, 16] {
        let t = closed_form_mstar(q).unwrap();
        assert!(verify_orthogonality(&t.p, &t.valencies, &t.multiplicities, t.n, 1e-10).passed, "q={q}");
    }
    assert_eq!(closed_form_mstar(4).unwrap().valencies, vec![1, 4095, 4032, 4032, 4160]);
}

#[test]
fn gelfand_psl25_degree_six() {
    let g = psl2(5, LinearAction::ProjectiveLine).unwrap();
    let (classes, _, t) = group_character_table(&g, DEFAULT_SEED).unwrap();
    let h = g.stabilizer(5).unwrap();
    let r = gelfand_check(&g, &h, &classes, &t).unwrap();
    assert!(r.multiplicity_free);
    assert_eq!(r.constituents.len(), 2);
}

#[test]
fn group_loop_matches_group() {
    let g = test_groups().remove(0);
    let lp = TableLoop::from_group(&g).unwrap();
    for x in 0..24 {
        for y in 0..24 {
            assert_eq!(lp.mul(x, y), g.mul_index(x, y));
        }
    }
}
