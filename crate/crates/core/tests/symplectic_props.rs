mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stabnoise::gf2::{BitMat, BitVec};
use stabnoise::stabsim::CliffordDesc;
use stabnoise::symplectic::*;

#[test]
fn dense_matrices_agree_exhaustively() {
    for n in 1..=2 {
        let ps = all_paulis(n);
        let mats: Vec<Mat> = ps.iter().map(pauli_matrix).collect();
        for (i, p) in ps.iter().enumerate() {
            assert_eq!(symp_of_pauli(&pauli_of_symp(p)).unwrap(), *p);
            for (j, q) in ps.iter().enumerate() {
                assert_eq!(symp_inner(p, q), !commute(&mats[i], &mats[j]), "{p} {q}");
                let prod = matmul(&mats[i], &mats[j]);
                assert!(equal_up_to_phase(&prod, &pauli_matrix(&pauli_mul(p, q))));
                if i != j {
                    assert!(!equal_up_to_phase(&mats[i], &mats[j]));
                }
            }
        }
    }
}

#[test]
fn clifford_images_match_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 1..=3 {
        for _ in 0..20 {
            let c = CliffordDesc::random(n, &mut rng);
            let u = clifford_unitary(&c);
            let ud = dagger(&u);
            let tab = c.tableau();
            for i in 0..n {
                for (img, base) in
                    [(tab.destabilizer(i), PauliVec::x_on(n, i)), (tab.stabilizer(i), PauliVec::z_on(n, i))]
                {
                    let conj = matmul(&matmul(&u, &pauli_matrix(&base)), &ud);
                    let want = scale(&pauli_matrix(img.0), if img.1 { -1.0 } else { 1.0 });
                    assert!(close(&conj, &want));
                }
            }
            let p = PauliVec::random(n, &mut rng);
            let conj = matmul(&matmul(&u, &pauli_matrix(&p)), &ud);
            assert!(equal_up_to_phase(&conj, &pauli_matrix(&c.symp().apply(&p))));
        }
    }
}

#[test]
fn counting_matches_enumeration() {
    for n in 1..=2 {
        let ps: Vec<PauliVec> = all_paulis(n).into_iter().filter(|p| !p.is_identity()).collect();
        for m in 1..=n {
            let mut tuples = 0u64;
            let mut groups = std::collections::BTreeSet::new();
            let mut stack: Vec<Vec<PauliVec>> = vec![vec![]];
            while let Some(t) = stack.pop() {
                if t.len() == m {
                    tuples += 1;
                    let mut span: Vec<BitVec> = Vec::new();
                    for r in 0..1u64 << m {
                        let mut v = BitVec::zeros(2 * n);
                        for (j, c) in t.iter().enumerate() {
                            if r >> j & 1 == 1 {
                                v.xor_assign(c.bits());
                            }
                        }
                        span.push(v);
                    }
                    span.sort();
                    groups.insert(span);
                    continue;
                }
                for p in &ps {
                    let mut next = t.clone();
                    next.push(p.clone());
                    if is_isotropic(&next) && columns_matrix(n, &next).rank() == next.len() {
                        stack.push(next);
                    }
                }
            }
            assert_eq!(count_tableaus(n, m).unwrap(), tuples.into());
            assert_eq!(count_codes(n, n - m).unwrap(), (groups.len() as u64).into());
        }
    }
    assert_eq!(count_codes(2, 1).unwrap(), 15u32.into());
}

fn pauli(n: usize) -> impl Strategy<Value = PauliVec> {
    proptest::collection::vec(any::<bool>(), 2 * n)
        .prop_map(move |b| PauliVec::from_bits(n, BitVec::from_bools(&b)).unwrap())
}

proptest! {
    #[test]
    fn inner_product_is_symmetric_and_bilinear((a, b, c) in (1usize..6).prop_flat_map(|n| (pauli(n), pauli(n), pauli(n)))) {
        prop_assert_eq!(symp_inner(&a, &b), symp_inner(&b, &a));
        prop_assert!(!symp_inner(&a, &a));
        prop_assert_eq!(symp_inner(&a, &pauli_mul(&b, &c)), symp_inner(&a, &b) ^ symp_inner(&a, &c));
        prop_assert_eq!(symp_inner(&a, &b), a.omega().dot(b.bits()));
    }

    #[test]
    fn random_symplectic_preserves_form(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_clifford_symp(n, &mut rng);
        prop_assert!(t.is_symplectic());
        let (p, q) = (PauliVec::random(n, &mut rng), PauliVec::random(n, &mut rng));
        prop_assert_eq!(symp_inner(&t.apply(&p), &t.apply(&q)), symp_inner(&p, &q));
        prop_assert_eq!(t.compose(&t.inverse()), SympMat::identity(n));
        let c = CliffordDesc::from_symp(&t, &BitVec::random(n, &mut rng), &BitVec::random(n, &mut rng)).unwrap();
        prop_assert_eq!(c.symp(), t);
    }

    #[test]
    fn isotropic_extension_is_valid(seed in any::<u64>(), n in 1usize..6, frac in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = ((n as f64) * frac) as usize;
        let cols = sample_isotropic_extension(n, &[], m, ExtensionConstraints::default(), &mut rng).unwrap();
        prop_assert!(is_isotropic(&cols));
        prop_assert_eq!(columns_matrix(n, &cols).rank(), m);
        let t = extend_to_symplectic(n, &cols, &mut rng).unwrap();
        for (j, c) in cols.iter().enumerate() {
            prop_assert_eq!(&t.z_image(j), c);
        }
    }

    #[test]
    fn random_solutions_solve(seed in any::<u64>(), rows in 1usize..12, cols in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = BitMat::random(rows, cols, &mut rng);
        let x = BitVec::random(cols, &mut rng);
        let b = a.mul_vec(&x);
        let y = a.solve_random(&b, &mut rng).unwrap();
        prop_assert_eq!(a.mul_vec(&y), b);
        prop_assert_eq!(a.rank() + a.nullspace_basis().len(), cols);
        for v in a.nullspace_basis() {
            prop_assert!(a.mul_vec(&v).is_zero());
        }
    }

    #[test]
    fn hex_round_trips(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
        let v = BitVec::from_bools(&bits);
        prop_assert_eq!(BitVec::from_hex(v.len(), &v.to_hex()).unwrap(), v.clone());
        let s = serde_json::to_string(&v).unwrap();
        prop_assert_eq!(serde_json::from_str::<BitVec>(&s).unwrap(), v);
    }

    #[test]
    fn inverse_matrices(seed in any::<u64>(), n in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = BitMat::random_invertible(n, &mut rng);
        prop_assert_eq!(a.mul(&a.inverse().unwrap()), BitMat::identity(n));
    }
}
