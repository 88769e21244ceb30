//! Randomised invariants over the constructed families.

use std::sync::Arc;

use proptest::prelude::*;

use drinfeld_reps::constructors::{self, EtaParam, Family, FamilyTag};
use drinfeld_reps::cyclo::CycScalar;
use drinfeld_reps::datum::samples::*;
use drinfeld_reps::datum::GroupDatum;
use drinfeld_reps::homology::{self, Verdict};
use drinfeld_reps::linalg::Matrix;
use drinfeld_reps::repmod::ModuleRep;

fn datum(i: usize) -> Arc<GroupDatum> {
    Arc::new(match i % 3 {
        0 => z2_nilpotent(),
        1 => z4_nilpotent(),
        _ => z4_non_nilpotent(),
    })
}

#[derive(Debug, Clone)]
struct Pick {
    datum: usize,
    family: usize,
    pair: usize,
    t: u64,
    s: i64,
    eta: usize,
}

fn pick() -> impl Strategy<Value = Pick> {
    (0usize..3, 0usize..8, 0usize..16, 1u64..=2, 1i64..=2, any::<bool>(), 0usize..5).prop_map(
        |(datum, family, pair, t, s, neg, eta)| Pick {
            datum,
            family,
            pair,
            t,
            s: if neg { -s } else { s },
            eta,
        },
    )
}

/// A non-simple, non-projective indecomposable chosen from the grid.
fn tag(d: &GroupDatum, p: &Pick) -> FamilyTag {
    let pairs: Vec<_> = (1..d.n())
        .flat_map(|l| d.weights_in_class(l).into_iter().map(move |w| (l, w)))
        .collect();
    let (l, w) = pairs[p.pair % pairs.len()].clone();
    let etas = [
        EtaParam::from_int(1),
        EtaParam::from_int(-1),
        EtaParam::from_int(2),
        EtaParam::from_int(0),
        EtaParam::Infinity,
    ];
    let families: &[Family] = if d.m() > 1 {
        &[Family::OmegaPower, Family::Tt, Family::Ttbar, Family::Mt]
    } else {
        &[Family::OmegaPower, Family::Wt]
    };
    let base = FamilyTag::new(families[p.family % families.len()], l, w);
    match base.family {
        Family::OmegaPower => base.with_s(p.s),
        Family::Mt => base.with_t(p.t).with_eta(etas[p.eta % 3].clone()),
        Family::Wt => base.with_t(p.t).with_eta(etas[p.eta].clone()),
        _ => base.with_t(p.t),
    }
}

fn build(p: &Pick) -> (FamilyTag, ModuleRep) {
    let d = datum(p.datum);
    let t = tag(&d, p);
    let m = constructors::build(&d, &t).unwrap();
    (t, m)
}

/// Hom dimension from the full dense intertwining system.
fn dense_hom_dim(m: &ModuleRep, n: &ModuleRep) -> usize {
    let (p, q) = (m.dim(), n.dim());
    let mut rows = Vec::new();
    for ((_, a), (_, b)) in m.generators().into_iter().zip(n.generators()) {
        for i in 0..q {
            for j in 0..p {
                let mut row = vec![CycScalar::zero(); p * q];
                for k in 0..p {
                    row[i * p + k] = &row[i * p + k] + a.get(k, j);
                }
                for k in 0..q {
                    row[k * p + j] = &row[k * p + j] - b.get(i, k);
                }
                rows.push(row);
            }
        }
    }
    Matrix::from_rows(rows).unwrap().nullspace().cols()
}

fn unitriangular(n: usize, entries: &[i64]) -> Matrix {
    let mut u = Matrix::identity(n);
    let mut it = entries.iter().cycle();
    for i in 0..n {
        for j in i + 1..n {
            u.set(i, j, CycScalar::from_int(*it.next().unwrap()));
        }
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn members_satisfy_relations_and_are_local(p in pick()) {
        let (t, m) = build(&p);
        let report = m.verify_relations();
        prop_assert!(report.all_hold(), "{}: {:?}", t, report.failures());
        prop_assert_eq!(homology::end_local_dim(&m).unwrap(), 1, "{}", t);
        let ty = homology::loewy_type(&m).unwrap();
        prop_assert!(ty.rl <= 3, "{}: {}", t, ty);
    }

    #[test]
    fn hom_dims_match_dense_oracle(a in pick(), b in pick()) {
        let b = Pick { datum: a.datum, ..b };
        let (_, m) = build(&a);
        let (_, n) = build(&b);
        prop_assert_eq!(homology::hom_space(&m, &n).unwrap().len(), dense_hom_dim(&m, &n));
    }

    #[test]
    fn sums_are_decomposable(a in pick(), b in pick()) {
        let b = Pick { datum: a.datum, ..b };
        let (_, m) = build(&a);
        let (_, n) = build(&b);
        prop_assert!(homology::end_local_dim_of_sum(&m, &n).unwrap() >= 2);
        let sum = ModuleRep::direct_sum(&[&m, &n]).unwrap();
        prop_assert_eq!(homology::end_local_dim(&sum).unwrap(), homology::end_local_dim_of_sum(&m, &n).unwrap());
    }

    #[test]
    fn basis_change_is_recognised(p in pick(), entries in proptest::collection::vec(-2i64..=2, 1..8), seed in any::<u64>()) {
        let (t, m) = build(&p);
        let u = unitriangular(m.dim(), &entries);
        let moved = m.change_basis(&u).unwrap();
        prop_assert!(moved.verify_relations().all_hold());
        let v = homology::is_isomorphic(&m, &moved, seed).unwrap();
        prop_assert!(matches!(v, Verdict::Yes { .. }), "{}: {}", t, v);
    }

    #[test]
    fn syzygy_and_cosyzygy_are_inverse(p in pick(), seed in any::<u64>()) {
        let (t, m) = build(&p);
        let back = homology::cosyzygy(&homology::syzygy(&m).unwrap().module).unwrap().module;
        let v = homology::is_isomorphic(&m, &back, seed).unwrap();
        prop_assert!(v.is_yes(), "{}: {}", t, v);
    }

    #[test]
    fn module_files_round_trip(p in pick()) {
        let (_, m) = build(&p);
        let json = serde_json::to_string(&m.to_file()).unwrap();
        let back = ModuleRep::from_file(serde_json::from_str(&json).unwrap()).unwrap();
        prop_assert_eq!(back.dim(), m.dim());
        prop_assert!(back.generators().into_iter().zip(m.generators()).all(|((_, a), (_, b))| a == b));
    }
}
