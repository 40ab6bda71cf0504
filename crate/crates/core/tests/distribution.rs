use fundist_core::distribution::{
    classify, dirac, distribution_object, dmap, is_cotensor_homomorphism, mult, Context, Exactness,
    FilterKind,
};
use fundist_core::finset::{decode_tuple, projection, OpTable};
use fundist_core::rig::{bool2, registry_rig, zmod};
use fundist_core::Error;

fn contexts() -> Vec<(Context, usize)> {
    vec![
        (Context::scalar_linear(&bool2(), None).unwrap(), 3),
        (Context::scalar_affine(&bool2(), None).unwrap(), 3),
        (Context::initial(2, None).unwrap(), 4),
    ]
}

fn maps(from: usize, to: usize) -> Vec<Vec<usize>> {
    let count = to.pow(from as u32);
    (0..count)
        .map(|code| {
            decode_tuple(to.max(1), from, code)
                .unwrap()
                .into_iter()
                .map(usize::from)
                .collect()
        })
        .collect()
}

#[test]
fn dmap_is_a_functor_with_members_as_images() {
    for (ctx, _) in contexts() {
        for v in 0..=2 {
            for w in 0..=2 {
                let d_w = distribution_object(&ctx, w).unwrap();
                for g in maps(v, w) {
                    for mu in distribution_object(&ctx, v).unwrap().elements() {
                        let image = dmap(&ctx, &g, w, mu).unwrap();
                        assert!(d_w.contains(&image), "{}: image outside D({w})", ctx.name());
                        for h in maps(w, 2) {
                            let composed: Vec<usize> = g.iter().map(|&x| h[x]).collect();
                            assert_eq!(
                                dmap(&ctx, &h, 2, &image).unwrap(),
                                dmap(&ctx, &composed, 2, mu).unwrap()
                            );
                        }
                    }
                }
            }
            let id: Vec<usize> = (0..v).collect();
            for mu in distribution_object(&ctx, v).unwrap().elements() {
                assert_eq!(&dmap(&ctx, &id, v, mu).unwrap(), mu);
            }
        }
    }
}

#[test]
fn members_agree_with_the_cotensor_structure() {
    for (ctx, top) in contexts() {
        for v in 0..=top.min(3) {
            let d = distribution_object(&ctx, v).unwrap();
            for mu in d.elements() {
                assert!(is_cotensor_homomorphism(&ctx, mu).unwrap());
            }
            // Every non-member fails the cotensor check as well.
            if v <= 2 {
                let total = 2usize.pow(2u32.pow(v as u32));
                for code in 0..total {
                    let table = decode_tuple(2, 1 << v, code).unwrap();
                    let mu = OpTable::new(2, v, table).unwrap();
                    assert_eq!(
                        is_cotensor_homomorphism(&ctx, &mu).unwrap(),
                        d.contains(&mu)
                    );
                }
            }
        }
    }
}

#[test]
fn multiplication_images_are_members() {
    for (ctx, _) in contexts() {
        for v in 0..=2 {
            let d_v = distribution_object(&ctx, v).unwrap();
            let dd = distribution_object(&ctx, d_v.len()).unwrap();
            for xi in dd.elements() {
                assert!(d_v.contains(&mult(&ctx, v, xi).unwrap()));
            }
        }
    }
}

#[test]
fn classification_examples() {
    let (filter, _) = contexts().remove(0);
    let c = classify(&filter, &dirac(&filter, 2, 0).unwrap()).unwrap();
    assert_eq!(c.principal_generator, Some(vec![0]));
    assert_eq!(c.family, vec![vec![0], vec![0, 1]]);
    assert!(c.upward_closed && c.meet_closed && c.contains_top && c.excludes_bottom && c.prime);

    let top = OpTable::constant(2, 2, 1).unwrap();
    let c = classify(&filter, &top).unwrap();
    assert_eq!(c.kind, FilterKind::ImproperFilter);
    assert_eq!(c.family.len(), 4);
    assert_eq!(c.principal_generator, Some(vec![]));

    let proper = Context::scalar_affine(&bool2(), None).unwrap();
    let meet = OpTable::new(2, 2, vec![0, 0, 0, 1]).unwrap();
    let c = classify(&proper, &meet).unwrap();
    assert_eq!(c.kind, FilterKind::ProperFilter);
    assert_eq!(c.principal_generator, Some(vec![0, 1]));
}

#[test]
fn empty_base_set() {
    let filter = Context::scalar_linear(&bool2(), None).unwrap();
    let d = distribution_object(&filter, 0).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(
        classify(&filter, &d.elements()[0]).unwrap().kind,
        FilterKind::ImproperFilter
    );
    let proper = Context::scalar_affine(&bool2(), None).unwrap();
    assert!(distribution_object(&proper, 0).unwrap().is_empty());
}

#[test]
fn larger_carriers() {
    let z3 = Context::scalar_linear(&zmod(3), Some(2)).unwrap();
    assert_eq!(z3.exactness(), Exactness::ExactViaKnownGenerators);
    assert_eq!(distribution_object(&z3, 2).unwrap().len(), 9);
    assert_eq!(dirac(&z3, 2, 1).unwrap(), projection(3, 2, 2).unwrap());

    let z3_aff = Context::scalar_affine(&zmod(3), Some(2)).unwrap();
    assert_eq!(distribution_object(&z3_aff, 2).unwrap().len(), 3);

    // Not a ring and not boolean: runs on computed commutant slices.
    let sat = Context::scalar_affine(&registry_rig("sat2").unwrap(), Some(2)).unwrap();
    assert_eq!(sat.exactness(), Exactness::TruncatedAtK(2));
    assert_eq!(distribution_object(&sat, 2).unwrap().len(), 2);

    let lz4 = Context::scalar_linear(&registry_rig("lz4").unwrap(), Some(2)).unwrap_err();
    assert_eq!(lz4.reason(), "context-rejected");
}

#[test]
fn full_theory_is_not_a_context() {
    let full = std::sync::Arc::new(fundist_core::theory::ConcreteTheory::full(2).unwrap());
    let err = Context::admit(
        "full",
        fundist_core::distribution::ContextKind::Custom,
        full,
        None,
        None,
    )
    .unwrap_err();
    assert_eq!(err.reason(), "context-rejected");
    assert!(matches!(err, Error::ContextRejected(_)));
}
