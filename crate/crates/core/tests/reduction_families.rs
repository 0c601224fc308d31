use dagcut_core::reductions::{enumerate_instances, two_legalize, Family, ReductionArtifact};
use dagcut_core::{
    duplicate, gen_connected, gen_g0, gen_gbeta, is_acceptable, oracle_3partition, solve_decision,
    validate_legal, verify_solution, CutSet, ThreePartitionInstance,
};

fn base_artifacts(inst: &ThreePartitionInstance) -> Vec<ReductionArtifact> {
    vec![
        gen_g0(inst).unwrap(),
        gen_gbeta(inst, 1).unwrap(),
        gen_gbeta(inst, 2).unwrap(),
        gen_connected(inst).unwrap(),
    ]
}

#[test]
fn generated_graphs_are_legal() {
    for inst in enumerate_instances(2, 16) {
        for art in base_artifacts(&inst) {
            validate_legal(art.instance.graph.graph(), false).unwrap();
            let two = two_legalize(&art).unwrap();
            assert_eq!(two.family(), Family::TwoLegalized);
            assert_eq!(two.provenance.expanded_from, Some(art.family()));
            validate_legal(two.instance.graph.graph(), true).unwrap();
            assert_eq!(two.instance.graph.t(), art.instance.graph.t());
        }
    }
}

#[test]
fn connected_designated_cuts_give_the_stated_components() {
    for inst in enumerate_instances(2, 16) {
        let art = gen_connected(&inst).unwrap();
        let m = inst.m();
        assert_eq!(art.expected.designated_cuts.len(), 6 * m - 2);
        let cuts: CutSet = art.expected.designated_cuts.iter().copied().collect();
        let r = is_acceptable(&duplicate(&art.instance.graph, &cuts).unwrap());
        assert!(r.acceptable);
        let mut sizes: Vec<_> = r.components.iter().map(|c| c.inputs).collect();
        sizes.sort();
        let mut want: Vec<_> = inst.elements().iter().map(|a| a + 1).collect();
        want.extend(std::iter::repeat_n(inst.b() + 3, 3 * m - 1));
        want.sort();
        assert_eq!(sizes, want);
    }
}

#[test]
fn base_families_agree_with_the_oracle() {
    for inst in enumerate_instances(2, 16) {
        let want = oracle_3partition(&inst).is_some();
        for art in base_artifacts(&inst) {
            let got = solve_decision(&art.instance);
            assert_eq!(
                got.is_some(),
                want,
                "{:?} {:?}",
                art.family(),
                inst.elements()
            );
            if let Some(sol) = got {
                verify_solution(&art.instance, &sol).unwrap();
            }
        }
    }
}

#[test]
fn expanded_forest_families_agree_with_the_oracle() {
    for inst in enumerate_instances(2, 16) {
        let want = oracle_3partition(&inst).is_some();
        for art in base_artifacts(&inst)
            .iter()
            .filter(|a| a.family() != Family::Connected)
        {
            let two = two_legalize(art).unwrap();
            assert_eq!(
                solve_decision(&two.instance).is_some(),
                want,
                "{:?}",
                inst.elements()
            );
        }
    }
}

/// A chain gadget can be split internally into two acceptable parts, so on
/// the expanded connected family extra splits become available and a NO
/// instance turns into a YES one.
#[test]
fn expanded_connected_family_admits_internal_splits() {
    let inst = ThreePartitionInstance::from_elements(vec![4, 4, 4, 4, 4, 6]).unwrap();
    assert!(oracle_3partition(&inst).is_none());
    let art = gen_connected(&inst).unwrap();
    assert!(solve_decision(&art.instance).is_none());
    let two = two_legalize(&art).unwrap();
    let sol = solve_decision(&two.instance).expect("expanded instance is YES");
    verify_solution(&two.instance, &sol).unwrap();
    let backbone: CutSet = two.expected.designated_cuts.iter().copied().collect();
    assert!(sol.cuts.iter().any(|e| !backbone.contains(e)));
}
