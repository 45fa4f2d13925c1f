//! Structural invariants over the whole test diagram suite: differential
//! identities, adjointness with one global sign, Jacobi, weight additivity,
//! centers, subdiagram inclusions, and the eigenvector property of path
//! complexes.  Exhaustive sweeps are capped on the largest solvable model.

use std::collections::BTreeMap;

use num::BigInt;
use proptest::prelude::*;

use treecohom::complex::{BettiMethod, ChainVector, ExteriorComplex, ExteriorMonomial};
use treecohom::diagram::{is_homoclan, BuiltinFamily, Edge, TreeDiagram};
use treecohom::liealg::{Flavor, LieAlgebraModel, MonomialOperator};
use treecohom::verify::check_euler;

fn suite() -> Vec<(String, TreeDiagram)> {
    let mut out = Vec::new();
    for n in 1..=4 {
        out.push((format!("path:{n}"), TreeDiagram::builtin(BuiltinFamily::Path(n)).unwrap()));
    }
    for d in 1..=4 {
        out.push((
            format!("multi:{d}"),
            TreeDiagram::builtin(BuiltinFamily::MultiEdge(d)).unwrap(),
        ));
    }
    for n in 2..=3 {
        out.push((format!("instar:{n}"), TreeDiagram::builtin(BuiltinFamily::InStar(n)).unwrap()));
        out.push((
            format!("outstar:{n}"),
            TreeDiagram::builtin(BuiltinFamily::OutStar(n)).unwrap(),
        ));
    }
    for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        out.push((
            format!("a:{n},{m}"),
            TreeDiagram::builtin(BuiltinFamily::BranchedPath(n, m)).unwrap(),
        ));
    }
    let figure1 = TreeDiagram::builtin(BuiltinFamily::Figure1).unwrap();
    let (homoclan, embedding) = figure1.induced(&[1, 2, 3, 4]).unwrap();
    assert!(is_homoclan(&homoclan, &embedding, &figure1).unwrap());
    out.push(("figure1[1-4]".to_string(), homoclan));
    out
}

fn models() -> Vec<(String, LieAlgebraModel)> {
    let mut out = Vec::new();
    for (name, diagram) in suite() {
        out.push((format!("{name}/L0"), LieAlgebraModel::nilpotent(&diagram).unwrap()));
        out.push((format!("{name}/L1"), LieAlgebraModel::solvable(&diagram).unwrap()));
    }
    out
}

#[test]
fn models_build_with_closed_tables() {
    for (name, model) in models() {
        assert!(model.dim() > 0, "{name}");
        match model.flavor {
            Flavor::Nilpotent => assert!(model.is_nilpotent(), "{name}"),
            Flavor::Solvable => {
                assert!(model.is_solvable(), "{name}");
                assert!(!model.is_nilpotent(), "{name}");
            }
        }
    }
}

#[test]
fn jacobi_holds_everywhere() {
    for (name, model) in models() {
        assert_eq!(model.verify_jacobi(), Ok(()), "{name}");
    }
}

#[test]
fn weights_are_additive_everywhere() {
    for (name, model) in models() {
        for (i, j, _, k) in model.table_entries() {
            let sum: Vec<i64> = model.weights[i]
                .iter()
                .zip(&model.weights[j])
                .map(|(a, b)| a + b)
                .collect();
            assert_eq!(sum, model.weights[k], "{name}: [{i}, {j}] -> {k}");
        }
        for w in &model.weights {
            assert_eq!(w.iter().sum::<i64>(), 0, "{name}: weights are zero-sum");
        }
    }
}

#[test]
fn center_is_spanned_by_tip_derivations() {
    for (name, diagram) in suite() {
        let model = LieAlgebraModel::nilpotent(&diagram).unwrap();
        let mut expected: Vec<usize> = diagram
            .tips()
            .into_iter()
            .map(|t| model.index_of(&MonomialOperator::partial(t)).unwrap())
            .collect();
        expected.sort();
        assert_eq!(model.center(), expected, "{name}");
    }
}

/// One pass over the wedge monomials of a complex: checks D^2 = 0,
/// delta^2 = 0, and that <D a, b> = -<a, delta b> with the same global sign
/// at every single pairing.  Models with more than 2^16 monomials are swept
/// over all low-degree words plus a deterministic sample.
fn sweep_differentials(name: &str, complex: &ExteriorComplex) {
    let dim = complex.dim();
    let masks: Vec<u64> = if dim <= 16 {
        (0..(1u64 << dim)).collect()
    } else {
        let mut picked: Vec<u64> = (0..(1u64 << dim))
            .filter(|m| m.count_ones() <= 3)
            .collect();
        let mut state = 0x9E3779B97F4A7C15u64;
        for _ in 0..50_000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            picked.push(state >> (64 - dim));
        }
        picked.sort();
        picked.dedup();
        picked
    };
    for &mask in &masks {
        let mono = ExteriorMonomial::from_bits(mask);
        let d = complex.apply_coboundary(mono);
        let d_chain = ChainVector::from_terms(
            mono.degree() + 1,
            d.iter().map(|(&m, &c)| (m, BigInt::from(c))),
        );
        assert!(complex.apply_coboundary_chain(&d_chain).is_zero(), "{name}: D^2 at {mono:?}");
        let b = complex.apply_boundary(mono);
        let b_chain = ChainVector::from_terms(
            mono.degree().saturating_sub(1),
            b.iter().map(|(&m, &c)| (m, BigInt::from(c))),
        );
        if mono.degree() >= 1 {
            assert!(complex.apply_boundary_chain(&b_chain).is_zero(), "{name}: d^2 at {mono:?}");
        }
        for (&up, &c) in &d {
            let back = complex.apply_boundary(up);
            let c_back = back.get(&mono).copied().unwrap_or(0);
            assert_eq!(c, -c_back, "{name}: adjointness at {mono:?} -> {up:?}");
        }
    }
}

#[test]
fn differential_identities_and_adjointness() {
    for (name, model) in models() {
        let complex = ExteriorComplex::new(&model).unwrap();
        sweep_differentials(&name, &complex);
    }
}

#[test]
fn nilpotent_betti_tables_are_symmetric_and_methods_agree() {
    for (name, diagram) in suite() {
        let model = LieAlgebraModel::nilpotent(&diagram).unwrap();
        if model.dim() > 15 {
            continue;
        }
        // Both methods per block; disagreement is a hard error inside.
        let table = ExteriorComplex::new(&model)
            .unwrap()
            .betti(BettiMethod::Both)
            .unwrap();
        let mut reversed = table.betti.clone();
        reversed.reverse();
        assert_eq!(table.betti, reversed, "{name}: Poincare duality");
        assert_eq!(table.betti[0], 1, "{name}");
    }
}

#[test]
fn euler_characteristics_match_on_small_models() {
    for (name, model) in models() {
        if model.dim() > 12 {
            continue;
        }
        let report = check_euler(&model).unwrap();
        assert!(report.pass, "{name}: {:?}", report.witness);
    }
}

fn embed_chain(
    sub: &LieAlgebraModel,
    embedding: &[usize],
    ambient: &LieAlgebraModel,
    chain: &ChainVector,
) -> ChainVector {
    let mut out = ChainVector::zero(chain.degree);
    for (mono, coef) in &chain.terms {
        let mapped: Vec<usize> = mono
            .indices()
            .into_iter()
            .map(|i| {
                let op = sub.basis[i].embed(embedding);
                ambient.index_of(&op).expect("embedded operator stays in the basis")
            })
            .collect();
        // The index map is monotone, so no reordering sign appears.
        assert!(mapped.windows(2).all(|w| w[0] < w[1]));
        out.add_term(ExteriorMonomial::from_indices(&mapped), coef.clone());
    }
    out
}

#[test]
fn homoclan_harmonics_stay_harmonic_upstairs() {
    let figure1 = TreeDiagram::builtin(BuiltinFamily::Figure1).unwrap();
    let path3 = TreeDiagram::builtin(BuiltinFamily::Path(3)).unwrap();
    let path2 = TreeDiagram::builtin(BuiltinFamily::Path(2)).unwrap();
    let cases: Vec<(TreeDiagram, Vec<usize>)> = vec![
        (path2.clone(), vec![1, 2]),
        (path3.clone(), vec![1, 2]),
        (figure1.clone(), vec![1, 2, 3]),
        (figure1.clone(), vec![1, 2, 3, 4]),
    ];
    for (ambient_diagram, nodes) in cases {
        let (sub_diagram, embedding) = ambient_diagram.induced(&nodes).unwrap();
        assert!(is_homoclan(&sub_diagram, &embedding, &ambient_diagram).unwrap());
        let sub = LieAlgebraModel::nilpotent(&sub_diagram).unwrap();
        let ambient = LieAlgebraModel::nilpotent(&ambient_diagram).unwrap();
        let sub_complex = ExteriorComplex::new(&sub).unwrap();
        let ambient_complex = ExteriorComplex::new(&ambient).unwrap();
        let table = sub_complex.betti(BettiMethod::Laplacian).unwrap();
        for ((p, w), count) in &table.per_weight {
            let basis = sub_complex.harmonic_basis(*p, w);
            assert_eq!(basis.len(), *count);
            for chain in basis {
                let lifted = embed_chain(&sub, &embedding, &ambient, &chain);
                assert!(
                    ambient_complex.apply_coboundary_chain(&lifted).is_zero(),
                    "nodes {nodes:?} degree {p}"
                );
                assert!(
                    ambient_complex.apply_boundary_chain(&lifted).is_zero(),
                    "nodes {nodes:?} degree {p}"
                );
            }
        }
    }
}

#[test]
fn path_wedge_monomials_are_laplacian_eigenvectors() {
    for n in 2..=3 {
        let diagram = TreeDiagram::builtin(BuiltinFamily::Path(n)).unwrap();
        let model = LieAlgebraModel::nilpotent(&diagram).unwrap();
        let complex = ExteriorComplex::new(&model).unwrap();
        let mut blocks: BTreeMap<(usize, Vec<i64>), ()> = BTreeMap::new();
        for mask in 0..(1u64 << model.dim()) {
            let mono = ExteriorMonomial::from_bits(mask);
            blocks.insert((mono.degree(), complex.weight_of_monomial(mono)), ());
        }
        for (p, w) in blocks.keys() {
            let lap = complex.laplacian_matrix(*p, w);
            for (r, c, v) in lap.iter_entries() {
                assert_eq!(r, c, "n={n} p={p} w={w:?}: off-diagonal Laplacian entry {v}");
            }
        }
    }
}

/// Random oriented trees: node j >= 2 attaches below some parent < j.
fn tree_strategy() -> impl Strategy<Value = TreeDiagram> {
    (2usize..=6)
        .prop_flat_map(|n| {
            let parents: Vec<BoxedStrategy<usize>> =
                (2..=n).map(|j| (1..j).boxed()).collect();
            let weights = proptest::collection::vec(1u64..=2, n - 1);
            (Just(n), parents, weights)
        })
        .prop_map(|(n, parents, weights)| {
            let edges: Vec<Edge> = parents
                .into_iter()
                .zip(weights)
                .enumerate()
                .map(|(k, (tail, weight))| Edge { tail, head: k + 2, weight })
                .collect();
            TreeDiagram::new(n, edges).unwrap()
        })
}

proptest! {
    #[test]
    fn random_tree_roundtrip(diagram in tree_strategy()) {
        let text = diagram.render();
        let parsed = TreeDiagram::parse(&text).unwrap();
        prop_assert_eq!(parsed.render(), text);
        prop_assert_eq!(parsed.edges(), diagram.edges());
    }

    #[test]
    fn random_tree_basis_obeys_budgets(diagram in tree_strategy()) {
        let model = LieAlgebraModel::nilpotent(&diagram).unwrap();
        for u in &model.basis {
            let j = u.target;
            let kappa = diagram.kappa(j).unwrap();
            let ancestors = diagram.ancestors(j).unwrap();
            let mut spent = BigInt::from(0);
            for &s in &ancestors {
                let e = u.exponent(s);
                if e > 0 {
                    spent += BigInt::from(e) * diagram.kappa_rel(s, j).unwrap();
                }
            }
            prop_assert!(spent <= kappa);
            for s in 1..=diagram.node_count() {
                if u.exponent(s) > 0 {
                    prop_assert!(ancestors.contains(&s));
                }
            }
        }
    }

    #[test]
    fn random_ancestor_closure_is_homoclan(
        diagram in tree_strategy(),
        pick in 0usize..100,
    ) {
        let node = 1 + pick % diagram.node_count();
        let mut nodes: Vec<usize> = diagram.ancestors(node).unwrap().into_iter().collect();
        nodes.push(node);
        nodes.sort();
        let (sub, embedding) = diagram.induced(&nodes).unwrap();
        prop_assert!(is_homoclan(&sub, &embedding, &diagram).unwrap());
    }
}
