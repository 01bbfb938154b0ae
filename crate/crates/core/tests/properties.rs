//! Randomized checks of the simulators, interpreter and tokenizer against
//! independent brute-force oracles.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

mod common;

use common::{matching_oracle, pairings};

use metadesign_core::circuit::{CircuitProgram, Gate, GateKind};
use metadesign_core::datagen::{draw_code, GenConfig};
use metadesign_core::dsl::{Formula, Line, MetaCode, Symbol};
use metadesign_core::eval::{evaluate, Candidate, EvalOptions, Origin};
use metadesign_core::optics::{Edge, Setup};
use metadesign_core::state::{is_unit, Ket, QuantumState, StateFormat};
use metadesign_core::targets::{self, reference_code, TargetClass};
use metadesign_core::tokenizer::{self, Side};
use metadesign_core::Task;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn any_config() -> impl Strategy<Value = GenConfig> {
    let mut all = GenConfig::optics_grid();
    all.extend([GenConfig::Circuit, GenConfig::Graph]);
    proptest::sample::select(all)
}

fn random_code(config: GenConfig, seed: u64) -> Option<MetaCode> {
    draw_code(config, &mut ChaCha8Rng::seed_from_u64(seed)).ok()
}

fn edge_strategy(vertices: usize, dim: u8) -> impl Strategy<Value = Edge> {
    (
        0..vertices,
        0..vertices,
        0..dim,
        0..dim,
        prop_oneof![Just(1i64), Just(-1), Just(2), Just(-2)],
    )
        .prop_filter("no self loops", |(u, v, ..)| u != v)
        .prop_map(|(u, v, mu, mv, w)| Edge::new(u, v, mu, mv, w))
}

fn setup_strategy() -> impl Strategy<Value = (usize, u8, Vec<Edge>)> {
    (
        prop_oneof![Just(2usize), Just(4), Just(6), Just(8)],
        2u8..=3,
    )
        .prop_flat_map(|(n, dim)| {
            (
                Just(n),
                Just(dim),
                proptest::collection::vec(edge_strategy(n, dim), 0..18),
            )
        })
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn gate_strategy(n: usize) -> impl Strategy<Value = Gate> {
    let kinds: Vec<GateKind> = GateKind::ALL
        .into_iter()
        .filter(|k| k.arity() <= n)
        .collect();
    (
        proptest::sample::select(kinds),
        Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
    )
        .prop_map(|(k, q)| Gate::new(k, &q[..k.arity()]).expect("distinct qubits"))
}

fn program_strategy() -> impl Strategy<Value = (usize, Vec<Gate>)> {
    (1usize..=4).prop_flat_map(|n| (Just(n), proptest::collection::vec(gate_strategy(n), 0..14)))
}

fn word_strategy() -> impl Strategy<Value = QuantumState> {
    (1usize..=8, 2u8..=3).prop_flat_map(|(len, dim)| {
        proptest::collection::btree_map(
            proptest::collection::vec(0..dim, len),
            (1i64..=30).prop_union(-30i64..=-1),
            1..10,
        )
        .prop_map(move |terms| {
            let terms = terms.into_iter().map(|(w, a)| (Ket::new(w), a));
            QuantumState::from_terms(len, dim, terms).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printed_codes_parse_back(config in any_config(), seed in any::<u64>()) {
        if let Some(code) = random_code(config, seed) {
            let text = code.to_text();
            let back = MetaCode::parse(&text, code.task).unwrap();
            prop_assert_eq!(&back, &code);
            prop_assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn codes_tokenize_losslessly(config in any_config(), seed in any::<u64>()) {
        if let Some(code) = random_code(config, seed) {
            let seq = tokenizer::encode_code(&code).unwrap();
            prop_assert_eq!(tokenizer::decode(&seq, code.task, Side::Target).unwrap(), code.to_text());
        }
    }

    #[test]
    fn formulas_round_trip(
        c0 in -40i64..40,
        cn in -5i64..5,
        cii in -5i64..5,
        order in proptest::sample::select(PERMUTATIONS.to_vec()),
        task in proptest::sample::select(Task::ALL.to_vec()),
    ) {
        let coeffs = [(Symbol::Const, c0), (Symbol::Size, cn), (Symbol::Index, cii)];
        let f = Formula::from_terms(order.iter().map(|&i| coeffs[i])).unwrap();
        let (header, line) = match task {
            Task::Optics => ("for ii in range(N):".to_string(), format!("e({},0,0,0)", f.print(task))),
            _ => ("for ii in range(NN):".to_string(), format!("qCZ({},0)", f.print(task))),
        };
        let code = MetaCode::parse(&format!("{header}\n    {line}\n"), task).unwrap();
        let parsed = match &code.body_lines()[0] {
            Line::Edge(e) => e.u.clone(),
            Line::Gate(g) => g.args[0].clone(),
        };
        prop_assert_eq!(&parsed, &f);
        prop_assert_eq!(f.eval(3, 2), c0 + 3 * cn + 2 * cii);
    }

    #[test]
    fn optics_states_tokenize_losslessly(states in proptest::collection::vec(word_strategy(), 1..4)) {
        let canonical: Vec<QuantumState> = states.iter().map(|s| s.canonical()).collect();
        let seq = tokenizer::encode_states(&canonical, Task::Optics).unwrap();
        let back = tokenizer::decode_states(&seq, Task::Optics).unwrap();
        prop_assert_eq!(back.len(), canonical.len());
        for (b, c) in back.iter().zip(&canonical) {
            prop_assert!(b.terms().eq(c.terms()), "{:?} != {:?}", b, c);
        }
    }

    #[test]
    fn setups_match_the_pairing_oracle((n, dim, edges) in setup_strategy()) {
        let setup = Setup::from_edges(n, dim, edges.clone()).unwrap();
        let merged: Vec<Edge> = setup.edges().collect();
        let oracle = matching_oracle(n, &merged);
        let state = setup.compute_state();
        let got: BTreeMap<Vec<u8>, i64> = state.terms().map(|(k, a)| (k.modes().to_vec(), a)).collect();
        prop_assert_eq!(got, oracle);
        let count = pairings(&(0..n).collect::<Vec<_>>())
            .iter()
            .map(|p| p.iter().map(|&(a, b)| merged.iter().filter(|e| (e.u, e.v) == (a.min(b), a.max(b))).count() as u128).product::<u128>())
            .sum::<u128>();
        prop_assert_eq!(setup.count_perfect_matchings(), count);
    }

    #[test]
    fn merging_does_not_change_states((n, dim, edges) in setup_strategy()) {
        let merged = Setup::from_edges(n, dim, edges.clone()).unwrap();
        let oracle = matching_oracle(n, &edges);
        let got: BTreeMap<Vec<u8>, i64> = merged.compute_state().terms().map(|(k, a)| (k.modes().to_vec(), a)).collect();
        prop_assert_eq!(got, oracle);
    }

    #[test]
    fn circuits_match_dense_unitaries((n, gates) in program_strategy()) {
        let mut prog = CircuitProgram::new(n).unwrap();
        for g in &gates {
            prog.push(*g).unwrap();
        }
        prop_assert_eq!(common::check_against_dense(&prog), Ok(()));
    }

    #[test]
    fn fidelity_laws(a in word_strategy(), b in word_strategy(), k in 1i64..5) {
        if a.particles() == b.particles() {
            let ab = a.fidelity_exact(&b).unwrap();
            prop_assert_eq!(&ab, &b.fidelity_exact(&a).unwrap());
            prop_assert!(ab >= BigRational::zero() && ab <= BigRational::one());
            prop_assert_eq!(&ab, &a.scaled(-k).unwrap().fidelity_exact(&b).unwrap());
        }
        prop_assert!(is_unit(&a.fidelity_exact(&a.canonical()).unwrap()));
        prop_assert_eq!(a.canonical().canonical(), a.canonical());
        prop_assert!(a.canonical().is_canonical());
    }

    #[test]
    fn edge_count_before_merging(config in any_config(), seed in any::<u64>(), n in 0usize..6) {
        if let (GenConfig::Optics(_), Some(code)) = (config, random_code(config, seed)) {
            if let Ok(edges) = code.edge_list(n) {
                prop_assert_eq!(edges.len(), code.pre.len() + n * code.body_lines().len());
            }
        }
    }

    #[test]
    fn dropping_a_line_never_adds_correct_states(class in proptest::sample::select(vec![TargetClass::Ghz, TargetClass::W, TargetClass::BellPairs2d, TargetClass::BellPairs3d]), pick in any::<proptest::sample::Index>()) {
        let code = MetaCode::parse(reference_code(Task::Optics, class).unwrap(), Task::Optics).unwrap();
        let opts = EvalOptions { n_max: 4, ..Default::default() };
        let full = evaluate(&Candidate::new("full", Origin::Handwritten, code.clone()), class, &opts).unwrap();
        let total = code.pre.len() + code.body_lines().len();
        let k = pick.index(total);
        let mut cut = code.clone();
        if k < cut.pre.len() {
            cut.pre.remove(k);
        } else {
            cut.body.as_mut().unwrap().lines.remove(k - code.pre.len());
        }
        let less = evaluate(&Candidate::new("cut", Origin::Handwritten, cut), class, &opts).unwrap();
        prop_assert!(less.correct_states <= full.correct_states);
    }
}

fn words(len: usize, dim: u8) -> Vec<Vec<u8>> {
    (0..(dim as usize).pow(len as u32))
        .map(|mut i| {
            let mut w = vec![0u8; len];
            for p in (0..len).rev() {
                w[p] = (i % dim as usize) as u8;
                i /= dim as usize;
            }
            w
        })
        .collect()
}

fn support(task: Task, class: TargetClass, n: usize) -> Vec<Vec<u8>> {
    let s = targets::target_state(task, class, n).unwrap();
    s.terms().map(|(k, _)| k.modes().to_vec()).collect()
}

fn brute(len: usize, dim: u8, keep: impl Fn(&[u8]) -> bool) -> Vec<Vec<u8>> {
    words(len, dim).into_iter().filter(|w| keep(w)).collect()
}

fn count(w: &[u8], m: u8) -> usize {
    w.iter().filter(|&&x| x == m).count()
}

fn balanced(w: &[u8], open: u8, close: u8) -> bool {
    let mut depth = 0i32;
    for &c in w {
        depth += if c == open {
            1
        } else if c == close {
            -1
        } else {
            return false;
        };
        if depth < 0 {
            return false;
        }
    }
    depth == 0
}

#[test]
fn optics_families_match_predicates() {
    let t = Task::Optics;
    for n in 0..4usize {
        let p = 2 * n + 4;
        let anc = |k: usize, w: &[u8]| w[p - k..].iter().all(|&m| m == 0);
        assert_eq!(
            support(t, TargetClass::Ghz, n),
            brute(p, 2, |w| w.iter().all(|&m| m == w[0]))
        );
        assert_eq!(
            support(t, TargetClass::W, n),
            brute(p, 2, |w| count(w, 1) == 1)
        );
        assert_eq!(
            support(t, TargetClass::Dicke4, n),
            brute(p, 2, |w| count(w, 1) == 2)
        );
        assert_eq!(
            support(t, TargetClass::BellPairs2d, n),
            brute(p, 2, |w| w.chunks(2).all(|c| c[0] == c[1]))
        );
        let real = p - (p / 2 - 1);
        assert_eq!(
            support(t, TargetClass::Spin12, n),
            brute(p, 2, |w| anc(p - real, w)
                && w.windows(2).all(|x| x != [1, 1]))
        );
        let real = p - 2;
        assert_eq!(
            support(t, TargetClass::Dyck1, n),
            brute(p, 3, |w| anc(2, w) && balanced(&w[..real], 1, 2))
        );
        assert_eq!(
            support(t, TargetClass::Dicke1, n),
            brute(p, 3, |w| anc(2, w)
                && count(&w[..real], 2) == real / 2
                && count(&w[..real], 1) == 0)
        );
    }
}

#[test]
fn graph_families_are_stabilized() {
    for class in [TargetClass::Linear, TargetClass::Ring, TargetClass::Star] {
        for n in 0..4usize {
            let q = 2 * n + 2;
            let edges: Vec<(usize, usize)> = match class {
                TargetClass::Linear => (0..q - 1).map(|i| (i, i + 1)).collect(),
                TargetClass::Ring => (0..q - 1).map(|i| (i, i + 1)).chain([(q - 1, 0)]).collect(),
                _ => (0..q - 1).map(|i| (i, q - 1)).collect(),
            };
            let state = targets::target_state(Task::Graph, class, n).unwrap();
            let amp = |bits: &[u8]| state.amplitude(&Ket::new(bits.to_vec()));
            // K_v = X_v Π_{w ~ v} Z_w must leave the state unchanged.
            for v in 0..q {
                for w in words(q, 2) {
                    let mut flipped = w.clone();
                    flipped[v] ^= 1;
                    let parity = edges
                        .iter()
                        .filter(|&&(a, b)| (a == v && w[b] == 1) || (b == v && w[a] == 1))
                        .count();
                    let sign = if parity % 2 == 1 { -1 } else { 1 };
                    assert_eq!(amp(&flipped), sign * amp(&w), "{class} n={n} v={v}");
                }
            }
            let text = state.to_text(StateFormat::Circuit);
            if n < 3 {
                assert_eq!(text, targets::fixture(Task::Graph, class).unwrap()[n]);
            }
        }
    }
}
