mod support;

use enactlab::enactive::{EnactiveAgent, EnactiveParams, InteractionMemory, InteractionTree, Primitive};
use enactlab::grid_world::{EnvConfig, Environment, MazeState};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::OracleMemory;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn activate_and_propose_match_definitions(seed in any::<u64>()) {
        prop_assert_eq!(support::set_comprehensions_agree(seed), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn select_ignores_valence_scale(seed in any::<u64>()) {
        prop_assert_eq!(support::select_is_scale_invariant(seed, &[0.1, 2.0, 10.0]), Ok(()));
    }

    #[test]
    fn memory_invariants_hold_under_fuzzing(seed in any::<u64>()) {
        prop_assert_eq!(support::fuzz_memory(seed, 100), Ok(()));
    }

    #[test]
    fn dump_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let oracle = OracleMemory::random(&mut rng, 30, 12);
        let m = oracle.build(12);
        let text = m.dump();
        let back = InteractionMemory::from_dump(&text, 12).unwrap();
        prop_assert_eq!(back.dump(), text);
        prop_assert_eq!(support::weight_map(&back), oracle.weights.clone());
    }

    #[test]
    fn enaction_succeeds_exactly_when_leaves_match(seed in any::<u64>(), len in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = support::random_maze(&mut rng, 12);
        let cfg = EnvConfig { initial_food: 0, trial_length: 100, ..EnvConfig::default() };
        let mut env = Environment::new(MazeState::load(&text).unwrap(), cfg).unwrap();
        let mut m = InteractionMemory::new(8);
        let prims: Vec<Primitive> = (0..len).map(|_| Primitive::ALL[rand::Rng::gen_range(&mut rng, 0..4)]).collect();
        let intended = m.left_fold(&prims).unwrap();
        let e = enactlab::enactive::enact(&mut m, intended, &mut env);
        let performed: Vec<Primitive> = e.performed.iter().map(|p| p.primitive).collect();
        prop_assert_eq!(e.succeeded(), performed == prims);
        prop_assert_eq!(m.leaves(e.enacted), performed.clone());
        prop_assert_eq!(env.tick(), performed.len() as u64);
        let matched = performed.iter().zip(&prims).take_while(|(a, b)| a == b).count();
        prop_assert!(matched == performed.len() || matched + 1 == performed.len());
    }
}

#[test]
fn fuzz_ten_thousand_cycles() {
    for seed in 0..10 {
        support::fuzz_memory(seed, 1000).unwrap();
    }
}

#[test]
fn deeper_foresight_builds_longer_sequences() {
    let longest = |d: usize| {
        let mut env = Environment::new(MazeState::default_maze(), EnvConfig::default()).unwrap();
        let mut agent = EnactiveAgent::<f64>::new(EnactiveParams { depth_limit: d, ..EnactiveParams::default() }, 1);
        while !env.finished() {
            agent.decision_cycle(&mut env).unwrap();
        }
        agent.memory.learned().map(|(id, _)| agent.memory.len_of(id)).max().unwrap()
    };
    assert_eq!(longest(2), 2);
    assert!(longest(10) > 2);
    assert!(longest(10) <= 10);
}

#[test]
fn memory_dump_lines_parse_as_trees() {
    let mut env = Environment::new(MazeState::default_maze(), EnvConfig { trial_length: 200, ..EnvConfig::default() }).unwrap();
    let mut agent = EnactiveAgent::<f64>::new(EnactiveParams::default(), 3);
    while !env.finished() {
        agent.decision_cycle(&mut env).unwrap();
    }
    for line in agent.memory.dump().lines() {
        let (tree, w) = line.rsplit_once(" w=").unwrap();
        assert!(InteractionTree::parse(tree).is_some(), "{line}");
        assert!(w.parse::<u64>().unwrap() >= 1);
    }
}
