//! Mirrored self-play: start states, episode structure and training runs.

use hexrl::algorithms::NeuralValues;
use hexrl::experiments::{Algorithm, Approximator, RunConfig};
use hexrl::hex::{Board, Cell, Outcome, Player};
use hexrl::neural::Architecture;
use hexrl::selfplay::*;
use hexrl::Params;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn seeded_random_starts_are_live_and_mirrored() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut depths = [0usize; RANDOM_START_MAX_PLIES + 1];
    for _ in 0..1000 {
        let g = start_episode(&mut rng, true, -1.0);
        assert!(!g.is_over());
        assert!(g.mirror_consistent());
        assert_eq!(g.history(), &[*g.active_board()]);
        depths[g.move_count()] += 1;
    }
    assert!(depths.iter().all(|&n| n > 100), "depth histogram {depths:?}");
}

#[test]
fn fixed_starts_are_empty_and_pick_either_copy() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut first_a = 0;
    for _ in 0..200 {
        let g = start_episode(&mut rng, false, -1.0);
        assert_eq!(*g.active_board(), Board::new());
        assert_eq!(g.move_count(), 0);
        first_a += usize::from(g.active() == BoardCopy::A);
    }
    assert!((60..140).contains(&first_a));
    let a = start_episode(&mut ChaCha8Rng::seed_from_u64(5), true, -1.0);
    let b = start_episode(&mut ChaCha8Rng::seed_from_u64(5), true, -1.0);
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn episodes_respect_the_mirror_and_reward_structure(seed in 0u64..10_000, eps in 0.0f64..1.0, random_start in any::<bool>()) {
        let vf = NeuralValues::new(Params::init(Architecture::ValueCnn, seed % 7));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = start_episode(&mut rng, random_start, -1.0);
        let mut ts = Vec::new();
        while !g.is_over() {
            let before_a = *g.board_a();
            let active = g.active();
            let (t, v) = step_episode(&mut g, &vf, eps, &mut rng).unwrap();
            prop_assert!(v > -1.0 && v < 1.0);
            prop_assert!(g.mirror_consistent());
            prop_assert_ne!(g.active(), active);
            let c = Cell::from_index(t.a);
            // A move on copy B lands transposed on copy A.
            let on_a = if active == BoardCopy::A { c } else { c.transpose() };
            prop_assert!(before_a.get(on_a).is_none() && g.board_a().get(on_a).is_some());
            prop_assert_eq!(t.s.to_move(), Player::Red);
            prop_assert_eq!(t.s_next, t.s.play(c).unwrap().mirror_transpose());
            ts.push(t);
        }
        prop_assert!(step_episode(&mut g, &vf, eps, &mut rng).is_err());
        prop_assert!(ts.len() <= 9);
        prop_assert_ne!(g.outcome(), Outcome::Ongoing);
        let (last, rest) = ts.split_last().unwrap();
        prop_assert!(last.terminal && last.r == 1.0 && last.legal_next.is_empty());
        prop_assert!(rest.iter().all(|t| !t.terminal && t.r == 0.0));
    }
}

#[test]
fn recorded_episodes_link_next_actions() {
    let vf = NeuralValues::new(Params::init(Architecture::ValueCnn, 2));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let g = start_episode(&mut rng, false, -1.0);
        let ep = play_episode(g, &vf, 0.2, &mut rng).unwrap();
        assert_eq!(ep.after_state_values.len(), ep.len());
        assert_eq!(ep.boards.len(), ep.len());
        for w in ep.transitions.windows(2) {
            assert_eq!(w[0].a_next, Some(w[1].a));
            assert_eq!(w[0].s_next, w[1].s);
        }
        assert_eq!(ep.transitions.last().unwrap().a_next, None);
        assert!(ep.len() >= 3, "Red needs three stones to connect");
    }
}

fn cfg(text: &str) -> RunConfig {
    RunConfig::parse(&format!("architecture = cnn\nalpha = 0.01\nseed = 4\n{text}")).unwrap()
}

#[test]
fn training_is_reproducible_and_iterations_increase() {
    for text in [
        "algorithm = tdc\nbeta = 0.1\nlambda = 0.5\nepisodes = 30",
        "algorithm = qlearn\nepisodes = 6\nnatural_gradient = true",
        "algorithm = actor_critic_ng\nepisodes = 4\ncritic = greedy_gq\nbeta = 0.1",
        "algorithm = pbe_dual\nbatch_mode = true\nbeta = 0.01\nepisodes = 30",
    ] {
        let c = cfg(text);
        let a = run_training(&c).unwrap();
        let b = run_training(&c).unwrap();
        assert_eq!(a.to_csv(), b.to_csv(), "{text}");
        assert_eq!(a.model.checkpoint(), b.model.checkpoint());
        assert_eq!(a.rows.len(), c.episodes);
        assert!(a.rows.windows(2).all(|w| w[0].iteration < w[1].iteration));
        let mut d = c.clone();
        d.seed += 1;
        assert_ne!(run_training(&d).unwrap().to_csv(), a.to_csv());
    }
}

#[test]
fn checkpoints_restore_the_same_evaluator() {
    let mut c = cfg("algorithm = sarsa\nepisodes = 20");
    for arch in [Approximator::Cnn, Approximator::Tabular] {
        c.architecture = arch;
        let m = run_training(&c).unwrap().model;
        let restored = TrainedModel::from_checkpoint(m.checkpoint()).unwrap();
        for b in reachable_decisions().iter().step_by(97) {
            assert_eq!(m.evaluator().decision_values(&[*b]), restored.evaluator().decision_values(&[*b]));
        }
    }
    c.algorithm = Algorithm::QLearn;
    c.architecture = Approximator::Rnn;
    c.batch_mode = true;
    let m = run_training(&c).unwrap().model;
    let restored = TrainedModel::from_checkpoint(m.checkpoint()).unwrap();
    let history = [Board::new(), Board::new().play_index(4).unwrap().play_index(0).unwrap()];
    assert_eq!(m.evaluator().decision_values(&history), restored.evaluator().decision_values(&history));
}

#[test]
fn decision_set_is_red_to_move_and_distinct() {
    let ds = reachable_decisions();
    assert!(ds.iter().all(|b| b.to_move() == Player::Red && b.winner() == Outcome::Ongoing));
    assert!(ds.windows(2).all(|w| w[0].grid_key() < w[1].grid_key()));
    assert!(ds.contains(&Board::new()));
}
