use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algorithms::{
    actor_critic_step, mse_batch_step, NaturalGradientState, pbe_batch_step, Actor, CorrectionState, DualNetState, GtdKind, NeuralValues,
    RnnValues, SeqState, TabularValues, Target, Trace, Transition, ValueFunction, ValueRule, PBE_BATCH,
};
use crate::error::{Error, Result};
use crate::experiments::{pretrain, Algorithm, Approximator, RunConfig};
use crate::hex::Board;
use crate::neural::{Architecture, Checkpoint, CheckpointKind, NetworkParams, RmsPropState, RNN_DEPTH};

use super::{play_episode, start_episode, EpisodeRecord, Evaluator};

pub const METRICS_HEADER: &str = "iteration,episode,mean_after_state_value,epsilon,alpha,beta,lambda,algorithm";
pub const LOSS_HEADER: &str = "iteration,loss_before,loss_after";

/// Capacity of the replay buffer sampled by board-state batch training.
pub const REPLAY_CAPACITY: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricRow {
    /// Transitions consumed so far.
    pub iteration: usize,
    /// 1-based episode index.
    pub episode: usize,
    pub mean_after_state_value: f64,
}

/// Batch loss around one batch step. For dual-network runs this is the
/// projection network's loss against the frozen targets (the projection error).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossRow {
    pub iteration: usize,
    pub before: f64,
    pub after: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrainedModel {
    Tabular(TabularValues<f64>),
    Cnn(NetworkParams<f64>),
    Rnn(NetworkParams<f64>),
    ActorCritic { critic: NetworkParams<f64>, actor: NetworkParams<f64> },
}

impl TrainedModel {
    /// The untrained starting point of `cfg` (before any pretraining).
    pub fn initial(cfg: &RunConfig) -> TrainedModel {
        match (cfg.architecture, cfg.algorithm.actor_critic()) {
            (Approximator::Tabular, _) => TrainedModel::Tabular(TabularValues::new()),
            (Approximator::Rnn, _) => TrainedModel::Rnn(NetworkParams::init(Architecture::ValueRnn, cfg.seed)),
            (Approximator::Cnn, false) => TrainedModel::Cnn(NetworkParams::init(Architecture::ValueCnn, cfg.seed)),
            (Approximator::Cnn, true) => TrainedModel::ActorCritic {
                critic: NetworkParams::init(Architecture::ValueCnn, cfg.seed),
                actor: NetworkParams::init(Architecture::PolicyCnn, cfg.seed.wrapping_add(1)),
            },
        }
    }

    /// The value model; for actor-critic runs, the critic.
    pub fn checkpoint(&self) -> Checkpoint {
        match self {
            TrainedModel::Tabular(t) => Checkpoint {
                kind: CheckpointKind::Tabular,
                values: t.params().to_vec(),
            },
            TrainedModel::Cnn(p) | TrainedModel::Rnn(p) | TrainedModel::ActorCritic { critic: p, .. } => {
                Checkpoint::from_params(p)
            }
        }
    }

    pub fn from_checkpoint(c: Checkpoint) -> Result<TrainedModel> {
        Ok(match c.kind {
            CheckpointKind::Tabular => TrainedModel::Tabular(
                TabularValues::from_flat(c.values).ok_or_else(|| Error::format("tabular checkpoint has the wrong size"))?,
            ),
            CheckpointKind::Network(Architecture::ValueRnn) => TrainedModel::Rnn(c.into_params()?),
            CheckpointKind::Network(Architecture::ValueCnn) => TrainedModel::Cnn(c.into_params()?),
            CheckpointKind::Network(Architecture::PolicyCnn) => {
                return Err(Error::format("a policy network is not a value checkpoint"))
            }
        })
    }

    /// Greedy-play evaluator of the value model.
    pub fn evaluator(&self) -> Box<dyn Evaluator + Send + Sync> {
        match self {
            TrainedModel::Tabular(t) => Box::new(t.clone()),
            TrainedModel::Cnn(p) | TrainedModel::ActorCritic { critic: p, .. } => Box::new(NeuralValues::new(p.clone())),
            TrainedModel::Rnn(p) => Box::new(RnnValues::new(p.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunMetrics {
    pub config: RunConfig,
    pub rows: Vec<MetricRow>,
    /// One row per batch step of batch-mode runs.
    pub batch_loss: Vec<LossRow>,
    pub model: TrainedModel,
}

impl RunMetrics {
    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let mut out = format!("{METRICS_HEADER}\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.iteration, r.episode, r.mean_after_state_value, c.epsilon, c.alpha, c.beta, c.lambda, c.algorithm
            )
            .unwrap();
        }
        out
    }

    pub fn loss_csv(&self) -> String {
        let mut out = format!("{LOSS_HEADER}\n");
        for r in &self.batch_loss {
            writeln!(out, "{},{},{}", r.iteration, r.before, r.after).unwrap();
        }
        out
    }

    /// Mean of the per-episode after-state values over the last `n` episodes.
    pub fn tail_mean(&self, n: usize) -> f64 {
        let tail = &self.rows[self.rows.len().saturating_sub(n)..];
        tail.iter().map(|r| r.mean_after_state_value).sum::<f64>() / tail.len().max(1) as f64
    }
}

#[derive(Default)]
struct Recorder {
    rows: Vec<MetricRow>,
    batch_loss: Vec<LossRow>,
    iteration: usize,
}

impl Recorder {
    fn episode(&mut self, value_sum: f64, decisions: usize) {
        self.rows.push(MetricRow {
            iteration: self.iteration,
            episode: self.rows.len() + 1,
            mean_after_state_value: value_sum / decisions.max(1) as f64,
        });
    }
}

/// Validates `cfg`, builds its initial model (pretrained if requested) and trains it.
pub fn run_training(cfg: &RunConfig) -> Result<RunMetrics> {
    cfg.validate()?;
    let mut model = TrainedModel::initial(cfg);
    if cfg.pretrain {
        model = match model {
            TrainedModel::Cnn(p) => TrainedModel::Cnn(pretrain(p, cfg.pretrain_positions, cfg.seed)?),
            TrainedModel::ActorCritic { critic, actor } => TrainedModel::ActorCritic {
                critic: pretrain(critic, cfg.pretrain_positions, cfg.seed)?,
                actor,
            },
            other => other,
        };
    }
    run_training_from(cfg, model)
}

/// Trains `model` as described by `cfg`; deterministic given both.
pub fn run_training_from(cfg: &RunConfig, model: TrainedModel) -> Result<RunMetrics> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rec = Recorder::default();
    let model = match model {
        TrainedModel::Tabular(mut t) => {
            if cfg.batch_mode {
                let learner = BatchLearner::new(cfg, t)?;
                TrainedModel::Tabular(batch(cfg, learner, board_transitions, true, &mut rng, &mut rec)?)
            } else {
                online(cfg, &mut t, &mut rng, &mut rec)?;
                TrainedModel::Tabular(t)
            }
        }
        TrainedModel::Cnn(p) => {
            let mut vf = NeuralValues::new(p);
            if cfg.batch_mode {
                let learner = BatchLearner::new(cfg, vf)?;
                vf = batch(cfg, learner, board_transitions, true, &mut rng, &mut rec)?;
            } else {
                online(cfg, &mut vf, &mut rng, &mut rec)?;
            }
            TrainedModel::Cnn(vf.params)
        }
        TrainedModel::Rnn(p) => {
            let learner = BatchLearner::new(cfg, RnnValues::new(p))?;
            TrainedModel::Rnn(batch(cfg, learner, sequence_transitions, false, &mut rng, &mut rec)?.params)
        }
        TrainedModel::ActorCritic { critic, actor } => {
            let mut critic = NeuralValues::new(critic);
            let natural = cfg.algorithm == Algorithm::ActorCriticNg;
            let mut actor = Actor::new(actor, cfg.actor_alpha, cfg.lambda, natural);
            actor_critic(cfg, &mut critic, &mut actor, &mut rng, &mut rec)?;
            TrainedModel::ActorCritic {
                critic: critic.params,
                actor: actor.params,
            }
        }
    };
    Ok(RunMetrics {
        config: cfg.clone(),
        rows: rec.rows,
        batch_loss: rec.batch_loss,
        model,
    })
}

fn value_rule(cfg: &RunConfig, algorithm: Algorithm, n: usize) -> Result<ValueRule<f64>> {
    let gtd = |kind| ValueRule::GradientTd {
        kind,
        correction: CorrectionState::new(n, cfg.alpha, cfg.beta),
        trace: Trace::new(n, cfg.lambda),
    };
    Ok(match algorithm {
        Algorithm::Sarsa => ValueRule::Sarsa {
            alpha: cfg.alpha,
            trace: Trace::new(n, cfg.lambda),
        },
        Algorithm::QLearn => ValueRule::QLearning { alpha: cfg.alpha },
        Algorithm::Gtd2 => gtd(GtdKind::Gtd2),
        Algorithm::Tdc => gtd(GtdKind::Tdc),
        Algorithm::GreedyGq => gtd(GtdKind::GreedyGq),
        other => return Err(Error::config("algorithm", format!("{other} is not an online value rule"))),
    })
}

struct OnlineLearner {
    rule: ValueRule<f64>,
    natural: Option<NaturalGradientState<f64>>,
}

impl OnlineLearner {
    fn new(cfg: &RunConfig, n: usize) -> Result<Self> {
        Ok(OnlineLearner {
            rule: value_rule(cfg, cfg.algorithm, n)?,
            natural: cfg.natural_gradient.then(|| {
                NaturalGradientState::new(
                    n,
                    NaturalGradientState::<f64>::DEFAULT_RHO,
                    NaturalGradientState::<f64>::DEFAULT_RIDGE,
                )
            }),
        })
    }

    fn update<V: ValueFunction<f64>>(&mut self, vf: &mut V, t: &Transition<V::State, f64>) -> Result<()> {
        let Some(ng) = &mut self.natural else {
            self.rule.update(vf, t)?;
            return Ok(());
        };
        // Recover the rule's step, undo it, and apply it preconditioned.
        let before = vf.params().to_vec();
        self.rule.update(vf, t)?;
        let step: Vec<f64> = vf.params().iter().zip(&before).map(|(a, b)| a - b).collect();
        vf.add_scaled(-1.0, &step);
        ng.observe(&vf.grad(&t.s, t.a));
        vf.add_scaled(1.0, &ng.solve(&step));
        Ok(())
    }
}

/// Per-transition updates. A transition waits for the next decision so that
/// its next action is known; terminal ones are applied at once.
fn online<V>(cfg: &RunConfig, vf: &mut V, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()>
where
    V: ValueFunction<f64, State = Board> + Evaluator,
{
    let mut learner = OnlineLearner::new(cfg, vf.num_params())?;
    for _ in 0..cfg.episodes {
        let mut g = start_episode(rng, cfg.random_start, cfg.value_target.discount());
        learner.rule.reset_episode();
        let mut pending: Option<Transition<Board, f64>> = None;
        let (mut sum, mut n) = (0.0, 0);
        while !g.is_over() {
            let (t, v) = super::step_episode(&mut g, vf, cfg.epsilon, rng)?;
            if let Some(mut p) = pending.take() {
                p.a_next = Some(t.a);
                learner.update(vf, &p)?;
                rec.iteration += 1;
            }
            sum += v;
            n += 1;
            if t.terminal {
                learner.update(vf, &t)?;
                rec.iteration += 1;
            } else {
                pending = Some(t);
            }
        }
        rec.episode(sum, n);
    }
    Ok(())
}

fn actor_critic(
    cfg: &RunConfig,
    critic: &mut NeuralValues<f64>,
    actor: &mut Actor<f64>,
    rng: &mut ChaCha8Rng,
    rec: &mut Recorder,
) -> Result<()> {
    let mut rule = value_rule(cfg, cfg.critic, critic.num_params())?;
    for _ in 0..cfg.episodes {
        let mut g = start_episode(rng, cfg.random_start, cfg.value_target.discount());
        rule.reset_episode();
        actor.reset_episode();
        let mut pending: Option<Transition<Board, f64>> = None;
        let (mut sum, mut count) = (0.0, 0);
        while !g.is_over() {
            let s = *g.active_board();
            let a = actor.sample(&s, s.legal_mask(), rng)?;
            sum += critic.values(&s)[a];
            count += 1;
            if let Some(mut p) = pending.take() {
                p.a_next = Some(a);
                let delta = rule.update(critic, &p)?;
                actor_critic_step(actor, &p.s, p.a, delta, p.discount)?;
                rec.iteration += 1;
            }
            let t = g.play(a)?;
            if t.terminal {
                let delta = rule.update(critic, &t)?;
                actor_critic_step(actor, &t.s, t.a, delta, t.discount)?;
                rec.iteration += 1;
            } else {
                pending = Some(t);
            }
        }
        rec.episode(sum, count);
    }
    Ok(())
}

enum BatchLearner<V: ValueFunction<f64>> {
    Mse {
        vf: V,
        opt: RmsPropState<f64>,
        target: Target,
    },
    Dual(DualNetState<V, f64>),
}

impl<V: ValueFunction<f64>> BatchLearner<V> {
    fn new(cfg: &RunConfig, vf: V) -> Result<Self> {
        let n = vf.num_params();
        Ok(match cfg.algorithm {
            Algorithm::Sarsa => BatchLearner::Mse {
                vf,
                opt: RmsPropState::new(n, cfg.alpha),
                target: Target::Sarsa,
            },
            Algorithm::QLearn => BatchLearner::Mse {
                vf,
                opt: RmsPropState::new(n, cfg.alpha),
                target: Target::QMax,
            },
            Algorithm::PbeDual => BatchLearner::Dual(DualNetState::new(vf, cfg.beta, cfg.alpha)),
            other => return Err(Error::config("algorithm", format!("{other} has no batch form"))),
        })
    }

    /// The network that plays and is reported.
    fn behavior(&self) -> &V {
        match self {
            BatchLearner::Mse { vf, .. } => vf,
            BatchLearner::Dual(d) => &d.value,
        }
    }

    fn step(&mut self, batch: &[Transition<V::State, f64>], rec: &mut Recorder) -> Result<()> {
        match self {
            BatchLearner::Mse { vf, opt, target } => {
                let (before, after) = mse_batch_step(vf, opt, batch, *target)?;
                rec.batch_loss.push(LossRow {
                    iteration: rec.iteration,
                    before,
                    after,
                });
            }
            BatchLearner::Dual(d) => {
                let r = pbe_batch_step(d, batch)?;
                rec.batch_loss.push(LossRow {
                    iteration: rec.iteration,
                    before: r.projection_before,
                    after: r.projection_after,
                });
            }
        }
        Ok(())
    }

    fn into_behavior(self) -> V {
        match self {
            BatchLearner::Mse { vf, .. } => vf,
            BatchLearner::Dual(d) => d.value,
        }
    }
}

fn board_transitions(ep: &EpisodeRecord) -> Result<Vec<Transition<Board, f64>>> {
    Ok(ep.transitions.clone())
}

/// Re-keys an episode onto its padded board sequence.
fn sequence_transitions(ep: &EpisodeRecord) -> Result<Vec<Transition<SeqState, f64>>> {
    let seq = SeqState::padded(&ep.boards)?;
    Ok(ep
        .transitions
        .iter()
        .enumerate()
        .map(|(i, t)| Transition {
            s: SeqState { seq: seq.clone(), t: i },
            a: t.a,
            r: t.r,
            s_next: SeqState {
                seq: seq.clone(),
                t: (i + 1).min(RNN_DEPTH - 1),
            },
            legal_next: t.legal_next,
            a_next: t.a_next,
            terminal: t.terminal,
            discount: t.discount,
        })
        .collect())
}

/// Updates every [`PBE_BATCH`] transitions. Episodes are played with the
/// parameters held at their start. With `replay`, each batch is drawn without
/// replacement from a FIFO buffer of the last [`REPLAY_CAPACITY`]
/// transitions; otherwise it is the latest 50 transitions in order.
fn batch<V: ValueFunction<f64> + Evaluator>(
    cfg: &RunConfig,
    mut learner: BatchLearner<V>,
    convert: fn(&EpisodeRecord) -> Result<Vec<Transition<V::State, f64>>>,
    replay: bool,
    rng: &mut ChaCha8Rng,
    rec: &mut Recorder,
) -> Result<V> {
    let mut buffer: VecDeque<Transition<V::State, f64>> = VecDeque::new();
    let mut since_step = 0;
    for _ in 0..cfg.episodes {
        let g = start_episode(rng, cfg.random_start, cfg.value_target.discount());
        let ep = play_episode(g, learner.behavior(), cfg.epsilon, rng)?;
        for t in convert(&ep)? {
            if replay && buffer.len() == REPLAY_CAPACITY {
                buffer.pop_front();
            }
            buffer.push_back(t);
            rec.iteration += 1;
            since_step += 1;
            if since_step == PBE_BATCH {
                since_step = 0;
                let chosen: Vec<Transition<V::State, f64>> = if replay {
                    sample(rng, buffer.len(), PBE_BATCH).into_iter().map(|i| buffer[i].clone()).collect()
                } else {
                    buffer.drain(..).collect()
                };
                learner.step(&chosen, rec)?;
            }
        }
        rec.episode(ep.after_state_values.iter().sum(), ep.len());
    }
    Ok(learner.into_behavior())
}
