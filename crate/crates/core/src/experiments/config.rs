//! Flat `key = value` run descriptions.
//!
//! ```text
//! # comment
//! algorithm = qlearn
//! architecture = cnn
//! alpha = 0.001
//! episodes = 20000
//! seed = 7
//! ```
//!
//! Unlisted optional keys take the defaults of [`RunConfig::default`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

macro_rules! tag_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $tag:literal $(| $alias:literal)*),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];
            pub fn tag(self) -> &'static str {
                match self { $($name::$variant => $tag),+ }
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($tag $(| $alias)* => Ok($name::$variant),)+
                    other => Err(format!(
                        "unknown value {other:?}; expected one of {}",
                        [$($tag),+].join(", ")
                    )),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.tag())
            }
        }
    };
}

tag_enum!(Algorithm {
    Sarsa => "sarsa",
    QLearn => "qlearn",
    Gtd2 => "gtd2",
    Tdc => "tdc",
    GreedyGq => "greedy_gq",
    PbeDual => "pbe_dual",
    ActorCriticSg => "actor_critic_sg",
    ActorCriticNg => "actor_critic_ng",
});

tag_enum!(
    /// Value approximator trained by a run.
    Approximator {
        Cnn => "cnn" | "value_cnn" | "ValueCNN",
        Rnn => "rnn" | "value_rnn" | "ValueRNN",
        Tabular => "tabular",
    }
);

tag_enum!(
    /// How the bootstrap of the opponent's next decision is signed.
    ///
    /// `zero_sum` negates it (`γ = −1`, a negamax backup); `shared` adds it
    /// unchanged (`γ = 1`), so every after-state tends to the terminal reward.
    ValueTarget {
        ZeroSum => "zero_sum",
        Shared => "shared",
    }
);

impl ValueTarget {
    pub fn discount(self) -> f64 {
        match self {
            ValueTarget::ZeroSum => -1.0,
            ValueTarget::Shared => 1.0,
        }
    }
}

impl Algorithm {
    pub fn two_timescale(self) -> bool {
        matches!(self, Algorithm::Gtd2 | Algorithm::Tdc | Algorithm::GreedyGq | Algorithm::PbeDual)
    }

    pub fn actor_critic(self) -> bool {
        matches!(self, Algorithm::ActorCriticSg | Algorithm::ActorCriticNg)
    }

    /// Rules that update a value function one transition at a time.
    pub fn online_value_rule(self) -> bool {
        matches!(self, Algorithm::Sarsa | Algorithm::QLearn | Algorithm::Gtd2 | Algorithm::Tdc | Algorithm::GreedyGq)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub architecture: Approximator,
    pub alpha: f64,
    /// Secondary step size. For `pbe_dual` it is the projection network's learning rate.
    pub beta: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub episodes: usize,
    pub seed: u64,
    pub batch_mode: bool,
    pub pretrain: bool,
    pub pretrain_positions: usize,
    pub random_start: bool,
    /// Policy step size of the actor-critic methods.
    pub actor_alpha: f64,
    /// Value rule of the actor-critic critic.
    pub critic: Algorithm,
    pub value_target: ValueTarget,
    /// Precondition online value steps by the inverse running Fisher of the value gradient.
    pub natural_gradient: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algorithm: Algorithm::QLearn,
            architecture: Approximator::Cnn,
            alpha: 0.001,
            beta: 0.01,
            epsilon: 0.1,
            lambda: 0.0,
            episodes: 1000,
            seed: 0,
            batch_mode: false,
            pretrain: false,
            pretrain_positions: 1000,
            random_start: false,
            actor_alpha: 0.001,
            critic: Algorithm::Sarsa,
            value_target: ValueTarget::ZeroSum,
            natural_gradient: false,
        }
    }
}

pub const KEYS: &[&str] = &[
    "algorithm",
    "architecture",
    "alpha",
    "beta",
    "epsilon",
    "lambda",
    "episodes",
    "seed",
    "batch_mode",
    "pretrain",
    "pretrain_positions",
    "random_start",
    "actor_alpha",
    "critic",
    "value_target",
    "natural_gradient",
];

const REQUIRED: &[&str] = &["algorithm", "architecture", "alpha", "episodes", "seed"];

fn parse_field<V: FromStr>(field: &str, v: &str) -> Result<V>
where
    V::Err: fmt::Display,
{
    v.parse().map_err(|e: V::Err| Error::config(field, format!("{e} (got {v:?})")))
}

fn parse_bool(field: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::config(field, format!("expected true or false, got {v:?}"))),
    }
}

/// Splits a config text into `(key, value)` pairs, skipping blanks and `#` comments.
pub(crate) fn entries(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::format(format!("line {}: expected `key = value`", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl RunConfig {
    /// Sets one field from its text value.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "algorithm" => self.algorithm = parse_field(key, v)?,
            "architecture" => self.architecture = parse_field(key, v)?,
            "alpha" => self.alpha = parse_field(key, v)?,
            "beta" => self.beta = parse_field(key, v)?,
            "epsilon" => self.epsilon = parse_field(key, v)?,
            "lambda" => self.lambda = parse_field(key, v)?,
            "episodes" => self.episodes = parse_field(key, v)?,
            "seed" => self.seed = parse_field(key, v)?,
            "batch_mode" => self.batch_mode = parse_bool(key, v)?,
            "pretrain" => self.pretrain = parse_bool(key, v)?,
            "pretrain_positions" => self.pretrain_positions = parse_field(key, v)?,
            "random_start" => self.random_start = parse_bool(key, v)?,
            "actor_alpha" => self.actor_alpha = parse_field(key, v)?,
            "critic" => self.critic = parse_field(key, v)?,
            "value_target" => self.value_target = parse_field(key, v)?,
            "natural_gradient" => self.natural_gradient = parse_bool(key, v)?,
            other => return Err(Error::config(other, "unknown key")),
        }
        Ok(())
    }

    /// Parses and validates a config text.
    pub fn parse(text: &str) -> Result<RunConfig> {
        let cfg = Self::parse_unchecked(&entries(text)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub(crate) fn parse_unchecked(entries: &[(String, String)]) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (k, v) in entries {
            if !seen.insert(k.as_str()) {
                return Err(Error::config(k.as_str(), "given twice"));
            }
            cfg.set(k, v)?;
        }
        if let Some(missing) = REQUIRED.iter().find(|k| !seen.contains(**k)) {
            return Err(Error::config(*missing, "required key missing"));
        }
        Ok(cfg)
    }

    pub fn serialize(&self) -> String {
        format!(
            "algorithm = {}\narchitecture = {}\nalpha = {:?}\nbeta = {:?}\nepsilon = {:?}\nlambda = {:?}\n\
             episodes = {}\nseed = {}\nbatch_mode = {}\npretrain = {}\npretrain_positions = {}\n\
             random_start = {}\nactor_alpha = {:?}\ncritic = {}\nvalue_target = {}\nnatural_gradient = {}\n",
            self.algorithm,
            self.architecture,
            self.alpha,
            self.beta,
            self.epsilon,
            self.lambda,
            self.episodes,
            self.seed,
            self.batch_mode,
            self.pretrain,
            self.pretrain_positions,
            self.random_start,
            self.actor_alpha,
            self.critic,
            self.value_target,
            self.natural_gradient,
        )
    }

    pub fn validate(&self) -> Result<()> {
        use Algorithm::*;
        let positive = |field: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be a positive number, got {x}")))
            }
        };
        let unit = |field: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::config(field, format!("must lie in [0, 1], got {x}")))
            }
        };
        positive("alpha", self.alpha)?;
        if self.algorithm.two_timescale() || (self.algorithm.actor_critic() && self.critic.two_timescale()) {
            positive("beta", self.beta)?;
        } else if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::config("beta", format!("must be a nonnegative number, got {}", self.beta)));
        }
        if self.algorithm.actor_critic() {
            positive("actor_alpha", self.actor_alpha)?;
        }
        unit("epsilon", self.epsilon)?;
        unit("lambda", self.lambda)?;

        if !self.critic.online_value_rule() {
            return Err(Error::config("critic", format!("{} is not an online value rule", self.critic)));
        }
        if self.algorithm.actor_critic() && self.architecture != Approximator::Cnn {
            return Err(Error::config("architecture", "actor-critic needs the cnn critic"));
        }
        if self.batch_mode && !matches!(self.algorithm, Sarsa | QLearn | PbeDual) {
            return Err(Error::config("batch_mode", format!("{} runs online only", self.algorithm)));
        }
        if self.algorithm == PbeDual && !self.batch_mode {
            return Err(Error::config("batch_mode", "pbe_dual trains on batches; set batch_mode = true"));
        }
        if self.architecture == Approximator::Rnn && !self.batch_mode {
            return Err(Error::config("batch_mode", "the rnn trains on episode sequences; set batch_mode = true"));
        }
        if self.natural_gradient && (self.batch_mode || self.algorithm.actor_critic()) {
            return Err(Error::config(
                "natural_gradient",
                "applies to online value rules; actor_critic_ng preconditions the policy instead",
            ));
        }
        if self.pretrain && self.architecture != Approximator::Cnn {
            return Err(Error::config("pretrain", "pretraining needs the cnn"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "algorithm = qlearn\narchitecture = tabular\nalpha = 0.1\nepisodes = 10\nseed = 3\n";

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.algorithm, Algorithm::QLearn);
        assert_eq!(cfg.architecture, Approximator::Tabular);
        assert_eq!(cfg.epsilon, RunConfig::default().epsilon);
    }

    #[test]
    fn errors_name_the_field() {
        let field = |text: &str| match RunConfig::parse(text) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        };
        assert_eq!(field(&MINIMAL.replace("qlearn", "dqn")), "algorithm");
        assert_eq!(field(&MINIMAL.replace("alpha = 0.1", "alpha = -1")), "alpha");
        assert_eq!(field(&format!("{MINIMAL}epsilon = 2\n")), "epsilon");
        assert_eq!(field(&format!("{MINIMAL}colour = red\n")), "colour");
        assert_eq!(field(&MINIMAL.replace("seed = 3\n", "")), "seed");
        assert_eq!(field(&MINIMAL.replace("qlearn", "pbe_dual")), "batch_mode");
        assert_eq!(field(&MINIMAL.replace("qlearn", "actor_critic_ng")), "architecture");
        assert_eq!(field(&format!("{MINIMAL}critic = pbe_dual\n")), "critic");
    }

    #[test]
    fn every_key_is_settable() {
        let text = RunConfig::default().serialize();
        let keys: Vec<String> = entries(&text).unwrap().into_iter().map(|(k, _)| k).collect();
        assert_eq!(keys, KEYS);
    }
}
