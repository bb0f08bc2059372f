use serde::{Deserialize, Serialize};

/// Training method. One PG iteration is a batch of rollouts; one DFO
/// iteration is a single objective evaluation.
#[derive(
    Debug,
    Clone,
    Copy,
    PartialEq,
    Eq,
    Hash,
    PartialOrd,
    Ord,
    Serialize,
    Deserialize,
    clap::ValueEnum,
)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Pg,
    NelderMead,
    Powell,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Pg, Method::NelderMead, Method::Powell];

    pub fn name(self) -> &'static str {
        match self {
            Method::Pg => "pg",
            Method::NelderMead => "nelder-mead",
            Method::Powell => "powell",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One iteration (PG) or one evaluation (DFO).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    /// 1-based, strictly increasing.
    pub iteration: u64,
    /// Cumulative raw F̂ evaluations.
    pub evals: u64,
    /// Mean rollout reward (PG) or the evaluated value (DFO).
    pub reward_mean: f64,
    pub reward_std: Option<f64>,
    /// Largest `reward_mean` so far.
    pub best: f64,
    pub sigma: Option<f64>,
    pub baseline: Option<f64>,
    pub grad_norm: Option<f64>,
    /// Every rollout reward was equal, so the gradient was exactly zero.
    pub degenerate: bool,
    /// Milliseconds since the run started.
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub method: Method,
    pub n_qubits: usize,
    pub depth: usize,
    pub repetitions: String,
    pub noise_p: f64,
    pub seed_index: u64,
    pub rows: Vec<TraceRow>,
    /// Mean `reward_mean` over the final 5% of rows.
    pub j_inf: f64,
    /// Standard deviation of `reward_mean` over the same window.
    pub j_inf_std: f64,
    /// Final policy mean (PG) or best point (DFO).
    pub theta_star: Vec<f64>,
    /// Exact noiseless training-set fidelity at `theta_star`.
    pub theta_star_fidelity: f64,
    pub iters_run: u64,
    pub evals_run: u64,
    pub wallclock_s: f64,
    pub flags: Vec<String>,
}

/// Number of trailing rows that make up the asymptotic window.
pub fn asymptotic_window(rows: usize) -> usize {
    ((rows as f64 * 0.05).ceil() as usize).clamp(1.min(rows), rows)
}

/// `(J_∞, std)` over the final 5% of `rewards`.
pub fn asymptotic_reward(rewards: &[f64]) -> (f64, f64) {
    let w = asymptotic_window(rewards.len());
    if w == 0 {
        return (f64::NAN, f64::NAN);
    }
    let tail = &rewards[rewards.len() - w..];
    let mean = tail.iter().sum::<f64>() / w as f64;
    let std = if w > 1 {
        (tail.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (w - 1) as f64).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

impl TrainingTrace {
    /// First iteration whose mean reward reaches `threshold`.
    pub fn iterations_to(&self, threshold: f64) -> Option<u64> {
        self.rows
            .iter()
            .find(|r| r.reward_mean >= threshold)
            .map(|r| r.iteration)
    }

    pub(crate) fn finish_stats(&mut self) {
        let rewards: Vec<f64> = self.rows.iter().map(|r| r.reward_mean).collect();
        let (j, s) = asymptotic_reward(&rewards);
        self.j_inf = j;
        self.j_inf_std = s;
        self.iters_run = self.rows.len() as u64;
        self.evals_run = self.rows.last().map_or(0, |r| r.evals);
    }
}
