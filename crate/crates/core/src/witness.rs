//! Randomized depth-first search for long `Z_n`-avoiding words, with
//! resumable checkpoints.
//!
//! Each node shuffles its letter order with a ChaCha stream seeded from the
//! user seed; a dead end backtracks one position. If the search goes
//! `restart_after` nodes without reaching a new depth it starts again from
//! the empty word, keeping the best word found so far. The RNG position is
//! part of the saved state, so a resumed run follows the same trajectory as
//! an uninterrupted one.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scanner::ZiminScanner;
use crate::word::Word;

pub const CHECKPOINT_VERSION: u32 = 1;
pub const DEFAULT_NOISE_PERMILLE: u32 = 10;
pub const DEFAULT_RESTART_AFTER: u64 = 10_000_000;
pub const DEFAULT_CHECKPOINT_NODES: u64 = 1_000_000;
pub const DEFAULT_CHECKPOINT_INTERVAL: Duration = Duration::from_secs(30);

/// How a node orders the letters it tries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LetterOrdering {
    /// Uniformly shuffled.
    Shuffle,
    /// Shuffled, then stably sorted so that letters leaving the longest
    /// shortest `Z_{n-1}`-instance suffix (then `Z_{n-2}`, ...) come first.
    /// A letter after which no such suffix exists ranks highest.
    #[default]
    Slack,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessParams {
    pub n: usize,
    pub ordering: LetterOrdering,
    /// Per-mille chance that a [`LetterOrdering::Slack`] node keeps its plain shuffle.
    pub noise_permille: u32,
    pub q: usize,
    pub target_length: usize,
    pub seed: u64,
    /// Nodes without depth progress before restarting; 0 disables restarts.
    pub restart_after: u64,
    pub checkpoint_every_nodes: u64,
    pub checkpoint_every: Duration,
}

impl WitnessParams {
    pub fn new(n: usize, q: usize, target_length: usize, seed: u64) -> Self {
        WitnessParams {
            n,
            ordering: LetterOrdering::default(),
            noise_permille: DEFAULT_NOISE_PERMILLE,
            q,
            target_length,
            seed,
            restart_after: DEFAULT_RESTART_AFTER,
            checkpoint_every_nodes: DEFAULT_CHECKPOINT_NODES,
            checkpoint_every: DEFAULT_CHECKPOINT_INTERVAL,
        }
    }
}

/// Stopping limits for one call of [`WitnessSearch::run`].
#[derive(Clone, Copy, Debug, Default)]
pub struct RunLimits {
    pub time_budget: Option<Duration>,
    /// Stop once the total node count reaches this value.
    pub node_limit: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Running,
    /// The current word reached the target length.
    Reached,
    /// The whole tree was explored within one run: `best` is a longest avoider.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Frame {
    order: Vec<u8>,
    next: u8,
}

/// Complete state of a witness search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSearchState {
    pub n: usize,
    pub q: usize,
    pub target_length: usize,
    pub seed: u64,
    pub current: Vec<u8>,
    pub best: Vec<u8>,
    frames: Vec<Frame>,
    pub nodes: u64,
    pub restarts: u64,
    pub stall_nodes: u64,
    pub run_max_depth: usize,
    rng_word_pos: u128,
    pub status: SearchStatus,
}

impl WitnessSearchState {
    pub fn best_word(&self) -> Word {
        Word::new(self.best.clone(), self.q).expect("letters below q")
    }
}

/// On-disk form of [`WitnessSearchState`]; words are hex strings, one byte per letter.
#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    version: u32,
    n: usize,
    q: usize,
    target_length: usize,
    seed: u64,
    ordering: LetterOrdering,
    noise_permille: u32,
    restart_after: u64,
    current: String,
    best: String,
    frame_orders: String,
    frame_next: String,
    nodes: u64,
    restarts: u64,
    stall_nodes: u64,
    run_max_depth: usize,
    rng_word_pos: String,
    status: SearchStatus,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn unhex(text: &str) -> Option<Vec<u8>> {
    if !text.len().is_multiple_of(2) {
        return None;
    }
    (0..text.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(text.get(i..i + 2)?, 16).ok())
        .collect()
}

pub struct WitnessSearch {
    params: WitnessParams,
    state: WitnessSearchState,
    scanner: ZiminScanner,
    rng: ChaCha8Rng,
}

impl WitnessSearch {
    pub fn new(params: WitnessParams) -> Result<Self> {
        if params.n == 0 || params.q < 2 {
            return Err(Error::Precondition(format!(
                "witness search needs n >= 1 and q >= 2 (got n={}, q={})",
                params.n, params.q
            )));
        }
        let mut scanner = ZiminScanner::new(params.n, params.q)?;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let root = make_frame(&params, &mut scanner, &mut rng);
        let state = WitnessSearchState {
            n: params.n,
            q: params.q,
            target_length: params.target_length,
            seed: params.seed,
            current: Vec::new(),
            best: Vec::new(),
            frames: vec![root],
            nodes: 0,
            restarts: 0,
            stall_nodes: 0,
            run_max_depth: 0,
            rng_word_pos: rng.get_word_pos(),
            status: SearchStatus::Running,
        };
        Ok(WitnessSearch {
            params,
            state,
            scanner,
            rng,
        })
    }

    /// Restores a search from a checkpoint written by [`WitnessSearch::save`].
    ///
    /// The checkpoint must match `params` in everything that steers the
    /// search; the checkpoint cadence may differ.
    pub fn resume(params: WitnessParams, path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Checkpoint {
            path: path.to_path_buf(),
            reason,
        };
        let text = fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
        let file: CheckpointFile = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        if file.version != CHECKPOINT_VERSION {
            return Err(bad(format!("unsupported version {}", file.version)));
        }
        if (file.n, file.q, file.target_length, file.seed)
            != (params.n, params.q, params.target_length, params.seed)
        {
            return Err(bad(format!(
                "written for n={} q={} target={} seed={}",
                file.n, file.q, file.target_length, file.seed
            )));
        }
        if (file.ordering, file.noise_permille, file.restart_after)
            != (params.ordering, params.noise_permille, params.restart_after)
        {
            return Err(bad(format!(
                "written with ordering={:?} noise={} restart_after={}",
                file.ordering, file.noise_permille, file.restart_after
            )));
        }
        let decode =
            |field: &str, s: &str| unhex(s).ok_or_else(|| bad(format!("{field} is not hex")));
        let current = decode("current", &file.current)?;
        let best = decode("best", &file.best)?;
        let orders = decode("frame_orders", &file.frame_orders)?;
        let next = decode("frame_next", &file.frame_next)?;
        let q = params.q;
        if orders.len() != next.len() * q || next.len() != current.len() + 1 {
            return Err(bad("frame stack does not match current word".into()));
        }
        let frames: Vec<Frame> = orders
            .chunks(q)
            .zip(&next)
            .map(|(o, &nx)| Frame {
                order: o.to_vec(),
                next: nx,
            })
            .collect();
        for f in &frames {
            let mut sorted = f.order.clone();
            sorted.sort_unstable();
            if sorted != (0..q as u8).collect::<Vec<_>>() || f.next as usize > q {
                return Err(bad("frame is not a letter permutation".into()));
            }
        }
        if current.iter().chain(&best).any(|&c| c as usize >= q) {
            return Err(bad("letter outside alphabet".into()));
        }
        let rng_word_pos: u128 = file
            .rng_word_pos
            .parse()
            .map_err(|_| bad("rng_word_pos is not an integer".into()))?;
        let mut scanner = ZiminScanner::new(params.n, q)?;
        for &c in &current {
            if scanner.push(c) {
                return Err(bad("current word encounters the pattern".into()));
            }
        }
        let mut check = ZiminScanner::new(params.n, q)?;
        for &c in &best {
            if check.push(c) {
                return Err(bad("best word encounters the pattern".into()));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_word_pos(rng_word_pos);
        let state = WitnessSearchState {
            n: file.n,
            q,
            target_length: file.target_length,
            seed: file.seed,
            current,
            best,
            frames,
            nodes: file.nodes,
            restarts: file.restarts,
            stall_nodes: file.stall_nodes,
            run_max_depth: file.run_max_depth,
            rng_word_pos,
            status: file.status,
        };
        Ok(WitnessSearch {
            params,
            state,
            scanner,
            rng,
        })
    }

    pub fn state(&self) -> &WitnessSearchState {
        &self.state
    }

    pub fn into_state(self) -> WitnessSearchState {
        self.state
    }

    /// Writes the state atomically (temporary file, then rename).
    pub fn save(&mut self, path: &Path) -> Result<()> {
        self.state.rng_word_pos = self.rng.get_word_pos();
        let s = &self.state;
        let file = CheckpointFile {
            version: CHECKPOINT_VERSION,
            n: s.n,
            q: s.q,
            target_length: s.target_length,
            seed: s.seed,
            ordering: self.params.ordering,
            noise_permille: self.params.noise_permille,
            restart_after: self.params.restart_after,
            current: hex(&s.current),
            best: hex(&s.best),
            frame_orders: hex(&s
                .frames
                .iter()
                .flat_map(|f| f.order.iter().copied())
                .collect::<Vec<_>>()),
            frame_next: hex(&s.frames.iter().map(|f| f.next).collect::<Vec<_>>()),
            nodes: s.nodes,
            restarts: s.restarts,
            stall_nodes: s.stall_nodes,
            run_max_depth: s.run_max_depth,
            rng_word_pos: s.rng_word_pos.to_string(),
            status: s.status,
        };
        let json = serde_json::to_string(&file).expect("checkpoint serialises");
        let tmp = tmp_path(path);
        fs::write(&tmp, json)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Advances the search until the target is reached, the tree is
    /// exhausted, or a limit is hit. Checkpoints to `checkpoint` on the
    /// configured cadence and once more before returning.
    pub fn run(&mut self, limits: RunLimits, checkpoint: Option<&Path>) -> Result<SearchStatus> {
        // no clock reads unless asked for, so node-limited runs work without one
        let clocked = limits.time_budget.is_some() || checkpoint.is_some();
        let started = clocked.then(Instant::now);
        let mut last_save_nodes = self.state.nodes;
        let mut last_save_time = started;
        let q = self.params.q;
        while self.state.status == SearchStatus::Running {
            if self.state.current.len() >= self.params.target_length {
                self.state.status = SearchStatus::Reached;
                break;
            }
            if limits.node_limit.is_some_and(|l| self.state.nodes >= l) {
                break;
            }
            if self.state.nodes.is_multiple_of(4096) {
                let elapsed = |t: Option<Instant>| t.map_or(Duration::ZERO, |t| t.elapsed());
                if limits.time_budget.is_some_and(|b| elapsed(started) >= b) {
                    break;
                }
                if let Some(path) = checkpoint {
                    if self.state.nodes - last_save_nodes >= self.params.checkpoint_every_nodes
                        || elapsed(last_save_time) >= self.params.checkpoint_every
                    {
                        self.save(path)?;
                        last_save_nodes = self.state.nodes;
                        last_save_time = Some(Instant::now());
                    }
                }
            }
            if self.params.restart_after > 0 && self.state.stall_nodes >= self.params.restart_after
            {
                self.restart();
                continue;
            }
            self.step(q);
        }
        self.state.rng_word_pos = self.rng.get_word_pos();
        if let Some(path) = checkpoint {
            self.save(path)?;
        }
        Ok(self.state.status)
    }

    fn step(&mut self, q: usize) {
        let s = &mut self.state;
        let frame = s.frames.last_mut().expect("root frame");
        if (frame.next as usize) < q {
            let letter = frame.order[frame.next as usize];
            frame.next += 1;
            s.nodes += 1;
            s.stall_nodes += 1;
            if self.scanner.push(letter) {
                self.scanner.pop();
                return;
            }
            s.current.push(letter);
            s.frames
                .push(make_frame(&self.params, &mut self.scanner, &mut self.rng));
            let depth = s.current.len();
            if depth > s.run_max_depth {
                s.run_max_depth = depth;
                s.stall_nodes = 0;
            }
            if depth > s.best.len() {
                s.best.clone_from(&s.current);
            }
        } else {
            s.frames.pop();
            if s.current.pop().is_none() {
                s.status = SearchStatus::Exhausted;
                s.frames.push(Frame {
                    order: (0..q as u8).collect(),
                    next: q as u8,
                });
                return;
            }
            self.scanner.pop();
        }
    }

    fn restart(&mut self) {
        let s = &mut self.state;
        s.restarts += 1;
        s.stall_nodes = 0;
        s.run_max_depth = 0;
        s.current.clear();
        self.scanner.reset();
        s.frames.clear();
        s.frames
            .push(make_frame(&self.params, &mut self.scanner, &mut self.rng));
    }
}

fn make_frame(params: &WitnessParams, scanner: &mut ZiminScanner, rng: &mut ChaCha8Rng) -> Frame {
    let mut order: Vec<u8> = (0..params.q as u8).collect();
    order.shuffle(rng);
    let noisy = params.noise_permille > 0 && rng.random_range(0..1000) < params.noise_permille;
    if params.ordering == LetterOrdering::Slack && params.n >= 2 && !noisy {
        let keys: Vec<(u8, Vec<isize>)> = order
            .iter()
            .map(|&c| {
                let hit = scanner.push(c);
                let key = if hit {
                    vec![isize::MIN]
                } else {
                    let chain = scanner.shortest_suffix_chain(params.n - 1);
                    std::iter::once(-(chain.len() as isize))
                        .chain(chain.iter().rev().map(|&m| m as isize))
                        .collect()
                };
                scanner.pop();
                (c, key)
            })
            .collect();
        let mut ranked = keys;
        ranked.sort_by(|a, b| b.1.cmp(&a.1));
        order = ranked.into_iter().map(|(c, _)| c).collect();
    }
    Frame { order, next: 0 }
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Runs a witness search, resuming from `checkpoint_path` when that file
/// exists and starting afresh otherwise.
pub fn long_witness_search(
    params: WitnessParams,
    checkpoint_path: Option<&Path>,
    limits: RunLimits,
) -> Result<WitnessSearchState> {
    let mut search = match checkpoint_path {
        Some(p) if p.exists() => WitnessSearch::resume(params, p)?,
        _ => WitnessSearch::new(params)?,
    };
    search.run(limits, checkpoint_path)?;
    Ok(search.into_state())
}
