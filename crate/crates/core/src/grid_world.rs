//! Deterministic maze environment with periodic food replenishment.
//!
//! Coordinates: `x` grows East, `y` grows South, so North is decreasing `y`
//! and rows of a maze file map directly onto `y`. Stepping off the grid is
//! handled exactly like stepping into an obstacle.

use std::fmt;
use std::path::PathBuf;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{EnvError, MazeError};

/// Maze shipped with the crate: 10 wide, 8 high, walled border.
pub const DEFAULT_MAZE: &str = include_str!("../mazes/default.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    Empty,
    Obstacle,
    Food,
}

impl Cell {
    pub fn is_free(self) -> bool {
        self != Cell::Obstacle
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Heading {
    North,
    East,
    South,
    West,
}

impl Heading {
    pub const ALL: [Heading; 4] = [Heading::North, Heading::East, Heading::South, Heading::West];

    pub fn turn_left(self) -> Self {
        match self {
            Heading::North => Heading::West,
            Heading::West => Heading::South,
            Heading::South => Heading::East,
            Heading::East => Heading::North,
        }
    }

    pub fn turn_right(self) -> Self {
        match self {
            Heading::North => Heading::East,
            Heading::East => Heading::South,
            Heading::South => Heading::West,
            Heading::West => Heading::North,
        }
    }

    /// Unit offset `(dx, dy)` of one step forward.
    pub fn offset(self) -> (i64, i64) {
        match self {
            Heading::North => (0, -1),
            Heading::East => (1, 0),
            Heading::South => (0, 1),
            Heading::West => (-1, 0),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    fn marker(self) -> char {
        match self {
            Heading::North => '^',
            Heading::East => '>',
            Heading::South => 'v',
            Heading::West => '<',
        }
    }

    fn from_marker(ch: char) -> Option<Self> {
        match ch {
            '^' => Some(Heading::North),
            '>' => Some(Heading::East),
            'v' => Some(Heading::South),
            '<' => Some(Heading::West),
            _ => None,
        }
    }
}

impl fmt::Display for Heading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Heading::North => "N",
            Heading::East => "E",
            Heading::South => "S",
            Heading::West => "W",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub x: usize,
    pub y: usize,
}

impl Position {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AgentPose {
    pub position: Position,
    pub heading: Heading,
}

/// Motor commands shared by both agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Step,
    TurnLeft,
    TurnRight,
}

impl Action {
    /// Also the fixed tie order used by planners.
    pub const ALL: [Action; 3] = [Action::Step, Action::TurnLeft, Action::TurnRight];

    pub fn name(self) -> &'static str {
        match self {
            Action::Step => "step",
            Action::TurnLeft => "turnl",
            Action::TurnRight => "turnr",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionOutcome {
    pub action: Action,
    pub succeeded: bool,
    pub ate_food: bool,
    pub new_pose: AgentPose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DistanceNorm {
    #[default]
    Euclidean,
    Manhattan,
}

impl DistanceNorm {
    pub fn within(self, a: Position, b: Position, delta: f64) -> bool {
        let dx = a.x.abs_diff(b.x) as f64;
        let dy = a.y.abs_diff(b.y) as f64;
        match self {
            DistanceNorm::Euclidean => dx * dx + dy * dy <= delta * delta,
            DistanceNorm::Manhattan => dx + dy <= delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub replenish_interval: u64,
    pub replenish_count: usize,
    pub trial_length: u64,
    pub initial_food: usize,
    /// `None` selects [`DEFAULT_MAZE`].
    pub maze_file: Option<PathBuf>,
    pub seed: u64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            replenish_interval: 200,
            replenish_count: 20,
            trial_length: 1000,
            initial_food: 18,
            maze_file: None,
            seed: 0,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        if self.replenish_interval == 0 {
            return Err(EnvError::InvalidConfig("replenish_interval must be > 0".into()));
        }
        if self.trial_length == 0 {
            return Err(EnvError::InvalidConfig("trial_length must be > 0".into()));
        }
        Ok(())
    }
}

/// Running food bookkeeping for the conservation identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FoodLedger {
    /// Food drawn into the maze file itself.
    pub preplaced: u64,
    /// Sum of every `count` passed to `place_food`.
    pub requested: u64,
    /// Requests that found no empty cell.
    pub skipped: u64,
    pub eaten: u64,
}

impl FoodLedger {
    pub fn expected_on_grid(&self) -> u64 {
        self.preplaced + self.requested - self.skipped - self.eaten
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazeState {
    pub width: usize,
    pub height: usize,
    cells: Vec<Cell>,
    pub pose: AgentPose,
    pub tick: u64,
    pub rng_seed: u64,
    pub food: FoodLedger,
}

impl MazeState {
    /// Parses the ASCII maze format: `#` obstacle, `.` empty, `F` food and
    /// one of `^ > v <` for the agent start. Trailing `\r` is tolerated.
    pub fn load(text: &str) -> Result<Self, MazeError> {
        let rows: Vec<&str> = text
            .lines()
            .map(|l| l.strip_suffix('\r').unwrap_or(l))
            .filter(|l| !l.is_empty())
            .collect();
        if rows.is_empty() {
            return Err(MazeError::Empty);
        }
        let width = rows[0].chars().count();
        let height = rows.len();
        let mut cells = Vec::with_capacity(width * height);
        let mut agents = Vec::new();
        for (y, row) in rows.iter().enumerate() {
            let found = row.chars().count();
            if found != width {
                return Err(MazeError::NotRectangular { row: y, expected: width, found });
            }
            for (x, ch) in row.chars().enumerate() {
                let cell = match ch {
                    '#' => Cell::Obstacle,
                    '.' => Cell::Empty,
                    'F' => Cell::Food,
                    other => match Heading::from_marker(other) {
                        Some(h) => {
                            agents.push(AgentPose { position: Position::new(x, y), heading: h });
                            Cell::Empty
                        }
                        None => return Err(MazeError::UnknownChar { ch: other, row: y, col: x }),
                    },
                };
                cells.push(cell);
            }
        }
        let pose = match agents.len() {
            0 => return Err(MazeError::NoAgent),
            1 => agents[0],
            n => return Err(MazeError::MultipleAgents(n)),
        };
        let preplaced = cells.iter().filter(|c| **c == Cell::Food).count() as u64;
        Ok(Self {
            width,
            height,
            cells,
            pose,
            tick: 0,
            rng_seed: 0,
            food: FoodLedger { preplaced, ..FoodLedger::default() },
        })
    }

    pub fn default_maze() -> Self {
        Self::load(DEFAULT_MAZE).expect("bundled maze is valid")
    }

    fn idx(&self, p: Position) -> usize {
        p.y * self.width + p.x
    }

    pub fn cell(&self, p: Position) -> Cell {
        self.cells[self.idx(p)]
    }

    pub fn set_cell(&mut self, p: Position, cell: Cell) {
        let i = self.idx(p);
        self.cells[i] = cell;
    }

    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| Position::new(x, y)))
    }

    pub fn free_positions(&self) -> impl Iterator<Item = Position> + '_ {
        self.positions().filter(|p| self.cell(*p).is_free())
    }

    pub fn food_count(&self) -> u64 {
        self.cells.iter().filter(|c| **c == Cell::Food).count() as u64
    }

    /// Cell ahead of `pose`, or `None` when it lies off the grid.
    pub fn ahead(&self, pose: AgentPose) -> Option<Position> {
        let (dx, dy) = pose.heading.offset();
        let x = pose.position.x as i64 + dx;
        let y = pose.position.y as i64 + dy;
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            None
        } else {
            Some(Position::new(x as usize, y as usize))
        }
    }

    /// Pose reached from `pose` by `action`, and whether the action succeeded.
    /// Pure: the grid is not modified.
    pub fn resolve(&self, pose: AgentPose, action: Action) -> (AgentPose, bool) {
        match action {
            Action::TurnLeft => (AgentPose { heading: pose.heading.turn_left(), ..pose }, true),
            Action::TurnRight => (AgentPose { heading: pose.heading.turn_right(), ..pose }, true),
            Action::Step => match self.ahead(pose) {
                Some(p) if self.cell(p).is_free() => (AgentPose { position: p, ..pose }, true),
                _ => (pose, false),
            },
        }
    }

    /// Performs `action` for the agent, consuming food on arrival.
    pub fn attempt_action(&mut self, action: Action) -> ActionOutcome {
        let (new_pose, succeeded) = self.resolve(self.pose, action);
        let mut ate_food = false;
        if succeeded && action == Action::Step && self.cell(new_pose.position) == Cell::Food {
            self.set_cell(new_pose.position, Cell::Empty);
            self.food.eaten += 1;
            ate_food = true;
        }
        self.pose = new_pose;
        ActionOutcome { action, succeeded, ate_food, new_pose }
    }

    /// Turns up to `count` empty cells (never the agent's own) into food,
    /// chosen uniformly without replacement. Returns the number placed.
    pub fn place_food<R: rand::Rng + ?Sized>(&mut self, count: usize, rng: &mut R) -> usize {
        self.food.requested += count as u64;
        if count == 0 {
            return 0;
        }
        let candidates: Vec<Position> = self
            .positions()
            .filter(|p| *p != self.pose.position && self.cell(*p) == Cell::Empty)
            .collect();
        let k = count.min(candidates.len());
        self.food.skipped += (count - k) as u64;
        if k == 0 {
            return 0;
        }
        let mut chosen = index::sample(rng, candidates.len(), k).into_vec();
        chosen.sort_unstable();
        for i in chosen {
            self.set_cell(candidates[i], Cell::Food);
        }
        k
    }

    /// Positions within `delta` of the agent, with their current cells.
    pub fn visible_states(&self, delta: f64, norm: DistanceNorm) -> Vec<(Position, Cell)> {
        let center = self.pose.position;
        self.positions()
            .filter(|p| norm.within(center, *p, delta))
            .map(|p| (p, self.cell(p)))
            .collect()
    }

    /// Length of the grid diagonal; any larger scope sees the whole maze.
    pub fn diagonal(&self) -> f64 {
        ((self.width * self.width + self.height * self.height) as f64).sqrt()
    }

    /// ASCII snapshot in the maze file format.
    pub fn render(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                let p = Position::new(x, y);
                let ch = if p == self.pose.position {
                    self.pose.heading.marker()
                } else {
                    match self.cell(p) {
                        Cell::Empty => '.',
                        Cell::Obstacle => '#',
                        Cell::Food => 'F',
                    }
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }
}

/// A maze bound to its configuration and its own food RNG stream.
#[derive(Debug, Clone)]
pub struct Environment {
    pub state: MazeState,
    pub config: EnvConfig,
    rng: ChaCha8Rng,
}

impl Environment {
    /// Seeds the food stream from `config.seed` and places the initial food.
    pub fn new(mut state: MazeState, config: EnvConfig) -> Result<Self, EnvError> {
        config.validate()?;
        state.rng_seed = config.seed;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        state.place_food(config.initial_food, &mut rng);
        Ok(Self { state, config, rng })
    }

    pub fn tick(&self) -> u64 {
        self.state.tick
    }

    pub fn finished(&self) -> bool {
        self.state.tick >= self.config.trial_length
    }

    pub fn attempt_action(&mut self, action: Action) -> ActionOutcome {
        self.state.attempt_action(action)
    }

    /// Advances the clock one tick, replenishing food on schedule.
    pub fn tick_environment(&mut self) -> Result<(), EnvError> {
        if self.finished() {
            return Err(EnvError::TrialExhausted {
                tick: self.state.tick,
                trial_length: self.config.trial_length,
            });
        }
        self.state.tick += 1;
        if self.state.tick.is_multiple_of(self.config.replenish_interval) {
            self.state.place_food(self.config.replenish_count, &mut self.rng);
        }
        Ok(())
    }

    /// Food the schedule predicts for the current tick.
    pub fn scheduled_food(&self) -> u64 {
        let c = &self.config;
        let ledger = &self.state.food;
        ledger.preplaced + c.initial_food as u64
            + c.replenish_count as u64 * (self.state.tick / c.replenish_interval)
            - ledger.eaten
            - ledger.skipped
    }

    /// Food conservation: grid count, ledger and schedule all agree.
    pub fn food_conserved(&self) -> bool {
        let on_grid = self.state.food_count();
        on_grid == self.state.food.expected_on_grid() && on_grid == self.scheduled_food()
    }
}
