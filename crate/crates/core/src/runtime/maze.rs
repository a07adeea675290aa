// SPDX-License-Identifier: Apache-2.0

//! Grid maze world: `#` wall, `.` open, `S` start, `E` exit. Sensors report walls on the
//! absolute left/up/right/down neighbours; the robot body never rotates.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Device, RuntimeError};
use crate::synth::Values;
use crate::techmap::MassSpringNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    Left,
    Up,
    Right,
    Down,
}

impl Dir {
    pub fn delta(self) -> (i64, i64) {
        match self {
            Dir::Left => (-1, 0),
            Dir::Up => (0, -1),
            Dir::Right => (1, 0),
            Dir::Down => (0, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dir::Left => "LEFT",
            Dir::Up => "UP",
            Dir::Right => "RIGHT",
            Dir::Down => "DOWN",
        }
    }

    pub fn from_label(label: &str) -> Option<Dir> {
        match label.to_ascii_uppercase().as_str() {
            "LEFT" => Some(Dir::Left),
            "UP" | "FRONT" | "FORWARD" => Some(Dir::Up),
            "RIGHT" => Some(Dir::Right),
            "DOWN" | "BACK" => Some(Dir::Down),
            _ => None,
        }
    }
}

/// Wall presence around a cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WallSensors {
    pub left: bool,
    pub up: bool,
    pub right: bool,
    pub down: bool,
}

impl WallSensors {
    pub fn wall(&self, d: Dir) -> bool {
        match d {
            Dir::Left => self.left,
            Dir::Up => self.up,
            Dir::Right => self.right,
            Dir::Down => self.down,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazeWorld {
    pub width: usize,
    pub height: usize,
    open: Vec<bool>,
    pub start: (usize, usize),
    /// Worlds without an exit are allowed; no run can solve them.
    pub exit: Option<(usize, usize)>,
}

impl MazeWorld {
    pub fn parse(text: &str) -> Result<Self, RuntimeError> {
        let rows: Vec<&str> = text
            .lines()
            .map(str::trim_end)
            .filter(|l| !l.is_empty() && !l.starts_with("//"))
            .collect();
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        if height == 0 || width == 0 {
            return Err(RuntimeError::Maze("empty maze".into()));
        }
        let mut open = Vec::with_capacity(width * height);
        let (mut start, mut exit) = (None, None);
        for (y, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(RuntimeError::Maze(format!("row {} has a different width", y + 1)));
            }
            for (x, ch) in row.chars().enumerate() {
                let cell = match ch {
                    '#' => false,
                    '.' => true,
                    'S' if start.is_none() => {
                        start = Some((x, y));
                        true
                    }
                    'E' if exit.is_none() => {
                        exit = Some((x, y));
                        true
                    }
                    'S' | 'E' => return Err(RuntimeError::Maze(format!("more than one `{ch}`"))),
                    other => return Err(RuntimeError::Maze(format!("unexpected character `{other}`"))),
                };
                open.push(cell);
            }
        }
        let start = start.ok_or_else(|| RuntimeError::Maze("no start `S`".into()))?;
        let world = MazeWorld {
            width,
            height,
            open,
            start,
            exit,
        };
        for y in 0..height {
            for x in 0..width {
                let border = x == 0 || y == 0 || x + 1 == width || y + 1 == height;
                if border && world.is_open(x as i64, y as i64) && Some((x, y)) != exit {
                    return Err(RuntimeError::Maze(format!("perimeter is open at ({x}, {y})")));
                }
            }
        }
        Ok(world)
    }

    pub fn is_open(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.open[y as usize * self.width + x as usize]
    }

    pub fn sensors(&self, (x, y): (usize, usize)) -> WallSensors {
        let wall = |d: Dir| {
            let (dx, dy) = d.delta();
            !self.is_open(x as i64 + dx, y as i64 + dy)
        };
        WallSensors {
            left: wall(Dir::Left),
            up: wall(Dir::Up),
            right: wall(Dir::Right),
            down: wall(Dir::Down),
        }
    }

    /// True when the open cells form a forest (no cycles).
    pub fn is_loop_free(&self) -> bool {
        let idx = |x: usize, y: usize| y * self.width + x;
        let mut nodes = 0;
        let mut edges = 0;
        for y in 0..self.height {
            for x in 0..self.width {
                if !self.open[idx(x, y)] {
                    continue;
                }
                nodes += 1;
                edges += usize::from(self.is_open(x as i64 + 1, y as i64));
                edges += usize::from(self.is_open(x as i64, y as i64 + 1));
            }
        }
        let mut seen = vec![false; self.open.len()];
        let mut components = 0;
        for s in 0..self.open.len() {
            if !self.open[s] || seen[s] {
                continue;
            }
            components += 1;
            let mut queue = VecDeque::from([s]);
            seen[s] = true;
            while let Some(c) = queue.pop_front() {
                let (x, y) = ((c % self.width) as i64, (c / self.width) as i64);
                for d in [Dir::Left, Dir::Up, Dir::Right, Dir::Down] {
                    let (nx, ny) = (x + d.delta().0, y + d.delta().1);
                    if self.is_open(nx, ny) {
                        let n = ny as usize * self.width + nx as usize;
                        if !seen[n] {
                            seen[n] = true;
                            queue.push_back(n);
                        }
                    }
                }
            }
        }
        edges + components == nodes
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for y in 0..self.height {
            for x in 0..self.width {
                s.push(if (x, y) == self.start {
                    'S'
                } else if Some((x, y)) == self.exit {
                    'E'
                } else if self.open[y * self.width + x] {
                    '.'
                } else {
                    '#'
                });
            }
            s.push('\n');
        }
        s
    }
}

/// A loop-free maze of `w` x `h` rooms on a (2w+1) x (2h+1) character grid, carved by a
/// seeded depth-first search. Start in the top-left room; exit through the right wall of
/// the bottom-right room.
pub fn generate_maze(w: usize, h: usize, seed: u64) -> MazeWorld {
    assert!(w >= 1 && h >= 1);
    let (width, height) = (2 * w + 1, 2 * h + 1);
    let mut open = vec![false; width * height];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut visited = vec![false; w * h];
    let mut stack = vec![(0usize, 0usize)];
    visited[0] = true;
    open[width + 1] = true;
    while let Some(&(cx, cy)) = stack.last() {
        let mut dirs = [Dir::Left, Dir::Up, Dir::Right, Dir::Down];
        dirs.shuffle(&mut rng);
        let next = dirs.iter().find_map(|d| {
            let (dx, dy) = d.delta();
            let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
            (nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h && !visited[ny as usize * w + nx as usize])
                .then_some((nx as usize, ny as usize))
        });
        match next {
            Some((nx, ny)) => {
                visited[ny * w + nx] = true;
                let (gx, gy) = (2 * nx + 1, 2 * ny + 1);
                open[gy * width + gx] = true;
                open[(cy + ny + 1) * width + (cx + nx + 1)] = true;
                stack.push((nx, ny));
            }
            None => {
                stack.pop();
            }
        }
    }
    let exit = (width - 1, height - 2);
    open[exit.1 * width + exit.0] = true;
    let exit = Some(exit);
    MazeWorld {
        width,
        height,
        open,
        start: (1, 1),
        exit,
    }
}

/// Which ports carry the four wall sensors and the direction actuator, and how actuator
/// codes decode to directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazeBindings {
    pub left: String,
    pub up: String,
    pub right: String,
    pub down: String,
    pub actuator: String,
    pub codes: Vec<(u64, Dir)>,
}

impl MazeBindings {
    /// Matches sensors by name (`LEFT`, `FRONT`/`UP`, `RIGHT`, `BACK`/`DOWN`) and takes the
    /// single actuator whose value map labels directions.
    pub fn from_network(net: &MassSpringNetwork) -> Result<Self, RuntimeError> {
        let mut names: Vec<&str> = net.sensors.iter().map(|b| b.name.as_str()).collect();
        names.dedup();
        let pick = |keys: &[&str]| -> Result<String, RuntimeError> {
            let hits: Vec<&&str> = names
                .iter()
                .filter(|n| keys.iter().any(|k| n.to_ascii_uppercase().contains(k)))
                .collect();
            match hits.as_slice() {
                [one] => Ok(one.to_string()),
                _ => Err(RuntimeError::Maze(format!("cannot identify the {} sensor", keys[0]))),
            }
        };
        let map = net
            .value_maps
            .iter()
            .find(|m| {
                net.actuators.iter().any(|a| a.name == m.name)
                    && m.entries.iter().any(|(_, l)| Dir::from_label(l).is_some())
            })
            .ok_or_else(|| RuntimeError::Maze("no actuator with direction labels".into()))?;
        let codes = map
            .entries
            .iter()
            .filter_map(|(c, l)| Dir::from_label(l).map(|d| (*c, d)))
            .collect();
        Ok(MazeBindings {
            left: pick(&["LEFT"])?,
            up: pick(&["FRONT", "UP"])?,
            right: pick(&["RIGHT"])?,
            down: pick(&["BACK", "DOWN"])?,
            actuator: map.name.clone(),
            codes,
        })
    }

    pub fn inputs(&self, s: &WallSensors) -> Values {
        [
            (&self.left, s.left),
            (&self.up, s.up),
            (&self.right, s.right),
            (&self.down, s.down),
        ]
        .into_iter()
        .map(|(n, w)| (n.clone(), u64::from(w)))
        .collect()
    }

    pub fn decode(&self, code: u64) -> Option<Dir> {
        self.codes.iter().find(|(c, _)| *c == code).map(|(_, d)| *d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazeStep {
    pub tick: usize,
    /// Sensors read before the tick.
    pub sensors: WallSensors,
    /// Direction latched at the tick.
    pub dir: Dir,
    /// Position after the move.
    pub pos: (usize, usize),
    pub blocked: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazeRun {
    pub steps: Vec<MazeStep>,
    pub solved: bool,
}

impl MazeRun {
    pub fn blocked_moves(&self) -> usize {
        self.steps.iter().filter(|s| s.blocked).count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("tick,x,y,direction,sensor_left,sensor_up,sensor_right,sensor_down,blocked\n");
        for st in &self.steps {
            let b = |v: bool| u8::from(v);
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                st.tick,
                st.pos.0,
                st.pos.1,
                st.dir.name(),
                b(st.sensors.left),
                b(st.sensors.up),
                b(st.sensors.right),
                b(st.sensors.down),
                b(st.blocked)
            );
        }
        s
    }
}

fn walk(
    world: &MazeWorld,
    max_steps: usize,
    mut next: impl FnMut(&WallSensors) -> Result<Dir, RuntimeError>,
) -> Result<MazeRun, RuntimeError> {
    let mut pos = world.start;
    let mut steps = Vec::new();
    for tick in 0..max_steps {
        if Some(pos) == world.exit {
            break;
        }
        let sensors = world.sensors(pos);
        let dir = next(&sensors)?;
        let (dx, dy) = dir.delta();
        let (nx, ny) = (pos.0 as i64 + dx, pos.1 as i64 + dy);
        let blocked = !world.is_open(nx, ny);
        if !blocked {
            pos = (nx as usize, ny as usize);
        }
        steps.push(MazeStep {
            tick,
            sensors,
            dir,
            pos,
            blocked,
        });
    }
    Ok(MazeRun {
        steps,
        solved: Some(pos) == world.exit,
    })
}

/// Closed loop: each tick presents the current wall contacts, lets the device latch its
/// next direction, and moves the robot one cell that way.
pub fn run_maze(
    device: &mut dyn Device,
    world: &MazeWorld,
    bind: &MazeBindings,
    max_steps: usize,
) -> Result<MazeRun, RuntimeError> {
    walk(world, max_steps, |s| {
        let out = device.tick(&bind.inputs(s))?;
        let code = *out
            .outputs
            .get(&bind.actuator)
            .ok_or_else(|| RuntimeError::Device(format!("no output `{}`", bind.actuator)))?;
        bind.decode(code)
            .ok_or_else(|| RuntimeError::Device(format!("actuator code {code} has no direction")))
    })
}

/// Left-hand wall follower. For each heading, the first open side in this order wins;
/// with every side walled the last entry is taken.
pub fn reference_next(dir: Dir, s: &WallSensors) -> Dir {
    use Dir::*;
    let order = match dir {
        Left => [Down, Left, Up, Right],
        Up => [Left, Up, Right, Down],
        Right => [Up, Right, Down, Left],
        Down => [Right, Down, Left, Up],
    };
    order[..3].iter().copied().find(|d| !s.wall(*d)).unwrap_or(order[3])
}

/// The software FSM on the same world, starting from heading LEFT.
pub fn reference_maze_run(world: &MazeWorld, max_steps: usize) -> MazeRun {
    let mut dir = Dir::Left;
    walk(world, max_steps, |s| {
        dir = reference_next(dir, s);
        Ok(dir)
    })
    .expect("reference never fails")
}
