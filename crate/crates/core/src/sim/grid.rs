//! Uniform-grid neighbour search for communication-range contacts.

/// A robot pair `(a, b)` with `a < b`.
pub type Pair = (u32, u32);

/// Reusable bucket storage for [`detect_encounters`].
#[derive(Debug, Default, Clone)]
pub struct Grid {
    cell_start: Vec<u32>,
    fill: Vec<u32>,
    cell_of: Vec<(u32, u32)>,
    sorted: Vec<u32>,
}

impl Grid {
    /// Fills `out` with every pair whose Euclidean distance is strictly below
    /// `range`, sorted ascending.
    pub fn pairs_within(&mut self, positions: &[(f64, f64)], range: f64, out: &mut Vec<Pair>) {
        out.clear();
        let n = positions.len();
        if n < 2 || !(range > 0.0) {
            return;
        }
        let extent = positions.iter().fold(0.0f64, |m, &(x, y)| m.max(x).max(y));
        let cells = ((extent / range).floor() as usize + 1).min(1024);
        let cell_size = range.max(extent / cells as f64);
        let index = |v: f64| ((v / cell_size).floor().max(0.0) as usize).min(cells - 1);

        // counting sort of robots by cell
        self.cell_start.clear();
        self.cell_start.resize(cells * cells + 1, 0);
        self.cell_of.clear();
        for &(x, y) in positions {
            let (cx, cy) = (index(x), index(y));
            self.cell_of.push((cx as u32, cy as u32));
            self.cell_start[cy * cells + cx + 1] += 1;
        }
        for c in 0..cells * cells {
            self.cell_start[c + 1] += self.cell_start[c];
        }
        self.sorted.clear();
        self.sorted.resize(n, 0);
        self.fill.clear();
        self.fill.extend_from_slice(&self.cell_start);
        for (i, &(cx, cy)) in self.cell_of.iter().enumerate() {
            let c = cy as usize * cells + cx as usize;
            self.sorted[self.fill[c] as usize] = i as u32;
            self.fill[c] += 1;
        }

        let r2 = range * range;
        for (i, &(cx, cy)) in self.cell_of.iter().enumerate() {
            let (xi, yi) = positions[i];
            let (x_lo, x_hi) = (
                cx.saturating_sub(1) as usize,
                (cx as usize + 1).min(cells - 1),
            );
            let (y_lo, y_hi) = (
                cy.saturating_sub(1) as usize,
                (cy as usize + 1).min(cells - 1),
            );
            for ny in y_lo..=y_hi {
                let row = ny * cells;
                let bucket = &self.sorted[self.cell_start[row + x_lo] as usize
                    ..self.cell_start[row + x_hi + 1] as usize];
                for &j in bucket {
                    if (j as usize) <= i {
                        continue;
                    }
                    let (xj, yj) = positions[j as usize];
                    let (dx, dy) = (xi - xj, yi - yj);
                    if dx * dx + dy * dy < r2 {
                        out.push((i as u32, j));
                    }
                }
            }
        }
        out.sort_unstable();
    }
}

/// All pairs `(a, b)`, `a < b`, at distance strictly below `range`, found with
/// a uniform grid of cell size `range`.
pub fn detect_encounters(positions: &[(f64, f64)], range: f64) -> Vec<Pair> {
    let mut out = Vec::new();
    Grid::default().pairs_within(positions, range, &mut out);
    out
}

/// O(N²) reference enumeration.
pub fn detect_encounters_brute(positions: &[(f64, f64)], range: f64) -> Vec<Pair> {
    let r2 = range * range;
    let mut out = Vec::new();
    for (i, &(xi, yi)) in positions.iter().enumerate() {
        for (j, &(xj, yj)) in positions.iter().enumerate().skip(i + 1) {
            let (dx, dy) = (xi - xj, yi - yj);
            if dx * dx + dy * dy < r2 {
                out.push((i as u32, j as u32));
            }
        }
    }
    out
}
