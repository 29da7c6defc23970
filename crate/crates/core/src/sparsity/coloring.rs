use serde::{Deserialize, Serialize};

use super::pattern::SparsityPattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColorAxis {
    Columns,
    Rows,
}

/// Color assignment for the columns or rows of a pattern. Colors are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub axis: ColorAxis,
    pub color_of: Vec<usize>,
    pub num_colors: usize,
}

impl Coloring {
    /// Indices carrying color `c`, ascending.
    pub fn class(&self, c: usize) -> Vec<usize> {
        (0..self.color_of.len())
            .filter(|&i| self.color_of[i] == c)
            .collect()
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_colors];
        for (i, &c) in self.color_of.iter().enumerate() {
            out[c - 1].push(i);
        }
        out
    }

    /// True when no two same-colored columns (rows) share a structural
    /// row (column).
    pub fn is_valid_for(&self, pattern: &SparsityPattern) -> bool {
        let groups = match self.axis {
            ColorAxis::Columns => pattern.rows(),
            ColorAxis::Rows => pattern.columns(),
        };
        let expected = match self.axis {
            ColorAxis::Columns => pattern.n_cols(),
            ColorAxis::Rows => pattern.n_rows(),
        };
        if self.color_of.len() != expected
            || self.color_of.iter().any(|&c| c == 0 || c > self.num_colors)
        {
            return false;
        }
        groups.iter().all(|members| {
            let mut seen = vec![false; self.num_colors + 1];
            members
                .iter()
                .all(|&k| !std::mem::replace(&mut seen[self.color_of[k]], true))
        })
    }
}

/// Greedy distance-1 coloring of the column (or row) intersection graph in
/// natural index order, assigning the smallest feasible color.
pub fn color_greedy(pattern: &SparsityPattern, axis: ColorAxis) -> Coloring {
    // `owners[k]` lists the items (columns or rows) touching shared index k.
    let (items, owners) = match axis {
        ColorAxis::Columns => (pattern.columns(), pattern.rows()),
        ColorAxis::Rows => (pattern.rows(), pattern.columns()),
    };
    let mut color_of = vec![0usize; items.len()];
    let mut forbidden: Vec<usize> = Vec::new();
    let mut num_colors = 0;
    for (item, shared) in items.iter().enumerate() {
        for &k in shared {
            for &other in &owners[k] {
                let c = color_of[other];
                if c > 0 {
                    if forbidden.len() <= c {
                        forbidden.resize(c + 1, usize::MAX);
                    }
                    forbidden[c] = item;
                }
            }
        }
        let mut c = 1;
        while c < forbidden.len() && forbidden[c] == item {
            c += 1;
        }
        color_of[item] = c;
        num_colors = num_colors.max(c);
    }
    Coloring {
        axis,
        color_of,
        num_colors: num_colors.max(1),
    }
}
