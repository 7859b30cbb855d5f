//! 2D cell traversal in continuous cell coordinates, where cell
//! `(row, col)` spans `[col, col + 1) x [row, row + 1)`.

/// Cells crossed by the segment `from -> to`, in order, clipped to the grid.
pub fn line_cells(from: [f64; 2], to: [f64; 2], rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    walk(from, to, rows, cols, |r, c, _| {
        out.push((r, c));
        true
    });
    out
}

/// Walks cells along `from -> to`. `visit(row, col, t)` gets the cell and the
/// distance along the segment where it was entered; returning false stops.
pub fn walk<F: FnMut(usize, usize, f64) -> bool>(
    from: [f64; 2],
    to: [f64; 2],
    rows: usize,
    cols: usize,
    mut visit: F,
) {
    let d = [to[0] - from[0], to[1] - from[1]];
    let len = d[0].hypot(d[1]);
    let dims = [cols as i64, rows as i64];
    let mut idx = [from[0].floor() as i64, from[1].floor() as i64];
    if idx[0] < 0 || idx[1] < 0 || idx[0] >= dims[0] || idx[1] >= dims[1] {
        return;
    }
    if len == 0.0 {
        visit(idx[1] as usize, idx[0] as usize, 0.0);
        return;
    }
    let u = [d[0] / len, d[1] / len];
    let mut step = [0i64; 2];
    let mut t_max = [f64::INFINITY; 2];
    let mut t_delta = [f64::INFINITY; 2];
    for a in 0..2 {
        if u[a] > 0.0 {
            step[a] = 1;
            t_max[a] = ((idx[a] + 1) as f64 - from[a]) / u[a];
            t_delta[a] = 1.0 / u[a];
        } else if u[a] < 0.0 {
            step[a] = -1;
            t_max[a] = (idx[a] as f64 - from[a]) / u[a];
            t_delta[a] = -1.0 / u[a];
        }
    }
    let mut t = 0.0;
    loop {
        if !visit(idx[1] as usize, idx[0] as usize, t) {
            return;
        }
        let a = if t_max[0] < t_max[1] { 0 } else { 1 };
        t = t_max[a];
        if t >= len {
            return;
        }
        idx[a] += step[a];
        t_max[a] += t_delta[a];
        if idx[a] < 0 || idx[a] >= dims[a] {
            return;
        }
    }
}
