//! Uniform boundary grids, half-space level stacks, sampling, restriction and
//! the CSV exchange format.
//!
//! The boundary `R^{n-1}` is truncated to `[-L, L]^{n-1}` and sampled on the
//! lattice `h Z^{n-1}`; half-space fields are stacks of boundary slices at
//! increasing heights `x_n`.

use std::io::{BufRead, Write};

use crate::error::{out_of_range, Error, Result};

/// Default cap on boundary nodes for any grid.
pub const DEFAULT_NODE_CAP: usize = 1 << 22;

/// Uniform tensor grid on `[-L, L]^dim`, `dim ∈ {1, 2}`.
///
/// Nodes are numbered with axis 0 fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    dim: usize,
    half_extent: f64,
    spacing: f64,
    half_count: usize,
    node_cap: usize,
}

impl BoundaryGrid {
    pub fn new(dim: usize, half_extent: f64, spacing: f64) -> Result<Self> {
        Self::with_cap(dim, half_extent, spacing, DEFAULT_NODE_CAP)
    }

    pub fn with_cap(dim: usize, half_extent: f64, spacing: f64, node_cap: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return out_of_range(format!("boundary dimension must be 1 or 2, got {dim}"));
        }
        if !(half_extent > 0.0 && spacing > 0.0 && half_extent.is_finite()) {
            return out_of_range(format!("need L > 0 and h > 0, got L={half_extent}, h={spacing}"));
        }
        let ratio = half_extent / spacing;
        if ratio > 1e12 {
            return Err(Error::NodeCap { count: usize::MAX, cap: node_cap });
        }
        let m = ratio.round();
        if m < 1.0 || (m - ratio).abs() > 1e-9 * ratio.max(1.0) {
            return out_of_range(format!("L/h must be a positive integer, got {ratio}"));
        }
        let half_count = m as usize;
        let per_axis = 2 * half_count + 1;
        let count = per_axis
            .checked_pow(dim as u32)
            .ok_or(Error::NodeCap { count: usize::MAX, cap: node_cap })?;
        if count > node_cap {
            return Err(Error::NodeCap { count, cap: node_cap });
        }
        Ok(Self {
            dim,
            half_extent,
            spacing,
            half_count,
            node_cap,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Ambient dimension `n = dim + 1`.
    pub fn ambient_dim(&self) -> usize {
        self.dim + 1
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn node_cap(&self) -> usize {
        self.node_cap
    }

    pub fn per_axis(&self) -> usize {
        2 * self.half_count + 1
    }

    /// Number of nodes `(2L/h + 1)^dim`.
    pub fn len(&self) -> usize {
        self.per_axis().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of lattice index `k` along any axis.
    #[inline]
    pub fn axis_coord(&self, k: usize) -> f64 {
        (k as f64 - self.half_count as f64) * self.spacing
    }

    /// Per-axis lattice indices of a node.
    #[inline]
    pub fn multi_index(&self, node: usize) -> [usize; 2] {
        let m = self.per_axis();
        match self.dim {
            1 => [node, 0],
            _ => [node % m, node / m],
        }
    }

    #[inline]
    pub fn node_from_multi(&self, idx: [usize; 2]) -> usize {
        match self.dim {
            1 => idx[0],
            _ => idx[0] + self.per_axis() * idx[1],
        }
    }

    /// Coordinates of a node; the unused slot is zero when `dim == 1`.
    #[inline]
    pub fn point(&self, node: usize) -> [f64; 2] {
        let [a, b] = self.multi_index(node);
        match self.dim {
            1 => [self.axis_coord(a), 0.0],
            _ => [self.axis_coord(a), self.axis_coord(b)],
        }
    }

    /// Composite-trapezoid weight of a node.
    pub fn weight(&self, node: usize) -> f64 {
        let last = self.per_axis() - 1;
        let axis_w = |k: usize| {
            if k == 0 || k == last {
                0.5 * self.spacing
            } else {
                self.spacing
            }
        };
        let [a, b] = self.multi_index(node);
        match self.dim {
            1 => axis_w(a),
            _ => axis_w(a) * axis_w(b),
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    /// Volume `h^dim` of one lattice cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Node at the given coordinates, if the point is a lattice node.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let mut idx = [0usize; 2];
        for (axis, slot) in idx.iter_mut().enumerate().take(self.dim) {
            let k = x[axis] / self.spacing + self.half_count as f64;
            let kr = k.round();
            if (k - kr).abs() > 1e-9 || kr < 0.0 || kr as usize >= self.per_axis() {
                return None;
            }
            *slot = kr as usize;
        }
        Some(self.node_from_multi(idx))
    }

    /// Same extent with spacing `h / factor`.
    pub fn refine(&self, factor: usize) -> Result<BoundaryGrid> {
        if factor == 0 {
            return out_of_range("refinement factor must be positive");
        }
        let per_axis = (2 * self.half_count)
            .checked_mul(factor)
            .and_then(|v| v.checked_add(1))
            .ok_or(Error::NodeCap { count: usize::MAX, cap: self.node_cap })?;
        let count = per_axis
            .checked_pow(self.dim as u32)
            .ok_or(Error::NodeCap { count: usize::MAX, cap: self.node_cap })?;
        if count > self.node_cap {
            return Err(Error::NodeCap { count, cap: self.node_cap });
        }
        Ok(BoundaryGrid {
            dim: self.dim,
            half_extent: self.half_extent,
            spacing: self.spacing / factor as f64,
            half_count: self.half_count * factor,
            node_cap: self.node_cap,
        })
    }
}

/// Samples on a [`BoundaryGrid`], possibly vector valued.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGridFunction {
    grid: BoundaryGrid,
    components: usize,
    values: Vec<f64>,
    /// Height the samples were taken at when produced by restriction.
    level: Option<f64>,
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(node) => Err(Error::NonFinite { node, value: values[node] }),
        None => Ok(()),
    }
}

impl BoundaryGridFunction {
    pub fn new(grid: BoundaryGrid, values: Vec<f64>) -> Result<Self> {
        Self::with_components(grid, 1, values)
    }

    pub fn with_components(grid: BoundaryGrid, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 || values.len() != grid.len() * components {
            return out_of_range(format!(
                "expected {} values, got {}",
                grid.len() * components.max(1),
                values.len()
            ));
        }
        check_finite(&values)?;
        Ok(Self {
            grid,
            components,
            values,
            level: None,
        })
    }

    pub fn zeros(grid: BoundaryGrid) -> Self {
        let len = grid.len();
        Self {
            grid,
            components: 1,
            values: vec![0.0; len],
            level: None,
        }
    }

    pub fn grid(&self) -> &BoundaryGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn level(&self) -> Option<f64> {
        self.level
    }

    /// Value of a scalar function (first component otherwise).
    #[inline]
    pub fn value(&self, node: usize) -> f64 {
        self.values[node * self.components]
    }

    #[inline]
    pub fn node_values(&self, node: usize) -> &[f64] {
        &self.values[node * self.components..(node + 1) * self.components]
    }

    /// Euclidean magnitude at a node.
    #[inline]
    pub fn magnitude(&self, node: usize) -> f64 {
        if self.components == 1 {
            self.values[node].abs()
        } else {
            self.node_values(node).iter().map(|v| v * v).sum::<f64>().sqrt()
        }
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.grid.len()).map(|i| self.magnitude(i)).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = self.values.iter().map(|&v| f(v)).collect();
        let mut out = Self::with_components(self.grid.clone(), self.components, values)?;
        out.level = self.level;
        Ok(out)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            components: self.components,
            values: self.values.iter().map(|v| c * v).collect(),
            level: self.level,
        }
    }

    /// Pointwise combination with another function on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid || self.components != other.components {
            return out_of_range("functions live on different grids");
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::with_components(self.grid.clone(), self.components, values)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }
}

/// Samples on `grid × levels`, level-major, components innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpaceField {
    grid: BoundaryGrid,
    levels: Vec<f64>,
    components: usize,
    values: Vec<f64>,
}

fn check_levels(levels: &[f64]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::Empty("level set".into()));
    }
    for (k, &t) in levels.iter().enumerate() {
        if !t.is_finite() || t < 0.0 || (t == 0.0 && k > 0) {
            return out_of_range(format!("level {k} = {t} must be positive (0 allowed only first)"));
        }
        if k > 0 && t <= levels[k - 1] {
            return out_of_range("levels must be strictly increasing");
        }
    }
    Ok(())
}

impl HalfSpaceField {
    pub fn new(grid: BoundaryGrid, levels: Vec<f64>, components: usize, values: Vec<f64>) -> Result<Self> {
        check_levels(&levels)?;
        if components == 0 || values.len() != grid.len() * levels.len() * components {
            return out_of_range(format!(
                "expected {} values, got {}",
                grid.len() * levels.len() * components.max(1),
                values.len()
            ));
        }
        check_finite(&values)?;
        Ok(Self {
            grid,
            levels,
            components,
            values,
        })
    }

    /// Scalar field from slices, one per level.
    pub fn from_slices(grid: BoundaryGrid, levels: Vec<f64>, slices: Vec<Vec<f64>>) -> Result<Self> {
        let values = slices.into_iter().flatten().collect();
        Self::new(grid, levels, 1, values)
    }

    pub fn grid(&self) -> &BoundaryGrid {
        &self.grid
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn slice_len(&self) -> usize {
        self.grid.len() * self.components
    }

    /// Samples of level `k`.
    pub fn slice(&self, k: usize) -> &[f64] {
        let n = self.slice_len();
        &self.values[k * n..(k + 1) * n]
    }

    #[inline]
    pub fn at(&self, level: usize, node: usize, component: usize) -> f64 {
        self.values[(level * self.grid.len() + node) * self.components + component]
    }

    #[inline]
    pub fn node_values(&self, level: usize, node: usize) -> &[f64] {
        let start = (level * self.grid.len() + node) * self.components;
        &self.values[start..start + self.components]
    }

    #[inline]
    pub fn magnitude(&self, level: usize, node: usize) -> f64 {
        if self.components == 1 {
            self.values[level * self.grid.len() + node].abs()
        } else {
            self.node_values(level, node).iter().map(|v| v * v).sum::<f64>().sqrt()
        }
    }

    /// Slice `k` as a boundary function tagged with its height.
    pub fn level_function(&self, k: usize) -> BoundaryGridFunction {
        BoundaryGridFunction {
            grid: self.grid.clone(),
            components: self.components,
            values: self.slice(k).to_vec(),
            level: Some(self.levels[k]),
        }
    }

    pub fn max_abs(&self) -> f64 {
        let nodes = self.grid.len();
        (0..self.levels.len())
            .flat_map(|k| (0..nodes).map(move |i| (k, i)))
            .map(|(k, i)| self.magnitude(k, i))
            .fold(0.0, f64::max)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid || self.levels != other.levels || self.components != other.components {
            return out_of_range("fields live on different grids");
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid.clone(), self.levels.clone(), self.components, values)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            levels: self.levels.clone(),
            components: self.components,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

/// Heights `x_n` at which half-space fields are sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelSchedule {
    /// `first · ratio^k` up to `top`.
    Geometric { first: f64, ratio: f64, top: f64 },
    /// `spacing · k` up to `top`, starting at 0 or at `spacing`.
    Uniform { spacing: f64, top: f64, include_zero: bool },
}

impl LevelSchedule {
    pub fn levels(&self) -> Result<Vec<f64>> {
        let out: Vec<f64> = match *self {
            LevelSchedule::Geometric { first, ratio, top } => {
                if !(first > 0.0 && ratio > 1.0 && top >= first) {
                    return out_of_range("geometric levels need first > 0, ratio > 1, top >= first");
                }
                let count = ((top / first).ln() / ratio.ln() + 1e-9).floor() as usize + 1;
                (0..count).map(|k| first * ratio.powi(k as i32)).collect()
            }
            LevelSchedule::Uniform { spacing, top, include_zero } => {
                if !(spacing > 0.0 && top >= spacing) {
                    return out_of_range("uniform levels need spacing > 0 and top >= spacing");
                }
                let count = (top / spacing + 1e-9).floor() as usize;
                let start = if include_zero { 0 } else { 1 };
                (start..=count).map(|k| k as f64 * spacing).collect()
            }
        };
        check_levels(&out)?;
        Ok(out)
    }
}

/// Pointwise samples of `f` at the grid nodes.
pub fn sample_boundary<F>(f: F, grid: &BoundaryGrid) -> Result<BoundaryGridFunction>
where
    F: Fn(&[f64]) -> f64,
{
    let dim = grid.dim();
    let values = (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            f(&x[..dim])
        })
        .collect();
    BoundaryGridFunction::new(grid.clone(), values)
}

/// Pointwise samples of `f(x', x_n)` on `grid × levels`.
pub fn sample_half_space<F>(f: F, grid: &BoundaryGrid, levels: &[f64]) -> Result<HalfSpaceField>
where
    F: Fn(&[f64], f64) -> f64,
{
    let dim = grid.dim();
    let mut values = Vec::with_capacity(grid.len() * levels.len());
    for &t in levels {
        for i in 0..grid.len() {
            let x = grid.point(i);
            values.push(f(&x[..dim], t));
        }
    }
    HalfSpaceField::new(grid.clone(), levels.to_vec(), 1, values)
}

/// Discrete trace by restriction: the slice at `x_n = 0` if sampled, else the
/// lowest slice. The height used is recorded in [`BoundaryGridFunction::level`].
pub fn restrict_to_boundary(u: &HalfSpaceField) -> Result<BoundaryGridFunction> {
    if u.levels.is_empty() {
        return Err(Error::Empty("level set".into()));
    }
    Ok(u.level_function(0))
}

fn csv_header(grid: &BoundaryGrid, levels: &[f64]) -> String {
    let mut head = format!(
        "# {},{},{},{}",
        grid.ambient_dim(),
        grid.dim(),
        grid.half_extent(),
        grid.spacing()
    );
    for t in levels {
        head.push_str(&format!(",{t}"));
    }
    head
}

fn write_rows<W: Write>(w: &mut W, grid: &BoundaryGrid, columns: usize, value: impl Fn(usize, usize) -> f64) -> Result<()> {
    let dim = grid.dim();
    for i in 0..grid.len() {
        let x = grid.point(i);
        let mut row = x[..dim].iter().map(|c| c.to_string()).collect::<Vec<_>>();
        row.extend((0..columns).map(|c| value(i, c).to_string()));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Write a scalar boundary function as `# n,dim,L,h` then `x..., value` rows.
pub fn write_boundary_csv<W: Write>(f: &BoundaryGridFunction, w: &mut W) -> Result<()> {
    if f.components != 1 {
        return out_of_range("CSV export supports scalar functions only");
    }
    writeln!(w, "{}", csv_header(&f.grid, &[]))?;
    write_rows(w, &f.grid, 1, |i, _| f.values[i])
}

/// Write a scalar field as `# n,dim,L,h,levels...` then one value per level per row.
pub fn write_field_csv<W: Write>(u: &HalfSpaceField, w: &mut W) -> Result<()> {
    if u.components != 1 {
        return out_of_range("CSV export supports scalar fields only");
    }
    writeln!(w, "{}", csv_header(&u.grid, &u.levels))?;
    write_rows(w, &u.grid, u.levels.len(), |i, k| u.at(k, i, 0))
}

/// Grid, levels and level-major values parsed from the CSV schema.
#[derive(Debug, Clone)]
pub struct ParsedCsv {
    pub grid: BoundaryGrid,
    pub levels: Vec<f64>,
    /// `values[k * nodes + i]`; a single column when `levels` is empty.
    pub values: Vec<f64>,
}

fn parse_num(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse { line, msg: format!("not a number: {field:?}") })
}

/// Parse the grid CSV schema, validating node count and node order.
pub fn read_csv<R: BufRead>(reader: R) -> Result<ParsedCsv> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (line_no, header) = lines
        .next()
        .ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let header = header?;
    let body = header
        .trim()
        .strip_prefix('#')
        .ok_or(Error::Parse { line: line_no, msg: "header must start with '#'".into() })?;
    let fields: Vec<&str> = body.split(',').collect();
    if fields.len() < 4 {
        return Err(Error::Parse { line: line_no, msg: "header needs n,dim,L,h".into() });
    }
    let n = parse_num(fields[0], line_no)? as usize;
    let dim = parse_num(fields[1], line_no)? as usize;
    if n != dim + 1 {
        return Err(Error::Parse { line: line_no, msg: format!("n={n} inconsistent with dim={dim}") });
    }
    let half_extent = parse_num(fields[2], line_no)?;
    let spacing = parse_num(fields[3], line_no)?;
    let levels = fields[4..]
        .iter()
        .map(|f| parse_num(f, line_no))
        .collect::<Result<Vec<_>>>()?;
    let grid = BoundaryGrid::new(dim, half_extent, spacing)
        .map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
    if !levels.is_empty() {
        check_levels(&levels).map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
    }
    let columns = levels.len().max(1);
    let nodes = grid.len();
    let mut values = vec![0.0; nodes * columns];
    let mut seen = 0usize;
    let mut last_line = line_no;
    for (line_no, line) in lines {
        let line = line?;
        last_line = line_no;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let cells: Vec<&str> = trimmed.split(',').collect();
        if cells.len() != dim + columns {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {} columns, found {}", dim + columns, cells.len()),
            });
        }
        if seen >= nodes {
            return Err(Error::Parse { line: line_no, msg: format!("more than {nodes} node rows") });
        }
        let expected = grid.point(seen);
        for axis in 0..dim {
            let c = parse_num(cells[axis], line_no)?;
            if (c - expected[axis]).abs() > 1e-9 * spacing.max(1.0) {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("coordinate {c} does not match node {seen}"),
                });
            }
        }
        for k in 0..columns {
            let v = parse_num(cells[dim + k], line_no)?;
            if !v.is_finite() {
                return Err(Error::Parse { line: line_no, msg: format!("non-finite value {v}") });
            }
            values[k * nodes + seen] = v;
        }
        seen += 1;
    }
    if seen != nodes {
        return Err(Error::Parse {
            line: last_line + 1,
            msg: format!("expected {nodes} node rows, found {seen}"),
        });
    }
    Ok(ParsedCsv { grid, levels, values })
}

/// Load boundary data from a single-column CSV file.
pub fn load_boundary_data(path: impl AsRef<std::path::Path>) -> Result<BoundaryGridFunction> {
    let file = std::fs::File::open(path.as_ref())?;
    let parsed = read_csv(std::io::BufReader::new(file))?;
    if parsed.levels.len() > 1 {
        return Err(Error::Parse { line: 1, msg: "boundary data must have one value column".into() });
    }
    BoundaryGridFunction::new(parsed.grid, parsed.values)
}

/// Field reconstructed from a multi-level CSV.
pub fn field_from_csv(parsed: ParsedCsv) -> Result<HalfSpaceField> {
    if parsed.levels.is_empty() {
        return out_of_range("CSV carries no levels");
    }
    HalfSpaceField::new(parsed.grid, parsed.levels, 1, parsed.values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_count_and_coordinates() {
        let g = BoundaryGrid::new(2, 1.0, 0.25).unwrap();
        assert_eq!(g.per_axis(), 9);
        assert_eq!(g.len(), 81);
        assert_eq!(g.point(0), [-1.0, -1.0]);
        assert_eq!(g.point(80), [1.0, 1.0]);
        assert_eq!(g.locate(&[0.0, 0.0]), Some(40));
        assert_eq!(g.locate(&[0.1, 0.0]), None);
    }

    #[test]
    fn rejects_non_integer_ratio() {
        assert!(BoundaryGrid::new(1, 1.0, 0.3).is_err());
        assert!(BoundaryGrid::new(3, 1.0, 0.5).is_err());
    }

    #[test]
    fn sample_examples() {
        let g = BoundaryGrid::new(2, 4.0, 0.5).unwrap();
        let zero = sample_boundary(|_| 0.0, &g).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        let decay = sample_boundary(|x| (1.0 + (x[0] * x[0] + x[1] * x[1]).sqrt()).powf(-1.2), &g).unwrap();
        assert_eq!(decay.value(g.locate(&[0.0, 0.0]).unwrap()), 1.0);
        let gauss = sample_boundary(|x| (-(x[0] * x[0] + x[1] * x[1])).exp(), &g).unwrap();
        assert_eq!(gauss.value(g.locate(&[0.0, 0.0]).unwrap()), 1.0);
        assert!(matches!(sample_boundary(|_| f64::NAN, &g), Err(Error::NonFinite { node: 0, .. })));
    }

    #[test]
    fn restriction_examples() {
        let g = BoundaryGrid::new(1, 1.0, 0.5).unwrap();
        let c = sample_half_space(|_, _| 3.0, &g, &[0.1, 0.2]).unwrap();
        let b = restrict_to_boundary(&c).unwrap();
        assert!(b.values().iter().all(|&v| v == 3.0));
        assert_eq!(b.level(), Some(0.1));

        let u = sample_half_space(|x, t| if t == 0.0 { x[0] } else { 7.0 * t }, &g, &[0.0, 0.5, 1.0]).unwrap();
        let f = restrict_to_boundary(&u).unwrap();
        assert_eq!(f.values(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(f.level(), Some(0.0));
    }

    #[test]
    fn field_constant_in_height_round_trips() {
        let g = BoundaryGrid::new(2, 1.0, 0.25).unwrap();
        let prof = |x: &[f64]| x[0].sin() + x[1] * x[1];
        let f = sample_boundary(prof, &g).unwrap();
        let u = sample_half_space(|x, _| prof(x), &g, &[0.05, 0.1, 0.3]).unwrap();
        assert_eq!(restrict_to_boundary(&u).unwrap().values(), f.values());
    }

    #[test]
    fn refine_examples() {
        let g = BoundaryGrid::new(1, 1.0, 0.1).unwrap();
        let r = g.refine(2).unwrap();
        assert!((r.spacing() - 0.05).abs() < 1e-15);
        assert_eq!(r.half_extent(), 1.0);
        assert_eq!(g.refine(1).unwrap(), g);
        assert!(matches!(g.refine(1_000_000), Err(Error::NodeCap { .. })));
    }

    #[test]
    fn refinement_nests_nodes() {
        let g = BoundaryGrid::new(2, 1.0, 0.25).unwrap();
        let r = g.refine(3).unwrap();
        for i in 0..g.len() {
            assert!(r.locate(&g.point(i)).is_some());
        }
    }

    #[test]
    fn level_schedules() {
        let geo = LevelSchedule::Geometric { first: 0.1, ratio: 2.0, top: 1.0 }.levels().unwrap();
        assert_eq!(geo, vec![0.1, 0.2, 0.4, 0.8]);
        let uni = LevelSchedule::Uniform { spacing: 0.25, top: 1.0, include_zero: true }.levels().unwrap();
        assert_eq!(uni, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(check_levels(&[0.1, 0.0]).is_err());
        assert!(check_levels(&[]).is_err());
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let g = BoundaryGrid::new(2, 1.0, 0.5).unwrap();
        let f = sample_boundary(|x| x[0] * 0.3 - x[1] / 7.0, &g).unwrap();
        let mut buf = Vec::new();
        write_boundary_csv(&f, &mut buf).unwrap();
        let parsed = read_csv(&buf[..]).unwrap();
        assert_eq!(parsed.values, f.values());

        let text = String::from_utf8(buf).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        lines[3] = "0.0,-1.0";
        let bad = lines.join("\n");
        match read_csv(bad.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        let short = text.lines().take(5).collect::<Vec<_>>().join("\n");
        assert!(matches!(read_csv(short.as_bytes()), Err(Error::Parse { .. })));
    }

    #[test]
    fn field_csv_round_trip() {
        let g = BoundaryGrid::new(1, 1.0, 0.5).unwrap();
        let u = sample_half_space(|x, t| x[0] + t, &g, &[0.0, 0.5]).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&u, &mut buf).unwrap();
        let back = field_from_csv(read_csv(&buf[..]).unwrap()).unwrap();
        assert_eq!(back, u);
    }
}
