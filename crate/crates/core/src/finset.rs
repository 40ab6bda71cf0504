//! Operation tables over a finite carriers `{0, …, s-1}`.
//!
//! A tuple `(x₁,…,xₙ)` is stored at index `∑ xᵢ·s^(n−i)`, so `x₁` is the most
//! significant digit. Everything in the crate (slice order, golden reports,
//! distribution elements) relies on this convention.

use std::fmt;

use rayon::prelude::*;

use crate::{Error, Limits, Result};

/// Largest carrier the crate accepts; entries are stored as `u8`.
pub const MAX_CARRIER: usize = 64;

/// `sⁿ`, or `None` on overflow.
pub fn table_len(carrier: usize, arity: usize) -> Option<usize> {
    let mut len = 1usize;
    for _ in 0..arity {
        len = len.checked_mul(carrier)?;
    }
    Some(len)
}

pub fn encode_tuple(carrier: usize, tuple: &[u8]) -> Result<usize> {
    let mut idx = 0usize;
    for (pos, &x) in tuple.iter().enumerate() {
        if x as usize >= carrier {
            return Err(Error::input(format!(
                "tuple entry {x} at position {pos} is outside carrier of size {carrier}"
            )));
        }
        idx = idx
            .checked_mul(carrier)
            .and_then(|i| i.checked_add(x as usize))
            .ok_or_else(|| Error::resource("tuple index overflows usize"))?;
    }
    Ok(idx)
}

pub fn decode_tuple(carrier: usize, arity: usize, mut index: usize) -> Result<Vec<u8>> {
    let len = table_len(carrier, arity).ok_or_else(|| Error::resource("table length overflow"))?;
    if index >= len {
        return Err(Error::input(format!(
            "index {index} out of range for {arity}-tuples over {carrier} points"
        )));
    }
    let mut out = vec![0u8; arity];
    for slot in out.iter_mut().rev() {
        *slot = (index % carrier) as u8;
        index /= carrier;
    }
    Ok(out)
}

#[inline]
fn encode_unchecked(carrier: usize, digits: impl IntoIterator<Item = u8>) -> usize {
    digits
        .into_iter()
        .fold(0usize, |acc, d| acc * carrier + d as usize)
}

fn check_carrier(carrier: usize) -> Result<()> {
    if carrier == 0 || carrier > MAX_CARRIER {
        return Err(Error::input(format!(
            "carrier size {carrier} outside 1..={MAX_CARRIER}"
        )));
    }
    Ok(())
}

/// A total function `Aⁿ → A` stored as a flat table.
///
/// The derived order compares carrier, then arity, then the table
/// lexicographically, which is the canonical slice order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpTable {
    carrier: usize,
    arity: usize,
    table: Vec<u8>,
}

impl fmt::Debug for OpTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Op[{}^{}]{:?}", self.carrier, self.arity, self.table)
    }
}

impl OpTable {
    pub fn new(carrier: usize, arity: usize, table: Vec<u8>) -> Result<Self> {
        check_carrier(carrier)?;
        let len =
            table_len(carrier, arity).ok_or_else(|| Error::resource("table length overflow"))?;
        if table.len() != len {
            return Err(Error::input(format!(
                "table for arity {arity} over {carrier} points needs {len} entries, got {}",
                table.len()
            )));
        }
        if let Some((pos, &bad)) = table
            .iter()
            .enumerate()
            .find(|(_, &x)| x as usize >= carrier)
        {
            return Err(Error::input(format!(
                "table entry {bad} at index {pos} is outside carrier of size {carrier}"
            )));
        }
        Ok(OpTable {
            carrier,
            arity,
            table,
        })
    }

    /// Tabulates `f` over all tuples in index order.
    pub fn from_fn(carrier: usize, arity: usize, mut f: impl FnMut(&[u8]) -> u8) -> Result<Self> {
        check_carrier(carrier)?;
        let len =
            table_len(carrier, arity).ok_or_else(|| Error::resource("table length overflow"))?;
        let mut tuple = vec![0u8; arity];
        let mut table = Vec::with_capacity(len);
        for _ in 0..len {
            table.push(f(&tuple));
            increment(&mut tuple, carrier);
        }
        OpTable::new(carrier, arity, table)
    }

    pub fn constant(carrier: usize, arity: usize, value: u8) -> Result<Self> {
        check_carrier(carrier)?;
        if value as usize >= carrier {
            return Err(Error::input(format!(
                "constant {value} outside carrier of size {carrier}"
            )));
        }
        let len =
            table_len(carrier, arity).ok_or_else(|| Error::resource("table length overflow"))?;
        Ok(OpTable {
            carrier,
            arity,
            table: vec![value; len],
        })
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn into_table(self) -> Vec<u8> {
        self.table
    }

    #[inline]
    pub fn at(&self, index: usize) -> u8 {
        self.table[index]
    }

    /// Applies the operation to a tuple. Panics if the tuple is malformed.
    #[inline]
    pub fn eval(&self, args: &[u8]) -> u8 {
        debug_assert_eq!(args.len(), self.arity);
        self.table[encode_unchecked(self.carrier, args.iter().copied())]
    }

    /// `Some(i)` (1-based) when this is the projection onto coordinate `i`.
    pub fn projection_index(&self) -> Option<usize> {
        (1..=self.arity).find(|&i| {
            projection(self.carrier, self.arity, i)
                .map(|p| p == *self)
                .unwrap_or(false)
        })
    }

    pub fn is_projection(&self) -> bool {
        self.projection_index().is_some()
    }

    /// Whether `ω(a,…,a) = a` for every carrier point.
    pub fn fixes_diagonal(&self) -> bool {
        (0..self.carrier as u8).all(|a| {
            let idx = encode_unchecked(self.carrier, std::iter::repeat_n(a, self.arity));
            self.table[idx] == a
        })
    }
}

/// Advances a tuple to its successor in index order (wrapping to zero).
pub(crate) fn increment(tuple: &mut [u8], carrier: usize) {
    for slot in tuple.iter_mut().rev() {
        if (*slot as usize) + 1 < carrier {
            *slot += 1;
            return;
        }
        *slot = 0;
    }
}

/// The projection `(x₁,…,xₙ) ↦ xᵢ`, with `i` counted from 1.
pub fn projection(carrier: usize, arity: usize, i: usize) -> Result<OpTable> {
    if i == 0 || i > arity {
        return Err(Error::input(format!(
            "projection index {i} outside 1..={arity}"
        )));
    }
    OpTable::from_fn(carrier, arity, |x| x[i - 1])
}

pub fn projections(carrier: usize, arity: usize) -> Result<Vec<OpTable>> {
    (1..=arity).map(|i| projection(carrier, arity, i)).collect()
}

/// Pointwise composite `x ↦ outer(inner₁(x), …, innerₖ(x))`.
///
/// A nullary `outer` with no inners has no arity to borrow, so the result
/// arity must be given explicitly through [`superpose_at`].
pub fn superpose(outer: &OpTable, inners: &[OpTable]) -> Result<OpTable> {
    let arity = match inners.first() {
        Some(first) => first.arity,
        None => 0,
    };
    superpose_at(outer, inners, arity)
}

/// [`superpose`] with the result arity stated, which lifts constants to any arity.
pub fn superpose_at(outer: &OpTable, inners: &[OpTable], arity: usize) -> Result<OpTable> {
    if inners.len() != outer.arity {
        return Err(Error::input(format!(
            "outer operation has arity {} but {} inner operations were given",
            outer.arity,
            inners.len()
        )));
    }
    for (pos, inner) in inners.iter().enumerate() {
        if inner.carrier != outer.carrier {
            return Err(Error::input(format!(
                "inner operation {pos} has carrier {}, outer has {}",
                inner.carrier, outer.carrier
            )));
        }
        if inner.arity != arity {
            return Err(Error::input(format!(
                "inner operation {pos} has arity {}, expected {arity}",
                inner.arity
            )));
        }
    }
    let s = outer.carrier;
    let len = table_len(s, arity).ok_or_else(|| Error::resource("table length overflow"))?;
    let table = (0..len)
        .map(|x| outer.table[encode_unchecked(s, inners.iter().map(|g| g.table[x]))])
        .collect();
    Ok(OpTable {
        carrier: s,
        arity,
        table,
    })
}

/// A morphism `n → m` of a theory, stored as `m` component operations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiOpTable {
    carrier: usize,
    arity: usize,
    components: Vec<OpTable>,
}

impl MultiOpTable {
    pub fn new(carrier: usize, arity: usize, components: Vec<OpTable>) -> Result<Self> {
        check_carrier(carrier)?;
        for (j, c) in components.iter().enumerate() {
            if c.carrier != carrier || c.arity != arity {
                return Err(Error::input(format!(
                    "component {j} is {}-ary over {} points, expected {arity}-ary over {carrier}",
                    c.arity, c.carrier
                )));
            }
        }
        Ok(MultiOpTable {
            carrier,
            arity,
            components,
        })
    }

    pub fn single(op: OpTable) -> Self {
        MultiOpTable {
            carrier: op.carrier,
            arity: op.arity,
            components: vec![op],
        }
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn coarity(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[OpTable] {
        &self.components
    }
}

/// Digit expansion of every cell of `Aⁿ`, cached for the kernels.
struct Cube {
    carrier: usize,
    arity: usize,
    len: usize,
    digits: Vec<u8>,
}

impl Cube {
    fn new(carrier: usize, arity: usize, len: usize) -> Self {
        let mut digits = Vec::with_capacity(len * arity);
        let mut tuple = vec![0u8; arity];
        for _ in 0..len {
            digits.extend_from_slice(&tuple);
            increment(&mut tuple, carrier);
        }
        Cube {
            carrier,
            arity,
            len,
            digits,
        }
    }

    #[inline]
    fn digit(&self, cell: usize, coord: usize) -> u8 {
        self.digits[cell * self.arity + coord]
    }

    /// Cell of `ω` applied componentwise to the cells `args`.
    #[inline]
    fn apply(&self, op: &OpTable, args: &[usize]) -> usize {
        (0..self.arity).fold(0usize, |acc, coord| {
            let at = encode_unchecked(self.carrier, args.iter().map(|&c| self.digit(c, coord)));
            acc * self.carrier + op.table[at] as usize
        })
    }
}

/// One failing instance `h(ω(x⁽¹⁾,…,x⁽ᵏ⁾)) ≠ ω(h(x⁽¹⁾),…,h(x⁽ᵏ⁾))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreservationFailure {
    /// Argument cells `x⁽ʲ⁾` as indices into `Aⁿ`.
    pub argument_cells: Vec<usize>,
    /// Cell of the componentwise result `ω(x⁽¹⁾,…,x⁽ᵏ⁾)`.
    pub result_cell: usize,
}

/// First instance at which `h: Aⁿ → A` fails to preserve `op` under the
/// componentwise structure on `Aⁿ`, scanning argument tuples in index order.
pub fn preservation_failure(op: &OpTable, h: &OpTable) -> Result<Option<PreservationFailure>> {
    if op.carrier != h.carrier {
        return Err(Error::input(format!(
            "operation carrier {} differs from map carrier {}",
            op.carrier, h.carrier
        )));
    }
    let s = h.carrier;
    let cube = Cube::new(s, h.arity, h.table.len());
    let k = op.arity;
    let mut cells = vec![0usize; k];
    loop {
        let r = cube.apply(op, &cells);
        let rhs = op.table[encode_unchecked(s, cells.iter().map(|&c| h.table[c]))];
        if h.table[r] != rhs {
            return Ok(Some(PreservationFailure {
                argument_cells: cells,
                result_cell: r,
            }));
        }
        if !advance_cells(&mut cells, cube.len) {
            return Ok(None);
        }
    }
}

fn advance_cells(cells: &mut [usize], len: usize) -> bool {
    for c in cells.iter_mut().rev() {
        if *c + 1 < len {
            *c += 1;
            return true;
        }
        *c = 0;
    }
    false
}

/// Compiled constraint instances grouped by the largest cell they mention.
struct Compiled {
    carrier: usize,
    len: usize,
    ops: Vec<OpTable>,
    /// `offsets[t]..offsets[t+1]` spans the instances triggered by cell `t`.
    offsets: Vec<usize>,
    /// Each instance is `[op, result, arg₁, …, argₖ]`.
    data: Vec<u32>,
}

impl Compiled {
    fn build(
        carrier: usize,
        arity: usize,
        constraints: &[OpTable],
        limits: &Limits,
    ) -> Result<Self> {
        let len = table_len(carrier, arity)
            .filter(|&l| l <= limits.max_table_len)
            .ok_or_else(|| {
                Error::resource(format!(
                    "table length {carrier}^{arity} exceeds the guard of {} cells",
                    limits.max_table_len
                ))
            })?;
        // Projections hold for every map and constrain nothing.
        let ops: Vec<OpTable> = constraints
            .iter()
            .filter(|op| !op.is_projection())
            .cloned()
            .collect();

        let mut total = 0usize;
        for op in &ops {
            let count = table_len(len, op.arity)
                .filter(|&c| c <= limits.max_instances)
                .ok_or_else(|| {
                    Error::resource(format!(
                        "{}-ary constraint over {len} cells exceeds the instance guard",
                        op.arity
                    ))
                })?;
            total = total
                .checked_add(count)
                .filter(|&t| t <= limits.max_instances)
                .ok_or_else(|| {
                    Error::resource(format!(
                        "constraint instances exceed the guard of {}",
                        limits.max_instances
                    ))
                })?;
        }

        let cube = Cube::new(carrier, arity, len);
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); len];
        for (op_id, op) in ops.iter().enumerate() {
            let mut cells = vec![0usize; op.arity];
            loop {
                let r = cube.apply(op, &cells);
                let trigger = cells.iter().copied().fold(r, usize::max);
                let bucket = &mut buckets[trigger];
                bucket.push(op_id as u32);
                bucket.push(r as u32);
                bucket.extend(cells.iter().map(|&c| c as u32));
                if !advance_cells(&mut cells, len) {
                    break;
                }
            }
        }
        let mut offsets = Vec::with_capacity(len + 1);
        let mut data = Vec::new();
        offsets.push(0);
        for bucket in buckets {
            data.extend(bucket);
            offsets.push(data.len());
        }
        Ok(Compiled {
            carrier,
            len,
            ops,
            offsets,
            data,
        })
    }

    #[inline]
    fn consistent_at(&self, cell: usize, h: &[u8]) -> bool {
        let mut i = self.offsets[cell];
        let end = self.offsets[cell + 1];
        while i < end {
            let op = &self.ops[self.data[i] as usize];
            let r = self.data[i + 1] as usize;
            let k = op.arity;
            let args = &self.data[i + 2..i + 2 + k];
            let idx = encode_unchecked(self.carrier, args.iter().map(|&c| h[c as usize]));
            if h[r] != op.table[idx] {
                return false;
            }
            i += 2 + k;
        }
        true
    }

    /// Depth-first search over cells in index order with `h[0] = first`.
    fn search_from(&self, first: u8) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut h = vec![0u8; self.len];
        h[0] = first;
        if !self.consistent_at(0, &h) {
            return out;
        }
        if self.len == 1 {
            out.push(h);
            return out;
        }
        let mut next = vec![0u16; self.len];
        let mut pos = 1usize;
        loop {
            if next[pos] as usize >= self.carrier {
                next[pos] = 0;
                pos -= 1;
                if pos == 0 {
                    break;
                }
                continue;
            }
            h[pos] = next[pos] as u8;
            next[pos] += 1;
            if self.consistent_at(pos, &h) {
                if pos + 1 == self.len {
                    out.push(h.clone());
                } else {
                    pos += 1;
                }
            }
        }
        out
    }
}

/// Naive candidate count `s^(sⁿ)`, saturating at `u128::MAX`.
pub fn naive_candidate_count(carrier: usize, arity: usize) -> u128 {
    let Some(len) = table_len(carrier, arity) else {
        return u128::MAX;
    };
    let mut count = 1u128;
    for _ in 0..len {
        match count.checked_mul(carrier as u128) {
            Some(c) => count = c,
            None => return u128::MAX,
        }
    }
    count
}

/// All `h: Aⁿ → A` preserving every constraint operation, where `Aⁿ` carries
/// the componentwise structure. Results are in canonical (lexicographic) order.
///
/// Cells are assigned in increasing index; a constraint instance is checked as
/// soon as the last cell it mentions is assigned.
pub fn enumerate_constrained(
    carrier: usize,
    arity: usize,
    constraints: &[OpTable],
    limits: &Limits,
) -> Result<Vec<OpTable>> {
    check_carrier(carrier)?;
    for (pos, op) in constraints.iter().enumerate() {
        if op.carrier != carrier {
            return Err(Error::input(format!(
                "constraint {pos} lives on {} points, expected {carrier}",
                op.carrier
            )));
        }
    }
    let naive = naive_candidate_count(carrier, arity);
    let seeded = constraints
        .iter()
        .any(|op| (op.arity == 1 || op.arity == 2) && !op.is_projection());
    if naive > limits.max_candidates && !seeded {
        return Err(Error::resource(format!(
            "{carrier}^({carrier}^{arity}) candidates exceed the guard of {} and no unary or binary constraint is available to propagate",
            limits.max_candidates
        )));
    }
    let compiled = Compiled::build(carrier, arity, constraints, limits)?;
    let branches: Vec<Vec<Vec<u8>>> = (0..carrier as u8)
        .into_par_iter()
        .map(|v| compiled.search_from(v))
        .collect();
    let total: usize = branches.iter().map(Vec::len).sum();
    if total > limits.max_slice {
        return Err(Error::resource(format!(
            "{total} solutions exceed the slice guard of {}",
            limits.max_slice
        )));
    }
    Ok(branches
        .into_iter()
        .flatten()
        .map(|table| OpTable {
            carrier,
            arity,
            table,
        })
        .collect())
}

/// Every table of the given arity, in canonical order.
pub fn all_tables(carrier: usize, arity: usize, limits: &Limits) -> Result<Vec<OpTable>> {
    check_carrier(carrier)?;
    let count = naive_candidate_count(carrier, arity);
    if count > limits.max_slice as u128 {
        return Err(Error::resource(format!(
            "{carrier}^({carrier}^{arity}) tables exceed the slice guard of {}",
            limits.max_slice
        )));
    }
    let len = table_len(carrier, arity).expect("bounded by the count guard");
    let mut table = vec![0u8; len];
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        out.push(OpTable {
            carrier,
            arity,
            table: table.clone(),
        });
        increment(&mut table, carrier);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and2() -> OpTable {
        OpTable::new(2, 2, vec![0, 0, 0, 1]).unwrap()
    }

    fn not2() -> OpTable {
        OpTable::new(2, 1, vec![1, 0]).unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_tuple(2, &[0, 0]).unwrap(), 0);
        assert_eq!(encode_tuple(2, &[1, 0]).unwrap(), 2);
        assert_eq!(encode_tuple(3, &[1, 2]).unwrap(), 5);
        assert!(matches!(encode_tuple(2, &[0, 2]), Err(Error::Input(_))));
    }

    #[test]
    fn encode_decode_exhaustive() {
        for s in 1..=6usize {
            for n in 0..=4usize {
                let len = table_len(s, n).unwrap();
                for idx in 0..len {
                    let t = decode_tuple(s, n, idx).unwrap();
                    assert_eq!(encode_tuple(s, &t).unwrap(), idx);
                }
            }
        }
    }

    #[test]
    fn projection_examples() {
        assert_eq!(projection(2, 1, 1).unwrap().table(), &[0, 1]);
        assert_eq!(projection(2, 2, 1).unwrap().table(), &[0, 0, 1, 1]);
        assert_eq!(projection(2, 2, 2).unwrap().table(), &[0, 1, 0, 1]);
        assert!(projection(2, 2, 0).is_err());
        assert!(projection(2, 2, 3).is_err());
    }

    #[test]
    fn superpose_laws() {
        let id = projection(2, 1, 1).unwrap();
        assert_eq!(superpose(&id, &[not2()]).unwrap(), not2());
        let ps = projections(2, 2).unwrap();
        assert_eq!(superpose(&and2(), &ps).unwrap(), and2());
        let swapped = vec![ps[1].clone(), ps[0].clone()];
        assert_eq!(superpose(&and2(), &swapped).unwrap(), and2());
    }

    #[test]
    fn nullary_lifts_to_constants() {
        let top = OpTable::constant(2, 0, 1).unwrap();
        let lifted = superpose_at(&top, &[], 2).unwrap();
        assert_eq!(lifted.table(), &[1, 1, 1, 1]);
        assert_eq!(superpose(&top, &[]).unwrap(), top);
    }

    #[test]
    fn superpose_rejects_mismatches() {
        let ps = projections(2, 2).unwrap();
        assert!(superpose(&and2(), &ps[..1]).is_err());
        let other = projection(3, 2, 1).unwrap();
        assert!(superpose(&and2(), &[ps[0].clone(), other]).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let limits = Limits::default();
        let homs = enumerate_constrained(2, 1, &[not2()], &limits).unwrap();
        let tables: Vec<_> = homs.iter().map(|h| h.table().to_vec()).collect();
        assert_eq!(tables, vec![vec![0, 1], vec![1, 0]]);

        assert_eq!(enumerate_constrained(2, 2, &[], &limits).unwrap().len(), 16);

        let top = OpTable::constant(2, 0, 1).unwrap();
        let homs = enumerate_constrained(2, 2, &[and2(), top], &limits).unwrap();
        assert_eq!(homs.len(), 4);
    }

    #[test]
    fn enumerate_respects_candidate_guard() {
        let limits = Limits::default();
        let err = enumerate_constrained(3, 3, &[], &limits).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn preservation_failure_reports_instance() {
        // NOT does not preserve AND: NOT(0∧0) = 1 but NOT(0)∧NOT(0) = 1; first
        // failure is at (0, 1): NOT(0∧1) = 1, NOT 0 ∧ NOT 1 = 0.
        let fail = preservation_failure(&and2(), &not2()).unwrap().unwrap();
        assert_eq!(fail.argument_cells, vec![0, 1]);
        assert_eq!(fail.result_cell, 0);
    }

    #[test]
    fn fixes_diagonal() {
        assert!(and2().fixes_diagonal());
        assert!(!not2().fixes_diagonal());
        assert!(!OpTable::constant(2, 0, 1).unwrap().fixes_diagonal());
    }
}
