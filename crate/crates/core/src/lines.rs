//! Partition of a point set into lines along the active axis, and the
//! canonical schedule of anchor pairs on the processed lines.

use crate::label::{radix_sort, RadixScratch, RecordBatch};

/// Points grouped by equal transverse labels, each group sorted by the
/// active label. Groups appear in increasing lexicographic transverse order.
#[derive(Clone, Debug)]
pub(crate) struct LinePartition {
    order: Vec<u32>,
    starts: Vec<u32>,
    line_of: Vec<u32>,
}

impl LinePartition {
    /// `transverse[c][p]` and `active[p]` are labels of local point `p`.
    pub fn build(n: usize, transverse: &[&[u32]], active: &[u32]) -> Self {
        let width = transverse.len() + 1;
        let mut batch = RecordBatch::new(width);
        let mut key = vec![0u32; width];
        let mut alphabet = 1;
        for p in 0..n {
            for (c, col) in transverse.iter().enumerate() {
                key[c] = col[p];
            }
            key[width - 1] = active[p];
            alphabet = key.iter().copied().fold(alphabet, u32::max);
            batch.push_input(&key, p as u32);
        }
        radix_sort(&mut batch, alphabet, &mut RadixScratch::default());
        let t = transverse.len();
        let mut order = Vec::with_capacity(n);
        let mut starts = Vec::new();
        let mut line_of = vec![0u32; n];
        for i in 0..n {
            if i == 0 || batch.key(i)[..t] != batch.key(i - 1)[..t] {
                starts.push(i as u32);
            }
            let rec = batch.record(i);
            debug_assert!(i == 0 || batch.key(i) != batch.key(i - 1), "duplicate point");
            order.push(rec.payload);
            line_of[rec.payload as usize] = starts.len() as u32 - 1;
        }
        starts.push(n as u32);
        LinePartition {
            order,
            starts,
            line_of,
        }
    }

    pub fn lines(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn line(&self, l: usize) -> &[u32] {
        &self.order[self.starts[l] as usize..self.starts[l + 1] as usize]
    }

    /// Position of line `l`'s first point in the concatenated line order.
    pub fn offset(&self, l: usize) -> usize {
        self.starts[l] as usize
    }

    /// All points, line after line.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn size(&self, l: usize) -> usize {
        (self.starts[l + 1] - self.starts[l]) as usize
    }

    pub fn line_of(&self, p: usize) -> usize {
        self.line_of[p] as usize
    }
}

/// Canonical order of (line, anchor, role, partner) assignments over the
/// processed lines: by line, then anchor position, then role, then partner
/// position (partner after anchor on the line).
#[derive(Clone, Debug)]
pub(crate) struct PairSchedule {
    lines: Vec<u32>,
    prefix: Vec<u64>,
    roles: u64,
}

impl PairSchedule {
    pub fn new(part: &LinePartition, processed: impl Fn(usize) -> bool, roles: usize) -> Self {
        let mut lines = Vec::new();
        let mut prefix = vec![0u64];
        if roles > 0 {
            for l in 0..part.lines() {
                let s = part.size(l) as u64;
                if s >= 2 && processed(l) {
                    lines.push(l as u32);
                    prefix.push(prefix.last().unwrap() + s * (s - 1) / 2 * roles as u64);
                }
            }
        }
        PairSchedule {
            lines,
            prefix,
            roles: roles as u64,
        }
    }

    pub fn total(&self) -> u64 {
        *self.prefix.last().unwrap()
    }

    /// Calls `f(line, anchor_pos, role, partner_pos)` for assignments
    /// `start..end` of the schedule.
    pub fn visit(
        &self,
        part: &LinePartition,
        start: u64,
        end: u64,
        mut f: impl FnMut(usize, usize, usize, usize),
    ) {
        let end = end.min(self.total());
        if start >= end {
            return;
        }
        let mut g = start;
        let mut li = self.prefix.partition_point(|&p| p <= g) - 1;
        while g < end {
            let line = self.lines[li] as usize;
            let s = part.size(line);
            let mut off = g - self.prefix[li];
            let mut i = 0usize;
            loop {
                let block = (s - 1 - i) as u64 * self.roles;
                if off < block {
                    break;
                }
                off -= block;
                i += 1;
            }
            let per = (s - 1 - i) as u64;
            let mut r = (off / per) as usize;
            let mut j = i + 1 + (off % per) as usize;
            while g < end {
                f(line, i, r, j);
                g += 1;
                j += 1;
                if j == s {
                    j = i + 1;
                    r += 1;
                    if r as u64 == self.roles {
                        r = 0;
                        i += 1;
                        j = i + 1;
                        if j >= s {
                            break;
                        }
                    }
                }
            }
            li += 1;
        }
    }
}
