use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Birth-death chain on the group size with an absorbing empty group. Each
/// step has at most one event: a death with probability `death`, otherwise
/// a birth with probability `birth` (when a non-member exists). A birth
/// picks a uniform non-member, a death a uniform member.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipProcess {
    pub birth: f64,
    pub death: f64,
}

impl Default for MembershipProcess {
    fn default() -> Self {
        MembershipProcess { birth: 0.2, death: 0.3 }
    }
}

/// Group after one step with the joins and leaves that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipStep {
    pub next: Vec<usize>,
    pub joins: Vec<usize>,
    pub leaves: Vec<usize>,
}

impl MembershipProcess {
    /// A zero death probability would let the group live forever.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.birth) || !(self.death > 0.0 && self.death <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "need 0 <= birth <= 1 and 0 < death <= 1, got {} and {}",
                self.birth, self.death
            )));
        }
        if self.birth + self.death > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument("birth + death must not exceed 1".into()));
        }
        Ok(())
    }

    /// One step from `group` (sorted) within the eligible nodes `universe`.
    pub fn step<R: Rng>(&self, group: &[usize], universe: &[usize], rng: &mut R) -> MembershipStep {
        let stay = |g: &[usize]| MembershipStep { next: g.to_vec(), joins: vec![], leaves: vec![] };
        if group.is_empty() {
            return stay(group);
        }
        let u: f64 = rng.gen();
        if u < self.death {
            let w = group[rng.gen_range(0..group.len())];
            let next = group.iter().copied().filter(|&v| v != w).collect();
            return MembershipStep { next, joins: vec![], leaves: vec![w] };
        }
        let outside: Vec<usize> = universe.iter().copied().filter(|v| !group.contains(v)).collect();
        if u < self.death + self.birth && !outside.is_empty() {
            let v = outside[rng.gen_range(0..outside.len())];
            let mut next = group.to_vec();
            next.push(v);
            next.sort_unstable();
            return MembershipStep { next, joins: vec![v], leaves: vec![] };
        }
        stay(group)
    }

    fn transition(&self, k: usize, max: usize) -> (f64, f64) {
        let birth = if k < max { self.birth } else { 0.0 };
        (birth, self.death)
    }

    /// Expected steps until the group empties, starting from `size` members
    /// out of `max` eligible nodes. Counts the steps at which the group is
    /// nonempty.
    pub fn expected_absorption_time(&self, size: usize, max: usize) -> Result<f64> {
        self.validate()?;
        if size == 0 {
            return Ok(0.0);
        }
        if size > max {
            return Err(Error::InvalidArgument(format!("group size {size} exceeds {max} eligible nodes")));
        }
        // (b_k + d) E_k - d E_{k-1} - b_k E_{k+1} = 1, E_0 = 0: Thomas algorithm.
        let mut c = vec![0.0; max + 1];
        let mut r = vec![0.0; max + 1];
        for k in 1..=max {
            let (b, d) = self.transition(k, max);
            let diag = b + d + if k > 1 { d * c[k - 1] } else { 0.0 };
            c[k] = -b / diag;
            r[k] = (1.0 + if k > 1 { d * r[k - 1] } else { 0.0 }) / diag;
        }
        let mut e = vec![0.0; max + 2];
        for k in (1..=max).rev() {
            e[k] = r[k] - c[k] * e[k + 1];
        }
        Ok(e[size])
    }

    /// `P(group nonempty after m steps)` for each `m` in `0..steps`.
    pub fn survival(&self, size: usize, max: usize, steps: usize) -> Vec<f64> {
        let mut p = vec![0.0; max + 1];
        p[size.min(max)] = 1.0;
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            out.push(1.0 - p[0]);
            let mut q = vec![0.0; max + 1];
            q[0] = p[0];
            for k in 1..=max {
                let (b, d) = self.transition(k, max);
                q[k - 1] += d * p[k];
                if b > 0.0 {
                    q[k + 1] += b * p[k];
                }
                q[k] += (1.0 - b - d) * p[k];
            }
            p = q;
        }
        out
    }
}
