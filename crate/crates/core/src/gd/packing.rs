use crate::duplication::ClusterAssignment;

/// Groups items of the given sizes into at most `alpha` bins of capacity `k`.
///
/// Exact depth-first search over items in descending size order. An item may
/// open a new bin only after every open bin was tried, and bins with equal
/// load are interchangeable, so only the first of them is tried. Returns the
/// bin of every item in the caller's order, with bins numbered by first use.
pub fn pack_components(sizes: &[usize], k: usize, alpha: usize) -> Option<ClusterAssignment> {
    if sizes.is_empty() {
        return Some(ClusterAssignment::new(Vec::new()));
    }
    if sizes.iter().any(|&s| s > k) {
        return None;
    }
    let total: usize = sizes.iter().sum();
    if total > alpha.saturating_mul(k) {
        return None;
    }
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let sorted: Vec<usize> = order.iter().map(|&i| sizes[i]).collect();
    let mut suffix = vec![0; sorted.len() + 1];
    for i in (0..sorted.len()).rev() {
        suffix[i] = suffix[i + 1] + sorted[i];
    }
    let mut search = Packer {
        sizes: &sorted,
        suffix: &suffix,
        k,
        alpha,
        loads: Vec::with_capacity(alpha),
        bin_of: vec![0; sorted.len()],
    };
    if !search.place(0) {
        return None;
    }
    // renumber bins by first use in the caller's order
    let mut bin_of = vec![0; sizes.len()];
    for (pos, &item) in order.iter().enumerate() {
        bin_of[item] = search.bin_of[pos];
    }
    let mut rename = vec![usize::MAX; search.loads.len()];
    let mut next = 0;
    for b in bin_of.iter_mut() {
        if rename[*b] == usize::MAX {
            rename[*b] = next;
            next += 1;
        }
        *b = rename[*b];
    }
    Some(ClusterAssignment::new(bin_of))
}

struct Packer<'a> {
    sizes: &'a [usize],
    suffix: &'a [usize],
    k: usize,
    alpha: usize,
    loads: Vec<usize>,
    bin_of: Vec<usize>,
}

impl Packer<'_> {
    fn place(&mut self, i: usize) -> bool {
        if i == self.sizes.len() {
            return true;
        }
        let free: usize = self.loads.iter().map(|l| self.k - l).sum::<usize>()
            + (self.alpha - self.loads.len()) * self.k;
        if free < self.suffix[i] {
            return false;
        }
        let s = self.sizes[i];
        for b in 0..self.loads.len() {
            if self.loads[b] + s > self.k {
                continue;
            }
            if self.loads[..b].contains(&self.loads[b]) {
                continue;
            }
            self.loads[b] += s;
            self.bin_of[i] = b;
            if self.place(i + 1) {
                return true;
            }
            self.loads[b] -= s;
        }
        if self.loads.len() < self.alpha {
            self.loads.push(s);
            self.bin_of[i] = self.loads.len() - 1;
            if self.place(i + 1) {
                return true;
            }
            self.loads.pop();
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loads(sizes: &[usize], a: &ClusterAssignment) -> Vec<usize> {
        let mut l = vec![0; a.clusters];
        for (i, &c) in a.cluster_of.iter().enumerate() {
            l[c] += sizes[i];
        }
        l
    }

    #[test]
    fn fits_in_one_bin() {
        let a = pack_components(&[3, 3, 4], 10, 1).unwrap();
        assert_eq!(a.clusters, 1);
    }

    #[test]
    fn equality_with_capacity_is_allowed() {
        assert!(pack_components(&[10], 10, 1).is_some());
        assert!(pack_components(&[11], 10, 5).is_none());
    }

    #[test]
    fn pairs_overflow() {
        assert!(pack_components(&[6, 6, 6], 10, 2).is_none());
        assert!(pack_components(&[6, 6, 6], 10, 3).is_some());
    }

    #[test]
    fn three_partition_like() {
        // {5,5,5,5,5,7} cannot split into two triples of 16
        assert!(pack_components(&[5, 5, 5, 5, 5, 7], 16, 2).is_none());
        let sizes = [4, 5, 6, 6, 5, 4];
        let a = pack_components(&sizes, 15, 2).unwrap();
        assert_eq!(loads(&sizes, &a), vec![15, 15]);
        assert!(a.has_no_empty_cluster());
    }

    #[test]
    fn empty_input() {
        assert_eq!(pack_components(&[], 1, 1).unwrap().clusters, 0);
    }
}
