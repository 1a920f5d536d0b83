//! Indexed binary max-heap over variable activities.

const ABSENT: usize = usize::MAX;

/// Max-heap keyed by an external activity slice. Stores variable indices and
/// tracks each one's heap slot so bumps can restore order in place.
pub(crate) struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<usize>,
}

impl VarHeap {
    pub fn new() -> VarHeap {
        VarHeap {
            heap: Vec::new(),
            pos: Vec::new(),
        }
    }

    /// Registers one more variable index (initially absent).
    pub fn grow(&mut self) {
        self.pos.push(ABSENT);
    }

    pub fn contains(&self, var: usize) -> bool {
        self.pos[var] != ABSENT
    }

    pub fn insert(&mut self, var: usize, activity: &[f64]) {
        if self.contains(var) {
            return;
        }
        self.pos[var] = self.heap.len();
        self.heap.push(var as u32);
        self.sift_up(self.heap.len() - 1, activity);
    }

    pub fn pop_max(&mut self, activity: &[f64]) -> Option<usize> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0] as usize;
        let last = self.heap.pop().unwrap();
        self.pos[top] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0, activity);
        }
        Some(top)
    }

    /// Restores heap order after `var`'s activity increased.
    pub fn bumped(&mut self, var: usize, activity: &[f64]) {
        if self.contains(var) {
            self.sift_up(self.pos[var], activity);
        }
    }

    fn sift_up(&mut self, mut i: usize, activity: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if activity[self.heap[i] as usize] <= activity[self.heap[parent] as usize] {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize, activity: &[f64]) {
        loop {
            let left = 2 * i + 1;
            if left >= self.heap.len() {
                break;
            }
            let right = left + 1;
            let mut best = left;
            if right < self.heap.len()
                && activity[self.heap[right] as usize] > activity[self.heap[left] as usize]
            {
                best = right;
            }
            if activity[self.heap[best] as usize] <= activity[self.heap[i] as usize] {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a] as usize] = a;
        self.pos[self.heap[b] as usize] = b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_in_activity_order() {
        let activity = [0.5, 2.0, 1.0, 0.0];
        let mut heap = VarHeap::new();
        for _ in 0..4 {
            heap.grow();
        }
        for v in 0..4 {
            heap.insert(v, &activity);
        }
        assert_eq!(heap.pop_max(&activity), Some(1));
        assert_eq!(heap.pop_max(&activity), Some(2));
        assert_eq!(heap.pop_max(&activity), Some(0));
        assert_eq!(heap.pop_max(&activity), Some(3));
        assert_eq!(heap.pop_max(&activity), None);
    }

    #[test]
    fn bump_reorders_in_place() {
        let mut activity = [0.0, 0.0, 0.0];
        let mut heap = VarHeap::new();
        for _ in 0..3 {
            heap.grow();
        }
        for v in 0..3 {
            heap.insert(v, &activity);
        }
        activity[2] = 5.0;
        heap.bumped(2, &activity);
        assert_eq!(heap.pop_max(&activity), Some(2));
    }
}
