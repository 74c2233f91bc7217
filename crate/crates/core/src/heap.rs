//! Binary min-heap over a fixed set of slots with arbitrary key reassignment.

use crate::numeric::Cost;

/// Each slot `0..len` carries a key and an external id; ordering is by
/// `(key, id)` so ties resolve towards the smaller id.
#[derive(Debug, Clone)]
pub struct IndexedMinHeap<K> {
    keys: Vec<K>,
    ids: Vec<u32>,
    // heap[pos] = slot, pos_of[slot] = pos
    heap: Vec<u32>,
    pos_of: Vec<u32>,
}

impl<K: Cost> IndexedMinHeap<K> {
    pub fn build(entries: Vec<(K, u32)>) -> Self {
        let n = entries.len();
        let (keys, ids): (Vec<K>, Vec<u32>) = entries.into_iter().unzip();
        let mut h = IndexedMinHeap {
            keys,
            ids,
            heap: (0..n as u32).collect(),
            pos_of: (0..n as u32).collect(),
        };
        for pos in (0..n / 2).rev() {
            h.sift_down(pos);
        }
        h
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Smallest `(key, id)`.
    pub fn peek(&self) -> Option<(&K, u32)> {
        self.heap.first().map(|&s| (&self.keys[s as usize], self.ids[s as usize]))
    }

    pub fn key(&self, slot: usize) -> &K {
        &self.keys[slot]
    }

    pub fn id(&self, slot: usize) -> u32 {
        self.ids[slot]
    }

    pub fn set_key(&mut self, slot: usize, key: K) {
        let up = self.keys[slot].total_cmp(&key).is_gt();
        self.keys[slot] = key;
        let pos = self.pos_of[slot] as usize;
        if up {
            self.sift_up(pos);
        } else {
            self.sift_down(pos);
        }
    }

    #[inline]
    fn less(&self, a: u32, b: u32) -> bool {
        let (a, b) = (a as usize, b as usize);
        match self.keys[a].total_cmp(&self.keys[b]) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => self.ids[a] < self.ids[b],
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos_of[self.heap[i] as usize] = i as u32;
        self.pos_of[self.heap[j] as usize] = j as u32;
    }

    fn sift_up(&mut self, mut pos: usize) {
        while pos > 0 {
            let parent = (pos - 1) / 2;
            if self.less(self.heap[pos], self.heap[parent]) {
                self.swap(pos, parent);
                pos = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut pos: usize) {
        let n = self.heap.len();
        loop {
            let l = 2 * pos + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let mut best = l;
            if r < n && self.less(self.heap[r], self.heap[l]) {
                best = r;
            }
            if self.less(self.heap[best], self.heap[pos]) {
                self.swap(pos, best);
                pos = best;
            } else {
                break;
            }
        }
    }
}
