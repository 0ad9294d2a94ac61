//! Arena-backed AVL tree addressed by position, augmented with subtree sizes
//! and subtree weight sums.
//!
//! Positions here are 0-based; the public wrappers translate. Nothing in this
//! module can compare items: `I` carries no ordering bound.

pub(crate) const NIL: usize = usize::MAX;

pub(crate) trait Weighted {
    fn weight(&self) -> u64;
}

#[derive(Debug, Clone)]
struct Node<I> {
    item: I,
    left: usize,
    right: usize,
    height: u32,
    size: usize,
    sum: u64,
}

#[derive(Debug, Clone)]
pub(crate) struct PosTree<I> {
    nodes: Vec<Node<I>>,
    root: usize,
}

impl<I> Default for PosTree<I> {
    fn default() -> Self {
        PosTree {
            nodes: Vec::new(),
            root: NIL,
        }
    }
}

impl<I: Weighted> PosTree<I> {
    pub(crate) fn len(&self) -> usize {
        self.size(self.root)
    }

    pub(crate) fn total_weight(&self) -> u64 {
        self.sum(self.root)
    }

    pub(crate) fn height(&self) -> u32 {
        self.h(self.root)
    }

    pub(crate) fn root(&self) -> usize {
        self.root
    }

    pub(crate) fn left(&self, node: usize) -> usize {
        self.nodes[node].left
    }

    pub(crate) fn right(&self, node: usize) -> usize {
        self.nodes[node].right
    }

    pub(crate) fn item(&self, node: usize) -> &I {
        &self.nodes[node].item
    }

    /// Number of items strictly left of `node` within its own subtree.
    pub(crate) fn left_size(&self, node: usize) -> usize {
        self.size(self.nodes[node].left)
    }

    #[inline]
    fn size(&self, node: usize) -> usize {
        if node == NIL {
            0
        } else {
            self.nodes[node].size
        }
    }

    #[inline]
    fn sum(&self, node: usize) -> u64 {
        if node == NIL {
            0
        } else {
            self.nodes[node].sum
        }
    }

    #[inline]
    fn h(&self, node: usize) -> u32 {
        if node == NIL {
            0
        } else {
            self.nodes[node].height
        }
    }

    fn pull(&mut self, node: usize) {
        let (l, r) = (self.nodes[node].left, self.nodes[node].right);
        let height = 1 + self.h(l).max(self.h(r));
        let size = 1 + self.size(l) + self.size(r);
        let sum = self.nodes[node].item.weight() + self.sum(l) + self.sum(r);
        let n = &mut self.nodes[node];
        n.height = height;
        n.size = size;
        n.sum = sum;
    }

    fn rotate_right(&mut self, node: usize) -> usize {
        let pivot = self.nodes[node].left;
        self.nodes[node].left = self.nodes[pivot].right;
        self.nodes[pivot].right = node;
        self.pull(node);
        self.pull(pivot);
        pivot
    }

    fn rotate_left(&mut self, node: usize) -> usize {
        let pivot = self.nodes[node].right;
        self.nodes[node].right = self.nodes[pivot].left;
        self.nodes[pivot].left = node;
        self.pull(node);
        self.pull(pivot);
        pivot
    }

    fn rebalance(&mut self, node: usize) -> usize {
        self.pull(node);
        let (l, r) = (self.nodes[node].left, self.nodes[node].right);
        let balance = self.h(l) as i64 - self.h(r) as i64;
        if balance > 1 {
            let ll = self.nodes[l].left;
            let lr = self.nodes[l].right;
            if self.h(lr) > self.h(ll) {
                self.nodes[node].left = self.rotate_left(l);
            }
            self.rotate_right(node)
        } else if balance < -1 {
            let rl = self.nodes[r].left;
            let rr = self.nodes[r].right;
            if self.h(rl) > self.h(rr) {
                self.nodes[node].right = self.rotate_right(r);
            }
            self.rotate_left(node)
        } else {
            node
        }
    }

    /// Inserts `item` so that it ends up at 0-based position `pos`.
    ///
    /// Panics if `pos > len()`; callers validate.
    pub(crate) fn insert(&mut self, pos: usize, item: I) {
        assert!(pos <= self.len(), "insert position out of range");
        let weight = item.weight();
        let fresh = self.nodes.len();
        self.nodes.push(Node {
            item,
            left: NIL,
            right: NIL,
            height: 1,
            size: 1,
            sum: weight,
        });
        self.root = self.insert_rec(self.root, pos, fresh);
    }

    fn insert_rec(&mut self, node: usize, pos: usize, fresh: usize) -> usize {
        if node == NIL {
            return fresh;
        }
        let left_size = self.size(self.nodes[node].left);
        if pos <= left_size {
            let l = self.nodes[node].left;
            self.nodes[node].left = self.insert_rec(l, pos, fresh);
        } else {
            let r = self.nodes[node].right;
            self.nodes[node].right = self.insert_rec(r, pos - left_size - 1, fresh);
        }
        self.rebalance(node)
    }

    fn path_to(&self, mut pos: usize) -> Vec<usize> {
        let mut path = Vec::with_capacity(self.height() as usize);
        let mut node = self.root;
        loop {
            path.push(node);
            let left_size = self.size(self.nodes[node].left);
            if pos < left_size {
                node = self.nodes[node].left;
            } else if pos == left_size {
                return path;
            } else {
                pos -= left_size + 1;
                node = self.nodes[node].right;
            }
        }
    }

    fn node_at(&self, mut pos: usize) -> usize {
        let mut node = self.root;
        loop {
            let left_size = self.size(self.nodes[node].left);
            if pos < left_size {
                node = self.nodes[node].left;
            } else if pos == left_size {
                return node;
            } else {
                pos -= left_size + 1;
                node = self.nodes[node].right;
            }
        }
    }

    /// Panics if `pos >= len()`.
    pub(crate) fn get(&self, pos: usize) -> &I {
        assert!(pos < self.len(), "position out of range");
        &self.nodes[self.node_at(pos)].item
    }

    /// Mutates the item at `pos` and repairs weight sums on the root path.
    pub(crate) fn update<R>(&mut self, pos: usize, f: impl FnOnce(&mut I) -> R) -> R {
        assert!(pos < self.len(), "position out of range");
        let path = self.path_to(pos);
        let target = *path.last().expect("non-empty path");
        let out = f(&mut self.nodes[target].item);
        for &node in path.iter().rev() {
            self.pull(node);
        }
        out
    }

    /// Sum of the weights of the first `count` items.
    pub(crate) fn prefix_sum(&self, mut count: usize) -> u64 {
        let mut acc = 0;
        let mut node = self.root;
        while node != NIL && count > 0 {
            let n = &self.nodes[node];
            let left_size = self.size(n.left);
            if count <= left_size {
                node = n.left;
            } else {
                acc += self.sum(n.left) + n.item.weight();
                count -= left_size + 1;
                node = n.right;
            }
        }
        acc
    }

    /// Smallest 0-based position `p` with `den * prefix_sum(p + 1) >= num`,
    /// or `None` if even the full sum falls short.
    pub(crate) fn search_threshold(&self, num: u128, den: u128) -> Option<usize> {
        if den * (self.total_weight() as u128) < num {
            return None;
        }
        let mut acc: u128 = 0;
        let mut base = 0usize;
        let mut node = self.root;
        while node != NIL {
            let n = &self.nodes[node];
            let left_sum = self.sum(n.left) as u128;
            if n.left != NIL && den * (acc + left_sum) >= num {
                node = n.left;
                continue;
            }
            let through = acc + left_sum + n.item.weight() as u128;
            let left_size = self.size(n.left);
            if den * through >= num {
                return Some(base + left_size);
            }
            acc = through;
            base += left_size + 1;
            node = n.right;
        }
        None
    }

    fn in_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.len());
        let mut stack = Vec::new();
        let mut node = self.root;
        while node != NIL || !stack.is_empty() {
            while node != NIL {
                stack.push(node);
                node = self.nodes[node].left;
            }
            let top = stack.pop().expect("stack non-empty");
            order.push(top);
            node = self.nodes[top].right;
        }
        order
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = &I> + '_ {
        self.in_order()
            .into_iter()
            .map(move |n| &self.nodes[n].item)
    }

    pub(crate) fn into_items(self) -> Vec<I> {
        let order = self.in_order();
        let mut slots: Vec<Option<I>> = self.nodes.into_iter().map(|n| Some(n.item)).collect();
        order
            .into_iter()
            .map(|n| slots[n].take().expect("each node visited once"))
            .collect()
    }

    /// Checks AVL balance and the size/sum augmentation everywhere.
    #[cfg(test)]
    pub(crate) fn check_invariants(&self) {
        fn rec<I: Weighted>(t: &PosTree<I>, node: usize) -> (u32, usize, u64) {
            if node == NIL {
                return (0, 0, 0);
            }
            let n = &t.nodes[node];
            let (hl, sl, wl) = rec(t, n.left);
            let (hr, sr, wr) = rec(t, n.right);
            assert!((hl as i64 - hr as i64).abs() <= 1, "AVL balance violated");
            let h = 1 + hl.max(hr);
            assert_eq!(n.height, h);
            assert_eq!(n.size, 1 + sl + sr);
            assert_eq!(n.sum, n.item.weight() + wl + wr);
            (h, n.size, n.sum)
        }
        rec(self, self.root);
    }
}
