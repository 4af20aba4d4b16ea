use std::cmp::Ordering;

/// Min-heap entry for `BinaryHeap`: smallest key first, ties broken by the
/// smallest index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct MinItem {
    pub key: f64,
    pub index: usize,
}

impl Eq for MinItem {}

impl Ord for MinItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for MinItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
