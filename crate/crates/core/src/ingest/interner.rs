use rustc_hash::FxHashMap;

use crate::NodeId;

/// Bijection between ID strings and dense indices, assigned in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeInterner {
    index: FxHashMap<Box<str>, NodeId>,
    ids: Vec<Box<str>>,
}

impl NodeInterner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, id: &str) -> NodeId {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = NodeId::try_from(self.ids.len()).expect("more than u32::MAX distinct IDs");
        let owned: Box<str> = id.into();
        self.index.insert(owned.clone(), i);
        self.ids.push(owned);
        i
    }

    pub fn get(&self, id: &str) -> Option<NodeId> {
        self.index.get(id).copied()
    }

    pub fn id(&self, node: NodeId) -> &str {
        &self.ids[node as usize]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// IDs in index order.
    pub fn ids(&self) -> impl ExactSizeIterator<Item = &str> {
        self.ids.iter().map(|s| &**s)
    }
}
