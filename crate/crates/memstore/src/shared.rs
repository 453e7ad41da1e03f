use std::sync::Arc;

use parking_lot::RwLock;
use recall_core::Frame;
use recall_embed::Embedder;

use crate::{LongTermMemory, MemError};

/// Single-writer, many-reader handle. Readers hold the read lock for the
/// whole query, so they always see the records and all three indices at
/// the same length.
#[derive(Clone)]
pub struct SharedMemory {
    inner: Arc<RwLock<LongTermMemory>>,
}

impl SharedMemory {
    pub fn new(memory: LongTermMemory) -> Self {
        Self {
            inner: Arc::new(RwLock::new(memory)),
        }
    }

    pub fn append_frame(&self, frame: &Frame, embedder: &dyn Embedder) -> Result<(), MemError> {
        self.inner.write().append_frame(frame, embedder)
    }

    pub fn read<T>(&self, f: impl FnOnce(&LongTermMemory) -> T) -> T {
        f(&self.inner.read())
    }
}
