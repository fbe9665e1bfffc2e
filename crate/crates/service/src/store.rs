use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Instant, SystemTime};

use treehide::Dataset;
use uuid::Uuid;

/// One upload and the snapshots committed on top of it.
#[derive(Debug)]
pub struct Session {
    history: Vec<Dataset>,
    pub created: SystemTime,
}

impl Session {
    pub fn new(original: Dataset) -> Self {
        Self {
            history: vec![original],
            created: SystemTime::now(),
        }
    }

    pub fn current(&self) -> &Dataset {
        self.history.last().expect("history is never empty")
    }

    pub fn push(&mut self, ds: Dataset) {
        self.history.push(ds);
    }

    /// Drops the latest snapshot; `false` when already at the upload.
    pub fn undo(&mut self) -> bool {
        if self.history.len() > 1 {
            self.history.pop();
            true
        } else {
            false
        }
    }

    pub fn depth(&self) -> usize {
        self.history.len()
    }
}

pub type SessionHandle = Arc<Mutex<Session>>;

struct Entry {
    session: SessionHandle,
    last_used: Instant,
}

/// In-memory sessions, evicting the least recently used beyond `capacity`.
pub struct SessionStore {
    capacity: usize,
    entries: Mutex<HashMap<Uuid, Entry>>,
}

impl SessionStore {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity: capacity.max(1),
            entries: Mutex::new(HashMap::new()),
        }
    }

    pub fn insert(&self, session: Session) -> Uuid {
        let id = Uuid::new_v4();
        let mut entries = self.entries.lock().expect("session map poisoned");
        while entries.len() >= self.capacity {
            let oldest = entries
                .iter()
                .min_by_key(|(_, e)| e.last_used)
                .map(|(id, _)| *id)
                .expect("map is non-empty");
            entries.remove(&oldest);
        }
        entries.insert(
            id,
            Entry {
                session: Arc::new(Mutex::new(session)),
                last_used: Instant::now(),
            },
        );
        id
    }

    /// Looks a session up and marks it used.
    pub fn get(&self, id: &Uuid) -> Option<SessionHandle> {
        let mut entries = self.entries.lock().expect("session map poisoned");
        let entry = entries.get_mut(id)?;
        entry.last_used = Instant::now();
        Some(Arc::clone(&entry.session))
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("session map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
