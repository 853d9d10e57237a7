use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::savings::{read_query_log, QueryLogEntry};

enum Sink {
    File(File),
    Writer(Box<dyn Write + Send>),
    Discard,
}

impl Sink {
    fn append(&mut self, line: &[u8]) -> io::Result<()> {
        match self {
            Sink::File(f) => {
                f.write_all(line)?;
                f.sync_data()
            }
            Sink::Writer(w) => {
                w.write_all(line)?;
                w.flush()
            }
            Sink::Discard => Ok(()),
        }
    }
}

struct Inner {
    sink: Sink,
    entries: Vec<QueryLogEntry>,
}

/// Append-only JSON-lines query log with a single writer.
///
/// Each entry is written and synced before `append` returns. Served entries
/// are also kept in memory so the analytics endpoints never reread the file.
pub struct QueryLog {
    path: Option<PathBuf>,
    inner: Mutex<Inner>,
}

impl QueryLog {
    /// Opens or creates `path`, loading entries already in it.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let entries = if path.exists() {
            read_query_log(path)?
        } else {
            Vec::new()
        };
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        Ok(QueryLog {
            path: Some(path.to_path_buf()),
            inner: Mutex::new(Inner {
                sink: Sink::File(file),
                entries,
            }),
        })
    }

    pub fn from_writer(w: Box<dyn Write + Send>) -> Self {
        Self::with_sink(Sink::Writer(w))
    }

    /// Keeps entries in memory only.
    pub fn in_memory() -> Self {
        Self::with_sink(Sink::Discard)
    }

    fn with_sink(sink: Sink) -> Self {
        QueryLog {
            path: None,
            inner: Mutex::new(Inner {
                sink,
                entries: Vec::new(),
            }),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// The entry is remembered even when the write fails, matching the
    /// response that was served.
    pub fn append(&self, entry: QueryLogEntry) -> Result<()> {
        let mut line = serde_json::to_vec(&entry)?;
        line.push(b'\n');
        let mut inner = self.inner.lock().unwrap_or_else(|p| p.into_inner());
        inner.entries.push(entry);
        inner
            .sink
            .append(&line)
            .map_err(|e| Error::io(self.path.as_deref().unwrap_or(Path::new("<query log>")), e))
    }

    pub fn snapshot(&self) -> Vec<QueryLogEntry> {
        self.inner.lock().unwrap_or_else(|p| p.into_inner()).entries.clone()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap_or_else(|p| p.into_inner()).entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
