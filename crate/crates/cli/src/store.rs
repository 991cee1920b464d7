//! File-backed project store: one JSON file per project id.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use codetoon_core::pipeline::Project;
use thiserror::Error;
use uuid::Uuid;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("project '{0}' not found")]
    NotFound(String),
    #[error("project store I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("stored project is corrupt: {0}")]
    Corrupt(#[from] serde_json::Error),
}

/// Writes to the same id are serialized; different ids proceed in parallel.
#[derive(Debug)]
pub struct ProjectStore {
    dir: PathBuf,
    locks: Mutex<HashMap<Uuid, Arc<tokio::sync::Mutex<()>>>>,
}

impl ProjectStore {
    pub fn new(dir: impl Into<PathBuf>) -> Result<ProjectStore, StoreError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(ProjectStore { dir, locks: Mutex::new(HashMap::new()) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn lock_for(&self, id: Uuid) -> Arc<tokio::sync::Mutex<()>> {
        self.locks.lock().expect("lock table poisoned").entry(id).or_default().clone()
    }

    fn path(&self, id: Uuid) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    /// Saves under `id`, or under a fresh id when `None`. Returns the id.
    pub async fn save(&self, id: Option<&str>, project: &Project) -> Result<String, StoreError> {
        let id = match id {
            Some(text) => Uuid::parse_str(text).map_err(|_| StoreError::NotFound(text.to_string()))?,
            None => Uuid::new_v4(),
        };
        let lock = self.lock_for(id);
        let _guard = lock.lock().await;
        let body = serde_json::to_vec_pretty(project)?;
        // Write then rename so readers never see a partial file.
        let tmp = self.dir.join(format!("{id}.json.tmp"));
        tokio::fs::write(&tmp, body).await?;
        tokio::fs::rename(&tmp, self.path(id)).await?;
        Ok(id.to_string())
    }

    pub async fn load(&self, id: &str) -> Result<Project, StoreError> {
        let uuid = Uuid::parse_str(id).map_err(|_| StoreError::NotFound(id.to_string()))?;
        let lock = self.lock_for(uuid);
        let _guard = lock.lock().await;
        match tokio::fs::read(self.path(uuid)).await {
            Ok(bytes) => Ok(serde_json::from_slice(&bytes)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(StoreError::NotFound(id.to_string())),
            Err(e) => Err(e.into()),
        }
    }
}
