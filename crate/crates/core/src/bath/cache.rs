//! Memoization of bath integrals.

use super::BathIntegralResult;
use parking_lot::RwLock;
use std::collections::HashMap;
use std::sync::OnceLock;

/// Key built from the raw bit patterns of every request parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub kernel: &'static str,
    pub bits: Vec<u64>,
}

impl CacheKey {
    pub fn digest(&self) -> String {
        let mut s = String::from(self.kernel);
        for b in &self.bits {
            s.push_str(&format!(":{b:016x}"));
        }
        s
    }
}

fn store() -> &'static RwLock<HashMap<CacheKey, BathIntegralResult>> {
    static STORE: OnceLock<RwLock<HashMap<CacheKey, BathIntegralResult>>> = OnceLock::new();
    STORE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Returns the cached value or computes and inserts it. Two racing callers
/// may both compute; the first insert wins and both see the same value.
pub fn get_or_compute<F>(key: &CacheKey, compute: F) -> crate::Result<BathIntegralResult>
where
    F: FnOnce() -> crate::Result<BathIntegralResult>,
{
    if let Some(v) = store().read().get(key) {
        return Ok(v.clone());
    }
    let v = compute()?;
    let mut w = store().write();
    Ok(w.entry(key.clone()).or_insert(v).clone())
}

pub fn len() -> usize {
    store().read().len()
}

pub fn clear() {
    store().write().clear();
}
