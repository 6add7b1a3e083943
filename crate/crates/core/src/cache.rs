//! Memoized access to catalogs and posets, optionally backed by a
//! persistent store.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::enumerate::{enumerate, GraphCatalog};
use crate::error::Result;
use crate::poset::{build_poset, ContractionPoset};

/// Persistent backing for catalogs. `load` returning `None` means "not
/// available", after which the catalog is enumerated and handed to `save`.
pub trait CatalogStore: Send + Sync {
    fn load(&self, g: u32, n: u32) -> Result<Option<GraphCatalog>>;
    fn save(&self, catalog: &GraphCatalog) -> Result<()>;
}

#[derive(Default)]
pub struct CatalogCache {
    store: Option<Box<dyn CatalogStore>>,
    catalogs: Mutex<HashMap<(u32, u32), Arc<GraphCatalog>>>,
    posets: Mutex<HashMap<(u32, u32), Arc<ContractionPoset>>>,
}

impl CatalogCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_store(store: Box<dyn CatalogStore>) -> Self {
        CatalogCache {
            store: Some(store),
            ..Self::default()
        }
    }

    pub fn catalog(&self, g: u32, n: u32) -> Result<Arc<GraphCatalog>> {
        if let Some(c) = self.catalogs.lock().expect("cache lock").get(&(g, n)) {
            return Ok(c.clone());
        }
        let catalog = match &self.store {
            Some(store) => match store.load(g, n)? {
                Some(c) => c,
                None => {
                    let c = enumerate(g, n)?;
                    store.save(&c)?;
                    c
                }
            },
            None => enumerate(g, n)?,
        };
        let catalog = Arc::new(catalog);
        // A concurrent caller may have raced us; keep whichever landed first.
        let mut map = self.catalogs.lock().expect("cache lock");
        Ok(map.entry((g, n)).or_insert(catalog).clone())
    }

    pub fn poset(&self, g: u32, n: u32) -> Result<Arc<ContractionPoset>> {
        if let Some(p) = self.posets.lock().expect("cache lock").get(&(g, n)) {
            return Ok(p.clone());
        }
        let poset = Arc::new(build_poset(self.catalog(g, n)?)?);
        let mut map = self.posets.lock().expect("cache lock");
        Ok(map.entry((g, n)).or_insert(poset).clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    #[derive(Default)]
    struct CountingStore {
        loads: AtomicUsize,
        saves: AtomicUsize,
    }

    impl CatalogStore for Arc<CountingStore> {
        fn load(&self, _: u32, _: u32) -> Result<Option<GraphCatalog>> {
            self.loads.fetch_add(1, Ordering::SeqCst);
            Ok(None)
        }

        fn save(&self, _: &GraphCatalog) -> Result<()> {
            self.saves.fetch_add(1, Ordering::SeqCst);
            Ok(())
        }
    }

    #[test]
    fn memoizes_and_consults_store_once() {
        let counter = Arc::new(CountingStore::default());
        let cache = CatalogCache::with_store(Box::new(counter.clone()));
        let a = cache.catalog(1, 2).unwrap();
        let b = cache.catalog(1, 2).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(counter.loads.load(Ordering::SeqCst), 1);
        assert_eq!(counter.saves.load(Ordering::SeqCst), 1);
        let p = cache.poset(1, 2).unwrap();
        assert!(Arc::ptr_eq(p.catalog(), &a));
    }

    #[test]
    fn unstable_pair_propagates() {
        assert!(CatalogCache::new().catalog(0, 2).is_err());
    }
}
