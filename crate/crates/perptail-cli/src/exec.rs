//! Threaded block executor. Blocks are claimed from an atomic counter and
//! results stored by index, so the outcome is identical to `Serial` for the
//! same configuration regardless of scheduling.

use perptail_core::Executor;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Mutex;

#[derive(Debug, Clone, Copy)]
pub struct ThreadExecutor {
    pub threads: usize,
}

impl ThreadExecutor {
    pub fn new(threads: usize) -> Self {
        ThreadExecutor { threads: threads.max(1) }
    }
}

impl Executor for ThreadExecutor {
    fn run_blocks<T: Send>(&self, n_blocks: u32, f: &(dyn Fn(u32) -> T + Sync)) -> Vec<T> {
        let slots: Vec<Mutex<Option<T>>> = (0..n_blocks).map(|_| Mutex::new(None)).collect();
        let next = AtomicU32::new(0);
        let workers = self.threads.min(n_blocks.max(1) as usize);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= n_blocks {
                        break;
                    }
                    let out = f(i);
                    *slots[i as usize].lock().unwrap() = Some(out);
                });
            }
        });
        slots
            .into_iter()
            .map(|s| s.into_inner().unwrap().expect("block executed"))
            .collect()
    }
}
