use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::pauli::PauliWord;

/// Nested error sets of increasing size; training moves to the next set once
/// the success rate over the last `window` episodes reaches `threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurriculumPlan {
    pub tasks: Vec<Vec<PauliWord>>,
    pub threshold: f64,
    pub window: usize,
    current: usize,
    recent: VecDeque<bool>,
}

impl CurriculumPlan {
    pub fn new(tasks: Vec<Vec<PauliWord>>, threshold: f64, window: usize) -> Result<Self> {
        if tasks.is_empty() {
            return Err(Error::Invalid("curriculum needs at least one task".into()));
        }
        if window == 0 || !(0.0..=1.0).contains(&threshold) {
            return Err(Error::Invalid(format!("bad advancement rule: threshold {threshold}, window {window}")));
        }
        for (i, w) in tasks.windows(2).enumerate() {
            if w[1].len() <= w[0].len() || !w[0].iter().all(|e| w[1].contains(e)) {
                return Err(Error::Invalid(format!("task {} does not strictly extend task {i}", i + 1)));
            }
        }
        Ok(Self { tasks, threshold, window, current: 0, recent: VecDeque::new() })
    }

    /// Prefixes of `errors` with the given sizes; the last task is the full set.
    pub fn prefixes(errors: &[PauliWord], sizes: &[usize], threshold: f64, window: usize) -> Result<Self> {
        let mut tasks: Vec<Vec<PauliWord>> = sizes.iter().filter(|&&s| s < errors.len()).map(|&s| errors[..s].to_vec()).collect();
        tasks.push(errors.to_vec());
        Self::new(tasks, threshold, window)
    }

    pub fn current(&self) -> usize {
        self.current
    }

    pub fn task(&self) -> &[PauliWord] {
        &self.tasks[self.current]
    }

    pub fn is_last(&self) -> bool {
        self.current + 1 == self.tasks.len()
    }

    /// Records an episode outcome; returns true when the plan advanced.
    pub fn record(&mut self, success: bool) -> bool {
        self.recent.push_back(success);
        if self.recent.len() > self.window {
            self.recent.pop_front();
        }
        let full = self.recent.len() == self.window;
        let rate = self.recent.iter().filter(|&&s| s).count() as f64 / self.window as f64;
        if full && rate >= self.threshold && !self.is_last() {
            self.current += 1;
            self.recent.clear();
            return true;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xs() -> Vec<PauliWord> {
        (0..3).map(|q| PauliWord::x_on(2, 3, q)).collect()
    }

    #[test]
    fn advances_after_window() {
        let mut plan = CurriculumPlan::prefixes(&xs(), &[1, 2], 0.9, 10).unwrap();
        assert_eq!(plan.tasks.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 2, 3]);
        for _ in 0..9 {
            assert!(!plan.record(true));
        }
        assert!(plan.record(true));
        assert_eq!(plan.current(), 1);
        for _ in 0..5 {
            plan.record(false);
        }
        for _ in 0..8 {
            assert!(!plan.record(true));
        }
        assert!(plan.record(true));
        assert!(plan.is_last());
        for _ in 0..20 {
            assert!(!plan.record(true));
        }
    }

    #[test]
    fn rejects_non_increasing_tasks() {
        let e = xs();
        assert!(CurriculumPlan::new(vec![e[..2].to_vec(), e[..2].to_vec()], 0.9, 10).is_err());
        assert!(CurriculumPlan::new(vec![e[1..].to_vec(), e[..1].to_vec()], 0.9, 10).is_err());
        assert!(CurriculumPlan::new(vec![vec![e[0].clone()], vec![e[1].clone(), e[2].clone()]], 0.9, 10).is_err());
        assert!(CurriculumPlan::new(vec![], 0.9, 10).is_err());
    }
}
