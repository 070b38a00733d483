//! Shiloach-Vishkin connected components.

use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};

use rayon::prelude::*;

use super::Mode;
use crate::graph::GraphView;

/// Component label per vertex: the smallest vertex ID of its component.
///
/// Hooking always points a root at a smaller label, so the minimum vertex of a
/// component stays a root and becomes everyone's label.
pub fn connected_components<G: GraphView>(g: &G, mode: Mode) -> Vec<u32> {
    let n = g.num_vertices();
    let comp: Vec<AtomicU32> = (0..n as u32).map(AtomicU32::new).collect();
    let get = |v: u32| comp[v as usize].load(Ordering::Relaxed);
    loop {
        let changed = AtomicBool::new(false);
        let hook = |v: u32| {
            g.for_each_neighbor(v, |u| {
                let (cv, cu) = (get(v), get(u));
                if cv == cu {
                    return;
                }
                let (high, low) = if cv > cu { (cv, cu) } else { (cu, cv) };
                if get(high) == high {
                    comp[high as usize].fetch_min(low, Ordering::Relaxed);
                    changed.store(true, Ordering::Relaxed);
                }
            });
        };
        let compress = |v: u32| {
            while get(v) != get(get(v)) {
                comp[v as usize].store(get(get(v)), Ordering::Relaxed);
            }
        };
        match mode {
            Mode::Sequential => {
                (0..n as u32).for_each(hook);
                (0..n as u32).for_each(compress);
            }
            Mode::Parallel => {
                (0..n as u32).into_par_iter().for_each(hook);
                (0..n as u32).into_par_iter().for_each(compress);
            }
        }
        if !changed.into_inner() {
            break;
        }
    }
    comp.into_iter().map(AtomicU32::into_inner).collect()
}

pub fn component_count(labels: &[u32]) -> usize {
    labels.iter().enumerate().filter(|&(v, &l)| v as u32 == l).count()
}
