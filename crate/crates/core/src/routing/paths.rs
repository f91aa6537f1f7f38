//! Depth-first enumeration of bounded simple paths.

use crate::error::Result;
use crate::netgraph::{Network, NodeId};

/// Every simple path from `s` to `d` with at most `cutoff` hops, in
/// lexicographic order of node sequences.
pub fn enumerate_paths(net: &Network, s: NodeId, d: NodeId, cutoff: usize) -> Result<Vec<Vec<NodeId>>> {
    let mut out = Vec::new();
    for_each_path(net, s, d, cutoff, |p| out.push(p.to_vec()))?;
    Ok(out)
}

/// Streams the paths of [`enumerate_paths`] to `visit` without collecting them.
pub fn for_each_path(
    net: &Network,
    s: NodeId,
    d: NodeId,
    cutoff: usize,
    mut visit: impl FnMut(&[NodeId]),
) -> Result<()> {
    net.check_node(s)?;
    net.check_node(d)?;
    if s != d {
        search_from_prefix(net, &[s], d, cutoff, &|_, _, _| false, &mut |p, _| visit(p));
    }
    Ok(())
}

/// Extends `prefix` to `d` depth-first. `prune(min_egr, hops, last)` is asked
/// about every extended prefix before descending into it; `visit` gets each
/// complete path with its minimum EGR.
pub(crate) fn search_from_prefix(
    net: &Network,
    prefix: &[NodeId],
    d: NodeId,
    cutoff: usize,
    prune: &dyn Fn(u32, usize, NodeId) -> bool,
    visit: &mut dyn FnMut(&[NodeId], u32),
) {
    let hops = prefix.len().saturating_sub(1);
    if hops > cutoff {
        return;
    }
    let mut on_path = vec![false; net.node_count()];
    for &n in prefix {
        if on_path[n.index()] {
            return;
        }
        on_path[n.index()] = true;
    }
    let min_egr = net
        .path_channels(prefix)
        .expect("prefix follows channels")
        .into_iter()
        .map(|ch| net.channel(ch).egr)
        .min()
        .unwrap_or(u32::MAX);
    let last = *prefix.last().expect("prefix is non-empty");
    if prune(min_egr, hops, last) {
        return;
    }
    let mut path = prefix.to_vec();
    if last == d {
        visit(&path, min_egr);
        return;
    }
    dfs(net, d, cutoff, min_egr, &mut path, &mut on_path, prune, visit);
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    net: &Network,
    d: NodeId,
    cutoff: usize,
    min_egr: u32,
    path: &mut Vec<NodeId>,
    on_path: &mut [bool],
    prune: &dyn Fn(u32, usize, NodeId) -> bool,
    visit: &mut dyn FnMut(&[NodeId], u32),
) {
    if path.len() > cutoff {
        return;
    }
    let u = *path.last().unwrap();
    for &(v, ch) in net.neighbors(u) {
        if on_path[v.index()] {
            continue;
        }
        let egr = min_egr.min(net.channel(ch).egr);
        if prune(egr, path.len(), v) {
            continue;
        }
        path.push(v);
        if v == d {
            visit(path, egr);
        } else {
            on_path[v.index()] = true;
            dfs(net, d, cutoff, egr, path, on_path, prune, visit);
            on_path[v.index()] = false;
        }
        path.pop();
    }
}
