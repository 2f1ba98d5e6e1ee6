use super::report::CampaignRow;

/// Smallest `k` whose LLP equals the final LLP, once a later row confirms
/// the plateau.
pub fn detect_k_longest(rows: &[CampaignRow]) -> Option<u64> {
    let last = rows.last()?;
    let first = rows.iter().position(|r| r.llp == last.llp)?;
    if first + 1 >= rows.len() {
        return None;
    }
    Some(rows[first].k)
}

/// Smallest `k` after `k_L` that starts `window` consecutive rows with no
/// new path.
pub fn detect_k_saturation(rows: &[CampaignRow], window: u64) -> Option<u64> {
    let window = window.max(1) as usize;
    let k_longest = detect_k_longest(rows);
    rows.windows(window)
        .find(|w| w.iter().all(|r| r.nfp == 0) && k_longest.is_none_or(|kl| w[0].k > kl))
        .map(|w| w[0].k)
}
