const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of `g` on `[a, b]`.
///
/// Returns the best abscissa seen, which for a unimodal `g` lies within `tol` of the
/// true maximizer. Endpoints are evaluated too, so monotone functions end at the boundary.
pub(crate) fn golden_section_max<G: FnMut(f64) -> f64>(mut g: G, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut best = (lo, g(lo));
    let end = (hi, g(hi));
    if end.1 > best.1 {
        best = end;
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    while hi - lo > tol {
        if g1 >= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        }
    }
    for cand in [(x1, g1), (x2, g2)] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}
