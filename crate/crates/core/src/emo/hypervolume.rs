/// Exact dominated area of a two-objective point set relative to `reference`.
///
/// Points that do not strictly dominate the reference contribute nothing and
/// are skipped.
pub fn hypervolume<T: AsRef<[f64]>>(front: &[T], reference: [f64; 2]) -> f64 {
    let mut pts: Vec<[f64; 2]> = front
        .iter()
        .map(|p| {
            let p = p.as_ref();
            [p[0], p[1]]
        })
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));

    let mut area = 0.0;
    let mut ceiling = reference[1];
    for p in pts {
        if p[1] < ceiling {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}
