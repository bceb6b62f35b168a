//! Seeded random generators for test geometry: generalized strips with
//! grid-aligned boundary breakpoints and Lipschitz boundary data, and
//! serpentine multi-channel regions with wall openings and optional island
//! holes, used to exercise the decomposition and reduction machinery.

use rand::Rng;

use crate::geometry::{
    build_generalized_strip, point, PiecewiseLinearFn, PlanarDomain, Point, Rectangle, Region,
};
use crate::solver::{BoundaryData, CapSpec};

/// Parameters for [`random_strip`].
#[derive(Debug, Clone)]
pub struct StripConfig {
    pub x_range: (f64, f64),
    /// Mesh columns the breakpoints must align with.
    pub nx: usize,
    /// Breakpoints sit on every `breakpoint_stride`-th grid line.
    pub breakpoint_stride: usize,
    /// Channel half-width range; widths stay in twice this range.
    pub half_width_range: (f64, f64),
    /// Bound on the wandering of the channel centerline.
    pub center_amplitude: f64,
    /// Bound on |f| for the boundary data.
    pub data_amplitude: f64,
    /// Lipschitz bound on the boundary data.
    pub data_slope: f64,
    /// Bound on |f+ - f-|; kept small so the generated problems stay
    /// solvable on narrow channels.
    pub offset_amplitude: f64,
}

impl Default for StripConfig {
    fn default() -> StripConfig {
        StripConfig {
            x_range: (0.0, 8.0),
            nx: 64,
            breakpoint_stride: 8,
            half_width_range: (0.25, 0.4),
            center_amplitude: 0.15,
            data_amplitude: 0.25,
            data_slope: 0.5,
            offset_amplitude: 0.2,
        }
    }
}

/// A generated strip domain together with matching boundary data.
#[derive(Debug, Clone)]
pub struct SyntheticStrip {
    pub domain: PlanarDomain,
    pub data: BoundaryData,
}

fn bounded_walk(
    rng: &mut impl Rng,
    xs: &[f64],
    amplitude: f64,
    slope: f64,
) -> Vec<f64> {
    let mut values = Vec::with_capacity(xs.len());
    let mut v = rng.gen_range(-amplitude..=amplitude);
    values.push(v);
    for w in xs.windows(2) {
        let step = slope * (w[1] - w[0]);
        v = (v + rng.gen_range(-step..=step)).clamp(-amplitude, amplitude);
        values.push(v);
    }
    values
}

/// Draw a generalized strip whose boundary breakpoints sit exactly on mesh
/// grid lines (so the meshed boundary equals the exact boundary), with
/// Lipschitz piecewise-linear data on both curves and linearly interpolated
/// cap data.
pub fn random_strip(cfg: &StripConfig, rng: &mut impl Rng) -> SyntheticStrip {
    assert!(cfg.breakpoint_stride > 0, "stride must be positive");
    assert!(
        cfg.nx % cfg.breakpoint_stride == 0,
        "stride must divide the column count"
    );
    let (xl, xr) = cfg.x_range;
    let cols = cfg.nx / cfg.breakpoint_stride;
    let xs: Vec<f64> = (0..=cols)
        .map(|k| xl + (xr - xl) * ((k * cfg.breakpoint_stride) as f64 / cfg.nx as f64))
        .collect();

    let centers = bounded_walk(rng, &xs, cfg.center_amplitude, 0.25);
    let (w_lo, w_hi) = cfg.half_width_range;
    let mut b_minus = Vec::with_capacity(xs.len());
    let mut b_plus = Vec::with_capacity(xs.len());
    for (k, &x) in xs.iter().enumerate() {
        let w = rng.gen_range(w_lo..=w_hi);
        b_minus.push((x, centers[k] - w));
        b_plus.push((x, centers[k] + w));
    }
    let domain = build_generalized_strip(
        PiecewiseLinearFn::new(b_minus).expect("breakpoints are strictly increasing"),
        PiecewiseLinearFn::new(b_plus).expect("breakpoints are strictly increasing"),
        cfg.x_range,
        false,
    )
    .expect("generated curves keep a positive gap");

    let lower = bounded_walk(rng, &xs, cfg.data_amplitude, cfg.data_slope);
    let offsets = bounded_walk(rng, &xs, cfg.offset_amplitude, 0.5 * cfg.data_slope);
    let f_minus: Vec<(f64, f64)> = xs.iter().copied().zip(lower.iter().copied()).collect();
    let f_plus: Vec<(f64, f64)> = xs
        .iter()
        .copied()
        .zip(lower.iter().zip(&offsets).map(|(v, o)| v + o))
        .collect();
    let data = BoundaryData::strip(
        PiecewiseLinearFn::new(f_minus).unwrap(),
        PiecewiseLinearFn::new(f_plus).unwrap(),
        CapSpec::Linear,
        CapSpec::Linear,
    );
    SyntheticStrip { domain, data }
}

/// Stacked full-width channels joined through one opening per wall,
/// optionally with rectangular island holes inside channels.
#[derive(Debug, Clone)]
pub struct Serpentine {
    pub region: Region,
    /// (bottom, top) of each channel, bottom to top.
    pub channels: Vec<(f64, f64)>,
    /// (left, right) of the opening through the wall above channel i.
    pub connectors: Vec<(f64, f64)>,
    /// Island rectangles as (x_lo, x_hi, y_lo, y_hi).
    pub islands: Vec<(f64, f64, f64, f64)>,
    pub x_range: (f64, f64),
}

impl Serpentine {
    /// Rectangle centered on the channel stack with the given half-width;
    /// the half-height clears the outer walls by a margin.
    pub fn rect(&self, center_x: f64, a: f64) -> Rectangle {
        let bottom = self.channels.first().unwrap().0;
        let top = self.channels.last().unwrap().1;
        let cy = 0.5 * (bottom + top);
        Rectangle::new(point(center_x, cy), a, 0.5 * (top - bottom) + 0.3)
    }

    /// Point on the main piece of the wall above channel `wall` at
    /// abscissa `x` (the channel's top side).
    pub fn wall_probe(&self, wall: usize, x: f64) -> Point {
        point(x, self.channels[wall].1)
    }

    pub fn num_walls(&self) -> usize {
        self.channels.len() - 1
    }

    /// Vertical two-point path from below the stack to above it.
    pub fn vertical_path(&self, x: f64, rect: Rectangle) -> Vec<Point> {
        vec![point(x, rect.bottom()), point(x, rect.top())]
    }
}

/// Build the serpentine outline and its island holes. Channels must be
/// strictly stacked, every wall needs one opening strictly inside the x
/// range, and islands must sit strictly inside a channel.
pub fn serpentine(
    x_range: (f64, f64),
    channels: Vec<(f64, f64)>,
    connectors: Vec<(f64, f64)>,
    islands: Vec<(f64, f64, f64, f64)>,
) -> Serpentine {
    let (xl, xr) = x_range;
    let k = channels.len();
    assert!(k >= 2, "a serpentine needs at least two channels");
    assert_eq!(connectors.len(), k - 1, "one opening per wall");
    for i in 0..k {
        assert!(channels[i].0 < channels[i].1, "channel {i} is inverted");
        if i + 1 < k {
            assert!(
                channels[i].1 < channels[i + 1].0,
                "channels {i} and {} overlap",
                i + 1
            );
            let (cl, cr) = connectors[i];
            assert!(xl < cl && cl < cr && cr < xr, "opening {i} out of range");
        }
    }

    let mut outline = vec![point(xl, channels[0].0), point(xr, channels[0].0)];
    for i in 0..k {
        outline.push(point(xr, channels[i].1));
        if i + 1 < k {
            let (_, cr) = connectors[i];
            outline.push(point(cr, channels[i].1));
            outline.push(point(cr, channels[i + 1].0));
            outline.push(point(xr, channels[i + 1].0));
        }
    }
    outline.push(point(xl, channels[k - 1].1));
    for i in (0..k - 1).rev() {
        let (cl, _) = connectors[i];
        outline.push(point(xl, channels[i + 1].0));
        outline.push(point(cl, channels[i + 1].0));
        outline.push(point(cl, channels[i].1));
        outline.push(point(xl, channels[i].1));
    }

    let mut loops = vec![outline];
    for &(x0, x1, y0, y1) in &islands {
        assert!(x0 < x1 && y0 < y1, "island is inverted");
        assert!(xl < x0 && x1 < xr, "island leaves the x range");
        assert!(
            channels.iter().any(|&(lo, hi)| lo < y0 && y1 < hi),
            "island must sit strictly inside a channel"
        );
        loops.push(vec![
            point(x0, y0),
            point(x1, y0),
            point(x1, y1),
            point(x0, y1),
        ]);
    }
    let region = Region::from_loops(loops).expect("serpentine outline is a valid region");
    Serpentine {
        region,
        channels,
        connectors,
        islands,
        x_range,
    }
}

/// Parameters for [`random_serpentine`].
#[derive(Debug, Clone)]
pub struct SerpentineConfig {
    /// Inclusive range for the channel count.
    pub channels: (usize, usize),
    pub x_range: (f64, f64),
    /// Center of the clipping rectangle the caller will use.
    pub rect_center_x: f64,
    /// Parent rectangle half-width.
    pub a: f64,
    /// Narrowed rectangle half-width; wall openings are placed in the
    /// margin bands between `a_prime` and `a` so narrowing separates the
    /// channels.
    pub a_prime: f64,
    pub channel_height: (f64, f64),
    pub wall_thickness: (f64, f64),
    /// Chance of an island hole per channel.
    pub island_probability: f64,
}

impl Default for SerpentineConfig {
    fn default() -> SerpentineConfig {
        SerpentineConfig {
            channels: (2, 5),
            x_range: (0.0, 10.0),
            rect_center_x: 5.0,
            a: 1.5,
            a_prime: 1.2,
            channel_height: (0.3, 0.8),
            wall_thickness: (0.2, 0.5),
            island_probability: 0.3,
        }
    }
}

fn random_opening(cfg: &SerpentineConfig, rng: &mut impl Rng) -> (f64, f64) {
    let xc = cfg.rect_center_x;
    let band = if rng.gen_bool(0.5) {
        (xc + cfg.a_prime, xc + cfg.a)
    } else {
        (xc - cfg.a, xc - cfg.a_prime)
    };
    let m = band.1 - band.0;
    let width = rng.gen_range(0.3 * m..=0.5 * m);
    let pad = 0.1 * m;
    let lo = rng.gen_range(band.0 + pad..=band.1 - pad - width);
    (lo, lo + width)
}

/// Draw a serpentine with random channel heights, wall thicknesses, wall
/// openings in the rectangle's margin bands, and occasional islands.
pub fn random_serpentine(cfg: &SerpentineConfig, rng: &mut impl Rng) -> Serpentine {
    assert!(cfg.a_prime > 0.0 && cfg.a_prime < cfg.a, "need 0 < a_prime < a");
    let k = rng.gen_range(cfg.channels.0..=cfg.channels.1);
    let mut channels = Vec::with_capacity(k);
    let mut y = 0.0;
    for i in 0..k {
        let h = rng.gen_range(cfg.channel_height.0..=cfg.channel_height.1);
        channels.push((y, y + h));
        y += h;
        if i + 1 < k {
            y += rng.gen_range(cfg.wall_thickness.0..=cfg.wall_thickness.1);
        }
    }
    let connectors: Vec<(f64, f64)> = (0..k - 1).map(|_| random_opening(cfg, rng)).collect();

    let mut islands = Vec::new();
    for &(lo, hi) in &channels {
        if !rng.gen_bool(cfg.island_probability) {
            continue;
        }
        let half_w = rng.gen_range(0.1..=0.25) * cfg.a_prime;
        let off = rng.gen_range(-0.5..=0.5) * cfg.a_prime;
        let cx = cfg.rect_center_x + off;
        let half_h = 0.2 * (hi - lo);
        let cy = 0.5 * (lo + hi);
        islands.push((cx - half_w, cx + half_w, cy - half_h, cy + half_h));
    }
    serpentine(cfg.x_range, channels, connectors, islands)
}

/// Deterministic serpentine with `k` equal channels and openings on
/// alternating sides; the shape drawn by narrowing its rectangle is a comb.
pub fn comb(k: usize, cfg: &SerpentineConfig) -> Serpentine {
    let xc = cfg.rect_center_x;
    let channels: Vec<(f64, f64)> = (0..k)
        .map(|i| (0.8 * i as f64, 0.8 * i as f64 + 0.5))
        .collect();
    let connectors: Vec<(f64, f64)> = (0..k - 1)
        .map(|i| {
            let band = if i % 2 == 0 {
                (xc + cfg.a_prime, xc + cfg.a)
            } else {
                (xc - cfg.a, xc - cfg.a_prime)
            };
            let m = band.1 - band.0;
            (band.0 + 0.3 * m, band.1 - 0.3 * m)
        })
        .collect();
    serpentine(cfg.x_range, channels, connectors, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimates::replay_theorem1_reduction;
    use crate::geometry::{
        clip_decompose, lemma1_witness, partition_lambda, trace_path, Label, RegionLocation,
    };
    use crate::mesh::generate_strip_mesh;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_strips_have_bounded_widths_and_mesh_cleanly() {
        let cfg = StripConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let strip = random_strip(&cfg, &mut rng);
            let (xl, xr) = strip.domain.x_range();
            for k in 0..=100 {
                let x = xl + (xr - xl) * (k as f64 / 100.0);
                let w = strip.domain.width_at(x).unwrap();
                assert!(w > 0.0 && w <= 0.8 + 1e-12, "width {w} out of range");
            }
            let mesh = generate_strip_mesh(&strip.domain, cfg.nx, 8).unwrap();
            assert!(mesh.total_area() > 0.0);
        }
    }

    #[test]
    fn strip_breakpoints_sit_on_grid_lines() {
        let cfg = StripConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let strip = random_strip(&cfg, &mut rng);
        let (xl, xr) = cfg.x_range;
        for &(x, _) in strip.domain.b_minus().breakpoints() {
            let steps = (x - xl) / (xr - xl) * cfg.nx as f64;
            assert!(
                (steps - steps.round()).abs() < 1e-9,
                "breakpoint {x} off-grid"
            );
        }
    }

    #[test]
    fn strip_data_respects_amplitude_and_offset_bounds() {
        let cfg = StripConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..10 {
            let strip = random_strip(&cfg, &mut rng);
            let fm = strip.data.f_minus().unwrap();
            let fp = strip.data.f_plus().unwrap();
            let (lo, hi) = fm.min_max_on_domain();
            assert!(lo >= -cfg.data_amplitude - 1e-12 && hi <= cfg.data_amplitude + 1e-12);
            for k in 0..=64 {
                let (xl, xr) = cfg.x_range;
                let x = xl + (xr - xl) * (k as f64 / 64.0);
                let gap = (fp.eval(x) - fm.eval(x)).abs();
                assert!(gap <= cfg.offset_amplitude + 1e-12);
            }
        }
    }

    #[test]
    fn comb_clips_into_one_component_with_two_crossing_arcs() {
        let cfg = SerpentineConfig::default();
        let sp = comb(3, &cfg);
        let rect = sp.rect(cfg.rect_center_x, cfg.a);
        let decomp = clip_decompose(&sp.region, rect).unwrap();
        let crossing = decomp
            .components
            .iter()
            .filter(|c| c.is_crossing_arc())
            .count();
        assert_eq!(crossing, 2);
        assert_eq!(decomp.components.len(), 6);
    }

    #[test]
    fn comb_reduction_selects_the_top_channel_by_default() {
        // All wall pieces keep the first label, so the first upper arc
        // carrying the second label is the top channel's.
        let cfg = SerpentineConfig::default();
        let sp = comb(3, &cfg);
        let rect = sp.rect(cfg.rect_center_x, cfg.a);
        let decomp = clip_decompose(&sp.region, rect).unwrap();
        let outcome = replay_theorem1_reduction(&decomp, cfg.a_prime, 1.0).unwrap();
        assert_eq!(outcome.total, 3);
        assert_eq!(outcome.i0, 3);
    }

    #[test]
    fn comb_reduction_honors_a_relabeled_wall() {
        let cfg = SerpentineConfig::default();
        let sp = comb(3, &cfg);
        let rect = sp.rect(cfg.rect_center_x, cfg.a);
        let decomp = clip_decompose(&sp.region, rect).unwrap();
        let probe = sp.wall_probe(1, cfg.rect_center_x);
        let wall_idx = decomp.component_containing(probe).unwrap();
        let mut labels: Vec<Label> = decomp.components.iter().map(|c| c.label).collect();
        labels[wall_idx] = Label::Lambda2;
        let relabeled = partition_lambda(&decomp, &labels).unwrap();
        let outcome = replay_theorem1_reduction(&relabeled, cfg.a_prime, 1.0).unwrap();
        assert_eq!(outcome.i0, 2);
    }

    #[test]
    fn island_centers_are_outside_the_region() {
        let cfg = SerpentineConfig {
            island_probability: 1.0,
            ..SerpentineConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sp = random_serpentine(&cfg, &mut rng);
        assert!(!sp.islands.is_empty());
        for &(x0, x1, y0, y1) in &sp.islands {
            let center = point(0.5 * (x0 + x1), 0.5 * (y0 + y1));
            assert_eq!(sp.region.locate(center), RegionLocation::Outside);
        }
        let (lo, hi) = sp.channels[0];
        let inside = point(cfg.rect_center_x + 0.9 * cfg.a_prime, 0.5 * (lo + hi));
        assert_eq!(sp.region.locate(inside), RegionLocation::Inside);
    }

    #[test]
    fn random_serpentines_trace_with_chained_witnesses() {
        let cfg = SerpentineConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for trial in 0..30 {
            let sp = random_serpentine(&cfg, &mut rng);
            let rect = sp.rect(cfg.rect_center_x, cfg.a);
            let decomp = clip_decompose(&sp.region, rect).unwrap();
            let xp = cfg.rect_center_x + rng.gen_range(-0.9..=0.9) * cfg.a_prime;
            let path = sp.vertical_path(xp, rect);
            let trace = trace_path(&path, &decomp).unwrap();
            let n = trace.intervals.len();
            assert!(
                n >= sp.channels.len(),
                "trial {trial}: {n} intervals for {} channels",
                sp.channels.len()
            );
            for j in 1..n {
                let witness = lemma1_witness(&trace, j, j - 1).unwrap();
                assert_eq!(witness, j - 1, "trial {trial}");
            }
        }
    }
}
