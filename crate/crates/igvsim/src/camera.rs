//! Software-rasterized pinhole camera.
//!
//! Every pixel casts one 3D ray from the mounted camera position and takes
//! the color of the nearest hit: barrel cylinders (orange with two white
//! bands), box prisms (flat gray), the ground plane (paint or grass via the
//! scene's ground color), else sky. No lighting, no anti-aliasing, pure f64
//! math: two renders of the same state are byte-identical.
//!
//! Renders are organized around two cheap conservative culls so frame cost
//! tracks what is visible rather than scene size: obstacles are bucketed by
//! the image columns their silhouette can touch, and painted-line lookups go
//! through a uniform grid over the line segments.

use std::sync::Arc;

use crate::dynamics::RobotState;
use crate::geom::{point_segment_distance, ray_cylinder, ray_prism, wrap_angle, Ray3, Vec2, Vec3};
use crate::scene::{grass_rgb, paint_rgb, Rgb8, Scene};
use crate::sensors::{CameraFrame, CameraMount};

pub const BARREL_ORANGE: Rgb8 = [214, 80, 20];
pub const BARREL_BAND_WHITE: Rgb8 = [240, 240, 240];
pub const BOX_GRAY: Rgb8 = [200, 200, 200];
pub const SKY_BLUE: Rgb8 = [170, 200, 235];

/// White reflective bands on a barrel, as fractions of its height.
const BARREL_BANDS: [(f64, f64); 2] = [(0.30, 0.45), (0.60, 0.75)];

/// Uniform grid over line segments, inflated by each line's half width, so a
/// ground point only tests the segments that could possibly reach it. Lookups
/// agree exactly with the full scan in [`ground_color_at`].
struct LineGrid {
    cell: f64,
    min: Vec2,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<(u32, u32)>>,
}

impl LineGrid {
    fn build(scene: &Scene) -> Self {
        let cell = 1.0;
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for line in &scene.lines {
            let half = line.width / 2.0;
            for p in &line.points {
                lo.x = lo.x.min(p.x - half);
                lo.y = lo.y.min(p.y - half);
                hi.x = hi.x.max(p.x + half);
                hi.y = hi.y.max(p.y + half);
            }
        }
        if scene.lines.is_empty() || !lo.x.is_finite() {
            return LineGrid { cell, min: Vec2::new(0.0, 0.0), nx: 0, ny: 0, cells: vec![] };
        }
        let nx = ((hi.x - lo.x) / cell).floor() as usize + 1;
        let ny = ((hi.y - lo.y) / cell).floor() as usize + 1;
        let mut cells = vec![Vec::new(); nx * ny];
        for (li, line) in scene.lines.iter().enumerate() {
            let half = line.width / 2.0;
            for (si, seg) in line.points.windows(2).enumerate() {
                let sx0 = (seg[0].x.min(seg[1].x) - half - lo.x) / cell;
                let sx1 = (seg[0].x.max(seg[1].x) + half - lo.x) / cell;
                let sy0 = (seg[0].y.min(seg[1].y) - half - lo.y) / cell;
                let sy1 = (seg[0].y.max(seg[1].y) + half - lo.y) / cell;
                for cy in sy0.floor().max(0.0) as usize..=(sy1.floor() as usize).min(ny - 1) {
                    for cx in sx0.floor().max(0.0) as usize..=(sx1.floor() as usize).min(nx - 1) {
                        cells[cy * nx + cx].push((li as u32, si as u32));
                    }
                }
            }
        }
        LineGrid { cell, min: lo, nx, ny, cells }
    }

    fn candidates(&self, p: Vec2) -> &[(u32, u32)] {
        if self.nx == 0 {
            return &[];
        }
        let cx = (p.x - self.min.x) / self.cell;
        let cy = (p.y - self.min.y) / self.cell;
        if cx < 0.0 || cy < 0.0 {
            return &[];
        }
        let (cx, cy) = (cx.floor() as usize, cy.floor() as usize);
        if cx >= self.nx || cy >= self.ny {
            return &[];
        }
        &self.cells[cy * self.nx + cx]
    }
}

/// Reusable renderer for one scene; build once, render every frame.
pub struct CameraRenderer {
    scene: Arc<Scene>,
    grid: LineGrid,
}

#[derive(Clone, Copy)]
enum Surface {
    Sky,
    Ground,
    Barrel(u32),
    Box,
}

impl CameraRenderer {
    pub fn new(scene: Arc<Scene>) -> Self {
        let grid = LineGrid::build(&scene);
        CameraRenderer { scene, grid }
    }

    /// Ground color at `p`, via the segment grid. Exactly equal to
    /// [`ground_color_at`] for every point.
    fn ground_color(&self, p: Vec2) -> Rgb8 {
        let mut best: Option<(f64, u32)> = None;
        for &(li, si) in self.grid.candidates(p) {
            let line = &self.scene.lines[li as usize];
            let d = point_segment_distance(
                p,
                line.points[si as usize],
                line.points[si as usize + 1],
            );
            if d <= line.width / 2.0 && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, li));
            }
        }
        match best {
            Some((_, li)) => {
                paint_rgb(&self.scene.terrain, self.scene.lines[li as usize].intensity, p)
            }
            None => grass_rgb(&self.scene.terrain, p),
        }
    }

    pub fn render(&self, state: &RobotState, mount: &CameraMount) -> CameraFrame {
        let scene = &*self.scene;
        let w = usize::from(mount.width);
        let h = usize::from(mount.height);
        let theta = state.pose.heading;
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = mount.pitch_deg.to_radians().sin_cos();

        let cam = Vec3::new(
            state.pose.x + mount.offset[0] * ct - mount.offset[1] * st,
            state.pose.y + mount.offset[0] * st + mount.offset[1] * ct,
            mount.offset[2],
        );
        let fwd = Vec3::new(ct * cp, st * cp, -sp);
        let right = Vec3::new(st, -ct, 0.0);
        let up = Vec3::new(sp * ct, sp * st, cp);
        let f_px = (w as f64 / 2.0) / (mount.hfov_deg.to_radians() / 2.0).tan();

        // Horizontal ray denominators across the rows: the relative azimuth
        // of the pixel ray in column x is atan2(-x, f*cos(pitch) + y*sin(pitch)).
        let d_min = f_px * cp - (h as f64 / 2.0) * sp.abs();
        let d_max = f_px * cp + (h as f64 / 2.0) * sp.abs();

        // Pixel elevation bounds per row. Within one row the elevation is
        // extremal at the center and edge columns, and both curves fall
        // monotonically with the row index, so row ranges for an obstacle
        // reduce to two binary searches.
        let (el_hi, el_lo): (Vec<f64>, Vec<f64>) = (0..h)
            .map(|v| {
                let y = h as f64 / 2.0 - (v as f64 + 0.5);
                let dz = -f_px * sp + y * cp;
                let horiz_center = f_px * cp + y * sp;
                let x_max = w as f64 / 2.0;
                let horiz_edge = (horiz_center * horiz_center + x_max * x_max).sqrt();
                let a = dz.atan2(horiz_center);
                let b = dz.atan2(horiz_edge);
                (a.max(b), a.min(b))
            })
            .unzip();
        // Rows whose elevation interval can meet [bot, top].
        let row_range = |el_bot: f64, el_top: f64| -> Option<(usize, usize)> {
            let v_lo = el_lo.partition_point(|&e| e > el_top);
            let v_hi = el_hi.partition_point(|&e| e >= el_bot);
            if v_lo >= v_hi {
                None
            } else {
                (v_lo < h).then_some((v_lo, v_hi - 1))
            }
        };

        // Bucket each obstacle into the image columns its silhouette can
        // touch (conservative by one extra column each side), remembering the
        // rows it can appear in.
        let mut col_barrels: Vec<Vec<u32>> = vec![Vec::new(); w];
        let mut col_boxes: Vec<Vec<u32>> = vec![Vec::new(); w];
        let mut barrel_rows: Vec<(u32, u32)> = vec![(0, 0); scene.barrels.len()];
        let mut box_rows: Vec<(u32, u32)> = vec![(0, 0); scene.boxes.len()];
        {
            let bucket = |index: u32,
                              center: Vec2,
                              circumradius: f64,
                              height: f64,
                              out: &mut Vec<Vec<u32>>,
                              rows: &mut Vec<(u32, u32)>| {
                let delta = center - cam.xy();
                let dist = delta.norm();
                let d_near = (dist - circumradius).max(1e-6);
                let d_far = dist + circumradius;
                let el_top = (height - cam.z).atan2(d_near).max((height - cam.z).atan2(d_far));
                let el_bot = (-cam.z).atan2(d_near).min((-cam.z).atan2(d_far));
                let Some((v_lo, v_hi)) = row_range(el_bot, el_top) else {
                    return;
                };
                let (u_lo, u_hi) = if dist <= circumradius * 1.5 || d_min <= 0.0 {
                    (0, w - 1)
                } else {
                    let rel = wrap_angle(delta.y.atan2(delta.x) - theta);
                    let half = (circumradius / dist).min(1.0).asin();
                    // Beyond the widest pixel azimuth the obstacle is off
                    // screen entirely.
                    let max_off = (w as f64 / 2.0).atan2(d_min);
                    if rel - half > max_off || rel + half < -max_off {
                        return;
                    }
                    let psi_lo = (rel - half).clamp(-1.45, 1.45);
                    let psi_hi = (rel + half).clamp(-1.45, 1.45);
                    let x_lo = {
                        let t = psi_hi.tan();
                        -t * if t >= 0.0 { d_max } else { d_min }
                    };
                    let x_hi = {
                        let t = psi_lo.tan();
                        -t * if t <= 0.0 { d_max } else { d_min }
                    };
                    let u_lo = (x_lo + w as f64 / 2.0 - 0.5).floor() as i64 - 1;
                    let u_hi = (x_hi + w as f64 / 2.0 - 0.5).ceil() as i64 + 1;
                    if u_hi < 0 || u_lo >= w as i64 {
                        return;
                    }
                    (u_lo.max(0) as usize, (u_hi as usize).min(w - 1))
                };
                rows[index as usize] = (v_lo as u32, v_hi as u32);
                for col in &mut out[u_lo..=u_hi] {
                    col.push(index);
                }
            };
            for (i, b) in scene.barrels.iter().enumerate() {
                bucket(i as u32, b.center, b.radius, b.height, &mut col_barrels, &mut barrel_rows);
            }
            for (i, b) in scene.boxes.iter().enumerate() {
                bucket(
                    i as u32,
                    b.center,
                    b.half_extents.norm(),
                    b.height,
                    &mut col_boxes,
                    &mut box_rows,
                );
            }
        }

        let mut pixels = vec![0u8; w * h * 3];
        for v in 0..h {
            let y_img = h as f64 / 2.0 - (v as f64 + 0.5);
            let row_base = fwd * f_px + up * y_img;
            for u in 0..w {
                let x_img = (u as f64 + 0.5) - w as f64 / 2.0;
                // Not normalized: every kernel below handles non-unit
                // directions and only hit ordering matters.
                let dir = row_base + right * x_img;
                let ray = Ray3 { origin: cam, dir };

                let mut best_t = f64::INFINITY;
                let mut surface = Surface::Sky;
                for &bi in &col_barrels[u] {
                    let (r_lo, r_hi) = barrel_rows[bi as usize];
                    if (v as u32) < r_lo || (v as u32) > r_hi {
                        continue;
                    }
                    let b = &scene.barrels[bi as usize];
                    if let Some(t) = ray_cylinder(ray, b.center, b.radius, b.height) {
                        if t < best_t {
                            best_t = t;
                            surface = Surface::Barrel(bi);
                        }
                    }
                }
                for &bi in &col_boxes[u] {
                    let (r_lo, r_hi) = box_rows[bi as usize];
                    if (v as u32) < r_lo || (v as u32) > r_hi {
                        continue;
                    }
                    let b = &scene.boxes[bi as usize];
                    if let Some(t) = ray_prism(ray, b.center, b.half_extents, b.yaw, b.height) {
                        if t < best_t {
                            best_t = t;
                            surface = Surface::Box;
                        }
                    }
                }
                if dir.z < 0.0 {
                    let t = -cam.z / dir.z;
                    if t < best_t {
                        best_t = t;
                        surface = Surface::Ground;
                    }
                }

                let rgb = match surface {
                    Surface::Sky => SKY_BLUE,
                    Surface::Box => BOX_GRAY,
                    Surface::Ground => self.ground_color(ray.at(best_t).xy()),
                    Surface::Barrel(bi) => {
                        let b = &scene.barrels[bi as usize];
                        let rel = (cam.z + best_t * dir.z) / b.height;
                        if BARREL_BANDS.iter().any(|&(lo, hi)| rel >= lo && rel <= hi) {
                            BARREL_BAND_WHITE
                        } else {
                            BARREL_ORANGE
                        }
                    }
                };
                let at = (v * w + u) * 3;
                pixels[at..at + 3].copy_from_slice(&rgb);
            }
        }

        CameraFrame { width: mount.width, height: mount.height, pixels }
    }
}

/// One-shot render. For repeated frames of the same scene, build a
/// [`CameraRenderer`] once instead.
pub fn render_camera(scene: &Scene, state: &RobotState, mount: &CameraMount) -> CameraFrame {
    CameraRenderer::new(Arc::new(scene.clone())).render(state, mount)
}

/// Pixel accessor for tests and tools.
pub fn pixel(frame: &CameraFrame, u: usize, v: usize) -> Rgb8 {
    let at = (v * usize::from(frame.width) + u) * 3;
    [frame.pixels[at], frame.pixels[at + 1], frame.pixels[at + 2]]
}
