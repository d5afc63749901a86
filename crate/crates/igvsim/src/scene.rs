//! Course data model and its textual file format.
//!
//! A course is authored as a single JSON document, parsed into an immutable
//! [`Scene`]: geo anchor, terrain style, painted line paths, barrels, box
//! obstacles, spawn pose and an optional goal region. Angles in files are
//! degrees; the in-memory representation uses radians. Unknown keys are
//! rejected so a typo in an obstacle definition cannot silently vanish.

use crate::geom::{polyline_distance, Pose, Vec2};
use crate::noise::value_noise;

/// RGB color, 8 bits per channel.
pub type Rgb8 = [u8; 3];

/// Paint color of a line at full intensity.
pub const PAINT_WHITE: Rgb8 = [235, 235, 225];

/// Geodetic anchor of the world origin. The tangent-plane GPS mapping is
/// ill-conditioned near the poles, so |lat0| must stay below 89 degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeoOrigin {
    /// Latitude of the world origin, degrees.
    pub lat0: f64,
    /// Longitude of the world origin, degrees.
    pub lon0: f64,
}

/// Construction barrel: vertical cylinder resting on the ground.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Barrel {
    pub center: Vec2,
    pub radius: f64,
    pub height: f64,
}

/// Oriented box obstacle, extruded from the ground plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxObstacle {
    pub center: Vec2,
    pub half_extents: Vec2,
    /// Rotation of the footprint, radians CCW.
    pub yaw: f64,
    pub height: f64,
}

/// Painted line: a capsule band of `width` around a polyline centerline.
#[derive(Clone, Debug, PartialEq)]
pub struct LinePath {
    pub points: Vec<Vec2>,
    pub width: f64,
    /// Paint brightness in [0, 1].
    pub intensity: f64,
}

impl LinePath {
    /// Distance from `p` to the centerline.
    pub fn centerline_distance(&self, p: Vec2) -> f64 {
        polyline_distance(p, &self.points)
    }

    /// Whether `p` lies within the painted band.
    pub fn contains(&self, p: Vec2) -> bool {
        self.centerline_distance(p) <= self.width / 2.0
    }
}

/// Grass appearance: base color plus seeded value noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TerrainStyle {
    pub grass_base: Rgb8,
    /// Relative strength of the color variation, in [0, 1]. Zero disables
    /// noise on both grass and paint.
    pub noise_amplitude: f64,
    /// Meters per noise lattice cell.
    pub noise_scale: f64,
    pub noise_seed: i64,
}

impl Default for TerrainStyle {
    fn default() -> Self {
        TerrainStyle {
            grass_base: [70, 110, 58],
            noise_amplitude: 0.08,
            noise_scale: 0.35,
            noise_seed: 1,
        }
    }
}

/// Circular goal region; entering it ends a simulation run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Goal {
    pub center: Vec2,
    pub radius: f64,
}

/// A complete course. Immutable after parsing; share freely across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub geo: GeoOrigin,
    pub terrain: TerrainStyle,
    pub lines: Vec<LinePath>,
    pub barrels: Vec<Barrel>,
    pub boxes: Vec<BoxObstacle>,
    pub spawn: Pose,
    pub goal: Option<Goal>,
}

/// Errors from reading a scene file.
#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    /// Malformed JSON, unknown key, or missing required section. The message
    /// carries serde_json's line/column position.
    #[error("scene file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("scene file: {0}")]
    Io(#[from] std::io::Error),
}

/// One invariant violation found by [`validate_scene`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    LatOutOfRange(f64),
    LonOutOfRange(f64),
    /// |lat0| >= 89: tangent-plane cosine ill-conditioned.
    LatNearPole(f64),
    BarrelRadius { index: usize },
    BarrelHeight { index: usize },
    BoxExtents { index: usize },
    BoxHeight { index: usize },
    LineTooShort { index: usize },
    LineDuplicatePoint { index: usize, segment: usize },
    LineWidth { index: usize },
    LineIntensity { index: usize },
    NoiseAmplitude(f64),
    NoiseScale(f64),
    SpawnInsideBarrel { index: usize },
    SpawnInsideBox { index: usize },
    GoalRadius,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::LatOutOfRange(v) => write!(f, "geo.lat0 {v} outside [-90, 90]"),
            Violation::LonOutOfRange(v) => write!(f, "geo.lon0 {v} outside [-180, 180]"),
            Violation::LatNearPole(v) => write!(f, "geo.lat0 {v} too close to a pole (|lat0| >= 89)"),
            Violation::BarrelRadius { index } => write!(f, "barrels[{index}].radius must be > 0"),
            Violation::BarrelHeight { index } => write!(f, "barrels[{index}].height must be > 0"),
            Violation::BoxExtents { index } => write!(f, "boxes[{index}] half extents must be > 0"),
            Violation::BoxHeight { index } => write!(f, "boxes[{index}].height must be > 0"),
            Violation::LineTooShort { index } => write!(f, "lines[{index}] needs at least 2 points"),
            Violation::LineDuplicatePoint { index, segment } => {
                write!(f, "lines[{index}] has duplicate consecutive points at segment {segment}")
            }
            Violation::LineWidth { index } => write!(f, "lines[{index}].width must be > 0"),
            Violation::LineIntensity { index } => write!(f, "lines[{index}].intensity outside [0, 1]"),
            Violation::NoiseAmplitude(v) => write!(f, "terrain.noise_amplitude {v} outside [0, 1]"),
            Violation::NoiseScale(v) => write!(f, "terrain.noise_scale {v} must be > 0"),
            Violation::SpawnInsideBarrel { index } => {
                write!(f, "spawn overlaps obstacle: inside barrels[{index}]")
            }
            Violation::SpawnInsideBox { index } => {
                write!(f, "spawn overlaps obstacle: inside boxes[{index}]")
            }
            Violation::GoalRadius => write!(f, "goal.radius must be > 0"),
        }
    }
}

// --- file schema ---------------------------------------------------------
//
// The raw serde structs mirror the JSON layout exactly; conversion to the
// domain types handles the degree/radian boundary.

mod file {
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct SceneFile {
        pub geo: GeoFile,
        pub spawn: SpawnFile,
        #[serde(default)]
        pub terrain: TerrainFile,
        #[serde(default)]
        pub lines: Vec<LineFile>,
        #[serde(default)]
        pub barrels: Vec<BarrelFile>,
        #[serde(default)]
        pub boxes: Vec<BoxFile>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub goal: Option<GoalFile>,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct GeoFile {
        pub lat0: f64,
        pub lon0: f64,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct SpawnFile {
        pub x: f64,
        pub y: f64,
        pub heading_deg: f64,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct TerrainFile {
        pub grass_base: [u8; 3],
        pub noise_amplitude: f64,
        pub noise_scale: f64,
        pub noise_seed: i64,
    }

    impl Default for TerrainFile {
        fn default() -> Self {
            let t = super::TerrainStyle::default();
            TerrainFile {
                grass_base: t.grass_base,
                noise_amplitude: t.noise_amplitude,
                noise_scale: t.noise_scale,
                noise_seed: t.noise_seed,
            }
        }
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct LineFile {
        pub points: Vec<[f64; 2]>,
        pub width: f64,
        pub intensity: f64,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct BarrelFile {
        pub x: f64,
        pub y: f64,
        pub radius: f64,
        pub height: f64,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct BoxFile {
        pub x: f64,
        pub y: f64,
        pub hx: f64,
        pub hy: f64,
        pub yaw_deg: f64,
        pub height: f64,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct GoalFile {
        pub x: f64,
        pub y: f64,
        pub radius: f64,
    }
}

/// Degrees such that `deg.to_radians()` reproduces `rad` bit-exactly, when
/// such a value exists. Radians produced by parsing a degree field always
/// have one, which makes parse(serialize(scene)) an identity.
fn degrees_for(rad: f64) -> f64 {
    let deg = rad.to_degrees();
    if deg.to_radians() == rad {
        return deg;
    }
    let mut up = deg;
    let mut down = deg;
    for _ in 0..4 {
        up = up.next_up();
        if up.to_radians() == rad {
            return up;
        }
        down = down.next_down();
        if down.to_radians() == rad {
            return down;
        }
    }
    deg
}

/// Parse a scene file. Strict: any unknown key or missing required section
/// (`geo`, `spawn`) is an error carrying the offending key and position.
pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let raw: file::SceneFile = serde_json::from_str(text)?;
    Ok(Scene {
        geo: GeoOrigin { lat0: raw.geo.lat0, lon0: raw.geo.lon0 },
        terrain: TerrainStyle {
            grass_base: raw.terrain.grass_base,
            noise_amplitude: raw.terrain.noise_amplitude,
            noise_scale: raw.terrain.noise_scale,
            noise_seed: raw.terrain.noise_seed,
        },
        lines: raw
            .lines
            .into_iter()
            .map(|l| LinePath {
                points: l.points.iter().map(|p| Vec2::new(p[0], p[1])).collect(),
                width: l.width,
                intensity: l.intensity,
            })
            .collect(),
        barrels: raw
            .barrels
            .into_iter()
            .map(|b| Barrel {
                center: Vec2::new(b.x, b.y),
                radius: b.radius,
                height: b.height,
            })
            .collect(),
        boxes: raw
            .boxes
            .into_iter()
            .map(|b| BoxObstacle {
                center: Vec2::new(b.x, b.y),
                half_extents: Vec2::new(b.hx, b.hy),
                yaw: b.yaw_deg.to_radians(),
                height: b.height,
            })
            .collect(),
        spawn: Pose::new(raw.spawn.x, raw.spawn.y, raw.spawn.heading_deg.to_radians()),
        goal: raw.goal.map(|g| Goal { center: Vec2::new(g.x, g.y), radius: g.radius }),
    })
}

/// Read and parse a scene file from disk.
pub fn load_scene(path: &std::path::Path) -> Result<Scene, SceneError> {
    parse_scene(&std::fs::read_to_string(path)?)
}

/// Serialize a scene back to its file format (pretty-printed JSON).
pub fn serialize_scene(scene: &Scene) -> String {
    let raw = file::SceneFile {
        geo: file::GeoFile { lat0: scene.geo.lat0, lon0: scene.geo.lon0 },
        spawn: file::SpawnFile {
            x: scene.spawn.x,
            y: scene.spawn.y,
            heading_deg: degrees_for(scene.spawn.heading),
        },
        terrain: file::TerrainFile {
            grass_base: scene.terrain.grass_base,
            noise_amplitude: scene.terrain.noise_amplitude,
            noise_scale: scene.terrain.noise_scale,
            noise_seed: scene.terrain.noise_seed,
        },
        lines: scene
            .lines
            .iter()
            .map(|l| file::LineFile {
                points: l.points.iter().map(|p| [p.x, p.y]).collect(),
                width: l.width,
                intensity: l.intensity,
            })
            .collect(),
        barrels: scene
            .barrels
            .iter()
            .map(|b| file::BarrelFile {
                x: b.center.x,
                y: b.center.y,
                radius: b.radius,
                height: b.height,
            })
            .collect(),
        boxes: scene
            .boxes
            .iter()
            .map(|b| file::BoxFile {
                x: b.center.x,
                y: b.center.y,
                hx: b.half_extents.x,
                hy: b.half_extents.y,
                yaw_deg: degrees_for(b.yaw),
                height: b.height,
            })
            .collect(),
        goal: scene.goal.map(|g| file::GoalFile { x: g.center.x, y: g.center.y, radius: g.radius }),
    };
    serde_json::to_string_pretty(&raw).expect("scene serialization cannot fail")
}

/// Check every scene invariant; returns all violations found (empty = valid).
pub fn validate_scene(scene: &Scene) -> Vec<Violation> {
    let mut out = Vec::new();

    let lat = scene.geo.lat0;
    if !(-90.0..=90.0).contains(&lat) {
        out.push(Violation::LatOutOfRange(lat));
    } else if lat.abs() >= 89.0 {
        out.push(Violation::LatNearPole(lat));
    }
    if !(-180.0..=180.0).contains(&scene.geo.lon0) {
        out.push(Violation::LonOutOfRange(scene.geo.lon0));
    }

    if !(0.0..=1.0).contains(&scene.terrain.noise_amplitude) {
        out.push(Violation::NoiseAmplitude(scene.terrain.noise_amplitude));
    }
    if scene.terrain.noise_scale <= 0.0 {
        out.push(Violation::NoiseScale(scene.terrain.noise_scale));
    }

    for (index, b) in scene.barrels.iter().enumerate() {
        if b.radius <= 0.0 {
            out.push(Violation::BarrelRadius { index });
        }
        if b.height <= 0.0 {
            out.push(Violation::BarrelHeight { index });
        }
    }
    for (index, b) in scene.boxes.iter().enumerate() {
        if b.half_extents.x <= 0.0 || b.half_extents.y <= 0.0 {
            out.push(Violation::BoxExtents { index });
        }
        if b.height <= 0.0 {
            out.push(Violation::BoxHeight { index });
        }
    }
    for (index, l) in scene.lines.iter().enumerate() {
        if l.points.len() < 2 {
            out.push(Violation::LineTooShort { index });
        }
        for (segment, pair) in l.points.windows(2).enumerate() {
            if pair[0] == pair[1] {
                out.push(Violation::LineDuplicatePoint { index, segment });
            }
        }
        if l.width <= 0.0 {
            out.push(Violation::LineWidth { index });
        }
        if !(0.0..=1.0).contains(&l.intensity) {
            out.push(Violation::LineIntensity { index });
        }
    }

    let spawn = scene.spawn.position();
    for (index, b) in scene.barrels.iter().enumerate() {
        if b.radius > 0.0 && (spawn - b.center).norm() < b.radius {
            out.push(Violation::SpawnInsideBarrel { index });
        }
    }
    for (index, b) in scene.boxes.iter().enumerate() {
        let local = (spawn - b.center).rotated(-b.yaw);
        if local.x.abs() < b.half_extents.x && local.y.abs() < b.half_extents.y {
            out.push(Violation::SpawnInsideBox { index });
        }
    }

    if let Some(goal) = &scene.goal {
        if goal.radius <= 0.0 {
            out.push(Violation::GoalRadius);
        }
    }

    out
}

fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Paint color at `p`: white scaled by the line's intensity, with +-8
/// per-channel value noise at full terrain amplitude.
pub(crate) fn paint_rgb(t: &TerrainStyle, intensity: f64, p: Vec2) -> Rgb8 {
    let mut rgb = [0u8; 3];
    for (c, out) in rgb.iter_mut().enumerate() {
        let n = value_noise(t.noise_seed, c as u32, p.x, p.y, t.noise_scale);
        let offset = (2.0 * n - 1.0) * 8.0 * t.noise_amplitude;
        *out = quantize(f64::from(PAINT_WHITE[c]) * intensity + offset);
    }
    rgb
}

/// Grass color at `p`: one shared noise sample scales all channels, keeping
/// the hue.
pub(crate) fn grass_rgb(t: &TerrainStyle, p: Vec2) -> Rgb8 {
    let n = value_noise(t.noise_seed, 3, p.x, p.y, t.noise_scale);
    let factor = 1.0 + t.noise_amplitude * (2.0 * n - 1.0);
    let g = t.grass_base;
    [
        quantize(f64::from(g[0]) * factor),
        quantize(f64::from(g[1]) * factor),
        quantize(f64::from(g[2]) * factor),
    ]
}

/// Ground color at a world point: paint if `p` falls inside a line band
/// (nearest centerline wins when bands overlap), otherwise grass. Both are
/// modulated by seeded value noise, so the result is a pure function of
/// (scene, p). With `noise_amplitude` 0 the colors are exact.
pub fn ground_color_at(scene: &Scene, p: Vec2) -> Rgb8 {
    let mut best: Option<(f64, &LinePath)> = None;
    for line in &scene.lines {
        let d = line.centerline_distance(p);
        if d <= line.width / 2.0 && best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, line));
        }
    }
    match best {
        Some((_, line)) => paint_rgb(&scene.terrain, line.intensity, p),
        None => grass_rgb(&scene.terrain, p),
    }
}
