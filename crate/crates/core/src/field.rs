//! Scalar-field templates: the grayscale image robots read to find the
//! target shape. Zero-valued cells form the goal region.

use crate::error::{param, Error, Result};
use crate::geom::{Segment, Vec2};
use crate::pnm::GrayImage;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// How a continuous point is read from the cell grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    #[default]
    Bilinear,
    Nearest,
}

impl SampleMode {
    pub const NAMES: [&'static str; 2] = ["bilinear", "nearest"];

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "bilinear" => Ok(SampleMode::Bilinear),
            "nearest" => Ok(SampleMode::Nearest),
            _ => Err(Error::UnknownStrategy {
                kind: "sample mode",
                name: name.to_string(),
                expected: Self::NAMES.join(", "),
            }),
        }
    }
}

/// Immutable grid of field values in [0, 1].
///
/// Cell `(ix, iy)` is centred on world point `((ix + 0.5) * cell_size,
/// (iy + 0.5) * cell_size)`; `iy = 0` is the bottom row of the arena, which
/// is the last row of the corresponding image.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    cell_size: f64,
    values: Vec<f64>,
    mode: SampleMode,
}

impl ScalarField {
    /// Build a field from raw row-major values (bottom row first).
    pub fn from_values(width: usize, height: usize, cell_size: f64, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(param("field", "field must have at least one cell"));
        }
        if values.len() != width * height {
            return Err(param("field", "value count does not match dimensions"));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(param("cell_size", "must be positive"));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(param("field", format!("value {v} outside [0, 1]")));
        }
        Ok(ScalarField {
            width,
            height,
            cell_size,
            values,
            mode: SampleMode::Bilinear,
        })
    }

    pub fn with_sample_mode(mut self, mode: SampleMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn sample_mode(&self) -> SampleMode {
        self.mode
    }

    /// Arena extent covered by the field, in world units.
    pub fn extent(&self) -> Vec2 {
        Vec2::new(
            self.width as f64 * self.cell_size,
            self.height as f64 * self.cell_size,
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.width + ix]
    }

    pub fn cell_centre(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new(
            (ix as f64 + 0.5) * self.cell_size,
            (iy as f64 + 0.5) * self.cell_size,
        )
    }

    pub fn has_goal(&self) -> bool {
        self.values.iter().any(|&v| v == 0.0)
    }

    /// Indices `(ix, iy)` of every zero-valued cell.
    pub fn goal_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 0.0)
            .map(|(i, _)| (i % self.width, i / self.width))
    }

    /// Read the field at a continuous world point. Points outside the arena
    /// clamp to the nearest border cell.
    pub fn sample(&self, p: Vec2) -> f64 {
        match self.mode {
            SampleMode::Bilinear => self.sample_bilinear(p),
            SampleMode::Nearest => self.sample_nearest(p),
        }
    }

    pub fn sample_bilinear(&self, p: Vec2) -> f64 {
        let (ix, fx) = axis_weights(p.x / self.cell_size - 0.5, self.width);
        let (iy, fy) = axis_weights(p.y / self.cell_size - 0.5, self.height);
        let ix1 = (ix + 1).min(self.width - 1);
        let iy1 = (iy + 1).min(self.height - 1);
        let v00 = self.get(ix, iy);
        let v10 = self.get(ix1, iy);
        let v01 = self.get(ix, iy1);
        let v11 = self.get(ix1, iy1);
        let bottom = v00 + (v10 - v00) * fx;
        let top = v01 + (v11 - v01) * fx;
        bottom + (top - bottom) * fy
    }

    pub fn sample_nearest(&self, p: Vec2) -> f64 {
        let ix = ((p.x / self.cell_size).floor().max(0.0) as usize).min(self.width - 1);
        let iy = ((p.y / self.cell_size).floor().max(0.0) as usize).min(self.height - 1);
        self.get(ix, iy)
    }

    /// Decode a grayscale raster: value = pixel / 255.
    pub fn from_image(image: &GrayImage, cell_size: f64) -> Result<Self> {
        if image.width == 0 || image.height == 0 || image.pixels.len() != image.width * image.height {
            return Err(Error::Format("empty or malformed image".into()));
        }
        let mut values = Vec::with_capacity(image.pixels.len());
        for iy in 0..image.height {
            let row = image.height - 1 - iy;
            values.extend(
                image.pixels[row * image.width..(row + 1) * image.width]
                    .iter()
                    .map(|&px| px as f64 / 255.0),
            );
        }
        Self::from_values(image.width, image.height, cell_size, values)
    }

    /// Encode as an 8-bit raster, rounding each value to the nearest level.
    pub fn to_image(&self) -> GrayImage {
        let mut img = GrayImage::new(self.width, self.height, 0);
        for iy in 0..self.height {
            let row = self.height - 1 - iy;
            for ix in 0..self.width {
                img.pixels[row * self.width + ix] = (self.get(ix, iy) * 255.0).round() as u8;
            }
        }
        img
    }
}

/// Lower cell index and fractional weight along one axis, clamped so that
/// points beyond the outermost cell centres read the border cell.
fn axis_weights(u: f64, n: usize) -> (usize, f64) {
    if n == 1 || u <= 0.0 {
        return (0, 0.0);
    }
    let max = (n - 1) as f64;
    if u >= max {
        return (n - 1, 0.0);
    }
    let i = u.floor();
    (i as usize, u - i)
}

/// Load an 8-bit grayscale image as a field.
pub fn load_field(image: &GrayImage, cell_size: f64) -> Result<ScalarField> {
    ScalarField::from_image(image, cell_size)
}

/// Value as a function of distance beyond the goal edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// 1 at the goal edge, falling linearly to `floor` at `falloff` beyond it.
    /// This is the orientation the controller's orderings are tuned for.
    Falling { floor: f64 },
    /// 0 at the goal edge, rising linearly to 1 at `falloff` beyond it.
    Rising,
}

impl Default for Profile {
    fn default() -> Self {
        Profile::Falling { floor: 0.2 }
    }
}

impl Profile {
    pub const NAMES: [&'static str; 2] = ["falling", "rising"];

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "falling" => Ok(Profile::default()),
            "rising" => Ok(Profile::Rising),
            _ => Err(Error::UnknownStrategy {
                kind: "field profile",
                name: name.to_string(),
                expected: Self::NAMES.join(", "),
            }),
        }
    }

    /// `d` is the distance to the target shape, not to the goal edge.
    pub fn value(&self, d: f64, goal_halfwidth: f64, falloff: f64) -> f64 {
        if d <= goal_halfwidth {
            return 0.0;
        }
        let u = ((d - goal_halfwidth) / falloff).min(1.0);
        match *self {
            Profile::Falling { floor } => 1.0 - (1.0 - floor) * u,
            Profile::Rising => u,
        }
    }
}

/// Parameters of the procedural goal shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeParams {
    pub width: f64,
    pub height: f64,
    pub goal_halfwidth: f64,
    pub falloff: f64,
    pub cell_size: f64,
    pub profile: Profile,
}

impl Default for ShapeParams {
    fn default() -> Self {
        ShapeParams {
            width: 800.0,
            height: 800.0,
            goal_halfwidth: 65.0,
            falloff: 600.0,
            cell_size: 2.0,
            profile: Profile::default(),
        }
    }
}

/// Rasterise the distance-to-shape profile for a union of segments.
pub fn generate_segments_field(params: &ShapeParams, segments: &[Segment]) -> Result<ScalarField> {
    if !(params.goal_halfwidth > 0.0) {
        return Err(param("goal_halfwidth", "must be > 0"));
    }
    if !(params.falloff > 0.0) {
        return Err(param("falloff", "must be > 0"));
    }
    if !(params.cell_size > 0.0) {
        return Err(param("cell_size", "must be > 0"));
    }
    if !(params.width > 0.0 && params.height > 0.0) {
        return Err(param("width", "arena dimensions must be > 0"));
    }
    if let Profile::Falling { floor } = params.profile {
        if !(0.0 < floor && floor <= 1.0) {
            return Err(param("profile.floor", "must lie in (0, 1]"));
        }
    }
    if segments.is_empty() {
        return Err(param("segments", "at least one segment is required"));
    }
    let inside = |p: Vec2| (0.0..=params.width).contains(&p.x) && (0.0..=params.height).contains(&p.y);
    for s in segments {
        if !inside(s.a) || !inside(s.b) {
            return Err(param("segment", "endpoint lies outside the arena"));
        }
    }
    let w = (params.width / params.cell_size).round().max(1.0) as usize;
    let h = (params.height / params.cell_size).round().max(1.0) as usize;
    let mut values = Vec::with_capacity(w * h);
    for iy in 0..h {
        for ix in 0..w {
            let p = Vec2::new(
                (ix as f64 + 0.5) * params.cell_size,
                (iy as f64 + 0.5) * params.cell_size,
            );
            let d = segments
                .iter()
                .map(|s| s.distance(p))
                .fold(f64::INFINITY, f64::min);
            values.push(params.profile.value(d, params.goal_halfwidth, params.falloff));
        }
    }
    ScalarField::from_values(w, h, params.cell_size, values)
}

pub fn generate_line_field(params: &ShapeParams, segment: Segment) -> Result<ScalarField> {
    generate_segments_field(params, &[segment])
}

/// Two segments sharing a corner; distance is taken to their union.
pub fn generate_l_field(params: &ShapeParams, arms: [Segment; 2]) -> Result<ScalarField> {
    generate_segments_field(params, &arms)
}

/// Where a trial's field comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Line {
        #[serde(default = "default_line")]
        segment: Segment,
        #[serde(default)]
        shape: ShapeParams,
    },
    L {
        #[serde(default = "default_l")]
        arms: [Segment; 2],
        #[serde(default)]
        shape: ShapeParams,
    },
    Image {
        path: PathBuf,
        #[serde(default = "default_cell_size")]
        cell_size: f64,
    },
}

fn default_cell_size() -> f64 {
    ShapeParams::default().cell_size
}

pub fn default_line() -> Segment {
    Segment::new(Vec2::new(200.0, 400.0), Vec2::new(600.0, 400.0))
}

pub fn default_l() -> [Segment; 2] {
    [
        Segment::new(Vec2::new(250.0, 600.0), Vec2::new(250.0, 250.0)),
        Segment::new(Vec2::new(250.0, 250.0), Vec2::new(600.0, 250.0)),
    ]
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::line()
    }
}

impl FieldSpec {
    pub fn line() -> Self {
        FieldSpec::Line {
            segment: default_line(),
            shape: ShapeParams::default(),
        }
    }

    pub fn l_shape() -> Self {
        FieldSpec::L {
            arms: default_l(),
            shape: ShapeParams::default(),
        }
    }

    pub fn build(&self) -> Result<ScalarField> {
        match self {
            FieldSpec::Line { segment, shape } => generate_line_field(shape, *segment),
            FieldSpec::L { arms, shape } => generate_l_field(shape, *arms),
            FieldSpec::Image { path, cell_size } => load_field(&GrayImage::read(path)?, *cell_size),
        }
    }
}
