//! Headless rasterisation of world frames and flow fields.
//!
//! World point `(x, y)` maps to pixel column `floor(x * scale)` and row
//! `floor((height - y) * scale)`, so +y points up the image.

use crate::field::ScalarField;
use crate::geom::Vec2;
use crate::pnm::RgbImage;
use crate::world::World;

pub const GOAL_RGB: [u8; 3] = [40, 70, 160];
pub const PUCK_RGB: [u8; 3] = [220, 40, 30];
pub const ROBOT_RGB: [u8; 3] = [30, 160, 60];
pub const HEADING_RGB: [u8; 3] = [255, 255, 255];
pub const ARROW_RGB: [u8; 3] = [250, 200, 0];

/// World-to-pixel mapping for an arena of a given height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelTransform {
    pub scale: f64,
    pub arena_height: f64,
}

impl PixelTransform {
    pub fn to_pixel(&self, p: Vec2) -> (i64, i64) {
        (
            (p.x * self.scale).floor() as i64,
            ((self.arena_height - p.y) * self.scale).floor() as i64,
        )
    }

    /// World point at the centre of pixel `(col, row)`.
    pub fn to_world(&self, col: i64, row: i64) -> Vec2 {
        Vec2::new(
            (col as f64 + 0.5) / self.scale,
            self.arena_height - (row as f64 + 0.5) / self.scale,
        )
    }
}

/// Field as grayscale with the goal region tinted.
pub fn render_field(field: &ScalarField, scale: f64) -> (RgbImage, PixelTransform) {
    let ext = field.extent();
    let w = (ext.x * scale).round().max(1.0) as usize;
    let h = (ext.y * scale).round().max(1.0) as usize;
    let t = PixelTransform {
        scale,
        arena_height: ext.y,
    };
    let mut img = RgbImage::new(w, h, [0, 0, 0]);
    for row in 0..h {
        for col in 0..w {
            let v = field.sample_nearest(t.to_world(col as i64, row as i64));
            img.pixels[row * w + col] = if v == 0.0 {
                GOAL_RGB
            } else {
                let g = (v * 255.0).round() as u8;
                [g, g, g]
            };
        }
    }
    (img, t)
}

pub fn fill_disc(img: &mut RgbImage, t: &PixelTransform, centre: Vec2, radius: f64, rgb: [u8; 3]) {
    let (c0, r0) = t.to_pixel(centre + Vec2::new(-radius, radius));
    let (c1, r1) = t.to_pixel(centre + Vec2::new(radius, -radius));
    let r2 = radius * radius;
    for row in r0..=r1 {
        for col in c0..=c1 {
            if (t.to_world(col, row) - centre).norm_sq() <= r2 {
                img.put(col, row, rgb);
            }
        }
    }
    // always mark the centre pixel so tiny discs stay visible
    let (c, r) = t.to_pixel(centre);
    img.put(c, r, rgb);
}

/// Integer line between two pixels (inclusive).
pub fn draw_line(img: &mut RgbImage, from: (i64, i64), to: (i64, i64), rgb: [u8; 3]) {
    let (mut x, mut y) = from;
    let dx = (to.0 - x).abs();
    let dy = -(to.1 - y).abs();
    let sx = if x < to.0 { 1 } else { -1 };
    let sy = if y < to.1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        img.put(x, y, rgb);
        if (x, y) == to {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Field background, pucks, robots and a heading tick per robot.
pub fn render_frame(world: &World, field: &ScalarField, scale: f64) -> RgbImage {
    let (mut img, t) = render_field(field, scale);
    for p in &world.pucks {
        fill_disc(&mut img, &t, p.position, p.radius, PUCK_RGB);
    }
    for r in &world.robots {
        fill_disc(&mut img, &t, r.position, r.radius, ROBOT_RGB);
        let tip = r.position + Vec2::from_angle(r.heading) * r.radius;
        draw_line(&mut img, t.to_pixel(r.position), t.to_pixel(tip), HEADING_RGB);
    }
    img
}

/// Arrows over the field; each arrow runs from the sample point to the
/// point displaced by `vector * arrow_scale`.
pub fn render_flow(vectors: &[(Vec2, Vec2)], field: &ScalarField, scale: f64, arrow_scale: f64) -> RgbImage {
    let (mut img, t) = render_field(field, scale);
    for &(base, v) in vectors {
        let from = t.to_pixel(base);
        let to = t.to_pixel(base + v * arrow_scale);
        if from == to {
            img.put(from.0, from.1, ARROW_RGB);
            continue;
        }
        draw_line(&mut img, from, to, ARROW_RGB);
        // two short barbs at the tip
        let len = v.norm() * arrow_scale;
        let barb = (0.3 * len).min(6.0);
        let back = -(v * (1.0 / v.norm()));
        for a in [0.5f64, -0.5] {
            let b = base + v * arrow_scale + back.rotate(a) * barb;
            draw_line(&mut img, to, t.to_pixel(b), ARROW_RGB);
        }
    }
    img
}
