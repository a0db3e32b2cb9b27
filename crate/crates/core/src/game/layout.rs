//! Play-area geometry. All coordinates are normalized engine coordinates.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::content::stats::SkewClass;
use crate::content::{GridPoint, OptionValue, Question};
use crate::landmark::Point;

/// Axis-aligned rectangle, bounds inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.x0..=self.x1).contains(&p.x) && (self.y0..=self.y1).contains(&p.y)
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

/// Band the catch bubbles drift in; centers reflect at its edges.
pub const CATCH_FIELD: Rect = Rect::new(0.1, 0.1, 0.9, 0.25);

/// The ditch box covers 60% of the play area.
pub const DITCH_BOX: Rect = Rect::new(0.1, 0.125, 0.9, 0.875);
const DITCH_COLS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];
const DITCH_ROWS: [f64; 3] = [0.2, 0.3, 0.4];

pub const MIDLINE_X: f64 = 0.5;
/// Zone centers for the skew game: left, center, right.
pub const ZONE_X: [f64; 3] = [0.2, MIDLINE_X, 0.8];
pub const ZONE_Y: f64 = 0.45;

const KNEE_ROW_Y: f64 = 0.15;

/// Half the side of the cursor square, in shoulder widths around the
/// dominant shoulder.
pub const GRID_HALF_SPAN: f64 = 0.9;
const GRID_ORIGIN: Point = Point::new(0.25, 0.5);
const GRID_CELL: (f64, f64) = (0.1, 0.08);

/// Zone index for a skew answer. Right-skewed sits right of the midline.
pub fn skew_zone(class: SkewClass) -> usize {
    match class {
        SkewClass::LeftSkewed => 0,
        SkewClass::Symmetric => 1,
        SkewClass::RightSkewed => 2,
    }
}

/// Start position and velocity for each option of a catch question.
pub fn catch_layout(rng: &mut ChaCha8Rng, n: usize, speed: f64) -> Vec<(Point, Point)> {
    let f = CATCH_FIELD;
    (0..n)
        .map(|i| {
            let x = f.x0 + (f.x1 - f.x0) * (i as f64 + 0.5) / n as f64;
            let y = rng.random_range(f.y0..=f.y1);
            let (dx, dy) = loop {
                let a: f64 = rng.random_range(-1.0..=1.0);
                let b: f64 = rng.random_range(-1.0..=1.0);
                let norm = (a * a + b * b).sqrt();
                if norm > 0.2 && norm <= 1.0 {
                    break (a / norm, b / norm);
                }
            };
            (Point::new(x, y), Point::new(dx * speed, dy * speed))
        })
        .collect()
}

/// Positions for skew options, by answer meaning rather than option order.
pub fn zone_layout(q: &Question) -> Vec<Point> {
    q.options
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let zone = match o.value {
                OptionValue::Skew(class) => skew_zone(class),
                _ => i.min(2),
            };
            Point::new(ZONE_X[zone], ZONE_Y)
        })
        .collect()
}

pub fn knee_layout(n: usize) -> Vec<Point> {
    (0..n).map(|i| Point::new(0.2 + 0.6 * (i as f64 + 0.5) / n as f64, KNEE_ROW_Y)).collect()
}

/// Value targets fill a 4 by 3 grid inside the ditch box, row-major.
pub fn ditch_layout(n: usize) -> Vec<Point> {
    (0..n).map(|i| Point::new(DITCH_COLS[i % 4], DITCH_ROWS[i / 4])).collect()
}

/// Screen position of a grid point.
pub fn grid_display(p: GridPoint) -> Point {
    Point::new(GRID_ORIGIN.x + GRID_CELL.0 * f64::from(p.x), GRID_ORIGIN.y - GRID_CELL.1 * f64::from(p.y))
}

/// Grid cell under the dominant wrist. The cursor square spans
/// `±GRID_HALF_SPAN` shoulder widths around the shoulder, `y` pointing up.
/// Returns `None` when the wrist is more than half a cell off the grid.
pub fn grid_cursor(shoulder: Point, wrist: Point, shoulder_width: f64, size: u8) -> Option<GridPoint> {
    let last = f64::from(size - 1);
    let u = (wrist.x - shoulder.x) / shoulder_width;
    let v = (shoulder.y - wrist.y) / shoulder_width;
    let gx = (u + GRID_HALF_SPAN) / (2.0 * GRID_HALF_SPAN) * last;
    let gy = (v + GRID_HALF_SPAN) / (2.0 * GRID_HALF_SPAN) * last;
    let range = -0.5..last + 0.5;
    if !range.contains(&gx) || !range.contains(&gy) {
        return None;
    }
    Some(GridPoint::new(gx.round() as u8, gy.round() as u8))
}

/// Wrist position that puts the cursor on the center of `p`.
pub fn grid_wrist(shoulder: Point, shoulder_width: f64, p: GridPoint, size: u8) -> Point {
    let last = f64::from(size - 1);
    let u = f64::from(p.x) / last * 2.0 * GRID_HALF_SPAN - GRID_HALF_SPAN;
    let v = f64::from(p.y) / last * 2.0 * GRID_HALF_SPAN - GRID_HALF_SPAN;
    Point::new(shoulder.x + u * shoulder_width, shoulder.y - v * shoulder_width)
}
