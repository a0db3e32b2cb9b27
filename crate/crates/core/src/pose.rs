//! Skeleton poses in engine coordinates, used to synthesize landmark streams.
//!
//! Engine coordinates are learner-view: the learner's right side has larger
//! `x`, as in a mirror. Providers that report camera-view coordinates are
//! brought into this convention with [`crate::landmark::mirror`].

use std::ops::{Index, IndexMut};

use crate::landmark::{CleanFrame, CleanLandmark, LandmarkFrame, LandmarkId, Point, RawLandmark};

/// One position per landmark.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose(pub [Point; LandmarkId::COUNT]);

/// Anchor the standing pose is scaled about.
const ANCHOR_Y: f64 = 0.575;

const NEUTRAL: [(LandmarkId, f64, f64); LandmarkId::COUNT] = [
    (LandmarkId::Head, 0.50, 0.20),
    (LandmarkId::LeftShoulder, 0.40, 0.35),
    (LandmarkId::RightShoulder, 0.60, 0.35),
    (LandmarkId::LeftElbow, 0.38, 0.50),
    (LandmarkId::RightElbow, 0.62, 0.50),
    (LandmarkId::LeftWrist, 0.37, 0.64),
    (LandmarkId::RightWrist, 0.63, 0.64),
    (LandmarkId::LeftHip, 0.45, 0.65),
    (LandmarkId::RightHip, 0.55, 0.65),
    (LandmarkId::LeftKnee, 0.45, 0.80),
    (LandmarkId::RightKnee, 0.55, 0.80),
    (LandmarkId::LeftAnkle, 0.45, 0.95),
    (LandmarkId::RightAnkle, 0.55, 0.95),
];

impl Pose {
    /// Relaxed standing pose centered at `center_x`. At `scale = 1` the
    /// shoulder width is 0.2 and the torso length 0.3.
    pub fn neutral(center_x: f64, scale: f64) -> Pose {
        let mut pts = [Point::default(); LandmarkId::COUNT];
        for (id, x, y) in NEUTRAL {
            pts[id.index()] = Point::new(center_x + (x - 0.5) * scale, ANCHOR_Y + (y - ANCHOR_Y) * scale);
        }
        Pose(pts)
    }

    pub fn shoulder_width(&self) -> f64 {
        self[LandmarkId::LeftShoulder].distance(self[LandmarkId::RightShoulder])
    }

    pub fn torso_length(&self) -> f64 {
        let s = self[LandmarkId::LeftShoulder].midpoint(self[LandmarkId::RightShoulder]);
        let h = self[LandmarkId::LeftHip].midpoint(self[LandmarkId::RightHip]);
        s.distance(h)
    }

    pub fn translate(&mut self, dx: f64, dy: f64) {
        for p in self.0.iter_mut() {
            *p = p.offset(dx, dy);
        }
    }

    pub fn to_frame(&self, timestamp_ms: u64, player_slot: u8, confidence: f64) -> LandmarkFrame {
        let mut lms = [RawLandmark::default(); LandmarkId::COUNT];
        for id in LandmarkId::ALL {
            let p = self[id];
            lms[id.index()] = RawLandmark::new(p.x, p.y, confidence);
        }
        LandmarkFrame::new(timestamp_ms, player_slot, lms)
    }

    /// A fully visible clean frame, bypassing ingestion.
    pub fn to_clean(&self, timestamp_ms: u64, player_slot: u8) -> CleanFrame {
        let mut lms = [CleanLandmark { position: None, occluded: false, stale_ms: 0 }; LandmarkId::COUNT];
        for id in LandmarkId::ALL {
            lms[id.index()].position = Some(self[id]);
        }
        CleanFrame { timestamp_ms, player_slot, landmarks: lms }
    }
}

impl Index<LandmarkId> for Pose {
    type Output = Point;
    fn index(&self, id: LandmarkId) -> &Point {
        &self.0[id.index()]
    }
}

impl IndexMut<LandmarkId> for Pose {
    fn index_mut(&mut self, id: LandmarkId) -> &mut Point {
        &mut self.0[id.index()]
    }
}

/// Wrist placement relative to its shoulder, in shoulder widths. `out` is
/// positive away from the body midline, `down` positive below the shoulder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arm {
    pub out: f64,
    pub down: f64,
    /// Interior elbow angle. The elbow sits on the perpendicular bisector of
    /// the shoulder-wrist segment.
    pub bend_deg: f64,
}

impl Arm {
    pub const REST: Arm = Arm { out: 0.15, down: 1.45, bend_deg: 172.0 };
}

/// Low-dimensional body parameters that expand into a [`Pose`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rig {
    pub center_x: f64,
    pub scale: f64,
    /// Left then right.
    pub arms: [Arm; 2],
    /// Knee lift above standing, in torso lengths. Left then right.
    pub knee_lift: [f64; 2],
    /// Head offset from rest, in shoulder widths.
    pub head: (f64, f64),
    /// Sideways shift of the upper body over the hips, in torso lengths.
    pub lean: f64,
}

impl Rig {
    pub fn standing(center_x: f64, scale: f64) -> Rig {
        Rig { center_x, scale, arms: [Arm::REST; 2], knee_lift: [0.0; 2], head: (0.0, 0.0), lean: 0.0 }
    }

    pub fn shoulder_width(&self) -> f64 {
        0.2 * self.scale
    }

    pub fn torso_length(&self) -> f64 {
        0.3 * self.scale
    }

    pub fn pose(&self) -> Pose {
        use LandmarkId::*;
        let mut p = Pose::neutral(self.center_x, self.scale);
        let sw = self.shoulder_width();
        let torso = self.torso_length();
        let lean = self.lean * torso;
        for id in [Head, LeftShoulder, RightShoulder] {
            p[id] = p[id].offset(lean, 0.0);
        }
        p[Head] = p[Head].offset(self.head.0 * sw, self.head.1 * sw);
        let sides = [(LeftShoulder, LeftElbow, LeftWrist, -1.0), (RightShoulder, RightElbow, RightWrist, 1.0)];
        for (arm, (shoulder, elbow, wrist, outward)) in self.arms.iter().zip(sides) {
            let s = p[shoulder];
            let w = s.offset(outward * arm.out * sw, arm.down * sw);
            p[wrist] = w;
            p[elbow] = elbow_point(s, w, arm.bend_deg, outward);
        }
        for (lift, knee, ankle) in
            [(self.knee_lift[0], LeftKnee, LeftAnkle), (self.knee_lift[1], RightKnee, RightAnkle)]
        {
            p[knee] = p[knee].offset(0.0, -lift * torso);
            p[ankle] = p[ankle].offset(0.0, -0.5 * lift * torso);
        }
        p
    }
}

fn elbow_point(s: Point, w: Point, bend_deg: f64, outward: f64) -> Point {
    let (dx, dy) = (w.x - s.x, w.y - s.y);
    let d = (dx * dx + dy * dy).sqrt();
    let mid = s.midpoint(w);
    if d == 0.0 || bend_deg >= 180.0 {
        return mid;
    }
    // isosceles arm: apex angle bend_deg at the elbow
    let h = 0.5 * d / libm::tan(0.5 * bend_deg.to_radians());
    let (px, py) = (outward * dy / d, -outward * dx / d);
    mid.offset(px * h, py * h)
}

/// Camera timestamp of frame `index` at `fps` frames per second.
pub fn frame_time_ms(index: u64, fps: u64) -> u64 {
    index * 1000 / fps
}
