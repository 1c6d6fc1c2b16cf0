//! Pinhole back-projection of image-space poses into the 3D world frame.
//!
//! Convention: the stored extrinsics map world coordinates into camera
//! coordinates, `x_cam = R * x_world + t`. Back-projection applies the
//! inverse, `x_world = R^T * (x_cam - t)`.

use crate::error::{Error, Result};
use crate::ingest::parse_key_values;
use crate::model::{Joint, JointKind, Point3, SkeletonFrame};

/// Pinhole intrinsics: focal lengths and principal point in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64) -> Result<CameraIntrinsics> {
        if !(fx.is_finite() && fy.is_finite() && fx > 0.0 && fy > 0.0) {
            return Err(Error::Calibration(format!(
                "focal lengths must be positive, got fx={fx}, fy={fy}"
            )));
        }
        if !(cx.is_finite() && cy.is_finite()) {
            return Err(Error::Calibration("non-finite principal point".into()));
        }
        Ok(CameraIntrinsics { fx, fy, cx, cy })
    }
}

/// Rigid camera pose: row-major rotation plus translation in meters,
/// mapping world into camera coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraExtrinsics {
    pub rotation: [[f64; 3]; 3],
    pub translation: Point3,
}

const ORTHONORMAL_TOL: f64 = 1e-6;

impl CameraExtrinsics {
    pub fn new(rotation: [[f64; 3]; 3], translation: Point3) -> Result<CameraExtrinsics> {
        for row in &rotation {
            for v in row {
                if !v.is_finite() {
                    return Err(Error::Calibration("non-finite rotation entry".into()));
                }
            }
        }
        if !translation.is_finite() {
            return Err(Error::Calibration("non-finite translation".into()));
        }
        // R^T R = I within tolerance
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| rotation[k][i] * rotation[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (dot - expect).abs() > ORTHONORMAL_TOL {
                    return Err(Error::Calibration(format!(
                        "rotation is not orthonormal (R^T R deviates by {:e} at [{i}][{j}])",
                        (dot - expect).abs()
                    )));
                }
            }
        }
        let det = det3(&rotation);
        if (det - 1.0).abs() > ORTHONORMAL_TOL {
            return Err(Error::Calibration(format!(
                "rotation determinant {det} is not +1"
            )));
        }
        Ok(CameraExtrinsics { rotation, translation })
    }

    pub fn identity() -> CameraExtrinsics {
        CameraExtrinsics {
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: Point3::ZERO,
        }
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn mul_transpose(m: &[[f64; 3]; 3], p: Point3) -> Point3 {
    Point3::new(
        m[0][0] * p.x + m[1][0] * p.y + m[2][0] * p.z,
        m[0][1] * p.x + m[1][1] * p.y + m[2][1] * p.z,
        m[0][2] * p.x + m[1][2] * p.y + m[2][2] * p.z,
    )
}

/// One joint detection in image space with metric depth.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageJoint {
    pub kind: JointKind,
    pub u: f64,
    pub v: f64,
    /// Meters along the optical axis; must be positive to back-project.
    pub depth: f64,
    pub confidence: f64,
}

/// An image-space skeleton for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePose {
    pub frame_index: u64,
    pub timestamp: f64,
    pub joints: Vec<ImageJoint>,
}

/// Back-projects an image-space pose to a world-frame skeleton:
/// `Pc = ((u-cx)*Z/fx, (v-cy)*Z/fy, Z)`, then `world = R^T * (Pc - t)`.
pub fn back_project(
    pose: &ImagePose,
    intr: &CameraIntrinsics,
    extr: &CameraExtrinsics,
) -> Result<SkeletonFrame> {
    let mut joints = Vec::with_capacity(pose.joints.len());
    for j in &pose.joints {
        if !(j.depth.is_finite() && j.depth > 0.0) {
            return Err(Error::Calibration(format!(
                "joint {:?} has non-positive depth {}",
                j.kind, j.depth
            )));
        }
        let cam = Point3::new(
            (j.u - intr.cx) * j.depth / intr.fx,
            (j.v - intr.cy) * j.depth / intr.fy,
            j.depth,
        );
        let world = mul_transpose(&extr.rotation, cam - extr.translation);
        joints.push(Joint::with_confidence(j.kind.clone(), world, j.confidence));
    }
    SkeletonFrame::new(pose.frame_index, pose.timestamp, joints)
}

/// Reads a camera config: keys `fx fy cx cy`, rotation entries
/// `r00..r22` row-major, translation `tx ty tz`.
pub fn parse_camera_config(text: &str) -> Result<(CameraIntrinsics, CameraExtrinsics)> {
    let pairs = parse_key_values(text)?;
    let get = |key: &str| -> Result<f64> {
        let raw = pairs
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::Calibration(format!("missing key {key:?}")))?;
        raw.parse()
            .map_err(|_| Error::Calibration(format!("bad value {raw:?} for key {key:?}")))
    };
    let intr = CameraIntrinsics::new(get("fx")?, get("fy")?, get("cx")?, get("cy")?)?;
    let mut rotation = [[0.0f64; 3]; 3];
    for (i, row) in rotation.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = get(&format!("r{i}{j}"))?;
        }
    }
    let translation = Point3::new(get("tx")?, get("ty")?, get("tz")?);
    let extr = CameraExtrinsics::new(rotation, translation)?;
    Ok((intr, extr))
}
