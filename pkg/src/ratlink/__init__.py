"""ratlink: synthesis and rapid-prototyping toolkit for rational single-loop linkages.

Pipeline: interpolate up to four poses with a rational motion, factorize the
motion polynomial into revolute-joint factors, close two factorizations into
a 4R/6R loop, analyze full-cycle self-collisions of the line-segment model,
and export DH + connection-point design parameters.
"""
from . import errors
from .quatcore import (
    DualQuaternion,
    PluckerLine,
    Point3,
    Pose,
    Quaternion,
    act_on_line,
    act_on_point,
    embed_line,
    embed_point,
    line_from_two_points,
    line_intersection_condition,
    pose_from_coords,
    rotation_about_line,
    study_condition,
    translation,
)

__version__ = "0.1.0"

__all__ = [
    "DualQuaternion",
    "PluckerLine",
    "Point3",
    "Pose",
    "Quaternion",
    "act_on_line",
    "act_on_point",
    "embed_line",
    "embed_point",
    "errors",
    "line_from_two_points",
    "line_intersection_condition",
    "pose_from_coords",
    "rotation_about_line",
    "study_condition",
    "translation",
]
