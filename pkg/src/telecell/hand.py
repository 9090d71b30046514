"""Glove <-> remote hand force loop.

Each finger is an independent 1-DOF channel: the glove angle commands a PD
servo on the remote finger, the fingertip force is estimated from motor
current (so it includes servo effort, a documented bias), and the estimate
is rendered back on the glove, clamped to the actuator cap.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConfigError


@dataclass
class FingerChannel:
    glove_angle: float = 0.0
    glove_vel: float = 0.0
    hand_angle: float = 0.0
    hand_vel: float = 0.0
    motor_current: float = 0.0
    torque_constant: float = 0.5   # N*m/A
    servo_kp: float = 2.0
    servo_kd: float = 0.05
    finger_inertia: float = 0.002  # kg*m^2
    glove_inertia: float = 0.002

    def __post_init__(self):
        if self.torque_constant <= 0:
            raise ConfigError("finger torque_constant must be > 0")
        if self.finger_inertia <= 0 or self.glove_inertia <= 0:
            raise ConfigError("finger inertias must be > 0")
        if self.servo_kp < 0 or self.servo_kd < 0:
            raise ConfigError("finger servo gains must be >= 0")


@dataclass
class GraspObject:
    """Unilateral rotational stiffness: resists closure past surface_angle,
    never assists it."""

    surface_angle: float = 0.2
    stiffness: float = 0.0

    def __post_init__(self):
        if self.stiffness < 0:
            raise ConfigError("grasp object stiffness must be >= 0")

    def torque(self, hand_angle: float) -> float:
        penetration = hand_angle - self.surface_angle
        if penetration <= 0:
            return 0.0
        return -self.stiffness * penetration


def hand_servo(channel: FingerChannel, glove_angle_rx: float):
    """PD servo toward the received glove angle; returns (torque, current).

    Updates the channel's motor_current (torque / k_t), the signal the force
    estimate is built from.
    """
    torque = (channel.servo_kp * (glove_angle_rx - channel.hand_angle)
              - channel.servo_kd * channel.hand_vel)
    channel.motor_current = torque / channel.torque_constant
    return torque, channel.motor_current


def estimate_force(channel: FingerChannel) -> float:
    """Current-based fingertip torque estimate: tau = k_t * i.

    Includes servo effort, not only contact; raw, unfiltered.
    """
    return channel.torque_constant * channel.motor_current


def glove_render(tau_est_rx: float, render_scale: float, cap: float):
    """Clamp the scaled estimate to the glove actuator range.

    Returns (rendered magnitude opposing closure, saturated flag).
    """
    if cap <= 0:
        raise ConfigError("glove render cap must be > 0")
    raw = render_scale * tau_est_rx
    rendered = min(max(raw, -cap), cap)
    return rendered, rendered != raw
