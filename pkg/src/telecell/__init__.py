"""Deterministic bilateral-teleoperation simulator and control library."""

from .core import (AxisState, ConfigError, SimConfig, SimulationFault, Tick,
                   integrate_step, run_session)
from .plants import (ObjectCoupling, OperatorModel, RigidAxisPlant, ScriptedTrajectory,
                     TrajectorySegment, WallContact, contact_force, coupling_forces,
                     min_jerk, operator_force)
from .admittance import AdmittanceParams, admittance_accel, reshape_inertia
from .bilateral import (BilateralControllerState, BilateralGains, BilateralMode,
                        EnergyBudget, friction_feedforward, master_command,
                        passivity_observer, slave_command)
from .hand import FingerChannel, GraspObject, estimate_force, glove_render, hand_servo
from .channel import Channel, ChannelConfig
from .telemetry import MetricsReport, TelemetrySeries, compute_metrics, record_append, replay
from .session import TeleopSession, build_session, run_scenario

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
