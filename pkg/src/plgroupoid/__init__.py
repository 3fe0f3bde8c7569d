"""Numerical toolkit for Poisson-Lie groups, their doubles and the symplectic
groupoids built from them, with a reduction by coisotropic subgroups."""

from .groupoid import GroupoidElement, Omega
from .groups import DualGroupPoint, GroupPoint, NotFactorizable, Order
from .models import build_su11, build_trivial, get_model

__version__ = "0.1.0"

__all__ = [
    "DualGroupPoint",
    "GroupPoint",
    "GroupoidElement",
    "NotFactorizable",
    "Omega",
    "Order",
    "build_su11",
    "build_trivial",
    "get_model",
]
