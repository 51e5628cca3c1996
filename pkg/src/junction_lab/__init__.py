"""Junction Lab

Numerical laboratory for ε-penalized optimal control towards the cross
network Γ = {x₁x₂ = 0}: penalized trajectories, their limits on Γ, and the
discounted value functions on both sides of the limit.
"""

__version__ = '0.1.0'
__author__ = 'Junction Lab Team'
__email__ = 'team@example.com'

from .cli import main

__all__ = ['main']
