"""Multi-objective evolutionary optimization with focused-operator screening.

Subpackages and modules:

- ``nsgafo.core``: NSGA-III / NSGA-III-FO machinery and a MOEA/D baseline
- ``nsgafo.problems``: DTLZ3 and WFG3 with analytic front samplers
- ``nsgafo.metrics``: IGD and hypervolume
- ``nsgafo.spline``: degree-6 B-spline interpolation with derivative nets
- ``nsgafo.robot``: time / jerk / energy trajectory objectives for a 6-joint arm
- ``nsgafo.cli``: ``bench``, ``plan`` and ``metrics`` commands
"""

from nsgafo.core import AlgorithmConfig, RunTrace, run

__version__ = "0.1.0"

__all__ = ["AlgorithmConfig", "RunTrace", "run", "__version__"]
